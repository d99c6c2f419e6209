from .autodiff import (
    GradientTape,
    NumericsError,
    Tensor,
    add,
    backward,
    constant,
    finite_diff_check,
    matmul,
    mul,
    relu,
    reshape,
    square,
    sub,
    take_rows,
    tanh,
    tmean,
    transpose,
    tsum,
)
from .rng import Rng
from .simplex import project_simplex, sample_dirichlet

__all__ = [
    "GradientTape",
    "NumericsError",
    "Tensor",
    "Rng",
    "add",
    "backward",
    "constant",
    "finite_diff_check",
    "matmul",
    "mul",
    "relu",
    "reshape",
    "square",
    "sub",
    "take_rows",
    "tanh",
    "tmean",
    "transpose",
    "tsum",
    "project_simplex",
    "sample_dirichlet",
]
