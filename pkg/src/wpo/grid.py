"""Radial distribution-network data model and graph spectrum.

Buses keep their external 1-based ids; positional (0-based) indexing is
derived on demand. Per-unit convention: base power 1 MVA, base voltage at
nominal (12.66 kV for the shipped 33-bus feeder), costs in $ per p.u. per
hour with a 0.25 h dispatch interval applied by the dispatch layer.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np


class GridError(ValueError):
    pass


@dataclass(frozen=True)
class Bus:
    id: int
    p_load: float  # p.u.
    q_load: float  # p.u.


@dataclass(frozen=True)
class Branch:
    from_bus: int
    to_bus: int
    r: float  # p.u.
    x: float  # p.u.
    i_max: float  # p.u. current magnitude limit


@dataclass(frozen=True)
class Costs:
    pi_t: float  # trading power, $/p.u.-h
    pi_g: float  # DG output, $/p.u.-h
    pi_p: float  # undervoltage penalty, $/p.u.-h


@dataclass
class Network:
    buses: list
    branches: list
    ul_nodes: list          # ordered; fixes the weight-vector coordinate order
    dg_nodes: dict          # bus id -> capacity p.u.
    v_min: float
    v_max: float
    substation: int
    costs: Costs
    load_scale: float = 1.0  # factor already applied to the shipped loads

    def __post_init__(self):
        self._id_to_idx = {b.id: i for i, b in enumerate(self.buses)}

    @property
    def n_bus(self):
        return len(self.buses)

    @property
    def n_branch(self):
        return len(self.branches)

    def index_of(self, bus_id: int) -> int:
        return self._id_to_idx[bus_id]

    def ul_indices(self) -> np.ndarray:
        return np.array([self.index_of(i) for i in self.ul_nodes], dtype=np.intp)

    def dg_indices(self) -> np.ndarray:
        return np.array([self.index_of(i) for i in self.dg_nodes], dtype=np.intp)

    def p_load_vector(self) -> np.ndarray:
        return np.array([b.p_load for b in self.buses])

    def q_load_vector(self) -> np.ndarray:
        return np.array([b.q_load for b in self.buses])


@dataclass(frozen=True)
class GraphSpectrum:
    adjacency: np.ndarray         # weighted, symmetric
    degree: np.ndarray            # diagonal entries
    laplacian: np.ndarray         # normalized: I - D^-1/2 W D^-1/2
    scaled_laplacian: np.ndarray  # 2 L / lambda_max - I
    lambda_max: float


# Baran & Wu 12.66 kV feeder, impedances in ohm, loads in kW / kvar at the
# receiving bus of each branch. Bus 1 is the substation (no load).
_IEEE33_BRANCHES = [
    # (from, to, r_ohm, x_ohm, p_kw, q_kvar)
    (1, 2, 0.0922, 0.0470, 100.0, 60.0),
    (2, 3, 0.4930, 0.2511, 90.0, 40.0),
    (3, 4, 0.3660, 0.1864, 120.0, 80.0),
    (4, 5, 0.3811, 0.1941, 60.0, 30.0),
    (5, 6, 0.8190, 0.7070, 60.0, 20.0),
    (6, 7, 0.1872, 0.6188, 200.0, 100.0),
    (7, 8, 1.7114, 1.2351, 200.0, 100.0),
    (8, 9, 1.0300, 0.7400, 60.0, 20.0),
    (9, 10, 1.0440, 0.7400, 60.0, 20.0),
    (10, 11, 0.1966, 0.0650, 45.0, 30.0),
    (11, 12, 0.3744, 0.1238, 60.0, 35.0),
    (12, 13, 1.4680, 1.1550, 60.0, 35.0),
    (13, 14, 0.5416, 0.7129, 120.0, 80.0),
    (14, 15, 0.5910, 0.5260, 60.0, 10.0),
    (15, 16, 0.7463, 0.5450, 60.0, 20.0),
    (16, 17, 1.2890, 1.7210, 60.0, 20.0),
    (17, 18, 0.7320, 0.5740, 90.0, 40.0),
    (2, 19, 0.1640, 0.1565, 90.0, 40.0),
    (19, 20, 1.5042, 1.3554, 90.0, 40.0),
    (20, 21, 0.4095, 0.4784, 90.0, 40.0),
    (21, 22, 0.7089, 0.9373, 90.0, 40.0),
    (3, 23, 0.4512, 0.3083, 90.0, 50.0),
    (23, 24, 0.8980, 0.7091, 420.0, 200.0),
    (24, 25, 0.8960, 0.7011, 420.0, 200.0),
    (6, 26, 0.2030, 0.1034, 60.0, 25.0),
    (26, 27, 0.2842, 0.1447, 60.0, 25.0),
    (27, 28, 1.0590, 0.9337, 60.0, 20.0),
    (28, 29, 0.8042, 0.7006, 120.0, 70.0),
    (29, 30, 0.5075, 0.2585, 200.0, 600.0),
    (30, 31, 0.9744, 0.9630, 150.0, 70.0),
    (31, 32, 0.3105, 0.3619, 210.0, 100.0),
    (32, 33, 0.3410, 0.5302, 60.0, 40.0),
]

_IEEE33_KV = 12.66
_IEEE33_MVA = 1.0
_IEEE33_UL = [8, 12, 14, 16, 18, 22, 25, 27, 29, 30, 31, 33]
_IEEE33_DG = [7, 13, 17, 20, 29, 32]
_IEEE33_BRANCH1_UL = [8, 12, 14, 16, 18]   # main-feeder lateral toward bus 18
_IEEE33_BRANCH2_UL = [29, 30, 31, 33]      # lateral toward bus 33


def load_ieee33(load_scale: float = 1.05, i_max: float = 10.0) -> Network:
    """Modified 33-bus feeder: loads scaled, DG and uncertain-load sites set.

    DG capacity 1 p.u. per site, voltage band [0.90, 1.10] p.u., costs
    (pi_g, pi_t, pi_p) = (10, 20, 100) $/p.u.-h.
    """
    z_base = (_IEEE33_KV * 1e3) ** 2 / (_IEEE33_MVA * 1e6)
    loads = {1: (0.0, 0.0)}
    branches = []
    for f, t, r, x, p, q in _IEEE33_BRANCHES:
        loads[t] = (p / 1e3 * load_scale, q / 1e3 * load_scale)
        branches.append(Branch(f, t, r / z_base, x / z_base, i_max))
    buses = [Bus(i, *loads[i]) for i in range(1, 34)]
    return Network(
        buses=buses,
        branches=branches,
        ul_nodes=list(_IEEE33_UL),
        dg_nodes={i: 1.0 for i in _IEEE33_DG},
        v_min=0.90,
        v_max=1.10,
        substation=1,
        costs=Costs(pi_t=20.0, pi_g=10.0, pi_p=100.0),
        load_scale=load_scale,
    )


def validate_network(net: Network) -> list:
    """All invariant violations, each naming the offending bus/branch."""
    problems = []
    ids = [b.id for b in net.buses]
    if len(set(ids)) != len(ids):
        problems.append("duplicate bus ids")
    id_set = set(ids)
    if net.substation not in id_set:
        problems.append(f"substation {net.substation} is not a bus")
    if len(net.branches) != len(net.buses) - 1:
        problems.append(
            f"not a tree: {len(net.branches)} branches for {len(net.buses)} buses")
    parent = {i: i for i in ids}

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for k, br in enumerate(net.branches):
        if br.from_bus not in id_set or br.to_bus not in id_set:
            problems.append(f"branch {k} references unknown bus")
            continue
        if br.r <= 0 or br.x <= 0:
            problems.append(f"branch {br.from_bus}-{br.to_bus}: nonpositive impedance")
        if br.i_max <= 0:
            problems.append(f"branch {br.from_bus}-{br.to_bus}: nonpositive current limit")
        ra, rb = find(br.from_bus), find(br.to_bus)
        if ra == rb:
            problems.append(f"not a tree: branch {br.from_bus}-{br.to_bus} closes a cycle")
        else:
            parent[ra] = rb
    roots = {find(i) for i in ids}
    if len(roots) > 1 and "not a tree" not in " ".join(problems):
        problems.append("not a tree: graph is disconnected")
    if not net.v_min < 1.0 < net.v_max:
        problems.append(f"voltage bounds [{net.v_min}, {net.v_max}] do not bracket 1.0")
    for i in net.ul_nodes:
        if i not in id_set:
            problems.append(f"uncertain-load node {i} is not a bus")
    for i in net.dg_nodes:
        if i not in id_set:
            problems.append(f"DG node {i} is not a bus")
    for b in net.buses:
        if b.p_load < 0 or b.q_load < 0:
            problems.append(f"bus {b.id}: negative fixed load")
    return problems


def graph_spectrum(net: Network) -> GraphSpectrum:
    """Normalized Laplacian of the branch graph with admittance weights.

    Edge weight 1/|z| = 1/sqrt(r^2 + x^2); off-diagonal terms only (no
    substation self-term).
    """
    n = net.n_bus
    W = np.zeros((n, n))
    for br in net.branches:
        i, j = net.index_of(br.from_bus), net.index_of(br.to_bus)
        w = 1.0 / float(np.hypot(br.r, br.x))
        W[i, j] = w
        W[j, i] = w
    deg = W.sum(axis=1)
    if (deg <= 0).any():
        bad = [net.buses[i].id for i in np.nonzero(deg <= 0)[0]]
        raise GridError(f"isolated node(s) with zero degree: {bad}")
    d_inv_sqrt = 1.0 / np.sqrt(deg)
    lap = np.eye(n) - (d_inv_sqrt[:, None] * W) * d_inv_sqrt[None, :]
    lap = 0.5 * (lap + lap.T)  # enforce exact symmetry
    lam_max = float(np.linalg.eigvalsh(lap).max())
    scaled = 2.0 * lap / lam_max - np.eye(n)
    return GraphSpectrum(adjacency=W, degree=deg, laplacian=lap,
                         scaled_laplacian=scaled, lambda_max=lam_max)


@dataclass(frozen=True)
class RadialIndex:
    """Topology arrays for sweep and dispatch: branch k feeds bus to_idx[k]."""
    order: np.ndarray       # branch positions, root-adjacent first
    from_idx: np.ndarray    # sending bus position per branch
    to_idx: np.ndarray      # receiving bus position per branch
    children: list          # per bus position, list of branch positions it feeds
    r: np.ndarray
    x: np.ndarray
    i_max: np.ndarray


def radial_structure(net: Network) -> RadialIndex:
    """Orient branches away from the substation by BFS."""
    n = net.n_bus
    adj = [[] for _ in range(n)]
    for k, br in enumerate(net.branches):
        i, j = net.index_of(br.from_bus), net.index_of(br.to_bus)
        adj[i].append((j, k))
        adj[j].append((i, k))
    root = net.index_of(net.substation)
    from_idx = np.full(net.n_branch, -1, dtype=np.intp)
    to_idx = np.full(net.n_branch, -1, dtype=np.intp)
    children = [[] for _ in range(n)]
    order = []
    seen = np.zeros(n, dtype=bool)
    seen[root] = True
    queue = [root]
    while queue:
        i = queue.pop(0)
        for j, k in adj[i]:
            if seen[j]:
                continue
            seen[j] = True
            from_idx[k] = i
            to_idx[k] = j
            children[i].append(k)
            order.append(k)
            queue.append(j)
    if not seen.all():
        raise GridError("network is not connected; run validate_network")
    r = np.array([net.branches[k].r for k in range(net.n_branch)])
    x = np.array([net.branches[k].x for k in range(net.n_branch)])
    imax = np.array([net.branches[k].i_max for k in range(net.n_branch)])
    return RadialIndex(order=np.array(order, dtype=np.intp), from_idx=from_idx,
                       to_idx=to_idx, children=children, r=r, x=x, i_max=imax)


def hop_distances(net: Network, node_ids) -> np.ndarray:
    """Pairwise hop counts between the given bus ids over the branch graph."""
    n = net.n_bus
    adj = [[] for _ in range(n)]
    for br in net.branches:
        i, j = net.index_of(br.from_bus), net.index_of(br.to_bus)
        adj[i].append(j)
        adj[j].append(i)
    out = np.zeros((len(node_ids), len(node_ids)))
    for a, src_id in enumerate(node_ids):
        dist = np.full(n, -1)
        src = net.index_of(src_id)
        dist[src] = 0
        queue = [src]
        while queue:
            i = queue.pop(0)
            for j in adj[i]:
                if dist[j] < 0:
                    dist[j] = dist[i] + 1
                    queue.append(j)
        for b, dst_id in enumerate(node_ids):
            out[a, b] = dist[net.index_of(dst_id)]
    return out


def network_to_dict(net: Network) -> dict:
    return {
        "buses": [{"id": b.id, "p_load": b.p_load, "q_load": b.q_load}
                  for b in net.buses],
        "branches": [{"from": br.from_bus, "to": br.to_bus, "r": br.r,
                      "x": br.x, "i_max": br.i_max} for br in net.branches],
        "ul_nodes": list(net.ul_nodes),
        "dg_nodes": [{"id": i, "p_max": cap} for i, cap in net.dg_nodes.items()],
        "v_min": net.v_min,
        "v_max": net.v_max,
        "substation": net.substation,
        "costs": {"pi_t": net.costs.pi_t, "pi_g": net.costs.pi_g,
                  "pi_p": net.costs.pi_p},
    }


def network_from_dict(d: dict) -> Network:
    return Network(
        buses=[Bus(int(b["id"]), float(b["p_load"]), float(b["q_load"]))
               for b in d["buses"]],
        branches=[Branch(int(b["from"]), int(b["to"]), float(b["r"]),
                         float(b["x"]), float(b["i_max"])) for b in d["branches"]],
        ul_nodes=[int(i) for i in d["ul_nodes"]],
        dg_nodes={int(g["id"]): float(g["p_max"]) for g in d["dg_nodes"]},
        v_min=float(d["v_min"]),
        v_max=float(d["v_max"]),
        substation=int(d["substation"]),
        costs=Costs(float(d["costs"]["pi_t"]), float(d["costs"]["pi_g"]),
                    float(d["costs"]["pi_p"])),
    )


def save_network(net: Network, path):
    with open(path, "w") as fh:
        json.dump(network_to_dict(net), fh, indent=2)


def load_network(path) -> Network:
    with open(path) as fh:
        return network_from_dict(json.load(fh))


def branch1_ul_nodes() -> list:
    return list(_IEEE33_BRANCH1_UL)


def branch2_ul_nodes() -> list:
    return list(_IEEE33_BRANCH2_UL)
