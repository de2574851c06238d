"""Graph statistics: components, pruning, distances, degree extremes, and the
conditional resampling experiments."""

import json
import math
import os
from dataclasses import dataclass, asdict

import numpy as np

from . import _kernels
from ._rand import stream
from .graph_models import LabeledGraph, build_csr, _canonical_edge_order, generate_drgvr
from .params import ModelParams


class UnionFind:
    """Disjoint sets with path compression and union by size."""

    def __init__(self, size):
        self.parent = list(range(size))
        self.size = [1] * size

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]


@dataclass
class ComponentReport:
    sizes: np.ndarray  # descending
    c1: int
    c2: int
    n: int
    giant_fraction: float


def components(graph: LabeledGraph) -> ComponentReport:
    """Exact connected components; giant_fraction is c1 over the step horizon
    n, not over |V|."""
    m = graph.num_vertices
    uf = UnionFind(m)
    for a, b in zip(graph.src.tolist(), graph.dst.tolist()):
        uf.union(a, b)
    counts = {}
    for v in range(m):
        r = uf.find(v)
        counts[r] = counts.get(r, 0) + 1
    sizes = np.sort(np.array(list(counts.values()), dtype=np.int64))[::-1]
    c1 = int(sizes[0]) if m else 0
    c2 = int(sizes[1]) if len(sizes) > 1 else 0
    frac = c1 / graph.n if graph.n > 0 else 0.0
    return ComponentReport(sizes=sizes, c1=c1, c2=c2, n=graph.n, giant_fraction=frac)


def explore_ball(graph: LabeledGraph, root_label: int, r: int):
    """Induced ball of radius r around root_label.

    Returns (adjacency, depth): adjacency maps label -> sorted neighbour
    labels within the ball; depth maps label -> BFS distance from the root.
    """
    if r < 0:
        raise ValueError("r must be >= 0")
    indptr, nbrs = graph.csr()
    root = graph.rank_of(root_label)
    depth = {root: 0}
    frontier = [root]
    for d in range(1, r + 1):
        nxt = []
        for v in frontier:
            for w in nbrs[indptr[v]:indptr[v + 1]].tolist():
                if w not in depth:
                    depth[w] = d
                    nxt.append(w)
        frontier = nxt
    in_ball = set(depth)
    adjacency = {}
    for v in in_ball:
        vs = graph.labels[v]
        adjacency[int(vs)] = sorted(
            int(graph.labels[w]) for w in nbrs[indptr[v]:indptr[v + 1]].tolist() if w in in_ball
        )
    return adjacency, {int(graph.labels[v]): d for v, d in depth.items()}


def prune(graph: LabeledGraph, lam: float) -> LabeledGraph:
    """Induced subgraph on survivors with birth label > lam * n."""
    if not 0 < lam < 1:
        raise ValueError("lambda must be in (0, 1)")
    keep = graph.labels > lam * graph.n
    new_rank = np.full(graph.num_vertices, -1, dtype=np.int64)
    new_rank[keep] = np.arange(int(keep.sum()))
    mask = keep[graph.src] & keep[graph.dst]
    src, dst = _canonical_edge_order(new_rank[graph.src[mask]], new_rank[graph.dst[mask]])
    return LabeledGraph(graph.params, graph.n, graph.seed, graph.labels[keep], src, dst)


@dataclass
class DistanceReport:
    n_pairs: int
    frac_connected: float
    mean_connected: float
    histogram: np.ndarray  # histogram[d] = # sampled pairs at distance d


def typical_distance(graph: LabeledGraph, pairs: int = 1000, seed: int = 0) -> DistanceReport:
    """Graph distance between uniform vertex pairs (sampled i.i.d., grouped by
    source so each BFS is reused). Disconnected pairs are excluded from the
    mean and reported via frac_connected."""
    if pairs < 100:
        raise ValueError("pairs must be >= 100")
    m = graph.num_vertices
    if m < 2:
        raise ValueError("graph needs at least two vertices")
    rng = stream(seed, 5)
    a = rng.integers(0, m, size=pairs)
    b = rng.integers(0, m - 1, size=pairs)
    b[b >= a] += 1
    indptr, nbrs = graph.csr()
    dists = np.empty(pairs, dtype=np.int64)
    order = np.argsort(a, kind="stable")
    i = 0
    while i < pairs:
        j = i
        source = a[order[i]]
        d = _kernels.bfs_distances(indptr, nbrs, int(source))
        while j < pairs and a[order[j]] == source:
            dists[order[j]] = d[b[order[j]]]
            j += 1
        i = j
    connected = dists >= 0
    frac = float(connected.mean())
    mean = float(dists[connected].mean()) if connected.any() else float("nan")
    hist = np.bincount(dists[connected]) if connected.any() else np.zeros(0, dtype=np.int64)
    return DistanceReport(n_pairs=pairs, frac_connected=frac, mean_connected=mean, histogram=hist)


def lambert_w0(x: float) -> float:
    """Principal branch of the Lambert W function by Halley iteration,
    to |W e^W - x| <= 1e-12 * max(1, |x|)."""
    if x < -1.0 / math.e:
        raise ValueError(f"lambert_w0 requires x >= -1/e, got {x}")
    if x == 0.0:
        return 0.0
    # starting point: series near the branch point, log asymptote for large x
    if x < -0.25:
        w = -1.0 + math.sqrt(2.0 * (math.e * x + 1.0))
    elif x < math.e:
        w = x / (1.0 + x) if x > 0 else x * math.exp(-x)
    else:
        lx = math.log(x)
        w = lx - math.log(lx)
    tol = 1e-12 * max(1.0, abs(x))
    for _ in range(100):
        ew = math.exp(w)
        f = w * ew - x
        if abs(f) <= tol:
            return w
        wp1 = w + 1.0
        w -= f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1))
    raise RuntimeError(f"lambert_w0 failed to converge at x={x}, residual={f}")


@dataclass
class LambertPredictor:
    """Second-order size prediction for the maximum degree:
    log n / W0(log n) + c * log n / (log log n)^2."""

    n: int
    which: str
    c_const: float
    w0: float
    value: float


def predict_max_degree(params: ModelParams, n: int, which: str) -> LambertPredictor:
    if which not in ("s", "+", "-"):
        raise ValueError("which must be one of 's', '+', '-'")
    if n < 10**3:
        raise ValueError("n must be >= 1e3")
    p = params.p
    if which in ("s", "+"):
        if p >= 1.0:
            raise ValueError("max total/in-degree prediction requires p < 1")
        c = 1.0 + math.log(params.beta * p / (1.0 - p))
    else:
        c = 1.0 + math.log(params.beta)
    ln = math.log(n)
    w0 = lambert_w0(ln)
    value = ln / w0 + c * ln / math.log(ln) ** 2
    return LambertPredictor(n=n, which=which, c_const=c, w0=w0, value=value)


@dataclass
class MaxDegreeReport:
    n: int
    max_s: int
    max_plus: int
    max_minus: int
    argmax_s: np.ndarray     # labels attaining max_s
    argmax_plus: np.ndarray
    argmax_minus: np.ndarray
    predictor_s: float
    predictor_plus: float
    predictor_minus: float


def max_degree_report(graph: LabeledGraph) -> MaxDegreeReport:
    """Exact degree maxima with the full argmax label sets; predictors are
    attached where defined (n >= 1e3; p < 1 for the 's'/'+' ones)."""
    if graph.num_vertices == 0:
        raise ValueError("graph is empty")
    d_minus, d_plus, d_s = graph.degrees()

    def _argmax(d, mx):
        return graph.labels[d == mx]

    mx_s, mx_p, mx_m = int(d_s.max()), int(d_plus.max()), int(d_minus.max())

    def _pred(which):
        try:
            return predict_max_degree(graph.params, graph.n, which).value
        except ValueError:
            return None

    return MaxDegreeReport(
        n=graph.n,
        max_s=mx_s,
        max_plus=mx_p,
        max_minus=mx_m,
        argmax_s=_argmax(d_s, mx_s),
        argmax_plus=_argmax(d_plus, mx_p),
        argmax_minus=_argmax(d_minus, mx_m),
        predictor_s=_pred("s"),
        predictor_plus=_pred("+"),
        predictor_minus=_pred("-"),
    )


RESAMPLE_RETRY_CAP = 10**4


def _resample_arrays(outdeg, rng):
    outdeg = np.ascontiguousarray(outdeg, dtype=np.int64)
    if np.any(outdeg > np.arange(len(outdeg))):
        raise ValueError("infeasible degree sequence: out-degree exceeds earlier-survivor count")
    pool_size = int(1.5 * outdeg.sum()) + 1024
    for _ in range(16):
        upool = rng.random(pool_size)
        src, dst, status = _kernels.resample_half_edges(outdeg, upool, RESAMPLE_RETRY_CAP)
        if status == -2:
            raise ValueError("infeasible degree sequence: retry cap exceeded")
        if status >= 0:
            return src, dst
        pool_size *= 4
    raise RuntimeError("uniform pool kept overflowing during resampling")


def conditional_resample(graph: LabeledGraph, seed: int) -> LabeledGraph:
    """Fresh graph with the same vertices and the same out-degree sequence.

    Each out-going half-edge of the rank-j vertex is rewired to a uniform
    earlier survivor, rejecting duplicates, which makes every distinct
    endpoint set equally likely. This is the conditional law given |V_n| and
    the out-degrees.
    """
    d_minus, _, _ = graph.degrees()
    rng = stream(seed, 6)
    src, dst = _resample_arrays(d_minus, rng)
    src, dst = _canonical_edge_order(src, dst)
    return LabeledGraph(graph.params, graph.n, seed, graph.labels, src, dst)


# --- built-in Lipschitz statistics ------------------------------------------
# Lipschitz constants are with respect to flipping one edge.

def _stat_edge_range(labels, src, dst, lo, hi):
    fr = labels[src]
    to = labels[dst]
    return float(np.count_nonzero((fr >= lo) & (fr <= hi) & (to >= lo) & (to <= hi)))


def _stat_matching(m, src, dst):
    return float(_kernels.greedy_matching_size(src, dst, m))


def _stat_triangles(m, src, dst, cap):
    indptr, nbrs = build_csr(m, src, dst)
    return _kernels.capped_triangle_incidences(indptr, nbrs, src, dst, cap) / 3.0


def edge_count_in_label_range(graph: LabeledGraph, lo: float, hi: float) -> float:
    """Edges with both endpoint labels in [lo, hi]. L = 1."""
    return _stat_edge_range(graph.labels, graph.src, graph.dst, lo, hi)


def max_matching_greedy(graph: LabeledGraph) -> float:
    """Greedy maximal matching size with the fixed canonical edge order;
    one edge flip shifts the size by at most 1."""
    return _stat_matching(graph.num_vertices, graph.src, graph.dst)


def triangle_count_capped(graph: LabeledGraph, cap: int = 5) -> float:
    """Triangle count where each edge contributes at most cap triangles
    (each triangle is counted once per edge, then divided by 3). L = cap."""
    return _stat_triangles(graph.num_vertices, graph.src, graph.dst, cap)


CONCENTRATION_STATISTICS = ("edge_count_in_label_range", "max_matching_greedy", "triangle_count_capped")


@dataclass
class ConcentrationReport:
    statistic: str
    lipschitz: float
    n_edges: int
    replicas: int
    mean: float
    t_grid: np.ndarray
    empirical_tail: np.ndarray
    azuma_bound: np.ndarray
    all_below_bound: bool


def concentration_experiment(params: ModelParams, n: int, statistic: str, replicas: int,
                             seed: int, t_grid=None, cap: int = 5,
                             label_range=(0.25, 0.75)) -> ConcentrationReport:
    """Fix one realized (|V_n|, out-degree sequence), resample the wiring
    `replicas` times, and compare the empirical deviation tails of the chosen
    statistic against 2*exp(-t^2 / (8 |E| L^2)).

    |E| is invariant under the resampling since out-degrees are preserved.
    """
    if statistic not in CONCENTRATION_STATISTICS:
        raise ValueError(f"statistic must be one of {CONCENTRATION_STATISTICS}")
    graph = generate_drgvr(params, n, seed)
    d_minus, _, _ = graph.degrees()
    d_minus = np.ascontiguousarray(d_minus, dtype=np.int64)
    m = graph.num_vertices
    n_edges = graph.num_edges
    lo, hi = label_range[0] * n, label_range[1] * n
    if statistic == "edge_count_in_label_range":
        L = 1.0
        evaluate = lambda s, d: _stat_edge_range(graph.labels, s, d, lo, hi)
    elif statistic == "max_matching_greedy":
        L = 1.0
        evaluate = lambda s, d: _stat_matching(m, s, d)
    else:
        L = float(cap)
        evaluate = lambda s, d: _stat_triangles(m, s, d, cap)

    rng = stream(seed, 7)
    values = np.empty(replicas)
    for r in range(replicas):
        src, dst = _resample_arrays(d_minus, rng)
        src, dst = _canonical_edge_order(src, dst)
        values[r] = evaluate(src, dst)
    mean = float(values.mean())
    dev = np.abs(values - mean)
    if t_grid is None:
        t_grid = np.linspace(0.0, float(dev.max()) * 1.25 + 1e-9, 25)
    t_grid = np.asarray(t_grid, dtype=np.float64)
    empirical = np.array([float((dev >= t).mean()) for t in t_grid])
    bound = 2.0 * np.exp(-(t_grid ** 2) / (8.0 * n_edges * L * L))
    return ConcentrationReport(
        statistic=statistic,
        lipschitz=L,
        n_edges=n_edges,
        replicas=replicas,
        mean=mean,
        t_grid=t_grid,
        empirical_tail=empirical,
        azuma_bound=bound,
        all_below_bound=bool(np.all(empirical <= bound)),
    )


def distance_scaling_constants(params: ModelParams, m: int = 1024) -> dict:
    """Candidate constants for distance ~ zeta * log n in the supercritical
    pruned graph. The internally consistent choice is 1/log(norm); the
    reciprocal-norm variant is reported alongside without endorsement."""
    from .spectral import operator_norm

    norm = operator_norm(params, m=m)
    return {
        "operator_norm": norm,
        "zeta_inv_log_norm": 1.0 / math.log(norm) if norm > 1.0 else None,
        "zeta_inv_norm": 1.0 / norm,
    }


# --- serialization helpers ---------------------------------------------------

def report_to_json(report) -> str:
    """Serialize any report dataclass; arrays become lists."""

    def _default(o):
        if isinstance(o, np.ndarray):
            return o.tolist()
        if isinstance(o, (np.integer, np.floating)):
            return o.item()
        raise TypeError(f"not JSON-serializable: {type(o)}")

    return json.dumps(asdict(report), default=_default, sort_keys=True)


def write_histogram_csv(histogram, path: str) -> None:
    """CSV 'bin,count' rows for an integer-indexed histogram."""
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "w") as fh:
        fh.write("bin,count\n")
        for i, c in enumerate(np.asarray(histogram).tolist()):
            fh.write(f"{i},{c}\n")
    os.replace(tmp, path)
