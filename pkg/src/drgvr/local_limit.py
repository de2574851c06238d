"""The limiting neighbourhood law and total-variation estimation.

The limit of the ball around a uniform survivor is a multi-type branching
tree: types live in (0, 1], the root type is Beta(p/(2 eps), 1), and a node
of type a produces

  * L-children (types below a):  Poisson(beta * a**c) many, types with
    density proportional to x**c on (0, a);
  * R-children (types above a):  Poisson((beta*p/(1-p)) * (1 - a**c)) many,
    types with density proportional to x**(c-1) on (a, 1],

with c = (1-p)/(2 eps). At p = 1 the R-side degenerates to mean
beta * log(1/a) with log-uniform types. All type sampling is exact inverse-CDF.
"""

import math
from collections import Counter
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from ._rand import stream
from .graph_models import LabeledGraph, trace_edge_probabilities
from .params import ModelParams
from .vertex_process import run_vertex_process

ROOT = (0,)


@dataclass
class BranchingTree:
    """Sampled tree, nodes addressed by child-index paths from the root (0,).

    Children of a node are indexed in increasing order of type, so L-children
    (type below the parent's) always come first. truncated_flag means the
    node budget ran out and the depth-max_depth ball is incomplete;
    frontier_alive means nodes exist at max_depth (the tree may well continue
    past the horizon, which is normal for a ball).
    """

    nodes: dict
    max_depth: int
    max_nodes: int
    truncated_flag: bool
    frontier_alive: bool

    @property
    def num_nodes(self) -> int:
        return len(self.nodes)

    def children(self, address):
        out = []
        i = 1
        while address + (i,) in self.nodes:
            out.append(address + (i,))
            i += 1
        return out


def offspring_means(params: ModelParams, a: float):
    """(L mean, R mean) for a node of type a; closed-form integrals of the
    offspring intensity."""
    if not 0 < a <= 1:
        raise ValueError("type must be in (0, 1]")
    c = params.survival_exponent
    l_mean = params.beta * a ** c
    if params.p >= 1.0:
        r_mean = params.beta * math.log(1.0 / a)
    else:
        r_mean = (params.beta * params.p / (1.0 - params.p)) * (1.0 - a ** c)
    return l_mean, r_mean


def _sample_child_types(params: ModelParams, a: float, rng) -> np.ndarray:
    """Types of one node's offspring, sorted ascending (L block then R block)."""
    c = params.survival_exponent
    l_mean, r_mean = offspring_means(params, a)
    nl = rng.poisson(l_mean)
    nr = rng.poisson(r_mean)
    l_types = a * rng.random(nl) ** (2.0 * params.eps / params.p)
    if params.p >= 1.0:
        r_types = a ** (1.0 - rng.random(nr))
    else:
        ac = a ** c
        r_types = (ac + rng.random(nr) * (1.0 - ac)) ** (1.0 / c)
    return np.concatenate([np.sort(l_types), np.sort(r_types)])


def _sample_tree_rng(params: ModelParams, max_depth: int, max_nodes: int, rng) -> BranchingTree:
    a0 = rng.random() ** (1.0 / params.age_exponent)
    nodes = {ROOT: float(a0)}
    truncated = False
    frontier_alive = False
    queue = [ROOT]
    while queue:
        addr = queue.pop(0)
        if len(addr) - 1 >= max_depth:
            frontier_alive = True
            continue
        types = _sample_child_types(params, nodes[addr], rng)
        if len(nodes) + len(types) > max_nodes:
            truncated = True
            break
        for i, t in enumerate(types, start=1):
            child = addr + (i,)
            nodes[child] = float(t)
            queue.append(child)
    return BranchingTree(nodes=nodes, max_depth=max_depth, max_nodes=max_nodes,
                         truncated_flag=truncated, frontier_alive=frontier_alive)


def sample_tree(params: ModelParams, max_depth: int, max_nodes: int, seed: int) -> BranchingTree:
    """Sample the limit tree down to max_depth, aborting at max_nodes."""
    if max_depth < 0 or max_nodes < 1:
        raise ValueError("need max_depth >= 0 and max_nodes >= 1")
    return _sample_tree_rng(params, max_depth, max_nodes, stream(seed, 20))


def survival_probability_mc(params: ModelParams, trees: int, max_nodes: int, seed: int) -> float:
    """Fraction of sampled trees that reach max_nodes nodes without dying out.

    Growth above criticality is exponential, so reaching the cap is the
    survival proxy. Generations are advanced with vectorized draws.
    """
    rng = stream(seed, 21)
    c = params.survival_exponent
    exp_ratio = 2.0 * params.eps / params.p
    survived = 0
    for _ in range(trees):
        types = np.array([rng.random() ** (1.0 / params.age_exponent)])
        total = 1
        while len(types) and total < max_nodes:
            ac = types ** c
            nl = rng.poisson(params.beta * ac)
            if params.p >= 1.0:
                nr = rng.poisson(params.beta * np.log(1.0 / types))
            else:
                nr = rng.poisson((params.beta * params.p / (1.0 - params.p)) * (1.0 - ac))
            parents_l = np.repeat(types, nl)
            parents_r = np.repeat(types, nr)
            acr = np.repeat(ac, nr)
            l_types = parents_l * rng.random(len(parents_l)) ** exp_ratio
            if params.p >= 1.0:
                r_types = parents_r ** (1.0 - rng.random(len(parents_r)))
            else:
                r_types = (acr + rng.random(len(parents_r)) * (1.0 - acr)) ** (1.0 / c)
            types = np.concatenate([l_types, r_types])
            total += len(types)
        if total >= max_nodes:
            survived += 1
    return survived / trees


# --- limiting degree mixture --------------------------------------------------

def _mixture_rate(params: ModelParams, a):
    """Poisson rate of the root's total offspring given its type a."""
    p = params.p
    return (params.beta * p / (1.0 - p)) * (1.0 - ((2.0 * p - 1.0) / p) * np.asarray(a) ** params.survival_exponent)


def degree_mixture_pmf(params: ModelParams, k: int) -> float:
    """P(degree = k) under the limit law: the Beta(p/(2 eps), 1) mixture of
    Poissons, integrated by adaptive quadrature to 1e-10 absolute.

    Undefined at p = 1 (the rate formula degenerates there)."""
    if params.p >= 1.0:
        raise ValueError("degree mixture requires p < 1")
    if k < 0:
        raise ValueError("k must be >= 0")
    shape = params.age_exponent
    lg = math.lgamma(k + 1)

    def integrand(a):
        mu = float(_mixture_rate(params, a))  # mu >= beta > 0 on (0, 1]
        return shape * a ** (shape - 1.0) * math.exp(k * math.log(mu) - mu - lg)

    # full_output also silences the tail warning when the integrand underflows
    out = integrate.quad(integrand, 0.0, 1.0, epsabs=1e-10, limit=200, full_output=1)
    return out[0]


def degree_mixture_table(params: ModelParams, k_max: int) -> np.ndarray:
    return np.array([degree_mixture_pmf(params, k) for k in range(k_max + 1)])


def sample_degree_mixture(params: ModelParams, seed: int, size=None):
    """Draw the root type, then Poisson(rate(type)). Scalar unless size given."""
    if params.p >= 1.0:
        raise ValueError("degree mixture requires p < 1")
    rng = stream(seed, 22)
    a = rng.random(size) ** (1.0 / params.age_exponent)
    draw = rng.poisson(_mixture_rate(params, a))
    return int(draw) if size is None else draw


# --- canonical ball codes ------------------------------------------------------

@dataclass(frozen=True)
class CanonicalBall:
    """Opaque canonical code of a rooted radius-r neighbourhood. Two tree
    balls get equal codes iff they are isomorphic as rooted trees; balls
    containing cycles get a distinguished marker code that can never equal a
    tree code."""

    code: bytes
    r: int


def _ahu_code(children, root):
    def rec(v, parent):
        subs = sorted(rec(w, v) for w in children[v] if w != parent)
        return b"(" + b"".join(subs) + b")"

    return rec(root, None)


def _code_from_adjacency(adj, root, r):
    n_vertices = len(adj)
    n_edges = sum(len(v) for v in adj.values()) // 2
    if n_edges != n_vertices - 1:
        # connected ball with a cycle: marker + cheap invariants
        degs = sorted(len(v) for v in adj.values())
        return b"!cyc|" + repr((n_vertices, n_edges, degs)).encode()
    return _ahu_code(adj, root)


def canonicalize_ball(obj, r: int, root=None) -> CanonicalBall:
    """Canonical code of the radius-r ball.

    obj is a BranchingTree (rooted at its root), a LabeledGraph with
    root=label, or a plain adjacency dict with root=vertex.
    """
    if r < 0:
        raise ValueError("r must be >= 0")
    if isinstance(obj, BranchingTree):
        children = {}

        def collect(addr):
            kids = [c for c in obj.children(addr) if len(c) - 1 <= r]
            children[addr] = kids
            for c in kids:
                collect(c)

        collect(ROOT)
        return CanonicalBall(code=_ahu_code(children, ROOT), r=r)
    if isinstance(obj, LabeledGraph):
        if root is None:
            raise ValueError("graph input needs root=label")
        from .analysis import explore_ball

        adj, _ = explore_ball(obj, root, r)
        return CanonicalBall(code=_code_from_adjacency(adj, int(root), r), r=r)
    if isinstance(obj, dict):
        if root is None:
            raise ValueError("adjacency input needs root=vertex")
        return CanonicalBall(code=_code_from_adjacency(obj, root, r), r=r)
    raise TypeError(f"cannot canonicalize {type(obj)}")


# --- total variation estimation ------------------------------------------------

@dataclass
class TvEstimate:
    tv: float
    ci_halfwidth: float
    samples_graph: int
    samples_tree: int
    support: int
    discard_rate_graph: float
    discard_rate_tree: float
    boot_quantiles: tuple  # (2.5%, 97.5%) of the bootstrap TV distribution

    def basic_ci(self):
        """Basic (reflected) 95% bootstrap interval for the true distance;
        unlike the percentile interval it accounts for the plug-in bias."""
        lo, hi = self.boot_quantiles
        return max(0.0, 2.0 * self.tv - hi), max(0.0, 2.0 * self.tv - lo)


def _sample_graph_ball_code(params: ModelParams, n: int, r: int, sample_seed: int, max_nodes: int):
    """Ball code around a uniform survivor of a fresh graph.

    Edges are sampled lazily during the BFS: expanding the rank-j vertex
    decides all its still-undecided pairs (Binomial count + distinct picks on
    the earlier side, independent coins on the later side), and after the
    last BFS layer the remaining pairs inside the ball are decided so that
    cycles among depth-r vertices are not missed. Conditional on the trace
    this is exactly the generator's edge law. Returns None when the ball
    exceeds max_nodes (discarded sample).
    """
    ledger = run_vertex_process(params, n, sample_seed)
    m = ledger.final_count
    if m == 0:
        return None
    q = trace_edge_probabilities(params, ledger)
    rng = stream(sample_seed, 9)
    root = int(rng.integers(0, m))
    depth = {root: 0}
    adj = {root: set()}
    expanded = set()
    frontier = [root]
    for d in range(1, r + 1):
        nxt = []
        for v in frontier:
            # earlier side: Binomial over undecided earlier ranks, then picks
            undecided_lt = v - sum(1 for x in expanded if x < v)
            k = int(rng.binomial(undecided_lt, q[v])) if undecided_lt > 0 and q[v] > 0 else 0
            picks = set()
            while len(picks) < k:
                c = int(rng.integers(0, v))
                if c not in expanded and c not in picks:
                    picks.add(c)
            # later side: one coin per undecided later rank (coins falling on
            # already-decided pairs are ignored)
            hits = []
            if v + 1 < m:
                u = rng.random(m - v - 1)
                hit_ranks = np.flatnonzero(u < q[v + 1:]) + v + 1
                hits = [int(h) for h in hit_ranks if h not in expanded]
            expanded.add(v)
            for w in sorted(picks) + hits:
                adj.setdefault(w, set())
                adj[v].add(w)
                adj[w].add(v)
                if w not in depth:
                    depth[w] = d
                    nxt.append(w)
            if len(depth) > max_nodes:
                return None
        frontier = nxt
    # pairs among never-expanded ball vertices (the outermost layer)
    rest = sorted(x for x in depth if x not in expanded)
    if len(rest) > 1:
        lo, hi = np.triu_indices(len(rest), k=1)
        ra = np.array(rest)
        coins = rng.random(len(lo))
        for a, b in zip(ra[lo][coins < q[ra[hi]]], ra[hi][coins < q[ra[hi]]]):
            adj[int(a)].add(int(b))
            adj[int(b)].add(int(a))
    adj = {v: sorted(ws) for v, ws in adj.items()}
    return _code_from_adjacency(adj, root, r)


def _star_code(k: int) -> bytes:
    return b"(" + b"()" * k + b")"


def _tv_from_counters(cg: Counter, ct: Counter, kg: int, kt: int) -> float:
    keys = set(cg) | set(ct)
    return 0.5 * sum(abs(cg.get(x, 0) / kg - ct.get(x, 0) / kt) for x in keys)


def _bootstrap_quantiles(cg: Counter, ct: Counter, kg: int, kt: int, rng, b: int):
    keys = sorted(set(cg) | set(ct))
    pg = np.array([cg.get(x, 0) for x in keys], dtype=float) / kg
    pt = np.array([ct.get(x, 0) for x in keys], dtype=float) / kt
    tvs = np.empty(b)
    for i in range(b):
        rg = rng.multinomial(kg, pg) / kg
        rt = rng.multinomial(kt, pt) / kt
        tvs[i] = 0.5 * np.abs(rg - rt).sum()
    lo, hi = np.percentile(tvs, [2.5, 97.5])
    return float(lo), float(hi)


def estimate_tv(params: ModelParams, n: int, r: int, m_graph: int, m_tree: int, seed: int,
                max_nodes: int = 10**4, bootstrap: int = 200) -> TvEstimate:
    """Plug-in total variation between the radius-r ball law around a uniform
    survivor (fresh graph per sample, so samples are i.i.d.) and the radius-r
    ball of the limit tree.

    No bias correction is applied to the plug-in estimate; the bootstrap CI
    and the support size are reported so the sampling noise is visible.
    Truncated samples are discarded and counted in the discard rates.
    """
    if r < 1:
        raise ValueError("r must be >= 1")
    if m_graph < 10**3 or m_tree < 10**3:
        raise ValueError("need at least 1e3 samples per side")
    ss = np.random.SeedSequence((seed, 10))
    child = ss.generate_state(m_graph, dtype=np.uint64)
    graph_codes = Counter()
    discard_g = 0
    for i in range(m_graph):
        code = _sample_graph_ball_code(params, n, r, int(child[i]), max_nodes)
        if code is None:
            discard_g += 1
        else:
            graph_codes[code] += 1

    tree_codes = Counter()
    discard_t = 0
    if r == 1 and params.p < 1.0:
        # a radius-1 tree ball is a star with the mixture-distributed count
        for k in sample_degree_mixture(params, seed=seed ^ 0x5EED, size=m_tree):
            tree_codes[_star_code(int(k))] += 1
    else:
        rng = stream(seed, 23)
        for _ in range(m_tree):
            tree = _sample_tree_rng(params, r, max_nodes, rng)
            if tree.truncated_flag:
                discard_t += 1
            else:
                tree_codes[canonicalize_ball(tree, r).code] += 1

    kg = sum(graph_codes.values())
    kt = sum(tree_codes.values())
    tv = _tv_from_counters(graph_codes, tree_codes, kg, kt)
    qlo, qhi = _bootstrap_quantiles(graph_codes, tree_codes, kg, kt, stream(seed, 24), bootstrap)
    return TvEstimate(
        tv=tv,
        ci_halfwidth=(qhi - qlo) / 2.0,
        samples_graph=kg,
        samples_tree=kt,
        support=len(set(graph_codes) | set(tree_codes)),
        discard_rate_graph=discard_g / m_graph,
        discard_rate_tree=discard_t / m_tree,
        boot_quantiles=(qlo, qhi),
    )
