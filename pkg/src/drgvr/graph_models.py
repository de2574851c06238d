"""Graph generators.

All three generators condition on a realized ledger. Given the trace, an edge
between the i-th and j-th survivor (ranks i < j) is present independently
with a probability that depends only on the later endpoint:

  * the dynamic graph itself: min(beta/|V_{t-1}|, 1) at the birth step t of
    survivor j (edges touching removed vertices never reach the final graph,
    so only survivor pairs are ever materialized);
  * the kernel graph: p_ij = delta * beta * (2 eps)^(-(1-p)/p) * (1/n)
    * (j/n)^(-2 eps / p).

Column counts are Binomial(j-1, q_j); the neighbours are then a uniform
distinct sample, which is the same distribution as independent per-pair coins.
"""

import json
import os
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from ._rand import stream
from .params import ModelParams
from .vertex_process import MarkLedger, run_vertex_process


@dataclass(eq=False)
class LabeledGraph:
    """Final graph on the surviving vertices.

    labels : sorted birth labels of the survivors; rank = position here
    src/dst: directed edges as 0-based ranks, src > dst (later -> earlier)

    Immutable by convention once built. Edges are kept sorted by (src, dst)
    so equal graphs are byte-identical.
    """

    params: ModelParams
    n: int
    seed: int
    labels: np.ndarray
    src: np.ndarray
    dst: np.ndarray
    _csr: tuple = field(default=None, repr=False, compare=False)

    @property
    def num_vertices(self) -> int:
        return len(self.labels)

    @property
    def num_edges(self) -> int:
        return len(self.src)

    def edge_labels(self):
        """(from_label, to_label) arrays with from_label > to_label."""
        return self.labels[self.src], self.labels[self.dst]

    def rank_of(self, label: int) -> int:
        i = int(np.searchsorted(self.labels, label))
        if i >= len(self.labels) or self.labels[i] != label:
            raise KeyError(f"label {label} not in graph")
        return i

    def degrees(self):
        """(d_minus, d_plus, d_total) per rank.

        d_minus counts neighbours with smaller label (edges the vertex created
        at birth), d_plus neighbours with larger label.
        """
        m = self.num_vertices
        d_minus = np.bincount(self.src, minlength=m)
        d_plus = np.bincount(self.dst, minlength=m)
        return d_minus, d_plus, d_minus + d_plus

    def csr(self):
        """Undirected adjacency (indptr, neighbours) with sorted neighbour
        lists; built once and cached."""
        if self._csr is None:
            self._csr = build_csr(self.num_vertices, self.src, self.dst)
        return self._csr

    def validate(self) -> None:
        if len(self.src) != len(self.dst):
            raise AssertionError("edge arrays differ in length")
        if np.any(self.src <= self.dst):
            raise AssertionError("every edge must point from later to earlier")
        if len(self.src) and (self.src.max() >= self.num_vertices or self.dst.min() < 0):
            raise AssertionError("edge endpoint out of range")
        pair_ids = self.src.astype(np.int64) * self.num_vertices + self.dst
        if len(np.unique(pair_ids)) != len(pair_ids):
            raise AssertionError("parallel edges present")


def build_csr(m, src, dst):
    both_a = np.concatenate([src, dst])
    both_b = np.concatenate([dst, src])
    order = np.lexsort((both_b, both_a))
    nbrs = np.ascontiguousarray(both_b[order])
    deg = np.bincount(both_a, minlength=m)
    indptr = np.zeros(m + 1, dtype=np.int64)
    np.cumsum(deg, out=indptr[1:])
    return indptr, nbrs


def _canonical_edge_order(src, dst):
    order = np.lexsort((dst, src))
    return np.ascontiguousarray(src[order]), np.ascontiguousarray(dst[order])


def _sample_columns(counts, rng):
    """Run the distinct-pick kernel, growing the uniform pool as needed."""
    counts = np.ascontiguousarray(counts, dtype=np.int64)
    pool_size = int(1.35 * counts.sum()) + 1024
    for _ in range(16):
        upool = rng.random(pool_size)
        src, dst, status = _kernels.pick_column_edges(counts, upool)
        if status >= 0:
            return _canonical_edge_order(src, dst)
        pool_size *= 4
    raise RuntimeError("uniform pool kept overflowing; counts look degenerate")


def trace_edge_probabilities(params: ModelParams, ledger: MarkLedger) -> np.ndarray:
    """q_j = min(beta/|V_{t-1}|, 1) at each survivor's birth step, by rank."""
    vb = ledger.survivor_alive_before.astype(np.float64)
    q = np.minimum(params.beta / np.maximum(vb, 1.0), 1.0)
    q[vb == 0] = 0.0
    return q


def generate_drgvr(params: ModelParams, n: int, seed: int, ledger: MarkLedger = None) -> LabeledGraph:
    """Generate the dynamic graph after n steps.

    Runs the vertex process (stream 0 of the seed), then samples, for each
    survivor of rank j, Binomial(j, q_j) distinct earlier survivors
    (stream 1). Conditional on the trace this equals adding each edge at
    birth with probability min(beta/|V_{t-1}|, 1) and deleting everything
    incident to removed vertices.
    """
    if ledger is None:
        ledger = run_vertex_process(params, n, seed)
    elif ledger.n != n or ledger.params != params:
        raise ValueError("ledger does not match (params, n)")
    rng = stream(seed, 1)
    m = ledger.final_count
    if m == 0:
        e = np.empty(0, dtype=np.int64)
        return LabeledGraph(params, n, seed, ledger.alive_final, e, e)
    q = trace_edge_probabilities(params, ledger)
    counts = rng.binomial(np.arange(m), q)
    src, dst = _sample_columns(counts, rng)
    return LabeledGraph(params, n, seed, ledger.alive_final, src, dst)


def gbd_edge_probability(params: ModelParams, delta: float, n: int, j: int) -> float:
    """Kernel edge probability for the pair (i, j), i < j, by 1-based survivor
    rank j (it does not depend on i)."""
    p = params.p
    two_eps = 2.0 * params.eps
    return min(delta * params.beta * two_eps ** (-(1.0 - p) / p) * (1.0 / n) * (j / n) ** (-two_eps / p), 1.0)


def generate_gbd(params: ModelParams, delta: float, n: int, seed: int, ledger: MarkLedger) -> LabeledGraph:
    """Inhomogeneous kernel graph on the ledger's survivors.

    Edge between ranks i < j present independently with probability
    min(p_ij, 1); sampled column by column like generate_drgvr.
    """
    if delta <= 0:
        raise ValueError("delta must be > 0")
    if ledger.n != n or ledger.params != params:
        raise ValueError("ledger does not match (params, n)")
    rng = stream(seed, 2)
    m = ledger.final_count
    if m == 0:
        e = np.empty(0, dtype=np.int64)
        return LabeledGraph(params, n, seed, ledger.alive_final, e, e)
    q = np.array([gbd_edge_probability(params, delta, n, j) for j in range(1, m + 1)])
    counts = rng.binomial(np.arange(m), q)
    src, dst = _sample_columns(counts, rng)
    return LabeledGraph(params, n, seed, ledger.alive_final, src, dst)


@dataclass
class SandwichTriple:
    """Three coupled graphs on one vertex set and one uniform per pair.

    chain_holds is True when lower <= middle <= upper as edge sets for the
    realized graphs. violations counts offending pairs.
    """

    lower: LabeledGraph
    middle: LabeledGraph
    upper: LabeledGraph
    delta_hat: float
    chain_holds: bool
    violations: int


def default_delta_hat(n: int) -> float:
    """Default coupling slack.

    Shrinks with n; the constant is calibrated so the subset chain holds for
    almost all seeds at n >= 1e4 (small survivor ranks need a wide band: the
    realized min(beta/|V|, 1) at the 2nd-4th survivor's birth can exceed the
    kernel probability severalfold).
    """
    if n < 2:
        return 0.9
    return min(0.9, 3.0 * max(n ** -0.1, 3.0 / np.log(n)))


def generate_sandwich(params: ModelParams, n: int, seed: int, delta_hat: float = None) -> SandwichTriple:
    """Couple kernel graphs at delta = 1 -+ delta_hat with the dynamic graph.

    One uniform per survivor pair is compared against the three thresholds:
    p_ij(1-delta_hat), the trace probability q_j, p_ij(1+delta_hat). Work and
    memory are O(|V|^2); meant for moderate n.
    """
    if delta_hat is None:
        delta_hat = default_delta_hat(n)
    if not 0 < delta_hat < 1:
        raise ValueError("delta_hat must be in (0, 1)")
    ledger = run_vertex_process(params, n, seed)
    rng = stream(seed, 3)
    m = ledger.final_count
    qmid = trace_edge_probabilities(params, ledger)
    pij = np.array([gbd_edge_probability(params, 1.0, n, j) for j in range(1, m + 1)])
    tlo = np.minimum(pij * (1.0 - delta_hat), 1.0)
    tup = np.minimum(pij * (1.0 + delta_hat), 1.0)

    edges = {k: ([], []) for k in ("lo", "mid", "up")}
    violations = 0
    for j in range(1, m):
        u = rng.random(j)
        elo = u <= tlo[j]
        emid = u <= qmid[j]
        eup = u <= tup[j]
        violations += int((elo & ~emid).sum() + (emid & ~eup).sum())
        for key, hits in (("lo", elo), ("mid", emid), ("up", eup)):
            idx = np.flatnonzero(hits)
            if len(idx):
                edges[key][0].append(np.full(len(idx), j, dtype=np.int64))
                edges[key][1].append(idx.astype(np.int64))

    def _graph(key):
        s, d = edges[key]
        if s:
            src = np.concatenate(s)
            dst = np.concatenate(d)
        else:
            src = dst = np.empty(0, dtype=np.int64)
        return LabeledGraph(params, n, seed, ledger.alive_final, src, dst)

    return SandwichTriple(
        lower=_graph("lo"),
        middle=_graph("mid"),
        upper=_graph("up"),
        delta_hat=delta_hat,
        chain_holds=(violations == 0),
        violations=violations,
    )


def export_edge_list(graph: LabeledGraph, path: str, include_vertices: bool = True) -> None:
    """Write '#<json header>' then one 'from_label<TAB>to_label' line per edge.

    The header carries params, n, seed and the counts; with include_vertices
    it also carries the full label list so isolated survivors round-trip.
    """
    header = {
        "params": graph.params.as_dict(),
        "n": graph.n,
        "seed": graph.seed,
        "num_vertices": graph.num_vertices,
        "num_edges": graph.num_edges,
    }
    if include_vertices:
        header["labels"] = graph.labels.tolist()
    fr, to = graph.edge_labels()
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "w") as fh:
        fh.write("#" + json.dumps(header, sort_keys=True) + "\n")
        for a, b in zip(fr.tolist(), to.tolist()):
            fh.write(f"{a}\t{b}\n")
    os.replace(tmp, path)


def import_edge_list(path: str) -> LabeledGraph:
    with open(path) as fh:
        first = fh.readline()
        if not first.startswith("#"):
            raise ValueError("missing JSON header line")
        header = json.loads(first[1:])
        pairs = [line.split("\t") for line in fh if line.strip()]
    params = ModelParams(beta=header["params"]["beta"], eps=header["params"]["eps"])
    fr = np.array([int(a) for a, _ in pairs], dtype=np.int64)
    to = np.array([int(b) for _, b in pairs], dtype=np.int64)
    if "labels" in header:
        labels = np.array(header["labels"], dtype=np.int64)
    else:
        labels = np.unique(np.concatenate([fr, to]))
    src = np.searchsorted(labels, fr)
    dst = np.searchsorted(labels, to)
    src, dst = _canonical_edge_order(src, dst)
    return LabeledGraph(params, header["n"], header["seed"], labels, src, dst)
