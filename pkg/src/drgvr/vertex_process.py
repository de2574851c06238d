"""The birth-death mark process and its closed-form predictions.

At every step a vertex is born with probability p = 1/2 + eps; otherwise a
uniformly chosen alive vertex (if any) is removed. The ledger records the
whole history and is the single source of randomness the graph generators
condition on.
"""

import json
import math
import os
from dataclasses import dataclass

import numpy as np

from . import _kernels
from ._rand import stream
from .params import ModelParams

TRACE_FULL_RES_LIMIT = 10**6


@dataclass(frozen=True, eq=False)
class MarkLedger:
    """Complete history of one run of the vertex process.

    xi                    : uint8[n], 1 = birth at step t (index t-1)
    removal_target        : int64[n], label removed at step t, 0 = no removal
    alive_final           : sorted labels alive after step n
    alive_count_trace     : |V_t| sampled every trace_stride steps starting
                            at t = 0 (full resolution while n <= 1e6)
    survivor_alive_before : |V_{t-1}| at the birth step t of each survivor,
                            aligned with alive_final (exact at any n)
    """

    params: ModelParams
    n: int
    seed: int
    xi: np.ndarray
    removal_target: np.ndarray
    alive_final: np.ndarray
    alive_count_trace: np.ndarray
    trace_stride: int
    survivor_alive_before: np.ndarray

    @property
    def final_count(self) -> int:
        return len(self.alive_final)

    @property
    def births(self) -> int:
        return int(self.xi.sum())

    @property
    def removals(self) -> int:
        return int(np.count_nonzero(self.removal_target))

    def to_record(self) -> dict:
        """Compact JSON-able summary; the full ledger is reproducible from
        (params, n, seed)."""
        return {
            "params": self.params.as_dict(),
            "n": self.n,
            "seed": self.seed,
            "alive_final": self.alive_final.tolist(),
            "summary": {
                "final_count": self.final_count,
                "births": self.births,
                "removals": self.removals,
            },
        }

    def save_json(self, path: str) -> None:
        tmp = f"{path}.tmp.{os.getpid()}"
        with open(tmp, "w") as fh:
            json.dump(self.to_record(), fh)
        os.replace(tmp, path)


def load_ledger_record(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


def run_vertex_process(params: ModelParams, n: int, seed: int) -> MarkLedger:
    """Simulate n steps of the birth-death process.

    Deterministic given (params, n, seed). Removal uses swap-remove on a
    dense alive array, so each deletion is O(1) and uniform.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        empty = np.empty(0, dtype=np.int64)
        return MarkLedger(params, 0, seed, np.empty(0, dtype=np.uint8), empty,
                          empty, np.zeros(1, dtype=np.int64), 1, empty)
    rng = stream(seed, 0)
    xi = (rng.random(n) < params.p).astype(np.uint8)
    u = rng.random(n)
    alive, removal, counts, alive_before = _kernels.replay_marks(xi, u)
    alive = np.sort(alive)
    stride = max(1, math.ceil(n / TRACE_FULL_RES_LIMIT))
    return MarkLedger(
        params=params,
        n=n,
        seed=seed,
        xi=xi,
        removal_target=removal,
        alive_final=alive,
        alive_count_trace=counts[::stride].copy(),
        trace_stride=stride,
        survivor_alive_before=alive_before[alive],
    )


@dataclass(frozen=True)
class SurvivalPrediction:
    """Probability that a vertex born at step j is still alive at step n."""

    j: int
    n: int
    prob: float


def survival_probability_prediction(params: ModelParams, j: int, n: int) -> SurvivalPrediction:
    """Closed form (j/n) ** ((1-p)/(2 eps)) for the mark-survival probability."""
    if not 1 <= j <= n:
        raise ValueError(f"need 1 <= j <= n, got j={j}, n={n}")
    return SurvivalPrediction(j=j, n=n, prob=(j / n) ** params.survival_exponent)


def survivor_age_cdf_prediction(params: ModelParams, x: float) -> float:
    """Limiting fraction of survivors with birth label <= x*n: x ** (p/(2 eps))."""
    if not 0 < x <= 1:
        raise ValueError(f"x must be in (0, 1], got {x}")
    return x ** params.age_exponent


def expected_survivor_rank_position(params: ModelParams, j: int, n: int) -> float:
    """Predicted birth step of the j-th oldest survivor:
    n**((1-p)/p) * (j/(2 eps))**((2 eps)/p)."""
    if j < 1:
        raise ValueError("rank j must be >= 1")
    p = params.p
    two_eps = 2.0 * params.eps
    return n ** ((1.0 - p) / p) * (j / two_eps) ** (two_eps / p)
