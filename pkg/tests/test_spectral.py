import math

import numpy as np
import pytest

from drgvr import (
    ModelParams,
    betac_bounds,
    betac_empirical,
    build_kernel,
    figure1_table,
    operator_norm,
    survival_gamma,
    survival_probability_mc,
)
from drgvr.spectral import _bound_expr


def test_betac_bounds_p1():
    b = betac_bounds(1.0)
    assert b.lower == 0.25
    assert b.upper_simple == pytest.approx(math.sqrt(0.2), rel=1e-12)
    assert 0.25 <= b.upper_opt <= 0.2505  # infimum sits at the scan boundary
    assert b.upper_opt < b.upper_simple


def test_betac_bounds_p075():
    b = betac_bounds(0.75)
    assert b.lower == pytest.approx(math.sqrt(1 / 3), rel=1e-12)
    assert b.upper_simple == pytest.approx(math.sqrt(1.25 / 3), rel=1e-12)
    assert b.lower <= b.upper_opt <= b.upper_simple
    # optimizer oracle: dense grid with step 1e-4
    ts = np.arange(-0.499, 5.0, 1e-4)
    dense = min(_bound_expr(t, 0.75) ** -0.5 for t in ts)
    assert b.upper_opt <= dense + 1e-6


def test_betac_bounds_near_half():
    b = betac_bounds(0.505)
    assert b.lower > 0.98
    assert 0.98 < b.upper_simple <= 1.0001
    assert b.lower <= b.upper_opt <= b.upper_simple
    for bad in (0.5, 1.0001, 0.2):
        with pytest.raises(ValueError):
            betac_bounds(bad)


def test_operator_norm_beta_linearity(params):
    one = operator_norm(params, m=128, extrapolate=False)
    two = operator_norm(ModelParams(2.0, 0.25), m=128, extrapolate=False)
    assert two == pytest.approx(2 * one, rel=1e-13)


def test_operator_norm_bounds(params):
    lam = operator_norm(params, m=512)
    p = params.p
    lo = params.beta * math.sqrt(p * (1 + 4 * p) / (2 - p))
    hi = params.beta * math.sqrt(p / (1 - p))
    assert lo <= lam <= hi + 10 / math.sqrt(512)
    with pytest.raises(ValueError):
        operator_norm(params, m=32)


def test_operator_norm_grid_convergence(params):
    vals = {m: operator_norm(params, m=m, extrapolate=False) for m in (256, 512, 1024, 2048)}
    diffs = [abs(vals[m] - vals[2 * m]) for m in (256, 512, 1024)]
    assert diffs[1] <= diffs[0] + 1e-6
    assert diffs[2] <= diffs[1] + 1e-6


def test_kernel_matrix_properties(params):
    kern = build_kernel(params, 128)
    assert np.all(kern.matrix > 0)
    assert np.allclose(kern.matrix, kern.matrix.T)
    assert kern.weights.sum() == pytest.approx(1.0, rel=1e-12)
    kern2 = build_kernel(ModelParams(2.0, 0.25), 128)
    assert np.allclose(kern2.matrix, 2 * kern.matrix)


def test_survival_gamma_regimes(params):
    # subcritical collapses to exactly zero
    assert survival_gamma(ModelParams(0.1, 0.25), m=512) == 0.0
    # far supercritical approaches one
    assert survival_gamma(ModelParams(50.0, 0.25), m=512) > 0.95
    # the no-removal model is strictly supercritical at beta = 0.3 > 1/4
    g = survival_gamma(ModelParams(0.3, 0.5), m=1024)
    assert g > 0.001
    # workhorse value, frozen from the fixed-point solve
    assert survival_gamma(params, m=1024) == pytest.approx(0.5872, abs=0.002)


def test_survival_norm_consistency(params):
    norm_unit = operator_norm(ModelParams.from_p(1.0, params.p), m=512)
    above = ModelParams(1.05 / norm_unit, params.eps)
    below = ModelParams(0.95 / norm_unit, params.eps)
    assert survival_gamma(above, m=512) > 0.0
    assert survival_gamma(below, m=512) == 0.0


def test_survival_gamma_vs_monte_carlo(params):
    # cross-estimator agreement: fixed point vs tree survival proxy
    gamma = survival_gamma(params, m=1024)
    mc = survival_probability_mc(params, trees=4000, max_nodes=10**5, seed=17)
    assert abs(mc - gamma) < 0.02
    # barely supercritical no-removal point (norm 1.2): both say nearly extinct
    dub = ModelParams(0.3, 0.5)
    gamma_dub = survival_gamma(dub, m=1024)
    mc_dub = survival_probability_mc(dub, trees=4000, max_nodes=10**5, seed=18)
    assert gamma_dub > 0.001 and mc_dub >= 0.0
    assert abs(mc_dub - gamma_dub) < 0.02


def test_betac_empirical_p1():
    val = betac_empirical(1.0, m=512)
    assert abs(val - 0.25) < 0.01
    with pytest.raises(ValueError):
        betac_empirical(0.5)


def test_betac_empirical_containment_and_monotone():
    vals = []
    for p in (0.6, 0.75, 0.9, 1.0):
        b = betac_bounds(p)
        emp = betac_empirical(p, m=512)
        assert b.lower - 0.01 <= emp <= b.upper_opt + 0.01
        vals.append(emp)
    assert all(a >= b - 1e-9 for a, b in zip(vals, vals[1:]))


def test_figure1_table_continuity():
    grid = [0.70, 0.71, 0.72, 0.73, 0.74, 0.75]
    rows = figure1_table(grid, m=256)
    assert [r["p"] for r in rows] == grid
    for col in ("lower", "upper_opt", "upper_simple", "empirical"):
        series = [r[col] for r in rows]
        assert all(abs(a - b) < 0.05 for a, b in zip(series, series[1:]))
        assert all(a >= b - 1e-9 for a, b in zip(series, series[1:]))
