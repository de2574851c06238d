import numpy as np
import pytest

from drgvr import (
    ModelParams,
    expected_survivor_rank_position,
    run_vertex_process,
    survival_probability_prediction,
    survivor_age_cdf_prediction,
)


def test_empty_process(params):
    led = run_vertex_process(params, 0, seed=1)
    assert led.final_count == 0
    assert led.births == 0 and led.removals == 0
    assert led.alive_count_trace.tolist() == [0]


def test_p_one_never_removes():
    led = run_vertex_process(ModelParams(1.0, 0.5), 1000, seed=3)
    assert led.final_count == 1000
    assert led.removals == 0
    assert np.array_equal(led.alive_final, np.arange(1, 1001))
    assert np.array_equal(led.alive_count_trace, np.arange(1001))


def test_replay_determinism(params):
    a = run_vertex_process(params, 20000, seed=42)
    b = run_vertex_process(params, 20000, seed=42)
    assert np.array_equal(a.xi, b.xi)
    assert np.array_equal(a.removal_target, b.removal_target)
    assert np.array_equal(a.alive_final, b.alive_final)
    assert np.array_equal(a.alive_count_trace, b.alive_count_trace)


def test_trace_steps_and_conservation(params):
    led = run_vertex_process(params, 5000, seed=7)
    trace = led.alive_count_trace
    assert led.trace_stride == 1
    diffs = np.diff(trace)
    births = led.xi.astype(int)
    removed = (led.removal_target > 0).astype(int)
    # per-step balance: +1 birth, -1 effective removal, 0 removal on empty
    assert np.array_equal(diffs, births - removed)
    assert np.all(trace >= 0)
    # prefix conservation
    assert np.array_equal(trace[1:], np.cumsum(births) - np.cumsum(removed))
    # removal targets were alive just before their removal step
    removed_labels = led.removal_target[led.removal_target > 0]
    assert len(np.intersect1d(removed_labels, led.alive_final)) == 0
    # alive_final replays from the marks
    alive = set()
    for t in range(1, 5001):
        if led.xi[t - 1]:
            alive.add(t)
        elif led.removal_target[t - 1] > 0:
            alive.remove(int(led.removal_target[t - 1]))
    assert sorted(alive) == led.alive_final.tolist()


def test_alive_count_mean(params):
    n = 10**4
    finals = np.array([run_vertex_process(params, n, seed=s).final_count for s in range(60)])
    assert abs(finals.mean() / n - 2 * params.eps) < 0.005


def test_trace_thinning(params):
    led = run_vertex_process(params, 2 * 10**6, seed=0)
    assert led.trace_stride == 2
    assert len(led.alive_count_trace) == 10**6 + 1


def test_survival_prediction_trivial(params):
    assert survival_probability_prediction(params, 50, 50).prob == 1.0
    assert survival_probability_prediction(ModelParams(1.0, 0.5), 3, 1000).prob == 1.0
    with pytest.raises(ValueError):
        survival_probability_prediction(params, 0, 10)
    with pytest.raises(ValueError):
        survival_probability_prediction(params, 11, 10)


def test_survival_prediction_value_and_mc(params):
    n = 10**4
    pred = survival_probability_prediction(params, n // 2, n)
    assert pred.prob == pytest.approx(0.5 ** 0.5, rel=1e-12)
    # Monte Carlo oracle: freq{born at j and alive at n} / p over fresh runs
    runs = 10**4
    hits = births = 0
    for s in range(runs):
        led = run_vertex_process(params, n, seed=10_000 + s)
        if led.xi[n // 2 - 1]:
            births += 1
            hits += int(np.any(led.alive_final == n // 2))
    est = hits / births
    se = np.sqrt(pred.prob * (1 - pred.prob) / births)
    assert abs(est - pred.prob) < 3 * se


def test_survivor_age_cdf(params):
    assert survivor_age_cdf_prediction(params, 1.0) == 1.0
    assert survivor_age_cdf_prediction(ModelParams(1.0, 0.5), 0.3) == pytest.approx(0.3)
    assert survivor_age_cdf_prediction(params, 0.5) == pytest.approx(0.5 ** 1.5, rel=1e-12)
    with pytest.raises(ValueError):
        survivor_age_cdf_prediction(params, 0.0)
    with pytest.raises(ValueError):
        survivor_age_cdf_prediction(params, 1.5)
    # empirical CDF oracle at three probe points, averaged over seeds
    n = 10**5
    probes = np.array([0.25, 0.5, 0.75])
    target = probes ** params.age_exponent
    devs = []
    for s in range(20):
        labels = run_vertex_process(params, n, seed=500 + s).alive_final
        ecdf = np.array([(labels <= x * n).mean() for x in probes])
        devs.append(ecdf - target)
    assert np.all(np.abs(np.mean(devs, axis=0)) < 0.02)


def test_expected_survivor_rank_position(params):
    # p = 1: survivor ranks equal birth steps
    p1 = ModelParams(2.0, 0.5)
    for j in (1, 17, 300):
        assert expected_survivor_rank_position(p1, j, 10**5) == pytest.approx(j, rel=1e-12)
    # fixed point: rank 2*eps*n sits at position n
    n = 10**5
    j_top = int(2 * params.eps * n)
    assert expected_survivor_rank_position(params, j_top, n) == pytest.approx(n, rel=1e-12)
    with pytest.raises(ValueError):
        expected_survivor_rank_position(params, 0, n)
    # frozen value for (p=0.75, n=1e5, j=1000): n^(1/3) * 2000^(2/3)
    pred = expected_survivor_rank_position(params, 1000, n)
    assert pred == pytest.approx(7368.06, rel=1e-4)
    # Monte Carlo median of the realized position of the 1000th survivor
    positions = [int(run_vertex_process(params, n, seed=900 + s).alive_final[999]) for s in range(31)]
    assert abs(np.median(positions) / pred - 1.0) < 0.15


def test_concentration_violation_rate_shrinks(params):
    # fraction of seeds with ||V_n| - 2 eps n| > n^(2/3), non-increasing in n
    rates = []
    for n in (10**3, 10**4, 10**5):
        bad = 0
        for s in range(200):
            led = run_vertex_process(params, n, seed=3_000 + s)
            bad += int(abs(led.final_count - 2 * params.eps * n) > n ** (2 / 3))
        rates.append(bad / 200)
    assert rates[1] <= rates[0] + 0.005
    assert rates[2] <= rates[1] + 0.005


def test_ledger_record_roundtrip(tmp_path, params):
    led = run_vertex_process(params, 1000, seed=4)
    rec = led.to_record()
    assert rec["summary"]["final_count"] == led.final_count
    assert rec["params"]["p"] == params.p
    path = tmp_path / "ledger.json"
    led.save_json(str(path))
    from drgvr.vertex_process import load_ledger_record

    back = load_ledger_record(str(path))
    assert back == rec
    assert not list(tmp_path.glob("*.tmp.*"))
