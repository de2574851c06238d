"""Reproducible experiment runner.

One flat JSON config per run. Outputs go to a directory named by the config
hash and are written atomically (temp file + rename):

    <out>/run-<hash12>/config.json   canonical config echo
    <out>/run-<hash12>/results.csv   one row per seed, sorted by seed
    <out>/run-<hash12>/summary.json  aggregates + provenance

Exit codes: 0 success, 2 config validation error, 1 runtime error.
"""

import argparse
import hashlib
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import __version__
from . import analysis, graph_models, local_limit, spectral
from .params import ModelParams
from .vertex_process import run_vertex_process

EXPERIMENTS = ("generate", "degree-dist", "giant", "betac", "figure1", "maxdeg",
               "local-tv", "sandwich", "concentration", "distances")

_COMMON_KEYS = {"experiment", "beta", "eps", "p", "n", "seeds", "seed_base", "seed_count", "out"}
_EXTRA_KEYS = {
    "generate": {"export_graphs"},
    "degree-dist": {"k_max"},
    "giant": {"m"},
    "betac": {"m", "tol"},
    "figure1": {"p_grid", "m", "tol"},
    "maxdeg": set(),
    "local-tv": {"r", "m_graph", "m_tree"},
    "sandwich": {"delta_hat"},
    "concentration": {"statistic", "replicas", "cap"},
    "distances": {"lambda", "pairs"},
}
_NEEDS_MODEL = {e: e not in ("betac", "figure1") for e in EXPERIMENTS}
_NEEDS_SEEDS = {e: e not in ("betac", "figure1") for e in EXPERIMENTS}


def _expand_seeds(config):
    if "seeds" in config:
        return [int(s) for s in config["seeds"]]
    return [int(config["seed_base"]) + i for i in range(int(config["seed_count"]))]


def _params_from(config):
    if "p" in config:
        return ModelParams.from_p(float(config["beta"]), float(config["p"]))
    return ModelParams(float(config["beta"]), float(config["eps"]))


def validate(config: dict) -> list:
    """Static validation; returns a list of error strings, never raises."""
    errors = []
    exp = config.get("experiment")
    if exp not in EXPERIMENTS:
        return [f"experiment must be one of {EXPERIMENTS}, got {exp!r}"]
    allowed = _COMMON_KEYS | _EXTRA_KEYS[exp]
    unknown = set(config) - allowed
    if unknown:
        errors.append(f"unknown keys: {sorted(unknown)}")
    if _NEEDS_MODEL[exp]:
        if "eps" in config and "p" in config:
            errors.append("give either eps or p, not both")
        if "eps" not in config and "p" not in config:
            errors.append("missing eps (or p)")
        if "beta" not in config:
            errors.append("missing beta")
        else:
            if not (isinstance(config["beta"], (int, float)) and config["beta"] > 0):
                errors.append("beta must be > 0")
        eps = config.get("eps", config.get("p", 1.0) - 0.5 if isinstance(config.get("p"), (int, float)) else None)
        if eps is not None and not (isinstance(eps, (int, float)) and 0 < eps <= 0.5):
            errors.append(f"eps must be in (0, 1/2], got {eps}")
        if not isinstance(config.get("n"), int) or config["n"] < 0:
            errors.append("n must be a nonnegative integer")
        if _NEEDS_SEEDS[exp]:
            if "seeds" in config:
                if not isinstance(config["seeds"], list) or not config["seeds"]:
                    errors.append("seeds must be a nonempty list")
            elif not ("seed_base" in config and "seed_count" in config):
                errors.append("missing seeds (or seed_base + seed_count)")
            elif not (isinstance(config["seed_count"], int) and config["seed_count"] >= 1):
                errors.append("seed_count must be >= 1")
        if eps is not None and 0 < eps <= 0.5:
            p = 0.5 + eps
            if exp == "degree-dist" and p >= 1.0:
                errors.append("degree-dist requires p < 1: the limiting degree mixture is undefined at p = 1")
            if exp == "local-tv":
                r = config.get("r", 2)
                if not (isinstance(r, int) and r >= 1):
                    errors.append("r must be an integer >= 1")
                for key in ("m_graph", "m_tree"):
                    v = config.get(key, 1000)
                    if not (isinstance(v, int) and v >= 1000):
                        errors.append(f"{key} must be an integer >= 1000")
            if exp == "distances":
                lam = config.get("lambda", 0.05)
                if not (isinstance(lam, (int, float)) and 0 < lam < 1):
                    errors.append("lambda must be in (0, 1)")
                pairs = config.get("pairs", 1000)
                if not (isinstance(pairs, int) and pairs >= 100):
                    errors.append("pairs must be an integer >= 100")
            if exp == "sandwich" and "delta_hat" in config:
                if not (isinstance(config["delta_hat"], (int, float)) and 0 < config["delta_hat"] < 1):
                    errors.append("delta_hat must be in (0, 1)")
            if exp == "concentration":
                stat = config.get("statistic", "edge_count_in_label_range")
                if stat not in analysis.CONCENTRATION_STATISTICS:
                    errors.append(f"statistic must be one of {analysis.CONCENTRATION_STATISTICS}")
                reps = config.get("replicas", 1000)
                if not (isinstance(reps, int) and reps >= 1):
                    errors.append("replicas must be >= 1")
    else:
        if exp == "betac":
            if not (isinstance(config.get("p"), (int, float)) and 0.5 < config["p"] <= 1.0):
                errors.append("betac requires p in (1/2, 1]")
        if exp == "figure1":
            grid = config.get("p_grid")
            ok = isinstance(grid, list) and grid and all(isinstance(x, (int, float)) and 0.5 < x <= 1.0 for x in grid)
            if not ok:
                errors.append("figure1 requires p_grid: a list of values in (1/2, 1]")
        m = config.get("m", 2048)
        if not (isinstance(m, int) and m >= 64):
            errors.append("m must be an integer >= 64")
    return errors


# --- per-experiment runners: (params, n, seed, config) -> row dict -----------

def _run_generate(params, n, seed, config, out_dir):
    graph = graph_models.generate_drgvr(params, n, seed)
    if config.get("export_graphs"):
        graph_models.export_edge_list(graph, os.path.join(out_dir, f"graph-{seed}.tsv"))
    d_minus, d_plus, d_s = graph.degrees() if graph.num_vertices else (np.zeros(1),) * 3
    return {"seed": seed, "num_vertices": graph.num_vertices, "num_edges": graph.num_edges,
            "mean_degree": float(d_s.mean()) if graph.num_vertices else 0.0}


def _run_giant(params, n, seed, config, out_dir):
    rep = analysis.components(graph_models.generate_drgvr(params, n, seed))
    return {"seed": seed, "c1": rep.c1, "c2": rep.c2, "giant_fraction": rep.giant_fraction}


def _run_maxdeg(params, n, seed, config, out_dir):
    rep = analysis.max_degree_report(graph_models.generate_drgvr(params, n, seed))
    return {"seed": seed, "max_s": rep.max_s, "max_plus": rep.max_plus, "max_minus": rep.max_minus,
            "min_argmax_plus": int(rep.argmax_plus.min()), "min_argmax_minus": int(rep.argmax_minus.min()),
            "predictor_plus": rep.predictor_plus if rep.predictor_plus is not None else "",
            "predictor_minus": rep.predictor_minus if rep.predictor_minus is not None else ""}


def _run_sandwich(params, n, seed, config, out_dir):
    triple = graph_models.generate_sandwich(params, n, seed, config.get("delta_hat"))
    return {"seed": seed, "chain_holds": int(triple.chain_holds), "violations": triple.violations,
            "delta_hat": triple.delta_hat, "edges_lower": triple.lower.num_edges,
            "edges_middle": triple.middle.num_edges, "edges_upper": triple.upper.num_edges}


def _run_degree_dist_seed(params, n, seed, config, out_dir):
    graph = graph_models.generate_drgvr(params, n, seed)
    _, _, d_s = graph.degrees()
    return {"seed": seed, "num_vertices": graph.num_vertices,
            "degree_counts": np.bincount(d_s).tolist()}


def _run_local_tv(params, n, seed, config, out_dir):
    est = local_limit.estimate_tv(params, n, config.get("r", 2), config.get("m_graph", 1000),
                                  config.get("m_tree", 1000), seed)
    return {"seed": seed, "tv": est.tv, "ci_halfwidth": est.ci_halfwidth, "support": est.support,
            "samples_graph": est.samples_graph, "samples_tree": est.samples_tree,
            "discard_rate_graph": est.discard_rate_graph, "discard_rate_tree": est.discard_rate_tree}


def _run_concentration(params, n, seed, config, out_dir):
    rep = analysis.concentration_experiment(params, n, config.get("statistic", "edge_count_in_label_range"),
                                            config.get("replicas", 1000), seed, cap=config.get("cap", 5))
    return {"seed": seed, "statistic": rep.statistic, "lipschitz": rep.lipschitz, "n_edges": rep.n_edges,
            "mean": rep.mean, "all_below_bound": int(rep.all_below_bound),
            "max_tail_ratio": float(np.max(np.divide(rep.empirical_tail, rep.azuma_bound,
                                                     out=np.zeros_like(rep.empirical_tail),
                                                     where=rep.azuma_bound > 0)))}


def _run_distances(params, n, seed, config, out_dir):
    graph = graph_models.generate_drgvr(params, n, seed)
    pruned = analysis.prune(graph, config.get("lambda", 0.05))
    rep = analysis.typical_distance(pruned, config.get("pairs", 1000), seed)
    return {"seed": seed, "pruned_vertices": pruned.num_vertices, "frac_connected": rep.frac_connected,
            "mean_distance": rep.mean_connected, "mean_over_log_n": rep.mean_connected / math.log(n) if n > 1 else ""}


_SEED_RUNNERS = {
    "generate": _run_generate,
    "giant": _run_giant,
    "maxdeg": _run_maxdeg,
    "sandwich": _run_sandwich,
    "degree-dist": _run_degree_dist_seed,
    "local-tv": _run_local_tv,
    "concentration": _run_concentration,
    "distances": _run_distances,
}


def _aggregate(exp, params, config, rows, out_dir, emit_plot_data):
    agg = {}
    if exp == "giant":
        fracs = np.array([r["giant_fraction"] for r in rows])
        gamma = spectral.survival_gamma(params, m=config.get("m", 1024))
        agg = {"mean_giant_fraction": float(fracs.mean()), "survival_gamma": gamma,
               "two_eps_gamma": 2.0 * params.eps * gamma}
    elif exp == "degree-dist":
        k_max = config.get("k_max", 40)
        pooled = np.zeros(k_max + 1)
        total = 0
        for r in rows:
            counts = np.array(r.pop("degree_counts"))
            pooled[:min(len(counts), k_max + 1)] += counts[:k_max + 1]
            total += counts.sum()
        emp = pooled / total
        pmf = local_limit.degree_mixture_table(params, k_max)
        tv = 0.5 * float(np.abs(emp - pmf).sum()) + 0.5 * float(1.0 - pmf.sum())
        agg = {"tv_empirical_vs_mixture": tv, "pooled_samples": int(total)}
        table = "k,pmf,empirical\n" + "".join(
            f"{k},{pmf[k]:.12g},{emp[k]:.12g}\n" for k in range(k_max + 1))
        _write_atomic(os.path.join(out_dir, "pmf.csv"), table)
    elif exp == "sandwich":
        agg = {"chain_rate": float(np.mean([r["chain_holds"] for r in rows]))}
    elif exp == "concentration":
        agg = {"all_below_bound": bool(all(r["all_below_bound"] for r in rows))}
    elif exp == "distances":
        means = [r["mean_distance"] for r in rows if not (isinstance(r["mean_distance"], float) and math.isnan(r["mean_distance"]))]
        agg = {"mean_distance": float(np.mean(means)) if means else None}
        agg.update(analysis.distance_scaling_constants(params, m=512))
    elif exp == "maxdeg":
        agg = {"median_max_plus": float(np.median([r["max_plus"] for r in rows])),
               "median_min_argmax_minus_over_n": float(np.median([r["min_argmax_minus"] / config["n"] for r in rows]))}
    if emit_plot_data and rows:
        keys = list(rows[0].keys())
        lines = [",".join(keys)] + [",".join(_fmt(r[k]) for k in keys) for r in rows]
        _write_atomic(os.path.join(out_dir, "plot.csv"), "\n".join(lines) + "\n")
    return agg


@dataclass
class RunRecord:
    config: dict
    config_hash: str
    version: str
    wall_clock_s: float
    per_seed: list
    aggregates: dict
    out_dir: str


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def _write_atomic(path, text):
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _config_hash(config):
    return hashlib.sha256(json.dumps(config, sort_keys=True).encode()).hexdigest()[:12]


def _run_one_seed(args):
    exp, params, n, seed, config, out_dir = args
    try:
        return _SEED_RUNNERS[exp](params, n, seed, config, out_dir)
    except Exception as exc:
        # failing seeds abort the run and must be identifiable from the error
        raise RuntimeError(f"seed {seed} failed: {exc}") from exc


def run(config: dict, emit_plot_data: bool = False, workers: int = 1) -> RunRecord:
    """Execute a validated config; a failing seed aborts the whole run with
    the seed identified."""
    errs = validate(config)
    if errs:
        raise ValueError("; ".join(errs))
    exp = config["experiment"]
    t0 = time.time()
    h = _config_hash(config)
    out_dir = os.path.join(config.get("out", "runs"), f"run-{h}")
    os.makedirs(out_dir, exist_ok=True)

    rows, agg = [], {}
    if exp in ("betac", "figure1"):
        m, tol = config.get("m", 2048), config.get("tol", 1e-8)
        grid = [config["p"]] if exp == "betac" else config["p_grid"]
        rows = spectral.figure1_table(grid, m=m, tol=tol)
        table = "p,lower,upper_opt,upper_simple,empirical\n" + "".join(
            f"{r['p']:.6g},{r['lower']:.12g},{r['upper_opt']:.12g},{r['upper_simple']:.12g},{r['empirical']:.12g}\n"
            for r in rows)
        _write_atomic(os.path.join(out_dir, "figure1.csv"), table)
        agg = {"m": m, "tol": tol}
        if emit_plot_data:
            _write_atomic(os.path.join(out_dir, "plot.csv"), table)
    else:
        params = _params_from(config)
        n = config["n"]
        seeds = sorted(_expand_seeds(config))
        jobs = [(exp, params, n, s, config, out_dir) for s in seeds]
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                rows = list(pool.map(_run_one_seed, jobs))
        else:
            rows = [_run_one_seed(j) for j in jobs]
        rows.sort(key=lambda r: r["seed"])
        agg = _aggregate(exp, params, config, rows, out_dir, emit_plot_data)

    if rows:
        keys = list(rows[0].keys())
        csv = ",".join(keys) + "\n" + "".join(",".join(_fmt(r[k]) for k in keys) + "\n" for r in rows)
        _write_atomic(os.path.join(out_dir, "results.csv"), csv)
    _write_atomic(os.path.join(out_dir, "config.json"), json.dumps(config, sort_keys=True, indent=2) + "\n")
    record = RunRecord(config=config, config_hash=h, version=__version__,
                       wall_clock_s=time.time() - t0, per_seed=rows, aggregates=agg, out_dir=out_dir)
    summary = {"config": config, "config_hash": h, "version": __version__,
               "wall_clock_s": record.wall_clock_s, "aggregates": agg}
    _write_atomic(os.path.join(out_dir, "summary.json"), json.dumps(summary, sort_keys=True, indent=2) + "\n")
    return record


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="drgvr", description="Birth-death random graph experiment runner")
    parser.add_argument("experiment", choices=EXPERIMENTS)
    parser.add_argument("--config", required=True, help="flat JSON config file")
    parser.add_argument("--seed-base", type=int, default=None)
    parser.add_argument("--seed-count", type=int, default=None)
    parser.add_argument("--out", default=None)
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--emit-plot-data", action="store_true")
    args = parser.parse_args(argv)

    try:
        with open(args.config) as fh:
            config = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 2
    config.setdefault("experiment", args.experiment)
    if config["experiment"] != args.experiment:
        print(f"error: config experiment {config['experiment']!r} != CLI {args.experiment!r}", file=sys.stderr)
        return 2
    if args.seed_base is not None:
        config.pop("seeds", None)
        config["seed_base"] = args.seed_base
    if args.seed_count is not None:
        config["seed_count"] = args.seed_count
    if args.out is not None:
        config["out"] = args.out

    errs = validate(config)
    if errs:
        for e in errs:
            print(f"config error: {e}", file=sys.stderr)
        return 2
    try:
        record = run(config, emit_plot_data=args.emit_plot_data, workers=args.workers)
    except Exception as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 1
    print(f"run {record.config_hash} done in {record.wall_clock_s:.1f}s -> {record.out_dir}")
    for key, val in record.aggregates.items():
        print(f"  {key}: {val}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
