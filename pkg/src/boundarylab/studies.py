"""Study runners reproducing the five numerical studies at desk scale.

Each study is a pure function of (master seed, configuration): replicate
cells derive their generators from a stable hash of the cell parameters,
so reruns are byte-identical for any thread count and a sub-grid run
reproduces exactly the same numbers as the corresponding cells of a
full-grid run.

Per-table CSVs follow the published column layouts; ``*_full.csv``
companions carry full float precision plus extra recorded diagnostics.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import kernels, stopping
from .bernoulli import BoundaryRuleConfig, all_failure_threshold, prob_all_failures
from .errors import ConfigError
from .logistic import (Design, RidgeConfig, calibrate_intercept, expit, fit,
                       instability, predict)
from .metrics import brier, calib_error, log_loss
from .randhie import load_data, quadratic_design, standardize, validate_data
from .rng import stream
from .tables import (format_float, format_pct, format_prob, format_sig,
                     format_time, write_csv, write_table)

__all__ = ["StudyConfig", "StudyRecord", "DESK_REPLICATES",
           "PAPER_REPLICATES", "run_study1", "run_study2", "run_study3",
           "run_study4", "run_study5", "emit_study", "run_and_emit"]

DESK_REPLICATES = {1: 50_000, 2: 200, 3: 100, 4: 5_000, 5: 200}
PAPER_REPLICATES = {1: 50_000, 2: 1_000, 3: 1_000, 4: 5_000, 5: 1_000}

STUDY2_SLOPES = np.array([1.0, -0.7, 0.5])
STUDY1_ALPHA = 0.05
STUDY1_NMAX = 1_000
STUDY4_T = 120
TEST_SIZE = 5_000
_MC_BLOCK = 2_000
_CAL_TAG = 9_999_991


@dataclass(frozen=True)
class StudyConfig:
    study_id: int
    replicates: int | None = None
    seed: int = 20260810
    output_dir: Path | None = None
    data_path: Path | None = None
    paper_scale: bool = False
    p_grid: tuple = ()
    rho_grid: tuple = ()
    eps_grid: tuple = ()
    n_grid: tuple = ()
    d_grid: tuple = ()

    def __post_init__(self):
        if self.study_id not in (1, 2, 3, 4, 5):
            raise ConfigError(f"study_id must be 1..5, got {self.study_id}")
        if self.replicates is not None and self.replicates < 1:
            raise ConfigError("replicates must be at least 1")

    @property
    def reps(self) -> int:
        if self.replicates is not None:
            return self.replicates
        table = PAPER_REPLICATES if self.paper_scale else DESK_REPLICATES
        return table[self.study_id]


@dataclass(frozen=True)
class StudyRecord:
    """Per-replicate row; fields are None/NaN when not meaningful."""

    replicate: int
    events: int | None = None
    one_class: bool | None = None
    mle_unstable: bool | None = None
    ridge_unstable: bool | None = None
    mle_log_loss: float = math.nan
    ridge_log_loss: float = math.nan
    mle_brier: float = math.nan
    ridge_brier: float = math.nan
    mle_calib: float = math.nan
    ridge_calib: float = math.nan
    mle_max_logit: float = math.nan
    ridge_max_logit: float = math.nan
    mle_coef_norm: float = math.nan
    ridge_coef_norm: float = math.nan
    mle_extreme_frac: float = math.nan
    ridge_extreme_frac: float = math.nan
    stop_time_boundary: int = 0
    stop_time_rm: int = 0


def _cell_id(*parts) -> int:
    """Stable positive integer encoding of cell parameters."""
    acc = 7
    for part in parts:
        if isinstance(part, float):
            part = int(round(part * 1e9))
        acc = acc * 1_000_000_007 + abs(int(part)) + 1
    return acc


def _run_replicates(worker, reps: int, threads: int) -> list:
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(worker, range(1, reps + 1)))
    return [worker(r) for r in range(1, reps + 1)]


def _rate(flags) -> float:
    return float(np.mean([bool(f) for f in flags]))


def _nanmedian(values) -> float:
    values = np.asarray(list(values), dtype=np.float64)
    if np.isnan(values).all():
        return math.nan
    return float(np.nanmedian(values))


# ---------------------------------------------------------------- study 1

def run_study1(cfg: StudyConfig, threads: int = 1) -> dict:
    """Bernoulli rare-event experiment: exact rule probabilities with a
    Monte Carlo cross-check.

    The exact tau_0 column counts the failure run from trial 1, exactly
    as in the published table; ``mc_prob_tau0`` checks that definition by
    simulation and ``mc_prob_tau0_anyrun`` additionally reports the
    restarted-run variant, which is strictly more likely.
    """
    p_grid = tuple(cfg.p_grid) or (0.10, 0.01, 0.005)
    eps_grid = tuple(cfg.eps_grid) or (0.01, 0.005)
    reps = cfg.reps
    rows = []
    for p in p_grid:
        for eps in eps_grid:
            rule = BoundaryRuleConfig(epsilon=eps, alpha=STUDY1_ALPHA)
            n_eps = all_failure_threshold(rule)
            cell = _cell_id(1, p, eps)
            n_blocks = (reps + _MC_BLOCK - 1) // _MC_BLOCK

            def mc_block(block, p=p, n_eps=n_eps, cell=cell):
                rng = stream(cfg.seed, 1, cell, block)
                size = min(_MC_BLOCK, reps - (block - 1) * _MC_BLOCK)
                y = (rng.random((size, STUDY1_NMAX)) < p).astype(np.uint8)
                successes = y.sum(axis=1)
                zero = int((successes == 0).sum())
                if STUDY1_NMAX >= n_eps:
                    first = int((y[:, :n_eps].sum(axis=1) == 0).sum())
                else:
                    first = 0
                anyrun = int((kernels.failure_run_stop(y, n_eps) > 0).sum())
                jeff = float(((successes + 0.5) / (STUDY1_NMAX + 1.0)).sum())
                return zero, first, anyrun, jeff

            parts = _run_replicates(mc_block, n_blocks, threads)
            zeros = sum(part[0] for part in parts)
            firsts = sum(part[1] for part in parts)
            anyruns = sum(part[2] for part in parts)
            jeff_total = math.fsum(part[3] for part in parts)
            rows.append({
                "p": p,
                "epsilon": eps,
                "n_eps": n_eps,
                "prob_mle_zero": prob_all_failures(p, STUDY1_NMAX),
                "prob_tau0": (prob_all_failures(p, n_eps)
                              if STUDY1_NMAX >= n_eps else 0.0),
                "mean_jeffreys": (STUDY1_NMAX * p + 0.5) / (STUDY1_NMAX + 1.0),
                "mc_replicates": reps,
                "mc_prob_mle_zero": zeros / reps,
                "mc_prob_tau0": firsts / reps,
                "mc_prob_tau0_anyrun": anyruns / reps,
                "mc_mean_jeffreys": jeff_total / reps,
            })
    fig_n = np.arange(1, 3001)
    figure = {"n": fig_n,
              "series": {p: np.exp(fig_n * math.log1p(-p)) for p in p_grid}}
    return {"study": 1, "rows": rows, "figure": figure}


def _emit_study1(result: dict, outdir: Path) -> None:
    header = ["p", "epsilon", "n_eps", "prob_mle_zero_n1000",
              "prob_tau0_le_1000", "mean_jeffreys_n1000"]
    display = [[f"{r['p']:.3f}", f"{r['epsilon']:.3f}", r["n_eps"],
                format_sig(r["prob_mle_zero"]), format_prob(r["prob_tau0"]),
                format_prob(r["mean_jeffreys"])] for r in result["rows"]]
    full_header = list(result["rows"][0].keys())
    full = [[r[k] for k in full_header] for r in result["rows"]]
    write_table(outdir, "table1", header, display, full_header, full)

    fig = result["figure"]
    fig_header = ["n"] + [f"prob_zero_p{p:g}" for p in fig["series"]]
    fig_rows = []
    for i, n in enumerate(fig["n"]):
        fig_rows.append([int(n)] + [repr(float(series[i]))
                                    for series in fig["series"].values()])
    write_csv(outdir / "figure1.csv", fig_header, fig_rows)


# ---------------------------------------------------------------- study 2

def _logistic_replicate(rng, n, d, b0, slopes, x_test, y_test,
                        mle_ridge: RidgeConfig, ridge: RidgeConfig,
                        max_iter: int, replicate: int) -> StudyRecord:
    x = rng.standard_normal((n, d))
    probs = expit(b0 + x @ slopes)
    y = (rng.random(n) < probs).astype(np.int64)
    events = int(y.sum())
    if events in (0, n):
        return StudyRecord(replicate=replicate, events=events, one_class=True,
                           mle_unstable=True, ridge_unstable=True)
    design = Design(x, y)
    record = {"replicate": replicate, "events": events, "one_class": False}
    for label, ridge_cfg in (("mle", mle_ridge), ("ridge", ridge)):
        result = fit(design, ridge_cfg, max_iter=max_iter)
        report = instability(result, design)
        p_test = predict(result, x_test)
        record[f"{label}_unstable"] = report.unstable
        record[f"{label}_log_loss"] = log_loss(y_test, p_test)
        record[f"{label}_brier"] = brier(y_test, p_test)
        record[f"{label}_calib"] = calib_error(y_test, p_test)
        record[f"{label}_max_logit"] = result.max_abs_logit
        record[f"{label}_coef_norm"] = result.coef_norm
        record[f"{label}_extreme_frac"] = result.extreme_prob_fraction
    return StudyRecord(**record)


def _aggregate_logistic(cell: dict, records: list[StudyRecord]) -> dict:
    out = dict(cell)
    out.update({
        "mean_events": float(np.mean([r.events for r in records])),
        "one_class_rate": _rate(r.one_class for r in records),
        "mle_unstable_rate": _rate(r.mle_unstable for r in records),
        "ridge_unstable_rate": _rate(r.ridge_unstable for r in records),
        "mle_median_log_loss": _nanmedian(r.mle_log_loss for r in records),
        "ridge_median_log_loss": _nanmedian(r.ridge_log_loss for r in records),
        "mle_median_brier": _nanmedian(r.mle_brier for r in records),
        "ridge_median_brier": _nanmedian(r.ridge_brier for r in records),
        "mle_median_calib": _nanmedian(r.mle_calib for r in records),
        "ridge_median_calib": _nanmedian(r.ridge_calib for r in records),
        "mle_median_max_logit": _nanmedian(r.mle_max_logit for r in records),
        "ridge_median_max_logit": _nanmedian(r.ridge_max_logit for r in records),
    })
    return out


def run_study2(cfg: StudyConfig, threads: int = 1) -> dict:
    """Low-dimensional rare-event logistic experiment (three covariates)."""
    rho_grid = tuple(cfg.rho_grid) or (0.10, 0.01, 0.005)
    n_grid = tuple(cfg.n_grid) or ((50, 100, 200, 500, 1000, 2000)
                                   if cfg.paper_scale else (100, 500, 2000))
    reps = cfg.reps
    cells = []
    for rho in rho_grid:
        cal_rng = stream(cfg.seed, 2, _cell_id(_CAL_TAG, rho), 0)
        b0 = calibrate_intercept(STUDY2_SLOPES, rho, rng=cal_rng)
        for n in n_grid:
            cell = _cell_id(2, rho, n)
            test_rng = stream(cfg.seed, 2, cell, 0)
            x_test = test_rng.standard_normal((TEST_SIZE, 3))
            y_test = (test_rng.random(TEST_SIZE)
                      < expit(b0 + x_test @ STUDY2_SLOPES)).astype(np.int64)

            def worker(r, n=n, b0=b0, cell=cell, x_test=x_test, y_test=y_test):
                rng = stream(cfg.seed, 2, cell, r)
                return _logistic_replicate(
                    rng, n, 3, b0, STUDY2_SLOPES, x_test, y_test,
                    RidgeConfig(0.0), RidgeConfig(1.0), 100, r)

            records = _run_replicates(worker, reps, threads)
            cells.append(_aggregate_logistic(
                {"rho": rho, "n": n, "intercept": b0}, records))
    return {"study": 2, "cells": cells}


def _emit_logistic_table(result: dict, outdir: Path, name: str,
                         lead_cols: list[str]) -> None:
    header = [*lead_cols, "events", "one_class", "mle_unstable",
              "method", "median_log_loss"]
    if result["study"] == 3:
        header.insert(len(lead_cols) + 1, "epv")
    display = []
    for cell in result["cells"]:
        lead = [format_prob(cell[c]) if isinstance(cell[c], float) else cell[c]
                for c in lead_cols]
        base = lead + [format_time(cell["mean_events"])]
        if result["study"] == 3:
            base.append(format_float(cell["epv"], 3))
        base += [format_float(cell["one_class_rate"], 3),
                 format_float(cell["mle_unstable_rate"], 3)]
        display.append(base + ["mle",
                               format_float(cell["mle_median_log_loss"], 4)])
        display.append(base + ["ridge",
                               format_float(cell["ridge_median_log_loss"], 4)])
    full_header = list(result["cells"][0].keys())
    full = [[cell[k] for k in full_header] for cell in result["cells"]]
    write_table(outdir, name, header, display, full_header, full)


def _emit_study2(result: dict, outdir: Path) -> None:
    _emit_logistic_table(result, outdir, "table2", ["rho", "n"])
    fig_rows = [[format_prob(c["rho"]), c["n"],
                 repr(c["mle_unstable_rate"]), repr(c["ridge_unstable_rate"])]
                for c in result["cells"]]
    write_csv(outdir / "figure2.csv",
              ["rho", "n", "mle_unstable_rate", "ridge_unstable_rate"],
              fig_rows)


# ---------------------------------------------------------------- study 3

def run_study3(cfg: StudyConfig, threads: int = 1) -> dict:
    """High-dimensional sparse-signal rare-event logistic experiment."""
    d_grid = tuple(cfg.d_grid) or (20, 50)
    rho_grid = tuple(cfg.rho_grid) or (0.01, 0.005)
    n_grid = tuple(cfg.n_grid) or (500, 1000)
    reps = cfg.reps
    cells = []
    for d in d_grid:
        slopes = np.zeros(d)
        slopes[:5] = 2.0 / math.sqrt(5.0)
        for rho in rho_grid:
            cal_rng = stream(cfg.seed, 3, _cell_id(_CAL_TAG, rho), 0)
            b0 = calibrate_intercept(slopes, rho, rng=cal_rng)
            for n in n_grid:
                cell = _cell_id(3, d, rho, n)
                test_rng = stream(cfg.seed, 3, cell, 0)
                x_test = test_rng.standard_normal((TEST_SIZE, d))
                y_test = (test_rng.random(TEST_SIZE)
                          < expit(b0 + x_test @ slopes)).astype(np.int64)

                def worker(r, n=n, d=d, b0=b0, slopes=slopes, cell=cell,
                           x_test=x_test, y_test=y_test):
                    rng = stream(cfg.seed, 3, cell, r)
                    return _logistic_replicate(
                        rng, n, d, b0, slopes, x_test, y_test,
                        RidgeConfig(0.0), RidgeConfig(1.0), 200, r)

                records = _run_replicates(worker, reps, threads)
                agg = _aggregate_logistic(
                    {"d": d, "rho": rho, "n": n, "intercept": b0}, records)
                agg["epv"] = agg["mean_events"] / d
                cells.append(agg)
    return {"study": 3, "cells": cells}


def _emit_study3(result: dict, outdir: Path) -> None:
    _emit_logistic_table(result, outdir, "table3", ["d", "rho", "n"])
    fig_rows = [[c["d"], format_prob(c["rho"]), c["n"],
                 repr(c["mle_unstable_rate"]), repr(c["ridge_unstable_rate"])]
                for c in result["cells"]]
    write_csv(outdir / "figure3.csv",
              ["d", "rho", "n", "mle_unstable_rate", "ridge_unstable_rate"],
              fig_rows)


# ---------------------------------------------------------------- study 4

_SCENARIOS = (
    ("stable_boundary", stopping.gen_stable_boundary),
    ("transient_boundary", stopping.gen_transient_boundary),
    ("interior_stable", stopping.gen_interior_stable),
)


def run_study4(cfg: StudyConfig, threads: int = 1) -> dict:
    """Boundary-only versus three-condition stopping on simulated
    conditional-risk trajectories."""
    reps = cfg.reps
    stop_cfg = stopping.StopConfig()
    cells = []
    mean_paths = {}
    records = {}
    for scenario_idx, (label, generator) in enumerate(_SCENARIOS):
        cell = _cell_id(4, scenario_idx)

        def worker(r, generator=generator, cell=cell):
            rng = stream(cfg.seed, 4, cell, r)
            return generator(STUDY4_T, rng).m

        paths = np.vstack(_run_replicates(worker, reps, threads))
        mean_paths[label] = paths.mean(axis=0)
        rule_times = {}
        for rule, with_stability in (("boundary_only", False),
                                     ("boundary_plus_stability", True)):
            times = stopping.stop_times_batch(paths, stop_cfg, with_stability)
            rule_times[rule] = times
            stopped = times > 0
            cells.append({
                "scenario": label,
                "rule": rule,
                "stop_prob": float(stopped.mean()),
                "mean_stop_time": (float(times[stopped].mean())
                                   if stopped.any() else math.nan),
                "median_stop_time": (float(np.median(times[stopped]))
                                     if stopped.any() else math.nan),
            })
        records[label] = [
            StudyRecord(replicate=r + 1, stop_time_boundary=int(t_b),
                        stop_time_rm=int(t_rm))
            for r, (t_b, t_rm) in enumerate(
                zip(rule_times["boundary_only"],
                    rule_times["boundary_plus_stability"]))]
    return {"study": 4, "cells": cells, "mean_paths": mean_paths,
            "records": records}


def _emit_study4(result: dict, outdir: Path) -> None:
    header = ["scenario", "rule", "stop_prob", "mean_stop_time",
              "median_stop_time"]
    display = [[c["scenario"], c["rule"], format_float(c["stop_prob"], 3),
                format_time(c["mean_stop_time"]),
                format_time(c["median_stop_time"])]
               for c in result["cells"]]
    full = [[c[k] for k in header] for c in result["cells"]]
    write_table(outdir, "table4", header, display, header, full)

    labels = list(result["mean_paths"])
    fig_header = ["t"] + [f"mean_m_{label}" for label in labels]
    fig_rows = [[t + 1] + [repr(float(result["mean_paths"][label][t]))
                           for label in labels]
                for t in range(STUDY4_T)]
    write_csv(outdir / "figure4.csv", fig_header, fig_rows)


# ---------------------------------------------------------------- study 5

def _hie_replicate(rng, features, y_all, n, replicate) -> StudyRecord:
    idx = rng.choice(y_all.size, size=n, replace=False)
    x, y = features[idx], y_all[idx].astype(np.int64)
    events = int(y.sum())
    if events in (0, n):
        return StudyRecord(replicate=replicate, events=events, one_class=True,
                           mle_unstable=True, ridge_unstable=True)
    design = Design(x, y)
    record = {"replicate": replicate, "events": events, "one_class": False}
    for label, lam in (("mle", 1e-4), ("ridge", 1.0)):
        result = fit(design, RidgeConfig(lam), max_iter=50)
        report = instability(result, design)
        p_train = predict(result, x)
        record[f"{label}_unstable"] = report.unstable
        record[f"{label}_log_loss"] = log_loss(y, p_train)
        record[f"{label}_brier"] = brier(y, p_train)
        record[f"{label}_max_logit"] = result.max_abs_logit
        record[f"{label}_coef_norm"] = result.coef_norm
        record[f"{label}_extreme_frac"] = result.extreme_prob_fraction
    return StudyRecord(**record)


def run_study5(cfg: StudyConfig, threads: int = 1) -> dict:
    """RAND HIE rare-event illustration on user-supplied data.

    The nearly unpenalized fit (lambda = 1e-4, the paper's inverse
    regularization constant 1/C with C = 1e4) stands in for ordinary
    maximum likelihood; the comparator is unit ridge.  Losses here are
    training-sample diagnostics by construction.
    """
    if cfg.data_path is None:
        raise ConfigError("study 5 requires data_path")
    summary = validate_data(cfg.data_path)
    x_raw, y_all = load_data(cfg.data_path)
    x_std = standardize(x_raw)
    designs = (("base", x_std), ("quadratic", quadratic_design(x_std)))
    n_grid = tuple(cfg.n_grid) or ((100, 200, 500, 1000, 2000)
                                   if cfg.paper_scale else (200, 500, 1000))
    reps = cfg.reps
    cells = []
    for design_idx, (label, features) in enumerate(designs):
        for n in n_grid:
            cell = _cell_id(5, design_idx, n)

            def worker(r, features=features, n=n, cell=cell):
                rng = stream(cfg.seed, 5, cell, r)
                return _hie_replicate(rng, features, y_all, n, r)

            records = _run_replicates(worker, reps, threads)
            cells.append({
                "design": label,
                "n": n,
                "d": features.shape[1],
                "mean_events": float(np.mean([r.events for r in records])),
                "one_class_rate": _rate(r.one_class for r in records),
                "mle_unstable_rate": _rate(r.mle_unstable for r in records),
                "ridge_unstable_rate": _rate(r.ridge_unstable
                                             for r in records),
                "mle_median_max_logit": _nanmedian(r.mle_max_logit
                                                   for r in records),
                "ridge_median_max_logit": _nanmedian(r.ridge_max_logit
                                                     for r in records),
                "mle_median_log_loss": _nanmedian(r.mle_log_loss
                                                  for r in records),
                "ridge_median_log_loss": _nanmedian(r.ridge_log_loss
                                                    for r in records),
                "mle_median_brier": _nanmedian(r.mle_brier for r in records),
                "ridge_median_brier": _nanmedian(r.ridge_brier
                                                 for r in records),
            })
    return {"study": 5, "cells": cells, "data_summary": summary}


def _emit_study5(result: dict, outdir: Path) -> None:
    header = ["design", "n", "d", "mean_events", "one_class_pct",
              "mle_unstable_pct", "ridge_unstable_pct", "mle_max_logit",
              "ridge_max_logit", "mle_loss", "ridge_loss"]
    display = [[c["design"], c["n"], c["d"], format_time(c["mean_events"]),
                format_pct(c["one_class_rate"]),
                format_pct(c["mle_unstable_rate"]),
                format_pct(c["ridge_unstable_rate"]),
                format_time(c["mle_median_max_logit"]),
                format_time(c["ridge_median_max_logit"]),
                format_float(c["mle_median_log_loss"], 3),
                format_float(c["ridge_median_log_loss"], 3)]
               for c in result["cells"]]
    full_header = list(result["cells"][0].keys())
    full = [[c[k] for k in full_header] for c in result["cells"]]
    write_table(outdir, "table5", header, display, full_header, full)

    fig_rows = [[c["design"], c["n"], repr(c["mle_unstable_rate"]),
                 repr(c["ridge_unstable_rate"])] for c in result["cells"]]
    write_csv(outdir / "figure5.csv",
              ["design", "n", "mle_unstable_rate", "ridge_unstable_rate"],
              fig_rows)


# ----------------------------------------------------------------- driver

_RUNNERS = {1: run_study1, 2: run_study2, 3: run_study3, 4: run_study4,
            5: run_study5}
_EMITTERS = {1: _emit_study1, 2: _emit_study2, 3: _emit_study3,
             4: _emit_study4, 5: _emit_study5}


def emit_study(result: dict, outdir) -> None:
    _EMITTERS[result["study"]](result, Path(outdir))


def run_and_emit(cfg: StudyConfig, threads: int = 1) -> dict:
    result = _RUNNERS[cfg.study_id](cfg, threads=threads)
    if cfg.output_dir is not None:
        emit_study(result, cfg.output_dir)
    return result
