"""Simulation experiments: model comparison table, power study, sure screening.

All randomness flows from a master seed through :func:`simgen.derive_seed`,
so results do not depend on execution order or thread count.
"""
from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import _kernels, dataio
from .copula_oracle import population_K, sure_screening_bound
from .errors import InvalidInputError, ScreeningError
from .filters import (
    DEFAULT_SCHEME,
    Dataset,
    KnotScheme,
    Method,
    quantile_positions,
    screen_all,
    select_top,
    thread_limit,
)
from .simgen import CovarianceSpec, CovKind, ModelSpec, derive_seed, generate, sample_mvn

DESK_N, DESK_P, DESK_REPS = 200, 1000, 50
FULL_N, FULL_P, FULL_REPS = 200, 5000, 100
TABLE1_METHODS = (Method.SIS, Method.DCS, Method.FKF, Method.CKF)
POWER_METHODS = (Method.CKF, Method.FKF, Method.KF_BINARY)
TOY_KEY = 0  # model key used when deriving toy-model seeds
SURE_KEY = 100


def min_model_size(scores, true_set) -> int:
    """Number of features scoring at least as high as the weakest informative one.

    Ties with noise features count against the method.
    """
    values = scores.scores if hasattr(scores, "scores") else np.asarray(scores, dtype=float)
    idx = sorted(true_set)
    if not idx:
        raise InvalidInputError("true_set must be non-empty")
    if idx[0] < 0 or idx[-1] >= values.shape[0]:
        raise InvalidInputError("true_set index out of range")
    t = values[idx].min()
    return int(np.count_nonzero(values >= t))


def _mean_sd(values):
    vals = sorted(float(v) for v in values)
    if not vals:
        return math.nan, math.nan
    mean = math.fsum(vals) / len(vals)
    if len(vals) == 1:
        return mean, 0.0
    return mean, math.sqrt(math.fsum((v - mean) ** 2 for v in vals) / (len(vals) - 1))


@dataclass
class BenchmarkRecord:
    model_id: int
    method: str
    rep_index: int
    seed: int
    min_model_size: int
    wall_time: float = 0.0


RECORD_COLUMNS = ("model", "method", "rep", "seed", "min_model_size")


@dataclass
class Table1Result:
    records: list[BenchmarkRecord]
    failures: list[str] = field(default_factory=list)

    def cells(self) -> dict:
        """``{(model, method): (mean, sd, count)}``."""
        groups: dict = {}
        for r in self.records:
            groups.setdefault((r.model_id, r.method), []).append(r.min_model_size)
        return {k: (*_mean_sd(v), len(v)) for k, v in sorted(groups.items())}

    def mean(self, model_id, method) -> float:
        return self.cells()[(model_id, Method.parse(method).value)][0]

    def summary(self) -> dict:
        out = {}
        for (model, method), (mean, sd, count) in self.cells().items():
            out.setdefault(str(model), {})[method] = {"mean": mean, "sd": sd, "reps": count}
        return out

    def format_table(self) -> str:
        cells = self.cells()
        models = sorted({m for m, _ in cells})
        methods = [m.value for m in Method if any(k[1] == m.value for k in cells)]
        lines = ["model " + "".join(f"{m.upper():>20}" for m in methods)]
        for model in models:
            parts = []
            for m in methods:
                mean, sd, _ = cells.get((model, m), (math.nan, math.nan, 0))
                parts.append(f"{mean:10.2f} ({sd:7.2f})")
            lines.append(f"{model:>5} " + "".join(f"{p:>20}" for p in parts))
        return "\n".join(lines)


def run_table1(
    models: Sequence[int] = range(1, 10),
    methods: Sequence = TABLE1_METHODS,
    n: int = DESK_N,
    p: int = DESK_P,
    reps: int = DESK_REPS,
    master_seed: int = 0,
    threads: int | None = None,
    knots: KnotScheme | None = None,
    model9_cov: str = "ar",
) -> Table1Result:
    """Minimum model size of each method on each model over ``reps`` replications."""
    if reps < 1:
        raise InvalidInputError("reps must be positive")
    methods = [Method.parse(m) for m in methods]
    result = Table1Result(records=[])
    with thread_limit(threads):
        for model in models:
            for rep in range(reps):
                seed = derive_seed(master_seed, model, rep)
                try:
                    inst = generate(ModelSpec(model, n, p, seed, model9_cov=model9_cov))
                except ScreeningError as exc:
                    result.failures.append(f"model {model} rep {rep}: {exc}")
                    continue
                for method in methods:
                    t0 = time.perf_counter()
                    try:
                        scores = screen_all(inst.data, method, knots=knots)
                    except ScreeningError as exc:
                        result.failures.append(f"model {model} rep {rep} {method.value}: {exc}")
                        continue
                    size = min_model_size(scores, inst.true_set)
                    result.records.append(
                        BenchmarkRecord(model, method.value, rep, seed, size, time.perf_counter() - t0)
                    )
    return result


def write_table1(result: Table1Result, outdir, provenance=(), timings=False) -> dict:
    """Write ``table1_records.csv`` and ``table1_summary.json``; optionally timings."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = {"records": outdir / "table1_records.csv", "summary": outdir / "table1_summary.json"}
    dataio.write_rows_csv(
        paths["records"],
        RECORD_COLUMNS,
        ((r.model_id, r.method, r.rep_index, r.seed, r.min_model_size) for r in result.records),
        provenance,
    )
    dataio.write_json(
        paths["summary"],
        {"provenance": list(provenance), "cells": result.summary(), "failures": result.failures},
    )
    if timings:
        # wall-clock times vary run to run, so they never go in the main outputs
        paths["timings"] = outdir / "table1_timings.csv"
        dataio.write_rows_csv(
            paths["timings"],
            ("model", "method", "rep", "wall_time"),
            ((r.model_id, r.method, r.rep_index, r.wall_time) for r in result.records),
        )
    return paths


@dataclass
class PowerPoint:
    beta: float
    method: str
    power: float
    se: float
    reps: int
    critical_value: float


def _batch_stat(method: Method, X, Y, scheme: KnotScheme):
    if method is Method.CKF:
        return _kernels.ckf_pairs(X, Y)
    if method is Method.KF_BINARY:
        return np.nan_to_num(_kernels.binary_pairs(X, Y), nan=0.0)
    if method is Method.FKF:
        total = np.zeros(X.shape[1])
        for ks in scheme.knot_sets:
            total += np.nan_to_num(
                _kernels.slice_pairs(X, Y, quantile_positions(X.shape[0], ks)), nan=0.0
            )
        return total / len(scheme.knot_sets)
    raise InvalidInputError(f"power study supports ckf, fkf and kf, not {method.value}")


def _toy_batch(n, reps, beta, seed):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, reps))
    Y = beta * X + rng.standard_normal((n, reps))
    return np.asfortranarray(X), np.asfortranarray(Y)


def critical_value(null_stats, alpha):
    """Upper-alpha critical value and the tie randomisation weight.

    The level-alpha test rejects when the statistic exceeds ``c`` and with
    probability ``gamma`` when it equals ``c``; this keeps the size at alpha
    for discrete statistics such as the median-split KS distance.
    """
    s = np.sort(np.asarray(null_stats, dtype=float))
    k = min(max(math.ceil(round((1.0 - alpha) * s.size, 9)), 1), s.size) - 1
    c = float(s[k])
    above = float(np.mean(s > c))
    at = float(np.mean(s == c))
    gamma = 0.0 if at == 0.0 else min(max((alpha - above) / at, 0.0), 1.0)
    return c, gamma


def power_study(
    beta_grid: Sequence[float] = tuple(round(0.05 * i, 2) for i in range(11)),
    alpha: float = 0.05,
    n: int = 100,
    reps: int = 2000,
    null_reps: int = 5000,
    methods: Sequence = POWER_METHODS,
    master_seed: int = 0,
    threads: int | None = None,
    knots: KnotScheme | None = None,
) -> list[PowerPoint]:
    """Power of the level-alpha test of ``beta = 0`` in ``Y = beta X + eps``.

    Critical values come from ``null_reps`` simulations at ``beta = 0``; each
    grid point then uses ``reps`` fresh simulations.  Reported power is the
    expected rejection rate of the tie-randomised test.
    """
    if not 0.0 < alpha < 1.0:
        raise InvalidInputError(f"alpha must lie in (0, 1), got {alpha}")
    if reps < 1 or null_reps < 1 or n < 2:
        raise InvalidInputError("n >= 2 and positive reps/null_reps are required")
    scheme = DEFAULT_SCHEME if knots is None else knots
    methods = [Method.parse(m) for m in methods]
    points = []
    with thread_limit(threads):
        X0, Y0 = _toy_batch(n, null_reps, 0.0, derive_seed(master_seed, TOY_KEY, 0))
        calib = {m: critical_value(_batch_stat(m, X0, Y0, scheme), alpha) for m in methods}
        batches = [
            _toy_batch(n, reps, float(b), derive_seed(master_seed, TOY_KEY, i + 1))
            for i, b in enumerate(beta_grid)
        ]
        for m in methods:
            c, gamma = calib[m]
            for b, (X, Y) in zip(beta_grid, batches):
                stats = _batch_stat(m, X, Y, scheme)
                power = float(np.mean(stats > c) + gamma * np.mean(stats == c))
                se = math.sqrt(max(power * (1.0 - power), 0.0) / reps)
                points.append(PowerPoint(float(b), m.value, power, se, reps, c))
    return points


def write_power(points: Sequence[PowerPoint], path, provenance=()) -> None:
    dataio.write_rows_csv(
        path,
        ("beta", "method", "power", "se", "reps", "critical_value"),
        ((p.beta, p.method, p.power, p.se, p.reps, p.critical_value) for p in points),
        provenance,
    )


@dataclass
class SureScreeningPoint:
    n: int
    reps: int
    probability: float
    se: float
    delta: float
    delta_exceeds_4_over_n: bool
    bound_eta: float


def signal_coefficient(rho: float, k: int) -> float:
    """Coefficient b with Cor(X_j, b * sum_k X + eps) = rho for iid standard normals."""
    if not 0.0 <= rho < 1.0 / math.sqrt(k):
        raise InvalidInputError(f"rho must lie in [0, 1/sqrt({k})) for {k} informative features")
    return rho / math.sqrt(1.0 - k * rho * rho)


def sure_screening_experiment(
    rho_signal: float = 0.5,
    n_grid: Sequence[int] = (50, 100, 200, 400),
    p: int = 200,
    d_n: int = 10,
    reps: int = 200,
    master_seed: int = 0,
    n_informative: int = 2,
    threads: int | None = None,
) -> list[SureScreeningPoint]:
    """Empirical probability that the top ``d_n`` CKF features contain all informative ones.

    Data: ``X ~ N_p(0, I)``, ``Y = b (X_1 + ... + X_k) + eps`` with b chosen so
    each informative feature has correlation ``rho_signal`` with Y, which is a
    Gaussian copula pair.  The population gap is ``K(rho_signal) - K(0)``.
    """
    if not n_informative <= d_n <= p:
        raise InvalidInputError("need n_informative <= d_n <= p")
    b = signal_coefficient(rho_signal, n_informative)
    delta = population_K(rho_signal) - population_K(0.0)
    true_set = set(range(n_informative))
    out = []
    with thread_limit(threads):
        for n in n_grid:
            hits = 0
            for rep in range(reps):
                rng = np.random.default_rng(derive_seed(master_seed, SURE_KEY, n, rep))
                x = sample_mvn(n, p, CovarianceSpec(CovKind.IDENTITY), rng)
                y = b * x[:, :n_informative].sum(axis=1) + rng.standard_normal(n)
                sel = select_top(screen_all(Dataset(x, y), Method.CKF), d_n)
                hits += true_set.issubset(sel.indices)
            prob = hits / reps
            out.append(
                SureScreeningPoint(
                    n,
                    reps,
                    prob,
                    math.sqrt(prob * (1 - prob) / reps),
                    delta,
                    delta > 4.0 / n,
                    sure_screening_bound(n, p, delta),
                )
            )
    return out


def write_sure_screening(points: Sequence[SureScreeningPoint], path, provenance=()) -> None:
    cols = tuple(asdict(points[0]).keys()) if points else ()
    dataio.write_rows_csv(path, cols, (tuple(asdict(p).values()) for p in points), provenance)
