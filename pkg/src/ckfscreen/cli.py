"""Command-line entry point: ``ckfscreen <subcommand> [options]``.

Settings resolve as command-line flag, then ``--config`` JSON file, then
built-in default.  Exit codes: 0 success, 1 usage, 2 data error, 3 failed
check.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numba

from . import bench_harness, copula_oracle, dataio, simgen
from .errors import DatasetParseError, InvalidInputError, ScreeningError
from .filters import KnotScheme, Method, screen_all, select_top

OUTPUT_ENV = "CKFSCREEN_OUTPUT_DIR"

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_CHECK = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    """Every tunable of every subcommand; ``None`` means "not set"."""

    method: str | None = None
    d: int | None = None
    knots: list | None = None
    model: str | None = None
    models: list | None = None
    methods: list | None = None
    n: int | None = None
    p: int | None = None
    reps: int | None = None
    null_reps: int | None = None
    seed: int | None = None
    alpha: float | None = None
    beta: float | None = None
    betas: list | None = None
    rho: float | None = None
    n_grid: list | None = None
    rhos: list | None = None
    xs: list | None = None
    model9_cov: str | None = None
    full: bool | None = None
    timings: bool | None = None
    threads: int | None = None
    output_dir: str | None = None

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        try:
            raw = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config file {path}: {exc}") from None
        if not isinstance(raw, dict):
            raise UsageError("config file must hold a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(raw) - known)
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(unknown)}")
        return cls(**raw)

    def merged(self, *others: "RunConfig") -> "RunConfig":
        out = asdict(self)
        for other in others:
            out.update({k: v for k, v in asdict(other).items() if v is not None})
        return RunConfig(**out)


# settings that must not appear in provenance headers (they may differ between
# runs that should produce identical files)
_NON_SCIENTIFIC = {"threads", "output_dir", "timings"}

DEFAULTS = {
    "screen": RunConfig(method="ckf", d=10, knots=[3, 4, 5, 6]),
    "simulate": RunConfig(model="1", n=200, p=1000, seed=0, beta=0.0, model9_cov="ar"),
    "table1": RunConfig(
        models=list(range(1, 10)),
        methods=[m.value for m in bench_harness.TABLE1_METHODS],
        n=bench_harness.DESK_N,
        p=bench_harness.DESK_P,
        reps=bench_harness.DESK_REPS,
        seed=0,
        knots=[3, 4, 5, 6],
        full=False,
        timings=False,
        model9_cov="ar",
    ),
    "power": RunConfig(
        alpha=0.05,
        n=100,
        reps=2000,
        null_reps=5000,
        betas=[round(0.05 * i, 2) for i in range(11)],
        methods=[m.value for m in bench_harness.POWER_METHODS],
        knots=[3, 4, 5, 6],
        seed=0,
    ),
    "lemma-check": RunConfig(
        rhos=list(copula_oracle.DEFAULT_RHO_GRID), xs=list(copula_oracle.DEFAULT_X_GRID)
    ),
    "sure-screening": RunConfig(rho=0.5, n_grid=[50, 100, 200, 400], p=200, d=10, reps=200, seed=0),
}


def _int_list(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _float_list(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _str_list(text):
    return [v.strip() for v in text.split(",") if v.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ckfscreen", description="Kolmogorov-filter feature screening.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    common = _Parser(add_help=False)
    common.add_argument("--config", help="JSON file of settings (flags take precedence)")
    common.add_argument("--output-dir", help=f"where to write results (default ${OUTPUT_ENV} or .)")
    common.add_argument("--threads", type=int, help="worker threads (default: all available)")

    s = sub.add_parser("screen", parents=[common], help="score the features of a CSV dataset")
    s.add_argument("data", help="CSV file: header row, response first, then features")
    s.add_argument("--method", choices=[m.value for m in Method])
    s.add_argument("--d", type=int, help="number of features to select")
    s.add_argument("--knots", type=_int_list, help="FKF slice counts, e.g. 3,4,5,6")

    s = sub.add_parser("simulate", parents=[common], help="write one simulated instance as CSV")
    s.add_argument("--model", help="1..9 or toy")
    s.add_argument("--n", type=int)
    s.add_argument("--p", type=int)
    s.add_argument("--seed", type=int)
    s.add_argument("--beta", type=float, help="toy-model slope")
    s.add_argument("--model9-cov", choices=["ar", "cs"])

    s = sub.add_parser("table1", parents=[common], help="minimum-model-size comparison")
    s.add_argument("--models", type=_int_list)
    s.add_argument("--methods", type=_str_list)
    s.add_argument("--n", type=int)
    s.add_argument("--p", type=int)
    s.add_argument("--reps", type=int)
    s.add_argument("--seed", type=int)
    s.add_argument("--knots", type=_int_list)
    s.add_argument("--full", action="store_const", const=True, help="n=200, p=5000, 100 reps")
    s.add_argument("--timings", action="store_const", const=True, help="also write wall times")
    s.add_argument("--model9-cov", choices=["ar", "cs"])

    s = sub.add_parser("power", parents=[common], help="power study of the toy model")
    s.add_argument("--alpha", type=float)
    s.add_argument("--n", type=int)
    s.add_argument("--reps", type=int)
    s.add_argument("--null-reps", type=int)
    s.add_argument("--betas", type=_float_list)
    s.add_argument("--methods", type=_str_list)
    s.add_argument("--knots", type=_int_list)
    s.add_argument("--seed", type=int)

    s = sub.add_parser("lemma-check", parents=[common], help="self-test of the copula formulas")
    s.add_argument("--rhos", type=_float_list)
    s.add_argument("--xs", type=_float_list)

    s = sub.add_parser("sure-screening", parents=[common], help="empirical sure-screening rate")
    s.add_argument("--rho", type=float)
    s.add_argument("--n-grid", type=_int_list)
    s.add_argument("--p", type=int)
    s.add_argument("--d", type=int)
    s.add_argument("--reps", type=int)
    s.add_argument("--seed", type=int)
    return parser


def _resolve(args) -> RunConfig:
    known = {f.name for f in fields(RunConfig)}
    flags = RunConfig(**{k: v for k, v in vars(args).items() if k in known})
    file_cfg = RunConfig.from_file(args.config) if args.config else RunConfig()
    cfg = DEFAULTS[args.command].merged(file_cfg, flags)
    if cfg.output_dir is None:
        cfg.output_dir = os.environ.get(OUTPUT_ENV, ".")
    if cfg.threads is None:
        cfg.threads = numba.config.NUMBA_NUM_THREADS
    return cfg


def _science(cfg: RunConfig, *keys) -> dict:
    d = asdict(cfg)
    return {k: d[k] for k in keys if k not in _NON_SCIENTIFIC}


def _outdir(cfg) -> Path:
    path = Path(cfg.output_dir)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _check_positive(**values):
    for name, v in values.items():
        if v is None or v < 1:
            raise UsageError(f"--{name.replace('_', '-')} must be a positive integer, got {v}")


def cmd_screen(args, cfg: RunConfig) -> int:
    _check_positive(d=cfg.d)
    data = dataio.load_dataset(args.data)
    if cfg.d > data.p:
        raise UsageError(f"--d {cfg.d} exceeds the number of features ({data.p})")
    method = Method.parse(cfg.method)
    scheme = KnotScheme.equally_spaced(cfg.knots)
    scores = screen_all(data, method, knots=scheme, threads=cfg.threads)
    selected = select_top(scores, cfg.d)
    prov = dataio.provenance_lines(
        "screen", {**_science(cfg, "method", "d", "knots"), "data": Path(args.data).name}
    )
    out = _outdir(cfg)
    rank = {int(j): r + 1 for r, j in enumerate(scores.ranking())}
    dataio.write_rows_csv(
        out / "scores.csv",
        ("feature", "index", "score", "rank", "selected"),
        (
            (name, j, float(scores.scores[j]), rank[j], int(j in selected))
            for j, name in enumerate(data.feature_names)
        ),
        prov,
    )
    dataio.write_json(
        out / "selected.json",
        {
            "provenance": prov,
            "method": method.value,
            "config_digest": scores.config_digest,
            "d": cfg.d,
            "indices": list(selected.indices),
            "features": [data.feature_names[j] for j in selected.indices],
            "warnings": scores.warnings,
        },
    )
    for w in scores.warnings:
        print(f"warning: {w}", file=sys.stderr)
    for j in scores.ranking()[: cfg.d]:
        print(f"{data.feature_names[j]}\t{float(scores.scores[j])!r}")
    return EXIT_OK


def cmd_simulate(args, cfg: RunConfig) -> int:
    model = cfg.model if str(cfg.model).lower() == simgen.TOY else int(cfg.model)
    p = 1 if model == simgen.TOY else cfg.p
    spec = simgen.ModelSpec(model, cfg.n, p, cfg.seed, beta=cfg.beta, model9_cov=cfg.model9_cov)
    inst = simgen.generate(spec)
    path = _outdir(cfg) / f"model{model}_seed{cfg.seed}.csv"
    conf = {"model": model, "n": cfg.n, "p": p, "seed": cfg.seed, "beta": cfg.beta, "model9_cov": cfg.model9_cov}
    prov = dataio.provenance_lines("simulate", conf)
    prov.append("true_set " + ",".join(str(j) for j in sorted(inst.true_set)))
    simgen.write_instance_csv(inst, path, prov)
    print(path)
    return EXIT_OK


def cmd_table1(args, cfg: RunConfig) -> int:
    if cfg.full:
        cfg.n, cfg.p, cfg.reps = bench_harness.FULL_N, bench_harness.FULL_P, bench_harness.FULL_REPS
    _check_positive(n=cfg.n, p=cfg.p, reps=cfg.reps)
    methods = [Method.parse(m) for m in cfg.methods]
    result = bench_harness.run_table1(
        cfg.models,
        methods,
        cfg.n,
        cfg.p,
        cfg.reps,
        cfg.seed,
        threads=cfg.threads,
        knots=KnotScheme.equally_spaced(cfg.knots),
        model9_cov=cfg.model9_cov,
    )
    prov = dataio.provenance_lines(
        "table1", _science(cfg, "models", "methods", "n", "p", "reps", "seed", "knots", "model9_cov")
    )
    paths = bench_harness.write_table1(result, _outdir(cfg), prov, timings=cfg.timings)
    print(result.format_table())
    for f in result.failures:
        print(f"failed: {f}", file=sys.stderr)
    print(f"wrote {', '.join(str(p) for p in paths.values())}")
    return EXIT_OK


def cmd_power(args, cfg: RunConfig) -> int:
    _check_positive(n=cfg.n, reps=cfg.reps, null_reps=cfg.null_reps)
    points = bench_harness.power_study(
        cfg.betas,
        cfg.alpha,
        cfg.n,
        cfg.reps,
        cfg.null_reps,
        [Method.parse(m) for m in cfg.methods],
        cfg.seed,
        threads=cfg.threads,
        knots=KnotScheme.equally_spaced(cfg.knots),
    )
    prov = dataio.provenance_lines(
        "power", _science(cfg, "alpha", "n", "reps", "null_reps", "betas", "methods", "knots", "seed")
    )
    path = _outdir(cfg) / "power.csv"
    bench_harness.write_power(points, path, prov)
    for p in points:
        print(f"{p.method:>4} beta={p.beta:<6g} power={p.power:.4f} (se {p.se:.4f})")
    print(f"wrote {path}")
    return EXIT_OK


def cmd_lemma_check(args, cfg: RunConfig) -> int:
    check = copula_oracle.check_grid(cfg.rhos, cfg.xs)
    print(f"{'rho':>6} {'x':>6} {'k(x)':>20} {'dk/drho':>20} {'finite diff':>20} {'rel resid':>10}")
    for rho, x, k, d, fd, resid in check.rows:
        print(f"{rho:6g} {x:6g} {k:20.15f} {d:20.15f} {fd:20.15f} {resid:10.2e}")
    if check.failures:
        print(f"FAILED: {check.failures[0]}", file=sys.stderr)
        return EXIT_CHECK
    print("all checks passed")
    return EXIT_OK


def cmd_sure_screening(args, cfg: RunConfig) -> int:
    _check_positive(p=cfg.p, d=cfg.d, reps=cfg.reps)
    points = bench_harness.sure_screening_experiment(
        cfg.rho, cfg.n_grid, cfg.p, cfg.d, cfg.reps, cfg.seed, threads=cfg.threads
    )
    prov = dataio.provenance_lines("sure-screening", _science(cfg, "rho", "n_grid", "p", "d", "reps", "seed"))
    path = _outdir(cfg) / "sure_screening.csv"
    bench_harness.write_sure_screening(points, path, prov)
    for pt in points:
        print(f"n={pt.n:<5} P(S* in top {cfg.d}) = {pt.probability:.3f} (se {pt.se:.3f})")
    print(f"wrote {path}")
    return EXIT_OK


COMMANDS = {
    "screen": cmd_screen,
    "simulate": cmd_simulate,
    "table1": cmd_table1,
    "power": cmd_power,
    "lemma-check": cmd_lemma_check,
    "sure-screening": cmd_sure_screening,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _resolve(args)
        return COMMANDS[args.command](args, cfg)
    except (UsageError, InvalidInputError) as exc:
        print(f"ckfscreen {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DatasetParseError, ScreeningError) as exc:
        print(f"ckfscreen {args.command}: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
