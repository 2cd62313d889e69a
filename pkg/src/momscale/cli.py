"""Command-line entry point.

    momscale moments --input prices.csv --orders 4,6,8,10,12
    momscale scaling --input prices.csv --pair 4,6 --min-window 25
    momscale garch   --seed 7 --T 4536
    momscale var     --input garch_returns.csv --confidence 0.9
    momscale tail    --gamma1 4.5 --gamma2 3.5 --sample 100000

Settings resolve as command-line flags > ``--config`` JSON file > defaults.
Each output file starts with the resolved configuration: a ``#`` comment
line in CSV files, a ``config`` key in JSON files.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .errors import MomScaleError
from .garch import GarchSpec, MixtureSpec, simulate
from .moments import moment_profile, ratio_rows, records_to_csv, records_to_json, rows_to_csv
from .scaling import LogLogPoint, fit_line, fit_report, fit_two_regimes, loglog_points, plot_csv
from .series import WindowPlan, load_series, write_returns_csv
from .tail import (
    TailSpec,
    curve_to_csv,
    curve_rows,
    gamma_curve,
    n_for_cutoff,
    normalize,
    predicted_exponents,
    sample_tail_series,
)
from .var import curve_to_csv as var_curve_csv, curve_to_json as var_curve_json, turning_points, var_curve

COMMANDS = ("moments", "scaling", "garch", "var", "tail")
_PLAN = ("input", "start_fraction", "step_fraction", "anchor", "min_length", "min_window")
# fields echoed into each command's outputs; output location is deliberately left out
ECHO_FIELDS = {
    "moments": ("format", *_PLAN, "orders"),
    "scaling": ("format", *_PLAN, "pair", "min_segment"),
    "garch": ("format", "alpha0", "alpha1", "beta1", "a", "b", "var1", "var2", "burn_in", "init_var", "T", "seed"),
    "var": ("format", *_PLAN, "confidence"),
    "tail": ("format", "x0", "x1", "gamma1", "gamma2", "C", "n_min", "n_max", "n_points", "sample", "seed"),
}


class InvariantViolation(MomScaleError):
    pass


@dataclass
class RunConfig:
    command: str = "moments"
    input: str | None = None
    out_dir: str = "."
    format: str = "csv"
    # window plan
    start_fraction: float = 0.01
    step_fraction: float = 0.001
    anchor: str = "series_start"
    min_length: int = 2
    min_window: int = 2
    # moments / scaling / var
    orders: list[int] = field(default_factory=lambda: [4, 6])
    pair: list[int] = field(default_factory=lambda: [4, 6])
    min_segment: int = 10
    confidence: float = 0.90
    # garch
    alpha0: float = 1e-5
    alpha1: float = 0.5
    beta1: float = 0.0
    a: float = 0.9818
    b: float = 0.0182
    var1: float = 0.833
    var2: float = 9.986
    burn_in: int = 500
    init_var: float | str = "unconditional"
    T: int = 4536
    seed: int = 0
    # tail
    x0: float = 1e-3
    x1: float = 1e-1
    gamma1: float = 4.5
    gamma2: float = 3.5
    C: float = 1.0
    n_min: float = 1.0
    n_max: float = 1e12
    n_points: int = 241
    sample: int = 0
    error_json: bool = False
    config: str | None = None

    def plan(self) -> WindowPlan:
        return WindowPlan(self.start_fraction, self.step_fraction, self.anchor, self.min_length)

    def garch(self) -> tuple[GarchSpec, MixtureSpec]:
        return (GarchSpec(self.alpha0, self.alpha1, self.beta1, self.burn_in, self.init_var),
                MixtureSpec(self.a, self.b, self.var1, self.var2))

    def tail(self) -> TailSpec:
        return TailSpec(self.x0, self.x1, self.gamma1, self.gamma2, self.C)

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise MomScaleError(f"unknown command {self.command!r}")
        if self.format not in ("csv", "json"):
            raise MomScaleError(f"format must be csv or json, got {self.format!r}")
        if self.command in ("moments", "scaling", "var") and not self.input:
            raise MomScaleError(f"{self.command} needs --input")
        if self.command in ("moments", "scaling", "var"):
            self.plan()
        if self.command == "garch":
            self.garch()
            if self.T < 1:
                raise MomScaleError("T must be >= 1")
        if self.command == "tail":
            self.tail()
            if not (0 < self.n_min < self.n_max) or self.n_points < 2:
                raise MomScaleError("need 0 < n_min < n_max and n_points >= 2")
        if not 0 < self.confidence < 1:
            raise MomScaleError("confidence must be in (0, 1)")
        if len(self.pair) != 2:
            raise MomScaleError("pair must have two orders, e.g. 4,6")

    def echo(self) -> dict:
        d = asdict(self)
        return {"command": self.command, **{k: d[k] for k in ECHO_FIELDS[self.command]}}

    def comment(self) -> str:
        return f"momscale {__version__} config: " + json.dumps(self.echo(), sort_keys=True)


def _int_list(text: str) -> list[int]:
    return [int(t) for t in str(text).replace(" ", "").split(",") if t]


def _init_var(text: str):
    return text if text == "unconditional" else float(text)


def build_parser() -> argparse.ArgumentParser:
    S = argparse.SUPPRESS
    common = argparse.ArgumentParser(add_help=False, argument_default=S)
    common.add_argument("--config", help="JSON file with RunConfig fields")
    common.add_argument("--out-dir", dest="out_dir", help="output directory (default: current)")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--seed", type=int)
    common.add_argument("--error-json", dest="error_json", action="store_true",
                        help="print failures as a JSON document on stdout")

    plan = argparse.ArgumentParser(add_help=False, argument_default=S)
    plan.add_argument("--input", help="CSV with date,close or date,log_return")
    plan.add_argument("--start-fraction", dest="start_fraction", type=float)
    plan.add_argument("--step-fraction", dest="step_fraction", type=float)
    plan.add_argument("--anchor", choices=("series_start", "series_end"))
    plan.add_argument("--min-length", dest="min_length", type=int, help="smallest admissible first window")
    plan.add_argument("--min-window", dest="min_window", type=int, help="exclude shorter windows from fits")

    p = argparse.ArgumentParser(prog="momscale", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    m = sub.add_parser("moments", parents=[common, plan], argument_default=S,
                       help="standardised moments and gaussian ratios per window")
    m.add_argument("--orders", type=_int_list, help="even orders, e.g. 4,6,8,10,12")

    s = sub.add_parser("scaling", parents=[common, plan], argument_default=S,
                       help="two-regime log-log scaling fit")
    s.add_argument("--pair", type=_int_list, help="moment pair, 4,6 or 4,8")
    s.add_argument("--min-segment", dest="min_segment", type=int)

    g = sub.add_parser("garch", parents=[common], argument_default=S,
                       help="simulate a GARCH-double-normal(1,1) series")
    for name in ("alpha0", "alpha1", "beta1", "a", "b", "var1", "var2"):
        g.add_argument(f"--{name}", type=float)
    g.add_argument("--burn-in", dest="burn_in", type=int)
    g.add_argument("--init-var", dest="init_var", type=_init_var)
    g.add_argument("--T", "--steps", dest="T", type=int)

    v = sub.add_parser("var", parents=[common, plan], argument_default=S,
                       help="historical VaR against window length")
    v.add_argument("--confidence", type=float)

    t = sub.add_parser("tail", parents=[common], argument_default=S,
                       help="Pareto-tail hierarchy curve, exponents and samples")
    for name in ("x0", "x1", "gamma1", "gamma2", "C", "n_min", "n_max"):
        t.add_argument(f"--{name.replace('_', '-')}", dest=name, type=float)
    t.add_argument("--n-points", dest="n_points", type=int)
    t.add_argument("--sample", type=int, help="also write this many sampled returns")
    return p


def resolve_config(argv: Sequence[str] | None) -> RunConfig:
    args = vars(build_parser().parse_args(argv))
    merged: dict = {}
    if args.get("config"):
        with open(args["config"], encoding="utf-8") as fh:
            merged.update(json.load(fh))
    merged.update(args)
    known = {f.name for f in fields(RunConfig)}
    unknown = set(merged) - known
    if unknown:
        raise MomScaleError(f"unknown config fields: {sorted(unknown)}")
    for key in ("orders", "pair"):
        if isinstance(merged.get(key), str):
            merged[key] = _int_list(merged[key])
    cfg = RunConfig(**merged)
    cfg.validate()
    return cfg


# -- commands --------------------------------------------------------------

def _write(path: Path, text: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return path


def _json_doc(cfg: RunConfig, **payload) -> str:
    return json.dumps({"config": cfg.echo(), **payload}, indent=1, allow_nan=False) + "\n"


def _check_moments(records) -> None:
    for r in records:
        if r.degenerate:
            continue
        g = r.gamma
        if g[2] != 1.0:
            raise InvariantViolation(f"Gamma_2 = {g[2]!r} != 1 at N={r.N}")
        if 4 in g and g[4] < 1 - 1e-9:
            raise InvariantViolation(f"Gamma_4 < 1 at N={r.N}")
        if 4 in g and 6 in g and g[6] < g[4] ** 1.5 * (1 - 1e-9):
            raise InvariantViolation(f"Gamma_6 < Gamma_4^1.5 at N={r.N}")


def cmd_moments(cfg: RunConfig) -> list[Path]:
    series = load_series(cfg.input)
    orders = sorted(set(cfg.orders))
    records = moment_profile(series, cfg.plan(), orders)
    _check_moments(records)
    out = Path(cfg.out_dir)
    ratios = ratio_rows(records, orders)
    if cfg.format == "json":
        return [
            _write(out / "moments.json", records_to_json(records, orders, cfg.echo()) + "\n"),
            _write(out / "ratios.json", _json_doc(cfg, ratios=ratios)),
        ]
    cols = ["t0", "N", *(f"R_{n}" for n in orders), "flag"]
    return [
        _write(out / "moments.csv", records_to_csv(records, orders, cfg.comment())),
        _write(out / "ratios.csv", rows_to_csv(ratios, cols, cfg.comment())),
    ]


def cmd_scaling(cfg: RunConfig) -> list[Path]:
    series = load_series(cfg.input)
    pair = (cfg.pair[0], cfg.pair[1])
    records = moment_profile(series, cfg.plan(), sorted(set(pair)))
    points, excluded = loglog_points(records, pair, cfg.min_window)
    fit = fit_two_regimes(points, cfg.min_segment)
    single = fit_line(points)
    if fit.total_sse > single.sse:
        raise InvariantViolation("two-regime SSE exceeds single-line SSE")
    report = fit_report(fit, pair, excluded, single)
    if not fit.distinguishable:
        print(f"warning: short and long regimes are statistically indistinguishable "
              f"(B_short={fit.short_line.B:.3f}, B_long={fit.long_line.B:.3f}, z={fit.slope_z:.2f})",
              file=sys.stderr)
    out = Path(cfg.out_dir)
    return [
        _write(out / "scaling_fit.json", _json_doc(cfg, fit=report)),
        _write(out / "scaling_plot.csv", plot_csv(points, fit, cfg.comment())),
    ]


def cmd_garch(cfg: RunConfig) -> list[Path]:
    g, m = cfg.garch()
    series = simulate(g, m, cfg.T, cfg.seed)
    out = Path(cfg.out_dir)
    if cfg.format == "json":
        rows = [{"date": str(d), "log_return": float(x)} for d, x in zip(series.dates, series.values)]
        return [_write(out / "garch_returns.json", _json_doc(cfg, returns=rows))]
    path = out / "garch_returns.csv"
    path.parent.mkdir(parents=True, exist_ok=True)
    write_returns_csv(series, path, cfg.comment())
    return [path]


def cmd_var(cfg: RunConfig) -> list[Path]:
    series = load_series(cfg.input)
    curve = var_curve(series, cfg.plan(), cfg.confidence)
    out = Path(cfg.out_dir)
    if cfg.format == "json":
        doc = json.loads(var_curve_json(curve, cfg.echo()))
        doc["turning_points"] = [{"N": n, "kind": k} for n, k in turning_points(curve)]
        return [_write(out / "var_curve.json", json.dumps(doc, indent=1) + "\n")]
    return [_write(out / "var_curve.csv", var_curve_csv(curve, cfg.comment()))]


def cmd_tail(cfg: RunConfig) -> list[Path]:
    spec = normalize(cfg.tail())
    Ns = np.geomspace(cfg.n_min, cfg.n_max, cfg.n_points)
    Ns = Ns[spec.C < 2 * Ns]
    curve = gamma_curve(spec, Ns)
    pred = predicted_exponents(spec)
    points = [LogLogPoint(i, math.log(c.gamma4), math.log(c.gamma6)) for i, c in enumerate(curve)]
    report = {
        "spec": json.loads(spec.to_json()),
        "A": spec.A,
        "exponent_short": pred.exponent_short,
        "exponent_long": pred.exponent_long,
        "N_at_x1": n_for_cutoff(spec, spec.x1),
    }
    if len(points) >= 2 * 10:
        fit = fit_two_regimes(points, 10)
        pred = pred.with_prefactors(fit)
        report.update(fitted_short=fit.short_line.B, fitted_long=fit.long_line.B,
                      prefactor_short=pred.prefactor_short, prefactor_long=pred.prefactor_long,
                      split_N=float(curve[fit.split_index].N))
    out = Path(cfg.out_dir)
    paths = [_write(out / "tail_report.json", _json_doc(cfg, report=report))]
    if cfg.format == "json":
        paths.append(_write(out / "tail_curve.json", _json_doc(cfg, curve=curve_rows(curve))))
    else:
        paths.append(_write(out / "tail_curve.csv", curve_to_csv(curve, cfg.comment())))
    if cfg.sample > 0:
        series = sample_tail_series(spec, cfg.sample, cfg.seed)
        path = out / "tail_sample.csv"
        write_returns_csv(series, path, cfg.comment())
        paths.append(path)
    return paths


COMMAND_FUNCS = {"moments": cmd_moments, "scaling": cmd_scaling, "garch": cmd_garch,
                 "var": cmd_var, "tail": cmd_tail}


def run(cfg: RunConfig) -> list[Path]:
    return COMMAND_FUNCS[cfg.command](cfg)


def _error_doc(exc: BaseException) -> dict:
    doc = {"error": type(exc).__name__, "message": str(exc)}
    row = getattr(exc, "row", None)
    if row is not None:
        doc["row"] = row
    return doc


def main(argv: Sequence[str] | None = None) -> int:
    want_json = "--error-json" in (sys.argv[1:] if argv is None else argv)
    try:
        cfg = resolve_config(argv)
        want_json = want_json or cfg.error_json
        for path in run(cfg):
            print(path)
    except (MomScaleError, FileNotFoundError, json.JSONDecodeError) as exc:
        if want_json:
            print(json.dumps(_error_doc(exc)))
        else:
            print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
