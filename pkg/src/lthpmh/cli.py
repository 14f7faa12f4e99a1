"""Command-line front end.

Usage examples::

    lthpmh solve --a 1 --op 1
    lthpmh trace --a 1 --op 0.8 --span 50 --stride 10 --output trace.csv
    lthpmh phase --a 1 --op 0.2 --format json
    lthpmh residual-scan --a 0.8 --op 0.8
    lthpmh table
    lthpmh sweep --a 1 --op 0.7 --vary alpha --values 0.4 0.6 0.8 1.0

Every command accepts ``--config FILE`` with flat ``key = value`` lines using
the long flag names (``h_low``, ``span``, ...); flags given on the command
line take precedence. Exit codes: 0 success, 2 invalid arguments, 3 domain or
integration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .errors import InvalidParameterError, LTHPMError
from .metrics import DEFAULT_SPAN, sweep
from .model import OscillatorParams
from .oracle import DEFAULT_DT, MAX_DT, extract_frequency, integrate
from .residual import DEFAULT_BRACKET, DEFAULT_Q, DEFAULT_SCAN_POINTS, optimize_h
from .series import build_solution, eval_displacement, eval_velocity

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DOMAIN = 3

# (amplitude, OP) pairs of the built-in h / rms table
TABLE_ROWS = (
    (0.2, 0.2),
    (0.2, 0.8),
    (0.2, 1.0),
    (0.8, 0.2),
    (0.8, 0.8),
    (0.8, 1.0),
    (1.0, 0.2),
    (1.0, 0.8),
    (1.0, 1.0),
)

PARAM_NAMES = ("alpha", "beta", "epsilon", "gamma")

_DEFAULTS = {
    "a": None,
    "op": 0.0,
    "alpha": None,
    "beta": None,
    "epsilon": None,
    "gamma": None,
    "lam": 1,
    "span": DEFAULT_SPAN,
    "dt": DEFAULT_DT,
    "q": DEFAULT_Q,
    "h_low": DEFAULT_BRACKET[0],
    "h_high": DEFAULT_BRACKET[1],
    "h": None,
    "tol": 1e-6,
    "points": DEFAULT_SCAN_POINTS,
    "stride": 10,
    "format": "csv",
    "output": "-",
    "workers": 1,
    "vary": None,
    "values": None,
    "rows": None,
}

_CONVERTERS = {
    "a": float,
    "op": float,
    "alpha": float,
    "beta": float,
    "epsilon": float,
    "gamma": float,
    "lam": int,
    "span": float,
    "dt": float,
    "q": int,
    "h_low": float,
    "h_high": float,
    "h": float,
    "tol": float,
    "points": int,
    "stride": int,
    "workers": int,
}


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    params: OscillatorParams | None
    span: float = DEFAULT_SPAN
    dt: float = DEFAULT_DT
    q: int = DEFAULT_Q
    h_bracket: tuple[float, float] = DEFAULT_BRACKET
    h_override: float | None = None
    tol: float = 1e-6
    points: int = DEFAULT_SCAN_POINTS
    stride: int = 10
    output_format: str = "csv"
    output_path: str = "-"
    workers: int = 1

    def __post_init__(self):
        if not (math.isfinite(self.span) and self.span > 0):
            raise InvalidParameterError(f"span must be > 0 (got {self.span})")
        if not (0 < self.dt <= MAX_DT):
            raise InvalidParameterError(f"dt must lie in (0, {MAX_DT}] (got {self.dt})")
        if not self.dt < self.span:
            raise InvalidParameterError("dt must be smaller than span")
        if self.q < 2:
            raise InvalidParameterError(f"q must be >= 2 (got {self.q})")
        lo, hi = self.h_bracket
        if not lo < hi:
            raise InvalidParameterError(f"h bracket must satisfy low < high (got {lo}, {hi})")
        if not self.tol > 0:
            raise InvalidParameterError("tol must be > 0")
        if self.points < 3:
            raise InvalidParameterError("points must be >= 3")
        if self.stride < 1:
            raise InvalidParameterError("stride must be >= 1")
        if self.h_override is not None and not math.isfinite(self.h_override):
            raise InvalidParameterError("h must be finite")
        if self.output_format not in ("csv", "json"):
            raise InvalidParameterError(f"unknown format {self.output_format!r}")
        if self.workers < 1:
            raise InvalidParameterError("workers must be >= 1")

    def echo(self) -> dict:
        out = {}
        if self.params is not None:
            out.update(self.params.as_dict())
        out.update(
            span=self.span,
            dt=self.dt,
            q=self.q,
            h_low=self.h_bracket[0],
            h_high=self.h_bracket[1],
            h=self.h_override,
            tol=self.tol,
        )
        return out


# --------------------------------------------------------------------------
# output

def _fmt_csv(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.10g}"
    if value is None:
        return ""
    return str(value)


def _json_clean(value):
    if isinstance(value, dict):
        return {k: _json_clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_clean(v) for v in value]
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, np.integer):
        return int(value)
    return value


@dataclass
class Document:
    """Everything a command emits, rendered only after all computation succeeds."""

    command: str
    config: dict
    columns: list[str] | None = None
    rows: list[list] | None = None
    results: dict | None = None
    diagnostics: dict = field(default_factory=dict)

    def render(self, fmt: str) -> str:
        if fmt == "json":
            if self.rows is not None:
                results = {"columns": self.columns, "rows": self.rows}
            else:
                results = self.results
            obj = {
                "command": self.command,
                "config": self.config,
                "results": results,
                "diagnostics": self.diagnostics,
            }
            return json.dumps(_json_clean(obj), indent=2) + "\n"
        buf = io.StringIO()
        buf.write(f"# command: {self.command}\n")
        for key, value in self.config.items():
            buf.write(f"# {key}: {_fmt_csv(value)}\n")
        for key, value in self.diagnostics.items():
            buf.write(f"# {key}: {_fmt_csv(value)}\n")
        if self.rows is not None:
            columns, rows = self.columns, self.rows
        else:
            columns, rows = list(self.results), [list(self.results.values())]
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        writer.writerows([_fmt_csv(v) for v in row] for row in rows)
        return buf.getvalue()


def _write(text: str, path: str):
    if path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


# --------------------------------------------------------------------------
# commands

def _tuned_solution(cfg: RunConfig):
    p = cfg.params
    profile = None
    if cfg.h_override is None:
        profile = optimize_h(p, cfg.h_bracket, cfg.tol, cfg.q, cfg.points)
        h = profile.h_star
    else:
        h = cfg.h_override
    return build_solution(p, h), profile


def _profile_diagnostics(profile):
    if profile is None:
        return {"h_source": "override"}
    return {
        "h_source": "residual-minimum",
        "e_star": profile.e_star,
        "at_boundary": profile.at_boundary,
    }


def cmd_solve(cfg: RunConfig) -> Document:
    sol, profile = _tuned_solution(cfg)
    ex = sol.expansion
    results = {
        "lambda0": ex.lambda0,
        "lambda1": ex.lambda1,
        "h": sol.h,
        "omega0": ex.omega0,
        "omega": ex.omega,
        "c13": sol.c13,
        "c15": sol.c15,
    }
    return Document("solve", cfg.echo(), results=results, diagnostics=_profile_diagnostics(profile))


def cmd_trace(cfg: RunConfig) -> Document:
    sol, profile = _tuned_solution(cfg)
    traj = integrate(cfg.params, cfg.span, cfg.dt)
    idx = np.arange(0, len(traj), cfg.stride)
    t = traj.t[idx]
    x_rk4 = traj.x[idx]
    x_l = eval_displacement(sol, t)
    dev = x_rk4 - x_l
    rows = [list(r) for r in zip(t.tolist(), x_rk4.tolist(), x_l.tolist(), dev.tolist())]
    diag = _profile_diagnostics(profile)
    diag.update(h=sol.h, omega=sol.omega, max_abs_deviation=float(np.max(np.abs(dev))))
    return Document(
        "trace",
        dict(cfg.echo(), stride=cfg.stride),
        columns=["t", "x_rk4", "x_lthpm", "deviation"],
        rows=rows,
        diagnostics=diag,
    )


def phase_curves(cfg: RunConfig):
    """(t, x_rk4, v_rk4, x_lthpm, v_lthpm) over exactly one analytic period, plus diagnostics."""
    p = cfg.params
    sol, profile = _tuned_solution(cfg)
    period = sol.period
    n = max(1, math.ceil(period / cfg.dt - 1e-9))
    dt = period / n
    traj = integrate(p, period, dt)
    idx = list(range(0, n + 1, cfg.stride))
    if idx[-1] != n:
        idx.append(n)
    idx = np.array(idx)
    t = idx * dt
    x_rk4, v_rk4 = traj.x[idx], traj.v[idx]
    x_l, v_l = eval_displacement(sol, t), eval_velocity(sol, t)

    # closure of the reference orbit over its own measured period
    long_run = integrate(p, max(cfg.span, 4.0 * period), cfg.dt)
    w_rk4 = extract_frequency(long_run)
    period_rk4 = 2.0 * math.pi / w_rk4
    m = max(1, math.ceil(period_rk4 / cfg.dt - 1e-9))
    closing = integrate(p, period_rk4, period_rk4 / m)
    diag = _profile_diagnostics(profile)
    diag.update(
        h=sol.h,
        omega=sol.omega,
        omega_rk4=w_rk4,
        period_lthpm=period,
        period_rk4=period_rk4,
        closure_gap_lthpm=math.hypot(x_l[-1] - x_l[0], v_l[-1] - v_l[0]),
        closure_gap_rk4=math.hypot(closing.x[-1] - p.amplitude, closing.v[-1]),
        center_x_lthpm=0.5 * (float(x_l.max()) + float(x_l.min())),
        center_v_lthpm=0.5 * (float(v_l.max()) + float(v_l.min())),
        center_x_rk4=0.5 * (float(closing.x.max()) + float(closing.x.min())),
        center_v_rk4=0.5 * (float(closing.v.max()) + float(closing.v.min())),
        max_pointwise_gap=float(np.max(np.hypot(x_rk4 - x_l, v_rk4 - v_l))),
    )
    return t, x_rk4, v_rk4, x_l, v_l, diag


def cmd_phase(cfg: RunConfig) -> Document:
    t, x_rk4, v_rk4, x_l, v_l, diag = phase_curves(cfg)
    rows = [list(r) for r in zip(t.tolist(), x_rk4.tolist(), v_rk4.tolist(), x_l.tolist(), v_l.tolist())]
    return Document(
        "phase",
        dict(cfg.echo(), stride=cfg.stride),
        columns=["t", "x_rk4", "v_rk4", "x_lthpm", "v_lthpm"],
        rows=rows,
        diagnostics=diag,
    )


def cmd_residual_scan(cfg: RunConfig) -> Document:
    profile = optimize_h(cfg.params, cfg.h_bracket, cfg.tol, cfg.q, cfg.points)
    rows = [["scan", h, e] for h, e in zip(profile.h_grid, profile.e_values)]
    rows.append(["h_star", profile.h_star, profile.e_star])
    return Document(
        "residual-scan",
        dict(cfg.echo(), points=cfg.points),
        columns=["kind", "h", "E"],
        rows=rows,
        diagnostics={"at_boundary": profile.at_boundary},
    )


def _sweep_rows(results):
    rows = []
    for r in results:
        p = r.params
        rows.append(
            [p.amplitude, p.alpha, p.beta, p.epsilon, p.gamma, r.h_star, r.omega0, r.omega,
             r.omega_rk4, r.rms, r.max_abs, "ok" if r.ok else r.error]
        )
    return rows


def cmd_table(cfg: RunConfig, pairs=TABLE_ROWS) -> Document:
    grid = []
    for a, op in pairs:
        grid.append(OscillatorParams.with_op(a, op))
    results = sweep(
        grid, span=cfg.span, dt=cfg.dt, workers=cfg.workers,
        q=cfg.q, bracket=cfg.h_bracket, tol=cfg.tol, h=cfg.h_override,
    )
    rows = [
        [a, op, r.h_star, r.rms, "ok" if r.ok else r.error]
        for (a, op), r in zip(pairs, results)
    ]
    return Document(
        "table",
        cfg.echo(),
        columns=["a", "op", "h_star", "rms_lthpm", "status"],
        rows=rows,
        diagnostics={"rows_ok": sum(r.ok for r in results)},
    )


def cmd_sweep(cfg: RunConfig, vary: str, values) -> Document:
    base = cfg.params
    grid = []
    for v in values:
        if vary == "a":
            grid.append(base.evolve(amplitude=v))
        elif vary == "op":
            grid.append(base.evolve(alpha=v, beta=v, epsilon=v, gamma=v))
        else:
            grid.append(base.evolve(**{vary: v}))
    results = sweep(
        grid, span=cfg.span, dt=cfg.dt, workers=cfg.workers,
        q=cfg.q, bracket=cfg.h_bracket, tol=cfg.tol, h=cfg.h_override,
    )
    return Document(
        "sweep",
        dict(cfg.echo(), vary=vary),
        columns=["a", "alpha", "beta", "epsilon", "gamma", "h_star", "omega0", "omega",
                 "omega_rk4", "rms", "max_abs", "status"],
        rows=_sweep_rows(results),
        diagnostics={"rows_ok": sum(r.ok for r in results)},
    )


# --------------------------------------------------------------------------
# argument handling

def read_config_file(path) -> dict:
    out = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key == "lambda":
            key = "lam"
        if key not in _DEFAULTS or key in ("values", "rows"):
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = value
    return out


def _add_common(sp: argparse.ArgumentParser, needs_params=True):
    g = sp.add_argument_group("oscillator")
    if needs_params:
        g.add_argument("--a", "--amplitude", dest="a", type=float, help="initial amplitude a (> 0)")
        g.add_argument("--op", type=float, help="set alpha = beta = epsilon = gamma to this value")
        for name in PARAM_NAMES:
            g.add_argument(f"--{name}", type=float, help=f"override {name}")
        g.add_argument("--lambda", dest="lam", type=int, help="linear stiffness sign (only 1 is solvable)")
    g = sp.add_argument_group("numerics")
    g.add_argument("--span", type=float, help=f"RK4 integration span (default {DEFAULT_SPAN})")
    g.add_argument("--dt", type=float, help=f"RK4 step (default {DEFAULT_DT})")
    g.add_argument("--q", type=int, help=f"residual grid intervals (default {DEFAULT_Q})")
    g.add_argument("--h-low", dest="h_low", type=float, help="lower end of the h bracket")
    g.add_argument("--h-high", dest="h_high", type=float, help="upper end of the h bracket")
    g.add_argument("--h", type=float, help="use this h instead of tuning it")
    g.add_argument("--tol", type=float, help="tolerance on the tuned h (default 1e-6)")
    g.add_argument("--points", type=int, help="coarse scan points over the bracket (default 61)")
    g.add_argument("--stride", type=int, help="emit every n-th step (trace/phase, default 10)")
    g.add_argument("--workers", type=int, help="processes for sweep rows (default 1)")
    g = sp.add_argument_group("output")
    g.add_argument("--format", choices=("csv", "json"), help="output format (default csv)")
    g.add_argument("--output", "-o", help="output file (default stdout)")
    g.add_argument("--config", help="flat key = value file; command-line flags win")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lthpmh",
        description="Homotopy series with tuned convergence control for the autonomous conservative oscillator.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    _add_common(sub.add_parser("solve", help="tune h and print frequency and series coefficients"))
    _add_common(sub.add_parser("trace", help="displacement of series and RK4 versus time"))
    _add_common(sub.add_parser("phase", help="phase curves (x, v) over one period"))
    _add_common(sub.add_parser("residual-scan", help="averaged square residual over the h bracket"))
    sp = sub.add_parser("table", help="h and rms error for the built-in nine parameter sets")
    _add_common(sp, needs_params=False)
    sp.add_argument("--rows", nargs="+", metavar="A:OP", help="custom (a, OP) pairs instead of the built-in set")
    sp = sub.add_parser("sweep", help="vary one parameter and report all metrics per value")
    _add_common(sp)
    sp.add_argument("--vary", choices=("a", "op") + PARAM_NAMES, help="parameter to vary")
    sp.add_argument("--values", nargs="+", type=float, help="values taken by the varied parameter")
    return parser


def _merge(ns: argparse.Namespace) -> dict:
    merged = dict(_DEFAULTS)
    if getattr(ns, "config", None):
        try:
            from_file = read_config_file(ns.config)
        except OSError as exc:
            raise UsageError(f"cannot read config file: {exc}") from exc
        for key, value in from_file.items():
            conv = _CONVERTERS.get(key)
            try:
                merged[key] = conv(value) if conv else value
            except ValueError as exc:
                raise UsageError(f"config key {key!r}: {exc}") from exc
    for key in _DEFAULTS:
        value = getattr(ns, key, None)
        if value is not None:
            merged[key] = value
    return merged


def _make_config(command: str, m: dict) -> RunConfig:
    params = None
    if command != "table":
        if m["a"] is None:
            raise UsageError("--a is required")
        params = OscillatorParams.with_op(
            m["a"], m["op"], lam=m["lam"], **{k: m[k] for k in PARAM_NAMES}
        )
    return RunConfig(
        params=params,
        span=m["span"],
        dt=m["dt"],
        q=m["q"],
        h_bracket=(m["h_low"], m["h_high"]),
        h_override=m["h"],
        tol=m["tol"],
        points=m["points"],
        stride=m["stride"],
        output_format=m["format"],
        output_path=m["output"],
        workers=m["workers"],
    )


def _parse_pairs(items):
    pairs = []
    for item in items:
        try:
            a, op = item.split(":")
            pairs.append((float(a), float(op)))
        except ValueError:
            raise UsageError(f"row {item!r} is not of the form A:OP") from None
    return tuple(pairs)


def run(argv=None) -> tuple[int, Document, RunConfig]:
    parser = build_parser()
    ns = parser.parse_args(argv)
    merged = _merge(ns)
    cfg = _make_config(ns.command, merged)
    if ns.command == "solve":
        doc = cmd_solve(cfg)
    elif ns.command == "trace":
        doc = cmd_trace(cfg)
    elif ns.command == "phase":
        doc = cmd_phase(cfg)
    elif ns.command == "residual-scan":
        doc = cmd_residual_scan(cfg)
    elif ns.command == "table":
        pairs = _parse_pairs(merged["rows"]) if merged["rows"] else TABLE_ROWS
        for a, op in pairs:
            OscillatorParams.with_op(a, op)
        doc = cmd_table(cfg, pairs)
        if doc.diagnostics["rows_ok"] == 0:
            return EXIT_DOMAIN, doc, cfg
    else:
        if not merged["vary"] or not merged["values"]:
            raise UsageError("sweep needs --vary and --values")
        doc = cmd_sweep(cfg, merged["vary"], merged["values"])
    return EXIT_OK, doc, cfg


def main(argv=None) -> int:
    try:
        status, doc, cfg = run(argv)
    except (UsageError, InvalidParameterError) as exc:
        print(f"lthpmh: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except LTHPMError as exc:
        print(f"lthpmh: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        _write(doc.render(cfg.output_format), cfg.output_path)
    except OSError as exc:
        print(f"lthpmh: error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return status


if __name__ == "__main__":
    raise SystemExit(main())
