"""Error metrics against the RK4 reference and multi-parameter sweeps."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, LTHPMError
from .model import OscillatorParams
from .oracle import DEFAULT_DT, Trajectory, extract_frequency, integrate
from .residual import DEFAULT_BRACKET, DEFAULT_Q, optimize_h
from .series import SeriesSolution, build_solution, eval_displacement, omega0

__all__ = [
    "DEFAULT_SPAN",
    "ErrorReport",
    "SweepRow",
    "rms_error",
    "percent_frequency_error",
    "evaluate",
    "sweep",
]

DEFAULT_SPAN = 50.0


@dataclass(frozen=True)
class ErrorReport:
    n_points: int
    rms: float
    max_abs: float
    pointwise: tuple | None = None


def rms_error(oracle: Trajectory, approx: SeriesSolution, keep_pointwise: bool = False) -> ErrorReport:
    """Root-mean-square of x_rk4(t_i) - x_series(t_i) over every oracle sample."""
    n = len(oracle)
    if n == 0:
        raise DomainError("empty trajectory")
    t = oracle.t
    dev = oracle.x - eval_displacement(approx, t)
    rms = math.sqrt(float(np.dot(dev, dev)) / n)
    pointwise = tuple(zip(t.tolist(), dev.tolist())) if keep_pointwise else None
    return ErrorReport(n, rms, float(np.max(np.abs(dev))), pointwise)


def percent_frequency_error(omega_approx: float, omega_oracle: float) -> float:
    if not omega_oracle > 0.0:
        raise DomainError(f"oracle frequency must be positive (got {omega_oracle!r})")
    return 100.0 * abs(omega_oracle - omega_approx) / omega_oracle


@dataclass(frozen=True)
class SweepRow:
    """One parameter set of a sweep. Failed rows carry ``error`` and NaN metrics."""

    params: OscillatorParams
    h_star: float = math.nan
    omega0: float = math.nan
    omega: float = math.nan
    omega_rk4: float = math.nan
    rms: float = math.nan
    max_abs: float = math.nan
    at_boundary: bool = False
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


def evaluate(
    p: OscillatorParams,
    span: float = DEFAULT_SPAN,
    dt: float = DEFAULT_DT,
    q: int = DEFAULT_Q,
    bracket=DEFAULT_BRACKET,
    tol: float = 1e-6,
    h: float | None = None,
) -> SweepRow:
    """Tune h (unless given), build the series, integrate RK4 and compare."""
    try:
        profile = None
        if h is None:
            profile = optimize_h(p, bracket, tol, q)
            h = profile.h_star
        sol = build_solution(p, h)
        traj = integrate(p, span, dt)
        report = rms_error(traj, sol)
        try:
            w_rk4 = extract_frequency(traj)
        except LTHPMError:
            w_rk4 = math.nan
        return SweepRow(
            params=p,
            h_star=float(h),
            omega0=omega0(p),
            omega=sol.omega,
            omega_rk4=w_rk4,
            rms=report.rms,
            max_abs=report.max_abs,
            at_boundary=bool(profile and profile.at_boundary),
        )
    except LTHPMError as exc:
        return SweepRow(params=p, error=f"{type(exc).__name__}: {exc}")


def _evaluate_star(args):
    p, kwargs = args
    return evaluate(p, **kwargs)


def sweep(grid, span=DEFAULT_SPAN, dt=DEFAULT_DT, workers: int = 1, **kwargs) -> list[SweepRow]:
    """Evaluate every parameter set; rows come back in input order.

    With ``workers > 1`` rows run in separate processes.
    """
    grid = list(grid)
    if not grid:
        raise DomainError("sweep grid is empty")
    kwargs = dict(kwargs, span=span, dt=dt)
    if workers <= 1:
        return [evaluate(p, **kwargs) for p in grid]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_evaluate_star, [(p, kwargs) for p in grid]))
