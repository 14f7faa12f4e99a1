"""Choice of the convergence-control parameter h.

The truncated series is substituted back into the rescaled equation and the
squared defect is averaged over one period on the grid tau_k = 2 k pi / q,
k = 0..q (both endpoints kept, so the mean divides by q + 1). The tuned h is
the minimiser of that average, found by a coarse scan and a golden-section
refinement around the best scanned point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InvalidParameterError
from .model import OscillatorParams, defect
from .series import SeriesSolution, build_solution, eval_in_tau, lambda0

__all__ = [
    "DEFAULT_BRACKET",
    "ResidualProfile",
    "residual_delta",
    "averaged_square_residual",
    "golden_section",
    "optimize_h",
]

DEFAULT_Q = 50
DEFAULT_BRACKET = (1e-6, 1.5)
DEFAULT_SCAN_POINTS = 61

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def residual_delta(p: OscillatorParams, sol: SeriesSolution, tau):
    """Defect of the rescaled equation for the partial sum, at ``tau`` (scalar or array)."""
    x, dx, d2x = eval_in_tau(sol, tau)
    return defect(p, x, dx, d2x, stiffness_scale=sol.expansion.total)


def _tau_grid(q: int) -> np.ndarray:
    if q < 2:
        raise InvalidParameterError(f"q must be >= 2 (got {q})")
    return 2.0 * math.pi * np.arange(q + 1) / q


def averaged_square_residual(p: OscillatorParams, h: float, q: int = DEFAULT_Q) -> float:
    sol = build_solution(p, h)
    delta = residual_delta(p, sol, _tau_grid(q))
    return float(np.sum(delta * delta) / (q + 1))


def golden_section(f, lo, hi, tol):
    """Golden-section search for a minimum of ``f`` on [lo, hi].

    Returns ``(x, fx)`` with ``x`` the midpoint of a final interval no wider
    than ``tol``.
    """
    a, b = lo, hi
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


@dataclass(frozen=True)
class ResidualProfile:
    """Scanned residual landscape and its refined minimiser.

    ``at_boundary`` is set when the best scanned point is a bracket endpoint,
    meaning no interior minimum was found and ``h_star`` is just the edge.
    Scan points where the frequency is not real hold ``inf``.
    """

    order: int
    q: int
    h_grid: tuple[float, ...]
    e_values: tuple[float, ...]
    h_star: float
    e_star: float
    at_boundary: bool = False
    bracket: tuple[float, float] = field(default=DEFAULT_BRACKET)

    @property
    def has_interior_minimum(self) -> bool:
        return not self.at_boundary


def optimize_h(
    p: OscillatorParams,
    bracket=DEFAULT_BRACKET,
    tol: float = 1e-6,
    q: int = DEFAULT_Q,
    scan_points: int = DEFAULT_SCAN_POINTS,
) -> ResidualProfile:
    lo, hi = (float(bracket[0]), float(bracket[1]))
    if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
        raise InvalidParameterError(f"bracket must satisfy low < high (got {bracket!r})")
    if not tol > 0.0:
        raise InvalidParameterError(f"tol must be > 0 (got {tol!r})")
    if scan_points < 3:
        raise InvalidParameterError(f"scan_points must be >= 3 (got {scan_points})")
    _tau_grid(q)
    # regime errors are h-independent and must not be mistaken for a non-real frequency
    lambda0(p)

    def energy_of(h):
        # h values giving a non-real frequency are excluded from the search
        try:
            return averaged_square_residual(p, h, q)
        except DomainError:
            return math.inf

    grid = np.linspace(lo, hi, scan_points)
    values = np.array([energy_of(h) for h in grid])
    if not np.isfinite(values).any():
        raise DomainError(f"no h in [{lo}, {hi}] gives a real frequency")
    k = int(np.argmin(values))
    at_boundary = k in (0, scan_points - 1)
    if at_boundary:
        h_star, e_star = float(grid[k]), float(values[k])
    else:
        h_star, e_star = golden_section(energy_of, float(grid[k - 1]), float(grid[k + 1]), tol)
        if e_star > values[k]:
            h_star, e_star = float(grid[k]), float(values[k])
    return ResidualProfile(
        order=1,
        q=q,
        h_grid=tuple(float(h) for h in grid),
        e_values=tuple(float(e) for e in values),
        h_star=h_star,
        e_star=e_star,
        at_boundary=at_boundary,
        bracket=(lo, hi),
    )
