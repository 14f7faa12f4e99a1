"""First-order homotopy series with frequency expansion and control parameter h.

Time is rescaled as tau = omega t with Lambda = 1/omega^2 expanded as
Lambda0 + Lambda1. Lambda0 removes the secular tau sin(tau) term at first
order, Lambda1 removes it at second order, and the displacement is

    x(t) = a cos(w t) + c13 (cos(w t) - cos(3 w t)) + c15 (cos(w t) - cos(5 w t)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, UnsupportedRegimeError
from .model import OscillatorParams

__all__ = [
    "FrequencyExpansion",
    "SeriesSolution",
    "secular_coefficient",
    "lambda0",
    "omega0",
    "lambda1",
    "lambda1_groups",
    "harmonic_coefficients",
    "build_solution",
    "eval_displacement",
    "eval_velocity",
    "eval_in_tau",
]


def _require_unit_stiffness(p: OscillatorParams):
    if p.lam != 1:
        raise UnsupportedRegimeError(
            f"series solution requires lam = 1 (got lam = {p.lam})"
        )


def _stiffness_denominator(p: OscillatorParams) -> float:
    a2 = p.amplitude ** 2
    return 8.0 * p.lam + 5.0 * a2 * a2 * p.gamma + 6.0 * a2 * p.beta


def secular_coefficient(p: OscillatorParams, lam0: float) -> float:
    """Bracket multiplying (h/16) tau sin(tau) in the first-order correction."""
    a = p.amplitude
    a3 = a ** 3
    a5 = a ** 5
    return (
        8.0 * a
        + 4.0 * p.epsilon * a3
        + 3.0 * p.alpha * a5
        - lam0 * (8.0 * a * p.lam + 6.0 * p.beta * a3 + 5.0 * p.gamma * a5)
    )


def lambda0(p: OscillatorParams) -> float:
    """Zeroth-order squared inverse frequency, the root of :func:`secular_coefficient`."""
    _require_unit_stiffness(p)
    den = _stiffness_denominator(p)
    if not den > 0.0:
        raise DomainError(f"non-positive stiffness denominator {den!r}")
    a2 = p.amplitude ** 2
    return (8.0 + 3.0 * a2 * a2 * p.alpha + 4.0 * a2 * p.epsilon) / den


def omega0(p: OscillatorParams) -> float:
    return lambda0(p) ** -0.5


def lambda1_groups(p: OscillatorParams, lam0: float) -> tuple[float, float, float]:
    """The Lambda1 bracket split as (constant, Lambda0-linear, Lambda0-quadratic).

    The bracket equals ``g0 - lam0 * g1 + lam0**2 * g2``; signs are applied by
    the caller so each group can be checked on its own.
    """
    a2 = p.amplitude ** 2
    a4 = a2 * a2
    a6 = a4 * a2
    al, be, ep, ga, lam = p.alpha, p.beta, p.epsilon, p.gamma, p.lam
    g0 = 96.0 * a2 * al - 15.0 * a6 * al ** 2 + 96.0 * ep - 12.0 * a4 * al * ep
    g1 = (
        48.0 * be
        + 64.0 * a2 * ga
        + 138.0 * a4 * al * be
        + 150.0 * a6 * al * ga
        + 144.0 * a2 * be * ep
        + 156.0 * a4 * ga * ep
        + 96.0 * a2 * al * lam
        + 96.0 * ep * lam
    )
    g2 = (
        72.0 * a2 * be ** 2
        + 174.0 * a4 * be * ga
        + 105.0 * a6 * ga ** 2
        + 48.0 * be * lam
        + 64.0 * a2 * ga * lam
    )
    return g0, g1, g2


def lambda1(p: OscillatorParams, h: float, lam0: float | None = None) -> float:
    """First correction to the squared inverse frequency; exactly linear in ``h``."""
    if not math.isfinite(h):
        raise DomainError(f"h must be finite (got {h!r})")
    if lam0 is None:
        lam0 = lambda0(p)
    den = _stiffness_denominator(p)
    if den == 0.0:
        raise DomainError("zero stiffness denominator")
    g0, g1, g2 = lambda1_groups(p, lam0)
    bracket = g0 - lam0 * g1 + lam0 * lam0 * g2
    return p.amplitude ** 2 * h / (192.0 * den) * bracket


def harmonic_coefficients(p: OscillatorParams, h: float, lam0: float) -> tuple[float, float]:
    """Weights of (cos - cos 3) and (cos - cos 5) in the first-order correction."""
    a = p.amplitude
    a3 = a ** 3
    a5 = a ** 5
    c13 = h / 128.0 * (
        8.0 * p.epsilon * a3
        + 7.0 * p.alpha * a5
        - 4.0 * lam0 * p.beta * a3
        - 5.0 * p.gamma * lam0 * a5
    )
    c15 = h * a5 / 384.0 * (3.0 * p.alpha - p.gamma * lam0)
    return c13, c15


@dataclass(frozen=True)
class FrequencyExpansion:
    lambda0: float
    lambda1: float
    omega: float

    @classmethod
    def from_terms(cls, lam0: float, lam1: float) -> "FrequencyExpansion":
        if not lam0 > 0.0:
            raise DomainError(f"Lambda0 must be positive (got {lam0!r})")
        total = lam0 + lam1
        if not total > 0.0:
            raise DomainError(
                f"Lambda0 + Lambda1 = {total!r} <= 0; frequency is not real"
            )
        return cls(lam0, lam1, total ** -0.5)

    @property
    def total(self) -> float:
        return self.lambda0 + self.lambda1

    @property
    def omega0(self) -> float:
        return self.lambda0 ** -0.5


@dataclass(frozen=True)
class SeriesSolution:
    params: OscillatorParams
    h: float
    expansion: FrequencyExpansion
    c13: float
    c15: float

    @property
    def omega(self) -> float:
        return self.expansion.omega

    @property
    def period(self) -> float:
        return 2.0 * math.pi / self.expansion.omega

    def displacement(self, t):
        return eval_displacement(self, t)

    def velocity(self, t):
        return eval_velocity(self, t)


def build_solution(p: OscillatorParams, h: float) -> SeriesSolution:
    lam0 = lambda0(p)
    lam1 = lambda1(p, h, lam0)
    expansion = FrequencyExpansion.from_terms(lam0, lam1)
    c13, c15 = harmonic_coefficients(p, h, lam0)
    return SeriesSolution(p, float(h), expansion, c13, c15)


def eval_in_tau(sol: SeriesSolution, tau):
    """Partial sum x0 + x1 and its first two tau-derivatives.

    Accepts scalars or numpy arrays.
    """
    a, c13, c15 = sol.params.amplitude, sol.c13, sol.c15
    tau = np.asarray(tau, dtype=float)
    c1, c3, c5 = np.cos(tau), np.cos(3.0 * tau), np.cos(5.0 * tau)
    s1, s3, s5 = np.sin(tau), np.sin(3.0 * tau), np.sin(5.0 * tau)
    x = a * c1 + c13 * (c1 - c3) + c15 * (c1 - c5)
    dx = -a * s1 + c13 * (3.0 * s3 - s1) + c15 * (5.0 * s5 - s1)
    d2x = -a * c1 + c13 * (9.0 * c3 - c1) + c15 * (25.0 * c5 - c1)
    if x.ndim == 0:
        return float(x), float(dx), float(d2x)
    return x, dx, d2x


def eval_displacement(sol: SeriesSolution, t):
    return eval_in_tau(sol, sol.omega * np.asarray(t, dtype=float))[0]


def eval_velocity(sol: SeriesSolution, t):
    return sol.omega * eval_in_tau(sol, sol.omega * np.asarray(t, dtype=float))[1]
