"""Autonomous conservative oscillator.

The equation of motion is held in defect form

    F(x, v, acc) = acc (1 + eps x^2 + alpha x^4) + lam x + eps x v^2
                   + 2 alpha x^3 v^2 + beta x^3 + gamma x^5

and every other representation (explicit acceleration for the integrator,
first integral, tau-domain residual) is derived from the same coefficients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import InvalidParameterError

__all__ = [
    "OscillatorParams",
    "State",
    "defect",
    "acceleration",
    "energy",
]


@dataclass(frozen=True)
class OscillatorParams:
    """Physical constants of the oscillator and its release amplitude.

    ``lam`` is the sign of the linear stiffness and must be -1, 0 or 1. The
    nonlinear coefficients are non-negative; ``amplitude`` is the initial
    displacement ``x(0) = a`` (the oscillator starts at rest).
    """

    amplitude: float
    alpha: float = 0.0
    beta: float = 0.0
    epsilon: float = 0.0
    gamma: float = 0.0
    lam: int = 1

    def __post_init__(self):
        if isinstance(self.lam, bool) or self.lam not in (-1, 0, 1):
            raise InvalidParameterError(f"lam must be one of -1, 0, 1 (got {self.lam!r})")
        object.__setattr__(self, "lam", int(self.lam))
        for name in ("alpha", "beta", "epsilon", "gamma"):
            value = float(getattr(self, name))
            if not math.isfinite(value) or value < 0.0:
                raise InvalidParameterError(f"{name} must be finite and >= 0 (got {value!r})")
            object.__setattr__(self, name, value)
        a = float(self.amplitude)
        if not math.isfinite(a) or a <= 0.0:
            raise InvalidParameterError(f"amplitude must be finite and > 0 (got {a!r})")
        object.__setattr__(self, "amplitude", a)

    @classmethod
    def with_op(cls, amplitude, op, lam=1, **overrides):
        """Set alpha = beta = epsilon = gamma = ``op``, then apply ``overrides``."""
        fields = dict(alpha=op, beta=op, epsilon=op, gamma=op)
        fields.update({k: v for k, v in overrides.items() if v is not None})
        return cls(amplitude=amplitude, lam=lam, **fields)

    def evolve(self, **changes) -> "OscillatorParams":
        return replace(self, **changes)

    @property
    def is_linear(self) -> bool:
        return self.alpha == self.beta == self.epsilon == self.gamma == 0.0

    def as_dict(self) -> dict:
        return {
            "amplitude": self.amplitude,
            "alpha": self.alpha,
            "beta": self.beta,
            "epsilon": self.epsilon,
            "gamma": self.gamma,
            "lam": self.lam,
        }


@dataclass(frozen=True)
class State:
    x: float
    v: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.v)):
            raise InvalidParameterError(f"state must be finite (got x={self.x!r}, v={self.v!r})")


def _check_finite(x, v):
    if not (math.isfinite(x) and math.isfinite(v)):
        raise InvalidParameterError(f"state must be finite (got x={x!r}, v={v!r})")


def effective_mass(p: OscillatorParams, x):
    return 1.0 + p.epsilon * x * x + p.alpha * x ** 4


def defect(p: OscillatorParams, x, v, acc, stiffness_scale=1.0):
    """Left-hand side of the equation of motion.

    With ``stiffness_scale`` set to the squared inverse frequency and
    ``(x, v, acc)`` replaced by tau-derivatives, this is the residual of the
    rescaled equation x'' (1 + eps x^2 + alpha x^4) + L lam x + ... = 0.
    Works elementwise on numpy arrays.
    """
    x2 = x * x
    x3 = x2 * x
    v2 = v * v
    return (
        acc * effective_mass(p, x)
        + p.epsilon * x * v2
        + 2.0 * p.alpha * x3 * v2
        + stiffness_scale * (p.lam * x + p.beta * x3 + p.gamma * x3 * x2)
    )


def acceleration(p: OscillatorParams, s: State | tuple) -> float:
    """Solve the defect equation for the acceleration at state ``s``."""
    x, v = (s.x, s.v) if isinstance(s, State) else s
    _check_finite(x, v)
    # defect is affine in acc: F = acc * m(x) + F(x, v, 0)
    return -defect(p, x, v, 0.0) / effective_mass(p, x)


def energy(p: OscillatorParams, s: State | tuple) -> float:
    """First integral 1/2 v^2 m(x) + 1/2 lam x^2 + 1/4 beta x^4 + gamma/6 x^6."""
    x, v = (s.x, s.v) if isinstance(s, State) else s
    _check_finite(x, v)
    x2 = x * x
    return (
        0.5 * v * v * effective_mass(p, x)
        + 0.5 * p.lam * x2
        + 0.25 * p.beta * x2 * x2
        + p.gamma / 6.0 * x2 * x2 * x2
    )
