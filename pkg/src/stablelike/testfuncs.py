"""Lyapunov test functions with their smoothing and exact derivatives.

The three candidates share one fixed even C^2 smoothing phi with
phi(u) = |u| for |u| >= 1 and 0 <= phi <= |u| inside:

    phi(u) = 1.875 u^2 - 1.25 u^4 + 0.375 u^6   on [-1, 1],

which matches |u| at u = +-1 in value, first and second derivative.

Kinds:
  * log_barrier:    V(u) = ln(1 + phi(u))            (nonnegative, unbounded)
  * bounded_power:  V(u) = 1 - (1 + phi(u))^-theta,  theta in (0, 1)
  * power:          V(u) = phi(u)^theta,             theta in (1, 2)

Derivatives up to order five are produced by composing the closed-form
outer-function derivatives with the piecewise-polynomial phi derivatives;
they feed the analytic small-jump core of the generator quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = ["TestFunction", "log_barrier", "bounded_power", "power_fn",
           "phi_value", "phi_derivs"]

KINDS = ("log_barrier", "bounded_power", "power")


def phi_value(u: float) -> float:
    a = abs(u)
    if a >= 1.0:
        return a
    u2 = u * u
    return u2 * (1.875 + u2 * (-1.25 + 0.375 * u2))


def phi_derivs(u: float) -> tuple[float, float, float, float, float, float]:
    """(phi, phi', ..., phi^(5)) at u."""
    a = abs(u)
    if a >= 1.0:
        s = 1.0 if u > 0.0 else -1.0
        return (a, s, 0.0, 0.0, 0.0, 0.0)
    p = phi_value(u)
    d1 = u * (3.75 + u * u * (-5.0 + 2.25 * u * u))
    d2 = 3.75 + u * u * (-15.0 + 11.25 * u * u)
    d3 = u * (-30.0 + 45.0 * u * u)
    d4 = -30.0 + 135.0 * u * u
    d5 = 270.0 * u
    return (p, d1, d2, d3, d4, d5)


def _outer_log(s: float) -> tuple[float, ...]:
    f0 = math.log1p(s)
    q = 1.0 / (1.0 + s)
    return (f0, q, -q * q, 2.0 * q**3, -6.0 * q**4, 24.0 * q**5)


def _outer_bounded_power(s: float, theta: float) -> tuple[float, ...]:
    out = [1.0 - (1.0 + s) ** (-theta)]
    poch = 1.0
    for k in range(1, 6):
        poch *= -theta - (k - 1)
        out.append(-poch * (1.0 + s) ** (-theta - k))
    return tuple(out)


def _outer_power(s: float, theta: float) -> tuple[float, ...]:
    out = [s**theta]
    poch = 1.0
    for k in range(1, 6):
        poch *= theta - (k - 1)
        out.append(poch * s ** (theta - k))
    return tuple(out)


def _compose(f: tuple[float, ...], p: tuple[float, ...]) -> tuple[float, ...]:
    """Derivatives of f(phi(u)) to order five from those of f and phi."""
    f1, f2, f3, f4, f5 = f[1], f[2], f[3], f[4], f[5]
    p1, p2, p3, p4, p5 = p[1], p[2], p[3], p[4], p[5]
    v1 = f1 * p1
    v2 = f2 * p1 * p1 + f1 * p2
    v3 = f3 * p1**3 + 3.0 * f2 * p1 * p2 + f1 * p3
    v4 = (f4 * p1**4 + 6.0 * f3 * p1 * p1 * p2
          + f2 * (4.0 * p1 * p3 + 3.0 * p2 * p2) + f1 * p4)
    v5 = (f5 * p1**5 + 10.0 * f4 * p1**3 * p2
          + f3 * (10.0 * p1 * p1 * p3 + 15.0 * p1 * p2 * p2)
          + f2 * (5.0 * p1 * p4 + 10.0 * p2 * p3) + f1 * p5)
    return (f[0], v1, v2, v3, v4, v5)


@dataclass(frozen=True)
class TestFunction:
    """One of the three norm-like test functions, with exact derivatives."""

    kind: str
    theta: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.kind == "log_barrier":
            if self.theta is not None:
                raise ValueError("log_barrier takes no theta")
        elif self.kind == "bounded_power":
            if self.theta is None or not 0.0 < self.theta < 1.0:
                raise ValueError("bounded_power requires theta in (0, 1)")
        else:
            if self.theta is None or not 1.0 < self.theta < 2.0:
                raise ValueError("power requires theta in (1, 2)")

    def value(self, u: float) -> float:
        p = phi_value(u)
        if self.kind == "log_barrier":
            return math.log1p(p)
        if self.kind == "bounded_power":
            return 1.0 - (1.0 + p) ** (-self.theta)
        return p**self.theta

    __call__ = value

    def derivs(self, u: float) -> tuple[float, ...]:
        """(V, V', V'', V''', V'''', V^(5)) at u."""
        p = phi_derivs(u)
        if self.kind == "log_barrier":
            f = _outer_log(p[0])
        elif self.kind == "bounded_power":
            f = _outer_bounded_power(p[0], self.theta)
        else:
            if p[0] == 0.0:
                # origin: V ~ phi^theta ~ u^(2 theta); V and the first two
                # derivatives vanish, higher orders are unbounded nearby
                return (0.0, 0.0, 0.0, math.inf, math.inf, math.inf)
            f = _outer_power(p[0], self.theta)
        return _compose(f, p)

    def kink_states(self) -> tuple[float, ...]:
        """States where V is only finitely differentiable: the smoothing
        matching points, plus the origin for the power kind."""
        if self.kind == "power":
            return (-1.0, 0.0, 1.0)
        return (-1.0, 1.0)


def log_barrier() -> TestFunction:
    return TestFunction("log_barrier")


def bounded_power(theta: float) -> TestFunction:
    return TestFunction("bounded_power", theta)


def power_fn(theta: float) -> TestFunction:
    return TestFunction("power", theta)
