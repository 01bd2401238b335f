"""Self-contained special-function kernel.

Everything downstream (jump-intensity normalization, drift-condition
constants, asymptote evaluation) is built on the functions in this module:
the Gamma and digamma functions, the Gauss hypergeometric function on the
real line, generalized binomial coefficients, the half-angle cotangent
pi*cot(pi*alpha/2), and the two theta-indexed drift constants obtained from
binomial tail sums and hypergeometric values at +-1.

All series are summed with compensated (Kahan) accumulation and stop on an
explicit tail bound, never on consecutive-term smallness alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.integrate import quad

__all__ = [
    "PoleError",
    "HypergeomParams",
    "EArgs",
    "gamma_fn",
    "digamma",
    "gauss_2f1",
    "hyp2f1",
    "gen_binom",
    "pi_cot_half",
    "e_const",
    "transient_const",
    "cot_series_check",
    "e_const_series_direct",
]

_EULER_GAMMA = 0.5772156649015328606

# Lanczos approximation, g = 607/128, 15 terms (Godfrey's coefficients).
_LANCZOS_G = 4.7421875
_LANCZOS_C = (
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
)


class PoleError(ValueError):
    """Argument sits on a pole of the requested function."""


class ConvergenceError(ArithmeticError):
    """A series or quadrature failed to reach the requested tolerance."""

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


def _is_nonpositive_integer(x: float, tol: float = 0.0) -> bool:
    if x > 0.5:
        return False
    r = round(x)
    return abs(x - r) <= tol and r <= 0


def gamma_fn(x: float) -> float:
    """Gamma function on the real line away from the poles at 0, -1, -2, ...

    Lanczos approximation for x >= 0.5 and the reflection identity
    Gamma(x)Gamma(1-x) = pi/sin(pi x) below; relative accuracy is about
    1e-14 on [-170, 170].
    """
    x = float(x)
    if _is_nonpositive_integer(x):
        raise PoleError(f"gamma_fn pole at non-positive integer x={x}")
    if x < 0.5:
        # reflection; sin(pi x) is safe since x is not an integer here
        s = math.sin(math.pi * x)
        return math.pi / (s * gamma_fn(1.0 - x))
    if x > 171.62:
        raise OverflowError(f"gamma_fn({x}) exceeds double range")
    z = x - 1.0
    acc = _LANCZOS_C[0]
    for k in range(1, len(_LANCZOS_C)):
        acc += _LANCZOS_C[k] / (z + k)
    t = z + _LANCZOS_G + 0.5
    return math.sqrt(2.0 * math.pi) * t ** (z + 0.5) * math.exp(-t) * acc


# asymptotic digamma tail coefficients: B_{2n} / (2n) for x^(-2n)
_DIGAMMA_TAIL = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
)


def digamma(x: float) -> float:
    """Digamma function psi(x) = d/dx log Gamma(x), x not in {0,-1,-2,...}.

    Upward recurrence psi(x+1) = psi(x) + 1/x into the asymptotic regime,
    then the Stirling-type expansion; absolute accuracy well under 1e-10
    on [0.01, 100].
    """
    x = float(x)
    if _is_nonpositive_integer(x):
        raise PoleError(f"digamma pole at non-positive integer x={x}")
    if x < 0.0:
        # reflection: psi(1-x) = psi(x) + pi*cot(pi*x)
        return digamma(1.0 - x) - math.pi / math.tan(math.pi * x)
    acc = 0.0
    while x < 8.0:
        acc -= 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    tail = 0.0
    p = inv2
    for coef in _DIGAMMA_TAIL:
        tail += coef * p
        p *= inv2
    return acc + math.log(x) - 0.5 / x - tail


def gen_binom(theta: float, k: int) -> float:
    """Generalized binomial coefficient theta*(theta-1)...(theta-k+1)/k!."""
    if k < 0:
        raise ValueError("k must be a non-negative integer")
    out = 1.0
    for j in range(k):
        out *= (theta - j) / (j + 1.0)
    return out


def pi_cot_half(alpha: float) -> float:
    """pi * cot(pi*alpha/2) for alpha in (0, 2); exactly 0 at alpha = 1."""
    if not 0.0 < alpha < 2.0:
        raise ValueError(f"alpha={alpha} outside (0, 2)")
    if alpha == 1.0:
        return 0.0
    half = 0.5 * math.pi * alpha
    return math.pi * math.cos(half) / math.sin(half)


@dataclass(frozen=True)
class HypergeomParams:
    """Arguments of the Gauss hypergeometric function, restricted to real z <= 1
    (plus z < -1, reached through the 1/z connection identity)."""

    a: float
    b: float
    c: float
    z: float

    def __post_init__(self):
        if _is_nonpositive_integer(self.c, tol=1e-300):
            raise PoleError(f"hypergeometric c={self.c} is a non-positive integer")
        if self.z > 1.0:
            raise ValueError(f"z={self.z} > 1 not supported")
        s = self.c - self.a - self.b
        if self.z == 1.0 and s <= 0.0:
            raise ValueError(f"z=1 requires c-a-b > 0, got {s}")
        if self.z == -1.0 and s <= -1.0:
            raise ValueError(f"z=-1 requires c-a-b > -1, got {s}")


def _poch_is_terminating(w: float) -> int | None:
    """If w is a non-positive integer return -w (series terminates), else None."""
    if w <= 0.0 and abs(w - round(w)) < 1e-300:
        return int(-round(w))
    return None


def _hyp2f1_series(a: float, b: float, c: float, z: float, max_terms: int = 200_000) -> float:
    """Direct power series with compensated summation and a geometric tail bound."""
    nterm_a = _poch_is_terminating(a)
    nterm_b = _poch_is_terminating(b)
    nmax = max_terms
    if nterm_a is not None or nterm_b is not None:
        nmax = min(v for v in (nterm_a, nterm_b) if v is not None) + 1
    total = 0.0
    comp = 0.0
    term = 1.0
    for n in range(nmax + 1):
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
        ratio = (a + n) * (b + n) / ((c + n) * (1.0 + n)) * z
        new = term * ratio
        if n >= 2 and nmax == max_terms:
            r = abs(ratio)
            if r < 1.0 and abs(new) * r / (1.0 - r) < 1e-16 * max(abs(total), 1e-2):
                return total + new
        term = new
    if nmax < max_terms:
        return total
    raise ConvergenceError(
        f"hypergeometric series did not converge for (a={a}, b={b}, c={c}, z={z})",
        achieved=abs(term),
    )


def _hyp2f1_euler(a: float, b: float, c: float, z: float) -> float:
    """Integral representation over [0,1] with the endpoint weights handled
    by weighted adaptive quadrature; requires c > b > 0 and z < 1."""
    if not (c > b > 0.0):
        raise ValueError(f"integral route needs c > b > 0, got b={b}, c={c}")

    def f(t: float) -> float:
        return (1.0 - t * z) ** (-a)

    val, err = quad(f, 0.0, 1.0, weight="alg", wvar=(b - 1.0, c - b - 1.0),
                    epsabs=1e-13, epsrel=1e-13, limit=200)
    pref = gamma_fn(c) / (gamma_fn(b) * gamma_fn(c - b))
    if err * abs(pref) > 1e-9 * max(1.0, abs(val * pref)):
        raise ConvergenceError("hypergeometric integral route inaccurate", achieved=err * abs(pref))
    return pref * val


def _hyp2f1_gauss_point(a: float, b: float, c: float) -> float:
    """Closed form at z = 1 (requires c - a - b > 0)."""
    return gamma_fn(c) * gamma_fn(c - a - b) / (gamma_fn(c - a) * gamma_fn(c - b))


def gauss_2f1(p: HypergeomParams) -> float:
    """Gauss hypergeometric function 2F1(a,b,c;z) for real arguments.

    Strategy: direct series for |z| <= 1/2; the Euler integral for
    z in (1/2, 1) and z in [-1, -1/2) when c > b > 0 (series fallback
    otherwise); the closed Gamma form at z = 1; and the 1/z connection
    identity for z < -1.  Relative accuracy ~1e-10 over the parameter
    families this package evaluates.
    """
    v, _info = gauss_2f1_info(p)
    return v


def gauss_2f1_info(p: HypergeomParams) -> tuple[float, dict]:
    a, b, c, z = p.a, p.b, p.c, p.z
    if z == 0.0:
        return 1.0, {"method": "trivial"}
    if _poch_is_terminating(a) is not None or _poch_is_terminating(b) is not None:
        # polynomial case, valid for every z
        return _hyp2f1_series(a, b, c, z), {"method": "terminating-series"}
    if z == 1.0:
        return _hyp2f1_gauss_point(a, b, c), {"method": "gamma-closed-form"}
    if abs(z) <= 0.5:
        return _hyp2f1_series(a, b, c, z), {"method": "series"}
    if -1.0 <= z < -0.5 or 0.5 < z < 1.0:
        if c > b > 0.0:
            return _hyp2f1_euler(a, b, c, z), {"method": "euler-integral"}
        if c > a > 0.0:
            # symmetric in (a, b)
            return _hyp2f1_euler(b, a, c, z), {"method": "euler-integral-swapped"}
        return _hyp2f1_series(a, b, c, z), {"method": "series-slow"}
    # z < -1: connection through w = 1/z
    info: dict = {"method": "connection"}
    if abs(b - a - round(b - a)) < 1e-9:
        b = b + 1e-9
        info["b_perturbation"] = 1e-9
    w = 1.0 / z
    first = HypergeomParams(a, 1.0 - c + a, 1.0 - b + a, w)
    second = HypergeomParams(b, 1.0 - c + b, 1.0 - a + b, w)
    t1 = (gamma_fn(c) * gamma_fn(b - a) / (gamma_fn(b) * gamma_fn(c - a))
          * (-z) ** (-a) * gauss_2f1(first))
    t2 = (gamma_fn(c) * gamma_fn(a - b) / (gamma_fn(a) * gamma_fn(c - b))
          * (-z) ** (-b) * gauss_2f1(second))
    return t1 + t2, info


def hyp2f1(a: float, b: float, c: float, z: float) -> float:
    """Convenience wrapper building HypergeomParams."""
    return gauss_2f1(HypergeomParams(a, b, c, z))


@dataclass(frozen=True)
class EArgs:
    """Arguments of the ergodicity-side drift constant: 0 < theta < alpha < 2."""

    alpha: float
    theta: float

    def __post_init__(self):
        if not 0.0 < self.alpha < 2.0:
            raise ValueError(f"alpha={self.alpha} outside (0, 2)")
        if not 0.0 < self.theta < self.alpha:
            raise ValueError(f"theta={self.theta} outside (0, alpha={self.alpha})")


def _even_binomial_tail_sum(theta: float, alpha: float, abs_tol: float = 1e-13) -> float:
    """sum_{i>=1} binom(theta, 2i) * 2/(2i - alpha).

    The terms decay only polynomially (~ i^(-2-theta)), so the sum is
    evaluated through its integral form

        int_0^1 ((1+t)^theta + (1-t)^theta - 2) * t^(-alpha-1) dt,

    split into an analytic binomial core on [0, 0.1], a smooth middle part,
    and an endpoint piece at t = 1 with the (1-t)^theta factor handled by
    weighted quadrature.  Certified absolute accuracy abs_tol.
    """
    if not 0.0 < alpha < 2.0:
        raise ValueError(f"alpha={alpha} outside (0, 2)")
    if theta <= -1.0:
        raise ValueError(f"theta={theta} must exceed -1 for the endpoint integral")
    d1, d2 = 0.1, 0.0625
    core = 0.0
    K = 16
    for k in range(1, K + 1):
        core += 2.0 * gen_binom(theta, 2 * k) * d1 ** (2 * k - alpha) / (2 * k - alpha)
    rem = abs(2.0 * gen_binom(theta, 2 * K + 2) * d1 ** (2 * K + 2 - alpha)
              / (2 * K + 2 - alpha)) / (1.0 - d1 * d1)

    def f_mid(t: float) -> float:
        return ((1.0 + t) ** theta + (1.0 - t) ** theta - 2.0) * t ** (-alpha - 1.0)

    v_mid, e_mid = quad(f_mid, d1, 1.0 - d2, epsabs=abs_tol / 4.0, epsrel=1e-13, limit=200)

    # u = 1 - t on [0, d2]; the u^theta factor carries the endpoint behavior
    def f_edge_smooth(u: float) -> float:
        return ((2.0 - u) ** theta - 2.0) * (1.0 - u) ** (-alpha - 1.0)

    v_e1, e_e1 = quad(f_edge_smooth, 0.0, d2, epsabs=abs_tol / 4.0, epsrel=1e-13, limit=200)

    def f_edge_alg(u: float) -> float:
        return (1.0 - u) ** (-alpha - 1.0)

    v_e2, e_e2 = quad(f_edge_alg, 0.0, d2, weight="alg", wvar=(theta, 0.0),
                      epsabs=abs_tol / 4.0, epsrel=1e-13, limit=200)
    total_err = rem + e_mid + e_e1 + e_e2
    if total_err > abs_tol:
        raise ConvergenceError("binomial tail sum missed its tolerance", achieved=total_err)
    return core + v_mid + v_e1 + v_e2


def e_const(alpha_or_args, theta: float | None = None) -> float:
    """Drift constant on the ergodicity side, defined for 0 < theta < alpha < 2:

        (alpha/theta) * sum_{i>=1} binom(theta,2i) * 2/(2i-alpha)  -  2/theta
        + alpha * [2F1(-theta, alpha-theta, 1+alpha-theta; -1)
                   + 2F1(-theta, alpha-theta, 1+alpha-theta; +1)] / (theta*(alpha-theta))

    Strictly increasing in theta, with limit pi*cot(pi*alpha/2) as theta -> 0.
    """
    if isinstance(alpha_or_args, EArgs):
        args = alpha_or_args
    else:
        args = EArgs(float(alpha_or_args), float(theta))
    al, th = args.alpha, args.theta
    s = _even_binomial_tail_sum(th, al)
    f_m1 = hyp2f1(-th, al - th, 1.0 + al - th, -1.0)
    f_p1 = hyp2f1(-th, al - th, 1.0 + al - th, 1.0)
    return (al / th) * s - 2.0 / th + al * (f_m1 + f_p1) / (th * (al - th))


def transient_const(alpha: float, theta: float) -> float:
    """Drift constant on the transience side for theta in (0, 1):

        -(alpha/theta) * sum_{i>=1} binom(-theta,2i) * 2/(2i-alpha)  +  2/theta
        - alpha * [2F1(theta, alpha+theta, 1+alpha+theta; -1)
                   + 2F1(theta, alpha+theta, 1+alpha+theta; +1)] / (theta*(alpha+theta))

    Strictly decreasing in theta, with limit pi*cot(pi*alpha/2) as theta -> 0.
    """
    if not 0.0 < alpha < 2.0:
        raise ValueError(f"alpha={alpha} outside (0, 2)")
    if not 0.0 < theta < 1.0:
        raise ValueError(f"theta={theta} outside (0, 1)")
    s = _even_binomial_tail_sum(-theta, alpha)
    f_m1 = hyp2f1(theta, alpha + theta, 1.0 + alpha + theta, -1.0)
    f_p1 = hyp2f1(theta, alpha + theta, 1.0 + alpha + theta, 1.0)
    return -(alpha / theta) * s + 2.0 / theta - alpha * (f_m1 + f_p1) / (theta * (alpha + theta))


def e_const_series_direct(alpha: float, theta: float, n_terms: int = 200_000) -> float:
    """Same constant as e_const, with the binomial sum taken by direct partial
    summation over gen_binom terms (no tail completion).  Slowly convergent;
    intended as an independent low-accuracy cross-check."""
    args = EArgs(alpha, theta)
    al, th = args.alpha, args.theta
    total = 0.0
    comp = 0.0
    C = gen_binom(th, 2)
    for i in range(1, n_terms + 1):
        term = C * 2.0 / (2.0 * i - al)
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
        C *= (th - 2.0 * i) * (th - 2.0 * i - 1.0) / ((2.0 * i + 1.0) * (2.0 * i + 2.0))
    f_m1 = hyp2f1(-th, al - th, 1.0 + al - th, -1.0)
    f_p1 = hyp2f1(-th, al - th, 1.0 + al - th, 1.0)
    return (al / th) * total - 2.0 / th + al * (f_m1 + f_p1) / (th * (al - th))


def cot_series_check(alpha: float) -> float:
    """Cross-check oracle for pi_cot_half on (0,2) away from alpha = 1.

    Sums the partial-fraction series
        1/(alpha-1) + 1/alpha + sum_{n>=1} (1-2*alpha)/((alpha+n)(1-alpha+n))
    by compensated partial summation with a digamma-difference tail
    completion, and adds the reflection term pi/sin(pi*alpha); the total
    equals pi*cot(pi*alpha/2).
    """
    if not 0.0 < alpha < 2.0:
        raise ValueError(f"alpha={alpha} outside (0, 2)")
    if alpha == 1.0:
        raise PoleError("representation has a removable 1/(alpha-1) pole at alpha=1")
    N = 4096
    total = 0.0
    comp = 0.0
    coef = 1.0 - 2.0 * alpha
    for n in range(1, N + 1):
        term = coef / ((alpha + n) * (1.0 - alpha + n))
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
    # exact remainder: sum_{n>N} [1/(n+alpha) - 1/(n+1-alpha)]
    tail = digamma(N + 2.0 - alpha) - digamma(N + 1.0 + alpha)
    series = 1.0 / (alpha - 1.0) + 1.0 / alpha + total + tail
    return series + math.pi / math.sin(math.pi * alpha)
