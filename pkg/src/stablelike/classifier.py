"""Long-time behavior verdicts from the drift conditions.

The sufficient conditions all take the form "a closed expression of the
symbol coefficients stays on one side of zero as |x| grows".  This module
estimates the limsup/liminf of those expressions over geometric escape
grids and turns the outcome into a Verdict:

  condition 1.3 (liminf > 0)                          ->  Transient
  condition 1.2 (limsup < 0, liminf alpha >= 1)       ->  Recurrent
  condition 1.4 (theta-scan limsup < 0, alpha_inf > 1)->  Ergodic
  condition 1.5 (fixed-theta variant of 1.2)          ->  Recurrent (secondary)
  condition 2.2 (1.4 with an |x|^eta weight)          ->  FErgodic

A finite grid can only under-estimate a limsup, so a verdict additionally
requires the tail values to be stabilized: the fitted tail slope must be
small or must push the value further from the threshold.  Anything else is
an honest Inconclusive with caveat codes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import specfun
from .coeffs import SymbolTriple, c_from_values

__all__ = [
    "GridSpec",
    "ClassifierConfig",
    "LimitEstimate",
    "ConditionRecord",
    "Verdict",
    "estimate_limsup",
    "estimate_liminf",
    "classify",
    "classify_f_ergodic",
    "corollary_13",
]

LABELS = ("Recurrent", "Transient", "Ergodic", "FErgodic", "Inconclusive")

CAVEAT_NON_STABILIZED = "NON_STABILIZED_TREND"
CAVEAT_ALPHA_BELOW_ONE = "ALPHA_LIMINF_BELOW_ONE"
CAVEAT_TWO_SIDED_MISMATCH = "TWO_SIDED_TAILS_DISAGREE"
CAVEAT_PIECEWISE = "PIECEWISE_SYMBOL_SUFFICIENT_CONDITIONS_ONLY"
CAVEAT_ONE_SIDED_GRID = "ONE_SIDED_GRID_EVIDENCE"
CAVEAT_THETA_SKIPPED = "THETA_POINTS_SKIPPED"


@dataclass(frozen=True)
class GridSpec:
    """Geometric escape grid |x| = x0 * ratio^k, k = 0..count-1."""

    x0: float = 10.0
    ratio: float = 2.0
    count: int = 12
    two_sided: bool = True

    def __post_init__(self):
        if self.x0 <= 0.0:
            raise ValueError("x0 must be positive")
        if self.ratio <= 1.0:
            raise ValueError("ratio must exceed 1")
        if self.count < 4:
            raise ValueError("count must be at least 4")

    def radii(self) -> np.ndarray:
        return self.x0 * self.ratio ** np.arange(self.count)

    def points(self) -> list[float]:
        out = []
        for r in self.radii():
            out.append(float(r))
            if self.two_sided:
                out.append(float(-r))
        return out


@dataclass(frozen=True)
class ClassifierConfig:
    grid: GridSpec = field(default_factory=GridSpec)
    margin_tol: float = 1e-3
    slope_tol: float = 1e-3      # per grid octave
    theta_grid_size: int = 6
    secondary_theta_fraction: float = 0.5  # theta for the fixed-theta recurrence route


@dataclass
class LimitEstimate:
    """Tail estimate of a limsup/liminf over the escape grid."""

    value: float        # extremum over the tail-half octaves
    trend: float        # least-squares slope of per-octave extrema, per octave
    octaves: list[float]
    per_octave: list[float]  # per-octave max (limsup) or min (liminf)
    kind: str           # "limsup" | "liminf"

    def accepted_below(self, threshold: float, slope_tol: float) -> bool:
        """Certified 'limsup <= threshold': tail max below it and the trend
        not pushing upward."""
        return (math.isfinite(self.value) and self.value <= threshold
                and (abs(self.trend) <= slope_tol or self.trend < 0.0))

    def accepted_above(self, threshold: float, slope_tol: float) -> bool:
        return (math.isfinite(self.value) and self.value >= threshold
                and (abs(self.trend) <= slope_tol or self.trend > 0.0))

    def stabilized(self, slope_tol: float) -> bool:
        return math.isfinite(self.trend) and abs(self.trend) <= slope_tol


def _tail_estimate(f, grid: GridSpec, kind: str) -> LimitEstimate:
    radii = grid.radii()
    agg = []
    for r in radii:
        vals = [f(float(r))]
        if grid.two_sided:
            vals.append(f(float(-r)))
        agg.append(max(vals) if kind == "limsup" else min(vals))
    n_tail = math.ceil(grid.count / 2)
    tail = agg[-n_tail:]
    value = max(tail) if kind == "limsup" else min(tail)
    idx = np.arange(len(tail), dtype=float)
    finite = np.isfinite(tail)
    if finite.sum() >= 2:
        trend = float(np.polyfit(idx[finite], np.asarray(tail)[finite], 1)[0])
    else:
        trend = math.nan
    return LimitEstimate(value=float(value), trend=trend,
                         octaves=[float(r) for r in radii],
                         per_octave=[float(v) for v in agg], kind=kind)


def estimate_limsup(f, grid: GridSpec) -> LimitEstimate:
    """Estimate limsup_{|x|->inf} f(x): max over the tail half of the
    per-octave maxima, with the tail slope reported for stabilization."""
    return _tail_estimate(f, grid, "limsup")


def estimate_liminf(f, grid: GridSpec) -> LimitEstimate:
    return _tail_estimate(f, grid, "liminf")


@dataclass
class ConditionRecord:
    id: str                       # "1.2" | "1.3" | "1.4" | "1.5" | "2.2"
    value: float
    trend: float
    accepted: bool
    theta: float | None = None
    eta: float | None = None
    per_octave: list[float] = field(default_factory=list)
    octaves: list[float] = field(default_factory=list)

    def to_json_dict(self) -> dict:
        d = {"id": self.id, "value": self.value, "trend": self.trend,
             "accepted": self.accepted,
             "grid": {"octaves": self.octaves, "per_octave": self.per_octave}}
        if self.theta is not None:
            d["theta"] = self.theta
        if self.eta is not None:
            d["eta"] = self.eta
        return d


@dataclass
class Verdict:
    label: str
    margin: float
    conditions: list[ConditionRecord]
    theta_trace: list[dict] | None = None
    caveats: list[str] = field(default_factory=list)
    config_echo: dict = field(default_factory=dict)
    versions: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "label": self.label,
            "margin": self.margin,
            "conditions": [c.to_json_dict() for c in self.conditions],
            "theta_trace": self.theta_trace,
            "caveats": sorted(self.caveats),
            "config_echo": self.config_echo,
            "versions": self.versions,
        }


def _versions() -> dict:
    import numpy
    import scipy
    from . import __version__
    return {"stablelike": __version__, "numpy": numpy.__version__,
            "scipy": scipy.__version__}


def _drift_term(triple: SymbolTriple, x: float) -> float:
    a = triple.alpha_at(x)
    b = triple.beta_at(x)
    c = c_from_values(a, triple.gamma_at(x))
    sg = math.copysign(1.0, x) if x != 0.0 else 0.0
    return sg * (a / c) * abs(x) ** (a - 1.0) * b


def _expr_sign_condition(triple: SymbolTriple, x: float) -> float:
    """Shared expression of the recurrence/transience conditions."""
    return _drift_term(triple, x) + specfun.pi_cot_half(triple.alpha_at(x))


def _expr_ergodic(triple: SymbolTriple, x: float, theta: float) -> float:
    a = triple.alpha_at(x)
    c = c_from_values(a, triple.gamma_at(x))
    return (_drift_term(triple, x)
            + (a / (theta * c)) * abs(x) ** (a - theta)
            + specfun.e_const(a, theta))


def _expr_fixed_theta(triple: SymbolTriple, x: float, theta: float) -> float:
    return _drift_term(triple, x) + specfun.e_const(triple.alpha_at(x), theta)


def _expr_f_ergodic(triple: SymbolTriple, x: float, theta: float, eta: float) -> float:
    a = triple.alpha_at(x)
    c = c_from_values(a, triple.gamma_at(x))
    return (_drift_term(triple, x)
            + (a / (theta * c)) * abs(x) ** (a - theta + eta)
            + specfun.e_const(a, theta))


def _theta_grid(alpha_inf: float, size: int) -> list[float]:
    """theta_j = alpha_inf (1 - 2^-j), accumulating toward alpha_inf."""
    return [alpha_inf * (1.0 - 2.0 ** (-j)) for j in range(1, size + 1)]


def _config_echo(cfg: ClassifierConfig) -> dict:
    return {
        "grid": {"x0": cfg.grid.x0, "ratio": cfg.grid.ratio,
                 "count": cfg.grid.count, "two_sided": cfg.grid.two_sided},
        "margin_tol": cfg.margin_tol,
        "slope_tol": cfg.slope_tol,
        "theta_grid_size": cfg.theta_grid_size,
        "secondary_theta_fraction": cfg.secondary_theta_fraction,
    }


def _sides_disagree(triple: SymbolTriple, grid: GridSpec) -> bool:
    """Do the one-sided tails of the shared sign expression pull in opposite
    directions?  Used only to annotate Inconclusive verdicts."""
    if not grid.two_sided:
        return False
    r = grid.radii()[-1]
    try:
        vp = _expr_sign_condition(triple, float(r))
        vm = _expr_sign_condition(triple, float(-r))
    except Exception:
        return False
    return vp * vm < 0.0 and min(abs(vp), abs(vm)) > 1e-6


def classify(triple: SymbolTriple, cfg: ClassifierConfig | None = None) -> Verdict:
    """Decide Recurrent / Transient / Ergodic / Inconclusive.

    Ordered decision: transience first (liminf of the sign expression), then
    recurrence (limsup, gated on liminf alpha >= 1), then the ergodic
    upgrade over the theta grid when alpha_inf > 1, then the fixed-theta
    secondary recurrence route; anything left is Inconclusive with caveats.
    """
    cfg = cfg or ClassifierConfig()
    triple.require_validated()
    grid = cfg.grid
    tol = cfg.margin_tol
    caveats: set[str] = set()
    conditions: list[ConditionRecord] = []
    if not grid.two_sided:
        caveats.add(CAVEAT_ONE_SIDED_GRID)

    expr = lambda x: _expr_sign_condition(triple, x)

    li = estimate_liminf(expr, grid)
    transient_ok = li.accepted_above(+tol, cfg.slope_tol)
    conditions.append(ConditionRecord("1.3", li.value, li.trend, transient_ok,
                                      per_octave=li.per_octave, octaves=li.octaves))

    ls = estimate_limsup(expr, grid)
    alpha_li = estimate_liminf(lambda x: triple.alpha_at(x), grid)
    alpha_gate = alpha_li.value >= 1.0 - 1e-6
    recurrent_raw = ls.accepted_below(-tol, cfg.slope_tol)
    recurrent_ok = recurrent_raw and alpha_gate
    if recurrent_raw and not alpha_gate:
        caveats.add(CAVEAT_ALPHA_BELOW_ONE)
    conditions.append(ConditionRecord("1.2", ls.value, ls.trend, recurrent_ok,
                                      per_octave=ls.per_octave, octaves=ls.octaves))

    if not (transient_ok or recurrent_raw):
        for est in (li, ls):
            if not est.stabilized(cfg.slope_tol):
                caveats.add(CAVEAT_NON_STABILIZED)

    # ergodic upgrade over the theta grid
    theta_trace: list[dict] | None = None
    ergodic_ok = False
    ergodic_margin = math.nan
    best_theta = None
    alpha_inf = triple.bounds.alpha_inf
    if alpha_inf > 1.0 + 1e-9:
        thetas = _theta_grid(alpha_inf, cfg.theta_grid_size)
        theta_trace = []
        accepted_flags = []
        for th in thetas:
            def e14(x, _th=th):
                a = triple.alpha_at(x)
                if _th >= a:
                    raise ValueError(f"theta={_th} not below alpha({x})={a}")
                return _expr_ergodic(triple, x, _th)

            try:
                est = estimate_limsup(e14, grid)
            except ValueError:
                caveats.add(CAVEAT_THETA_SKIPPED)
                theta_trace.append({"theta": th, "value": None, "trend": None,
                                    "accepted": False})
                accepted_flags.append(False)
                continue
            ok = est.accepted_below(-tol, cfg.slope_tol)
            theta_trace.append({"theta": th, "value": est.value,
                                "trend": est.trend, "accepted": ok})
            accepted_flags.append(ok)
            if ok and (best_theta is None or est.value < ergodic_margin):
                best_theta = th
                ergodic_margin = est.value
                best_est = est
        top_half = accepted_flags[len(accepted_flags) // 2:]
        consistent = bool(top_half) and all(top_half)
        ergodic_ok = accepted_flags[-1] and consistent and best_theta is not None
        if ergodic_ok:
            conditions.append(ConditionRecord("1.4", best_est.value, best_est.trend,
                                              True, theta=best_theta,
                                              per_octave=best_est.per_octave,
                                              octaves=best_est.octaves))

    # fixed-theta secondary recurrence route
    secondary_ok = False
    if alpha_inf > 1e-9:
        th_fix = cfg.secondary_theta_fraction * alpha_inf
        try:
            est15 = estimate_limsup(lambda x: _expr_fixed_theta(triple, x, th_fix), grid)
            secondary_ok = est15.accepted_below(-tol, cfg.slope_tol)
            conditions.append(ConditionRecord("1.5", est15.value, est15.trend,
                                              secondary_ok, theta=th_fix,
                                              per_octave=est15.per_octave,
                                              octaves=est15.octaves))
        except (ValueError, ArithmeticError):
            pass

    echo = _config_echo(cfg)
    vers = _versions()

    if transient_ok:
        return Verdict("Transient", abs(li.value), conditions, theta_trace,
                       sorted(caveats), echo, vers)
    if ergodic_ok and recurrent_ok:
        return Verdict("Ergodic", abs(ergodic_margin), conditions, theta_trace,
                       sorted(caveats), echo, vers)
    if recurrent_ok:
        return Verdict("Recurrent", abs(ls.value), conditions, theta_trace,
                       sorted(caveats), echo, vers)
    if secondary_ok and alpha_gate:
        return Verdict("Recurrent", abs(est15.value), conditions, theta_trace,
                       sorted(caveats), echo, vers)
    if triple.contains_piece():
        caveats.add(CAVEAT_PIECEWISE)
    if _sides_disagree(triple, grid):
        caveats.add(CAVEAT_TWO_SIDED_MISMATCH)
    return Verdict("Inconclusive", 0.0, conditions, theta_trace,
                   sorted(caveats), echo, vers)


def classify_f_ergodic(triple: SymbolTriple, eta: float,
                       cfg: ClassifierConfig | None = None) -> Verdict:
    """Weighted-norm convergence check: the ergodic condition with an extra
    |x|^eta weight.  Returns FErgodic with the certified eta, else
    Inconclusive."""
    cfg = cfg or ClassifierConfig()
    triple.require_validated()
    alpha_inf = triple.bounds.alpha_inf
    if alpha_inf <= 1.0:
        raise ValueError(f"f-ergodicity check requires alpha_inf > 1, got {alpha_inf}")
    if eta >= alpha_inf:
        raise ValueError(f"eta={eta} must be below alpha_inf={alpha_inf}")
    thetas = _theta_grid(alpha_inf, cfg.theta_grid_size)
    if not 0.0 < eta <= thetas[0]:
        raise ValueError(f"eta={eta} must lie in (0, {thetas[0]}] for this theta grid")
    grid, tol = cfg.grid, cfg.margin_tol
    caveats: set[str] = set()
    if not grid.two_sided:
        caveats.add(CAVEAT_ONE_SIDED_GRID)
    conditions = []
    theta_trace = []
    best = None
    for th in thetas:
        try:
            est = estimate_limsup(lambda x: _expr_f_ergodic(triple, x, th, eta), grid)
        except (ValueError, ArithmeticError):
            caveats.add(CAVEAT_THETA_SKIPPED)
            theta_trace.append({"theta": th, "value": None, "trend": None,
                                "accepted": False})
            continue
        ok = est.accepted_below(-tol, cfg.slope_tol)
        theta_trace.append({"theta": th, "value": est.value, "trend": est.trend,
                            "accepted": ok})
        if ok and (best is None or est.value < best[1].value):
            best = (th, est)
    echo = _config_echo(cfg)
    echo["eta"] = eta
    vers = _versions()
    if best is not None:
        th, est = best
        conditions.append(ConditionRecord("2.2", est.value, est.trend, True,
                                          theta=th, eta=eta,
                                          per_octave=est.per_octave,
                                          octaves=est.octaves))
        return Verdict("FErgodic", abs(est.value), conditions, theta_trace,
                       sorted(caveats), echo, vers)
    if theta_trace:
        vals = [t for t in theta_trace if t["value"] is not None]
        if vals and not all(math.isfinite(t["value"]) for t in vals):
            caveats.add(CAVEAT_NON_STABILIZED)
    return Verdict("Inconclusive", 0.0, conditions, theta_trace,
                   sorted(caveats), echo, vers)


def corollary_13(alpha: float, gamma: float) -> str:
    """Exact shortcut for constant symmetric symbols: Recurrent iff
    alpha > 1 (alpha = 1 is outside the classification and rejected)."""
    if not 0.0 < alpha < 2.0:
        raise ValueError(f"alpha={alpha} outside (0, 2)")
    if gamma <= 0.0:
        raise ValueError(f"gamma={gamma} must be positive")
    if alpha == 1.0:
        raise ValueError("alpha = 1 is not classified by the sign of the "
                         "cotangent expression")
    return "Recurrent" if alpha > 1.0 else "Transient"
