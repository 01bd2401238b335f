"""Named self-check suites shared by the CLI `check` subcommand and the
test suite.

Each check returns a row dict: {id, description, observed, bound, passed,
...}.  The functions look the checked routines up dynamically on the
specfun module so a deliberately broken routine (fault injection in the
negative tests) is picked up.
"""

from __future__ import annotations

import math

import numpy as np

from . import specfun, generator

__all__ = ["specfun_suite", "generator_suite", "all_suites", "SUITES"]


def _row(check_id: str, description: str, observed: float, bound: float,
         passed: bool, **extra) -> dict:
    d = {"id": check_id, "description": description, "observed": observed,
         "bound": bound, "passed": bool(passed)}
    d.update(extra)
    return d


def specfun_suite(seed: int = 20260810) -> list[dict]:
    rng = np.random.default_rng(seed)
    rows = []

    xs = rng.uniform(0.1, 50.0, size=200)
    worst = 0.0
    for x in xs:
        lhs = specfun.gamma_fn(x + 1.0)
        rhs = x * specfun.gamma_fn(x)
        worst = max(worst, abs(lhs - rhs) / abs(rhs))
    rows.append(_row("gamma-recurrence", "Gamma(x+1) = x Gamma(x), relative",
                     worst, 1e-12, worst < 1e-12))

    xs = rng.uniform(0.02, 0.98, size=200)
    worst = 0.0
    for x in xs:
        lhs = specfun.gamma_fn(1.0 - x) * specfun.gamma_fn(x)
        rhs = math.pi / math.sin(math.pi * x)
        worst = max(worst, abs(lhs - rhs) / abs(rhs))
    rows.append(_row("gamma-reflection", "Gamma(1-x) Gamma(x) = pi/sin(pi x), relative",
                     worst, 1e-12, worst < 1e-12))

    xs = rng.uniform(0.1, 50.0, size=200)
    worst = 0.0
    for x in xs:
        worst = max(worst, abs(specfun.digamma(1.0 + x) - specfun.digamma(x) - 1.0 / x))
    rows.append(_row("digamma-recurrence", "psi(1+x) = psi(x) + 1/x, absolute",
                     worst, 1e-10, worst < 1e-10))

    xs = rng.uniform(0.05, 0.95, size=200)
    worst = 0.0
    for x in xs:
        lhs = specfun.digamma(1.0 - x)
        rhs = specfun.digamma(x) + math.pi / math.tan(math.pi * x)
        worst = max(worst, abs(lhs - rhs))
    rows.append(_row("digamma-reflection", "psi(1-x) = psi(x) + pi cot(pi x), absolute",
                     worst, 1e-10, worst < 1e-10))

    worst = 0.0
    for _ in range(100):
        b = float(rng.uniform(0.05, 1.95))
        if abs(b - 1.0) < 1e-3:
            b += 2e-3
        z = float(rng.uniform(-50.0, -1.0001))
        lhs = specfun.hyp2f1(1.0, b, b + 1.0, z)  # connection route for z < -1
        rhs = specfun._hyp2f1_euler(1.0, b, b + 1.0, z)  # direct integral route
        worst = max(worst, abs(lhs - rhs) / max(abs(rhs), 1e-30))
    rows.append(_row("hypergeom-connection",
                     "1/z connection value matches the direct integral, relative",
                     worst, 1e-9, worst < 1e-9))

    worst = 0.0
    for a in np.arange(0.3, 1.95, 0.1):
        a = float(round(a, 10))
        if abs(a - 1.0) < 0.01:
            continue
        worst = max(worst, abs(specfun.cot_series_check(a) - specfun.pi_cot_half(a)))
    rows.append(_row("cot-series", "partial-fraction series equals pi cot(pi a/2), absolute",
                     worst, 1e-8, worst < 1e-8))

    mono_ok = True
    worst_gap = math.inf
    for a in (1.1, 1.3, 1.5, 1.7, 1.9):
        vals = [specfun.e_const(a, f * a) for f in np.arange(0.1, 0.95, 0.1)]
        gaps = [y - x for x, y in zip(vals, vals[1:])]
        worst_gap = min(worst_gap, min(gaps))
        mono_ok = mono_ok and all(g > 0.0 for g in gaps)
    rows.append(_row("e-const-monotone",
                     "ergodic-side constant strictly increasing in theta (min gap)",
                     worst_gap, 0.0, mono_ok))

    mono_ok = True
    worst_gap = math.inf
    for a in (0.5, 0.9, 1.5):
        vals = [specfun.transient_const(a, t) for t in (0.1, 0.3, 0.5, 0.7, 0.9)]
        gaps = [x - y for x, y in zip(vals, vals[1:])]
        worst_gap = min(worst_gap, min(gaps))
        mono_ok = mono_ok and all(g > 0.0 for g in gaps)
    rows.append(_row("transient-const-monotone",
                     "transience-side constant strictly decreasing in theta (min gap)",
                     worst_gap, 0.0, mono_ok))
    return rows


def generator_suite() -> list[dict]:
    from .coeffs import SymbolTriple, validate_triple, c_from_values
    from .testfuncs import log_barrier
    from .generator import (QuadratureConfig, apply_generator_terms,
                            core_contribution, asymptotic_rhs)

    rows = list(generator.lemma_limit_checks())

    # compensated-core negligibility: scaled analytic core at x = 1e4
    for a in (0.7, 1.5):
        t = SymbolTriple.from_sources(repr(a), "0", "1")
        validate_triple(t)
        x = 1e4
        c = c_from_values(a, 1.0)
        scaled = (a / c) * (1.0 + x) ** a * core_contribution(t, log_barrier(), x, 1e-3)
        rows.append(_row("core-negligibility",
                         "scaled compensated core at x=1e4 (core radius 1e-3)",
                         abs(scaled), 1e-2, abs(scaled) < 1e-2, alpha=a))

    # even-symbol symmetry of the generator
    t = SymbolTriple.from_sources("1.4 + 0.2*cos(x)", "0", "1 + 0.5*cos(x)")
    validate_triple(t)
    q = QuadratureConfig(abs_tol=1e-10)
    worst = 0.0
    for x in (3.7, 21.0, 140.0):
        vp = apply_generator_terms(t, log_barrier(), x, q).value
        vm = apply_generator_terms(t, log_barrier(), -x, q).value
        worst = max(worst, abs(vp - vm))
    rows.append(_row("even-symbol-symmetry",
                     "A V(x) = A V(-x) for even symbols and even V, absolute",
                     worst, 5e-10, worst < 5e-10))

    # recurrent scaling against the closed asymptote at a moderate state
    t = SymbolTriple.from_sources("1.5", "0", "1")
    validate_triple(t)
    x = 1e3
    a, c = 1.5, c_from_values(1.5, 1.0)
    scale = (a / c) * (1.0 + x) ** a
    val = apply_generator_terms(t, log_barrier(), x,
                                QuadratureConfig(abs_tol=min(1e-9, 1e-4 / scale))).value
    resid = abs(scale * val - asymptotic_rhs(t, x, "recurrent"))
    rows.append(_row("recurrent-scaling",
                     "scaled generator vs closed asymptote at x=1e3, absolute",
                     resid, 0.05, resid < 0.05))
    return rows


SUITES = {"specfun": specfun_suite, "generator": generator_suite}


def all_suites() -> list[dict]:
    rows = []
    for name, fn in SUITES.items():
        for row in fn():
            row = dict(row)
            row["suite"] = name
            rows.append(row)
    return rows
