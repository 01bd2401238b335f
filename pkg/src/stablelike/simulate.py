"""Monte Carlo corroboration via a chain with state-frozen stable increments.

One step from state x at time refinement m draws a standard symmetric
alpha(x)-stable variable S (characteristic function exp(-|xi|^alpha)) and
moves to

    x  +  beta(x)/m  +  (gamma(x)/m)^(1/alpha(x)) * S,

i.e. the increment law has characteristic exponent p(x; xi)/m where
p(x; xi) = -i beta(x) xi + gamma(x) |xi|^alpha(x).  Time-rescaled
interpolations of this chain converge in law to the process the classifier
reasons about, so ensemble diagnostics (return fractions, occupation
fractions, tail quantiles) corroborate verdicts at desk scale.

Stable draws use the polar construction: with U uniform on (-pi/2, pi/2)
and W standard exponential,

    S = sin(alpha U)/cos(U)^(1/alpha) * (cos((1-alpha) U)/W)^((1-alpha)/alpha),

and S = tan(U) when alpha = 1.  Reproducibility: path p consumes the Philox
stream spawned from SeedSequence(seed).spawn(n_paths)[p]; ensembles are a
pure function of (triple, config).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .coeffs import SymbolTriple

__all__ = [
    "SimConfig",
    "PathEnsemble",
    "Diagnostics",
    "sample_symmetric_stable",
    "step_chain",
    "simulate_ensemble",
    "diagnostics",
    "ensemble_to_csv",
    "diagnostics_to_json_dict",
]

RNG_NAME = "philox"
_CHUNK = 4096


@dataclass(frozen=True)
class SimConfig:
    m: int = 100                  # time refinement; step size is 1/m
    horizon: float = 1000.0       # total time T; ceil(m*T) steps
    n_paths: int = 400
    seed: int = 0
    x0: float = 0.0
    compact_radius: float = 10.0  # K of the probed compact set [-K, K]
    record_stride: int = 100      # record every record_stride steps
    max_records: int = 2_000_000

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be >= 1")
        if self.horizon <= 0.0:
            raise ValueError("horizon must be positive")
        if self.n_paths < 1:
            raise ValueError("n_paths must be >= 1")
        if self.compact_radius <= 0.0:
            raise ValueError("compact_radius must be positive")
        if self.record_stride < 1:
            raise ValueError("record_stride must be >= 1")

    @property
    def n_steps(self) -> int:
        return int(math.ceil(self.m * self.horizon))

    @property
    def n_records(self) -> int:
        return self.n_steps // self.record_stride + 2  # t=0 and the terminal state

    def estimated_records(self) -> int:
        return self.n_paths * self.n_records


def _stable_from_uniforms(alpha, u, w):
    """Stable draws from uniforms u in (0,1) and exponentials w; vectorized,
    alpha may be scalar or an array matching u."""
    U = (np.asarray(u) - 0.5) * math.pi
    W = np.asarray(w)
    a = np.broadcast_to(np.asarray(alpha, dtype=float), U.shape)
    out = np.empty_like(U)
    cauchy = np.abs(a - 1.0) < 1e-12
    if np.any(cauchy):
        out[cauchy] = np.tan(U[cauchy])
    rest = ~cauchy
    if np.any(rest):
        ar, Ur, Wr = a[rest], U[rest], W[rest]
        s = np.sin(ar * Ur) / np.cos(Ur) ** (1.0 / ar)
        t = (np.cos((1.0 - ar) * Ur) / Wr) ** ((1.0 - ar) / ar)
        out[rest] = s * t
    return out


def sample_symmetric_stable(alpha, rng: np.random.Generator, size=None):
    """Draw from the symmetric stable law with characteristic function
    exp(-|xi|^alpha); scalar when size is None."""
    scalar = size is None
    n = 1 if scalar else size
    a = np.asarray(alpha, dtype=float)
    if np.any(a <= 0.0) or np.any(a >= 2.0):
        raise ValueError("alpha must lie in (0, 2)")
    u = rng.random(n)
    w = rng.standard_exponential(n)
    out = _stable_from_uniforms(np.broadcast_to(a, (n,)) if a.ndim == 0 else a, u, w)
    return float(out[0]) if scalar else out


def step_chain(triple: SymbolTriple, x: float, m: int, rng: np.random.Generator,
               draw: float | None = None) -> float:
    """One chain step from x.  `draw` substitutes the stable variable
    (diagnostic hook for drift-only checks)."""
    triple.require_validated()
    a = triple.alpha_at(x)
    b = triple.beta_at(x)
    g = triple.gamma_at(x)
    S = sample_symmetric_stable(a, rng) if draw is None else draw
    return x + b / m + (g / m) ** (1.0 / a) * S


@dataclass
class PathEnsemble:
    config: SimConfig
    record_times: np.ndarray          # shape (n_records,)
    records: np.ndarray               # shape (n_paths, n_records)
    terminal: np.ndarray              # shape (n_paths,)
    first_return_time: np.ndarray     # nan where no return happened
    occupation_steps: np.ndarray      # steps spent in [-K, K], full horizon
    occupation_steps_half: np.ndarray  # same over the first half horizon
    exited: np.ndarray                # bool: left [-2K, 2K] at least once
    returned: np.ndarray              # bool: re-entered [-K, K] after exit
    rng_stream_ids: list = field(default_factory=list)
    rng_name: str = RNG_NAME


def simulate_ensemble(triple: SymbolTriple, cfg: SimConfig) -> PathEnsemble:
    """Simulate cfg.n_paths independent trajectories of ceil(m*T) steps.

    Occupation and return statistics are accumulated at every step (not just
    at recorded strides).  Raises if the recording volume would exceed
    cfg.max_records before any work is done.
    """
    triple.require_validated()
    if cfg.estimated_records() > cfg.max_records:
        raise ResourceWarning(
            f"recording {cfg.estimated_records()} states exceeds the cap "
            f"{cfg.max_records}; raise record_stride or max_records")
    n_steps = cfg.n_steps
    n_paths = cfg.n_paths
    K = cfg.compact_radius
    ss = np.random.SeedSequence(entropy=cfg.seed)
    children = ss.spawn(n_paths)
    gens = [np.random.Generator(np.random.Philox(s)) for s in children]
    stream_ids = [list(s.spawn_key) for s in children]

    x = np.full(n_paths, float(cfg.x0))
    exited = np.zeros(n_paths, dtype=bool)
    returned = np.zeros(n_paths, dtype=bool)
    first_return_step = np.full(n_paths, -1, dtype=np.int64)
    occ = np.zeros(n_paths, dtype=np.int64)
    occ_half = np.zeros(n_paths, dtype=np.int64)
    half_steps = max(n_steps // 2, 1)

    rec_idx = [0]
    records = np.empty((n_paths, cfg.n_records), dtype=float)
    times = np.empty(cfg.n_records, dtype=float)

    def record(step: int, states: np.ndarray):
        i = rec_idx[0]
        records[:, i] = states
        times[i] = step / cfg.m
        rec_idx[0] += 1

    record(0, x)
    done = 0
    inv_m = 1.0 / cfg.m
    while done < n_steps:
        n = min(_CHUNK, n_steps - done)
        u = np.stack([g.random(n) for g in gens], axis=0)
        w = np.stack([g.standard_exponential(n) for g in gens], axis=0)
        for j in range(n):
            a = triple.alpha_at(x)
            b = triple.beta_at(x)
            g_ = triple.gamma_at(x)
            S = _stable_from_uniforms(a, u[:, j], w[:, j])
            x = x + b * inv_m + (g_ * inv_m) ** (1.0 / a) * S
            step = done + j + 1
            in_k = np.abs(x) <= K
            exited |= np.abs(x) > 2.0 * K
            new_return = exited & in_k & ~returned
            if np.any(new_return):
                first_return_step[new_return] = step
                returned |= new_return
            occ += in_k
            if step <= half_steps:
                occ_half += in_k
            if step % cfg.record_stride == 0:
                record(step, x)
        done += n
    if (n_steps % cfg.record_stride) != 0:
        record(n_steps, x)
    n_rec = rec_idx[0]
    frt = np.where(first_return_step >= 0, first_return_step / cfg.m, np.nan)
    return PathEnsemble(
        config=cfg,
        record_times=times[:n_rec].copy(),
        records=records[:, :n_rec].copy(),
        terminal=x.copy(),
        first_return_time=frt,
        occupation_steps=occ,
        occupation_steps_half=occ_half,
        exited=exited,
        returned=returned,
        rng_stream_ids=stream_ids,
    )


@dataclass
class Diagnostics:
    return_fraction: float
    return_fraction_se: float
    occupation_fraction: float
    occupation_fraction_se: float
    occupation_first_half: float
    tail_quantiles: dict        # {"0.5": ..., "0.9": ..., "0.99": ...} of |X_T|
    n_paths: int
    compact_radius: float
    from_records: bool = False  # True when K differed from the simulated one


def diagnostics(ensemble: PathEnsemble, K: float | None = None) -> Diagnostics:
    """Ensemble diagnostics for the compact set [-K, K].

    With the simulated radius (default) the exact per-step counters are
    used; for a different K the strided records are rescanned, which is an
    approximation flagged by from_records.
    """
    cfg = ensemble.config
    n = cfg.n_paths
    absT = np.abs(ensemble.terminal)
    qs = {str(q): float(np.quantile(absT, q)) for q in (0.5, 0.9, 0.99)}
    if K is None or K == cfg.compact_radius:
        K = cfg.compact_radius
        ret = ensemble.returned.astype(float)
        occ_frac = ensemble.occupation_steps / cfg.n_steps
        occ_half = ensemble.occupation_steps_half / max(cfg.n_steps // 2, 1)
        from_records = False
    else:
        recs = ensemble.records
        in_k = np.abs(recs) <= K
        out_2k = np.abs(recs) > 2.0 * K
        ret = np.zeros(n)
        for p in range(n):
            exit_idx = np.nonzero(out_2k[p])[0]
            if exit_idx.size and np.any(in_k[p, exit_idx[0]:]):
                ret[p] = 1.0
        occ_frac = in_k.mean(axis=1)
        half = recs.shape[1] // 2
        occ_half = in_k[:, :max(half, 1)].mean(axis=1)
        from_records = True
    rf = float(np.mean(ret))
    rf_se = float(np.std(ret, ddof=0) / math.sqrt(n))
    of = float(np.mean(occ_frac))
    of_se = float(np.std(occ_frac, ddof=0) / math.sqrt(n))
    return Diagnostics(
        return_fraction=rf,
        return_fraction_se=rf_se,
        occupation_fraction=of,
        occupation_fraction_se=of_se,
        occupation_first_half=float(np.mean(occ_half)),
        tail_quantiles=qs,
        n_paths=n,
        compact_radius=float(K),
        from_records=from_records,
    )


def ensemble_to_csv(ensemble: PathEnsemble, path: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["path_id", "step", "time", "state"])
        for p in range(ensemble.records.shape[0]):
            for i, t in enumerate(ensemble.record_times):
                w.writerow([p, int(round(t * ensemble.config.m)), repr(float(t)),
                            repr(float(ensemble.records[p, i]))])


def diagnostics_to_json_dict(d: Diagnostics) -> dict:
    return {
        "return_fraction": d.return_fraction,
        "return_fraction_se": d.return_fraction_se,
        "occupation_fraction": d.occupation_fraction,
        "occupation_fraction_se": d.occupation_fraction_se,
        "occupation_first_half": d.occupation_first_half,
        "tail_quantiles_abs_terminal": d.tail_quantiles,
        "n_paths": d.n_paths,
        "compact_radius": d.compact_radius,
        "from_records": d.from_records,
    }
