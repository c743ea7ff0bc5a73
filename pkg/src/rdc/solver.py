"""Minimum-rate solver under distortion and classification-error bounds.

The penalized objective I + lam_d*E[delta] + lam_e*eps is minimized by the
alternating kernel in ``_ba``; bound-constrained solves wrap it in a nested
multiplier bisection (outer on the distortion multiplier, inner on the
classification multiplier, either skipped while its constraint is slack at
multiplier zero). Achieved distortion and error are non-increasing in their
multipliers, so each bisection brackets its bound; the feasible-side endpoint
is returned, so reported points always satisfy their bounds up to
``constraint_tol``.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, asdict
from datetime import datetime, timezone

import numpy as np

from ._ba import _descend
from .classify import BinaryClassifier, ErrorWeightMatrix
from .info import LN2
from .source import Channel, DistortionMeasure, MixtureSource, SourceSpec
from .surface import RdcSurface

RATE_GAP_TOL_BITS = 2e-5  # stop bisecting once the bracketing rates agree this closely
BRACKET_REL_TOL = 1e-9  # relative multiplier-bracket collapse


class InfeasibleBounds(Exception):
    """No channel meets the requested distortion/classification bounds."""


@dataclass(frozen=True)
class SolverConfig:
    inner_tol: float = 1e-9  # objective decrease per iteration, nats
    max_inner_iters: int = 20000
    constraint_tol: float = 1e-4  # feasibility slack for the outer search
    multiplier_max: float = 1e4
    outer_max_iters: int = 60  # bisection steps per multiplier

    def __post_init__(self):
        for name in ("inner_tol", "max_inner_iters", "constraint_tol",
                     "multiplier_max", "outer_max_iters"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True, eq=False)
class RdcPoint:
    """One solved operating point; infeasible cells carry rate_bits = inf."""

    rate_bits: float
    distortion: float
    class_error: float
    lambda_d: float
    lambda_e: float
    iterations: int
    converged: bool
    channel: Channel | None = None

    @property
    def feasible(self) -> bool:
        return math.isfinite(self.rate_bits)

    def to_dict(self, include_channel: bool = False) -> dict:
        out = {
            "rate_bits": self.rate_bits,
            "distortion": self.distortion,
            "class_error": self.class_error,
            "lambda_d": self.lambda_d,
            "lambda_e": self.lambda_e,
            "iterations": self.iterations,
            "converged": self.converged,
        }
        if include_channel and self.channel is not None:
            out["channel"] = self.channel.k.tolist()
        return out


def infeasible_point() -> RdcPoint:
    inf = math.inf
    return RdcPoint(rate_bits=inf, distortion=inf, class_error=inf,
                    lambda_d=inf, lambda_e=inf, iterations=0, converged=False)


@dataclass(frozen=True, eq=False)
class _Problem:
    """Support-restricted arrays the kernel operates on."""

    p: np.ndarray  # (ns,) strictly positive
    delta: np.ndarray  # (ns, m)
    weights: np.ndarray  # (ns, m); zeros when no classifier cost applies
    support: np.ndarray  # indices into the full alphabet
    n_full: int
    m: int

    @classmethod
    def build(cls, source: MixtureSource, delta: DistortionMeasure,
              clf: BinaryClassifier) -> "_Problem":
        if delta.n != source.n:
            raise ValueError("distortion rows must match the source alphabet")
        if clf.m != delta.m:
            raise ValueError("classifier and distortion reconstruction alphabets differ")
        marg = source.marginal()
        support = np.flatnonzero(marg > 0.0)
        if support.size == 0:
            raise ValueError("source marginal has no support")
        p = marg[support]
        ind = clf.indicator()
        num = (source.prior2 * source.p_x2[support, None] * ind[None, :]
               + source.prior1 * source.p_x1[support, None] * (1.0 - ind)[None, :])
        weights = num / p[:, None]
        return cls(
            p=np.ascontiguousarray(p),
            delta=np.ascontiguousarray(delta.delta[support]),
            weights=np.ascontiguousarray(weights),
            support=support,
            n_full=source.n,
            m=delta.m,
        )

    def embed_channel(self, k: np.ndarray) -> Channel:
        """Lift a support-sized channel to the full alphabet.

        Rows for zero-probability symbols never influence rate, distortion, or
        error; they are filled uniformly.
        """
        full = np.full((self.n_full, self.m), 1.0 / self.m)
        full[self.support] = k
        return Channel(full)


@dataclass(frozen=True, eq=False)
class _Eval:
    rate_nats: float
    dist: float
    err: float
    k: np.ndarray
    iters: int
    converged: bool


def _evaluate(prob: _Problem, lam_d: float, lam_e: float, cfg: SolverConfig) -> _Eval:
    trace = np.empty(cfg.max_inner_iters + 1)
    k, rate, dist, err, iters, converged = _descend(
        prob.p, prob.delta, prob.weights, lam_d, lam_e,
        cfg.inner_tol, cfg.max_inner_iters, trace)
    return _Eval(rate, dist, err, k, int(iters), bool(converged))


def _as_weight_array(weights, n: int, m: int) -> np.ndarray:
    if weights is None:
        return np.zeros((n, m))
    w = weights.w if isinstance(weights, ErrorWeightMatrix) else np.asarray(weights, dtype=float)
    if w.shape != (n, m):
        raise ValueError(f"weight matrix shape {w.shape} does not match ({n}, {m})")
    return w


def _check_bound(value, name: str) -> float:
    v = float(value)
    if math.isnan(v) or v < 0:
        raise ValueError(f"{name} must be nonnegative (or inf)")
    return v


def _check_multiplier(value, name: str) -> float:
    v = float(value)
    if not math.isfinite(v) or v < 0:
        raise ValueError(f"{name} must be finite and nonnegative")
    return v


def solve_lagrangian(source: MixtureSource, delta: DistortionMeasure, weights,
                     lambda_d: float, lambda_e: float,
                     cfg: SolverConfig | None = None, with_trace: bool = False):
    """Minimize I + lambda_d*E[delta] + lambda_e*E[w] for fixed multipliers.

    ``weights`` is an ErrorWeightMatrix, a raw (n, m) array, or None (no
    classification cost). Non-convergence within ``max_inner_iters`` is
    flagged on the returned point, never raised. With ``with_trace`` the
    per-iteration objective values (nats) are returned alongside the point.
    """
    cfg = cfg or SolverConfig()
    lam_d = _check_multiplier(lambda_d, "lambda_d")
    lam_e = _check_multiplier(lambda_e, "lambda_e")
    if delta.n != source.n:
        raise ValueError("distortion rows must match the source alphabet")
    w_full = _as_weight_array(weights, source.n, delta.m)
    marg = source.marginal()
    support = np.flatnonzero(marg > 0.0)
    prob = _Problem(
        p=np.ascontiguousarray(marg[support]),
        delta=np.ascontiguousarray(delta.delta[support]),
        weights=np.ascontiguousarray(w_full[support]),
        support=support,
        n_full=source.n,
        m=delta.m,
    )
    trace = np.empty(cfg.max_inner_iters + 1)
    k, rate, dist, err, iters, converged = _descend(
        prob.p, prob.delta, prob.weights, lam_d, lam_e,
        cfg.inner_tol, cfg.max_inner_iters, trace)
    point = RdcPoint(
        rate_bits=rate / LN2,
        distortion=dist,
        class_error=min(max(err, 0.0), 1.0),
        lambda_d=lam_d,
        lambda_e=lam_e,
        iterations=int(iters),
        converged=bool(converged),
        channel=prob.embed_channel(k),
    )
    if with_trace:
        return point, trace[: int(iters) + 1].copy()
    return point


def _bisect_multiplier(bound: float, evaluate, cfg: SolverConfig, what: str,
                       guess: float = 1.0, zero_eval=None):
    """Find the smallest multiplier whose achieved value meets ``bound``.

    ``evaluate(lam) -> (achieved, value_bits, payload)`` with achieved
    non-increasing and value_bits non-decreasing in lam. Returns
    (lam, payload) from the feasible side; raises InfeasibleBounds when even
    the multiplier cap leaves the bound violated beyond constraint_tol.
    """
    ach, val, pay = zero_eval if zero_eval is not None else evaluate(0.0)
    if ach <= bound:
        return 0.0, pay
    cap = cfg.multiplier_max
    lo, v_lo = 0.0, val
    hi = min(max(guess, 1e-3), cap)
    while True:
        ach_hi, v_hi, pay_hi = evaluate(hi)
        if ach_hi <= bound:
            break
        if hi >= cap:
            if ach_hi <= bound + cfg.constraint_tol:
                return hi, pay_hi
            raise InfeasibleBounds(
                f"{what} {bound:.9g} unreachable: best achieved {ach_hi:.9g} "
                f"at multiplier cap {cap:.9g}")
        lo, v_lo = hi, v_hi
        hi = min(hi * 4.0, cap)
    steps = 0
    while (steps < cfg.outer_max_iters
           and hi - lo > BRACKET_REL_TOL * max(1.0, hi)
           and v_hi - v_lo > RATE_GAP_TOL_BITS):
        mid = 0.5 * (lo + hi)
        ach, val, pay = evaluate(mid)
        if ach <= bound:
            hi, v_hi, pay_hi = mid, val, pay
        else:
            lo, v_lo = mid, val
        steps += 1
    return hi, pay_hi


def solve_constrained(source: MixtureSource, delta: DistortionMeasure,
                      clf: BinaryClassifier, d_bound, e_bound,
                      cfg: SolverConfig | None = None) -> RdcPoint:
    """Minimum rate subject to distortion <= d_bound and error <= e_bound.

    Either bound may be infinite; its multiplier is then pinned to zero. The
    returned point satisfies both bounds within ``constraint_tol``. Raises
    InfeasibleBounds when no channel can.
    """
    cfg = cfg or SolverConfig()
    d_bound = _check_bound(d_bound, "d_bound")
    e_bound = _check_bound(e_bound, "e_bound")
    prob = _Problem.build(source, delta, clf)
    le_guess = [1.0]

    def inner(lam_d: float):
        rec0 = _evaluate(prob, lam_d, 0.0, cfg)
        if math.isinf(e_bound) or rec0.err <= e_bound:
            return rec0, 0.0

        def eval_e(lam_e: float):
            rec = _evaluate(prob, lam_d, lam_e, cfg)
            return rec.err, (rec.rate_nats + lam_d * rec.dist) / LN2, rec

        zero = (rec0.err, (rec0.rate_nats + lam_d * rec0.dist) / LN2, rec0)
        lam_e, rec = _bisect_multiplier(
            e_bound, eval_e, cfg, "classification-error bound",
            guess=le_guess[0], zero_eval=zero)
        if lam_e > 0.0:
            le_guess[0] = lam_e
        return rec, lam_e

    if math.isinf(d_bound):
        rec, lam_e = inner(0.0)
        return _finish(prob, rec, 0.0, lam_e)

    def eval_d(lam_d: float):
        rec, lam_e = inner(lam_d)
        return rec.dist, rec.rate_nats / LN2, (rec, lam_e)

    lam_d, (rec, lam_e) = _bisect_multiplier(d_bound, eval_d, cfg, "distortion bound")
    return _finish(prob, rec, lam_d, lam_e)


def _finish(prob: _Problem, rec: _Eval, lam_d: float, lam_e: float) -> RdcPoint:
    return RdcPoint(
        rate_bits=rec.rate_nats / LN2,
        distortion=rec.dist,
        class_error=min(max(rec.err, 0.0), 1.0),
        lambda_d=lam_d,
        lambda_e=lam_e,
        iterations=rec.iters,
        converged=rec.converged,
        channel=prob.embed_channel(rec.k),
    )


def _validate_grid(grid, name: str) -> np.ndarray:
    g = np.asarray(grid, dtype=float)
    if g.ndim != 1 or g.size == 0:
        raise ValueError(f"{name} must be a non-empty 1-D grid")
    if np.any(np.isnan(g)) or np.any(g < 0):
        raise ValueError(f"{name} values must be nonnegative")
    if g.size > 1 and np.any(np.diff(g) <= 0):
        raise ValueError(f"{name} must be strictly increasing")
    return g


def _sweep_cell(args) -> RdcPoint:
    source, delta, clf, d, e, cfg = args
    try:
        point = solve_constrained(source, delta, clf, d, e, cfg)
    except InfeasibleBounds:
        return infeasible_point()
    # exports only need the achieved values
    return RdcPoint(**{**point.to_dict(), "channel": None})


def sweep_surface(source: MixtureSource, delta: DistortionMeasure,
                  clf: BinaryClassifier, d_grid, e_grid,
                  cfg: SolverConfig | None = None, jobs: int = 1) -> RdcSurface:
    """Solve every (d_bound, e_bound) grid cell into an RdcSurface.

    Infeasible cells are marked (rate_bits = inf), not dropped. Cells are
    independent; with jobs > 1 they are solved in worker processes, and the
    result ordering is by grid index either way.
    """
    cfg = cfg or SolverConfig()
    d_grid = _validate_grid(d_grid, "d_grid")
    e_grid = _validate_grid(e_grid, "e_grid")
    tasks = [(source, delta, clf, float(d), float(e), cfg)
             for d in d_grid for e in e_grid]
    if jobs is None or jobs < 1:
        raise ValueError("jobs must be a positive integer")
    if jobs == 1 or len(tasks) == 1:
        flat = [_sweep_cell(t) for t in tasks]
    else:
        chunk = max(1, len(tasks) // (int(jobs) * 4))
        with ProcessPoolExecutor(max_workers=int(jobs)) as pool:
            flat = list(pool.map(_sweep_cell, tasks, chunksize=chunk))
    points = [flat[i * e_grid.size:(i + 1) * e_grid.size] for i in range(d_grid.size)]
    region = sorted(int(i) for i in clf.region)
    spec = SourceSpec(source=source, distortion=delta, classifier_region=region)
    metadata = {
        "source_sha256": spec.fingerprint(),
        "solver_config": asdict(cfg),
        "created_utc": datetime.now(timezone.utc).isoformat(),
    }
    return RdcSurface(d_grid=d_grid, e_grid=e_grid, points=points, metadata=metadata)
