"""Closed-form binary rate-distortion and numeric regime location.

For a binary source under Hamming distortion the unconstrained rate-distortion
curve is H_b(p) - H_b(D) up to D = p and zero beyond. With a finite
classification-error bound the curve follows that closed form while the
classification constraint is slack, then flattens onto a constant plateau once
it binds, and may or may not reach zero. ``locate_regimes`` finds those
boundaries by dense sweeping plus bisection refinement; nothing is derived
symbolically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .classify import BinaryClassifier
from .info import binary_entropy
from .solver import InfeasibleBounds, SolverConfig, solve_constrained
from .source import DistortionMeasure, MixtureSource

AGREE_TOL_BITS = 1e-3  # closed-form agreement threshold defining the first regime
ZERO_RATE_BITS = 1e-4  # rate below this counts as the zero regime
FLAT_TOL_BITS = 1e-3  # max rate spread tolerated across the plateau
BOUNDARY_TOL_D = 1e-4  # bisection accuracy for regime boundaries


class PlateauNotFound(Exception):
    """The middle regime is not flat; no plateau to report."""


@dataclass(frozen=True, eq=False)
class BernoulliRegimes:
    """Regime boundaries of the swept curve at a fixed error bound.

    d1: largest distortion bound where the curve still matches the closed
    form; d2: smallest bound with (numerically) zero rate, inf when the
    plateau never dies out; plateau_rate_bits: constant rate between them
    (0 when has_plateau is False).
    """

    p: float
    e_bound: float
    d1: float
    d2: float
    plateau_rate_bits: float
    has_plateau: bool
    d_values: np.ndarray
    rate_values: np.ndarray

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "e_bound": self.e_bound,
            "d1": self.d1,
            "d2": self.d2,
            "plateau_rate_bits": self.plateau_rate_bits,
            "has_plateau": self.has_plateau,
            "curve": [[float(d), float(r)]
                      for d, r in zip(self.d_values, self.rate_values)],
        }


def rd_closed_form(p: float, d_bound: float) -> float:
    """Binary-source rate-distortion under Hamming distortion, in bits.

    H_b(p) - H_b(D) for D < p, zero for D >= p. Requires 0 < p <= 1/2.
    """
    p = float(p)
    if not 0.0 < p <= 0.5:
        raise ValueError("p must lie in (0, 0.5]")
    d = float(d_bound)
    if math.isnan(d) or d < 0:
        raise ValueError("distortion bound must be nonnegative")
    if d >= p:
        return 0.0
    return binary_entropy(p) - binary_entropy(d)


def _flat_segment(rates: np.ndarray) -> tuple[bool, float]:
    """Mean of a segment required to be flat within FLAT_TOL_BITS."""
    if rates.size == 0:
        return False, 0.0
    spread = float(rates.max() - rates.min())
    if spread >= FLAT_TOL_BITS:
        raise PlateauNotFound(
            f"middle-regime rate varies by {spread:.6g} bits "
            f"(flatness threshold {FLAT_TOL_BITS:g})")
    return True, float(rates.mean())


def locate_regimes(source: MixtureSource, clf: BinaryClassifier, e_bound,
                   cfg: SolverConfig | None = None,
                   sweep_points: int = 200) -> BernoulliRegimes:
    """Sweep distortion bounds at a fixed error bound and locate the regimes.

    Binary alphabets with Hamming distortion only. Boundaries are refined by
    bisection to 1e-4 in the bound. An unconstrained (infinite) error bound
    degenerates to the closed form: d1 = d2 = p and no plateau.
    """
    if source.n != 2 or clf.m != 2:
        raise ValueError("regime location is defined for binary alphabets")
    if sweep_points < 8:
        raise ValueError("sweep_points too small to resolve regimes")
    cfg = cfg or SolverConfig()
    delta = DistortionMeasure.hamming(2)
    marg = source.marginal()
    p = float(marg.min())
    if p <= 0.0:
        raise ValueError("degenerate source: marginal must be strictly positive")
    e_bound = float(e_bound)
    if math.isnan(e_bound) or e_bound < 0:
        raise ValueError("e_bound must be nonnegative (or inf)")

    def rate_at(d: float) -> float:
        try:
            return solve_constrained(source, delta, clf, d, e_bound, cfg).rate_bits
        except InfeasibleBounds:
            return math.inf

    d_max = 1.5 * (p if math.isinf(e_bound) else max(p, e_bound))
    ds = np.linspace(0.0, d_max, sweep_points)
    rates = np.array([rate_at(float(d)) for d in ds])

    if math.isinf(e_bound):
        return BernoulliRegimes(p=p, e_bound=e_bound, d1=p, d2=p,
                                plateau_rate_bits=0.0, has_plateau=False,
                                d_values=ds, rate_values=rates)

    feasible = np.isfinite(rates)
    if not feasible.any():
        raise InfeasibleBounds(f"error bound {e_bound:.9g} is unreachable at every distortion bound")
    closed = np.array([rd_closed_form(p, float(d)) for d in ds])
    agree = feasible & (np.abs(rates - closed) < AGREE_TOL_BITS)

    def refine(lo: float, hi: float, predicate) -> tuple[float, float]:
        """Shrink [lo, hi] with predicate(lo) true, predicate(hi) false."""
        while hi - lo > BOUNDARY_TOL_D:
            mid = 0.5 * (lo + hi)
            if predicate(mid):
                lo = mid
            else:
                hi = mid
        return lo, hi

    # d2: smallest bound whose rate has hit (numerical) zero
    zero_idx = [i for i in range(ds.size) if feasible[i] and rates[i] < ZERO_RATE_BITS]
    if zero_idx:
        zi = zero_idx[0]
        if zi > 0 and feasible[zi - 1]:
            _, d2 = refine(float(ds[zi - 1]), float(ds[zi]),
                           lambda d: rate_at(d) >= ZERO_RATE_BITS)
        else:
            d2 = float(ds[zi])
    else:
        d2 = math.inf

    # d1: end of the closed-form regime
    bad = [i for i in range(ds.size) if feasible[i] and not agree[i]]
    if not bad:
        d1 = min(d2, float(ds[-1]))
        return BernoulliRegimes(p=p, e_bound=e_bound, d1=d1, d2=d2,
                                plateau_rate_bits=0.0, has_plateau=False,
                                d_values=ds, rate_values=rates)
    fb = bad[0]
    if fb > 0 and agree[fb - 1]:
        d1, _ = refine(float(ds[fb - 1]), float(ds[fb]),
                       lambda d: abs(rate_at(d) - rd_closed_form(p, d)) < AGREE_TOL_BITS)
    else:
        d1 = 0.0
    d1 = min(d1, d2)

    spacing = float(ds[1] - ds[0])
    mid_mask = feasible & (ds > d1 + 2 * spacing) & (rates >= ZERO_RATE_BITS)
    has_plateau, plateau_rate = _flat_segment(rates[mid_mask])
    return BernoulliRegimes(p=p, e_bound=e_bound, d1=d1, d2=d2,
                            plateau_rate_bits=plateau_rate, has_plateau=has_plateau,
                            d_values=ds, rate_values=rates)
