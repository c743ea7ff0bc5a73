"""Brute-force minimum-rate search on a simplex grid of channels.

Ground truth for tiny instances: every channel row is enumerated on a uniform
lattice, both constraints are checked with the same slack the main solver
uses, and the smallest mutual information among feasible channels is returned.
Exists solely to validate the iterative solver; it does not scale past toy
alphabets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .classify import BinaryClassifier
from .info import LN2
from .source import Channel, DistortionMeasure, MixtureSource

_CHUNK = 1 << 14


@dataclass(frozen=True)
class OracleConfig:
    resolution: int = 200  # lattice subdivisions per row parameter
    slack: float = 1e-4  # feasibility slack, matching SolverConfig.constraint_tol

    def __post_init__(self):
        if self.resolution < 2:
            raise ValueError("resolution must be at least 2")
        if self.slack <= 0:
            raise ValueError("slack must be positive")


@dataclass(frozen=True, eq=False)
class OracleResult:
    rate_bits: float
    channel: Channel | None
    feasible: bool


def _simplex_rows(m: int, steps: int) -> np.ndarray:
    """Lattice pmfs over m outputs: first m-1 coordinates are free multiples of
    1/steps (lexicographically ordered), the last is the residual."""
    if m == 1:
        return np.ones((1, 1))
    axes = [np.arange(steps + 1)] * (m - 1)
    free = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, m - 1)
    free = free[free.sum(axis=1) <= steps]
    rows = np.empty((free.shape[0], m))
    rows[:, : m - 1] = free / steps
    rows[:, m - 1] = (steps - free.sum(axis=1)) / steps
    return rows


def grid_search_rdc(source: MixtureSource, delta: DistortionMeasure,
                    clf: BinaryClassifier, d_bound, e_bound,
                    cfg: OracleConfig | None = None) -> OracleResult:
    """Exhaustive search over lattice channels for the minimum feasible rate.

    Requires at most 4 free channel parameters over the source support (e.g.
    2x2 or 2x3 instances). Ties in rate go to the lexicographically first
    channel in enumeration order, which makes the result deterministic.
    """
    cfg = cfg or OracleConfig()
    d_bound, e_bound = float(d_bound), float(e_bound)
    if math.isnan(d_bound) or d_bound < 0 or math.isnan(e_bound) or e_bound < 0:
        raise ValueError("bounds must be nonnegative (or inf)")
    if delta.n != source.n or clf.m != delta.m:
        raise ValueError("source, distortion, and classifier dimensions are inconsistent")
    marg = source.marginal()
    support = np.flatnonzero(marg > 0.0)
    p = marg[support]
    ns, m = support.size, delta.m
    if ns * (m - 1) > 4:
        raise ValueError(
            f"instance too large for exhaustive search: {ns}x{m} has "
            f"{ns * (m - 1)} free parameters (limit 4)")
    delta_r = delta.delta[support]
    ind = clf.indicator()
    num = (source.prior2 * source.p_x2[support, None] * ind[None, :]
           + source.prior1 * source.p_x1[support, None] * (1.0 - ind)[None, :])
    weights = num / p[:, None]

    rows = _simplex_rows(m, cfg.resolution)
    count = rows.shape[0]
    total = count ** ns
    row_dist = delta_r @ rows.T  # (ns, count): distortion of each row choice per symbol
    row_err = weights @ rows.T
    shape = (count,) * ns

    best_rate = math.inf
    best_flat = -1
    for start in range(0, total, _CHUNK):
        flat = np.arange(start, min(start + _CHUNK, total))
        multi = np.unravel_index(flat, shape)
        dist = np.zeros(flat.size)
        err = np.zeros(flat.size)
        for x in range(ns):
            dist += p[x] * row_dist[x, multi[x]]
            err += p[x] * row_err[x, multi[x]]
        feas = (dist <= d_bound + cfg.slack) & (err <= e_bound + cfg.slack)
        if not feas.any():
            continue
        sel = np.flatnonzero(feas)
        k = np.stack([rows[multi[x][sel]] for x in range(ns)], axis=1)  # (b, ns, m)
        q = np.einsum("x,bxm->bm", p, k)
        ratio = np.ones_like(k)
        np.divide(k, q[:, None, :], out=ratio, where=k > 0)
        info = np.einsum("x,bxm->b", p, np.where(k > 0, k * np.log(ratio), 0.0)) / LN2
        info = np.maximum(info, 0.0)
        local = int(np.argmin(info))
        if info[local] < best_rate:
            best_rate = float(info[local])
            best_flat = int(flat[sel[local]])
    if best_flat < 0:
        return OracleResult(rate_bits=math.inf, channel=None, feasible=False)
    multi = np.unravel_index(best_flat, shape)
    full = np.full((source.n, m), 1.0 / m)
    for x in range(ns):
        full[support[x]] = rows[int(multi[x])]
    return OracleResult(rate_bits=best_rate, channel=Channel(full), feasible=True)
