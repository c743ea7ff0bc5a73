"""Entropy and mutual-information kernels, reported in bits."""

from __future__ import annotations

import math

import numpy as np

from .source import Channel, INPUT_TOL

LN2 = math.log(2.0)


def as_pmf(values) -> np.ndarray:
    """Validate a probability vector (nonnegative, sums to 1 within 1e-10)."""
    p = np.asarray(values, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise ValueError("pmf must be a non-empty 1-D vector")
    if not np.all(np.isfinite(p)) or np.any(p < 0):
        raise ValueError("pmf entries must be finite and nonnegative")
    if abs(p.sum() - 1.0) > INPUT_TOL:
        raise ValueError(f"pmf sums to {p.sum()!r}, expected 1 within {INPUT_TOL}")
    return p


def binary_entropy(alpha: float) -> float:
    """H_b(alpha) = -alpha*log2(alpha) - (1-alpha)*log2(1-alpha), with 0*log0 = 0."""
    a = float(alpha)
    if not 0.0 <= a <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    if a == 0.0 or a == 1.0:
        return 0.0
    return -(a * math.log2(a) + (1.0 - a) * math.log2(1.0 - a))


def entropy(p) -> float:
    """Shannon entropy -sum p*log2(p) with the 0*log0 = 0 convention."""
    p = as_pmf(p)
    pos = p[p > 0]
    return float(-(pos * np.log2(pos)).sum())


def mutual_information(p_x, channel: Channel | np.ndarray) -> float:
    """I(X; Xhat) in bits for input pmf p_x and channel p(xhat|x).

    Terms with zero channel mass contribute 0; the result is clamped to be
    nonnegative (it can only go negative by float noise, within ~1e-12).
    """
    p = as_pmf(p_x)
    k = channel.k if isinstance(channel, Channel) else np.asarray(channel, dtype=float)
    if k.ndim != 2 or k.shape[0] != p.size:
        raise ValueError("channel rows must match the input alphabet")
    q = p @ k
    joint = p[:, None] * k
    mask = joint > 0
    ratio = np.ones_like(k)
    np.divide(k, q[None, :], out=ratio, where=mask)
    total = float((joint[mask] * np.log(ratio[mask])).sum() / LN2)
    return max(total, 0.0)
