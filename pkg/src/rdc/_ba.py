"""Alternating-minimization kernel for the penalized rate objective.

Minimizes I(X;Xhat) + lam_d * E[delta] + lam_e * E[w] over row-stochastic
channels (all information quantities in nats here). Each iteration updates the
output marginal from the channel, then the channel rows against the tilted
marginal q(xhat) * exp(-lam_d*delta - lam_e*w); the objective is non-increasing
across iterations.

The kernel is written as plain loops so numba can compile it; without numba the
same function runs as interpreted Python (set RDC_DISABLE_NUMBA=1 to force
that, e.g. for debugging).
"""

from __future__ import annotations

import math
import os

import numpy as np

EXP_FLOOR = 1e-300  # clamp for underflowing multiplier tilts


def _descend(p, delta, weights, lam_d, lam_e, tol, max_iters, trace):
    """Run the alternating updates from the uniform channel.

    p: (n,) strictly positive marginal; delta, weights: (n, m) costs;
    trace: (max_iters + 1,) output buffer for the per-iteration objective.
    Returns (channel, rate_nats, distortion, class_error, iters, converged).
    """
    n, m = delta.shape
    c = np.empty((n, m))
    for i in range(n):
        # row costs are shifted by their minimum before exponentiating: the
        # channel update renormalizes rows, so the shift is exact, and it
        # keeps large-multiplier tilts from underflowing wholesale
        base = lam_d * delta[i, 0] + lam_e * weights[i, 0]
        for j in range(1, m):
            cost = lam_d * delta[i, j] + lam_e * weights[i, j]
            if cost < base:
                base = cost
        for j in range(m):
            v = math.exp(base - (lam_d * delta[i, j] + lam_e * weights[i, j]))
            c[i, j] = v if v > EXP_FLOOR else EXP_FLOOR

    k = np.full((n, m), 1.0 / m)
    q = np.empty(m)
    for j in range(m):
        acc = 0.0
        for i in range(n):
            acc += p[i] * k[i, j]
        q[j] = acc

    obj_prev = 0.0
    for i in range(n):
        for j in range(m):
            kij = k[i, j]
            if kij > 0.0:
                obj_prev += p[i] * kij * (
                    math.log(kij / q[j]) + lam_d * delta[i, j] + lam_e * weights[i, j]
                )
    trace[0] = obj_prev

    iters = 0
    converged = False
    obj = obj_prev
    while iters < max_iters:
        iters += 1
        # channel update against the tilted marginal
        for i in range(n):
            s = 0.0
            for j in range(m):
                kij = q[j] * c[i, j]
                k[i, j] = kij
                s += kij
            if s > 0.0:
                inv = 1.0 / s
                for j in range(m):
                    k[i, j] *= inv
            else:
                # every entry underflowed; take the cost-minimizing output
                jbest = 0
                best = lam_d * delta[i, 0] + lam_e * weights[i, 0]
                for j in range(1, m):
                    cost = lam_d * delta[i, j] + lam_e * weights[i, j]
                    if cost < best:
                        best = cost
                        jbest = j
                for j in range(m):
                    k[i, j] = 0.0
                k[i, jbest] = 1.0
        # marginal update
        for j in range(m):
            acc = 0.0
            for i in range(n):
                acc += p[i] * k[i, j]
            q[j] = acc
        # penalized objective of the current channel
        obj = 0.0
        for i in range(n):
            for j in range(m):
                kij = k[i, j]
                if kij > 0.0:
                    obj += p[i] * kij * (
                        math.log(kij / q[j]) + lam_d * delta[i, j] + lam_e * weights[i, j]
                    )
        trace[iters] = obj
        if obj_prev - obj < tol:
            converged = True
            break
        obj_prev = obj

    rate = 0.0
    dist = 0.0
    err = 0.0
    for i in range(n):
        for j in range(m):
            kij = k[i, j]
            if kij > 0.0:
                rate += p[i] * kij * math.log(kij / q[j])
                dist += p[i] * kij * delta[i, j]
                err += p[i] * kij * weights[i, j]
    if rate < 0.0:
        rate = 0.0
    return k, rate, dist, err, iters, converged


if not os.environ.get("RDC_DISABLE_NUMBA"):
    try:
        from numba import njit

        _descend = njit(cache=True)(_descend)
    except ImportError:  # pragma: no cover - numba is a declared dependency
        pass
