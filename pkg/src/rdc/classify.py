"""Fixed binary classifiers on the reconstruction alphabet.

A classifier is an acceptance region: reconstructions inside the region are
labeled class 1, the rest class 2. Its error rate is linear in the channel,
which lets it double as a second distortion measure via a per-pair weight
matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .source import Channel, MixtureSource, propagate


@dataclass(frozen=True)
class BinaryClassifier:
    """Acceptance region over reconstruction indices {0..m-1}; may be empty or full."""

    m: int
    region: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("alphabet size must be positive")
        region = frozenset(int(i) for i in self.region)
        if any(not 0 <= i < self.m for i in region):
            raise ValueError("region indices must lie in [0, m)")
        object.__setattr__(self, "region", region)

    def indicator(self) -> np.ndarray:
        """Length-m 0/1 vector marking region membership."""
        ind = np.zeros(self.m)
        ind[sorted(self.region)] = 1.0
        return ind


@dataclass(frozen=True, eq=False)
class ErrorWeightMatrix:
    """Per-pair weights w[x, xhat] whose channel average equals the error rate.

    For every channel K: sum_x p(x) sum_xhat K[x,xhat] w[x,xhat] equals
    error_rate(source, K, clf), exactly (both sides are the same bilinear
    form).
    """

    w: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.w, dtype=float)
        if w.ndim != 2 or np.any(w < 0) or not np.all(np.isfinite(w)):
            raise ValueError("weight matrix must be 2-D, finite, nonnegative")
        w = np.ascontiguousarray(w)
        w.setflags(write=False)
        object.__setattr__(self, "w", w)


def error_rate(source: MixtureSource, channel: Channel, clf: BinaryClassifier) -> float:
    """Probability that the classifier mislabels the reconstruction.

    prior2 * P(reconstruction in region | class 2) +
    prior1 * P(reconstruction not in region | class 1).
    """
    if clf.m != channel.m:
        raise ValueError("classifier and channel reconstruction alphabets differ")
    out1, out2, _ = propagate(source, channel)
    ind = clf.indicator()
    err = source.prior2 * float(out2 @ ind) + source.prior1 * float(out1 @ (1.0 - ind))
    return min(max(err, 0.0), 1.0)


def bayes_region(source: MixtureSource, channel: Channel) -> BinaryClassifier:
    """Error-minimizing acceptance region for the given channel's outputs.

    Includes every xhat with prior1*p_out1(xhat) >= prior2*p_out2(xhat); ties
    go to class 1.
    """
    out1, out2, _ = propagate(source, channel)
    keep = np.flatnonzero(source.prior1 * out1 >= source.prior2 * out2)
    return BinaryClassifier(m=channel.m, region=frozenset(int(i) for i in keep))


def weight_matrix(source: MixtureSource, clf: BinaryClassifier) -> ErrorWeightMatrix:
    """Rewrite the error rate as an expected pairwise cost.

    w[x, xhat] = (prior2*p_x2(x)*[xhat in region] +
                  prior1*p_x1(x)*[xhat not in region]) / p_X(x).

    Requires a strictly positive marginal: a zero-mass symbol has no defined
    weight row. Drop such symbols before calling (the solver does).
    """
    p = source.marginal()
    if np.any(p <= 0.0):
        raise ValueError("weight matrix undefined for zero-marginal symbols; restrict to the support first")
    ind = clf.indicator()
    num = (
        source.prior2 * source.p_x2[:, None] * ind[None, :]
        + source.prior1 * source.p_x1[:, None] * (1.0 - ind)[None, :]
    )
    return ErrorWeightMatrix(num / p[:, None])
