"""Discrete two-class mixture sources, distortion measures, and channels.

A mixture source emits a symbol from one of two classes; the class priors and
the class-conditional pmfs determine the marginal. Channels are row-stochastic
conditional distributions of the reconstruction given the source symbol, and
everything downstream (distortion, classification error, mutual information)
is linear or convex in the channel.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

INPUT_TOL = 1e-10  # slack for user-supplied probabilities
DERIVED_TOL = 1e-12  # slack required of internally derived quantities


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr, dtype=float)
    arr.setflags(write=False)
    return arr


def _as_pmf_input(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError(f"{name} must be a non-empty 1-D probability vector")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    if np.any(arr < -INPUT_TOL):
        raise ValueError(f"{name} has negative entries")
    arr = np.clip(arr, 0.0, None)
    total = arr.sum()
    if abs(total - 1.0) > INPUT_TOL:
        raise ValueError(f"{name} sums to {total!r}, expected 1 within {INPUT_TOL}")
    return arr / total


@dataclass(frozen=True, eq=False)
class MixtureSource:
    """Two-class discrete source: priors and class-conditional pmfs.

    Inputs are validated at 1e-10 and renormalized, so the induced marginal
    ``prior1*p_x1 + prior2*p_x2`` sums to 1 within 1e-12 exactly as stored.
    """

    prior1: float
    prior2: float
    p_x1: np.ndarray
    p_x2: np.ndarray

    def __post_init__(self):
        p1, p2 = float(self.prior1), float(self.prior2)
        if p1 < 0 or p2 < 0:
            raise ValueError("priors must be nonnegative")
        if abs(p1 + p2 - 1.0) > INPUT_TOL:
            raise ValueError(f"priors sum to {p1 + p2!r}, expected 1 within {INPUT_TOL}")
        scale = p1 + p2
        object.__setattr__(self, "prior1", p1 / scale)
        object.__setattr__(self, "prior2", p2 / scale)
        x1 = _as_pmf_input(self.p_x1, "p_x1")
        x2 = _as_pmf_input(self.p_x2, "p_x2")
        if x1.shape != x2.shape:
            raise ValueError("p_x1 and p_x2 must have the same length")
        object.__setattr__(self, "p_x1", _freeze(x1))
        object.__setattr__(self, "p_x2", _freeze(x2))

    @property
    def n(self) -> int:
        return self.p_x1.size

    def marginal(self) -> np.ndarray:
        return self.prior1 * self.p_x1 + self.prior2 * self.p_x2

    def support(self) -> np.ndarray:
        """Indices of symbols with positive marginal probability."""
        return np.flatnonzero(self.marginal() > 0.0)

    @classmethod
    def bernoulli(cls, p: float) -> "MixtureSource":
        """Class-per-symbol binary source whose marginal is Bernoulli(p).

        Class 1 always emits symbol 0, class 2 always emits symbol 1, with
        priors (1-p, p).
        """
        if not 0.0 < p < 1.0:
            raise ValueError("p must lie strictly inside (0, 1)")
        return cls(prior1=1.0 - p, prior2=p, p_x1=[1.0, 0.0], p_x2=[0.0, 1.0])


@dataclass(frozen=True, eq=False)
class DistortionMeasure:
    """Nonnegative pairwise distortion matrix delta[x, xhat]."""

    delta: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.delta, dtype=float)
        if d.ndim != 2 or d.size == 0:
            raise ValueError("distortion matrix must be 2-D and non-empty")
        if not np.all(np.isfinite(d)) or np.any(d < 0):
            raise ValueError("distortion entries must be finite and nonnegative")
        object.__setattr__(self, "delta", _freeze(d))

    @property
    def n(self) -> int:
        return self.delta.shape[0]

    @property
    def m(self) -> int:
        return self.delta.shape[1]

    @classmethod
    def hamming(cls, n: int) -> "DistortionMeasure":
        """0/1 distortion; requires equal source and reconstruction alphabets."""
        if n < 1:
            raise ValueError("alphabet size must be positive")
        return cls(1.0 - np.eye(n))


@dataclass(frozen=True, eq=False)
class Channel:
    """Row-stochastic matrix k[x, xhat] = p(xhat | x)."""

    k: np.ndarray

    def __post_init__(self):
        k = np.asarray(self.k, dtype=float)
        if k.ndim != 2 or k.size == 0:
            raise ValueError("channel matrix must be 2-D and non-empty")
        if np.any(k < 0) or not np.all(np.isfinite(k)):
            raise ValueError("channel entries must be finite and nonnegative")
        rows = k.sum(axis=1)
        if np.any(np.abs(rows - 1.0) > INPUT_TOL):
            raise ValueError("channel rows must sum to 1 within 1e-10")
        object.__setattr__(self, "k", _freeze(k))

    @property
    def n(self) -> int:
        return self.k.shape[0]

    @property
    def m(self) -> int:
        return self.k.shape[1]

    @classmethod
    def identity(cls, n: int) -> "Channel":
        return cls(np.eye(n))

    @classmethod
    def uniform(cls, n: int, m: int) -> "Channel":
        return cls(np.full((n, m), 1.0 / m))

    @classmethod
    def constant(cls, row, n: int) -> "Channel":
        """All rows equal to the given output distribution."""
        r = _as_pmf_input(row, "row")
        return cls(np.tile(r, (n, 1)))

    @classmethod
    def binary_symmetric(cls, flip: float) -> "Channel":
        if not 0.0 <= flip <= 1.0:
            raise ValueError("flip probability must lie in [0, 1]")
        return cls(np.array([[1.0 - flip, flip], [flip, 1.0 - flip]]))


def marginal(source: MixtureSource) -> np.ndarray:
    """Induced source marginal prior1*p_x1 + prior2*p_x2."""
    return source.marginal()


def propagate(source: MixtureSource, channel: Channel):
    """Push both class-conditionals and the marginal through the channel.

    Returns (p_out1, p_out2, p_out) with p_out = prior1*p_out1 + prior2*p_out2.
    """
    if channel.n != source.n:
        raise ValueError(f"channel has {channel.n} rows, source has {source.n} symbols")
    out1 = source.p_x1 @ channel.k
    out2 = source.p_x2 @ channel.k
    return out1, out2, source.prior1 * out1 + source.prior2 * out2


def expected_distortion(
    source: MixtureSource, channel: Channel, delta: DistortionMeasure
) -> float:
    """Mean pairwise distortion of the reconstruction."""
    if channel.n != source.n or delta.delta.shape != channel.k.shape:
        raise ValueError("source, channel, and distortion dimensions are inconsistent")
    return float(source.marginal() @ (channel.k * delta.delta).sum(axis=1))


@dataclass(frozen=True, eq=False)
class SourceSpec:
    """A source file's content: source, distortion measure, classifier request.

    ``classifier_region`` is either a list of reconstruction indices or the
    string "bayes" (resolve against the clean source with the identity
    channel).
    """

    source: MixtureSource
    distortion: DistortionMeasure
    classifier_region: object  # list[int] | "bayes"

    def canonical_dict(self) -> dict:
        region = self.classifier_region
        if not isinstance(region, str):
            region = sorted(int(i) for i in region)
        return {
            "prior1": self.source.prior1,
            "p_x1": self.source.p_x1.tolist(),
            "p_x2": self.source.p_x2.tolist(),
            "distortion": self.distortion.delta.tolist(),
            "classifier_region": region,
        }

    def fingerprint(self) -> str:
        blob = json.dumps(self.canonical_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


def load_source_spec(spec) -> SourceSpec:
    """Parse a source specification from a path, JSON text mapping, or dict.

    Schema: {"prior1": float, "p_x1": [float], "p_x2": [float],
    "distortion": "hamming" | [[float]], "classifier_region": [int] | "bayes"}.
    Alphabet sizes are inferred from array lengths.
    """
    if isinstance(spec, (str, Path)):
        with open(spec) as fh:
            spec = json.load(fh)
    if not isinstance(spec, dict):
        raise ValueError("source spec must be a JSON object")
    missing = {"prior1", "p_x1", "p_x2", "distortion", "classifier_region"} - set(spec)
    if missing:
        raise ValueError(f"source spec missing keys: {sorted(missing)}")
    prior1 = float(spec["prior1"])
    if not 0.0 <= prior1 <= 1.0:
        raise ValueError("prior1 must lie in [0, 1]")
    source = MixtureSource(
        prior1=prior1, prior2=1.0 - prior1, p_x1=spec["p_x1"], p_x2=spec["p_x2"]
    )
    dist = spec["distortion"]
    if isinstance(dist, str):
        if dist != "hamming":
            raise ValueError(f"unknown distortion name: {dist!r}")
        distortion = DistortionMeasure.hamming(source.n)
    else:
        distortion = DistortionMeasure(np.asarray(dist, dtype=float))
        if distortion.n != source.n:
            raise ValueError("distortion row count must match the source alphabet")
    region = spec["classifier_region"]
    if isinstance(region, str):
        if region != "bayes":
            raise ValueError(f"unknown classifier region: {region!r}")
    else:
        region = [int(i) for i in region]
        bad = [i for i in region if not 0 <= i < distortion.m]
        if bad:
            raise ValueError(f"classifier region indices out of range: {bad}")
    return SourceSpec(source=source, distortion=distortion, classifier_region=region)
