"""Summary statistics appended to prompts in WITH_STATS mode."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigError, EmptyInput

DEFAULT_ENTROPY_BINS = 10


@dataclass(frozen=True)
class SummaryStats:
    """The statistical feature vector of one signal.

    Moments are population moments (divide by n); kurtosis is excess
    (normal = 0). Entropy is histogram Shannon entropy in nats.
    """

    mean: float
    variance: float
    stddev: float
    min: float
    max: float
    skewness: float
    kurtosis: float
    entropy: float

    def as_pairs(self) -> list[tuple[str, float]]:
        """(display name, value) pairs in canonical prompt order."""
        return [
            ("Mean", self.mean),
            ("Variance", self.variance),
            ("Stddev", self.stddev),
            ("Min", self.min),
            ("Max", self.max),
            ("Skewness", self.skewness),
            ("Kurtosis", self.kurtosis),
            ("Entropy", self.entropy),
        ]


def histogram_entropy(x: Sequence[float], bins: int = DEFAULT_ENTROPY_BINS) -> float:
    """Shannon entropy (natural log) of occupancy over equal-width bins.

    Bins span [min, max]; the maximum value lands in the last bin; empty bins
    contribute nothing. A constant series has zero entropy.
    """
    if bins < 1:
        raise ConfigError(f"bins must be >= 1, got {bins}")
    arr = np.asarray(x, dtype=np.float64)
    if arr.size == 0:
        raise EmptyInput("histogram_entropy needs at least one value")
    lo, hi = float(arr.min()), float(arr.max())
    if lo == hi:
        return 0.0
    counts, _ = np.histogram(arr, bins=bins, range=(lo, hi))
    p = counts[counts > 0] / arr.size
    return float(-(p * np.log(p)).sum())


def summary_stats(x: Sequence[float], entropy_bins: int = DEFAULT_ENTROPY_BINS) -> SummaryStats:
    """Compute the full feature vector of a signal.

    A zero-variance series gets skewness, kurtosis and entropy of 0 by
    definition.
    """
    arr = np.asarray(x, dtype=np.float64)
    if arr.size == 0:
        raise EmptyInput("summary_stats needs at least one value")
    mean = float(arr.mean())
    centered = arr - mean
    m2 = float((centered**2).mean())
    if m2 == 0.0:
        return SummaryStats(
            mean=mean,
            variance=0.0,
            stddev=0.0,
            min=float(arr.min()),
            max=float(arr.max()),
            skewness=0.0,
            kurtosis=0.0,
            entropy=0.0,
        )
    m3 = float((centered**3).mean())
    m4 = float((centered**4).mean())
    return SummaryStats(
        mean=mean,
        variance=m2,
        stddev=math.sqrt(m2),
        min=float(arr.min()),
        max=float(arr.max()),
        skewness=m3 / m2**1.5,
        kurtosis=m4 / m2**2 - 3.0,
        entropy=histogram_entropy(arr, bins=entropy_bins),
    )
