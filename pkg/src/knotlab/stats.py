"""Streaming moments, histograms, KS distance, and theoretical baselines.

MomentsReport accumulates central power sums up to order four with the
pairwise (Chan/Pebay) update formulas, so shard merges are associative and
agree with a single pass to floating-point accuracy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

__all__ = [
    "MomentsReport",
    "merge_moments",
    "Histogram1D",
    "Histogram2D",
    "ks_statistic",
    "logistic_cdf",
    "logistic_density",
    "baseline_for",
    "TheoreticalBaseline",
]


@dataclass
class MomentsReport:
    """Streaming mean/variance/3rd/4th central moments with merge support."""

    count: int = 0
    mean: float = 0.0
    m2: float = 0.0
    m3: float = 0.0
    m4: float = 0.0

    def push(self, x: float) -> None:
        n1 = self.count
        self.count = n = n1 + 1
        delta = x - self.mean
        dn = delta / n
        dn2 = dn * dn
        term1 = delta * dn * n1
        self.mean += dn
        self.m4 += (term1 * dn2 * (n * n - 3 * n + 3)
                    + 6 * dn2 * self.m2 - 4 * dn * self.m3)
        self.m3 += term1 * dn * (n - 2) - 3 * dn * self.m2
        self.m2 += term1

    @classmethod
    def from_values(cls, values) -> "MomentsReport":
        x = np.asarray(values, dtype=np.float64)
        n = x.size
        if n == 0:
            return cls()
        mu = float(x.mean())
        d = x - mu
        return cls(count=n, mean=mu, m2=float((d ** 2).sum()),
                   m3=float((d ** 3).sum()), m4=float((d ** 4).sum()))

    @property
    def variance(self) -> float:
        """Unbiased sample variance."""
        if self.count < 2:
            return 0.0
        return self.m2 / (self.count - 1)

    @property
    def std(self) -> float:
        return math.sqrt(max(self.variance, 0.0))

    @property
    def sem(self) -> float:
        """Standard error of the mean."""
        if self.count < 2:
            return float("inf")
        return self.std / math.sqrt(self.count)

    @property
    def third_central(self) -> float:
        return self.m3 / self.count if self.count else 0.0

    @property
    def fourth_central(self) -> float:
        return self.m4 / self.count if self.count else 0.0

    def to_obj(self) -> dict:
        return {
            "count": self.count,
            "mean": self.mean,
            "variance": self.variance,
            "sem": self.sem,
            "third_central": self.third_central,
            "fourth_central": self.fourth_central,
        }


def merge_moments(a: MomentsReport, b: MomentsReport) -> MomentsReport:
    """Combine two disjoint-sample reports (exact counts, stable moments)."""
    if a.count == 0:
        return MomentsReport(b.count, b.mean, b.m2, b.m3, b.m4)
    if b.count == 0:
        return MomentsReport(a.count, a.mean, a.m2, a.m3, a.m4)
    na, nb = a.count, b.count
    n = na + nb
    d = b.mean - a.mean
    d2 = d * d
    mean = a.mean + d * nb / n
    m2 = a.m2 + b.m2 + d2 * na * nb / n
    m3 = (a.m3 + b.m3
          + d ** 3 * na * nb * (na - nb) / (n * n)
          + 3.0 * d * (na * b.m2 - nb * a.m2) / n)
    m4 = (a.m4 + b.m4
          + d ** 4 * na * nb * (na * na - na * nb + nb * nb) / (n ** 3)
          + 6.0 * d2 * (na * na * b.m2 + nb * nb * a.m2) / (n * n)
          + 4.0 * d * (na * b.m3 - nb * a.m3) / n)
    return MomentsReport(n, mean, m2, m3, m4)


@dataclass
class Histogram1D:
    """Uniform-bin histogram with underflow/overflow; total count preserved."""

    lo: float
    hi: float
    bins: int
    counts: np.ndarray = field(default=None)
    underflow: int = 0
    overflow: int = 0

    def __post_init__(self):
        if self.hi <= self.lo or self.bins < 1:
            raise ValueError("need hi > lo and bins >= 1")
        if self.counts is None:
            self.counts = np.zeros(self.bins, dtype=np.int64)

    def add(self, values) -> None:
        x = np.asarray(values, dtype=np.float64)
        idx = np.floor((x - self.lo) / (self.hi - self.lo) * self.bins).astype(np.int64)
        self.underflow += int((idx < 0).sum())
        self.overflow += int((idx >= self.bins).sum())
        ok = (idx >= 0) & (idx < self.bins)
        np.add.at(self.counts, idx[ok], 1)

    @property
    def total(self) -> int:
        return int(self.counts.sum()) + self.underflow + self.overflow

    def merge(self, other: "Histogram1D") -> "Histogram1D":
        if (self.lo, self.hi, self.bins) != (other.lo, other.hi, other.bins):
            raise ValueError("incompatible histograms")
        return Histogram1D(self.lo, self.hi, self.bins,
                           self.counts + other.counts,
                           self.underflow + other.underflow,
                           self.overflow + other.overflow)

    def csv_rows(self):
        w = (self.hi - self.lo) / self.bins
        for i in range(self.bins):
            yield (self.lo + i * w, self.lo + (i + 1) * w, int(self.counts[i]))


@dataclass
class Histogram2D:
    """Uniform 2D histogram (e.g. the (c2/n^2, v3/n^3) fish plane)."""

    xlo: float
    xhi: float
    xbins: int
    ylo: float
    yhi: float
    ybins: int
    counts: np.ndarray = field(default=None)
    outside: int = 0

    def __post_init__(self):
        if self.counts is None:
            self.counts = np.zeros((self.xbins, self.ybins), dtype=np.int64)

    def add(self, xs, ys) -> None:
        x = np.asarray(xs, dtype=np.float64)
        y = np.asarray(ys, dtype=np.float64)
        xi = np.floor((x - self.xlo) / (self.xhi - self.xlo) * self.xbins).astype(np.int64)
        yi = np.floor((y - self.ylo) / (self.yhi - self.ylo) * self.ybins).astype(np.int64)
        ok = (xi >= 0) & (xi < self.xbins) & (yi >= 0) & (yi < self.ybins)
        self.outside += int((~ok).sum())
        np.add.at(self.counts, (xi[ok], yi[ok]), 1)

    @property
    def total(self) -> int:
        return int(self.counts.sum()) + self.outside

    def merge(self, other: "Histogram2D") -> "Histogram2D":
        key = (self.xlo, self.xhi, self.xbins, self.ylo, self.yhi, self.ybins)
        okey = (other.xlo, other.xhi, other.xbins, other.ylo, other.yhi, other.ybins)
        if key != okey:
            raise ValueError("incompatible histograms")
        return Histogram2D(self.xlo, self.xhi, self.xbins, self.ylo, self.yhi,
                           self.ybins, self.counts + other.counts,
                           self.outside + other.outside)

    def csv_rows(self):
        wx = (self.xhi - self.xlo) / self.xbins
        wy = (self.yhi - self.ylo) / self.ybins
        for i in range(self.xbins):
            for j in range(self.ybins):
                if self.counts[i, j]:
                    yield (self.xlo + i * wx, self.xlo + (i + 1) * wx,
                           self.ylo + j * wy, self.ylo + (j + 1) * wy,
                           int(self.counts[i, j]))


def ks_statistic(samples, cdf) -> float:
    """Two-sided Kolmogorov-Smirnov sup distance between ECDF and ``cdf``."""
    x = np.sort(np.asarray(samples, dtype=np.float64))
    n = x.size
    if n < 2:
        raise ValueError("KS needs at least 2 samples")
    f = np.asarray([cdf(v) for v in x], dtype=np.float64)
    up = np.arange(1, n + 1) / n - f
    dn = f - np.arange(0, n) / n
    return float(max(up.max(), dn.max()))


def logistic_cdf(t: float) -> float:
    """CDF of the petal-link linking-number limit law: (1 + tanh(2 pi t)) / 2."""
    return 0.5 * (1.0 + math.tanh(2.0 * math.pi * t))


def logistic_density(t: float) -> float:
    return math.pi / math.cosh(2.0 * math.pi * t) ** 2


# -- theoretical baselines -------------------------------------------------------


@dataclass(frozen=True)
class TheoreticalBaseline:
    """Known mean/variance behaviour of an invariant under a model."""

    family: str
    invariant: str
    mean: float | None
    variance: float | None
    exact_mean: Fraction | None = None
    note: str = ""


def baseline_for(family: str, invariant: str, params: dict) -> TheoreticalBaseline | None:
    """Baseline constants for (family, invariant), sized by the model params.

    Means marked exact are exact at every size; variances are leading-order
    asymptotics with unknown lower-order corrections.
    """
    if family == "PetalumaKnot":
        n = (int(params["petals"]) - 1) // 2
        if invariant == "c2":
            exact = Fraction(n * (n - 1), 24)
            return TheoreticalBaseline(family, invariant, float(exact),
                                       7 / 960 * n ** 4, exact_mean=exact,
                                       note="mean exact; variance leading order")
        if invariant == "v3":
            return TheoreticalBaseline(family, invariant, 0.0,
                                       9298 / 5443200 * n ** 6, exact_mean=Fraction(0),
                                       note="mean exact by mirror symmetry; variance leading order")
    if family == "GridKnot" and invariant == "c2":
        n = int(params["n"])
        return TheoreticalBaseline(family, invariant, n ** 2 / 288, 7 * n ** 4 / 194400,
                                   note="leading order")
    if family == "Griddle":
        n = int(params["n"])
        if invariant == "c2":
            return TheoreticalBaseline(family, invariant, n ** 2 / 144, n ** 4 / 7776,
                                       note="leading order")
        if invariant == "defect":
            return TheoreticalBaseline(family, invariant, 8 * n ** 2 / 144,
                                       29 * n ** 3 / 4050,
                                       note="mean = 8 x c2 mean; variance leading order")
    if family == "Star" and invariant == "c2":
        n = int(params["n"])
        return TheoreticalBaseline(family, invariant, n ** 3 / 12, n ** 4 / 24,
                                   note="mean leading order; sd n^2/sqrt(24) leading order")
    if family == "PetalumaLink" and invariant == "lk":
        return TheoreticalBaseline(family, invariant, 0.0, None, exact_mean=Fraction(0),
                                   note="lk/(4n) tends to the logistic law "
                                            "(1 + tanh(2 pi t))/2")
    return None
