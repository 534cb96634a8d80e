"""Classical single-center tests used as comparators.

All p-values are two-sided.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from huberfamily.errors import DegenerateDataError, InputError
from huberfamily.special import chi2_sf, t_two_sided


class Method(str, enum.Enum):
    T_ONE = "T_ONE"
    T_WELCH = "T_WELCH"
    SIGN = "SIGN"
    MOOD_MEDIAN = "MOOD_MEDIAN"


@dataclass(frozen=True)
class FrequentistResult:
    statistic: float
    p_value: float
    method: Method
    df: float | None = None

    def rejects(self, level: float = 0.05) -> bool:
        return self.p_value < level


def _sample(data, name, min_size=2):
    x = np.asarray(data, dtype=float).ravel()
    if x.size < min_size:
        raise InputError(f"{name} needs at least {min_size} values")
    if not np.all(np.isfinite(x)):
        raise InputError(f"{name} contains non-finite values")
    return x


def one_sample_t(data, mu0: float = 0.0) -> FrequentistResult:
    x = _sample(data, "data")
    n = x.size
    sd = x.std(ddof=1)
    if sd == 0:
        raise DegenerateDataError("t test is undefined for zero sample variance")
    t = (x.mean() - mu0) / (sd / math.sqrt(n))
    return FrequentistResult(float(t), t_two_sided(t, n - 1), Method.T_ONE,
                             float(n - 1))


def welch_t(x, y, mu0: float = 0.0) -> FrequentistResult:
    """Welch statistic for mean(x) - mean(y) = mu0 with Satterthwaite df."""
    x = _sample(x, "x")
    y = _sample(y, "y")
    vx = x.var(ddof=1) / x.size
    vy = y.var(ddof=1) / y.size
    if vx + vy == 0:
        raise DegenerateDataError("Welch test is undefined when both variances are zero")
    t = (x.mean() - y.mean() - mu0) / math.sqrt(vx + vy)
    df = (vx + vy) ** 2 / (vx ** 2 / (x.size - 1) + vy ** 2 / (y.size - 1))
    return FrequentistResult(float(t), t_two_sided(t, df), Method.T_WELCH,
                             float(df))


def binomial_two_sided(k: int, m: int) -> float:
    """min(1, 2 min(P(K <= k), P(K >= k))) for K ~ Bin(m, 1/2), exact."""
    lower = sum(math.comb(m, j) for j in range(0, k + 1))
    upper = sum(math.comb(m, j) for j in range(k, m + 1))
    return min(1.0, 2 * min(lower, upper) / 2 ** m)


def sign_test(data, mu0: float = 0.0) -> FrequentistResult:
    """Exact sign test; observations equal to mu0 are dropped."""
    x = _sample(data, "data", min_size=1)
    above = int(np.sum(x > mu0))
    below = int(np.sum(x < mu0))
    m = above + below
    if m == 0:
        raise DegenerateDataError("every observation ties with the null value")
    return FrequentistResult(float(above), binomial_two_sided(above, m),
                             Method.SIGN)


def mood_median_test(x, y, mu0: float = 0.0) -> FrequentistResult:
    """Mood's median test of median(x) - median(y) = mu0.

    y is shifted by mu0, points equal to the pooled median are dropped, and
    the 2x2 table is scored by Pearson chi-square without continuity
    correction.
    """
    x = _sample(x, "x", min_size=1)
    y = _sample(y, "y", min_size=1) + mu0
    grand = np.median(np.concatenate([x, y]))
    table = np.array([[np.sum(x > grand), np.sum(x < grand)],
                      [np.sum(y > grand), np.sum(y < grand)]], dtype=float)
    rows = table.sum(axis=1)
    cols = table.sum(axis=0)
    if np.any(rows == 0) or np.any(cols == 0):
        raise DegenerateDataError("median test has an empty margin")
    expected = np.outer(rows, cols) / table.sum()
    chi2 = float(np.sum((table - expected) ** 2 / expected))
    return FrequentistResult(chi2, chi2_sf(chi2, 1.0), Method.MOOD_MEDIAN, 1.0)
