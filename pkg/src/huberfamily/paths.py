"""Weighted location statistics and exact Huber solution paths.

A Huber path maps the tuning parameter ``lam`` to the minimizer of the
weighted Huber loss.  It is continuous and piecewise linear, running from
the weighted mean (large ``lam``) to the weighted median (``lam -> 0``),
so it is stored as its knots.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from huberfamily import _kernels
from huberfamily.errors import InputError

WEIGHT_SUM_TOL = 1e-12


@dataclass(frozen=True)
class WeightedSample:
    """Observations with probability weights."""

    values: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float).ravel()
        weights = np.asarray(self.weights, dtype=float).ravel()
        if values.size == 0:
            raise InputError("sample is empty")
        if values.shape != weights.shape:
            raise InputError(
                f"{values.size} values but {weights.size} weights")
        if not np.all(np.isfinite(values)):
            raise InputError("sample contains non-finite values")
        if not np.all(np.isfinite(weights)) or np.any(weights < 0):
            raise InputError("weights must be finite and nonnegative")
        if abs(weights.sum() - 1.0) > WEIGHT_SUM_TOL:
            raise InputError(
                f"weights sum to {weights.sum()!r}, expected 1")
        values.flags.writeable = False
        weights.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def uniform(cls, values) -> WeightedSample:
        values = np.asarray(values, dtype=float).ravel()
        if values.size == 0:
            raise InputError("sample is empty")
        return cls(values, np.full(values.size, 1.0 / values.size))

    @property
    def n(self) -> int:
        return self.values.size

    def sorted(self) -> tuple[np.ndarray, np.ndarray]:
        order = np.argsort(self.values, kind="mergesort")
        return (np.ascontiguousarray(self.values[order]),
                np.ascontiguousarray(self.weights[order]))


@dataclass(frozen=True)
class HuberPath:
    """Knots of a piecewise-linear center path.

    ``lambdas`` is strictly decreasing; ``centers[k]`` is the center at
    ``lambdas[k]``.  ``sigma`` is the scale the lambda axis was divided by
    (1.0 for an unscaled path).
    """

    lambdas: np.ndarray
    centers: np.ndarray
    sigma: float = 1.0

    def __post_init__(self):
        lambdas = np.asarray(self.lambdas, dtype=float).ravel()
        centers = np.asarray(self.centers, dtype=float).ravel()
        if lambdas.size == 0 or lambdas.shape != centers.shape:
            raise InputError("a path needs matching, nonempty knot arrays")
        if np.any(np.diff(lambdas) >= 0):
            raise InputError("knot lambdas must be strictly decreasing")
        if lambdas[-1] < 0:
            raise InputError("knot lambdas must be nonnegative")
        lambdas.flags.writeable = False
        centers.flags.writeable = False
        object.__setattr__(self, "lambdas", lambdas)
        object.__setattr__(self, "centers", centers)

    @property
    def knots(self) -> list[tuple[float, float]]:
        return list(zip(self.lambdas.tolist(), self.centers.tolist()))

    def __len__(self):
        return self.lambdas.size

    def __call__(self, lam):
        return eval_path(self, lam)


@dataclass(frozen=True)
class PathRange:
    low: float
    high: float

    def __post_init__(self):
        if not self.low <= self.high:
            raise InputError(f"empty range [{self.low}, {self.high}]")

    def intersects(self, lo: float, hi: float) -> bool:
        """Closed-interval overlap with [lo, hi]."""
        return self.low <= hi and self.high >= lo


def weighted_mean(sample: WeightedSample) -> float:
    return float(np.sum(sample.weights * sample.values))


def weighted_median(sample: WeightedSample) -> float:
    """Lower weighted median: the smallest value whose cumulative weight
    reaches one half."""
    x, w = sample.sorted()
    return float(_kernels.lower_weighted_median_sorted(x, w))


def weighted_mad(sample: WeightedSample) -> float:
    """Weighted median absolute deviation from the weighted median, with no
    consistency constant.  May be zero; see :func:`sample_scale`."""
    x, w = sample.sorted()
    med = _kernels.lower_weighted_median_sorted(x, w)
    return float(_kernels.weighted_mad_sorted(x, w, med))


def weighted_sd(sample: WeightedSample) -> float:
    return float(_kernels.weighted_sd(sample.values, sample.weights))


def sample_scale(sample: WeightedSample, method: str = "mad") -> float:
    """Scale used to standardize the lambda axis.

    With ``method="mad"`` a zero MAD falls back to the weighted standard
    deviation.  A return value of 0.0 means every positively weighted
    observation is equal.
    """
    if method == "mad":
        sigma = weighted_mad(sample)
        if sigma > 0:
            return sigma
    elif method != "sd":
        raise InputError(f"unknown scale method {method!r}")
    return weighted_sd(sample)


def huber_loss(z, lam):
    """Huber loss, quadratic for |z| < lam and linear beyond."""
    if np.any(np.asarray(lam) <= 0):
        raise InputError("lambda must be positive")
    z = np.abs(np.asarray(z, dtype=float))
    out = np.where(z < lam, 0.5 * z * z, lam * z - 0.5 * lam * lam)
    return float(out) if out.ndim == 0 else out


def huber_objective(sample: WeightedSample, mu, lam):
    """Weighted Huber loss of the sample at center(s) ``mu``; ``mu`` and
    ``lam`` broadcast against each other."""
    mu, lam = np.broadcast_arrays(np.asarray(mu, dtype=float),
                                  np.asarray(lam, dtype=float))
    z = sample.values - mu[..., None]
    out = np.sum(sample.weights * huber_loss(z, lam[..., None]), axis=-1)
    return float(out) if out.ndim == 0 else out


def fit_path(sample: WeightedSample) -> HuberPath:
    """Exact solution path of the weighted Huber problem at sigma = 1.

    Starts at (max residual from the weighted mean, weighted mean) and
    walks down in lambda knot by knot until the weighted median is
    reached.  A constant sample gives the single knot (0, c).
    """
    x, w = sample.sorted()
    med = _kernels.lower_weighted_median_sorted(x, w)
    lam = np.empty(x.size + 1)
    mu = np.empty(x.size + 1)
    count = _kernels.huber_path_sorted(x, w, med, lam, mu)
    return HuberPath(lam[:count].copy(), mu[:count].copy())


def scale_path(path: HuberPath, sigma: float) -> HuberPath:
    """Express a sigma = 1 path on the standardized lambda axis.

    Using the residual (x - mu) / sigma inside the loss puts each knot at
    lambda / sigma, so the returned path satisfies
    ``eval_path(scaled, lam) == eval_path(path, sigma * lam)``.
    """
    if not sigma > 0 or not math.isfinite(sigma):
        raise InputError(f"sigma must be positive and finite, got {sigma!r}")
    return HuberPath(path.lambdas / sigma, path.centers, sigma * path.sigma)


def fit_scaled_path(sample: WeightedSample, method: str = "mad") -> HuberPath:
    """Fit the path and standardize its lambda axis by the sample scale."""
    if method not in ("mad", "sd"):
        raise InputError(f"unknown scale method {method!r}")
    x, w = sample.sorted()
    lam = np.empty(x.size + 1)
    mu = np.empty(x.size + 1)
    count, sigma = _kernels.scaled_path_sorted(x, w, method == "sd", lam, mu)
    return HuberPath(lam[:count].copy(), mu[:count].copy(),
                     sigma if sigma > 0 else 1.0)


def eval_path(path: HuberPath, lam):
    """Center at ``lam``; clamps to the first center above the leading knot
    and to the last center below the final knot."""
    lam = np.asarray(lam, dtype=float)
    # np.interp wants increasing abscissae and clamps at both ends
    out = np.interp(lam, path.lambdas[::-1], path.centers[::-1])
    return float(out) if out.ndim == 0 else out


def path_range(path: HuberPath,
               lambda_range: tuple[float, float] | None = None) -> PathRange:
    """Image of the path over all lambda, or over a closed lambda range."""
    if lambda_range is None:
        return PathRange(float(path.centers.min()), float(path.centers.max()))
    a, b = lambda_range
    if not 0 < a:
        raise InputError("lambda range must have a positive lower end")
    if a > b:
        raise InputError(f"empty lambda range [{a}, {b}]")
    inside = path.centers[(path.lambdas >= a) & (path.lambdas <= b)]
    ends = eval_path(path, np.array([a, b]))
    vals = np.concatenate([inside, ends])
    return PathRange(float(vals.min()), float(vals.max()))


def diff_path(path_x: HuberPath, path_y: HuberPath) -> HuberPath:
    """Pointwise difference ``path_x(lam) - path_y(lam)`` on the merged knots.

    Both inputs should already be on their own standardized lambda axes,
    so the same lambda picks the same kind of center in each.
    """
    top = max(path_x.lambdas[0], path_y.lambdas[0])
    grid = np.union1d(np.union1d(path_x.lambdas, path_y.lambdas), [0.0, top])
    grid = grid[::-1]
    centers = eval_path(path_x, grid) - eval_path(path_y, grid)
    return HuberPath(grid, np.atleast_1d(centers))


def oracle_minimize(sample: WeightedSample, lam, tol: float = 1e-10):
    """Brute-force minimizer by ternary search on [min x, max x].

    Independent of the path algorithm; meant for checking it.  ``lam`` may
    be an array, in which case all searches run side by side.
    """
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    if np.any(lam <= 0):
        raise InputError("lambda must be positive")
    lo = np.full(lam.shape, sample.values.min())
    hi = np.full(lam.shape, sample.values.max())
    z = sample.values
    w = sample.weights

    def objective(mu):
        r = np.abs(z[None, :] - mu[:, None])
        lam_ = lam[:, None]
        loss = np.where(r < lam_, 0.5 * r * r, lam_ * r - 0.5 * lam_ * lam_)
        return loss @ w

    for _ in range(400):
        if not np.any(hi - lo > tol):
            break
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        left = objective(m1) <= objective(m2)
        hi = np.where(left, m2, hi)
        lo = np.where(left, lo, m1)
    out = 0.5 * (lo + hi)
    return float(out[0]) if out.size == 1 else out
