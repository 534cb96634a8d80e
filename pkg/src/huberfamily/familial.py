"""Bayesian-bootstrap familial tests over the Huber family.

Each bootstrap replicate draws flat Dirichlet weights on the observed
points, fits the standardized Huber path under those weights, and records
whether any center on the path falls in the null set.  The fraction of
replicates where one does is the posterior probability of the null.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from huberfamily import _kernels
from huberfamily.errors import InputError
from huberfamily.paths import HuberPath, diff_path, path_range

DEFAULT_SEED = 20200101
DEFAULT_B = 1000


class Decision(str, enum.Enum):
    H0 = "H0"
    H1 = "H1"
    INDETERMINATE = "INDETERMINATE"


@dataclass(frozen=True)
class NullSpec:
    """Null set [low, high] (a point when equal) and an optional lambda range.

    One-sided nulls use an infinite endpoint.
    """

    low: float
    high: float
    lambda_range: tuple[float, float] | None = None

    def __post_init__(self):
        if math.isnan(self.low) or math.isnan(self.high) or self.low > self.high:
            raise InputError(f"invalid null interval [{self.low}, {self.high}]")
        if self.lambda_range is not None:
            a, b = (float(v) for v in self.lambda_range)
            if not (0 < a <= b) or not math.isfinite(b):
                raise InputError(f"invalid lambda range [{a}, {b}]")
            object.__setattr__(self, "lambda_range", (a, b))

    @classmethod
    def point(cls, mu0: float, lambda_range=None) -> NullSpec:
        if not math.isfinite(mu0):
            raise InputError("a point null must be finite")
        return cls(float(mu0), float(mu0), lambda_range)

    @property
    def is_point(self) -> bool:
        return self.low == self.high

    def negated(self) -> NullSpec:
        return NullSpec(-self.high, -self.low, self.lambda_range)


@dataclass(frozen=True)
class LossMatrix:
    """Loss of each action (accept H0, accept H1, indeterminate) under each
    truth.  The defaults accept a hypothesis once its posterior probability
    exceeds 0.95."""

    l_h0_given_h0: float = 0.0
    l_h0_given_h1: float = 20.0
    l_h1_given_h0: float = 20.0
    l_h1_given_h1: float = 0.0
    l_i_given_h0: float = 1.0
    l_i_given_h1: float = 1.0

    def __post_init__(self):
        for name, value in self.__dict__.items():
            if not (math.isfinite(value) and value >= 0):
                raise InputError(f"loss entry {name} must be finite and >= 0")

    def expected(self, p_h0: float, p_h1: float) -> tuple[float, float, float]:
        return (self.l_h0_given_h0 * p_h0 + self.l_h0_given_h1 * p_h1,
                self.l_h1_given_h0 * p_h0 + self.l_h1_given_h1 * p_h1,
                self.l_i_given_h0 * p_h0 + self.l_i_given_h1 * p_h1)


@dataclass(frozen=True)
class PosteriorFamily:
    paths: tuple[HuberPath, ...]
    seed: int

    def __post_init__(self):
        if len(self.paths) == 0:
            raise InputError("a posterior family needs at least one path")
        object.__setattr__(self, "paths", tuple(self.paths))

    @property
    def b_count(self) -> int:
        return len(self.paths)


@dataclass(frozen=True)
class TestResult:
    __test__ = False

    method: str
    null: NullSpec
    p_h0: float
    p_h1: float
    expected_loss: tuple[float, float, float]
    decision: Decision
    b_count: int
    seed: int
    loss: LossMatrix = field(default_factory=LossMatrix)

    @property
    def rejects(self) -> bool:
        return self.decision is Decision.H1


def replicate_rng(seed: int, *key: int) -> np.random.Generator:
    """Generator for one replicate, derived from (seed, *key) alone.

    Replicates never share state, so results do not depend on how work is
    split across threads.
    """
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.default_rng(ss)


def sample_dirichlet_weights(n: int, rng: np.random.Generator) -> np.ndarray:
    """Flat Dirichlet draw via normalized unit exponentials."""
    if n < 1:
        raise InputError("need n >= 1")
    e = rng.standard_exponential(n)
    return e / e.sum()


def _as_data(data, name="data") -> np.ndarray:
    x = np.asarray(data, dtype=float).ravel()
    if x.size == 0:
        raise InputError(f"{name} is empty")
    if not np.all(np.isfinite(x)):
        raise InputError(f"{name} contains non-finite values")
    return x


def _check_b(b_count: int, threads: int):
    if int(b_count) < 1:
        raise InputError("number of bootstrap replicates must be >= 1")
    if int(threads) < 1:
        raise InputError("thread count must be >= 1")


def _chunks(total: int, parts: int) -> list[range]:
    parts = max(1, min(parts, total))
    edges = np.linspace(0, total, parts + 1).round().astype(int)
    return [range(edges[i], edges[i + 1]) for i in range(parts)]


def _run_chunks(fn, b_count: int, threads: int) -> list:
    chunks = _chunks(b_count, threads)
    if len(chunks) == 1:
        return fn(chunks[0])
    with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
        results = list(pool.map(fn, chunks))
    return [item for part in results for item in part]


class _PathFitter:
    """Sorts the data once and fits standardized paths for weight vectors
    given in the original data order."""

    def __init__(self, data: np.ndarray, scale: str = "mad"):
        if scale not in ("mad", "sd"):
            raise InputError(f"unknown scale method {scale!r}")
        self.order = np.argsort(data, kind="mergesort")
        self.x = np.ascontiguousarray(data[self.order])
        self.use_sd = scale == "sd"
        self.constant = self.x[0] == self.x[-1]

    def __call__(self, weights: np.ndarray) -> HuberPath:
        if self.constant:
            return HuberPath([0.0], [self.x[0]])
        w = np.ascontiguousarray(weights[self.order])
        lam = np.empty(self.x.size + 1)
        mu = np.empty(self.x.size + 1)
        count, sigma = _kernels.scaled_path_sorted(self.x, w, self.use_sd,
                                                   lam, mu)
        return HuberPath(lam[:count].copy(), mu[:count].copy(),
                         sigma if sigma > 0 else 1.0)


def bootstrap_family(data, b_count: int = DEFAULT_B, seed: int = DEFAULT_SEED,
                     threads: int = 1, scale: str = "mad") -> PosteriorFamily:
    """Posterior draws of the standardized Huber path for one sample."""
    x = _as_data(data)
    _check_b(b_count, threads)
    fitter = _PathFitter(x, scale)
    if fitter.constant:
        path = HuberPath([0.0], [x[0]])
        return PosteriorFamily((path,) * int(b_count), int(seed))

    def work(block):
        return [fitter(sample_dirichlet_weights(x.size, replicate_rng(seed, b)))
                for b in block]

    return PosteriorFamily(tuple(_run_chunks(work, int(b_count), threads)),
                           int(seed))


def difference_family(x, y, b_count: int = DEFAULT_B, seed: int = DEFAULT_SEED,
                      threads: int = 1, scale: str = "mad") -> PosteriorFamily:
    """Posterior draws of ``path_x(lam) - path_y(lam)`` for independent
    samples, each bootstrapped with its own weights and its own scale."""
    x = _as_data(x, "x")
    y = _as_data(y, "y")
    _check_b(b_count, threads)
    fit_x = _PathFitter(x, scale)
    fit_y = _PathFitter(y, scale)
    if fit_x.constant and fit_y.constant:
        path = HuberPath([0.0], [x[0] - y[0]])
        return PosteriorFamily((path,) * int(b_count), int(seed))

    def work(block):
        out = []
        for b in block:
            rng = replicate_rng(seed, b)
            wx = sample_dirichlet_weights(x.size, rng)
            wy = sample_dirichlet_weights(y.size, rng)
            out.append(diff_path(fit_x(wx), fit_y(wy)))
        return out

    return PosteriorFamily(tuple(_run_chunks(work, int(b_count), threads)),
                           int(seed))


def estimate_posterior(family: PosteriorFamily,
                       null: NullSpec) -> tuple[float, float]:
    """Fraction of replicate paths with some center inside the null set."""
    hits = sum(path_range(p, null.lambda_range).intersects(null.low, null.high)
               for p in family.paths)
    p_h0 = hits / family.b_count
    return p_h0, 1.0 - p_h0


def decide(p: tuple[float, float], loss: LossMatrix | None = None
           ) -> tuple[Decision, tuple[float, float, float]]:
    """Action with the lowest posterior expected loss.

    Exact ties between the best actions resolve to INDETERMINATE.
    """
    loss = loss or LossMatrix()
    expected = loss.expected(*p)
    best = min(expected)
    winners = [d for d, e in zip(Decision, expected) if e == best]
    decision = winners[0] if len(winners) == 1 else Decision.INDETERMINATE
    return decision, expected


def _result(method, family, null, loss, seed):
    loss = loss or LossMatrix()
    p = estimate_posterior(family, null)
    decision, expected = decide(p, loss)
    return TestResult(method, null, p[0], p[1], expected, decision,
                      family.b_count, int(seed), loss)


def _coerce_null(null) -> NullSpec:
    if isinstance(null, NullSpec):
        return null
    return NullSpec.point(float(null))


def one_sample_test(data, null, b_count: int = DEFAULT_B,
                    seed: int = DEFAULT_SEED, loss: LossMatrix | None = None,
                    threads: int = 1, scale: str = "mad") -> TestResult:
    null = _coerce_null(null)
    family = bootstrap_family(data, b_count, seed, threads, scale)
    return _result("one-sample", family, null, loss, seed)


def paired_test(x, y, null, b_count: int = DEFAULT_B, seed: int = DEFAULT_SEED,
                loss: LossMatrix | None = None, threads: int = 1,
                scale: str = "mad") -> TestResult:
    """One-sample test on the differences x - y."""
    x = _as_data(x, "x")
    y = _as_data(y, "y")
    if x.size != y.size:
        raise InputError(f"paired samples differ in length ({x.size} vs {y.size})")
    result = one_sample_test(x - y, null, b_count, seed, loss, threads, scale)
    return dataclasses.replace(result, method="paired")


def independent_test(x, y, null, b_count: int = DEFAULT_B,
                     seed: int = DEFAULT_SEED, loss: LossMatrix | None = None,
                     threads: int = 1, scale: str = "mad") -> TestResult:
    """Familial test that the same center of x minus that of y lies in the
    null set for some lambda."""
    null = _coerce_null(null)
    for name, sample in (("x", x), ("y", y)):
        if np.asarray(sample).size < 2:
            raise InputError(f"independent test needs at least 2 values in {name}")
    family = difference_family(x, y, b_count, seed, threads, scale)
    return _result("two-sample", family, null, loss, seed)
