"""Repeated-sampling experiments for rejection-frequency curves.

Every (repetition, null value) cell draws its own data from a substream
keyed by (seed, rep, grid index), so tables are reproducible and do not
depend on the thread count.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import special, stats

from huberfamily import baselines
from huberfamily.errors import InputError
from huberfamily.familial import (DEFAULT_SEED, independent_test,
                                  one_sample_test, replicate_rng)
from huberfamily.paths import (WeightedSample, diff_path, fit_scaled_path,
                               path_range)

SIZE_LEVEL = 0.05
BAND_SAMPLE_SIZE = 1_000_001
TESTS = ("familial", "t", "sign", "mood")


class DistKind(str, enum.Enum):
    NORMAL = "normal"
    EXPONENTIAL = "exponential"
    LOGNORMAL = "lognormal"
    POISSON = "poisson"


_ARITY = {DistKind.NORMAL: 2, DistKind.EXPONENTIAL: 1,
          DistKind.LOGNORMAL: 2, DistKind.POISSON: 1}


@dataclass(frozen=True)
class DistSpec:
    """A named distribution.

    Parameters: normal (mean, sd), exponential (rate), lognormal
    (log-mean, log-sd), poisson (mean).
    """

    kind: DistKind
    params: tuple[float, ...]

    def __post_init__(self):
        kind = DistKind(self.kind)
        params = tuple(float(p) for p in self.params)
        if len(params) != _ARITY[kind]:
            raise InputError(f"{kind.value} takes {_ARITY[kind]} parameter(s)")
        positive = params[1:] if kind in (DistKind.NORMAL, DistKind.LOGNORMAL) else params
        if any(not (p > 0 and math.isfinite(p)) for p in positive):
            raise InputError(f"{kind.value} scale/rate/mean must be positive")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "params", params)

    @classmethod
    def parse(cls, text: str) -> DistSpec:
        """Parse ``"kind:p1[,p2]"``, e.g. ``"lognormal:0,0.5"``."""
        name, _, rest = text.partition(":")
        try:
            kind = DistKind(name.strip().lower())
            params = tuple(float(v) for v in rest.split(",")) if rest else ()
        except ValueError as exc:
            raise InputError(f"cannot parse distribution {text!r}") from exc
        return cls(kind, params)

    def __str__(self):
        return f"{self.kind.value}:" + ",".join(f"{p:g}" for p in self.params)

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        k, p = self.kind, self.params
        if k is DistKind.NORMAL:
            return rng.normal(p[0], p[1], n)
        if k is DistKind.EXPONENTIAL:
            return rng.exponential(1.0 / p[0], n)
        if k is DistKind.LOGNORMAL:
            return rng.lognormal(p[0], p[1], n)
        return rng.poisson(p[0], n).astype(float)

    def quantile(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        k, p = self.kind, self.params
        if k is DistKind.NORMAL:
            return p[0] + p[1] * special.ndtri(u)
        if k is DistKind.EXPONENTIAL:
            return -np.log1p(-u) / p[0]
        if k is DistKind.LOGNORMAL:
            return np.exp(p[0] + p[1] * special.ndtri(u))
        return stats.poisson.ppf(u, p[0])

    @property
    def mean(self) -> float:
        k, p = self.kind, self.params
        if k is DistKind.NORMAL:
            return p[0]
        if k is DistKind.EXPONENTIAL:
            return 1.0 / p[0]
        if k is DistKind.LOGNORMAL:
            return math.exp(p[0] + 0.5 * p[1] ** 2)
        return p[0]

    @property
    def median(self) -> float:
        return float(self.quantile(0.5))


def sample_dist(spec: DistSpec, n: int, rng: np.random.Generator) -> np.ndarray:
    return spec.sample(n, rng)


def population_path(spec: DistSpec, n: int = BAND_SAMPLE_SIZE):
    """Standardized Huber path of an equal-weight quantile grid, a
    deterministic stand-in for the population."""
    u = (np.arange(n) + 0.5) / n
    return fit_scaled_path(WeightedSample.uniform(spec.quantile(u)))


def familial_null_band(spec: DistSpec, spec_y: DistSpec | None = None,
                       n: int = BAND_SAMPLE_SIZE) -> tuple[float, float]:
    """Null values mu0 for which the population familial null holds.

    With ``spec_y`` this is the range of the difference of the two
    standardized families.
    """
    path = population_path(spec, n)
    if spec_y is not None:
        path = diff_path(path, population_path(spec_y, n))
    rng_ = path_range(path)
    return rng_.low, rng_.high


@dataclass(frozen=True)
class Scenario:
    dist_x: DistSpec
    mu0_grid: tuple[float, ...]
    n: int = 200
    dist_y: DistSpec | None = None
    n2: int | None = None
    reps: int = 200
    b_count: int = 500
    seed: int = DEFAULT_SEED
    tests: tuple[str, ...] = ("familial", "t")
    threads: int = 1

    def __post_init__(self):
        object.__setattr__(self, "mu0_grid", tuple(float(m) for m in self.mu0_grid))
        object.__setattr__(self, "tests", tuple(t.lower() for t in self.tests))
        if not self.mu0_grid:
            raise InputError("mu0 grid is empty")
        if self.reps < 1 or self.b_count < 1 or self.threads < 1:
            raise InputError("reps, B and threads must be >= 1")
        if self.n < 2 or (self.dist_y is not None and self.sizes[1] < 2):
            raise InputError("sample sizes must be >= 2")
        allowed = {"familial", "t", "mood"} if self.two_sample else {"familial", "t", "sign"}
        bad = [t for t in self.tests if t not in allowed]
        if bad or not self.tests:
            raise InputError(f"tests {bad} not available for this design")

    @property
    def two_sample(self) -> bool:
        return self.dist_y is not None

    @property
    def sizes(self) -> tuple[int, int]:
        return self.n, (self.n2 if self.n2 is not None else self.n)


@dataclass(frozen=True)
class RejectionRow:
    mu0: float
    test: str
    rejection_frequency: float
    reps: int
    mc_stderr: float


@dataclass
class RejectionTable:
    rows: list[RejectionRow] = field(default_factory=list)

    COLUMNS = ("mu0", "test", "rejection_frequency", "reps", "mc_stderr")

    def frequency(self, test: str, mu0: float) -> float:
        for row in self.rows:
            if row.test == test and row.mu0 == mu0:
                return row.rejection_frequency
        raise KeyError((test, mu0))


def _run_cell(scenario: Scenario, rep: int, j: int) -> dict[str, bool]:
    mu0 = scenario.mu0_grid[j]
    rng = replicate_rng(scenario.seed, rep, j)
    n1, n2 = scenario.sizes
    x = scenario.dist_x.sample(n1, rng)
    y = scenario.dist_y.sample(n2, rng) if scenario.two_sample else None
    out = {}
    for test in scenario.tests:
        if test == "familial":
            b_seed = int(rng.integers(2 ** 63))
            if scenario.two_sample:
                res = independent_test(x, y, mu0, scenario.b_count, b_seed)
            else:
                res = one_sample_test(x, mu0, scenario.b_count, b_seed)
            out[test] = res.rejects
        elif test == "t":
            res = (baselines.welch_t(x, y, mu0) if scenario.two_sample
                   else baselines.one_sample_t(x, mu0))
            out[test] = res.rejects(SIZE_LEVEL)
        elif test == "sign":
            out[test] = baselines.sign_test(x, mu0).rejects(SIZE_LEVEL)
        elif test == "mood":
            out[test] = baselines.mood_median_test(x, y, mu0).rejects(SIZE_LEVEL)
    return out


def rejection_curve(scenario: Scenario) -> RejectionTable:
    """Rejection frequency of each selected test at each null value.

    The familial test rejects when it accepts H1 under the default loss
    matrix; the classical tests reject at level 0.05.
    """
    cells = [(rep, j) for j in range(len(scenario.mu0_grid))
             for rep in range(scenario.reps)]
    if scenario.threads == 1:
        outcomes = [_run_cell(scenario, rep, j) for rep, j in cells]
    else:
        with ThreadPoolExecutor(max_workers=scenario.threads) as pool:
            outcomes = list(pool.map(lambda c: _run_cell(scenario, *c), cells))

    counts = {}
    for (rep, j), res in zip(cells, outcomes):
        for test, rejected in res.items():
            counts[j, test] = counts.get((j, test), 0) + int(rejected)

    table = RejectionTable()
    for j, mu0 in enumerate(scenario.mu0_grid):
        for test in scenario.tests:
            f = counts.get((j, test), 0) / scenario.reps
            table.rows.append(RejectionRow(mu0, test, f, scenario.reps,
                                           math.sqrt(f * (1 - f) / scenario.reps)))
    return table
