"""Functional-boxplot summaries of a posterior family of paths.

Paths are evaluated on a shared lambda grid, ranked by modified band
depth, and summarized by the pointwise envelopes of their deepest
fractions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from huberfamily.errors import InputError
from huberfamily.familial import PosteriorFamily
from huberfamily.paths import eval_path

DEFAULT_PROPORTIONS = (0.5, 0.75, 0.9, 1.0)
DEFAULT_GRID = 512
LAMBDA_MAX_QUANTILE = 0.99
LAMBDA_MAX_RULE = "linear grid from 0 to the 0.99 quantile of leading knots"


@dataclass(frozen=True)
class FamilyGrid:
    lambdas: np.ndarray
    curves: np.ndarray  # B x G


@dataclass(frozen=True)
class EnvelopeSet:
    lambdas: np.ndarray
    proportions: tuple[float, ...]
    lower: np.ndarray  # len(proportions) x G
    upper: np.ndarray
    median_curve: np.ndarray
    median_index: int

    def rows(self) -> list[list[float]]:
        """One row per grid lambda: lambda, median, then lower/upper pairs."""
        out = []
        for g, lam in enumerate(self.lambdas):
            row = [float(lam), float(self.median_curve[g])]
            for k in range(len(self.proportions)):
                row += [float(self.lower[k, g]), float(self.upper[k, g])]
            out.append(row)
        return out

    def columns(self) -> list[str]:
        cols = ["lambda", "median"]
        for p in self.proportions:
            tag = f"{100 * p:g}"
            cols += [f"lower_{tag}", f"upper_{tag}"]
        return cols


def common_grid(family: PosteriorFamily, g_count: int = DEFAULT_GRID) -> np.ndarray:
    if g_count < 2:
        raise InputError("grid needs at least 2 points")
    if family.b_count == 0:
        raise InputError("empty family")
    leading = np.array([p.lambdas[0] for p in family.paths])
    top = float(np.quantile(leading, LAMBDA_MAX_QUANTILE))
    if not top > 0:
        top = 1.0  # every path is flat; any positive span works
    return np.linspace(0.0, top, g_count)


def evaluate_family(family: PosteriorFamily, lambdas: np.ndarray) -> FamilyGrid:
    lambdas = np.asarray(lambdas, dtype=float)
    curves = np.vstack([eval_path(p, lambdas) for p in family.paths])
    return FamilyGrid(lambdas, curves)


def modified_band_depth(curves) -> np.ndarray:
    """Modified band depth with bands from pairs of curves.

    For curve b at grid point g, the pairs whose band misses it are exactly
    the pairs lying both strictly below or both strictly above it, which
    gives an O(B G log B) count.
    """
    curves = np.asarray(curves, dtype=float)
    b_count, g_count = curves.shape
    if b_count < 2:
        raise InputError("band depth needs at least 2 curves")
    ordered = np.sort(curves, axis=0)
    below = np.empty_like(curves)
    above = np.empty_like(curves)
    for g in range(g_count):
        below[:, g] = np.searchsorted(ordered[:, g], curves[:, g], side="left")
        above[:, g] = b_count - np.searchsorted(ordered[:, g], curves[:, g],
                                                side="right")
    pairs = b_count * (b_count - 1) / 2.0
    missed = below * (below - 1) / 2.0 + above * (above - 1) / 2.0
    return np.mean((pairs - missed) / pairs, axis=1)


def central_envelopes(grid_family: FamilyGrid, depths=None,
                      proportions=DEFAULT_PROPORTIONS) -> EnvelopeSet:
    """Pointwise min/max over the ceil(p B) deepest curves for each p."""
    curves = grid_family.curves
    b_count = curves.shape[0]
    if b_count < 2:
        raise InputError("envelopes need at least 2 curves")
    proportions = tuple(float(p) for p in proportions)
    if any(not 0 < p <= 1 for p in proportions):
        raise InputError("proportions must lie in (0, 1]")
    if depths is None:
        depths = modified_band_depth(curves)
    depths = np.asarray(depths, dtype=float)
    # deepest first, lower index first among equal depths
    rank = np.argsort(-depths, kind="mergesort")
    lower = np.empty((len(proportions), curves.shape[1]))
    upper = np.empty_like(lower)
    for k, p in enumerate(proportions):
        keep = rank[:max(1, math.ceil(p * b_count - 1e-9))]
        lower[k] = curves[keep].min(axis=0)
        upper[k] = curves[keep].max(axis=0)
    median_index = int(np.argmax(depths))
    return EnvelopeSet(grid_family.lambdas, proportions, lower, upper,
                       curves[median_index].copy(), median_index)


def summarize_family(family: PosteriorFamily, g_count: int = DEFAULT_GRID,
                     proportions=DEFAULT_PROPORTIONS) -> EnvelopeSet:
    grid = evaluate_family(family, common_grid(family, g_count))
    return central_envelopes(grid, proportions=proportions)
