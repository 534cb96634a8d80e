"""Compiled inner loops for the Huber solution path.

Everything here works on data sorted ascending with weights aligned to
the sorted order. The Python wrappers in :mod:`huberfamily.paths` do the
sorting and validation.
"""

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def lower_weighted_median_sorted(x, w):
    total = 0.0
    for i in range(x.shape[0]):
        total += w[i]
    half = 0.5 * total
    acc = 0.0
    for i in range(x.shape[0]):
        acc += w[i]
        if acc >= half:
            return x[i]
    return x[x.shape[0] - 1]


@njit(cache=True, nogil=True)
def weighted_mad_sorted(x, w, med):
    d = np.abs(x - med)
    order = np.argsort(d, kind="mergesort")
    return lower_weighted_median_sorted(d[order], w[order])


@njit(cache=True, nogil=True)
def weighted_sd(x, w):
    total = 0.0
    mean = 0.0
    for i in range(x.shape[0]):
        total += w[i]
        mean += w[i] * x[i]
    mean /= total
    acc = 0.0
    for i in range(x.shape[0]):
        acc += w[i] * (x[i] - mean) ** 2
    return np.sqrt(acc / total)


@njit(cache=True, nogil=True)
def huber_path_sorted(x, w, med, lam_out, mu_out):
    """Trace the path at sigma = 1; returns the number of knots written.

    The interior set {i : |x_i - mu| < lam} is a contiguous block
    x[lo..hi] of the sorted data, so the step-size minimum is attained at
    one of the block ends (points above the median), (points below the
    median), or at a point equal to the median (step = lam).
    """
    n = x.shape[0]
    cw = np.empty(n + 1)
    cw[0] = 0.0
    mu = 0.0
    for i in range(n):
        cw[i + 1] = cw[i] + w[i]
        mu += w[i] * x[i]
    total = cw[n]

    if x[n - 1] == x[0]:
        lam_out[0] = 0.0
        mu_out[0] = x[0]
        return 1

    lam = max(x[n - 1] - mu, mu - x[0])
    lam_out[0] = lam
    mu_out[0] = mu
    count = 1

    lo = 0
    hi = n - 1
    eps = 1e-12 * (1.0 + lam + abs(mu))
    while lo <= hi and abs(x[lo] - mu) >= lam - eps:
        lo += 1
    while hi >= lo and abs(x[hi] - mu) >= lam - eps:
        hi -= 1

    while lo <= hi and count < n:
        w_int = cw[hi + 1] - cw[lo]
        # crossed points left of the block sit below mu, right of it above
        signed = (total - cw[hi + 1]) - cw[lo]
        if w_int <= 0.0:
            break
        eta = -signed / w_int

        gamma = np.inf
        g_right = np.inf
        g_left = np.inf
        if x[hi] > med:
            denom = 1.0 - eta
            g_right = (lam - (x[hi] - mu)) / denom if denom > 0.0 else 0.0
            gamma = min(gamma, g_right)
        if x[lo] < med:
            denom = 1.0 + eta
            g_left = (lam + (x[lo] - mu)) / denom if denom > 0.0 else 0.0
            gamma = min(gamma, g_left)
        hits_median = x[lo] <= med and med <= x[hi]
        if hits_median:
            gamma = min(gamma, lam)
        gamma = min(max(gamma, 0.0), lam)

        tol = 1e-12 * (1.0 + lam)
        if gamma >= lam - tol and hits_median:
            lam_out[count] = 0.0
            mu_out[count] = med
            count += 1
            break

        new_lam = lam - gamma
        new_mu = mu + gamma * eta
        if gamma > 0.0:
            lam_out[count] = new_lam
            mu_out[count] = new_mu
            count += 1
        lam = new_lam
        mu = new_mu
        if lam <= 0.0:
            break

        if g_right <= gamma + tol:
            hi -= 1
        if g_left <= gamma + tol and lo <= hi:
            lo += 1
        eps = 1e-12 * (1.0 + lam + abs(mu))
        while lo <= hi and abs(x[lo] - mu) >= lam - eps:
            lo += 1
        while hi >= lo and abs(x[hi] - mu) >= lam - eps:
            hi -= 1
    return count


@njit(cache=True, nogil=True)
def scaled_path_sorted(x, w, use_sd, lam_out, mu_out):
    """Fit the path and divide the lambda axis by the sample scale.

    Returns (knot count, sigma). sigma == 0 marks a degenerate sample,
    for which a single knot (0, common value) is written.
    """
    med = lower_weighted_median_sorted(x, w)
    if use_sd:
        sigma = weighted_sd(x, w)
    else:
        sigma = weighted_mad_sorted(x, w, med)
        if sigma == 0.0:
            sigma = weighted_sd(x, w)
    if sigma == 0.0:
        # every positively weighted point shares one value
        k = 0
        while k < x.shape[0] - 1 and w[k] <= 0.0:
            k += 1
        lam_out[0] = 0.0
        mu_out[0] = x[k]
        return 1, 0.0
    count = huber_path_sorted(x, w, med, lam_out, mu_out)
    for k in range(count):
        lam_out[k] = lam_out[k] / sigma
    return count, sigma
