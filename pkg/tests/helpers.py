"""Independent oracles shared by the test modules.

Everything here deliberately avoids the library code paths it is used to
check: root finding is plain midpoint bisection, the normal CDF comes from
``math.erfc``, and information quantities are computed from entropies.
"""

from __future__ import annotations

import math

import numpy as np


def bisect_root(f, lo: float, hi: float, iters: int = 200) -> float:
    """Midpoint bisection for a sign-changing f on [lo, hi]."""
    flo = f(lo)
    if (flo > 0.0) == (f(hi) > 0.0):
        raise ValueError("no sign change on the bracket")
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if (f(mid) > 0.0) == (flo > 0.0):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def normal_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def normal_pdf(x: float) -> float:
    return math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)


def refined_normal_ppf(u: float, x0: float) -> float:
    """Newton-polish a starting quantile guess to double precision."""
    x = x0
    for _ in range(3):
        err = normal_cdf(x) - u
        x -= err / normal_pdf(x)
    return x


def mutual_information_bits(problem, signals) -> float:
    """I(state; signals) from the joint table via entropies."""
    axes = problem.signal_axes(signals)
    drop = tuple(ax for ax in range(1, problem.probs.ndim) if ax not in axes)
    marg = problem.probs.sum(axis=drop) if drop else problem.probs
    flat = marg.reshape(len(problem.states), -1)
    p_y = flat.sum(axis=1)
    p_s = flat.sum(axis=0)
    total = 0.0
    for i in range(flat.shape[0]):
        for j in range(flat.shape[1]):
            p = flat[i, j]
            if p > 0.0:
                total += p * math.log2(p / (p_y[i] * p_s[j]))
    return total


def variance_reduction(problem, signals) -> float:
    """Var(Y) - E[Var(Y | signals)] straight from the joint table."""
    y = np.asarray([float(s) for s in problem.states])
    axes = problem.signal_axes(signals)
    drop = tuple(ax for ax in range(1, problem.probs.ndim) if ax not in axes)
    marg = problem.probs.sum(axis=drop) if drop else problem.probs
    flat = marg.reshape(len(problem.states), -1)
    prior = flat.sum(axis=1)
    var_y = float(prior @ (y * y) - (prior @ y) ** 2)
    expected_cond_var = 0.0
    for j in range(flat.shape[1]):
        p = float(flat[:, j].sum())
        if p > 0.0:
            cond = flat[:, j] / p
            mean = float(cond @ y)
            expected_cond_var += p * (float(cond @ (y * y)) - mean * mean)
    return var_y - expected_cond_var
