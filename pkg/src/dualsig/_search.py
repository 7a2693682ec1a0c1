"""Scalar root finding and 1-D minimization used across the package."""

from __future__ import annotations

from typing import Callable


def bisect(f: Callable[[float], float], lo: float, hi: float,
           tol: float = 1e-12, max_iter: int = 200) -> float:
    """Root of a sign-changing continuous function on [lo, hi].

    Iterates until the bracket width falls below ``tol`` (or float
    resolution), keeping the endpoint ordering given by the caller.
    """
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0.0) == (fhi > 0.0):
        raise ValueError(f"no sign change on [{lo}, {hi}]: f(lo)={flo}, f(hi)={fhi}")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi or hi - lo < tol:
            break
        fmid = f(mid)
        if fmid == 0.0:
            return mid
        if (fmid > 0.0) == (flo > 0.0):
            lo, flo = mid, fmid
        else:
            hi, fhi = mid, fmid
    return 0.5 * (lo + hi)


def minimize_grid_refine(f: Callable[[float], float], lo: float, hi: float,
                         resolution: float = 1e-4, iters: int = 90) -> tuple[float, float]:
    """Minimize a unimodal function: coarse grid scan, then ternary refine.

    Returns ``(argmin, min_value)``.  The grid step is
    ``resolution * (hi - lo)`` capped at 10**5 cells; refinement shrinks the
    best bracket by 2/3 per iteration.
    """
    span = hi - lo
    if span <= 0.0:
        raise ValueError("need lo < hi")
    n = min(int(round(1.0 / resolution)), 100_000)
    best_i, best_v = 0, f(lo)
    for i in range(1, n + 1):
        x = lo + span * i / n
        v = f(x)
        if v < best_v:
            best_i, best_v = i, v
    a = lo + span * max(best_i - 1, 0) / n
    b = lo + span * min(best_i + 1, n) / n
    for _ in range(iters):
        m1 = a + (b - a) / 3.0
        m2 = b - (b - a) / 3.0
        if f(m1) <= f(m2):
            b = m2
        else:
            a = m1
        if b - a <= 0.0:
            break
    x = 0.5 * (a + b)
    v = f(x)
    if best_v < v:
        return lo + span * best_i / n, best_v
    return x, v
