"""One-dimensional search helpers: coarse grid, golden-section refinement, bisection."""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section_max(f: Callable[[float], float], a: float, b: float,
                       tol: float = 1e-9, max_iter: int = 200) -> tuple[float, float]:
    """Maximise a unimodal ``f`` on ``[a, b]``; returns ``(x, f(x))``."""
    a, b = min(a, b), max(a, b)
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    return (c, fc) if fc >= fd else (d, fd)


def grid_then_golden(f: Callable[[float], float], a: float, b: float, n_grid: int = 257,
                     tol: float = 1e-9, f_vec: Callable[[np.ndarray], np.ndarray] | None = None,
                     ) -> tuple[float, float]:
    """Global-ish maximiser: evaluate a uniform grid (endpoints included), then
    golden-section refine inside the two cells around the best grid point.

    The refined point only replaces the grid point when strictly better, so an
    endpoint optimum is returned exactly.
    """
    if b <= a:
        return a, f(a)
    xs = np.linspace(a, b, n_grid)
    ys = f_vec(xs) if f_vec is not None else np.array([f(x) for x in xs])
    i = int(np.argmax(ys))
    best_x = float(xs[i])
    best_y = f(best_x)
    lo, hi = float(xs[max(i - 1, 0)]), float(xs[min(i + 1, n_grid - 1)])
    x, y = golden_section_max(f, lo, hi, tol=tol)
    if y > best_y:
        best_x, best_y = x, y
    return best_x, best_y


def bisect_threshold(pred: Callable[[float], bool], lo: float, hi: float,
                     tol: float = 1e-9, max_iter: int = 200) -> float:
    """Smallest ``x`` in ``[lo, hi]`` with ``pred(x)`` true, to within ``tol``.

    Assumes ``pred`` is monotone (false then true) and ``pred(hi)`` holds; the
    returned point always satisfies ``pred``.
    """
    if pred(lo):
        return lo
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if hi - lo <= tol or mid in (lo, hi):
            break
        if pred(mid):
            hi = mid
        else:
            lo = mid
    return hi
