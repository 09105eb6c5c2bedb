"""Adaptive Simpson quadrature."""

from __future__ import annotations

from typing import Callable


def adaptive_simpson(f: Callable[[float], float], a: float, b: float,
                     tol: float = 1e-10, max_depth: int = 50, min_depth: int = 4) -> float:
    """Integral of ``f`` over ``[a, b]`` to absolute tolerance ``tol``.

    Each accepted panel is Richardson-corrected (``S2 + (S2 - S1) / 15``).
    Panels are always split at least ``min_depth`` times so that a lucky
    agreement on the coarse grid is not accepted.
    """
    if a == b:
        return 0.0
    if a > b:
        return -adaptive_simpson(f, b, a, tol, max_depth, min_depth)

    fa, fb, fm = f(a), f(b), f(0.5 * (a + b))
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    total = 0.0
    # explicit stack instead of recursion: (a, b, fa, fm, fb, whole, tol, depth)
    stack = [(a, b, fa, fm, fb, whole, tol, 0)]
    while stack:
        a, b, fa, fm, fb, whole, tol, depth = stack.pop()
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
        right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
        delta = left + right - whole
        if depth >= max_depth or (depth >= min_depth and abs(delta) <= 15.0 * tol):
            total += left + right + delta / 15.0
        else:
            stack.append((m, b, fm, frm, fb, right, 0.5 * tol, depth + 1))
            stack.append((a, m, fa, flm, fm, left, 0.5 * tol, depth + 1))
    return total
