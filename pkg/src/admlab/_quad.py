"""Adaptive Gauss-Legendre quadrature used by the norm-integral routines.

Intervals are split recursively until the 16-point value agrees with the sum
of the two half-interval values within the interval's error budget (budgets
halve with each split).  Integrands with absolute-value kinks converge
geometrically under bisection, which is what the |<y, A T(s) x>| integrals
need; a depth cap keeps non-convergence loud.
"""

from __future__ import annotations

import numpy as np

__all__ = ["QuadratureError", "adaptive_interval"]

_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(16)


class QuadratureError(Exception):
    """Adaptive refinement failed to converge within the depth cap."""


def _gauss(f, a: float, b: float) -> float:
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    return half * float(np.dot(_WEIGHTS, f(mid + half * _NODES)))


def adaptive_interval(f, a: float, b: float, tol: float, max_depth: int = 40) -> float:
    """integral_a^b f, f vectorized real nonnegative-ish, abs error <= ~tol."""
    total = 0.0
    stack = [(a, b, _gauss(f, a, b), tol, 0)]
    while stack:
        lo, hi, whole, budget, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        left = _gauss(f, lo, mid)
        right = _gauss(f, mid, hi)
        if abs(whole - (left + right)) <= budget or hi - lo <= 1e-300:
            total += left + right
            continue
        if depth >= max_depth:
            raise QuadratureError(
                f"no convergence on [{lo:g}, {hi:g}] after {max_depth} levels"
            )
        stack.append((lo, mid, left, 0.5 * budget, depth + 1))
        stack.append((mid, hi, right, 0.5 * budget, depth + 1))
    return total
