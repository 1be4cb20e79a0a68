"""Simpson quadrature: composite on uniform nodes, and adaptive for oracles."""

from __future__ import annotations

import numpy as np


class QuadratureError(RuntimeError):
    pass


def simpson_weights(n_nodes: int, h: float) -> np.ndarray:
    if n_nodes < 3 or n_nodes % 2 == 0:
        raise ValueError("composite Simpson needs an odd node count >= 3")
    w = np.full(n_nodes, 2.0)
    w[1::2] = 4.0
    w[0] = w[-1] = 1.0
    return w * (h / 3.0)


def composite_simpson(values, h: float):
    """Composite Simpson rule on uniformly spaced samples (odd count)."""
    values = np.asarray(values)
    return np.dot(simpson_weights(values.size, h), values)


def integrate_uniform(f, lo: float, hi: float, n_nodes: int):
    x = np.linspace(lo, hi, n_nodes)
    return composite_simpson(f(x), (hi - lo) / (n_nodes - 1))


def richardson_simpson(f, lo: float, hi: float, n_intervals: int, rtol: float = 1e-10):
    """Simpson on ``n_intervals`` and ``2 n_intervals``; returns the fine value and the gap.

    Raises :class:`QuadratureError` when the relative gap exceeds ``rtol``.
    """
    fine_x = np.linspace(lo, hi, 2 * n_intervals + 1)
    fine_y = f(fine_x)
    fine = composite_simpson(fine_y, (hi - lo) / (2 * n_intervals))
    coarse = composite_simpson(fine_y[::2], (hi - lo) / n_intervals)
    gap = abs(fine - coarse) / max(abs(fine), np.finfo(float).tiny)
    if gap > rtol:
        raise QuadratureError(f"Simpson refinement gap {gap:.3e} exceeds {rtol:.1e}")
    return fine, gap


def adaptive_simpson(f, a: float, b: float, abs_tol: float, max_depth: int = 48,
                     min_depth: int = 4):
    """Adaptive Simpson with Richardson correction; ``f`` may return complex values.

    ``min_depth`` forces a few uniform splits first so oscillatory integrands
    cannot fool the initial estimate.
    """
    fa, fm, fb = f(a), f(0.5 * (a + b)), f(b)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    stack = [(a, b, fa, fm, fb, whole, abs_tol, 0)]
    total = 0.0
    while stack:
        lo, hi, flo, fmid, fhi, est, tol, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        lm, rm = 0.5 * (lo + mid), 0.5 * (mid + hi)
        flm, frm = f(lm), f(rm)
        left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid)
        right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi)
        delta = left + right - est
        if depth >= min_depth and abs(delta) <= 15.0 * tol:
            total += left + right + delta / 15.0
            continue
        if depth >= max_depth:
            raise QuadratureError(f"adaptive Simpson did not converge on [{lo!r}, {hi!r}]")
        stack.append((lo, mid, flo, flm, fmid, left, 0.5 * tol, depth + 1))
        stack.append((mid, hi, fmid, frm, fhi, right, 0.5 * tol, depth + 1))
    return total
