"""Shared numerical kernels: quadrature, fixed-step RK4, cached antiderivatives."""

from __future__ import annotations

from typing import Callable

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from .errors import QuadratureError

SIMPSON_DEFAULT_TOL = 1e-10
SIMPSON_DEFAULT_RTOL = 1e-12
SIMPSON_MAX_DEPTH = 40


def _simpson(f, a, fa, b, fb):
    m = 0.5 * (a + b)
    fm = f(m)
    return m, fm, (b - a) * (fa + 4.0 * fm + fb) / 6.0


def adaptive_simpson(f: Callable[[float], float], a: float, b: float,
                     tol: float = SIMPSON_DEFAULT_TOL,
                     max_depth: int = SIMPSON_MAX_DEPTH,
                     rtol: float = SIMPSON_DEFAULT_RTOL) -> float:
    """Integrate ``f`` over [a, b] to abs accuracy ``tol`` or rel ``rtol``.

    Classic adaptive Simpson with Richardson correction; the relative floor
    keeps huge integrands (where ``tol`` is below roundoff) convergent.
    Raises :class:`QuadratureError` if the refinement depth is exhausted.
    """
    if a == b:
        return 0.0
    sign = 1.0
    if b < a:
        a, b = b, a
        sign = -1.0

    def recurse(lo, flo, hi, fhi, mid, fmid, whole, eps, depth):
        lmid, flmid, left = _simpson(f, lo, flo, mid, fmid)
        rmid, frmid, right = _simpson(f, mid, fmid, hi, fhi)
        two = left + right
        delta = two - whole
        if abs(delta) <= 15.0 * max(eps, rtol * abs(two)):
            return two + delta / 15.0
        if depth >= max_depth:
            raise QuadratureError(
                f"quadrature did not converge on [{lo:g}, {hi:g}] "
                f"after depth {max_depth}")
        half = 0.5 * eps
        return (recurse(lo, flo, mid, fmid, lmid, flmid, left, half, depth + 1)
                + recurse(mid, fmid, hi, fhi, rmid, frmid, right, half, depth + 1))

    fa, fb = f(a), f(b)
    mid, fmid, whole = _simpson(f, a, fa, b, fb)
    return sign * recurse(a, fa, b, fb, mid, fmid, whole, tol, 0)


def rk4_path(rhs: Callable[[float, np.ndarray], np.ndarray],
             y0, t: np.ndarray) -> np.ndarray:
    """Classic RK4 along the (ordered, not necessarily uniform) grid ``t``.

    Returns the state at every grid node, shape ``(len(t), len(y0))``.
    """
    t = np.asarray(t, dtype=float)
    y = np.empty((t.size, np.size(y0)), dtype=float)
    y[0] = np.asarray(y0, dtype=float)
    for i in range(t.size - 1):
        h = t[i + 1] - t[i]
        ti, yi = t[i], y[i]
        k1 = rhs(ti, yi)
        k2 = rhs(ti + 0.5 * h, yi + 0.5 * h * k1)
        k3 = rhs(ti + 0.5 * h, yi + 0.5 * h * k2)
        k4 = rhs(ti + h, yi + h * k3)
        y[i + 1] = yi + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return y


def cumulative_antiderivative(f: Callable[[float], float], t: np.ndarray,
                              tol: float = SIMPSON_DEFAULT_TOL):
    """Antiderivative ``F(t) = int_{t[0]}^t f`` as a cubic Hermite spline.

    Node values come from per-interval adaptive Simpson (so the result is
    additive over splits); node derivatives are ``f`` itself, which keeps the
    interpolant exact for polynomial integrands up to cubic order.
    """
    t = np.asarray(t, dtype=float)
    vals = np.empty(t.size)
    vals[0] = 0.0
    total = 0.0
    comp = 0.0  # Neumaier compensation: keeps the prefix sums at ~1 ulp
    for i in range(t.size - 1):
        piece = adaptive_simpson(f, t[i], t[i + 1], tol)
        s = total + piece
        if abs(total) >= abs(piece):
            comp += (total - s) + piece
        else:
            comp += (piece - s) + total
        total = s
        vals[i + 1] = total + comp
    derivs = np.array([f(ti) for ti in t], dtype=float)
    return CubicHermiteSpline(t, vals, derivs)


def hermite_path(t: np.ndarray, values: np.ndarray, derivatives: np.ndarray):
    """Cubic Hermite interpolant through sampled values with known slopes."""
    return CubicHermiteSpline(np.asarray(t, float), np.asarray(values, float),
                              np.asarray(derivatives, float))


def trig_interp(samples: np.ndarray, x0: float, period: float,
                query: np.ndarray) -> np.ndarray:
    """Band-limited (trigonometric) interpolation of periodic samples.

    ``samples`` live on the uniform grid ``x0 + j*period/n``; ``query`` points
    may fall anywhere and are wrapped into the period.
    """
    samples = np.asarray(samples)
    n = samples.size
    coeffs = np.fft.fft(samples) / n
    modes = np.fft.fftfreq(n, d=1.0 / n)  # integer mode numbers
    # Split the Nyquist mode evenly so real input interpolates to real output.
    if n % 2 == 0:
        ny = n // 2
        coeffs = np.concatenate([coeffs, [coeffs[ny] / 2.0]])
        modes = np.concatenate([modes, [ny]])
        coeffs[ny] /= 2.0
        modes[ny] = -ny
    q = (np.asarray(query, dtype=float) - x0) * (2.0 * np.pi / period)
    out = np.exp(1j * np.outer(q, modes)) @ coeffs
    if np.isrealobj(samples):
        return out.real
    return out
