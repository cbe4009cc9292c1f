"""Jacobi elliptic functions sn, cn, dn and the quarter period K.

Convention
----------
Everything here is parameterized by the **modulus** ``l`` in ``[0, 1]``,
*not* the parameter ``m = l**2`` that scipy and several references use.
With that convention ``sn(u; 0) = sin(u)``, ``sn(u; 1) = tanh(u)``,
``dn(u; 1) = sech(u)`` and the complementary modulus satisfies
``lhat**2 = 1 - l**2``.

The computation is a descending Landen transformation driven by the
arithmetic-geometric mean: accurate to ~1e-15 uniformly over the modulus
range, with the degenerate trigonometric/hyperbolic limits taken in closed
form near l = 0 and l = 1.
"""

from __future__ import annotations

import numpy as np

AGM_TOL = 1e-15
AGM_MAX_ITER = 20
DEGENERATE_EPS = 1e-12


def _check_modulus(l: float) -> float:
    l = float(l)
    if not np.isfinite(l) or l < 0.0 or l > 1.0:
        raise ValueError(f"modulus must lie in [0, 1], got {l!r}")
    return l


def _as_finite_array(u):
    arr = np.asarray(u, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("argument u must be finite")
    return arr, np.isscalar(u) or arr.ndim == 0


def _sncndn(u: np.ndarray, l: float):
    """Descending Landen/AGM recursion for sn, cn, dn at modulus l in (0, 1).

    The backward pass works on cn/sn ratios instead of amplitudes, which
    stays stable at quarter-period points where the classic arcsin chain
    suffers 0/0 cancellation in dn.
    """
    emc = (1.0 - l) * (1.0 + l)  # complementary parameter lhat**2
    em = []
    en = []
    a = 1.0
    c = 1.0
    for _ in range(AGM_MAX_ITER):
        em.append(a)
        emc = np.sqrt(emc)
        en.append(emc)
        c = 0.5 * (a + emc)
        if abs(a - emc) <= AGM_TOL * a:
            break
        emc *= a
        a = c
    phi = c * u
    sn = np.sin(phi)
    cn = np.cos(phi)
    dn = np.ones_like(sn)
    zero = sn == 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        aa = cn / np.where(zero, 1.0, sn)
        cc = c * aa
        for b_em, b_en in zip(reversed(em), reversed(en)):
            aa = cc * aa
            cc = cc * dn
            dn = (b_en + aa) / (b_em + aa)
            aa = cc / b_em
        amp = 1.0 / np.sqrt(cc * cc + 1.0)
        sn_out = np.where(sn >= 0.0, amp, -amp)
        cn_out = cc * sn_out
    sn_out = np.where(zero, 0.0, sn_out)
    cn_out = np.where(zero, cn, cn_out)
    dn = np.where(zero, 1.0, dn)
    return sn_out, cn_out, dn


def jacobi_sn(u, l):
    """Sine amplitude sn(u; l). Odd in u, bounded by 1."""
    l = _check_modulus(l)
    arr, scalar = _as_finite_array(u)
    if l < DEGENERATE_EPS:
        out = np.sin(arr)
    elif l > 1.0 - DEGENERATE_EPS:
        out = np.tanh(arr)
    else:
        out = _sncndn(arr, l)[0]
    return float(out) if scalar else out


def jacobi_cn(u, l):
    """Cosine amplitude cn(u; l). Even in u, cn(0) = 1."""
    l = _check_modulus(l)
    arr, scalar = _as_finite_array(u)
    if l < DEGENERATE_EPS:
        out = np.cos(arr)
    elif l > 1.0 - DEGENERATE_EPS:
        out = 1.0 / np.cosh(arr)
    else:
        out = _sncndn(arr, l)[1]
    return float(out) if scalar else out


def jacobi_dn(u, l):
    """Delta amplitude dn(u; l). Even in u, lhat <= dn <= 1."""
    l = _check_modulus(l)
    arr, scalar = _as_finite_array(u)
    if l < DEGENERATE_EPS:
        out = np.ones_like(arr)
    elif l > 1.0 - DEGENERATE_EPS:
        out = 1.0 / np.cosh(arr)
    else:
        out = _sncndn(arr, l)[2]
    return float(out) if scalar else out


def complete_elliptic_k(l) -> float:
    """Quarter period K(l) via the AGM; diverges (raises) as l -> 1."""
    l = float(l)
    if not np.isfinite(l) or l < 0.0:
        raise ValueError(f"modulus must lie in [0, 1), got {l!r}")
    if l >= 1.0 - DEGENERATE_EPS:
        raise ValueError("K(l) diverges logarithmically as l -> 1")
    a = 1.0
    b = np.sqrt((1.0 - l) * (1.0 + l))
    for _ in range(AGM_MAX_ITER):
        if abs(a - b) <= AGM_TOL * a:
            break
        a, b = 0.5 * (a + b), np.sqrt(a * b)
    return float(np.pi / (2.0 * a))
