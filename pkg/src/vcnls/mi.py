"""Modulational-instability analytics for the trap-free coupled system.

Continuous-wave backgrounds exist only for b = 0. Linearizing plane-wave
perturbations around them gives the dispersion relation

    omega^2 = a^2 k^4 + a h k^2 S  +/-  |a h| k^2 S,      S = |psi0|^2 + |phi0|^2

whose lower branch turns negative (complex omega, instability) exactly for
0 < k^2 < -2 h S / a when a*h < 0. The gain is Lambda = 2 Im omega on that
branch, zero elsewhere.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field

import numpy as np

from . import numerics
from .coeffexpr import CoefficientSet, as_callable, evaluate

_B_ZERO_TOL = 1e-14
_CACHE_DT = 1.0 / 256.0


@dataclass
class CWBackground:
    """Spatially uniform background pair with decaying amplitudes.

    |psi0(t)| = A0 exp(-int d); the common phase integral carries
    g + h (A0^2 + B0^2) e^{-2 int d}. Cumulative integrals are cached on a
    grid with cubic Hermite interpolation and extended on demand.
    """

    coeffs: CoefficientSet
    A0: float = 1.0
    B0: float = 1.0
    theta1_0: float = 0.0
    theta2_0: float = 0.0
    t_max: float = 6.0
    _d_int: object = field(init=False, repr=False)
    _phase_int: object = field(init=False, repr=False)

    def __post_init__(self):
        grid = np.linspace(0.0, max(self.t_max, 1.0), 257)
        bvals = np.abs(evaluate(self.coeffs.b, grid))
        if bvals.max() > _B_ZERO_TOL:
            raise ValueError("CW backgrounds require b(t) = 0 (no harmonic trap)")
        self._rebuild(max(self.t_max, 1.0))

    def _rebuild(self, t_max):
        self.t_max = float(t_max)
        n = int(round(self.t_max / _CACHE_DT)) + 1
        self._grid = np.linspace(0.0, self.t_max, max(n, 64))
        d_fn = as_callable(self.coeffs.d)
        self._d_int = numerics.cumulative_antiderivative(d_fn, self._grid, tol=1e-12)
        self._phase_int = None  # built lazily: only psi0/phi0 need phases

    def _phases(self):
        if self._phase_int is None:
            g_fn = as_callable(self.coeffs.g)
            h_fn = as_callable(self.coeffs.h)
            amp2 = self.A0 ** 2 + self.B0 ** 2

            def phase_rate(s):
                return g_fn(s) + h_fn(s) * amp2 * np.exp(-2.0 * self._d_int(s))

            self._phase_int = numerics.cumulative_antiderivative(
                phase_rate, self._grid, tol=1e-12)
        return self._phase_int

    def _ensure(self, t):
        tmax = float(np.max(t))
        if tmax > self.t_max:
            self._rebuild(2.0 * tmax)
        if float(np.min(t)) < 0:
            raise ValueError("CW background is solved for t >= 0")

    def decay_integral(self, t):
        """int_0^t d(s) ds."""
        self._ensure(t)
        return self._d_int(t)

    def total_power(self, t):
        """S(t) = (A0^2 + B0^2) e^{-2 int d}."""
        self._ensure(t)
        return (self.A0 ** 2 + self.B0 ** 2) * np.exp(-2.0 * self._d_int(t))

    def psi0(self, t):
        self._ensure(t)
        return self.A0 * np.exp(self.theta1_0 * 1j - self._d_int(t)
                                - 1j * self._phases()(t))

    def phi0(self, t):
        self._ensure(t)
        return self.B0 * np.exp(self.theta2_0 * 1j - self._d_int(t)
                                + 1j * self._phases()(t))


def cw_background(coeffs: CoefficientSet, A0=1.0, B0=1.0,
                  theta1_0=0.0, theta2_0=0.0, t_max=6.0) -> CWBackground:
    return CWBackground(coeffs, A0, B0, theta1_0, theta2_0, t_max)


def dispersion_relation(coeffs: CoefficientSet, cw: CWBackground, k, t,
                        branch: int = -1) -> complex:
    """omega for one sign branch; principal root with Im >= 0.

    ``branch=-1`` is the branch whose omega^2 = a^2 k^4 + 2 a h k^2 S can
    turn negative (the unstable one when a*h < 0); ``branch=+1`` gives
    omega^2 = a^2 k^4.
    """
    if branch not in (-1, 1):
        raise ValueError("branch must be +1 or -1")
    a = float(evaluate(coeffs.a, t))
    h = float(evaluate(coeffs.h, t))
    S = float(cw.total_power(t))
    w2 = a * a * k ** 4 + a * h * k ** 2 * S + branch * abs(a * h) * k ** 2 * S
    w = cmath.sqrt(complex(w2))
    if w.imag < 0:
        w = -w
    return w


def linearization_matrix(coeffs: CoefficientSet, cw: CWBackground, k, t,
                         omega) -> np.ndarray:
    """The 4x4 matrix of the linearized perturbation system at (k, t, omega)."""
    a = float(evaluate(coeffs.a, t))
    h = float(evaluate(coeffs.h, t))
    P = abs(cw.psi0(t)) ** 2
    Q = abs(cw.phi0(t)) ** 2
    A = a * k ** 2
    return np.array([
        [omega - A - h * P, -h * P, -h * Q, -h * Q],
        [-h * P, -omega - A - h * P, -h * Q, -h * Q],
        [h * P, h * P, omega + A + h * Q, h * Q],
        [h * P, h * P, h * Q, -omega + A + h * Q],
    ], dtype=complex)


def determinant_oracle(coeffs: CoefficientSet, cw: CWBackground, k, t,
                       omega) -> complex:
    """det M; zero exactly when omega solves the dispersion relation."""
    return complex(np.linalg.det(linearization_matrix(coeffs, cw, k, t, omega)))


def instability_region(coeffs: CoefficientSet, cw: CWBackground, t):
    """Bound B(t): wavenumbers with k^2 < B^2 are unstable (0 if a*h >= 0)."""
    t_arr = np.asarray(t, dtype=float)
    a = np.asarray(evaluate(coeffs.a, t_arr), dtype=float)
    h = np.asarray(evaluate(coeffs.h, t_arr), dtype=float)
    S = np.asarray(cw.total_power(t_arr), dtype=float)
    bound2 = np.where(a * h < 0, -2.0 * h / a * S, 0.0)
    out = np.sqrt(bound2)
    return float(out) if out.ndim == 0 else out


def gain(coeffs: CoefficientSet, cw: CWBackground, k, t):
    """Gain Lambda(k, t) = 2 Im omega on the unstable branch, 0 outside.

    Broadcasts over k and t arrays. Negative omega^2 below the roundoff
    floor of its two terms counts as 0: the square root would otherwise
    amplify boundary roundoff into spurious gain.
    """
    k_arr = np.asarray(k, dtype=float)
    t_arr = np.asarray(t, dtype=float)
    a = np.asarray(evaluate(coeffs.a, t_arr), dtype=float)
    h = np.asarray(evaluate(coeffs.h, t_arr), dtype=float)
    S = np.asarray(cw.total_power(t_arr), dtype=float)
    quartic = (a * k_arr) ** 2 * k_arr ** 2
    coupling = 2.0 * a * h * k_arr ** 2 * S
    w2 = quartic + coupling
    floor = 5e-14 * (np.abs(quartic) + np.abs(coupling))
    growth = np.where(-w2 > floor, -w2, 0.0)
    out = 2.0 * np.sqrt(growth)
    return float(out) if out.ndim == 0 else out


def gain_max(coeffs: CoefficientSet, cw: CWBackground, t):
    """Peak gain 2|h| S at k = +/- sqrt(-h S / a) (when a*h < 0)."""
    t_arr = np.asarray(t, dtype=float)
    a = np.asarray(evaluate(coeffs.a, t_arr), dtype=float)
    h = np.asarray(evaluate(coeffs.h, t_arr), dtype=float)
    S = np.asarray(cw.total_power(t_arr), dtype=float)
    lam = np.where(a * h < 0, 2.0 * np.abs(h) * S, 0.0)
    kmax = np.sqrt(np.where(a * h < 0, -h / a * S, 0.0))
    return lam, kmax


def gain_presets(preset: int, d_sign: int = +1):
    """The three worked coefficient families; returns (CoefficientSet, CWBackground).

    Preset 1 exists in two variants (d = +t and d = -t), selected by
    ``d_sign``; the other presets fix their own d.
    """
    if d_sign not in (-1, 1):
        raise ValueError("d_sign must be +1 or -1")
    if preset == 1:
        cs = CoefficientSet.from_strings(
            a="1 + cos(t)", c="0", d="t" if d_sign > 0 else "-t",
            g="cos(t)", h="-2 - 2*cos(t)")
    elif preset == 2:
        cs = CoefficientSet.from_strings(
            a="exp(-t^2/2)", c="0", d="t", g="cos(t)", h="-exp(t^2/2)")
    elif preset == 3:
        cs = CoefficientSet.from_strings(
            a="t + 1", c="0", d="-t", g="cos(t)", h="-4*(t + 1)*exp(-t^2)")
    else:
        raise ValueError(f"unknown preset {preset!r} (use 1, 2 or 3)")
    return cs, cw_background(cs)
