"""Planar traveling-wave system: fixed points, orbits, spectra, sensitivity.

The autonomous system is G' = P, P' = g0*G + 2*h0*G^3; the forced variant
adds eps*cos(K*xi) to P'. Orbits are integrated with fixed-step RK4 so that
spectra come from uniformly sampled series with no resampling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import OrbitEscapeError

SADDLE = "saddle"
CENTER = "center"

ESCAPE_LIMIT = 1e12
MIN_SPECTRUM_SAMPLES = 64

# chaos indicators: separation amplification of nearby initial conditions and
# the fraction of spectral power held by the top bins
CHAOS_AMPLIFICATION = 100.0
CHAOS_TOP5_POWER_MAX = 0.5
QUASIPERIODIC_TOP5_POWER_MIN = 0.8


@dataclass(frozen=True)
class Forcing:
    epsilon: float
    K: float

    def __post_init__(self):
        if self.epsilon < 0:
            raise ValueError("forcing strength epsilon must be >= 0")


@dataclass(frozen=True)
class PlanarParams:
    g0: float
    h0: float
    forcing: Optional[Forcing] = None

    def __post_init__(self):
        if self.g0 == 0 or self.h0 == 0:
            raise ValueError("g0 and h0 must be nonzero")


@dataclass(frozen=True)
class FixedPoint:
    G: float
    P: float
    kind: str


@dataclass(frozen=True)
class Orbit:
    xi: np.ndarray
    G: np.ndarray
    P: np.ndarray
    params: PlanarParams
    init: tuple
    step: float


def jacobian_determinant(p: PlanarParams, G: float) -> float:
    """det of the linearization at (G, 0): -g0 - 6*h0*G^2."""
    return -p.g0 - 6.0 * p.h0 * G * G


def _classify(p: PlanarParams, G: float) -> str:
    return SADDLE if jacobian_determinant(p, G) < 0 else CENTER


def fixed_points(p: PlanarParams) -> list[FixedPoint]:
    """All equilibria with their saddle/center classification."""
    pts = [FixedPoint(0.0, 0.0, _classify(p, 0.0))]
    ratio = p.g0 / p.h0
    if ratio < 0:
        root = math.sqrt(-p.g0 / (2.0 * p.h0))
        pts.append(FixedPoint(root, 0.0, _classify(p, root)))
        pts.append(FixedPoint(-root, 0.0, _classify(p, -root)))
    return pts


def hamiltonian(p: PlanarParams, G, P):
    """H = P^2/2 - (g0/2) G^2 - (h0/2) G^4 (conserved when unforced)."""
    G = np.asarray(G, dtype=float)
    P = np.asarray(P, dtype=float)
    out = 0.5 * P ** 2 - 0.5 * p.g0 * G ** 2 - 0.5 * p.h0 * G ** 4
    return float(out) if out.ndim == 0 else out


def integrate_orbit(p: PlanarParams, init, length: float, step: float) -> Orbit:
    """Fixed-step RK4 trajectory of length ``length`` from ``init``."""
    if step <= 0:
        raise ValueError("step must be positive")
    g0, h0 = p.g0, p.h0
    eps = p.forcing.epsilon if p.forcing else 0.0
    K = p.forcing.K if p.forcing else 0.0
    n = int(round(length / step))
    G = np.empty(n + 1)
    P = np.empty(n + 1)
    G[0], P[0] = float(init[0]), float(init[1])
    g, q = G[0], P[0]
    half = 0.5 * step
    sixth = step / 6.0
    cos = math.cos
    for i in range(n):
        xi = i * step
        # k1
        f1 = g0 * g + 2.0 * h0 * g ** 3 + (eps * cos(K * xi) if eps else 0.0)
        # k2, k3 at midpoint
        xm = xi + half
        fm = eps * cos(K * xm) if eps else 0.0
        g2 = g + half * q
        q2 = q + half * f1
        f2 = g0 * g2 + 2.0 * h0 * g2 ** 3 + fm
        g3 = g + half * q2
        q3 = q + half * f2
        f3 = g0 * g3 + 2.0 * h0 * g3 ** 3 + fm
        # k4
        xe = xi + step
        g4 = g + step * q3
        q4 = q + step * f3
        f4 = g0 * g4 + 2.0 * h0 * g4 ** 3 + (eps * cos(K * xe) if eps else 0.0)
        g = g + sixth * (q + 2.0 * q2 + 2.0 * q3 + q4)
        q = q + sixth * (f1 + 2.0 * f2 + 2.0 * f3 + f4)
        if abs(g) > ESCAPE_LIMIT or abs(q) > ESCAPE_LIMIT:
            raise OrbitEscapeError(
                f"orbit escaped (|G| or |P| > {ESCAPE_LIMIT:g}) at xi = {xe:g}")
        G[i + 1] = g
        P[i + 1] = q
    xi_grid = step * np.arange(n + 1)
    return Orbit(xi_grid, G, P, p, (float(init[0]), float(init[1])), step)


def hamiltonian_drift(orbit: Orbit) -> float:
    """|H(end) - H(start)| relative to max(|H(start)|, 1e-30)."""
    h0 = hamiltonian(orbit.params, orbit.G[0], orbit.P[0])
    h1 = hamiltonian(orbit.params, orbit.G[-1], orbit.P[-1])
    return abs(h1 - h0) / max(abs(h0), 1e-30)


def spectrum(orbit: Orbit):
    """One-sided magnitude spectrum of the G channel.

    The mean (DC) is removed, the series is zero-padded to the next power
    of two, and frequencies are reported in cycles per unit xi. Returns
    (freqs, mags) with the DC bin dropped.
    """
    g = orbit.G
    if g.size < MIN_SPECTRUM_SAMPLES:
        raise ValueError(f"need at least {MIN_SPECTRUM_SAMPLES} samples, got {g.size}")
    centered = g - g.mean()
    nfft = 1 << (g.size - 1).bit_length()
    mags = np.abs(np.fft.rfft(centered, n=nfft))
    freqs = np.fft.rfftfreq(nfft, d=orbit.step)
    return freqs[1:], mags[1:]


def spectral_concentration(mags: np.ndarray, nbins: int = 5) -> float:
    """Fraction of total spectral power captured by the ``nbins`` largest bins."""
    power = np.asarray(mags, dtype=float) ** 2
    total = power.sum()
    if total == 0:
        return 0.0
    top = np.sort(power)[-nbins:]
    return float(top.sum() / total)


@dataclass(frozen=True)
class SensitivityReport:
    xi: np.ndarray
    separation: np.ndarray
    max_separation: float
    initial_separation: float

    @property
    def amplification(self) -> float:
        if self.initial_separation == 0:
            return 0.0
        return self.max_separation / self.initial_separation


def sensitivity_report(p: PlanarParams, init1, init2, length: float,
                       step: float) -> SensitivityReport:
    """Euclidean separation of trajectories from two initial conditions."""
    o1 = integrate_orbit(p, init1, length, step)
    o2 = integrate_orbit(p, init2, length, step)
    sep = np.hypot(o1.G - o2.G, o1.P - o2.P)
    return SensitivityReport(o1.xi, sep, float(sep.max()), float(sep[0]))
