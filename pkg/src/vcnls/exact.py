"""Closed-form field families and the PDE residual certification oracle.

Each family supplies the real envelope G(xi) of a traveling-wave solution
pair psi = e^{i theta} G, phi = e^{-i theta} G, where (theta, xi) come from a
section-2 Riccati solution. Families are admissible only in the regime of
the Hamiltonian level H0 that produces them; the envelope always satisfies
G'' = g0 G + 2 h0 G^3.

The residual oracle evaluates both coupled equations on a uniform (x, t)
grid with 4th-order centered x-stencils and 2nd-order centered t-stencils,
interior points only. It certifies candidate fields against the PDE with no
reference to how they were built.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .elliptic import jacobi_cn, jacobi_dn, jacobi_sn
from .riccati import SECTION2, RiccatiSolution

DNOIDAL = "dnoidal"
BRIGHT = "bright"
PLANE_WAVE = "plane"
CNOIDAL = "cnoidal"
SNOIDAL = "snoidal"
DARK = "dark"

FAMILY_KINDS = (DNOIDAL, BRIGHT, PLANE_WAVE, CNOIDAL, SNOIDAL, DARK)

_BOUNDARY_RTOL = 1e-12


@dataclass(frozen=True)
class HamiltonianLevel:
    """Level-set data: squared envelope roots and the regime they select."""

    g0: float
    h0: float
    H0: float
    kind: str
    G1sq: Optional[float] = None
    G2sq: Optional[float] = None
    G3sq: Optional[float] = None


def _close(x, y):
    return abs(x - y) <= _BOUNDARY_RTOL * max(1.0, abs(x), abs(y))


def level_roots(g0: float, h0: float, H0: float) -> HamiltonianLevel:
    """Classify (g0, h0, H0) into a solution regime and compute the roots."""
    if g0 == 0 or h0 == 0:
        raise ValueError("g0 and h0 must be nonzero")
    disc = g0 * g0 - 8.0 * h0 * H0
    corner = g0 * g0 / (8.0 * h0)
    if h0 < 0 and g0 > 0:
        if _close(H0, 0.0):
            return HamiltonianLevel(g0, h0, H0, BRIGHT, G1sq=0.0, G2sq=-g0 / h0)
        if _close(H0, corner):
            r = -g0 / (2.0 * h0)
            return HamiltonianLevel(g0, h0, H0, PLANE_WAVE, G1sq=r, G2sq=r)
        if corner < H0 < 0.0:
            s = np.sqrt(disc)
            return HamiltonianLevel(g0, h0, H0, DNOIDAL,
                                    G1sq=(g0 - s) / (-2.0 * h0),
                                    G2sq=(g0 + s) / (-2.0 * h0))
        if H0 > 0.0:
            s = np.sqrt(disc)
            return HamiltonianLevel(g0, h0, H0, CNOIDAL,
                                    G2sq=(g0 + s) / (-2.0 * h0),
                                    G3sq=(-g0 + s) / (-2.0 * h0))
    if h0 > 0 and g0 < 0:
        if _close(H0, corner):
            r = -g0 / (2.0 * h0)
            return HamiltonianLevel(g0, h0, H0, DARK, G1sq=r, G2sq=r)
        if 0.0 < H0 < corner:
            s = np.sqrt(disc)
            return HamiltonianLevel(g0, h0, H0, SNOIDAL,
                                    G1sq=(-g0 - s) / (2.0 * h0),
                                    G2sq=(-g0 + s) / (2.0 * h0))
    raise ValueError(
        f"(g0={g0:g}, h0={h0:g}, H0={H0:g}) fits no supported solution regime")


@dataclass(frozen=True)
class SolutionFamily:
    """A closed-form traveling-wave family with its phase transform."""

    kind: str
    level: HamiltonianLevel
    xi0: float
    sign: float
    riccati: RiccatiSolution
    modulus: Optional[float]
    amplitude: float
    envelope: Callable

    @property
    def g0(self):
        return self.level.g0

    @property
    def h0(self):
        return self.level.h0

    @property
    def H0(self):
        return self.level.H0


def _envelope_for(level: HamiltonianLevel, xi0: float, sign: float):
    """Envelope callable, its modulus (None for solitons), and amplitude."""
    g0, h0 = level.g0, level.h0
    if level.kind == DNOIDAL:
        G2 = np.sqrt(level.G2sq)
        width = G2 * np.sqrt(-h0)
        l = np.sqrt(level.G2sq - level.G1sq) / G2
        return (lambda xi: sign * G2 * jacobi_dn(width * (np.asarray(xi) - xi0), l),
                float(l), G2)
    if level.kind == BRIGHT:
        amp = np.sqrt(-g0 / h0)
        width = np.sqrt(g0)
        return (lambda xi: sign * amp / np.cosh(width * (np.asarray(xi) - xi0)),
                None, amp)
    if level.kind == PLANE_WAVE:
        amp = np.sqrt(-g0 / (2.0 * h0))
        return (lambda xi: sign * amp * np.ones_like(np.asarray(xi, dtype=float)),
                None, amp)
    if level.kind == CNOIDAL:
        G2 = np.sqrt(level.G2sq)
        total = np.sqrt(level.G2sq + level.G3sq)
        width = np.sqrt(-h0) * total
        l = G2 / total
        return (lambda xi: sign * G2 * jacobi_cn(width * (np.asarray(xi) - xi0), l),
                float(l), G2)
    if level.kind == SNOIDAL:
        G1 = np.sqrt(level.G1sq)
        G2 = np.sqrt(level.G2sq)
        width = np.sqrt(h0) * G2
        l = G1 / G2
        return (lambda xi: sign * G1 * jacobi_sn(width * (np.asarray(xi) - xi0), l),
                float(l), G1)
    if level.kind == DARK:
        amp = np.sqrt(-g0 / (2.0 * h0))
        width = np.sqrt(-g0 / 2.0)
        return (lambda xi: sign * amp * np.tanh(width * (np.asarray(xi) - xi0)),
                None, amp)
    raise ValueError(f"unknown family kind {level.kind!r}")


def build_family(kind: str, g0: float, h0: float, H0: float,
                 riccati: RiccatiSolution, xi0: float = 0.0,
                 sign: float = 1.0) -> SolutionFamily:
    """Construct a family after checking regime admissibility."""
    if kind not in FAMILY_KINDS:
        raise ValueError(f"unknown family kind {kind!r}")
    if sign not in (1.0, -1.0, 1, -1):
        raise ValueError("sign must be +1 or -1")
    level = level_roots(g0, h0, H0)
    if level.kind != kind:
        raise ValueError(
            f"(g0, h0, H0) selects the {level.kind!r} regime, not {kind!r}")
    envelope, modulus, amplitude = _envelope_for(level, xi0, float(sign))
    if modulus is not None and not (0.0 <= modulus <= 1.0):
        raise ValueError(f"elliptic modulus {modulus:g} outside [0, 1]")
    return SolutionFamily(kind, level, float(xi0), float(sign), riccati,
                          modulus, float(amplitude), envelope)


def eval_fields(fam: SolutionFamily, x, t: float):
    """Sample (psi, phi) at scalar time t: psi = e^{i theta} G(xi)."""
    theta = fam.riccati.theta(x, t)
    xi = fam.riccati.xi(x, t)
    G = fam.envelope(xi)
    phase = np.exp(1j * theta)
    return G * phase, G * np.conj(phase)


def family_grid(fam: SolutionFamily, x: np.ndarray, t: np.ndarray):
    """psi, phi arrays of shape (len(t), len(x))."""
    psi = np.empty((len(t), len(x)), dtype=complex)
    phi = np.empty_like(psi)
    for j, tj in enumerate(t):
        psi[j], phi[j] = eval_fields(fam, x, float(tj))
    return psi, phi


def induced_coefficients(g0: float, h0: float, sol: RiccatiSolution) -> dict:
    """Complete a section-2 solution's (a, b, c, d) with g = g0 a beta^2 and
    h = h0 a beta^2, the normalization under which the families solve the PDE."""
    if sol.variant != SECTION2 or not sol.coeffs:
        raise ValueError("need a section2 Riccati solution carrying its coefficients")
    a, beta = sol.coeffs["a"], sol.beta

    def g(t):
        return g0 * a(t) * np.asarray(beta(t)) ** 2

    def h(t):
        return h0 * a(t) * np.asarray(beta(t)) ** 2

    return {**sol.coeffs, "g": g, "h": h}


def residual_oracle(psi: np.ndarray, phi: np.ndarray, coeff_fns: dict,
                    x: np.ndarray, t: np.ndarray,
                    check_convergence: bool = False) -> dict:
    """Max interior residual of both coupled equations.

    ``psi``/``phi`` have shape (len(t), len(x)) on uniform grids. Derivatives:
    4th-order centered in x, 2nd-order centered in t; the outermost two x
    columns and one t row on each side are excluded.

    With ``check_convergence`` the oracle re-evaluates on the 2x-coarsened
    grid and warns when the residual fails to shrink by at least 4x (the
    slowest expected order), which flags a grid too coarse to certify.
    """
    if check_convergence:
        import warnings

        fine = residual_oracle(psi, phi, coeff_fns, x, t)
        coarse = residual_oracle(psi[::2, ::2], phi[::2, ::2], coeff_fns,
                                 x[::2], t[::2])
        worst_fine = max(fine.values())
        if worst_fine > 0 and max(coarse.values()) / worst_fine < 4.0:
            warnings.warn(
                "residual not converging at the expected order; "
                "grid too coarse to certify", stacklevel=2)
        return fine
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    if psi.shape != (t.size, x.size):
        raise ValueError("field shape must be (len(t), len(x))")
    if t.size < 3 or x.size < 5:
        raise ValueError("need at least 3 time slices and 5 space points")
    dx = x[1] - x[0]
    dt = t[1] - t[0]

    def x_first(f):
        return (-f[:, 4:] + 8 * f[:, 3:-1] - 8 * f[:, 1:-3] + f[:, :-4]) / (12 * dx)

    def x_second(f):
        return (-f[:, 4:] + 16 * f[:, 3:-1] - 30 * f[:, 2:-2]
                + 16 * f[:, 1:-3] - f[:, :-4]) / (12 * dx * dx)

    def t_first(f):
        return (f[2:, :] - f[:-2, :]) / (2 * dt)

    # interior views: rows 1..-1, columns 2..-2
    def interior(f):
        return f[1:-1, 2:-2]

    psi_t = t_first(psi)[:, 2:-2]
    phi_t = t_first(phi)[:, 2:-2]
    psi_x = x_first(psi)[1:-1, :]
    phi_x = x_first(phi)[1:-1, :]
    psi_xx = x_second(psi)[1:-1, :]
    phi_xx = x_second(phi)[1:-1, :]
    ps = interior(psi)
    ph = interior(phi)

    tt = t[1:-1][:, None]
    xx = x[None, 2:-2]
    a = np.asarray(coeff_fns["a"](tt))
    b = np.asarray(coeff_fns["b"](tt))
    c = np.asarray(coeff_fns["c"](tt))
    d = np.asarray(coeff_fns["d"](tt))
    g = np.asarray(coeff_fns["g"](tt))
    h = np.asarray(coeff_fns["h"](tt))

    S = np.abs(ps) ** 2 + np.abs(ph) ** 2
    res_psi = (1j * psi_t + a * psi_xx - b * xx ** 2 * ps + 1j * c * xx * psi_x
               + 1j * d * ps - g * ps - h * S * ps)
    res_phi = (1j * phi_t - a * phi_xx + b * xx ** 2 * ph + 1j * c * xx * phi_x
               + 1j * d * ph + g * ph + h * S * ph)
    return {
        "max_residual_psi": float(np.abs(res_psi).max()),
        "max_residual_phi": float(np.abs(res_phi).max()),
    }


def certify_family(fam: SolutionFamily, x: np.ndarray, t: np.ndarray) -> dict:
    """Evaluate the family on a grid and run the residual oracle against the
    coefficient set induced by its own Riccati data."""
    coeffs = induced_coefficients(fam.g0, fam.h0, fam.riccati)
    psi, phi = family_grid(fam, x, t)
    vec = {k: np.vectorize(f, otypes=[float]) for k, f in coeffs.items()}
    return residual_oracle(psi, phi, vec, x, t)
