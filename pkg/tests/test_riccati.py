import numpy as np
import pytest

from vcnls import riccati
from vcnls.coeffexpr import CoefficientSet
from vcnls.errors import InconsistentCoefficientsError, SingularTransformError

T3 = np.linspace(0.0, 3.0, 301)


def rk4_oracle(rhs, y0, t):
    """Plain RK4 reference integrator, independent of the package paths."""
    y = np.asarray(y0, dtype=float)
    out = [y.copy()]
    for i in range(len(t) - 1):
        h = t[i + 1] - t[i]
        k1 = rhs(t[i], y)
        k2 = rhs(t[i] + h / 2, y + h / 2 * k1)
        k3 = rhs(t[i] + h / 2, y + h / 2 * k2)
        k4 = rhs(t[i] + h, y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        out.append(y.copy())
    return np.array(out)


class TestSection2:
    def test_trivial_collapse(self):
        # b = c = d = 0 with alpha0 = 0 keeps the reduction consistent
        cs = CoefficientSet.from_strings(a="2")
        sol = riccati.solve_section2(cs, (0.0, 1.5, 0.25), T3)
        assert np.abs(np.asarray(sol.alpha(T3))).max() < 1e-12
        assert np.abs(np.asarray(sol.beta(T3)) - 1.5).max() < 1e-12
        # gamma = gamma0 - beta0^2 * int a
        want = 0.25 - 1.5 ** 2 * 2.0 * T3
        assert np.abs(np.asarray(sol.gamma(T3)) - want).max() < 1e-9

    def test_constant_coefficients_exponential_beta(self):
        # a=1, b=0, c=1, d=1 is consistent for alpha0 = -1/2 (d = -2 a alpha)
        cs = CoefficientSet.from_strings(a="1", b="0", c="1", d="1")
        sol = riccati.solve_section2(cs, (-0.5, 1.0, 0.0), T3)
        assert np.abs(np.asarray(sol.alpha(T3)) + 0.5).max() < 1e-12
        assert np.abs(np.asarray(sol.beta(T3)) - np.exp(T3)).max() < 1e-8
        # independent check: integrate the reduced equations numerically
        path = rk4_oracle(
            lambda s, y: np.array([-(0.0 + 2 * (1 - 1) * y[0]), -(1 - 2) * y[1]]),
            [-0.5, 1.0], T3)
        assert np.abs(path[:, 1] - np.asarray(sol.beta(T3))).max() < 1e-7

    def test_caption_parameter_set_is_inconsistent(self):
        # a=0.5 e^t, b=e^t, c=d=1 satisfies the reduced equations but
        # violates d = -2 a alpha, so the full system cannot hold
        cs = CoefficientSet.from_strings(a="0.5*exp(t)", b="exp(t)", c="1", d="1")
        with pytest.raises(InconsistentCoefficientsError) as err:
            riccati.solve_section2(cs, (-1.0, 1.0, -0.5), T3)
        assert max(err.value.residuals.values()) > 1.0

    def test_caption_gamma_violates_gamma_equation(self):
        # the advertised gamma = -0.5 e^t fails gamma' + a beta^2 = 0
        sol = riccati.RiccatiSolution(
            riccati.SECTION2,
            alpha=lambda t: -np.exp(t),
            beta=lambda t: np.exp(t),
            gamma=lambda t: -0.5 * np.exp(t),
            mu=lambda t: np.ones_like(np.asarray(t, dtype=float)),
            init=(-1.0, 1.0, -0.5, 1.0), t_span=(0.0, 3.0), residual_max=np.nan)
        cs = CoefficientSet.from_strings(a="0.5*exp(t)", b="exp(t)", c="1", d="1")
        res = riccati.residuals(sol, cs, T3)
        assert res["gamma"] > 1.0

    def test_beta0_must_be_nonzero(self):
        cs = CoefficientSet.from_strings(a="1")
        with pytest.raises(ValueError):
            riccati.solve_section2(cs, (0.0, 0.0, 0.0), T3)


class TestConsistencyMap:
    def test_alpha_profile_roundtrip(self):
        # build a consistent set from an alpha profile, then re-solve it with
        # the closed-form path; both alphas must agree
        a = lambda t: 1.0 + 0.0 * np.asarray(t)
        c = lambda t: 0.0 * np.asarray(t)
        alpha = lambda t: 0.1 * np.cos(t)
        alpha_dot = lambda t: -0.1 * np.sin(t)
        built = riccati.section2_from_alpha(a, c, alpha, alpha_dot, (1.0, 0.0), T3)
        assert built.residual_max < 1e-9
        resolved = riccati.solve_section2(built.coeffs, built.init[:3], T3)
        assert np.abs(np.asarray(resolved.alpha(T3)) - alpha(T3)).max() < 1e-9
        assert np.abs(np.asarray(resolved.beta(T3)) - np.asarray(built.beta(T3))).max() < 1e-9


class TestTheorem1:
    def test_harmonic_benchmark_closed_forms(self):
        bench = riccati.harmonic_benchmark(d0=-1e-2)
        sol = riccati.solve_theorem1(bench.coeffs, bench.init, T3)
        for fn, closed in ((sol.alpha, bench.alpha), (sol.beta, bench.beta),
                           (sol.gamma, bench.gamma), (sol.mu, bench.mu)):
            err = np.abs(np.asarray(fn(T3)) - np.asarray(closed(T3))).max()
            assert err < 1e-8
        assert sol.residual_max < 1e-7

    def test_alpha_at_quarter_period(self):
        bench = riccati.harmonic_benchmark()
        sol = riccati.solve_theorem1(bench.coeffs, bench.init, T3)
        assert sol.alpha(np.pi / 2) == pytest.approx(-0.25, abs=1e-8)
        # value agrees with the printed closed form evaluated directly
        assert bench.alpha(np.pi / 2) == pytest.approx(-0.25, abs=1e-15)

    def test_zero_b_freezes_alpha_and_mu(self):
        cs = CoefficientSet.from_strings(a="1 + t^2", b="0", c="cos(t)")
        sol = riccati.solve_theorem1(cs, (0.0, 1.0, 0.0, 2.0), T3)
        assert np.abs(np.asarray(sol.alpha(T3))).max() < 1e-12
        assert np.abs(np.asarray(sol.mu(T3)) - 2.0).max() < 1e-12

    def test_mu_zero_crossing_detected(self):
        # alpha(0) < 0 with a = 1, b = 0 gives mu = mu0 (1 + 4 alpha0 t),
        # which crosses zero at t = 1/2 for alpha0 = -1/2
        cs = CoefficientSet.from_strings(a="1")
        with pytest.raises(SingularTransformError) as err:
            riccati.solve_theorem1(cs, (-0.5, 1.0, 0.0, 1.0), T3)
        assert err.value.when == pytest.approx(0.5, abs=1e-2)

    def test_structural_identities_of_benchmark(self):
        # h = h0 a beta^2 mu and d = d0 a beta^2 with the closed forms
        bench = riccati.harmonic_benchmark(d0=-1e-2)
        fns = bench.coeffs.callables()
        t = np.linspace(0.0, 3.0, 97)
        a, be, mu = fns["a"](t), bench.beta(t), bench.mu(t)
        assert np.abs(fns["h"](t) - bench.h0 * a * be ** 2 * mu).max() < 1e-10
        assert np.abs(fns["d"](t) - bench.d0 * a * be ** 2).max() < 1e-10
        assert np.abs(fns["g"](t) - bench.g0 * a * be ** 2).max() < 1e-10


class TestCharacteristic:
    def test_free_evolution_pair(self):
        cs = CoefficientSet.from_strings(a="1")
        pair = riccati.characteristic_solutions(cs, T3)
        assert np.abs(pair.mu0(T3) - 2 * T3).max() < 1e-10
        assert np.abs(pair.mu1(T3) - 1.0).max() < 1e-10

    def test_oscillator_pair(self):
        t = np.linspace(0.0, np.pi, 301)
        cs = CoefficientSet.from_strings(a="1", b="1/4")
        pair = riccati.characteristic_solutions(cs, t)
        assert np.abs(pair.mu0(t) - 2 * np.sin(t)).max() < 1e-8
        assert np.abs(pair.mu1(t) - np.cos(t)).max() < 1e-8

    def test_canonical_initial_data(self):
        cs = CoefficientSet.from_strings(a="exp(cos(t))", b="cos(t)*exp(-cos(t))/4")
        pair = riccati.characteristic_solutions(cs, T3)
        assert pair.mu0(0.0) == pytest.approx(0.0, abs=1e-14)
        assert pair.mu0_dot(0.0) == pytest.approx(2 * np.e, rel=1e-12)
        assert pair.mu1(0.0) == pytest.approx(1.0, rel=1e-14)
        assert pair.mu1_dot(0.0) == pytest.approx(0.0, abs=1e-12)

    def test_vanishing_dispersion_rejected(self):
        cs = CoefficientSet.from_strings(a="t - 1")
        with pytest.raises(SingularTransformError):
            riccati.characteristic_solutions(cs, T3)


class TestAppendix:
    def test_free_evolution_lens(self):
        cs = CoefficientSet.from_strings(a="1")
        pair = riccati.characteristic_solutions(cs, T3)
        sol = riccati.solve_appendix_multiparameter(cs, pair, (1.0, 1.0, 0.0, 1.0), T3)
        assert sol.residual_max < 1e-9
        # analytic solution of the constant-coefficient system
        assert np.abs(np.asarray(sol.alpha(T3)) - 1.0 / (1 + 4 * T3)).max() < 1e-8
        assert np.abs(np.asarray(sol.mu(T3)) - (1 + 4 * T3)).max() < 1e-8

    def test_oscillator_cross_method_agreement(self):
        t = np.linspace(0.0, 1.2, 121)
        cs = CoefficientSet.from_strings(a="1", b="1/4")
        pair = riccati.characteristic_solutions(cs, t)
        init = (0.5, 1.0, 0.2, 1.0)
        closed = riccati.solve_appendix_multiparameter(cs, pair, init, t)
        numeric = riccati.solve_theorem1(cs, init, t)
        for name in ("alpha", "beta", "gamma", "mu"):
            diff = np.abs(np.asarray(getattr(closed, name)(t))
                          - np.asarray(getattr(numeric, name)(t))).max()
            assert diff < 1e-7, name
        assert closed.residual_max < 1e-9

    def test_printed_gamma_sign_is_section2(self):
        # as printed, the reconstruction's gamma obeys gamma' + a beta^2 = 0
        t = np.linspace(0.0, 1.2, 121)
        cs = CoefficientSet.from_strings(a="1", b="1/4")
        pair = riccati.characteristic_solutions(cs, t)
        sol = riccati.solve_appendix_multiparameter(
            cs, pair, (0.5, 1.0, 0.2, 1.0), t, variant=riccati.SECTION2)
        res = riccati.residuals(sol, {**sol.coeffs}, t)
        assert res["gamma"] < 1e-9

    def test_benchmark_reconstruction_matches_theorem1(self):
        bench = riccati.harmonic_benchmark(d0=-1e-2)
        t = np.linspace(0.0, 3.0, 301)
        pair = riccati.characteristic_solutions(bench.coeffs, t)
        closed = riccati.solve_appendix_multiparameter(bench.coeffs, pair, bench.init, t)
        numeric = riccati.solve_theorem1(bench.coeffs, bench.init, t)
        for name in ("alpha", "beta", "gamma", "mu"):
            diff = np.abs(np.asarray(getattr(closed, name)(t))
                          - np.asarray(getattr(numeric, name)(t))).max()
            assert diff < 1e-7, name

    def test_caustic_raises(self):
        cs = CoefficientSet.from_strings(a="1")
        pair = riccati.characteristic_solutions(cs, T3)
        with pytest.raises(SingularTransformError) as err:
            riccati.solve_appendix_multiparameter(cs, pair, (-0.5, 1.0, 0.0, 1.0), T3)
        assert err.value.when == pytest.approx(0.5, abs=1e-2)


class TestPhase:
    def test_zero_phase(self):
        zero = lambda t: np.zeros_like(np.asarray(t, dtype=float))
        sol = riccati.RiccatiSolution(riccati.SECTION2, zero, zero, zero,
                                      lambda t: np.ones_like(np.asarray(t, dtype=float)),
                                      (0.0, 0.0, 0.0, 1.0), (0.0, 1.0), 0.0)
        assert sol.theta(2.0, 0.5) == 0.0
        assert sol.xi(2.0, 0.5) == 0.0

    def test_caption_phase_at_zero(self):
        sol = riccati.RiccatiSolution(
            riccati.SECTION2,
            alpha=lambda t: -np.exp(t), beta=lambda t: np.exp(t),
            gamma=lambda t: -0.5 * np.exp(t),
            mu=lambda t: np.ones_like(np.asarray(t, dtype=float)),
            init=(-1.0, 1.0, -0.5, 1.0), t_span=(0.0, 3.0), residual_max=np.nan)
        x = np.array([-1.0, 0.0, 0.5, 2.0])
        np.testing.assert_allclose(sol.theta(x, 0.0), -x ** 2 + x - 0.5, rtol=1e-14)
        assert sol.xi(1.0, 0.0) == pytest.approx(0.0, abs=1e-14)

    def test_out_of_range_t(self):
        bench = riccati.harmonic_benchmark()
        sol = riccati.solve_theorem1(bench.coeffs, bench.init, T3)
        with pytest.raises(ValueError):
            sol.theta(0.0, 5.0)

    def test_theorem1_xi_and_tau(self):
        bench = riccati.harmonic_benchmark()
        sol = riccati.solve_theorem1(bench.coeffs, bench.init, T3)
        assert sol.xi(2.0, 0.0) == pytest.approx(2.0, rel=1e-10)  # beta(0) = 1
        assert sol.tau(0.0) == pytest.approx(0.0, abs=1e-12)


def test_residual_property_across_solvers():
    # every solver-produced solution keeps FD residuals below 1e-7
    t = np.linspace(0.0, 2.0, 201)
    bench = riccati.harmonic_benchmark()
    sols = [
        riccati.solve_theorem1(bench.coeffs, bench.init, t),
        riccati.solve_section2(CoefficientSet.from_strings(a="1 + t"), (0.0, 1.0, 0.0), t),
    ]
    cs = CoefficientSet.from_strings(a="1", b="1/4")
    pair = riccati.characteristic_solutions(cs, t)
    sols.append(riccati.solve_appendix_multiparameter(cs, pair, (0.3, 1.0, 0.0, 1.0), t))
    for sol in sols:
        assert sol.residual_max < 1e-7
