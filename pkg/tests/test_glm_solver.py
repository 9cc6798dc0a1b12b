import numpy as np
import pytest

from helpers import rank_one_K, rank_one_data, rank_one_dK
from seashell.errors import DomainError, GlmSingularError
from seashell.glm_solver import (GlmSystem, KNEvaluator, assemble, eval_K,
                                 integral_equation_residual, solve_coefficients, solve_nystrom)
from seashell.spectral_data import SpectralData
from seashell.trig_kernel import KernelFN

PI = np.pi


def _mixed_data():
    """Small generic data with a negative ground state."""
    lam = np.array([-0.4, 1.3, 3.8, 9.2, 15.7])
    alpha = np.array([2.9, 1.45, 1.62, 1.55, 1.59])
    return SpectralData(lam, alpha)


class TestAssembly:
    def test_x_zero(self):
        k = KernelFN.from_data(_mixed_data())
        sys = assemble(k.basis, k, 0.0)
        np.testing.assert_array_equal(sys.matrix, np.eye(k.basis.size))
        np.testing.assert_array_equal(sys.rhs, 0.0)
        np.testing.assert_array_equal(solve_coefficients(sys), 0.0)

    def test_trivial_data_gives_zero_solution(self):
        k = KernelFN.from_data(SpectralData.trivial(6))
        for x in (0.3, 1.7, PI):
            sys = assemble(k.basis, k, x)
            assert np.max(np.abs(sys.rhs)) <= 1e-15
            assert np.max(np.abs(solve_coefficients(sys))) <= 1e-15

    def test_outside_interval(self):
        k = KernelFN.from_data(SpectralData.trivial(2))
        with pytest.raises(DomainError):
            assemble(k.basis, k, 3.5)

    def test_singular_system_refused(self):
        sys = GlmSystem(1.0, np.array([[1.0, 2.0], [2.0, 4.0]]), np.array([1.0, 0.0]))
        with pytest.raises(GlmSingularError):
            solve_coefficients(sys)

    def test_well_posed_on_fine_grid(self):
        ev = KNEvaluator.from_data(_mixed_data())
        c = ev.coefficients(np.linspace(0, PI, 1001))
        assert np.all(np.isfinite(c))


class TestRankOne:
    @pytest.mark.parametrize("n0", [1, 3, 7])
    def test_corners(self, n0):
        ev = KNEvaluator.from_data(rank_one_data(n0))
        assert eval_K(ev, 0.0, 0.0) == pytest.approx(-1.0, abs=1e-14)
        assert eval_K(ev, PI, PI) == pytest.approx(-1 / (1 + PI / 2), abs=1e-13)

    @pytest.mark.parametrize("beta", [0.5, 1.0, 2.0])
    @pytest.mark.parametrize("n0", [1, 4])
    def test_closed_form_on_triangle(self, n0, beta):
        ev = KNEvaluator.from_data(rank_one_data(n0, beta))
        xs = np.linspace(0, PI, 30)
        worst = 0.0
        for x in xs:
            y = xs[xs <= x]
            worst = max(worst, np.max(np.abs(eval_K(ev, x, y) - rank_one_K(x, y, n0, beta))))
        assert worst <= 1e-10

    def test_half_interval_n0_one(self):
        ev = KNEvaluator.from_data(rank_one_data(1))
        x = PI / 2
        y = np.linspace(0, x, 11)
        np.testing.assert_allclose(eval_K(ev, x, y), rank_one_K(x, y, 1), atol=1e-14)

    def test_diagonal_derivative(self):
        ev = KNEvaluator.from_data(rank_one_data(3))
        x = np.linspace(0, PI, 41)
        np.testing.assert_allclose(ev.diagonal_derivative(x), rank_one_dK(x, 3), atol=1e-11)


class TestResidualAndOracle:
    def test_residual(self, rng):
        ev = KNEvaluator.from_data(_mixed_data())
        worst = 0.0
        for x in np.linspace(0, PI, 61):
            y = rng.uniform(0, x, 100)
            worst = max(worst, np.max(np.abs(integral_equation_residual(ev, x, y))))
        assert worst <= 1e-8

    def test_nystrom_matches_degenerate_solution(self):
        data = _mixed_data()
        ev = KNEvaluator.from_data(data)
        for x in (0.7, 2.0, PI):
            t, K = solve_nystrom(ev.kernel, x, 1024)
            assert np.max(np.abs(K - eval_K(ev, x, t))) <= 1e-5

    @pytest.mark.parametrize("n0", [1, 3])
    def test_nystrom_rank_one_m512(self, n0):
        k = KernelFN.from_data(rank_one_data(n0))
        for x in np.linspace(0.2, PI, 8):
            t, K = solve_nystrom(k, x, 512)
            assert np.max(np.abs(K - rank_one_K(x, t, n0))) <= 1e-6

    def test_nystrom_simpson_for_higher_frequency(self):
        k = KernelFN.from_data(rank_one_data(7))
        t, K = solve_nystrom(k, PI, 512, rule="simpson")
        assert np.max(np.abs(K - rank_one_K(PI, t, 7))) <= 1e-6

    def test_nystrom_trivial(self):
        k = KernelFN.from_data(SpectralData.trivial(4))
        _, K = solve_nystrom(k, 2.0, 16)
        np.testing.assert_array_equal(K, 0.0)

    def test_nystrom_second_order(self):
        k = KernelFN.from_data(rank_one_data(2))
        errs = []
        # x = pi would make the integrand periodic and the rule spectrally exact
        for m in (64, 128, 256):
            t, K = solve_nystrom(k, 2.0, m)
            errs.append(np.max(np.abs(K - rank_one_K(2.0, t, 2))))
        ratios = np.array(errs[:-1]) / np.array(errs[1:])
        assert np.all(ratios > 3.5)

    def test_nystrom_argument_checks(self):
        k = KernelFN.from_data(SpectralData.trivial(2))
        with pytest.raises(DomainError):
            solve_nystrom(k, 1.0, 1)
        with pytest.raises(DomainError):
            solve_nystrom(k, 1.0, 7, rule="simpson")


class TestEvaluator:
    def test_y_beyond_x(self):
        ev = KNEvaluator.from_data(rank_one_data(1))
        with pytest.raises(DomainError):
            eval_K(ev, 1.0, 1.5)

    def test_cache_and_threads_are_deterministic(self, monkeypatch):
        data = _mixed_data()
        x = np.linspace(0, PI, 700)
        serial = KNEvaluator.from_data(data).diagonal(x)
        monkeypatch.setenv("SEASHELL_THREADS", "4")
        ev = KNEvaluator.from_data(data)
        threaded = ev.diagonal(x)
        np.testing.assert_array_equal(serial, threaded)
        np.testing.assert_array_equal(ev.diagonal(x[::-1]), threaded[::-1])
