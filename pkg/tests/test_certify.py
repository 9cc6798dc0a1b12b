import json
import math

import numpy as np
import pytest

from seashell import forward as fw
from seashell.certify import (Certificate, c_m1, certify, delta_J, final_bound, hypothesis_constants,
                              inverse_norm_bracket, riesz_constant, t_matrix, t_matrix_entry)
from seashell.errors import CertificateRefused, DomainError, NumericalError
from seashell.spectral_data import SpectralData, validate

PI = math.pi


class TestConstants:
    def test_c_m1_values(self):
        assert c_m1(0.0) == 0.0
        expected = math.cosh(2 * PI) * (8 * PI ** 2 / math.sqrt(6) + 2 * PI + 5)
        assert c_m1(1.0) == pytest.approx(expected, rel=1e-15)
        assert f"{c_m1(1.0):.5e}" == "1.16516e+04"
        assert c_m1(0.1) == pytest.approx(1.064, abs=2e-3)

    def test_hypothesis_constants(self):
        assert hypothesis_constants(0.0) == (0.0, 0.0)
        c_omega, _ = hypothesis_constants(1.0)
        ref = PI * math.cosh(PI) * math.sqrt(1.5 * (1 + 4 * PI ** 2 + (2 + PI) ** 2))
        assert c_omega == pytest.approx(ref, rel=1e-15)

    def test_delta_j(self):
        assert all(delta_J(0.0, J) == 0.0 for J in range(2, 20))
        d = [delta_J(0.3, J) for J in range(3, 200)]
        assert np.all(np.diff(d) <= 0)

    def test_negative_m(self):
        for fn in (c_m1, hypothesis_constants):
            with pytest.raises(DomainError):
                fn(-1.0)


class TestTMatrix:
    def test_trivial_data_is_identity_past_zero(self):
        d = SpectralData.trivial(4)
        T = t_matrix(d, 5)
        expected = np.eye(6)
        expected[0, 0] = math.sqrt(2)
        np.testing.assert_array_equal(T, expected)
        assert t_matrix_entry(d, 2, 2) == 1.0 and t_matrix_entry(d, 1, 3) == 0.0

    def test_non_integer_frequency(self):
        d = SpectralData([0.0, 1.3, 4.0], [PI, 1.2, PI / 2])
        rho = math.sqrt(1.3)
        for k in range(4):
            ref = (2 / PI) ** 0.5 * 1.2 ** -0.5 * (-1) ** k * rho * math.sin(rho * PI) / (rho ** 2 - k ** 2)
            assert t_matrix_entry(d, k, 1) == pytest.approx(ref, abs=1e-14)
            assert t_matrix(d, 3)[k, 1] == pytest.approx(ref, abs=1e-14)

    def test_negative_eigenvalue_entry(self):
        d = SpectralData([-1.0, 1.0], [2.0, PI / 2])
        # <cosh t, 1> on [0, pi] = sinh(pi)
        assert t_matrix_entry(d, 0, 0) == pytest.approx((2 / PI) ** 0.5 * 2 ** -0.5 * math.sinh(PI))
        assert t_matrix(d, 1)[0, 0] == pytest.approx(t_matrix_entry(d, 0, 0))


class TestInverseNormBracket:
    @pytest.mark.parametrize("a, k", [(1.0, 2), (2.0, 1), (0.5, 3)])
    def test_scalar_traces(self, a, k):
        assert inverse_norm_bracket([[a]]) == k

    def test_against_svd(self, rng):
        for _ in range(200):
            n = int(rng.integers(1, 21))
            A = rng.standard_normal((n, n)) + 3 * np.eye(n)
            k = inverse_norm_bracket(A)
            inv_norm = 1 / np.linalg.svd(A, compute_uv=False)[-1]
            assert k - 1 <= max(inv_norm, 1.0) <= k

    def test_matches_linear_scan(self, rng):
        for _ in range(30):
            A = rng.standard_normal((4, 4))
            G = A.T @ A
            k = 1
            while True:
                try:
                    np.linalg.cholesky(G - np.eye(4) / k ** 2)
                    break
                except np.linalg.LinAlgError:
                    k += 1
            assert inverse_norm_bracket(A) == k

    def test_singular(self):
        with pytest.raises(NumericalError, match="singular"):
            inverse_norm_bracket(np.zeros((3, 3)), cap=1000)


class TestRiesz:
    def test_trivial_m_zero(self):
        J, C2, a, d = riesz_constant(SpectralData.trivial(3), 0.0)
        assert (J, a, d, C2) == (1, 2, 0.0, 3.0)

    def test_trivial_small_m(self):
        J, C2, a, d = riesz_constant(SpectralData.trivial(3), 0.01)
        assert d < 1 / (a + 1)
        assert 1 <= C2 <= 2 * (1 / d + 1)
        assert J >= 3

    def test_frame_inequality(self, rng):
        # ||u||^2 <= C2 sum |<u, g_n>|^2 for trig polynomials u
        h = 0.2
        data = fw.free_robin_data(h, 400)
        rep = validate(data)
        M = 1.01 * max(rep.kappa_norm, rep.kappa_tilde_norm)
        _, C2, _, _ = riesz_constant(data, M)
        for _ in range(50):
            deg = int(rng.integers(1, 40))
            coef = rng.standard_normal(deg + 1)
            norm2 = coef[0] ** 2 * PI + np.sum(coef[1:] ** 2) * PI / 2
            # <u, g_n> with u = sum c_k cos(k t): T-matrix columns in the f-basis
            f_coef = coef * np.array([PI ** 0.5] + [(PI / 2) ** 0.5] * deg)
            T = t_matrix(data, 4 * deg)[: deg + 1, :]
            proj = f_coef @ T
            assert norm2 <= C2 * np.sum(proj ** 2)

    def test_c2_formula(self):
        data = fw.free_robin_data(0.1, 200)
        J, C2, a, d = riesz_constant(data, 0.45)
        assert d < 1 / (a + 1)
        assert C2 == pytest.approx((a + 1) / (1 - d * (a + 1)), rel=1e-15)
        assert C2 >= 1 and J >= 2 * 0.45

    def test_c2_cap_under_strict_margin(self):
        # the 2 (1/delta + 1) cap needs delta < (a + 1)^{-1} / 2
        J, C2, a, d = riesz_constant(SpectralData.trivial(3), 0.01)
        assert d < 0.5 / (a + 1)
        assert C2 <= 2 * (1 / d + 1)


class TestCertify:
    def test_zero_m(self):
        cert = certify(SpectralData.trivial(3), 0.0, 10)
        assert cert.bound_q == cert.bound_h == cert.bound_H == 0.0
        assert cert.N0 == 0.0

    def test_refuses_nonzero_omega(self):
        d = SpectralData([0, 1, 4], [PI, PI / 2, PI / 2], omega_hint=0.3)
        with pytest.raises(CertificateRefused, match="requires"):
            certify(d, 1.0)

    def test_refuses_below_threshold(self):
        with pytest.raises(CertificateRefused, match="threshold"):
            certify(SpectralData.trivial(11), 1.0, 10)

    def test_small_m_large_n(self):
        d = SpectralData.trivial(3)
        with pytest.warns(RuntimeWarning):
            cert = certify(d, 0.01, 10 ** 6)
        C1 = c_m1(0.01)
        prod = C1 * cert.C_M2
        expected = 1e-3 * C1 * (PI ** 0.5 + PI * prod) * (1 + 2 * PI ** 1.5 * prod)
        assert cert.bound_h == pytest.approx(expected, rel=1e-14)
        assert cert.bound_q == 2 * cert.bound_h == cert.bound_H
        assert cert.N0 == pytest.approx(2 * PI * prod ** 2)
        assert cert.C_M2 <= 2 * (1 / cert.delta_J + 1)

    def test_bound_scales_as_inverse_sqrt(self):
        for N in (10, 1000, 12345):
            assert final_bound(3.0, 5.0, 4 * N) / final_bound(3.0, 5.0, N) == pytest.approx(0.5, abs=1e-12)

    def test_json(self):
        cert = certify(SpectralData.trivial(3), 0.0, 5)
        d = json.loads(cert.to_json())
        assert set(d) == set(Certificate.__dataclass_fields__)
        assert "C_M2" in cert.summary()

    def test_requires_m(self):
        with pytest.raises(DomainError):
            certify(SpectralData.trivial(3))
