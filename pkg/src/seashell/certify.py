"""A-priori error certificate for data with ``omega = 0`` and l2 remainders bounded by ``M``.

The bound on ``||q_N - q||`` in ``W^{-1,inf}`` has the form
``2 N^{-1/2} C1 (sqrt(pi) + pi C1 C2)(1 + 2 pi^{3/2} C1 C2)`` where ``C1``
depends on ``M`` alone and ``C2`` is a lower Riesz constant of the system
``g_n = alpha_n^{-1/2} cos(sqrt(lam_n) t)``, obtained from a finite section of
the Gram-type matrix ``T_ij = <g_j, f_i>`` plus a tail estimate.
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import asdict, dataclass
from typing import Optional, Tuple

import numpy as np

from .errors import CertificateRefused, DomainError, NumericalError
from .spectral_data import SpectralData, is_trivial, validate
from .trig_kernel import _rho_product_integral

SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)


def c_m1(M: float) -> float:
    """``M cosh(2 pi M) [(8 pi^2 / sqrt(6) + 2 pi) M + 5]``."""
    if M < 0:
        raise DomainError("M must be non-negative")
    return M * math.cosh(2 * math.pi * M) * ((8 * math.pi ** 2 / math.sqrt(6) + 2 * math.pi) * M + 5)


def hypothesis_constants(M: float) -> Tuple[float, float]:
    """``(C_Omega, c)`` controlling the tail of the Riesz system."""
    if M < 0:
        raise DomainError("M must be non-negative")
    pi = math.pi
    c_omega = M * pi * math.cosh(M * pi) * math.sqrt(
        1.5 * (1 + (2 * pi) ** 2 * M ** 2 + (2 + pi * M) ** 2))
    c_eta = (pi / 2) ** -0.5 * (2 / pi + M) ** 0.5 * M * (1 + M) * math.cosh(M * pi)
    return c_omega, c_eta


def delta_J(M: float, J: int) -> float:
    """``max(4 c log(J) / J, C_Omega / J)``."""
    if J < 1:
        raise DomainError("J must be >= 1")
    c_omega, c_eta = hypothesis_constants(M)
    return max(4 * c_eta * math.log(J) / J, c_omega / J)


def t_matrix_entry(data: SpectralData, i: int, j: int) -> float:
    """``<g_j, f_i>`` on ``[0, pi]`` with ``f_i = (2/pi)^{1/2} cos(i t)``."""
    if i < 0 or j < 0:
        raise DomainError("indices must be non-negative")
    lam, alpha = data.pair(j)
    if is_trivial(j, lam, alpha):
        return (math.sqrt(2.0) if j == 0 else 1.0) if i == j else 0.0
    rho = np.sqrt(complex(lam)) if lam < 0 else np.sqrt(lam)
    val = _rho_product_integral(np.asarray(rho), np.asarray(float(i)), np.pi)
    return float(SQRT_2_OVER_PI * alpha ** -0.5 * val)


def t_matrix(data: SpectralData, J: int) -> np.ndarray:
    """``(T_ij)`` for ``i, j = 0..J``."""
    idx = np.arange(J + 1)
    lam = np.array([data.lam_at(j) for j in idx])
    alpha = np.array([data.alpha_at(j) for j in idx])
    rho = np.where(lam < 0, 1j * np.sqrt(np.abs(lam)), np.sqrt(np.abs(lam)) + 0j)
    if not np.any(lam < 0):
        rho = rho.real
    P = _rho_product_integral(idx[:, None].astype(float), rho[None, :], np.pi)
    T = SQRT_2_OVER_PI * P / np.sqrt(alpha)[None, :]
    # trivial pairs give exact columns; rounding there would move a_J
    for j in idx:
        if is_trivial(int(j), lam[j], alpha[j]):
            T[:, j] = 0.0
            T[j, j] = math.sqrt(2.0) if j == 0 else 1.0
    return T


def _is_pd(B: np.ndarray) -> bool:
    try:
        np.linalg.cholesky(B)
    except np.linalg.LinAlgError:
        return False
    return True


def inverse_norm_bracket(A, cap: int = 10 ** 6) -> int:
    """Smallest integer ``k >= 1`` with ``A^T A - k^{-2} I`` positive definite.

    Then ``k - 1 <= max(||A^{-1}||_2, 1) <= k``.  The predicate is monotone in
    ``k``, so a doubling search followed by bisection returns the same ``k``
    as a linear scan.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if A.shape[0] != A.shape[1]:
        raise DomainError("matrix must be square")
    G = A.T @ A
    eye = np.eye(G.shape[0])

    def ok(k):
        return _is_pd(G - eye / (k * k))

    if ok(1):
        return 1
    lo, hi = 1, 2
    while not ok(hi):
        lo, hi = hi, 2 * hi
        if lo > cap:
            raise NumericalError("matrix numerically singular")
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    if hi > cap:
        raise NumericalError("matrix numerically singular")
    return hi


def riesz_constant(data: SpectralData, M: float, J_cap: int = 10 ** 4) -> Tuple[int, float, int, float]:
    """First ``J`` at which the finite section controls the tail.

    Returns ``(J, C_M2, a_J, delta_J)``.  ``J`` must also exceed ``2M`` and,
    unless ``M = 0``, be at least 3 (the logarithmic tail estimate is only
    valid from there on).
    """
    if M < 0:
        raise DomainError("M must be non-negative")
    for J in range(1, J_cap + 1):
        if J < 2 * M or (M > 0 and J < 3):
            continue
        d = delta_J(M, J)
        if d >= 0.5:
            continue  # a_J >= 1 always, so the test cannot pass
        T = t_matrix(data, J)
        # cheap screen: the test needs a_J < 1/d - 1, i.e. ok(k_top)
        k_top = math.inf if d == 0 else math.ceil(1.0 / d - 1.0) - 1
        if k_top < math.inf and not _is_pd(T.T @ T - np.eye(J + 1) / (k_top * k_top)):
            continue
        a = inverse_norm_bracket(T)
        if d < 1.0 / (a + 1):
            return J, (a + 1) / (1 - d * (a + 1)), a, d
    raise NumericalError(f"no admissible J up to {J_cap}; M is inconsistent with the data")


@dataclass(frozen=True)
class Certificate:
    M: float
    C_M1: float
    C_Omega: float
    c_eta: float
    J: int
    delta_J: float
    a_J: int
    C_M2: float
    N0: float
    N: int
    bound_q: float
    bound_h: float
    bound_H: float

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def summary(self) -> str:
        return "\n".join([
            f"M        = {self.M:.6g}",
            f"C_M1     = {self.C_M1:.6g}",
            f"C_M2     = {self.C_M2:.6g}  (J = {self.J}, a_J = {self.a_J}, delta_J = {self.delta_J:.3g})",
            f"N0       = {self.N0:.6g}",
            f"N        = {self.N}",
            f"|q_N - q| <= {self.bound_q:.6g}  (W^-1,inf)",
            f"|h_N - h| <= {self.bound_h:.6g}",
            f"|H_N - H| <= {self.bound_H:.6g}",
        ])


def final_bound(C1: float, C2: float, N: int) -> float:
    """``N^{-1/2} C1 (sqrt(pi) + pi C1 C2)(1 + 2 pi^{3/2} C1 C2)``, the bound on ``h``."""
    prod = C1 * C2
    return N ** -0.5 * C1 * (math.sqrt(math.pi) + math.pi * prod) * (1 + 2 * math.pi ** 1.5 * prod)


def certify(data: SpectralData, M: Optional[float] = None, N: Optional[int] = None,
            omega: Optional[float] = None) -> Certificate:
    """Certificate for the reconstruction from pairs ``0..N``.

    ``N`` defaults to the largest stored index.  ``omega`` defaults to the
    data's ``omega_hint`` (finite data with a trivial tail has ``omega = 0``).
    Refuses with :class:`CertificateRefused` if ``omega != 0`` or
    ``N <= N0``.
    """
    if M is None:
        M = data.M
    if M is None:
        raise DomainError("certificate needs an l2 bound M")
    if M < 0:
        raise DomainError("M must be non-negative")
    if omega is None:
        omega = data.omega_hint or 0.0
    if omega != 0:
        raise CertificateRefused("certificate requires Ω_{0,M}")
    if N is None:
        N = data.N
    if N < 1:
        raise DomainError("N must be >= 1")
    C1 = c_m1(M)
    if C1 > 0 and N <= 2 * math.pi * C1 ** 2:
        # C_M2 >= 1, so this already places N below N0
        raise CertificateRefused(
            f"N below certified threshold N_0 (N = {N}, N_0 >= {2 * math.pi * C1 ** 2:.6g})")
    rep = validate(data, M)
    if rep.in_Omega0M is False:
        warnings.warn(
            f"stored remainders exceed M (|kappa| = {rep.kappa_norm:.3g}, "
            f"|kappa~| = {rep.kappa_tilde_norm:.3g}); certificate assumes the bound",
            RuntimeWarning, stacklevel=2)
    c_omega, c_eta = hypothesis_constants(M)
    J, C2, a, d = riesz_constant(data, M)
    N0 = 2 * math.pi * (C1 * C2) ** 2
    if N <= N0:
        raise CertificateRefused(f"N below certified threshold N_0 (N = {N}, N_0 = {N0:.6g})")
    B = final_bound(C1, C2, N)
    return Certificate(float(M), C1, c_omega, c_eta, J, d, a, C2, N0, int(N), 2 * B, B, 2 * B)
