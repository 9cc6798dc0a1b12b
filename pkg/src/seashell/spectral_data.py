"""Spectral data: storage, validation, asymptotic decomposition, finite-rank detection.

Stored data is the nontrivial prefix ``(lam[n], alpha[n])`` for ``n = 0..L-1``.
Every index beyond the prefix is implicitly *trivial*, i.e. the data of the
free problem: ``lam[n] = n**2`` and ``alpha[n] = pi/2`` (``alpha[0] = pi``).
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import DomainError, ValidationError

PI = np.pi
HALF_PI = np.pi / 2


def trivial_pair(n: int) -> Tuple[float, float]:
    """Free-problem data ``(n**2, pi/2)``; ``(0, pi)`` at ``n = 0``."""
    return float(n * n), (PI if n == 0 else HALF_PI)


@dataclass(frozen=True)
class SpectralData:
    """Eigenvalues ``lam`` and norming constants ``alpha`` of the stored prefix.

    ``M`` (a bound on the l2 remainders) and ``omega_hint`` travel with the
    data when it comes from a JSON file; both are optional.
    """

    lam: np.ndarray
    alpha: np.ndarray
    M: Optional[float] = None
    omega_hint: Optional[float] = None

    def __post_init__(self):
        lam = np.asarray(self.lam, dtype=float).reshape(-1)
        alpha = np.asarray(self.alpha, dtype=float).reshape(-1)
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "alpha", alpha)
        if lam.size < 1:
            raise ValidationError("spectral data needs at least one pair")
        if lam.size != alpha.size:
            raise ValidationError(
                f"lambda and alpha lengths differ ({lam.size} vs {alpha.size})")
        if not (np.all(np.isfinite(lam)) and np.all(np.isfinite(alpha))):
            raise ValidationError("spectral data contains non-finite entries")
        if np.any(alpha <= 0):
            raise ValidationError("norming constants must be strictly positive")
        if np.any(np.diff(lam) <= 0):
            raise ValidationError("eigenvalues must be strictly increasing")
        if self.M is not None and not self.M >= 0:
            raise ValidationError("M must be a non-negative number")

    @property
    def size(self) -> int:
        """Number of stored pairs."""
        return int(self.lam.size)

    @property
    def N(self) -> int:
        """Largest stored index."""
        return self.size - 1

    def lam_at(self, n: int) -> float:
        return float(self.lam[n]) if n < self.size else float(n * n)

    def alpha_at(self, n: int) -> float:
        return float(self.alpha[n]) if n < self.size else trivial_pair(n)[1]

    def pair(self, n: int) -> Tuple[float, float]:
        return self.lam_at(n), self.alpha_at(n)

    def padded(self, length: int) -> "SpectralData":
        """Extend the stored prefix with trivial pairs up to ``length`` entries."""
        if length <= self.size:
            return self
        idx = np.arange(self.size, length)
        lam = np.concatenate([self.lam, (idx * idx).astype(float)])
        alpha = np.concatenate([self.alpha, np.full(idx.size, HALF_PI)])
        return replace(self, lam=lam, alpha=alpha)

    def truncated(self, count: int) -> "SpectralData":
        """Keep the first ``count`` pairs (the rest becomes the trivial tail)."""
        if count < 1:
            raise DomainError("count must be >= 1")
        if count >= self.size:
            return self.padded(count)
        return replace(self, lam=self.lam[:count].copy(), alpha=self.alpha[:count].copy())

    def shifted(self, c: float) -> "SpectralData":
        """All stored eigenvalues moved by ``c``."""
        return replace(self, lam=self.lam + c)

    @classmethod
    def trivial(cls, size: int) -> "SpectralData":
        lam, alpha = zip(*(trivial_pair(n) for n in range(size)))
        return cls(np.array(lam), np.array(alpha))


@dataclass(frozen=True)
class AsymptoticDecomposition:
    """Remainders in ``sqrt(lam_n) = n + omega/(pi(n+1)) + kappa_n/(n+1)`` and
    ``1/alpha_n = 2/pi + kappa_tilde_n/(n+1)``.

    ``kappa[0]`` is complex when ``lam[0] < 0``; all other entries are real.
    """

    omega: float
    kappa: np.ndarray
    kappa_tilde: np.ndarray
    M: Optional[float] = None

    @property
    def kappa_norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.kappa) ** 2)))

    @property
    def kappa_tilde_norm(self) -> float:
        return float(np.sqrt(np.sum(self.kappa_tilde ** 2)))

    def synthesize(self) -> Tuple[np.ndarray, np.ndarray]:
        """Rebuild ``(lam, alpha)`` from the remainders."""
        n = np.arange(self.kappa.size)
        root = n + self.omega / (PI * (n + 1)) + self.kappa / (n + 1)
        lam = root * root
        lam = np.real(lam) if np.iscomplexobj(lam) else lam
        alpha = 1.0 / (2.0 / PI + self.kappa_tilde / (n + 1))
        return lam, alpha


@dataclass(frozen=True)
class MembershipReport:
    in_Omega: bool
    in_Omega0M: Optional[bool]
    finite_rank_N: int
    kappa_norm: float = field(default=float("nan"))
    kappa_tilde_norm: float = field(default=float("nan"))


def _sqrt_lambda(lam: np.ndarray):
    if lam[0] < 0:
        root = np.sqrt(lam.astype(complex))
        return root
    return np.sqrt(lam)


def decompose(data: SpectralData, omega: float = 0.0,
              allow_complex: bool = False) -> AsymptoticDecomposition:
    """Split the stored data into ``omega`` and the l2 remainders.

    A negative ground state makes ``kappa[0]`` imaginary.  That is refused
    unless ``allow_complex`` is set, in which case ``kappa`` is complex and
    only its moduli enter the norms.
    """
    lam = data.lam
    if np.any(lam[1:] < 0):
        raise DomainError("spectrum below ground state asymptotics: "
                          "lambda_n < 0 for some n >= 1")
    if lam[0] < 0 and not allow_complex:
        raise DomainError("lambda_0 < 0 gives a complex kappa_0; pass allow_complex=True")
    n = np.arange(data.size)
    kappa = (n + 1) * (_sqrt_lambda(lam) - n) - omega / PI
    kappa_tilde = (n + 1) * (1.0 / data.alpha - 2.0 / PI)
    return AsymptoticDecomposition(float(omega), kappa, kappa_tilde, data.M)


def finite_rank_index(data: SpectralData, tol: Optional[float] = None) -> int:
    """Smallest ``N`` such that every pair with index ``> N`` is trivial."""
    for n in range(data.N, 0, -1):
        if not is_trivial(n, *data.pair(n), tol=tol):
            return n
    return 0


def validate(data: SpectralData, M: Optional[float] = None) -> MembershipReport:
    """Membership of the stored prefix (with trivial tail) in the data classes.

    Finite data with a trivial tail forces ``omega = 0``; a nonzero
    ``omega_hint`` declares the prefix to be a truncation of data with
    ``omega != 0`` and excludes it from the bounded class.
    """
    if M is None:
        M = data.M
    seam_ok = data.lam[-1] < float(data.size ** 2)
    dec = decompose(data, 0.0, allow_complex=True) if data.lam[1:].min(initial=0.0) >= 0 else None
    kn = dec.kappa_norm if dec is not None else float("inf")
    ktn = dec.kappa_tilde_norm if dec is not None else float("inf")
    in0M = None
    if M is not None:
        omega_zero = data.omega_hint is None or data.omega_hint == 0
        in0M = bool(seam_ok and omega_zero and kn <= M and ktn <= M)
    return MembershipReport(
        in_Omega=bool(seam_ok),
        in_Omega0M=in0M,
        finite_rank_N=finite_rank_index(data),
        kappa_norm=kn,
        kappa_tilde_norm=ktn,
    )


def estimate_omega(data: SpectralData) -> float:
    """Centering shift ``lam[N-1] - (N-1)**2`` with ``N`` the stored length."""
    last = data.size - 1
    return float(data.lam[last] - last * last)


def is_trivial(n: int, lam: float, alpha: float, tol: Optional[float] = None) -> bool:
    lam0, alpha0 = trivial_pair(n)
    if tol is None:
        return lam == lam0 and alpha == alpha0
    return abs(lam - lam0) <= tol and abs(alpha - alpha0) <= tol


Stream = Union[SpectralData, Callable[[int], Tuple[float, float]], Sequence[Tuple[float, float]]]


def detect_finite_rank(stream: Stream, n_tilde: int, trivial_tol: Optional[float] = None,
                       read_cap: int = 10 ** 6) -> int:
    """Finite-rank index of data promised to satisfy: ``n_tilde`` consecutive
    trivial pairs imply an all-trivial tail.

    Reads pairs ``n = 1, 2, ...`` and stops at the first run of ``n_tilde``
    trivial pairs; returns ``n - run + 1``.  ``read_cap`` turns a broken
    promise (no such run) into an error instead of an endless loop.
    """
    if n_tilde < 1:
        raise DomainError("n_tilde must be a positive integer")
    if isinstance(stream, SpectralData):
        read = stream.pair
    elif callable(stream):
        read = stream
    else:
        seq = list(stream)

        def read(n):
            return seq[n] if n < len(seq) else trivial_pair(n)

    ctr = 0
    n = 1
    while True:
        if n > read_cap:
            raise DomainError(f"no run of {n_tilde} trivial pairs within {read_cap} reads")
        lam, alpha = read(n)
        ctr = ctr + 1 if is_trivial(n, lam, alpha, trivial_tol) else 0
        if ctr == n_tilde:
            break
        n += 1
    return n - ctr + 1
