"""Cosine atoms and the degenerate representation of the data kernel.

The kernel ``k(t, s) = -F(s, t)`` is written as ``sum_i A_i(t) B_i(s)`` with
2N+2 cosine atoms.  Everything the linear system needs reduces to integrals
``int_0^x cos(a s) cos(b s) ds``, evaluated in closed form.  A negative
eigenvalue gives an imaginary frequency; ``cos(i*sigma*s) = cosh(sigma*s)``
is handled by carrying the frequency as a complex number internally.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import List

import numpy as np

from .errors import DomainError
from .spectral_data import SpectralData

_FREE_AMP = 1.0 / np.sqrt(np.pi / 2)
_CONST_AMP = 1.0 / np.sqrt(np.pi)


class Branch(str, Enum):
    CIRCULAR = "circular"
    HYPERBOLIC = "hyperbolic"


def _sinc(w):
    """``sin(w)/w`` with the removable singularity filled; complex-aware."""
    return np.sinc(np.asarray(w) / np.pi)


def _complex_freq(freq, hyperbolic):
    freq = np.asarray(freq, dtype=float)
    if np.any(hyperbolic):
        return np.where(hyperbolic, 1j * freq, freq + 0j)
    return freq


def cos_product_integral(a, b, x):
    """``int_0^x cos(a s) cos(b s) ds`` for real frequencies (broadcasts).

    Written as ``x/2 * [sinc((a-b)x) + sinc((a+b)x)]`` so nearly equal
    frequencies do not cancel catastrophically.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    x = np.asarray(x, dtype=float)
    out = 0.5 * x * (_sinc((a - b) * x) + _sinc((a + b) * x))
    return out[()] if out.ndim == 0 else out


def _rho_product_integral(ra, rb, x):
    """Same integral for possibly imaginary frequencies ``ra``, ``rb``."""
    if not (np.iscomplexobj(ra) or np.iscomplexobj(rb)):
        return cos_product_integral(ra, rb, x)
    val = 0.5 * x * (_sinc((ra - rb) * x) + _sinc((ra + rb) * x))
    return np.real(val)


@dataclass(frozen=True)
class TrigAtom:
    """``amplitude * cos(freq t)`` or ``amplitude * cosh(freq t)``."""

    amplitude: float
    freq: float
    branch: Branch = Branch.CIRCULAR

    def __post_init__(self):
        if self.freq < 0:
            raise DomainError("atom frequency must be non-negative")

    @property
    def rho(self) -> complex:
        return 1j * self.freq if self.branch is Branch.HYPERBOLIC else self.freq

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.branch is Branch.HYPERBOLIC:
            return self.amplitude * np.cosh(self.freq * t)
        return self.amplitude * np.cos(self.freq * t)


def atom_inner_product(u: TrigAtom, v: TrigAtom, x: float) -> float:
    """``<u, v>`` in ``L^2[0, x]``, in closed form."""
    ru = np.asarray(u.rho)
    rv = np.asarray(v.rho)
    return float(u.amplitude * v.amplitude * _rho_product_integral(ru, rv, x))


@dataclass(frozen=True)
class BasisSet:
    """The 2N+2 atom pairs ``(A_i, B_i)`` sharing frequency ``freq[i]``.

    Indices ``0..N`` come from the data (``A_i = -B_i``), ``N+1..2N`` are the
    free cosines ``cos((i-N)s)`` and ``2N+1`` is the constant.
    """

    N: int
    freq: np.ndarray
    hyperbolic: np.ndarray
    amp_A: np.ndarray
    amp_B: np.ndarray

    @property
    def size(self) -> int:
        return 2 * self.N + 2

    @property
    def rho(self) -> np.ndarray:
        return _complex_freq(self.freq, self.hyperbolic)

    @property
    def atoms_A(self) -> List[TrigAtom]:
        return [self._atom(self.amp_A[i], i) for i in range(self.size)]

    @property
    def atoms_B(self) -> List[TrigAtom]:
        return [self._atom(self.amp_B[i], i) for i in range(self.size)]

    def _atom(self, amp, i):
        br = Branch.HYPERBOLIC if self.hyperbolic[i] else Branch.CIRCULAR
        return TrigAtom(float(amp), float(self.freq[i]), br)

    def cosines(self, t) -> np.ndarray:
        """``cos(rho_i t)`` for every atom; shape ``t.shape + (size,)``."""
        t = np.asarray(t, dtype=float)[..., None]
        c = np.cos(self.freq * t)
        hyp = self.hyperbolic
        if np.any(hyp):
            c[..., hyp] = np.cosh(self.freq[hyp] * t)
        return c

    def cosine_derivatives(self, t) -> np.ndarray:
        """``d/dt cos(rho_i t)``; ``sigma sinh(sigma t)`` on the hyperbolic branch."""
        t = np.asarray(t, dtype=float)[..., None]
        d = -self.freq * np.sin(self.freq * t)
        hyp = self.hyperbolic
        if np.any(hyp):
            d[..., hyp] = self.freq[hyp] * np.sinh(self.freq[hyp] * t)
        return d

    def gram(self, x) -> np.ndarray:
        """``P_ij(x) = int_0^x cos(rho_i s) cos(rho_j s) ds``; shape ``x.shape + (n, n)``."""
        x = np.asarray(x, dtype=float)[..., None, None]
        r = self.rho
        return _rho_product_integral(r[:, None], r[None, :], x)


def build_basis(data: SpectralData) -> BasisSet:
    """Atoms for the stored prefix ``0..N`` of ``data``."""
    N = data.N
    if np.any(data.alpha <= 0):
        raise DomainError("norming constants must be positive")
    lam = data.lam
    amp_data = 1.0 / np.sqrt(data.alpha)
    free = np.arange(1, N + 1, dtype=float)
    freq = np.concatenate([np.sqrt(np.abs(lam)), free, [0.0]])
    hyperbolic = np.concatenate([lam < 0, np.zeros(N + 1, dtype=bool)])
    amp_free = np.concatenate([np.full(N, _FREE_AMP), [_CONST_AMP]])
    amp_A = np.concatenate([amp_data, amp_free])
    amp_B = np.concatenate([-amp_data, amp_free])
    return BasisSet(N, freq, hyperbolic, amp_A, amp_B)


@dataclass(frozen=True)
class KernelFN:
    """Finite data kernel ``F_N``; ``k_N(t, s) = -F_N(s, t) = sum_i A_i(t) B_i(s)``."""

    basis: BasisSet

    @property
    def N(self) -> int:
        return self.basis.N

    @classmethod
    def from_data(cls, data: SpectralData) -> "KernelFN":
        return cls(build_basis(data))

    def k(self, t, s):
        cb = self.basis
        return np.sum(cb.amp_A * cb.cosines(t) * cb.amp_B * cb.cosines(s), axis=-1)


def eval_F(kernel: KernelFN, x, y):
    """Pointwise ``F_N(x, y)``, summed as data-minus-free pairs.

    Each stored pair contributes ``a_n^2 cos(rho_n x) cos(rho_n y)`` minus its
    free counterpart, so a trivial pair cancels to exactly zero.
    """
    b = kernel.basis
    N = b.N
    cx = b.cosines(x)
    cy = b.cosines(y)
    prod = cx * cy
    data_part = b.amp_A[: N + 1] ** 2 * prod[..., : N + 1]
    free_cols = np.concatenate([[2 * N + 1], np.arange(N + 1, 2 * N + 1)])
    free_part = b.amp_A[free_cols] ** 2 * prod[..., free_cols]
    out = np.sum(data_part - free_part, axis=-1)
    return out[()] if np.ndim(out) == 0 else out
