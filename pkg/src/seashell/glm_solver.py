"""Per-abscissa solution of the GLM integral equation with a degenerate kernel.

For fixed ``x`` the equation ``K(x,y) + F(x,y) + int_0^x K(x,t) F(t,y) dt = 0``
becomes the ``(2N+2)``-dimensional system ``(I - A(x)) c = b(x)`` with

    A_ij = <A_j, B_i>_{L^2[0,x]},     b_i = <f_x, B_i>_{L^2[0,x]},

and ``K(x, y) = f_x(y) + sum_i c_i A_i(y)``.  All entries are closed form.
"""
from __future__ import annotations

import os
import threading
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Tuple, Union

import numpy as np
import scipy.linalg as sla

from .errors import DomainError, GlmSingularError
from .trig_kernel import BasisSet, KernelFN, eval_F

_CHUNK = 256


def worker_count() -> int:
    """Thread cap from ``SEASHELL_THREADS`` (default 1)."""
    try:
        return max(1, int(os.environ.get("SEASHELL_THREADS", "1")))
    except ValueError:
        return 1


@dataclass
class GlmSystem:
    x: float
    matrix: np.ndarray
    rhs: np.ndarray
    solution: Optional[np.ndarray] = None


def _system_arrays(basis: BasisSet, x):
    """Batched ``(I - A, b)`` for an array of abscissae."""
    x = np.asarray(x, dtype=float)
    P = basis.gram(x)
    a, b = basis.amp_A, basis.amp_B
    cosx = basis.cosines(x)
    frak_A = b[:, None] * P * a[None, :]
    # b_i = sum_j A_j(x) <B_j, B_i>
    w = a * b * cosx
    rhs = b * np.einsum("...j,...ji->...i", w, P)
    n = basis.size
    return np.eye(n) - frak_A, rhs, P, cosx


def assemble(basis: BasisSet, kernel: Optional[KernelFN], x: float) -> GlmSystem:
    if not 0.0 <= x <= np.pi * (1 + 1e-15):
        raise DomainError(f"x={x} outside [0, pi]")
    matrix, rhs, _, _ = _system_arrays(basis, float(x))
    return GlmSystem(float(x), matrix, rhs)


def solve_coefficients(sys: GlmSystem) -> np.ndarray:
    """Pivoted LU solve; refuses systems singular to working precision."""
    try:
        with warnings.catch_warnings():
            # singularity is judged by the condition estimate below
            warnings.simplefilter("ignore", sla.LinAlgWarning)
            lu, piv = sla.lu_factor(sys.matrix, check_finite=True)
    except (ValueError, np.linalg.LinAlgError) as exc:
        raise GlmSingularError(f"GLM system singular at x={sys.x}") from exc
    anorm = np.linalg.norm(sys.matrix, 1)
    rcond, info = sla.lapack.dgecon(lu, anorm, norm="1")
    if info != 0 or rcond < np.finfo(float).eps:
        raise GlmSingularError(f"GLM system singular at x={sys.x} (rcond={rcond:.3g})")
    c = sla.lu_solve((lu, piv), sys.rhs)
    sys.solution = c
    return c


def _batched_solve(matrix, rhs, xs):
    try:
        c = np.linalg.solve(matrix, rhs[..., None])[..., 0]
    except np.linalg.LinAlgError as exc:
        raise GlmSingularError(f"GLM system singular on x in [{xs.min()}, {xs.max()}]") from exc
    resid = np.max(np.abs(np.einsum("...ij,...j->...i", matrix, c) - rhs), axis=-1)
    scale = 1.0 + np.max(np.abs(rhs), axis=-1)
    bad = ~np.isfinite(resid) | (resid > 1e-10 * scale)
    if np.any(bad):
        raise GlmSingularError(f"GLM system singular at x={xs[np.argmax(bad)]}")
    return c


@dataclass
class KNEvaluator:
    """Evaluates ``K_N`` from solved coefficient vectors, cached by abscissa."""

    basis: BasisSet
    kernel: Optional[KernelFN] = None
    _cache: Dict[float, np.ndarray] = field(default_factory=dict, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def __post_init__(self):
        if self.kernel is None:
            self.kernel = KernelFN(self.basis)

    @classmethod
    def from_data(cls, data) -> "KNEvaluator":
        kernel = KernelFN.from_data(data)
        return cls(kernel.basis, kernel)

    def coefficients(self, x) -> np.ndarray:
        """Solution vectors ``c(x)``; shape ``x.shape + (2N+2,)``."""
        xs = np.asarray(x, dtype=float)
        flat = xs.reshape(-1)
        if flat.size and (flat.min() < 0 or flat.max() > np.pi * (1 + 1e-15)):
            raise DomainError("abscissae must lie in [0, pi]")
        missing = [v for v in dict.fromkeys(flat.tolist()) if v not in self._cache]
        if missing:
            arr = np.array(missing)
            chunks = [arr[i:i + _CHUNK] for i in range(0, arr.size, _CHUNK)]
            workers = min(worker_count(), len(chunks))
            if workers > 1:
                with ThreadPoolExecutor(workers) as pool:
                    solved = list(pool.map(self._solve_chunk, chunks))
            else:
                solved = [self._solve_chunk(ch) for ch in chunks]
            with self._lock:
                for ch, cs in zip(chunks, solved):
                    for v, c in zip(ch.tolist(), cs):
                        self._cache[v] = c
        out = np.array([self._cache[v] for v in flat.tolist()])
        return out.reshape(xs.shape + (self.basis.size,))

    def _solve_chunk(self, xs):
        matrix, rhs, _, _ = _system_arrays(self.basis, xs)
        return _batched_solve(matrix, rhs, xs)

    def profile(self, x: float) -> np.ndarray:
        """Weights ``w`` with ``K(x, y) = sum_i w_i cos(rho_i y)``."""
        b = self.basis
        c = self.coefficients(x)
        return b.amp_A * (b.amp_B * b.cosines(x) + c)

    def diagonal(self, x) -> np.ndarray:
        """``K_N(x, x)`` on an array of abscissae."""
        b = self.basis
        c = self.coefficients(x)
        cos = b.cosines(x)
        return np.sum(b.amp_A * cos * (b.amp_B * cos + c), axis=-1)

    def diagonal_derivative(self, x) -> np.ndarray:
        """Exact ``d/dx K_N(x, x)`` from the x-differentiated linear system."""
        b = self.basis
        xs = np.asarray(x, dtype=float)
        c = self.coefficients(xs)
        matrix, _, P, cos = _system_arrays(b, xs)
        dcos = b.cosine_derivatives(xs)
        a, bb = b.amp_A, b.amp_B
        Ax, Bx, dAx = a * cos, bb * cos, a * dcos
        kxx = np.sum(Ax * Bx, axis=-1)
        G = bb[:, None] * P * bb[None, :]
        db = np.einsum("...j,...ji->...i", dAx, G) + Bx * kxx[..., None]
        dA_c = Bx * np.sum(Ax * c, axis=-1)[..., None]
        dc = np.linalg.solve(matrix, (db + dA_c)[..., None])[..., 0]
        return np.sum(dAx * (Bx + c) + Ax * (bb * dcos + dc), axis=-1)


def eval_K(ev: KNEvaluator, x: float, y) -> np.ndarray:
    """``K_N(x, y)`` for ``0 <= y <= x <= pi``."""
    y = np.asarray(y, dtype=float)
    if np.any(y > x) or np.any(y < 0):
        raise DomainError("K(x, y) is defined for 0 <= y <= x only")
    w = ev.profile(float(x))
    out = ev.basis.cosines(y) @ w
    return out[()] if out.ndim == 0 else out


def integral_equation_residual(ev: KNEvaluator, x: float, y) -> np.ndarray:
    """``K(x,y) + F(x,y) + int_0^x K(x,t) F(t,y) dt`` with the integral in closed form."""
    b = ev.basis
    y = np.asarray(y, dtype=float)
    w = ev.profile(float(x))
    P = b.gram(float(x))
    ab = b.amp_A * b.amp_B
    # F(t, y) = -sum_j a_j b_j cos_j(t) cos_j(y)
    integral = -(b.cosines(y) * ab) @ (P.T @ w)
    return eval_K(ev, x, y) + eval_F(ev.kernel, x, y) + integral


FLike = Union[KernelFN, Callable[[np.ndarray, np.ndarray], np.ndarray]]


def _quadrature_weights(x: float, m: int, rule: str) -> np.ndarray:
    h = x / m
    if rule == "trapezoid":
        w = np.full(m + 1, h)
        w[[0, -1]] = h / 2
    elif rule == "simpson":
        if m % 2:
            raise DomainError("simpson rule needs an even number of intervals")
        w = np.full(m + 1, 2 * h / 3)
        w[1::2] = 4 * h / 3
        w[[0, -1]] = h / 3
    else:
        raise DomainError(f"unknown quadrature rule {rule!r}")
    return w


def solve_nystrom(kernel: FLike, x: float, m: int, rule: str = "trapezoid") -> Tuple[np.ndarray, np.ndarray]:
    """Quadrature discretization of the GLM equation on ``[0, x]``.

    ``m`` is the number of subintervals.  Returns nodes ``t`` and ``K(x, t)``.
    Independent of the degenerate-kernel route; used as a test oracle.
    """
    if m < 2:
        raise DomainError("need m >= 2")
    F = (lambda u, v: eval_F(kernel, u, v)) if isinstance(kernel, KernelFN) else kernel
    t = np.linspace(0.0, x, m + 1)
    w = _quadrature_weights(x, m, rule)
    Ftt = F(t[:, None], t[None, :])  # Ftt[j, i] = F(t_j, t_i)
    mat = np.eye(m + 1) + (w[:, None] * Ftt).T
    rhs = -F(np.full_like(t, x), t)
    try:
        k = np.linalg.solve(mat, rhs)
    except np.linalg.LinAlgError as exc:
        raise GlmSingularError(f"Nystrom system singular at x={x}") from exc
    return t, k
