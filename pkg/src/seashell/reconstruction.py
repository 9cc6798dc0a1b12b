"""Full inverse pipeline: diagonal of K_N on a grid, potential, boundary constants."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DomainError
from .glm_solver import KNEvaluator
from .spectral_data import SpectralData, estimate_omega

SCHEMES = ("central2", "central4", "analytic")
SHIFTS = ("none", "auto")


def differentiate_diagonal(values, dx: float, scheme: str = "central2") -> np.ndarray:
    """Derivative of samples on a uniform grid.

    ``central2``: second-order central differences, second-order one-sided
    closures.  ``central4``: fourth-order central differences with
    fourth-order one-sided closures on the two outermost nodes at each end.
    """
    f = np.asarray(values, dtype=float)
    if f.size < 9:
        raise DomainError("need at least 9 grid nodes (m >= 8)")
    if scheme == "central2":
        return np.gradient(f, dx, edge_order=2)
    if scheme != "central4":
        raise DomainError(f"unknown difference scheme {scheme!r}")
    d = np.empty_like(f)
    d[2:-2] = (f[:-4] - 8 * f[1:-3] + 8 * f[3:-1] - f[4:]) / (12 * dx)
    d[0] = (-25 * f[0] + 48 * f[1] - 36 * f[2] + 16 * f[3] - 3 * f[4]) / (12 * dx)
    d[1] = (-3 * f[0] - 10 * f[1] + 18 * f[2] - 6 * f[3] + f[4]) / (12 * dx)
    d[-1] = (25 * f[-1] - 48 * f[-2] + 36 * f[-3] - 16 * f[-4] + 3 * f[-5]) / (12 * dx)
    d[-2] = (3 * f[-1] + 10 * f[-2] - 18 * f[-3] + 6 * f[-4] - f[-5]) / (12 * dx)
    return d


def sobolev_diagnostic(k1, k2, p: float = np.inf, x: Optional[np.ndarray] = None) -> float:
    """``2 ||k1 - k2||_{L^p[0, pi]}``, an upper bound on the W^{-1,p} distance
    of the potentials ``2 d/dx k1`` and ``2 d/dx k2``.  Trapezoid quadrature.
    """
    diff = np.abs(np.asarray(k1, dtype=float) - np.asarray(k2, dtype=float))
    if diff.size < 2:
        raise DomainError("need at least two grid values")
    if x is None:
        x = np.linspace(0.0, np.pi, diff.size)
    if p < 1:
        raise DomainError("p must lie in [1, inf]")
    if np.isinf(p):
        return float(2 * diff.max())
    return float(2 * np.trapezoid(diff ** p, x) ** (1.0 / p))


@dataclass
class Reconstruction:
    grid: np.ndarray
    k_diag: np.ndarray
    q: np.ndarray
    h: float
    H: float
    varpi: float
    n_used: int
    scheme: str = "central2"
    H_limit: Optional[float] = None
    evaluator: Optional[KNEvaluator] = field(default=None, repr=False)

    def potential(self) -> Callable[[np.ndarray], np.ndarray]:
        """``q_N`` as a function, evaluated exactly from the linear system."""
        ev = self.evaluator
        varpi = self.varpi

        def q(x):
            return 2.0 * ev.diagonal_derivative(np.clip(x, 0.0, np.pi)) + varpi

        return q

    def summary(self) -> dict:
        out = {"h": self.h, "H": self.H, "varpi": self.varpi, "N": self.n_used,
               "m": int(self.grid.size - 1), "scheme": self.scheme}
        if self.H_limit is not None:
            out["H_limit"] = self.H_limit
        return out


def reconstruct(data: SpectralData, m: int = 600, shift: str = "none",
                scheme: str = "central2", h_from_limit: bool = False) -> Reconstruction:
    """Potential and boundary constants from finite spectral data.

    With ``shift="auto"`` the eigenvalues are centred by ``estimate_omega``
    before solving and the shift is added back to ``q``; ``h`` and ``H`` are
    unaffected by a constant potential shift.
    """
    if m < 8:
        raise DomainError("grid size m must be >= 8")
    if shift not in SHIFTS:
        raise DomainError(f"unknown shift mode {shift!r}")
    if scheme not in SCHEMES:
        raise DomainError(f"unknown difference scheme {scheme!r}")
    varpi = estimate_omega(data) if shift == "auto" else 0.0
    work = data.shifted(-varpi) if varpi != 0.0 else data
    ev = KNEvaluator.from_data(work)
    grid = np.linspace(0.0, np.pi, m + 1)
    k_diag = ev.diagonal(grid)
    if scheme == "analytic":
        dk = ev.diagonal_derivative(grid)
    else:
        dk = differentiate_diagonal(k_diag, grid[1] - grid[0], scheme)
    q = 2.0 * dk + varpi
    h = float(k_diag[0]) + 0.0
    H = 0.0 - float(k_diag[-1])
    H_lim = None
    if h_from_limit:
        N = work.N
        lam_N = work.lam[N]
        if lam_N < 0:
            raise DomainError("limit formula needs a non-negative last eigenvalue")
        H_lim = float(np.pi * (N + 1) * (np.sqrt(lam_N) - N) - k_diag[-1] - h + k_diag[0])
    return Reconstruction(grid, k_diag, q, h, H, float(varpi), work.N, scheme, H_lim, ev)
