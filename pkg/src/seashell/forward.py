"""Forward Sturm-Liouville solver used to generate and re-check spectral data.

Solves ``-psi'' + q psi = lam psi`` on ``[0, pi]`` with ``psi'(0) = h psi(0)``
and ``psi'(pi) = -H psi(pi)``.  The solution is propagated with a
fourth-order Magnus integrator (vectorized over many trial eigenvalues at
once), the eigenvalue index is read off a scaled Prufer angle, and norming
constants come from the Wronskian identity

    int_0^pi phi^2 dx = phi'(pi) d(phi)/d(lam)(pi) - phi(pi) d(phi')/d(lam)(pi),

with the lam-derivatives taken by complex-step differentiation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import integrate, special

from .errors import DomainError, NumericalError
from .spectral_data import SpectralData

_GAUSS = np.sqrt(3.0) / 6.0
_CSTEP = 1e-20


@dataclass
class PotentialSpec:
    """Potential ``q`` on ``[0, pi]`` together with the Robin constants.

    ``breakpoints`` lists interior points where ``q`` or ``q'`` jumps; the
    integration mesh always contains them.
    """

    q: Callable[[np.ndarray], np.ndarray]
    h: float = 0.0
    H: float = 0.0
    name: str = "custom"
    breakpoints: Sequence[float] = ()
    params: dict = field(default_factory=dict)
    grid: Optional[np.ndarray] = None

    def mean_integral(self) -> float:
        """``int_0^pi q dx``."""
        if self.grid is not None:
            return float(np.trapezoid(self.q(self.grid), self.grid))
        pts = sorted(set(float(b) for b in self.breakpoints))
        val, _ = integrate.quad(lambda x: float(self.q(np.array(x))), 0.0, np.pi,
                                points=pts or None, limit=200, epsabs=1e-13, epsrel=1e-13)
        return float(val)

    def omega(self) -> float:
        """``h + H + (1/2) int q``, the leading eigenvalue shift parameter."""
        return self.h + self.H + 0.5 * self.mean_integral()

    def to_dict(self) -> dict:
        out = {"kind": self.name, "h": self.h, "H": self.H}
        out.update(self.params)
        if self.grid is not None:
            out["x"] = self.grid.tolist()
            out["values"] = np.asarray(self.q(self.grid)).tolist()
        return out


def zero_potential(h: float = 0.0, H: float = 0.0) -> PotentialSpec:
    return PotentialSpec(lambda x: np.zeros_like(np.asarray(x, dtype=float)), h, H, "zero")


def constant_potential(c: float, h: float = 0.0, H: float = 0.0) -> PotentialSpec:
    return PotentialSpec(lambda x: np.full_like(np.asarray(x, dtype=float), c), h, H,
                         "constant", params={"c": c})


def smooth_potential(amplitude: float = 1.0, width: float = 0.5,
                     h: float = 0.0, H: float = 0.0) -> PotentialSpec:
    """Gaussian bump centred at ``pi/2``."""
    def q(x):
        x = np.asarray(x, dtype=float)
        return amplitude * np.exp(-((x - np.pi / 2) ** 2) / (2 * width ** 2))
    return PotentialSpec(q, h, H, "smooth", params={"amplitude": amplitude, "width": width})


def step_potential(amplitude: float = 1.0, h: float = 0.0, H: float = 0.0) -> PotentialSpec:
    """``amplitude`` on ``[pi/3, 2pi/3]``, zero elsewhere (discontinuous)."""
    a, b = np.pi / 3, 2 * np.pi / 3

    def q(x):
        x = np.asarray(x, dtype=float)
        return np.where((x >= a) & (x <= b), amplitude, 0.0)
    return PotentialSpec(q, h, H, "step", (a, b), params={"amplitude": amplitude})


def hat_potential(amplitude: float = 1.0, h: float = 0.0, H: float = 0.0) -> PotentialSpec:
    """Tent peaking at ``pi/2`` (continuous, kinked)."""
    def q(x):
        x = np.asarray(x, dtype=float)
        return amplitude * np.maximum(0.0, 1.0 - np.abs(x - np.pi / 2) / (np.pi / 2))
    return PotentialSpec(q, h, H, "hat", (np.pi / 2,), params={"amplitude": amplitude})


def grid_potential(x, values, h: float = 0.0, H: float = 0.0) -> PotentialSpec:
    """Samples on a grid covering ``[0, pi]``, linearly interpolated."""
    x = np.asarray(x, dtype=float)
    values = np.asarray(values, dtype=float)
    if x.size < 2 or x.size != values.size:
        raise DomainError("grid potential needs matching x/values arrays of length >= 2")
    if np.any(np.diff(x) <= 0):
        raise DomainError("grid must be strictly increasing")
    if abs(x[0]) > 1e-12 or abs(x[-1] - np.pi) > 1e-9:
        raise DomainError("grid must cover [0, pi]")
    x = x.copy()
    x[0], x[-1] = 0.0, np.pi
    return PotentialSpec(lambda t: np.interp(t, x, values), h, H, "grid",
                         tuple(x[1:-1]), grid=x)


BUILTINS = {
    "zero": lambda p: zero_potential(p.get("h", 0.0), p.get("H", 0.0)),
    "constant": lambda p: constant_potential(p.get("c", 0.0), p.get("h", 0.0), p.get("H", 0.0)),
    "smooth": lambda p: smooth_potential(p.get("amplitude", 1.0), p.get("width", 0.5),
                                         p.get("h", 0.0), p.get("H", 0.0)),
    "step": lambda p: step_potential(p.get("amplitude", 1.0), p.get("h", 0.0), p.get("H", 0.0)),
    "hat": lambda p: hat_potential(p.get("amplitude", 1.0), p.get("h", 0.0), p.get("H", 0.0)),
    "grid": lambda p: grid_potential(p["x"], p["values"], p.get("h", 0.0), p.get("H", 0.0)),
}


def potential_from_dict(d: dict) -> PotentialSpec:
    kind = d.get("kind")
    if kind not in BUILTINS:
        raise DomainError(f"unknown potential kind {kind!r}; expected one of {sorted(BUILTINS)}")
    try:
        return BUILTINS[kind](d)
    except KeyError as exc:
        raise DomainError(f"potential spec missing field {exc}") from exc


# --------------------------------------------------------------------------
# propagation


def _mesh(spec: PotentialSpec, cells: int) -> np.ndarray:
    if spec.grid is not None:
        g = spec.grid
        sub = max(1, math.ceil(cells / (g.size - 1)))
        frac = np.linspace(0.0, 1.0, sub + 1)[:-1]
        nodes = (g[:-1, None] + np.diff(g)[:, None] * frac).ravel()
        return np.append(nodes, np.pi)
    nodes = np.linspace(0.0, np.pi, cells + 1)
    extra = [b for b in spec.breakpoints if 0.0 < b < np.pi]
    if extra:
        nodes = np.unique(np.concatenate([nodes, extra]))
        nodes = nodes[np.concatenate([[True], np.diff(nodes) > 1e-12])]
        nodes[-1] = np.pi
    return nodes


@dataclass
class _Propagator:
    """Per-cell Magnus data for one potential on a fixed mesh."""

    spec: PotentialSpec
    nodes: np.ndarray

    def __post_init__(self):
        x0, x1 = self.nodes[:-1], self.nodes[1:]
        self.dx = x1 - x0
        mid = 0.5 * (x0 + x1)
        q1 = np.asarray(self.spec.q(mid - _GAUSS * self.dx), dtype=float)
        q2 = np.asarray(self.spec.q(mid + _GAUSS * self.dx), dtype=float)
        self.qbar = 0.5 * (q1 + q2)
        self.sigma = (np.sqrt(3.0) / 12.0) * self.dx ** 2 * (q1 - q2)
        self.qmax = float(np.max(np.abs(self.qbar))) if self.qbar.size else 0.0

    def shoot(self, lam: np.ndarray, with_derivative: bool = False):
        """Propagate ``phi(0) = 1, phi'(0) = h`` to ``x = pi``.

        Returns the unwrapped Prufer angle at ``pi`` and, if asked, the
        Wronskian integral ``int phi^2``.
        """
        lam = np.asarray(lam, dtype=float)
        lamc = lam + 1j * _CSTEP * np.maximum(1.0, np.abs(lam)) if with_derivative else lam
        s = np.sqrt(np.maximum(lam, 1.0))
        dx = self.dx[:, None]
        off = self.sigma[:, None]
        delta = off ** 2 + dx ** 2 * (self.qbar[:, None] - lamc[None, :])
        ch, sh = _cosh_sinhc(delta)
        m11 = ch + sh * off
        m22 = ch - sh * off
        m12 = sh * dx
        m21 = sh * dx * (self.qbar[:, None] - lamc[None, :])

        dtype = complex if with_derivative else float
        y1 = np.ones(lam.shape, dtype=dtype)
        y2 = np.full(lam.shape, self.spec.h, dtype=dtype)
        logscale = np.zeros(lam.shape)
        theta = np.arctan2(s, self.spec.h)
        prev = theta.copy()
        total = theta.copy()
        for k in range(self.dx.size):
            y1, y2 = m11[k] * y1 + m12[k] * y2, m21[k] * y1 + m22[k] * y2
            r1, r2 = y1.real, y2.real
            ang = np.arctan2(s * r1, r2)
            d = ang - prev
            d -= 2 * np.pi * np.round(d / (2 * np.pi))
            total += d
            prev = ang
            c = np.hypot(s * r1, r2)
            y1 = y1 / c
            y2 = y2 / c
            logscale += np.log(c)
        if not with_derivative:
            return total, None
        eps = _CSTEP * np.maximum(1.0, np.abs(lam))
        p, dp = y1.real, y2.real
        p_l, dp_l = y1.imag / eps, y2.imag / eps
        alpha = np.exp(2 * logscale) * (dp * p_l - p * dp_l)
        return total, alpha

    def index_function(self, lam):
        """``(theta(pi) - theta_end) / pi``; equals ``n`` at the n-th eigenvalue."""
        lam = np.asarray(lam, dtype=float)
        s = np.sqrt(np.maximum(lam, 1.0))
        theta, _ = self.shoot(lam)
        return (theta - np.arctan2(s, -self.spec.H)) / np.pi


def _cosh_sinhc(delta):
    """``cosh(sqrt(delta))`` and ``sinh(sqrt(delta))/sqrt(delta)``, analytic in delta."""
    r = np.sqrt(delta + 0j)
    small = np.abs(delta) < 1e-8
    safe = np.where(small, 1.0, r)
    ch = np.cosh(r)
    sh = np.where(small, 1.0 + delta / 6.0 + delta ** 2 / 120.0, np.sinh(safe) / safe)
    if not np.iscomplexobj(delta):
        return ch.real, sh.real
    return ch, sh


def _default_cells(spec: PotentialSpec, count: int) -> int:
    cells = max(2400, 80 * count)
    return int(math.ceil(cells / 12.0) * 12)


def _propagator(spec: PotentialSpec, count: int, cells: Optional[int]) -> _Propagator:
    return _Propagator(spec, _mesh(spec, cells or _default_cells(spec, count)))


def eigenvalues(spec: PotentialSpec, count: int, cells: Optional[int] = None,
                rtol: float = 1e-13) -> np.ndarray:
    """The first ``count`` eigenvalues, indexed by oscillation count."""
    if count < 1:
        raise DomainError("count must be >= 1")
    prop = _propagator(spec, count, cells)
    # per-cell phase advance has to stay well below pi for the unwrapping
    lam_top = (count + 2) ** 2 + prop.qmax + 4 * (abs(spec.h) + abs(spec.H)) ** 2
    if np.max(prop.dx) * (np.sqrt(lam_top) + prop.qmax) > 1.0:
        raise NumericalError("integration mesh too coarse for the requested eigenvalues")
    n = np.arange(count, dtype=float)
    guess = n * n + spec.omega() * 2 / np.pi
    width = 2.0 * n + 2.0 + prop.qmax + abs(spec.h) + abs(spec.H)
    lo, hi = guess - width, guess + width
    flo = prop.index_function(lo) - n
    fhi = prop.index_function(hi) - n
    for _ in range(60):
        bad_lo, bad_hi = flo >= 0, fhi <= 0
        if not (bad_lo.any() or bad_hi.any()):
            break
        width = width * 2
        lo = np.where(bad_lo, lo - width, lo)
        hi = np.where(bad_hi, hi + width, hi)
        flo = np.where(bad_lo, prop.index_function(lo) - n, flo)
        fhi = np.where(bad_hi, prop.index_function(hi) - n, fhi)
    else:
        raise NumericalError("could not bracket eigenvalues")
    return _illinois(prop, n, lo, hi, flo, fhi, rtol)


def _illinois(prop, n, lo, hi, flo, fhi, rtol, maxiter=200):
    side = np.zeros(n.shape, dtype=int)
    mid = 0.5 * (lo + hi)
    for _ in range(maxiter):
        mid = (lo * fhi - hi * flo) / (fhi - flo)
        # fall back to bisection if the secant point degenerates
        bad = ~np.isfinite(mid) | (mid <= lo) | (mid >= hi)
        mid = np.where(bad, 0.5 * (lo + hi), mid)
        fm = prop.index_function(mid) - n
        left = fm < 0
        lo = np.where(left, mid, lo)
        flo = np.where(left, fm, np.where(side == -1, flo / 2, flo))
        hi = np.where(left, hi, mid)
        fhi = np.where(left, np.where(side == 1, fhi / 2, fhi), fm)
        side = np.where(left, 1, -1)
        done = (hi - lo <= rtol * np.maximum(1.0, np.abs(mid))) | (fm == 0)
        if np.all(done):
            return mid
    raise NumericalError("eigenvalue iteration did not converge")


def norming_constants(spec: PotentialSpec, eigenvalues, cells: Optional[int] = None) -> np.ndarray:
    """``alpha_n = int_0^pi phi(x, lam_n)^2 dx`` with ``phi(0) = 1, phi'(0) = h``."""
    lam = np.asarray(eigenvalues, dtype=float)
    prop = _propagator(spec, lam.size, cells)
    _, alpha = prop.shoot(lam, with_derivative=True)
    if np.any(~np.isfinite(alpha)) or np.any(alpha <= 0):
        raise NumericalError("norming constant computation failed")
    return alpha


def spectral_data(spec: PotentialSpec, count: int, cells: Optional[int] = None) -> SpectralData:
    """Synthetic spectral data for ``spec``."""
    lam = eigenvalues(spec, count, cells)
    return SpectralData(lam, norming_constants(spec, lam, cells))


def eigenfunction(spec: PotentialSpec, lam: float, x, rtol: float = 1e-11):
    """``phi(x, lam)`` by adaptive Runge-Kutta; an oracle independent of the Magnus path."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    pts = sorted({0.0, np.pi, *[b for b in spec.breakpoints if 0 < b < np.pi]}) \
        if spec.grid is None else [0.0, np.pi]

    def rhs(t, y):
        return [y[1], (float(spec.q(np.array(t))) - lam) * y[0], y[0] ** 2]

    out = np.empty((3, x.size))
    y0 = [1.0, spec.h, 0.0]
    for a, b in zip(pts[:-1], pts[1:]):
        mask = (x >= a) & (x <= b)
        sol = integrate.solve_ivp(rhs, (a, b), y0, method="DOP853", rtol=rtol,
                                  atol=rtol * 1e-2, dense_output=True, max_step=(b - a) / 8)
        if not sol.success:
            raise NumericalError(sol.message)
        if mask.any():
            out[:, mask] = sol.sol(x[mask])
        y0 = sol.y[:, -1]
    return out


def free_robin_data(h: float, count: int, c: float = 0.0) -> SpectralData:
    """Exact data for ``q = c`` (constant) with ``H = -h``.

    The eigenfunctions are ``exp(h x)`` (``lam_0 = c - h^2``) and
    ``cos(n x) + (h/n) sin(n x)`` (``lam_n = c + n^2``), so
    ``alpha_0 = (exp(2 h pi) - 1) / (2h)`` and ``alpha_n = (pi/2)(1 + h^2/n^2)``.
    """
    n = np.arange(count, dtype=float)
    lam = c + n * n
    lam[0] = c - h * h
    alpha = np.empty(count)
    alpha[0] = np.pi if h == 0 else np.expm1(2 * h * np.pi) / (2 * h)
    alpha[1:] = (np.pi / 2) * (1.0 + h * h / n[1:] ** 2)
    return SpectralData(lam, alpha)


def spectral_error(a, b) -> float:
    """Root-sum-square of differences of signed square roots of two sorted spectra."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise DomainError(f"spectra have different lengths ({a.size} vs {b.size})")
    if np.any(np.diff(a) < 0) or np.any(np.diff(b) < 0):
        raise DomainError("spectra must be sorted ascending")

    def root(v):
        return np.sign(v) * np.sqrt(np.abs(v))

    return float(np.sqrt(np.sum((root(a) - root(b)) ** 2)))


def free_robin_profile(h: float, N: int, m: int) -> np.ndarray:
    """``Phi_N(j pi / m)`` for ``j = 0..2m`` where ``F_N(x, y) = (Phi_N(x+y) + Phi_N(x-y)) / 2``
    is the data kernel of :func:`free_robin_data` truncated after index ``N``.

    ``Phi_N(t) = cosh(h t)/alpha_0 - 1/pi - (2h^2/pi) sum_{n=1}^N cos(n t)/(n^2 + h^2)``.
    The sum is the closed-form infinite series minus its tail; on the grid
    ``cos(n t_j)`` depends only on ``n mod 2m``, so the tail reduces to
    trigamma values.  Cost is independent of ``N``.
    """
    if h == 0:
        return np.zeros(2 * m + 1)
    if N < 1 or m < 1:
        raise DomainError("need N >= 1 and m >= 1")
    a = abs(h)
    t = np.arange(2 * m + 1) * (np.pi / m)
    s_inf = (np.pi / (2 * a)) * np.cosh(a * (np.pi - t)) / np.sinh(a * np.pi) - 1 / (2 * a * a)
    period = 2 * m
    K = N // period + 1
    # direct part of the tail: N < n < K * period
    n_direct = np.arange(N + 1, K * period, dtype=float)
    tail = np.cos(np.outer(t, n_direct)) @ (1.0 / (n_direct ** 2 + a * a)) if n_direct.size else 0.0
    # remaining tail n = r + period * k, k >= K; h^2 / n^2 is below 1e-16 relative only for
    # large n, so keep one correction term
    r = np.arange(period, dtype=float)
    x = K + r / period
    B = (special.polygamma(1, x) - (a / period) ** 2 * special.polygamma(3, x) / 6.0) / period ** 2
    tail = tail + np.cos(np.outer(t, r)) @ B
    s_N = s_inf - tail
    alpha0 = np.expm1(2 * h * np.pi) / (2 * h)
    return np.cosh(h * t) / alpha0 - 1 / np.pi - (2 * h * h / np.pi) * s_N


def profile_kernel(phi: np.ndarray, m: int):
    """``F(u, v) = (Phi(u+v) + Phi(|u-v|)) / 2`` for ``u, v`` on the grid ``j pi / m``."""
    step = np.pi / m

    def F(u, v):
        i = np.rint((np.asarray(u) + np.asarray(v)) / step).astype(int)
        j = np.rint(np.abs(np.asarray(u) - np.asarray(v)) / step).astype(int)
        return 0.5 * (phi[i] + phi[j])

    return F
