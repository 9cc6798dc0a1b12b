"""Closed-form oracles shared by the test modules."""
import numpy as np

from seashell.spectral_data import SpectralData


def rank_one_data(n0: int, beta: float = 2.0) -> SpectralData:
    """Trivial data except ``alpha[n0] = pi / (pi + beta)``."""
    d = SpectralData.trivial(n0 + 1)
    alpha = d.alpha.copy()
    alpha[n0] = np.pi / (np.pi + beta)
    return SpectralData(d.lam, alpha)


def rank_one_weight(n0: int, beta: float = 2.0) -> float:
    """Coefficient ``b`` in ``F(x, y) = b cos(n0 x) cos(n0 y)``."""
    free = 1 / np.pi if n0 == 0 else 2 / np.pi
    return (np.pi + beta) / np.pi - free


def rank_one_K(x, y, n0: int, beta: float = 2.0):
    """Closed-form GLM solution for a separable kernel ``b cos(n0 x) cos(n0 y)``."""
    b = rank_one_weight(n0, beta)
    x = np.asarray(x, dtype=float)
    integral = x / 2 + np.sin(2 * n0 * x) / (4 * n0) if n0 else x
    return -b * np.cos(n0 * x) * np.cos(n0 * np.asarray(y)) / (1 + b * integral)


def rank_one_dK(x, n0: int, beta: float = 2.0):
    """``d/dx K(x, x)`` for the closed form above."""
    b = rank_one_weight(n0, beta)
    x = np.asarray(x, dtype=float)
    c2 = np.cos(n0 * x) ** 2
    integral = x / 2 + np.sin(2 * n0 * x) / (4 * n0)
    num = -b * (-n0 * np.sin(2 * n0 * x))
    return num / (1 + b * integral) + b * c2 * b * c2 / (1 + b * integral) ** 2
