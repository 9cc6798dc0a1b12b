"""Forward -> inverse -> forward comparison on a known potential."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import forward
from .forward import PotentialSpec
from .reconstruction import Reconstruction, reconstruct
from .spectral_data import SpectralData


@dataclass
class RoundTripReport:
    N: int
    e_N: float
    h: float
    H: float
    h_N: float
    H_N: float
    varpi: float
    original: np.ndarray
    recomputed: np.ndarray

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "e_N": self.e_N,
            "h": self.h,
            "H": self.H,
            "h_N": self.h_N,
            "H_N": self.H_N,
            "delta_h": self.h_N - self.h,
            "delta_H": self.H_N - self.H,
            "varpi": self.varpi,
            "lambda_original": self.original.tolist(),
            "lambda_recomputed": self.recomputed.tolist(),
        }


def reconstructed_spec(rec: Reconstruction) -> PotentialSpec:
    """The reconstructed triple ``(q_N, h_N, H_N)`` as a forward-solver input."""
    return PotentialSpec(rec.potential(), rec.h, rec.H, "reconstructed")


def roundtrip_data(data: SpectralData, h: float = float("nan"), H: float = float("nan"),
                   m: int = 600, shift: str = "auto", scheme: str = "central2",
                   cells: Optional[int] = None) -> RoundTripReport:
    """Reconstruct from ``data``, recompute its spectrum and compare.

    The forward re-solve uses the exact ``q_N`` (not the grid samples), so
    ``e_N`` measures the pipeline rather than the difference stencil.
    """
    rec = reconstruct(data, m=m, shift=shift, scheme=scheme)
    lam_new = forward.eigenvalues(reconstructed_spec(rec), data.size, cells)
    e = forward.spectral_error(data.lam, lam_new)
    return RoundTripReport(data.size, e, h, H, rec.h, rec.H, rec.varpi, data.lam.copy(), lam_new)


def roundtrip(spec: PotentialSpec, N: int, m: int = 600, shift: str = "auto",
              scheme: str = "central2", cells: Optional[int] = None) -> RoundTripReport:
    """Generate ``N`` pairs from ``spec``, reconstruct, re-solve and compare."""
    data = forward.spectral_data(spec, N, cells)
    return roundtrip_data(data, spec.h, spec.H, m, shift, scheme, cells)
