"""JSON and CSV formats.

Spectral data: ``{"lambda": [...], "alpha": [...], "M": optional, "omega_hint": optional}``.
Reconstructions: CSV ``x,q,k_diag`` with 17 significant digits plus a JSON
sidecar.  Python's float repr is the shortest exact round-trip form, so JSON
output is lossless and byte-stable.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Union

import numpy as np

from .errors import ValidationError
from .reconstruction import Reconstruction
from .spectral_data import SpectralData

PathLike = Union[str, Path]


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def load_json(path: PathLike) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON ({exc})") from exc


def spectral_from_dict(d: Any) -> SpectralData:
    if not isinstance(d, dict) or "lambda" not in d or "alpha" not in d:
        raise ValidationError('spectral data JSON needs "lambda" and "alpha" arrays')
    try:
        lam = np.asarray(d["lambda"], dtype=float)
        alpha = np.asarray(d["alpha"], dtype=float)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"non-numeric spectral data ({exc})") from exc
    M = d.get("M")
    omega = d.get("omega_hint")
    return SpectralData(lam, alpha, None if M is None else float(M),
                        None if omega is None else float(omega))


def spectral_to_dict(data: SpectralData) -> dict:
    out = {"lambda": data.lam.tolist(), "alpha": data.alpha.tolist()}
    if data.M is not None:
        out["M"] = data.M
    if data.omega_hint is not None:
        out["omega_hint"] = data.omega_hint
    return out


def read_spectral(path: PathLike) -> SpectralData:
    return spectral_from_dict(load_json(path))


def write_text(path: PathLike, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def write_spectral(data: SpectralData, path: PathLike) -> None:
    write_text(path, dumps(spectral_to_dict(data)))


def reconstruction_csv(rec: Reconstruction) -> str:
    lines = ["x,q,k_diag"]
    for x, q, k in zip(rec.grid, rec.q, rec.k_diag):
        # adding 0.0 turns -0.0 into 0.0
        lines.append(f"{x + 0.0:.17g},{q + 0.0:.17g},{k + 0.0:.17g}")
    return "\n".join(lines) + "\n"


def sidecar_path(csv_path: PathLike) -> Path:
    """``out.csv`` -> ``out.csv.json`` (never collides with a ``.json`` input)."""
    p = Path(csv_path)
    return p.with_name(p.name + ".json")


def write_reconstruction(rec: Reconstruction, csv_path: PathLike) -> Path:
    """Write the CSV and its sidecar; returns the sidecar path."""
    write_text(csv_path, reconstruction_csv(rec))
    side = sidecar_path(csv_path)
    write_text(side, dumps(rec.summary()))
    return side


def read_reconstruction_csv(path: PathLike) -> np.ndarray:
    """Columns ``x, q, k_diag`` as a ``(m+1, 3)`` array."""
    return np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
