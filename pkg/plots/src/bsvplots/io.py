"""Readers for the simulator's documented CSV/JSON output schemas.

Only the file formats are shared with the simulator; this package never
imports it.  Every reader validates the schema and raises SchemaError
naming the offending columns or keys.
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np


class SchemaError(ValueError):
    """Input file does not match the documented schema."""


def column_checksum(values) -> str:
    """sha256 over the float64 little-endian bytes of a 1-D array."""
    arr = np.ascontiguousarray(np.asarray(values, dtype="<f8"))
    return hashlib.sha256(arr.tobytes()).hexdigest()


def _read_csv(path, required):
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file") from None
        missing = [c for c in required if c not in header]
        if missing:
            raise SchemaError(
                f"{path}: missing columns {missing}; header has {header}"
            )
        idx = {c: header.index(c) for c in header}
        rows = [r for r in reader if r and any(x.strip() for x in r)]
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return header, idx, rows


@dataclass(frozen=True)
class SpectrumData:
    path: Path
    omega: np.ndarray
    wavelength_nm: np.ndarray
    intensity: np.ndarray

    @property
    def label(self) -> str:
        name = self.path.stem
        return name.replace("spectrum_", "").replace("_", " ")


def read_spectrum_csv(path) -> SpectrumData:
    cols = ("omega_rad_per_fs", "wavelength_nm", "intensity")
    _, idx, rows = _read_csv(path, cols)
    data = {c: np.array([float(r[idx[c]]) for r in rows]) for c in cols}
    return SpectrumData(
        path=Path(path),
        omega=data["omega_rad_per_fs"],
        wavelength_nm=data["wavelength_nm"],
        intensity=data["intensity"],
    )


@dataclass(frozen=True)
class SweepData:
    path: Path
    value: np.ndarray
    gain: np.ndarray
    schmidt_number: np.ndarray
    g2: np.ndarray


def read_sweep_csv(path) -> SweepData:
    cols = ("value", "gain", "K", "g2")
    _, idx, rows = _read_csv(path, cols)
    rows = [r for r in rows if not (len(r) > idx.get("error", -1) >= 0 and r[idx["error"]])]
    if not rows:
        raise SchemaError(f"{path}: every sweep row is an error row")
    get = lambda c: np.array([float(r[idx[c]]) for r in rows])
    return SweepData(
        path=Path(path), value=get("value"), gain=get("gain"),
        schmidt_number=get("K"), g2=get("g2"),
    )


@dataclass(frozen=True)
class WeightsData:
    path: Path
    lambdas: np.ndarray
    redistributed: np.ndarray
    gain: float
    schmidt_number: float


def read_weights_manifest(path) -> WeightsData:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON: {exc}") from exc
    missing = [k for k in ("lambdas", "redistributed_weights", "gain") if k not in doc]
    if missing:
        raise SchemaError(f"{path}: manifest missing keys {missing}")
    lam = np.asarray(doc["lambdas"], dtype=float)
    red = np.asarray(doc["redistributed_weights"], dtype=float)
    if lam.size == 0 or lam.size != red.size:
        raise SchemaError(f"{path}: weight arrays empty or mismatched")
    return WeightsData(
        path=path,
        lambdas=lam,
        redistributed=red,
        gain=float(doc["gain"]),
        schmidt_number=float(doc.get("schmidt_number", 0.0)),
    )


@dataclass(frozen=True)
class ModeData:
    path: Path
    omega: np.ndarray
    re_u: np.ndarray
    im_u: np.ndarray

    @property
    def magnitude(self):
        return np.hypot(self.re_u, self.im_u)


def read_mode_csv(path) -> ModeData:
    cols = ("omega_rad_per_fs", "re_u", "im_u")
    _, idx, rows = _read_csv(path, cols)
    get = lambda c: np.array([float(r[idx[c]]) for r in rows])
    return ModeData(path=Path(path), omega=get("omega_rad_per_fs"),
                    re_u=get("re_u"), im_u=get("im_u"))


def read_report_gains(path):
    """(gains, schmidt_numbers, g2s) from a simulator report.json."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON: {exc}") from exc
    try:
        per_gain = doc["report"]["per_gain"]
        gains = np.array([float(e["gain"]) for e in per_gain])
        ks = np.array([float(e["schmidt_number"]) for e in per_gain])
        g2 = np.array([float(e["g2"]) for e in per_gain])
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"{path}: missing report.per_gain entries: {exc}") from exc
    if gains.size == 0:
        raise SchemaError(f"{path}: report has no per-gain entries")
    return gains, ks, g2
