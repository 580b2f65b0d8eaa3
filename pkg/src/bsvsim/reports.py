"""Persistence: report JSON, spectrum/sweep CSV, mode and amplitude dumps.

File formats (consumed by the plotting package and external tools):

* ``report.json``      -- scenario record; see ScenarioResult.report_dict.
  The "timestamp" key, when present, is excluded from "report_hash".
* ``spectrum_G*.csv``  -- columns omega_rad_per_fs, wavelength_nm, intensity;
  one file per gain value, frequencies ascending.
* ``sweep.csv``        -- columns value, gain, K, g2, fwhm_nm, nrf, error;
  one row per (sweep value, gain), order follows the sweep values.
* ``modes/mode_NNN.csv`` -- columns omega_rad_per_fs, re_u, im_u; plus
  ``modes/manifest.json`` with lambdas, redistributed weights, K and gain.
* ``tpa.npz``          -- complex amplitude matrix ``values`` (row-major,
  signal frequency ascending over rows, idler over columns), axes
  ``omega_s`` / ``omega_i`` (rad/fs) and a JSON ``header`` string with
  units and the scenario hash.
"""

from __future__ import annotations

import csv
import json
import time
from pathlib import Path

import numpy as np

from .schmidt import GainState, SchmidtDecomposition, schmidt_number


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, float) and np.isnan(x):
        return "nan"
    return repr(float(x))


def write_report(result, out_dir, stamp_time=True) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    timestamp = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()) if stamp_time else None
    report = result.report_dict(timestamp=timestamp)
    path = out / "report.json"
    path.write_text(json.dumps(report, sort_keys=True, indent=1) + "\n")
    for g in result.per_gain:
        write_spectrum_csv(g.spectrum, out / f"spectrum_G{g.gain:g}.csv")
    if result.per_gain:
        # canonical name for single-spectrum consumers: the first gain
        write_spectrum_csv(result.per_gain[0].spectrum, out / "spectrum.csv")
    oc = getattr(result.config, "output", None)
    if oc is not None and result.decomposition is not None:
        from .schmidt import gain_state

        if oc.export_modes:
            primary = gain_state(result.decomposition, result.config.gains[0])
            export_modes(result.decomposition, primary, out / "modes",
                         max_modes=oc.max_modes)
        if oc.export_tpa and result.tpa is not None:
            dump_tpa(result.tpa, out / "tpa.npz",
                     scenario_hash=result.config.config_hash())
    return path


def write_spectrum_csv(spec, path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["omega_rad_per_fs", "wavelength_nm", "intensity"])
        lam = spec.wavelength_nm
        for i in range(spec.omega.size):
            w.writerow([_fmt(spec.omega[i]), _fmt(lam[i]), _fmt(spec.values[i])])
    return path


def write_sweep_csv(rows, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["value", "gain", "K", "g2", "fwhm_nm", "nrf", "error"])
        for r in rows:
            w.writerow(
                [
                    _fmt(r.value),
                    _fmt(r.gain),
                    _fmt(r.schmidt_number),
                    _fmt(r.g2),
                    _fmt(r.fwhm_nm),
                    _fmt(r.nrf_value),
                    r.error,
                ]
            )
    return path


def export_modes(
    decomp: SchmidtDecomposition, state: GainState, out_dir, max_modes=None
) -> Path:
    """Per-mode CSV files plus a JSON manifest of weights."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    n = decomp.rank_kept if max_modes is None else min(max_modes, decomp.rank_kept)
    for idx in range(n):
        u = decomp.modes_s[idx]
        with (out / f"mode_{idx:03d}.csv").open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["omega_rad_per_fs", "re_u", "im_u"])
            for j in range(decomp.grid.n):
                w.writerow([_fmt(decomp.grid.omega_s[j]), _fmt(u[j].real), _fmt(u[j].imag)])
    manifest = {
        "gain": state.gain,
        "schmidt_number": schmidt_number(state.Lambdas),
        "rank_kept": int(decomp.rank_kept),
        "modes_written": int(n),
        "lambdas": [float(x) for x in decomp.lambdas],
        "redistributed_weights": [float(x) for x in state.Lambdas],
        "mean_photons": [float(x) for x in state.mean_photons],
    }
    (out / "manifest.json").write_text(json.dumps(manifest, sort_keys=True, indent=1) + "\n")
    return out


def dump_tpa(tpa, path, scenario_hash="") -> Path:
    """Binary amplitude dump (npz) with a JSON header string."""
    path = Path(path)
    header = {
        "format": "bsvsim-tpa-1",
        "units": {"omega": "rad/fs", "values": "normalized amplitude"},
        "layout": "row-major, omega_s over rows ascending, omega_i over columns ascending",
        "normalization": tpa.normalization,
        "scenario_hash": scenario_hash,
        "meta": tpa.meta,
    }
    np.savez_compressed(
        path,
        values=tpa.values,
        omega_s=tpa.grid.omega_s,
        omega_i=tpa.grid.omega_i,
        header=json.dumps(header, sort_keys=True),
    )
    return path
