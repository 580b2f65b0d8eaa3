"""Scenario ingestion, pipeline orchestration and parameter sweeps.

A scenario is a TOML document describing pump, crystal, interferometer
geometry, lock conditions, gains, grid, decomposition and observable
settings.  ``run_scenario`` executes the deterministic pipeline:

    dispersion setup -> pump-path solve -> phase lock -> amplitude build
    -> Schmidt decomposition -> per-gain redistribution -> observables

and returns a result record that serializes to ``report.json`` plus
spectrum CSV files.  ``run_sweep`` evaluates one scenario over a list of
values of a single parameter, optionally re-solving the lock conditions
per point (``relock``) or freezing them at the base configuration.
"""

from __future__ import annotations

import concurrent.futures
import hashlib
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np
import tomli
import tomlkit

from . import __version__
from .dispersion import (
    Geometry,
    InterferometerMedia,
    PhaseMatchedCrystal,
    find_pump_path,
)
from .errors import BsvError, ConfigError, ValidationError
from .jsa import (
    FrequencyGrid,
    JointSpectralAmplitude,
    PumpConfig,
    build_interferometer_tpa,
    build_single_crystal_tpa,
    phase_lock,
)
from .materials import (
    d2k_domega2,
    load_material_table,
    wavevector,
)
from .observables import (
    SpectralBand,
    band_moments,
    find_peaks,
    fwhm,
    g2_integral,
    nrf,
    spectrum,
)
from .schmidt import decompose, gain_state, schmidt_number
from .units import nm_from_omega, omega_from_nm, tau_from_fwhm_ps

CRYSTAL_BRANCHES = {"bbo": ("bbo_o", "bbo_e")}


# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class LockConfig:
    target_nm: float
    phase: str = "amplification"  # "amplification" | "none"
    offset_rad: float = 0.0


@dataclass(frozen=True)
class GridConfig:
    n: int = 512
    span: Any = "envelope"  # "envelope" | "fringe" | float half-span (rad/fs)
    span_scale: float = 0.0  # 0 = policy default


@dataclass(frozen=True)
class DecompositionConfig:
    method: str = "auto"
    truncation_tol: float = 1e-8
    max_rank: int = 0  # 0 = uncapped
    pair_tol: float = 1e-3


@dataclass(frozen=True)
class ObservablesConfig:
    spectrum_weights: str = "redistributed"
    peak_threshold: float = 0.1
    peak_merge_gap: float = 0.0  # rad/fs, 0 = default
    fwhm_envelope_window: float = 0.0  # rad/fs, 0 = raw curve
    bands: Any = None  # None | "split_at_minimum" | [[nm, nm], [nm, nm]]


@dataclass(frozen=True)
class OutputConfig:
    export_modes: bool = False
    export_tpa: bool = False
    max_modes: int = 16


@dataclass(frozen=True)
class InterferometerConfig:
    gvd_material: str = "sf6"
    gvd_length_cm: float = 0.0
    air_gap_cm: float = 0.0
    pump_path_cm: float = 0.0
    air_model: str = "vacuum"


@dataclass(frozen=True)
class ScenarioConfig:
    pump_wavelength_nm: float
    pump_tau_fs: float
    crystal_material: str
    crystal_length_mm: float
    gains: tuple
    interferometer: InterferometerConfig | None
    lock: LockConfig | None
    grid: GridConfig
    decomposition: DecompositionConfig
    observables: ObservablesConfig
    output: OutputConfig = OutputConfig()
    raw: dict = field(default_factory=dict, compare=False)

    @property
    def pump(self) -> PumpConfig:
        return PumpConfig(self.pump_wavelength_nm, self.pump_tau_fs)

    def to_dict(self) -> dict:
        """Normalized plain-dict form (the hashing/serialization basis)."""
        d: dict[str, Any] = {
            "pump": {
                "wavelength_nm": self.pump_wavelength_nm,
                "tau_fs": self.pump_tau_fs,
            },
            "crystal": {
                "material": self.crystal_material,
                "length_mm": self.crystal_length_mm,
            },
            "gain": {"values": list(self.gains)},
            "grid": {
                "n": self.grid.n,
                "span": self.grid.span,
                "span_scale": self.grid.span_scale,
            },
            "decomposition": {
                "method": self.decomposition.method,
                "truncation_tol": self.decomposition.truncation_tol,
                "max_rank": self.decomposition.max_rank,
                "pair_tol": self.decomposition.pair_tol,
            },
            "observables": {
                "spectrum_weights": self.observables.spectrum_weights,
                "peak_threshold": self.observables.peak_threshold,
                "peak_merge_gap": self.observables.peak_merge_gap,
                "fwhm_envelope_window": self.observables.fwhm_envelope_window,
                "bands": self.observables.bands,
            },
            "output": {
                "export_modes": self.output.export_modes,
                "export_tpa": self.output.export_tpa,
                "max_modes": self.output.max_modes,
            },
        }
        if self.interferometer is not None:
            d["interferometer"] = asdict(self.interferometer)
        if self.lock is not None:
            d["lock"] = asdict(self.lock)
        return d

    def to_toml(self) -> str:
        doc = tomlkit.document()
        for key, section in self.to_dict().items():
            tab = tomlkit.table()
            for k, v in section.items():
                if v is None:
                    continue
                tab[k] = v
            doc[key] = tab
        return tomlkit.dumps(doc)

    def config_hash(self) -> str:
        text = json.dumps(self.to_dict(), sort_keys=True)
        return hashlib.sha256(text.encode()).hexdigest()


def _get(raw, errors, path, types, default=None, required=False):
    node = raw
    parts = path.split(".")
    for p in parts[:-1]:
        node = node.get(p, {}) if isinstance(node, dict) else {}
    leaf = parts[-1]
    if not isinstance(node, dict) or leaf not in node:
        if required:
            errors.append(f"{path}: missing required field")
        return default
    val = node[leaf]
    if types is bool:
        ok = isinstance(val, bool)
    elif types is float:
        ok = isinstance(val, (int, float)) and not isinstance(val, bool)
        if ok:
            val = float(val)
    elif types is int:
        ok = isinstance(val, int) and not isinstance(val, bool)
    else:
        ok = isinstance(val, types)
    if not ok:
        errors.append(f"{path}: expected {getattr(types, '__name__', types)}, got {val!r}")
        return default
    return val


def validate_config(text: str):
    """Parse and validate a scenario TOML document.

    Returns ``(config, errors)``: on success errors is empty; on failure
    config is None and errors lists every problem with its field path.
    """
    errors: list[str] = []
    try:
        raw = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        return None, [f"(document): TOML parse error: {exc}"]

    table = load_material_table()

    lam_p = _get(raw, errors, "pump.wavelength_nm", float, required=True)
    tau = _get(raw, errors, "pump.tau_fs", float)
    fwhm_ps = _get(raw, errors, "pump.fwhm_ps", float)
    if tau is None and fwhm_ps is None and "pump" in raw:
        errors.append("pump.tau_fs: provide tau_fs or fwhm_ps")
    if tau is not None and fwhm_ps is not None:
        errors.append("pump.tau_fs: tau_fs and fwhm_ps are mutually exclusive")
    if tau is None and fwhm_ps is not None:
        if fwhm_ps <= 0:
            errors.append("pump.fwhm_ps: must be positive (ps)")
        else:
            tau = tau_from_fwhm_ps(fwhm_ps)
    if lam_p is not None and lam_p <= 0:
        errors.append("pump.wavelength_nm: must be positive (nm)")
    if tau is not None and tau <= 0:
        errors.append("pump.tau_fs: must be positive (fs)")

    mat = _get(raw, errors, "crystal.material", str, required=True)
    if mat is not None and mat not in CRYSTAL_BRANCHES:
        errors.append(
            f"crystal.material: unknown crystal {mat!r}; supported: "
            f"{sorted(CRYSTAL_BRANCHES)}"
        )
    length = _get(raw, errors, "crystal.length_mm", float, required=True)
    if length is not None and length <= 0:
        errors.append("crystal.length_mm: must be positive (mm)")

    gains = _get(raw, errors, "gain.values", list, required=True)
    if gains is not None:
        clean = []
        for i, g in enumerate(gains):
            if isinstance(g, bool) or not isinstance(g, (int, float)):
                errors.append(f"gain.values[{i}]: expected number, got {g!r}")
            elif g < 0:
                errors.append(f"gain.values[{i}]: parametric gain must be >= 0")
            else:
                clean.append(float(g))
        gains = tuple(clean)
        if not gains:
            errors.append("gain.values: needs at least one gain value")

    interf = None
    if "interferometer" in raw:
        gvd_mat = _get(raw, errors, "interferometer.gvd_material", str, default="sf6")
        if gvd_mat is not None and gvd_mat not in table:
            errors.append(
                f"interferometer.gvd_material: unknown material {gvd_mat!r}; "
                f"table has {table.names()}"
            )
        air_model = _get(raw, errors, "interferometer.air_model", str, default="vacuum")
        if air_model is not None and air_model not in table:
            errors.append(f"interferometer.air_model: unknown material {air_model!r}")
        d = _get(raw, errors, "interferometer.gvd_length_cm", float, default=0.0)
        da = _get(raw, errors, "interferometer.air_gap_cm", float, default=0.0)
        d0 = _get(raw, errors, "interferometer.pump_path_cm", float, default=0.0)
        for name, v in [
            ("interferometer.gvd_length_cm", d),
            ("interferometer.air_gap_cm", da),
            ("interferometer.pump_path_cm", d0),
        ]:
            if v is not None and v < 0:
                errors.append(f"{name}: path lengths must be >= 0 (cm)")
        interf = InterferometerConfig(
            gvd_material=gvd_mat or "sf6",
            gvd_length_cm=d or 0.0,
            air_gap_cm=da or 0.0,
            pump_path_cm=d0 or 0.0,
            air_model=air_model or "vacuum",
        )

    lock = None
    if "lock" in raw:
        if interf is None:
            errors.append("lock: requires an [interferometer] section")
        target = _get(raw, errors, "lock.target_nm", float, required=True)
        phase = _get(raw, errors, "lock.phase", str, default="amplification")
        if phase not in ("amplification", "none"):
            errors.append(
                f"lock.phase: expected 'amplification' or 'none', got {phase!r}"
            )
        offset = _get(raw, errors, "lock.offset_rad", float, default=0.0)
        if target is not None and target <= 0:
            errors.append("lock.target_nm: must be positive (nm)")
        lock = LockConfig(
            target_nm=target or 0.0,
            phase=phase or "amplification",
            offset_rad=offset or 0.0,
        )

    n = _get(raw, errors, "grid.n", int, default=512)
    if n is not None and n < 64:
        errors.append("grid.n: production grids need at least 64 points")
    span = raw.get("grid", {}).get("span", "envelope")
    if isinstance(span, bool) or not isinstance(span, (str, int, float)):
        errors.append(f"grid.span: expected 'envelope', 'fringe' or rad/fs number, got {span!r}")
    elif isinstance(span, str) and span not in ("envelope", "fringe"):
        errors.append(f"grid.span: unknown policy {span!r}")
    elif isinstance(span, (int, float)) and span <= 0:
        errors.append("grid.span: explicit half-span must be positive (rad/fs)")
    if isinstance(span, (int, float)) and not isinstance(span, bool):
        span = float(span)
    if span == "fringe" and (interf is None or (interf and interf.gvd_length_cm == 0)):
        errors.append("grid.span: 'fringe' policy needs a GVD medium of nonzero length")
    scale = _get(raw, errors, "grid.span_scale", float, default=0.0)
    if scale is not None and scale < 0:
        errors.append("grid.span_scale: must be >= 0")

    method = _get(raw, errors, "decomposition.method", str, default="auto")
    if method not in ("auto", "svd", "gram"):
        errors.append(f"decomposition.method: expected auto|svd|gram, got {method!r}")
    ttol = _get(raw, errors, "decomposition.truncation_tol", float, default=1e-8)
    if ttol is not None and not (0 <= ttol < 1):
        errors.append("decomposition.truncation_tol: must be in [0, 1)")
    max_rank = _get(raw, errors, "decomposition.max_rank", int, default=0)
    if max_rank is not None and max_rank < 0:
        errors.append("decomposition.max_rank: must be >= 0 (0 = uncapped)")
    pair_tol = _get(raw, errors, "decomposition.pair_tol", float, default=1e-3)

    weights = _get(raw, errors, "observables.spectrum_weights", str, default="redistributed")
    if weights not in ("redistributed", "photons"):
        errors.append(
            f"observables.spectrum_weights: expected redistributed|photons, got {weights!r}"
        )
    thresh = _get(raw, errors, "observables.peak_threshold", float, default=0.1)
    merge_gap = _get(raw, errors, "observables.peak_merge_gap", float, default=0.0)
    env_win = _get(raw, errors, "observables.fwhm_envelope_window", float, default=0.0)
    bands = raw.get("observables", {}).get("bands")
    if bands is not None:
        if isinstance(bands, str):
            if bands != "split_at_minimum":
                errors.append(
                    f"observables.bands: expected 'split_at_minimum' or [[nm,nm],[nm,nm]], got {bands!r}"
                )
        elif isinstance(bands, list):
            if len(bands) != 2 or any(
                not (isinstance(b, list) and len(b) == 2) for b in bands
            ):
                errors.append("observables.bands: expected two [lo_nm, hi_nm] pairs")
            else:
                bands = [[float(x) for x in b] for b in bands]
        else:
            errors.append(f"observables.bands: unsupported value {bands!r}")

    export_modes = _get(raw, errors, "output.export_modes", bool, default=False)
    export_tpa = _get(raw, errors, "output.export_tpa", bool, default=False)
    max_modes = _get(raw, errors, "output.max_modes", int, default=16)
    if max_modes is not None and max_modes < 1:
        errors.append("output.max_modes: must be >= 1")

    known = {
        "pump", "crystal", "gain", "interferometer", "lock", "grid",
        "decomposition", "observables", "output",
    }
    for key in raw:
        if key not in known:
            errors.append(f"{key}: unknown section")

    if errors:
        return None, errors

    cfg = ScenarioConfig(
        pump_wavelength_nm=lam_p,
        pump_tau_fs=tau,
        crystal_material=mat,
        crystal_length_mm=length,
        gains=gains,
        interferometer=interf,
        lock=lock,
        grid=GridConfig(n=n, span=span, span_scale=scale or 0.0),
        decomposition=DecompositionConfig(
            method=method, truncation_tol=ttol, max_rank=max_rank, pair_tol=pair_tol
        ),
        observables=ObservablesConfig(
            spectrum_weights=weights,
            peak_threshold=thresh,
            peak_merge_gap=merge_gap or 0.0,
            fwhm_envelope_window=env_win or 0.0,
            bands=bands,
        ),
        output=OutputConfig(
            export_modes=bool(export_modes),
            export_tpa=bool(export_tpa),
            max_modes=max_modes or 16,
        ),
        raw=raw,
    )
    return cfg, []


def parse_scenario(text: str) -> ScenarioConfig:
    """validate_config that raises ConfigError on any problem."""
    cfg, errors = validate_config(text)
    if errors:
        raise ConfigError(errors)
    return cfg


def load_scenario(path) -> ScenarioConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_scenario(fh.read())


# ---------------------------------------------------------------------------
# resolution (solving the derived quantities of a scenario)


@dataclass(frozen=True)
class ResolvedScenario:
    """Scenario with all solver outputs fixed: ready to build amplitudes."""

    config: ScenarioConfig
    pump: PumpConfig
    crystal: PhaseMatchedCrystal
    geometry: Geometry
    media: InterferometerMedia | None
    phase_offset: float
    grid: FrequencyGrid

    @property
    def is_interferometer(self) -> bool:
        return self.media is not None

    def build(self, check_edges=False) -> JointSpectralAmplitude:
        if self.is_interferometer:
            return build_interferometer_tpa(
                self.grid,
                self.pump,
                self.crystal,
                self.geometry,
                self.media,
                phase_offset=self.phase_offset,
                check_edges=check_edges,
            )
        return build_single_crystal_tpa(
            self.grid,
            self.pump,
            self.crystal,
            self.geometry.crystal_length_mm,
            check_edges=check_edges,
        )


def _phase_matching_half_width(crystal, length_mm, center):
    """Detuning where the sinc intensity falls to half (rad/fs), by bisection."""
    def sinc2(nu):
        x = 0.5 * crystal.mismatch(center + nu, center - nu) * length_mm
        return np.sinc(x / np.pi) ** 2

    lo, hi = 0.0, 1e-3
    while sinc2(hi) > 0.5 and hi < 2.0:
        hi *= 2.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if sinc2(mid) > 0.5:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def resolve_scenario(config: ScenarioConfig, table=None) -> ResolvedScenario:
    """Solve phase matching, pump path, lock offset and the grid."""
    table = table or load_material_table()
    pump = config.pump
    omega_p = pump.omega_p
    center = omega_p / 2.0

    ord_name, ext_name = CRYSTAL_BRANCHES[config.crystal_material]
    crystal = PhaseMatchedCrystal(table[ord_name], table[ext_name], omega_p)

    media = None
    geometry = Geometry(crystal_length_mm=config.crystal_length_mm)
    phase_offset = 0.0
    if config.interferometer is not None:
        ic = config.interferometer
        media = InterferometerMedia.from_table(table, ic.gvd_material, ic.air_model)
        geometry = Geometry(
            crystal_length_mm=config.crystal_length_mm,
            gvd_length_cm=ic.gvd_length_cm,
            air_gap_cm=ic.air_gap_cm,
            pump_path_cm=ic.pump_path_cm,
        )
        if config.lock is not None:
            target = omega_from_nm(config.lock.target_nm)
            d0 = find_pump_path(target, geometry, media, omega_p)
            geometry = geometry.replace(pump_path_cm=d0)
            phase_offset = config.lock.offset_rad
            if config.lock.phase == "amplification":
                phase_offset += phase_lock(target, crystal, geometry, media)

    grid = _make_grid(config, crystal, geometry, media, center)
    return ResolvedScenario(
        config=config,
        pump=pump,
        crystal=crystal,
        geometry=geometry,
        media=media,
        phase_offset=phase_offset,
        grid=grid,
    )


def _make_grid(config, crystal, geometry, media, center):
    gc = config.grid
    if isinstance(gc.span, float):
        half_span = gc.span
    elif gc.span == "fringe":
        k2 = d2k_domega2(media.gvd, center)
        w = math.sqrt(math.pi / (k2 * 10.0 * geometry.gvd_length_cm))
        half_span = (gc.span_scale or 1.0) * w
    else:  # envelope
        pm = _phase_matching_half_width(crystal, geometry.crystal_length_mm, center)
        base = max(pm, config.pump.bandwidth)
        half_span = (gc.span_scale or 5.0) * base
    return FrequencyGrid.make(center, half_span, gc.n)


# ---------------------------------------------------------------------------
# pipeline


@dataclass(frozen=True)
class GainResult:
    gain: float
    schmidt_number: float
    g2: float
    total_photons: float
    peaks: list
    width: Any
    nrf_value: Any
    bands_nm: Any
    spectrum: Any


@dataclass(frozen=True)
class ScenarioResult:
    config: ScenarioConfig
    resolved: ResolvedScenario
    lambdas: np.ndarray
    rank_kept: int
    method: str
    per_gain: list
    decomposition: Any = None
    tpa: Any = None

    def report_dict(self, timestamp=None) -> dict:
        cfg = self.config
        body = {
            "library_version": __version__,
            "material_table_version": load_material_table().version,
            "config": cfg.to_dict(),
            "config_hash": cfg.config_hash(),
            "solved": {
                "phase_matching_angle_deg": self.resolved.crystal.theta_deg,
                "pump_path_cm": self.resolved.geometry.pump_path_cm,
                "phase_offset_rad": self.resolved.phase_offset,
                "grid_n": self.resolved.grid.n,
                "grid_half_span_rad_fs": self.resolved.grid.half_span,
                "grid_delta_rad_fs": self.resolved.grid.delta,
            },
            "decomposition": {
                "rank_kept": self.rank_kept,
                "method": self.method,
                "lambdas": [float(x) for x in self.lambdas[:64]],
                "lambda_sum_kept": float(self.lambdas.sum()),
            },
            "per_gain": [
                {
                    "gain": g.gain,
                    "schmidt_number": g.schmidt_number,
                    "g2": g.g2,
                    "total_photons": g.total_photons,
                    "peaks_nm": [
                        {
                            "position_nm": p.position_nm,
                            "height": p.height,
                            "fwhm_nm": p.fwhm_nm,
                        }
                        for p in g.peaks
                    ],
                    "fwhm": (
                        None
                        if g.width is None
                        else {
                            "position_nm": g.width.position_nm,
                            "fwhm_nm": g.width.fwhm_nm,
                            "fwhm_rad_fs": g.width.fwhm_omega,
                        }
                    ),
                    "nrf": g.nrf_value,
                    "bands_nm": g.bands_nm,
                }
                for g in self.per_gain
            ],
        }
        report = {"report": body}
        text = json.dumps(report, sort_keys=True)
        report["report_hash"] = hashlib.sha256(text.encode()).hexdigest()
        if timestamp is not None:
            report["timestamp"] = timestamp  # excluded from report_hash
        return report


def _resolve_bands(config, spec, grid):
    """Concrete (band_s, band_i) in rad/fs from the observables config."""
    bands = config.observables.bands
    if bands is None:
        return None
    if bands == "split_at_minimum":
        peaks = find_peaks(
            spec,
            threshold=config.observables.peak_threshold,
            merge_gap=config.observables.peak_merge_gap or None,
        )
        if len(peaks) < 2:
            raise ValidationError(
                "bands = 'split_at_minimum' needs a two-peak spectrum "
                f"(found {len(peaks)} peaks)"
            )
        two = sorted(peaks[:2], key=lambda p: p.position_omega)
        omega = spec.omega
        i_lo = int(np.searchsorted(omega, two[0].position_omega))
        i_hi = int(np.searchsorted(omega, two[1].position_omega))
        i_min = i_lo + int(np.argmin(spec.values[i_lo : i_hi + 1]))
        divider = float(omega[i_min])
        delta = grid.delta
        return (
            SpectralBand(float(omega[0]), divider - 0.5 * delta),
            SpectralBand(divider + 0.5 * delta, float(omega[-1])),
        )
    (a, b), (c, d) = bands
    return SpectralBand.from_nm(a, b), SpectralBand.from_nm(c, d)


def run_resolved(resolved: ResolvedScenario) -> ScenarioResult:
    config = resolved.config
    check_edges = config.grid.span == "envelope"
    tpa = resolved.build(check_edges=check_edges)
    dc = config.decomposition
    dec = decompose(
        tpa,
        truncation_tol=dc.truncation_tol,
        max_rank=dc.max_rank or None,
        pair_tol=dc.pair_tol,
        method=dc.method,
    )
    per_gain = []
    for g in config.gains:
        state = gain_state(dec, g)
        spec = spectrum(dec, state, weights=config.observables.spectrum_weights)
        peaks = find_peaks(
            spec,
            threshold=config.observables.peak_threshold,
            merge_gap=config.observables.peak_merge_gap or None,
        )
        try:
            width = fwhm(
                spec, envelope_window=config.observables.fwhm_envelope_window or None
            )
        except BsvError:
            width = None
        nrf_value = None
        bands_nm = None
        band_pair = _resolve_bands(config, spec, resolved.grid)
        if band_pair is not None and g > 0:
            band_s, band_i = band_pair
            nrf_value = nrf(dec, state, band_s, band_i)
            bands_nm = [
                sorted((nm_from_omega(band_s.lower), nm_from_omega(band_s.upper))),
                sorted((nm_from_omega(band_i.lower), nm_from_omega(band_i.upper))),
            ]
        per_gain.append(
            GainResult(
                gain=g,
                schmidt_number=schmidt_number(state.Lambdas),
                g2=g2_integral(state),
                total_photons=state.total_photons,
                peaks=peaks,
                width=width,
                nrf_value=nrf_value,
                bands_nm=bands_nm,
                spectrum=spec,
            )
        )
    return ScenarioResult(
        config=config,
        resolved=resolved,
        lambdas=dec.lambdas,
        rank_kept=dec.rank_kept,
        method=dec.method,
        per_gain=per_gain,
        decomposition=dec,
        tpa=tpa,
    )


def run_scenario(config: ScenarioConfig) -> ScenarioResult:
    """Full deterministic pipeline for one scenario."""
    return run_resolved(resolve_scenario(config))


# ---------------------------------------------------------------------------
# sweeps


@dataclass(frozen=True)
class SweepSpec:
    """One-parameter sweep description.

    parameter: dotted path into the scenario document, e.g.
    "interferometer.gvd_length_cm" or "gain".  values: explicit list.
    relock=True re-solves pump path / phase lock / grid at every point;
    False freezes them at the base scenario and only rebuilds the
    amplitude (the micrometer-scale GVD scans need this).
    """

    parameter: str
    values: tuple
    relock: bool = True
    jobs: int = 1

    def __post_init__(self):
        if not self.values:
            raise ValidationError("sweep needs at least one value")
        if self.jobs < 1:
            raise ValidationError("sweep jobs must be >= 1")


@dataclass(frozen=True)
class SweepRow:
    value: float
    gain: float
    schmidt_number: float
    g2: float
    fwhm_nm: float
    nrf_value: Any
    error: str = ""


_FROZEN_GEOMETRY_PARAMS = {
    "interferometer.gvd_length_cm": "gvd_length_cm",
    "interferometer.air_gap_cm": "air_gap_cm",
    "interferometer.pump_path_cm": "pump_path_cm",
    "crystal.length_mm": "crystal_length_mm",
}


def _set_in_dict(d, path, value):
    parts = path.split(".")
    node = d
    for p in parts[:-1]:
        if p not in node or not isinstance(node[p], dict):
            raise ValidationError(f"sweep parameter path {path!r} does not resolve")
        node = node[p]
    if parts[-1] not in node and path != "gain":
        raise ValidationError(f"sweep parameter path {path!r} does not resolve")
    node[parts[-1]] = value


def _config_with_value(config: ScenarioConfig, parameter: str, value):
    rawdoc = json.loads(json.dumps(config.raw))  # deep copy
    if parameter == "gain":
        rawdoc["gain"]["values"] = [float(value)]
    else:
        _set_in_dict(rawdoc, parameter, float(value))
    cfg, errors = _validate_dict(rawdoc)
    if errors:
        raise ConfigError([f"sweep value {value}: {e}" for e in errors])
    return cfg


def _validate_dict(rawdoc):
    # tomlkit/tomli produce plain dicts; validate_config wants text, so emit TOML
    doc = tomlkit.document()
    for key, section in rawdoc.items():
        if isinstance(section, dict):
            tab = tomlkit.table()
            for k, v in section.items():
                if v is not None:
                    tab[k] = v
            doc[key] = tab
        else:
            doc[key] = section
    return validate_config(tomlkit.dumps(doc))


def _sweep_point(args):
    config, spec, value = args
    try:
        if spec.relock:
            cfg = _config_with_value(config, spec.parameter, value)
            result = run_scenario(cfg)
        else:
            result = _run_frozen_point(config, spec.parameter, value)
        rows = []
        for g in result.per_gain:
            rows.append(
                SweepRow(
                    value=float(value),
                    gain=g.gain,
                    schmidt_number=g.schmidt_number,
                    g2=g.g2,
                    fwhm_nm=(g.width.fwhm_nm if g.width is not None else float("nan")),
                    nrf_value=g.nrf_value,
                )
            )
        return rows
    except BsvError as exc:
        return [
            SweepRow(
                value=float(value),
                gain=float("nan"),
                schmidt_number=float("nan"),
                g2=float("nan"),
                fwhm_nm=float("nan"),
                nrf_value=None,
                error=f"{type(exc).__name__}: {exc}",
            )
        ]


_FROZEN_BASE_CACHE: dict = {}


def _run_frozen_point(config: ScenarioConfig, parameter: str, value):
    key = config.config_hash()
    base = _FROZEN_BASE_CACHE.get(key)
    if base is None:
        base = resolve_scenario(config)
        _FROZEN_BASE_CACHE.clear()
        _FROZEN_BASE_CACHE[key] = base
    if parameter == "gain":
        cfg = _config_with_value(config, "gain", value)
        resolved = ResolvedScenario(
            config=cfg,
            pump=base.pump,
            crystal=base.crystal,
            geometry=base.geometry,
            media=base.media,
            phase_offset=base.phase_offset,
            grid=base.grid,
        )
        return run_resolved(resolved)
    if parameter not in _FROZEN_GEOMETRY_PARAMS:
        raise ValidationError(
            f"frozen (relock=false) sweeps support gain and geometry parameters, "
            f"not {parameter!r}"
        )
    geom = base.geometry.replace(**{_FROZEN_GEOMETRY_PARAMS[parameter]: float(value)})
    resolved = ResolvedScenario(
        config=config,
        pump=base.pump,
        crystal=base.crystal,
        geometry=geom,
        media=base.media,
        phase_offset=base.phase_offset,
        grid=base.grid,
    )
    return run_resolved(resolved)


def run_sweep(config: ScenarioConfig, spec: SweepSpec):
    """Evaluate the scenario at each sweep value; per-point failures are
    recorded in the row's error field, not raised."""
    tasks = [(config, spec, v) for v in spec.values]
    if spec.jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=spec.jobs) as pool:
            nested = list(pool.map(_sweep_point, tasks))
    else:
        nested = [_sweep_point(t) for t in tasks]
    return [row for rows in nested for row in rows]


# ---------------------------------------------------------------------------
# analytic fringe period


def analytic_period(material, degenerate_wavelength_nm, table=None) -> float:
    """GVD-length period (um) of the amplification fringes at degeneracy.

    The modulation phase changes by (k_s + k_i)/2 per unit medium length,
    and the amplification pattern repeats when it advances by pi, so the
    period is 2 pi / (k_s + k_i) evaluated at the degenerate frequency.
    For vacuum this is half the degenerate wavelength.
    """
    if isinstance(material, str):
        table = table or load_material_table()
        material = table[material]
    omega = omega_from_nm(degenerate_wavelength_nm)
    k = wavevector(material, omega)
    period_mm = 2.0 * math.pi / (2.0 * k)
    return period_mm * 1e3
