"""Two-photon (joint spectral) amplitude construction.

The single-crystal amplitude on a uniform frequency grid is

    F = C exp(-(ws + wi - wp)^2 / (2 Omega^2)) sinc(dk L / 2) exp(-i dk L / 2)

with sinc(x) = sin(x)/x, dk the collinear crystal mismatch and C fixed by
the discrete L2 normalization sum |F|^2 dw^2 = 1.  The two-crystal
interferometer multiplies in cos(Theta) exp(-i Theta) with

    Theta = (dk L + dk_air d_a + k_p_air d0 - (k_s_gvd + k_i_gvd) d) / 2 + theta_lock,

where theta_lock is an optional scalar phase-lock offset.

Grids are symmetric about the degenerate frequency so the signal/idler
exchange maps grid points onto grid points exactly.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .dispersion import Geometry, InterferometerMedia, PhaseMatchedCrystal
from .errors import ValidationError
from .units import mm_from_cm, nm_from_omega, omega_from_nm

log = logging.getLogger(__name__)

EDGE_DECAY_TARGET = 1e-4


@dataclass(frozen=True)
class PumpConfig:
    """Gaussian pump pulse: wavelength (nm) and duration parameter tau (fs).

    The spectral amplitude bandwidth is Omega = 1/tau (rad/fs); the
    intensity FWHM of the pulse is 2 sqrt(ln 2) tau.
    """

    wavelength_nm: float
    tau_fs: float

    def __post_init__(self):
        if self.wavelength_nm <= 0:
            raise ValidationError("pump wavelength must be positive")
        if self.tau_fs <= 0:
            raise ValidationError("pump tau must be positive")

    @property
    def omega_p(self):
        """Pump carrier angular frequency (rad/fs)."""
        return omega_from_nm(self.wavelength_nm)

    @property
    def bandwidth(self):
        """Spectral amplitude bandwidth Omega = 1/tau (rad/fs)."""
        return 1.0 / self.tau_fs


@dataclass(frozen=True)
class FrequencyGrid:
    """Uniform signal/idler angular-frequency axes, symmetric about wp/2."""

    omega_s: np.ndarray
    omega_i: np.ndarray
    center: float

    @staticmethod
    def make(center, half_span, n) -> "FrequencyGrid":
        """Grid of n points covering center +- half_span (rad/fs)."""
        if n < 2:
            raise ValidationError("grid needs at least 2 points")
        if half_span <= 0:
            raise ValidationError("grid half_span must be positive")
        axis = center + np.linspace(-half_span, half_span, int(n))
        return FrequencyGrid(omega_s=axis, omega_i=axis.copy(), center=float(center))

    @property
    def n(self):
        return self.omega_s.size

    @property
    def delta(self):
        """Grid spacing (rad/fs)."""
        return float(self.omega_s[1] - self.omega_s[0])

    @property
    def half_span(self):
        return float(self.omega_s[-1] - self.omega_s[0]) / 2.0

    @property
    def wavelength_nm(self):
        """Signal axis as vacuum wavelengths (nm), descending as omega ascends."""
        return nm_from_omega(self.omega_s)

    def reflect_index(self):
        """Index permutation implementing omega -> 2*center - omega."""
        return np.arange(self.n)[::-1]

    def validate_symmetry(self, atol=1e-9):
        s = self.omega_s
        if not np.allclose(np.diff(s), self.delta, rtol=0, atol=atol):
            raise ValidationError("grid is not uniform")
        if not np.allclose(s + s[::-1], 2.0 * self.center, rtol=0, atol=atol):
            raise ValidationError("grid is not symmetric about its center")
        if not np.array_equal(self.omega_s, self.omega_i):
            raise ValidationError("signal and idler axes must coincide")


@dataclass(frozen=True)
class JointSpectralAmplitude:
    """Normalized complex two-photon amplitude on a frequency grid.

    values[j, k] = F(omega_s[j], omega_i[k]); after construction
    sum |F|^2 delta^2 = 1.
    """

    grid: FrequencyGrid
    values: np.ndarray
    normalization: str = "l2"
    meta: dict = field(default_factory=dict)

    @staticmethod
    def from_values(grid, values, normalize=True, meta=None) -> "JointSpectralAmplitude":
        values = np.asarray(values, dtype=complex)
        if values.shape != (grid.n, grid.n):
            raise ValidationError(
                f"amplitude shape {values.shape} does not match grid ({grid.n})"
            )
        if not np.all(np.isfinite(values.view(float))):
            raise ValidationError("amplitude contains NaN or infinity")
        tag = "l2"
        if normalize:
            norm = np.sqrt(np.sum(np.abs(values) ** 2) * grid.delta**2)
            if norm == 0.0:
                raise ValidationError("amplitude is identically zero")
            values = values / norm
        else:
            tag = "raw"
        return JointSpectralAmplitude(grid=grid, values=values, normalization=tag,
                                      meta=dict(meta or {}))

    def marginal_signal(self):
        """Signal marginal of |F|^2, integrated over the idler axis."""
        return np.sum(np.abs(self.values) ** 2, axis=1) * self.grid.delta

    def edge_decay(self):
        """Largest marginal edge value relative to the marginal peak."""
        m = self.marginal_signal()
        peak = float(m.max())
        if peak == 0.0:
            return 0.0
        return float(max(m[0], m[-1]) / peak)


def _sum_gather(grid: FrequencyGrid, fn):
    """fn over the 2n-1 distinct values of ws + wi, gathered to a matrix.

    On a uniform grid ws_j + wi_k depends only on j + k; evaluating the
    dispersive factors once per distinct sum cuts the build cost and
    makes the result exactly symmetric under index exchange.
    """
    axis_s, axis_i = grid.omega_s, grid.omega_i
    sums = np.concatenate([axis_s[0] + axis_i, axis_s[1:] + axis_i[-1]])
    values = np.asarray(fn(sums))
    idx = np.add.outer(np.arange(grid.n), np.arange(grid.n))
    return values[idx]


def _pump_envelope_on_sums(grid: FrequencyGrid, pump: PumpConfig):
    return _sum_gather(
        grid,
        lambda s: np.exp(-((s - pump.omega_p) ** 2) / (2.0 * pump.bandwidth**2)),
    )


def _mismatch_on_grid(grid: FrequencyGrid, crystal: PhaseMatchedCrystal):
    k_signal = crystal.signal_wavevector(grid.omega_s)
    return (
        _sum_gather(grid, crystal.pump_wavevector)
        - k_signal[:, None]
        - k_signal[None, :]
    )


def _sinc(x):
    # sin(x)/x with sinc(0) = 1; numpy's sinc is the normalized variant
    return np.sinc(x / np.pi)


def _check_edges(tpa: JointSpectralAmplitude, what):
    decay = tpa.edge_decay()
    if decay > EDGE_DECAY_TARGET:
        log.warning(
            "%s: marginal decays only to %.2e of peak at the grid edge "
            "(target %.0e); consider a wider grid span",
            what,
            decay,
            EDGE_DECAY_TARGET,
        )


def build_single_crystal_tpa(
    grid: FrequencyGrid,
    pump: PumpConfig,
    crystal: PhaseMatchedCrystal,
    crystal_length_mm: float,
    normalize=True,
    check_edges=True,
) -> JointSpectralAmplitude:
    """Single-crystal two-photon amplitude (envelope x sinc x phase)."""
    grid.validate_symmetry()
    arg = 0.5 * _mismatch_on_grid(grid, crystal) * crystal_length_mm
    values = _pump_envelope_on_sums(grid, pump) * _sinc(arg) * np.exp(-1j * arg)
    tpa = JointSpectralAmplitude.from_values(
        grid,
        values,
        normalize=normalize,
        meta={"kind": "single_crystal", "crystal_length_mm": crystal_length_mm},
    )
    if check_edges:
        _check_edges(tpa, "single-crystal amplitude")
    return tpa


def _modulation_argument(
    grid: FrequencyGrid,
    crystal: PhaseMatchedCrystal,
    geometry: Geometry,
    media: InterferometerMedia,
    phase_offset=0.0,
):
    """Theta(ws, wi): half the accumulated two-crystal phase difference."""
    from .materials import wavevector

    theta = _mismatch_on_grid(grid, crystal) * geometry.crystal_length_mm

    d0 = mm_from_cm(geometry.pump_path_cm)
    d_a = mm_from_cm(geometry.air_gap_cm)
    d = mm_from_cm(geometry.gvd_length_cm)

    k_p_air = _sum_gather(grid, lambda s: wavevector(media.air, s))
    theta = theta + k_p_air * d0
    if d_a != 0.0:
        k_air = wavevector(media.air, grid.omega_s)
        theta = theta + (k_p_air - k_air[:, None] - k_air[None, :]) * d_a
    if d != 0.0:
        k_gvd = wavevector(media.gvd, grid.omega_s)
        theta = theta - (k_gvd[:, None] + k_gvd[None, :]) * d
    return 0.5 * theta + phase_offset


def modulation_argument_at(
    omega_s,
    omega_i,
    crystal: PhaseMatchedCrystal,
    geometry: Geometry,
    media: InterferometerMedia,
    phase_offset=0.0,
):
    """Scalar Theta at one frequency pair (rad)."""
    from .materials import wavevector

    dk = crystal.mismatch(omega_s, omega_i)
    theta = dk * geometry.crystal_length_mm
    s = omega_s + omega_i
    theta += wavevector(media.air, s) * mm_from_cm(geometry.pump_path_cm)
    if geometry.air_gap_cm != 0.0:
        dk_air = (
            wavevector(media.air, s)
            - wavevector(media.air, omega_s)
            - wavevector(media.air, omega_i)
        )
        theta += dk_air * mm_from_cm(geometry.air_gap_cm)
    if geometry.gvd_length_cm != 0.0:
        theta -= (
            wavevector(media.gvd, omega_s) + wavevector(media.gvd, omega_i)
        ) * mm_from_cm(geometry.gvd_length_cm)
    return 0.5 * float(theta) + phase_offset


def phase_lock(
    lock_omega,
    crystal: PhaseMatchedCrystal,
    geometry: Geometry,
    media: InterferometerMedia,
    offset=0.0,
):
    """Scalar phase making Theta(lock_omega, wp - lock_omega) = offset mod 2 pi.

    Returned value is added inside Theta by the interferometer builder; it
    plays the role of a sub-fringe pump-path trim, so the group-delay
    condition set by the pump path is untouched.  offset = 0 locks to
    amplification (cos Theta = 1); offset = pi/2 locks to the dark fringe.
    """
    conjugate = crystal.pump_omega - lock_omega
    raw = modulation_argument_at(lock_omega, conjugate, crystal, geometry, media)
    lock = (offset - raw) % (2.0 * np.pi)
    if lock > np.pi:
        lock -= 2.0 * np.pi
    return float(lock)


def build_interferometer_tpa(
    grid: FrequencyGrid,
    pump: PumpConfig,
    crystal: PhaseMatchedCrystal,
    geometry: Geometry,
    media: InterferometerMedia,
    phase_offset=0.0,
    include_modulation=True,
    normalize=True,
    check_edges=True,
) -> JointSpectralAmplitude:
    """Two-crystal (SU(1,1)) amplitude: single-crystal form times cos(Theta) e^{-i Theta}.

    include_modulation=False drops the cosine term and its phase, leaving
    the single-crystal modulus envelope (test hook).
    """
    grid.validate_symmetry()
    arg = 0.5 * _mismatch_on_grid(grid, crystal) * geometry.crystal_length_mm
    values = _pump_envelope_on_sums(grid, pump) * _sinc(arg) * np.exp(-1j * arg)
    if include_modulation:
        theta = _modulation_argument(grid, crystal, geometry, media, phase_offset)
        values = values * np.cos(theta) * np.exp(-1j * theta)
    tpa = JointSpectralAmplitude.from_values(
        grid,
        values,
        normalize=normalize,
        meta={
            "kind": "interferometer",
            "crystal_length_mm": geometry.crystal_length_mm,
            "gvd_length_cm": geometry.gvd_length_cm,
            "air_gap_cm": geometry.air_gap_cm,
            "pump_path_cm": geometry.pump_path_cm,
            "phase_offset_rad": float(phase_offset),
            "modulated": bool(include_modulation),
        },
    )
    if check_edges:
        _check_edges(tpa, "interferometer amplitude")
    return tpa
