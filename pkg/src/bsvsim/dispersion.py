"""Interferometer geometry, phase matching, wavevector mismatches.

The crystal is modeled as collinear degenerate type-I: the pump rides the
angle-tuned extraordinary branch, signal and idler the ordinary branch.
The phase-matching angle is solved once per crystal so that the mismatch
vanishes exactly at the degenerate frequency.

The interferometric phase phi(omega_s, omega_i) collects the air-gap and
GVD-medium terms: phi = (dk_air * d_a + k_p_air * d0 - k_s_gvd * d
- k_i_gvd * d) / 2, with all wavevectors in rad/mm and path lengths
converted from cm.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import BracketError
from .materials import (
    DK_REL_STEP,
    Material,
    MaterialTable,
    dk_domega,
    load_material_table,
    refractive_index,
    wavevector,
)
from .units import C_MM_FS, mm_from_cm, nm_from_omega


@dataclass(frozen=True)
class Geometry:
    """Interferometer path lengths.

    crystal_length_mm: length L of each nonlinear crystal (mm)
    gvd_length_cm:     length d of the GVD medium (cm)
    air_gap_cm:        length d_a shared by pump and down-converted light (cm)
    pump_path_cm:      additional pump path d0 (cm)
    """

    crystal_length_mm: float
    gvd_length_cm: float = 0.0
    air_gap_cm: float = 0.0
    pump_path_cm: float = 0.0

    def __post_init__(self):
        for field in ("crystal_length_mm", "gvd_length_cm", "air_gap_cm", "pump_path_cm"):
            if getattr(self, field) < 0:
                raise ValueError(f"{field} must be >= 0, got {getattr(self, field)}")

    def replace(self, **kw) -> "Geometry":
        from dataclasses import replace

        return replace(self, **kw)


class PhaseMatchedCrystal:
    """Uniaxial crystal tuned for collinear degenerate type-I down-conversion.

    Signal and idler propagate on the ordinary branch; the pump sees the
    angle-dependent extraordinary index

        n_e(theta, lam)^-2 = cos(theta)^2 / n_o(lam)^2 + sin(theta)^2 / n_e(lam)^2.

    theta is solved so that k_p(omega_p) = 2 k_o(omega_p / 2).
    """

    def __init__(self, ordinary: Material, extraordinary: Material, pump_omega):
        self.ordinary = ordinary
        self.extraordinary = extraordinary
        self.pump_omega = float(pump_omega)
        self.theta_rad = self._solve_angle()

    def _n_eff(self, theta, wavelength_nm):
        no = refractive_index(self.ordinary, wavelength_nm)
        ne = refractive_index(self.extraordinary, wavelength_nm)
        return 1.0 / np.sqrt(np.cos(theta) ** 2 / no**2 + np.sin(theta) ** 2 / ne**2)

    def _solve_angle(self):
        lam_p = nm_from_omega(self.pump_omega)
        n_target = refractive_index(self.ordinary, 2.0 * lam_p)

        def mismatch_at_degeneracy(theta):
            return self._n_eff(theta, lam_p) - n_target

        lo, hi = 0.0, np.pi / 2
        flo, fhi = mismatch_at_degeneracy(lo), mismatch_at_degeneracy(hi)
        if flo * fhi > 0:
            raise BracketError("phase-matching angle", lo, hi, flo, fhi)
        return brentq(mismatch_at_degeneracy, lo, hi, xtol=1e-14)

    @property
    def theta_deg(self):
        return float(np.degrees(self.theta_rad))

    def pump_wavevector(self, omega):
        """Extraordinary-branch pump wavevector at the tuned angle (rad/mm)."""
        om = np.asarray(omega, dtype=float)
        n = self._n_eff(self.theta_rad, nm_from_omega(om))
        k = n * om / C_MM_FS
        if k.ndim == 0:
            return float(k)
        return k

    def signal_wavevector(self, omega):
        """Ordinary-branch wavevector for signal/idler (rad/mm)."""
        return wavevector(self.ordinary, omega)

    def mismatch(self, omega_s, omega_i):
        """Collinear wavevector mismatch dk = k_p(ws + wi) - k_s(ws) - k_i(wi).

        Vanishes at (omega_p/2, omega_p/2) by construction of the angle.
        Units rad/mm; arguments broadcast.
        """
        return (
            self.pump_wavevector(np.asarray(omega_s) + np.asarray(omega_i))
            - self.signal_wavevector(omega_s)
            - self.signal_wavevector(omega_i)
        )


def crystal_mismatch(crystal: PhaseMatchedCrystal, omega_s, omega_i):
    """Free-function alias for :meth:`PhaseMatchedCrystal.mismatch`."""
    return crystal.mismatch(omega_s, omega_i)


@dataclass(frozen=True)
class InterferometerMedia:
    """Dispersive media the beams traverse between the two crystals."""

    gvd: Material
    air: Material

    @staticmethod
    def from_table(
        table: MaterialTable | None = None,
        gvd_name: str = "sf6",
        air_model: str = "vacuum",
    ) -> "InterferometerMedia":
        table = table or load_material_table()
        return InterferometerMedia(gvd=table[gvd_name], air=table[air_model])


def interferometer_phase(omega_s, omega_i, geometry: Geometry, media: InterferometerMedia):
    """Dispersive phase phi(omega_s, omega_i) of the interferometer (rad).

    phi = (dk_air * d_a + k_p_air * d0 - (k_s_gvd + k_i_gvd) * d) / 2,
    where dk_air = k_p_air - k_s_air - k_i_air and the pump wavevectors
    are evaluated at omega_s + omega_i. Linear in each path length.
    Arguments broadcast.
    """
    ws = np.asarray(omega_s, dtype=float)
    wi = np.asarray(omega_i, dtype=float)
    d = mm_from_cm(geometry.gvd_length_cm)
    d_a = mm_from_cm(geometry.air_gap_cm)
    d0 = mm_from_cm(geometry.pump_path_cm)

    k_p_air = wavevector(media.air, ws + wi)
    phi = k_p_air * d0
    if d_a != 0.0:
        dk_air = k_p_air - wavevector(media.air, ws) - wavevector(media.air, wi)
        phi = phi + dk_air * d_a
    if d != 0.0:
        phi = phi - (wavevector(media.gvd, ws) + wavevector(media.gvd, wi)) * d
    phi = 0.5 * phi
    if np.ndim(omega_s) == 0 and np.ndim(omega_i) == 0:
        return float(phi)
    return phi


def phase_derivative_signal(
    omega_s, omega_i, geometry: Geometry, media: InterferometerMedia, rel_step=DK_REL_STEP
):
    """d phi / d omega_s at fixed omega_i (fs), by central difference."""
    h = rel_step * float(omega_s)
    up = interferometer_phase(omega_s + h, omega_i, geometry, media)
    dn = interferometer_phase(omega_s - h, omega_i, geometry, media)
    return (up - dn) / (2.0 * h)


def find_pump_path(
    target_omega,
    geometry: Geometry,
    media: InterferometerMedia,
    pump_omega,
    bracket_cm=None,
):
    """Pump path d0 (cm) that group-matches the pump to a chosen frequency.

    Solves d phi / d omega_s = 0 at (omega_s = target, omega_i =
    omega_p - target): the pump delay then compensates the group delay
    the GVD medium imposes on that spectral component, so the two
    overlap in time in the second crystal. Deterministic bracketed root
    find; the geometry's own pump_path_cm is ignored.
    """
    target_omega = float(target_omega)
    conjugate = float(pump_omega) - target_omega

    def deriv(d0_cm):
        g = geometry.replace(pump_path_cm=d0_cm)
        return phase_derivative_signal(target_omega, conjugate, g, media)

    if bracket_cm is None:
        # Analytic estimate for vacuum-like air: d0 ~ c k'_gvd(target) d [+ air-gap term]
        est = (
            C_MM_FS
            * (
                dk_domega(media.gvd, target_omega) * mm_from_cm(geometry.gvd_length_cm)
                + dk_domega(media.air, target_omega) * mm_from_cm(geometry.air_gap_cm)
            )
            / 10.0
        )
        lo = 0.0
        hi = max(2.0 * est, est + 10.0, 10.0)
    else:
        lo, hi = bracket_cm

    flo, fhi = deriv(lo), deriv(hi)
    for _ in range(8):
        if flo * fhi <= 0:
            break
        hi *= 2.0
        fhi = deriv(hi)
    else:
        raise BracketError("d phi / d omega_s (pump path)", lo, hi, flo, fhi)
    return float(brentq(deriv, lo, hi, xtol=1e-12))
