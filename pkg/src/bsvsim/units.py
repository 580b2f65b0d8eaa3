"""Unit conventions and conversions.

Canonical internal units:

* angular frequency: rad/fs
* length inside crystals and for wavevectors: mm  (k in rad/mm)
* GVD / air path lengths at interfaces: cm, converted to mm internally
* wavelengths at interfaces: nm (configs) or um (Sellmeier formulas)

Derived: k' = dk/domega in fs/mm, k'' in fs^2/mm (the usual GVD unit).
"""

from __future__ import annotations

import math

# speed of light
C_MM_FS = 2.99792458e-4  # mm/fs
C_NM_FS = 299.792458  # nm/fs
C_UM_FS = 0.299792458  # um/fs

_TWO_PI_C_NM = 2.0 * math.pi * C_NM_FS  # nm * rad/fs


def omega_from_nm(wavelength_nm):
    """Angular frequency (rad/fs) of a vacuum wavelength in nm."""
    return _TWO_PI_C_NM / wavelength_nm


def nm_from_omega(omega_rad_fs):
    """Vacuum wavelength (nm) of an angular frequency in rad/fs."""
    return _TWO_PI_C_NM / omega_rad_fs


def um_from_omega(omega_rad_fs):
    """Vacuum wavelength (um) of an angular frequency in rad/fs."""
    return _TWO_PI_C_NM / omega_rad_fs * 1e-3


def mm_from_cm(length_cm):
    return length_cm * 10.0


def tau_from_fwhm_ps(fwhm_intensity_ps):
    """Pulse duration parameter tau (fs) from the intensity FWHM in ps.

    The Gaussian pump envelope exp(-t^2 / (2 tau^2)) has an intensity
    FWHM of 2 sqrt(ln 2) tau.
    """
    return 1e3 * fwhm_intensity_ps / (2.0 * math.sqrt(math.log(2.0)))


def fwhm_ps_from_tau(tau_fs):
    """Intensity FWHM (ps) of a Gaussian pulse with duration parameter tau (fs)."""
    return 2.0 * math.sqrt(math.log(2.0)) * tau_fs * 1e-3
