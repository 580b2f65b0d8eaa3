"""Material dispersion: Sellmeier formulas, wavevectors, group quantities.

Refractive indices come from a versioned JSON table shipped with the
package (coefficients stored as decimal strings, parsed once at load).
Evaluation outside a material's validity range raises
:class:`~bsvsim.errors.WavelengthRangeError`; there is no extrapolation.

Units: wavelengths in um inside the formulas, angular frequencies in
rad/fs, wavevectors in rad/mm, so dk/domega is fs/mm and d2k/domega2 is
fs^2/mm.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

import numpy as np

from .errors import WavelengthRangeError
from .units import C_MM_FS, um_from_omega

# Relative finite-difference steps (fraction of the evaluation frequency).
# First derivatives tolerate a small step; second derivatives need a larger
# one to stay clear of cancellation noise in k ~ 1e4 rad/mm.
DK_REL_STEP = 1e-6
D2K_REL_STEP = 1e-3


@dataclass(frozen=True)
class Material:
    """One entry of the dispersion table.

    coefficients are the parsed Sellmeier coefficients in the order the
    formula variant expects; valid_range_um is the inclusive wavelength
    interval, or None for an unbounded model (vacuum).
    """

    name: str
    formula_variant: str
    coefficients: tuple
    valid_range_um: tuple | None
    source: str = ""

    def check_range(self, wavelength_um):
        if self.valid_range_um is None:
            return
        lam = np.atleast_1d(np.asarray(wavelength_um, dtype=float))
        lo, hi = self.valid_range_um
        bad = (lam < lo) | (lam > hi) | ~np.isfinite(lam)
        if np.any(bad):
            offender = float(lam[bad][0])
            raise WavelengthRangeError(self.name, offender, self.valid_range_um)


def _n_sellmeier_rational(c, lam_um):
    # n^2 = c0 + c1 / (lam^2 - c2) + c3 lam^2
    lam2 = lam_um**2
    return np.sqrt(c[0] + c[1] / (lam2 - c[2]) + c[3] * lam2)


def _n_sellmeier_three_term(c, lam_um):
    # n^2 - 1 = sum_i B_i lam^2 / (lam^2 - C_i); c = (B1, C1, B2, C2, B3, C3)
    lam2 = lam_um**2
    n2 = 1.0
    for i in range(0, 6, 2):
        n2 = n2 + c[i] * lam2 / (lam2 - c[i + 1])
    return np.sqrt(n2)


def _n_constant(c, lam_um):
    return c[0] * np.ones_like(np.asarray(lam_um, dtype=float))


def _n_air_peck_reeder(c, lam_um):
    # (n - 1) * 1e8 = c0 + c1 / (c2 - sigma^2) + c3 / (c4 - sigma^2), sigma = 1/lam
    sigma2 = 1.0 / np.asarray(lam_um, dtype=float) ** 2
    return 1.0 + 1e-8 * (c[0] + c[1] / (c[2] - sigma2) + c[3] / (c[4] - sigma2))


_FORMULAS = {
    "sellmeier_rational": _n_sellmeier_rational,
    "sellmeier_three_term": _n_sellmeier_three_term,
    "constant": _n_constant,
    "air_peck_reeder": _n_air_peck_reeder,
}


class MaterialTable:
    """Read-only dispersion table keyed by material name."""

    def __init__(self, materials, version):
        self._materials = dict(materials)
        self.version = version

    def __getitem__(self, name) -> Material:
        try:
            return self._materials[name]
        except KeyError:
            known = ", ".join(sorted(self._materials))
            raise KeyError(f"unknown material {name!r}; table has: {known}") from None

    def __contains__(self, name):
        return name in self._materials

    def names(self):
        return sorted(self._materials)


@lru_cache(maxsize=1)
def load_material_table() -> MaterialTable:
    """Load the bundled material table (cached; the table is immutable)."""
    text = resources.files("bsvsim.data").joinpath("materials.json").read_text()
    raw = json.loads(text)
    mats = {}
    for entry in raw["materials"]:
        rng = entry["valid_range_um"]
        mats[entry["name"]] = Material(
            name=entry["name"],
            formula_variant=entry["formula_variant"],
            coefficients=tuple(float(x) for x in entry["coefficients"]),
            valid_range_um=tuple(rng) if rng is not None else None,
            source=entry.get("source", ""),
        )
    return MaterialTable(mats, raw["version"])


def refractive_index(material: Material, wavelength_nm):
    """n(lambda) for a vacuum wavelength in nm. Array-friendly."""
    lam_um = np.asarray(wavelength_nm, dtype=float) * 1e-3
    material.check_range(lam_um)
    n = _FORMULAS[material.formula_variant](material.coefficients, lam_um)
    if n.ndim == 0:
        return float(n)
    return n


def _index_at_omega(material: Material, omega, check=True):
    lam_um = um_from_omega(np.asarray(omega, dtype=float))
    if check:
        material.check_range(lam_um)
    return _FORMULAS[material.formula_variant](material.coefficients, lam_um)


def wavevector(material: Material, omega):
    """k = n(omega) * omega / c in rad/mm, omega in rad/fs."""
    om = np.asarray(omega, dtype=float)
    k = _index_at_omega(material, om) * om / C_MM_FS
    if k.ndim == 0:
        return float(k)
    return k


def dk_domega(material: Material, omega, rel_step=DK_REL_STEP):
    """Inverse group velocity dk/domega (fs/mm) by central difference.

    The stencil points must stay inside the validity range; a range
    error is raised otherwise.
    """
    om = np.asarray(omega, dtype=float)
    h = rel_step * om
    kp = wavevector(material, om + h)
    km = wavevector(material, om - h)
    d = (kp - km) / (2.0 * h)
    if np.ndim(omega) == 0:
        return float(d)
    return d


def group_velocity(material: Material, omega, rel_step=DK_REL_STEP):
    """Group velocity v_g = (dk/domega)^-1 in mm/fs."""
    return 1.0 / dk_domega(material, omega, rel_step=rel_step)


def group_index(material: Material, omega, rel_step=DK_REL_STEP):
    """Group index n_g = c / v_g (dimensionless)."""
    return C_MM_FS * dk_domega(material, omega, rel_step=rel_step)


def d2k_domega2(material: Material, omega, rel_step=D2K_REL_STEP):
    """Group-velocity dispersion d2k/domega2 (fs^2/mm), central 3-point."""
    om = np.asarray(omega, dtype=float)
    h = rel_step * om
    k0 = wavevector(material, om)
    kp = wavevector(material, om + h)
    km = wavevector(material, om - h)
    d2 = (kp - 2.0 * k0 + km) / h**2
    if np.ndim(omega) == 0:
        return float(d2)
    return d2
