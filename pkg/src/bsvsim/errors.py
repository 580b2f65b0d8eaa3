"""Exception hierarchy for bsvsim.

Validation problems (bad configs, bad inputs) and numerical problems
(root finding, decomposition failures) are kept in separate branches so
the CLI can map them to distinct exit codes.
"""


class BsvError(Exception):
    """Base class for all bsvsim errors."""


class ValidationError(BsvError):
    """Invalid user input: configs, bands, preconditions."""


class ConfigError(ValidationError):
    """Scenario config failed validation.

    Carries the full list of errors, one per offending field, each
    prefixed with its dotted field path.
    """

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("invalid scenario config:\n  " + "\n  ".join(self.errors))


class WavelengthRangeError(ValidationError):
    """Wavelength outside a material's Sellmeier validity range."""

    def __init__(self, material, wavelength_um, valid_range_um):
        self.material = material
        self.wavelength_um = wavelength_um
        self.valid_range_um = valid_range_um
        super().__init__(
            f"wavelength {wavelength_um:.4f} um outside valid range "
            f"[{valid_range_um[0]}, {valid_range_um[1]}] um of material {material!r}"
        )


class BandError(ValidationError):
    """Spectral band outside the grid, empty, or overlapping where forbidden."""


class DegeneracyError(ValidationError):
    """Mode pair is not degenerate enough for a pair operation."""

    def __init__(self, n, lam_n, lam_next, rel_gap, tol):
        self.rel_gap = rel_gap
        super().__init__(
            f"modes ({n}, {n + 1}) are not a degenerate pair: "
            f"lambda={lam_n:.6e} vs {lam_next:.6e}, "
            f"|gap|/lambda={rel_gap:.3e} exceeds tol={tol:.1e}"
        )


class ProvenanceError(ValidationError):
    """Decomposition and gain state built from different weight spectra."""


class UndefinedObservableError(ValidationError):
    """Observable undefined for the given state (e.g. NRF at zero gain)."""


class NumericalError(BsvError):
    """Numerical procedure failed (root bracketing, SVD, ...)."""


class BracketError(NumericalError):
    """Root finder found no sign change in the searched interval."""

    def __init__(self, what, lo, hi, flo, fhi):
        self.interval = (lo, hi)
        super().__init__(
            f"no root of {what} in [{lo:.6g}, {hi:.6g}] "
            f"(f(lo)={flo:.6g}, f(hi)={fhi:.6g})"
        )


class DecompositionError(NumericalError):
    """Schmidt decomposition failed."""


class EdgeError(NumericalError):
    """Peak width undefined: no half-maximum crossings inside the grid."""
