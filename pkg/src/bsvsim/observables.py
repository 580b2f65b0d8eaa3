"""Observables of the multimode squeezed state.

Spectra are incoherent mode sums sum_n w_n |u_n(w)|^2 with either the
gain-redistributed weights Lambda_n (shape, integrates to one) or the
raw mean photon numbers sinh^2 r_n.

Band photon statistics use Gaussian-state moment algebra over the mode
operators: with occupations M_n = sinh^2 r_n and anomalous correlators
S_n = exp(i chi_n) sinh r_n cosh r_n, the mean and covariance of photon
numbers in bands W, V are

    <N_W>        = sum_n O^W_nn M_n
    Cov(N_W,N_V) = sum_nm conj(S_n) S_m O^W_nm O^V_nm          (pairing)
                 + sum_n  O^(W&V)_nn M_n                        (shot)
                 + sum_nm M_n M_m O^W_nm O^V_mn                 (thermal)

where O^X_nm = sum_{w in X} conj(u_n(w)) u_m(w) dw is the band overlap
matrix and O^(W&V) uses the band intersection.  The shot term with the
intersection overlap is exact even under mode truncation (the dropped
vacuum modes enter only through it).  This algebra is validated against
a brute-force Fock-space oracle in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    BandError,
    EdgeError,
    ProvenanceError,
    UndefinedObservableError,
    ValidationError,
)
from .schmidt import GainState, SchmidtDecomposition, schmidt_number
from .units import nm_from_omega


@dataclass(frozen=True)
class SpectralBand:
    """Closed angular-frequency interval [lower, upper] in rad/fs."""

    lower: float
    upper: float

    def __post_init__(self):
        if not (self.lower < self.upper):
            raise BandError(f"band needs lower < upper, got [{self.lower}, {self.upper}]")

    @staticmethod
    def from_nm(lower_nm, upper_nm) -> "SpectralBand":
        """Band from a wavelength interval (nm); order is normalized."""
        a, b = nm_from_omega(float(lower_nm)), nm_from_omega(float(upper_nm))
        return SpectralBand(lower=min(a, b), upper=max(a, b))

    def indices(self, omega):
        mask = (omega >= self.lower) & (omega <= self.upper)
        idx = np.nonzero(mask)[0]
        if idx.size == 0:
            raise BandError(
                f"band [{self.lower:.6g}, {self.upper:.6g}] rad/fs contains no grid point"
            )
        return idx

    def check_inside(self, omega):
        if self.lower < omega[0] - 1e-12 or self.upper > omega[-1] + 1e-12:
            raise BandError(
                f"band [{self.lower:.6g}, {self.upper:.6g}] exceeds the grid "
                f"[{omega[0]:.6g}, {omega[-1]:.6g}]"
            )


@dataclass(frozen=True)
class Spectrum:
    """Mean photon-number density over the signal axis."""

    omega: np.ndarray
    values: np.ndarray
    weights: str  # "redistributed" | "photons"
    normalization: str  # "integral" | "peak" | "raw"

    @property
    def wavelength_nm(self):
        return nm_from_omega(self.omega)

    @property
    def delta(self):
        return float(self.omega[1] - self.omega[0])

    def peak_normalized(self) -> "Spectrum":
        peak = float(self.values.max())
        if peak <= 0:
            raise ValidationError("cannot peak-normalize an empty spectrum")
        return replace(self, values=self.values / peak, normalization="peak")

    def smoothed(self, window_omega) -> "Spectrum":
        """Moving-average envelope over a window in rad/fs (odd sample count)."""
        w = max(1, int(round(window_omega / self.delta)))
        if w % 2 == 0:
            w += 1
        if w <= 1:
            return self
        kernel = np.ones(w) / w
        sm = np.convolve(self.values, kernel, mode="same")
        # compensate shrinking window at the edges
        norm = np.convolve(np.ones_like(self.values), kernel, mode="same")
        return replace(self, values=sm / norm)


def _check_provenance(decomp: SchmidtDecomposition, state: GainState):
    if state.lambda_fingerprint and state.lambda_fingerprint != decomp.fingerprint:
        raise ProvenanceError(
            "gain state was built from a different weight spectrum than the decomposition"
        )


def spectrum(
    decomp: SchmidtDecomposition,
    state: GainState,
    weights="redistributed",
    normalization=None,
) -> Spectrum:
    """Signal spectrum sum_n w_n |u_n(w)|^2.

    weights="redistributed" uses Lambda_n (the curve integrates to one);
    "photons" uses sinh^2 r_n (integral = total mean photon number).
    normalization="peak" rescales to unit maximum.
    """
    _check_provenance(decomp, state)
    if weights == "redistributed":
        w = state.Lambdas
        tag = "integral"
    elif weights == "photons":
        w = state.mean_photons
        tag = "raw"
    else:
        raise ValidationError(f"unknown spectrum weights {weights!r}")
    values = np.einsum("n,nj->j", w, np.abs(decomp.modes_s) ** 2)
    spec = Spectrum(
        omega=decomp.grid.omega_s, values=values, weights=weights, normalization=tag
    )
    if normalization == "peak":
        spec = spec.peak_normalized()
    return spec


# ---------------------------------------------------------------------------
# peaks and widths


@dataclass(frozen=True)
class Peak:
    """One detected spectral peak with its linear-interpolated FWHM."""

    position_omega: float
    position_nm: float
    height: float
    fwhm_omega: float
    fwhm_nm: float


def find_peaks(spec: Spectrum, threshold=0.1, merge_gap=None):
    """Peaks as contiguous super-threshold regions, fringe clusters merged.

    threshold is relative to the global maximum.  Regions separated by a
    gap narrower than merge_gap (rad/fs; default 2.5% of the grid span)
    are treated as one modulated peak, so fringe substructure does not
    multiply the count.  Returns a list of Peak, descending by height.
    """
    v = spec.values
    omega = spec.omega
    peak = float(v.max())
    if peak <= 0:
        return []
    if merge_gap is None:
        merge_gap = 0.025 * float(omega[-1] - omega[0])
    above = v >= threshold * peak
    regions = []
    i = 0
    n = v.size
    while i < n:
        if above[i]:
            j = i
            while j + 1 < n and above[j + 1]:
                j += 1
            regions.append([i, j])
            i = j + 1
        else:
            i += 1
    if not regions:
        return []
    gap_samples = max(1, int(round(merge_gap / spec.delta)))
    merged = [regions[0]]
    for lo, hi in regions[1:]:
        if lo - merged[-1][1] - 1 < gap_samples:
            merged[-1][1] = hi
        else:
            merged.append([lo, hi])
    peaks = []
    for lo, hi in merged:
        k = lo + int(np.argmax(v[lo : hi + 1]))
        pos = _refine_parabolic(omega, v, k)
        width_w = _half_width(omega, v, k)
        lam_hi = nm_from_omega(pos - width_w / 2.0) if width_w else float("nan")
        lam_lo = nm_from_omega(pos + width_w / 2.0) if width_w else float("nan")
        peaks.append(
            Peak(
                position_omega=pos,
                position_nm=float(nm_from_omega(pos)),
                height=float(v[k]),
                fwhm_omega=width_w if width_w else float("nan"),
                fwhm_nm=abs(lam_hi - lam_lo) if width_w else float("nan"),
            )
        )
    peaks.sort(key=lambda p: -p.height)
    return peaks


def _refine_parabolic(omega, v, k):
    if 0 < k < v.size - 1:
        y0, y1, y2 = v[k - 1], v[k], v[k + 1]
        denom = y0 - 2 * y1 + y2
        if denom < 0:
            shift = 0.5 * (y0 - y2) / denom
            if abs(shift) <= 1.0:
                return float(omega[k] + shift * (omega[1] - omega[0]))
    return float(omega[k])


def _half_width(omega, v, k):
    """Linear-interpolated width at half the height of sample k, or None."""
    half = v[k] / 2.0
    left = None
    for j in range(k, 0, -1):
        if v[j - 1] <= half:
            frac = (v[j] - half) / (v[j] - v[j - 1])
            left = omega[j] - frac * (omega[j] - omega[j - 1])
            break
    right = None
    for j in range(k, v.size - 1):
        if v[j + 1] <= half:
            frac = (v[j] - half) / (v[j] - v[j + 1])
            right = omega[j] + frac * (omega[j + 1] - omega[j])
            break
    if left is None or right is None:
        return None
    return float(right - left)


def fwhm(spec: Spectrum, envelope_window=None) -> Peak:
    """FWHM of the global peak (both rad/fs and nm).

    envelope_window (rad/fs), when given, first smooths the curve with a
    moving average so fringe substructure reports the envelope width.
    Raises EdgeError when a half-maximum crossing is missing on either
    side (peak too close to the grid edge).
    """
    if envelope_window:
        spec = spec.smoothed(envelope_window)
    k = int(np.argmax(spec.values))
    width = _half_width(spec.omega, spec.values, k)
    if width is None:
        raise EdgeError(
            "no half-maximum crossing inside the grid; "
            "peak truncated at the edge or spectrum too flat"
        )
    pos = _refine_parabolic(spec.omega, spec.values, k)
    lam_a = nm_from_omega(pos - width / 2.0)
    lam_b = nm_from_omega(pos + width / 2.0)
    return Peak(
        position_omega=pos,
        position_nm=float(nm_from_omega(pos)),
        height=float(spec.values[k]),
        fwhm_omega=width,
        fwhm_nm=float(abs(lam_a - lam_b)),
    )


# ---------------------------------------------------------------------------
# integral statistics


def g2_integral(state: GainState) -> float:
    """Integral-spectrum second-order correlation, 1 + 2/K (shared beam)."""
    k = schmidt_number(state.Lambdas)
    return 1.0 + 2.0 / k


# ---------------------------------------------------------------------------
# band photon-number moments


def band_overlap_matrix(decomp: SchmidtDecomposition, band: SpectralBand):
    """Hermitian O_nm = sum_{w in band} conj(u_n) u_m dw over kept modes."""
    omega = decomp.grid.omega_s
    band.check_inside(omega)
    idx = band.indices(omega)
    sub = decomp.modes_s[:, idx]
    return (sub.conj() @ sub.T) * decomp.grid.delta


def _intersection_overlap(decomp, band_w, band_v):
    omega = decomp.grid.omega_s
    iw = set(band_w.indices(omega).tolist())
    iv = set(band_v.indices(omega).tolist())
    common = sorted(iw & iv)
    if not common:
        return None
    sub = decomp.modes_s[:, common]
    return (sub.conj() @ sub.T) * decomp.grid.delta


def gaussian_number_mean(overlap, occupations) -> float:
    """<N> of a zero-mean Gaussian mode state restricted to a band."""
    return float(np.real(np.sum(np.diag(overlap) * occupations)))


def gaussian_number_cov(
    overlap_w, overlap_v, occupations, anomalous, overlap_intersection=None
) -> float:
    """Cov(N_W, N_V) by Wick's theorem; see the module docstring."""
    m = np.asarray(occupations, dtype=float)
    s = np.asarray(anomalous, dtype=complex)
    pairing = np.einsum("nm,nm,n,m->", overlap_w, overlap_v, s.conj(), s)
    thermal = np.einsum("nm,mn,n,m->", overlap_w, overlap_v, m, m)
    total = pairing + thermal
    if overlap_intersection is not None:
        total = total + np.sum(np.diag(overlap_intersection) * m)
    result = complex(total)
    if abs(result.imag) > 1e-8 * max(1.0, abs(result.real)):
        raise ValidationError(f"covariance came out complex: {result}")
    return float(result.real)


@dataclass(frozen=True)
class BandMoments:
    mean: float
    variance: float


def _anomalous(decomp: SchmidtDecomposition, state: GainState):
    return np.exp(1j * decomp.pair_phases) * np.sinh(state.r) * np.cosh(state.r)


def band_moments(
    decomp: SchmidtDecomposition, state: GainState, band: SpectralBand
) -> BandMoments:
    """Mean and variance of the photon number inside a band."""
    _check_provenance(decomp, state)
    o = band_overlap_matrix(decomp, band)
    m = state.mean_photons
    s = _anomalous(decomp, state)
    mean = gaussian_number_mean(o, m)
    var = gaussian_number_cov(o, o, m, s, overlap_intersection=o)
    return BandMoments(mean=mean, variance=var)


def band_covariance(
    decomp: SchmidtDecomposition,
    state: GainState,
    band_w: SpectralBand,
    band_v: SpectralBand,
) -> float:
    """Cov(N_W, N_V) between two bands (bands may overlap)."""
    _check_provenance(decomp, state)
    ow = band_overlap_matrix(decomp, band_w)
    ov = band_overlap_matrix(decomp, band_v)
    oi = _intersection_overlap(decomp, band_w, band_v)
    return gaussian_number_cov(ow, ov, state.mean_photons, _anomalous(decomp, state), oi)


def nrf(
    decomp: SchmidtDecomposition,
    state: GainState,
    band_s: SpectralBand,
    band_i: SpectralBand,
) -> float:
    """Noise reduction factor Var(N_s - N_i) / (<N_s> + <N_i>).

    Bands must be disjoint on the grid; gain must be positive (the
    denominator vanishes for vacuum).  Values below one indicate
    twin-beam squeezing between the bands.
    """
    _check_provenance(decomp, state)
    if state.gain <= 0:
        raise UndefinedObservableError("NRF is undefined at zero gain (no photons)")
    omega = decomp.grid.omega_s
    iw = band_s.indices(omega)
    iv = band_i.indices(omega)
    if np.intersect1d(iw, iv).size:
        raise BandError("NRF bands must be disjoint on the grid")
    ms = band_moments(decomp, state, band_s)
    mi = band_moments(decomp, state, band_i)
    cov = band_covariance(decomp, state, band_s, band_i)
    denom = ms.mean + mi.mean
    if denom <= 0:
        raise UndefinedObservableError("NRF undefined: no photons in the bands")
    return (ms.variance + mi.variance - 2.0 * cov) / denom
