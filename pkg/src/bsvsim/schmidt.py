"""Schmidt decomposition of the two-photon amplitude and gain redistribution.

The discretized amplitude F (normalized so sum |F|^2 dw^2 = 1) is
factorized as F = sum_n sqrt(lambda_n) u_n(ws) v_n(wi) via the singular
value decomposition of F*dw.  Mode functions are scaled to unit L2 norm
under the dw weight, so the weights lambda_n sum to one.

Deterministic conventions:

* each signal mode u_n is rotated by a global phase so its largest-|u|
  sample is real and positive; v_n absorbs the opposite phase, keeping
  the product u_n v_n (and the reconstruction) fixed;
* weights degenerate within `pair_tol` are rotated inside their 2-D
  singular subspace so one basis vector is even and one odd under the
  grid reflection omega -> 2*center - omega (the symmetry classification
  of the two-color regime requires this: plain SVD output is arbitrary
  inside a degenerate subspace);
* for a shared-beam (degenerate type-I) amplitude, v_n differs from u_n
  only by a phase exp(i chi_n).  chi_n is recorded per mode: it is the
  squeezing phase of the mode and carries the twin-beam correlations
  (e.g. chi = pi on the odd member of a two-color pair).  Photon-number
  statistics in bands are wrong without it.

Mode shapes are treated as gain independent; parametric gain enters only
through :func:`redistribute`, which maps lambda_n to the effective
weights Lambda_n = sinh^2(G sqrt(lambda_n)) / sum_m sinh^2(G sqrt(lambda_m)).
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from .errors import DecompositionError, DegeneracyError, ValidationError
from .jsa import FrequencyGrid, JointSpectralAmplitude

DEFAULT_TRUNCATION_TOL = 1e-8
DEFAULT_PAIR_TOL = 1e-3


def _fingerprint(lambdas) -> str:
    return hashlib.sha256(np.ascontiguousarray(lambdas, dtype=float).tobytes()).hexdigest()


@dataclass(frozen=True)
class SchmidtDecomposition:
    """Truncated Schmidt decomposition of a two-photon amplitude.

    lambdas: kept weights, descending; modes_s[n], modes_i[n]: discretized
    mode functions on the grid (unit L2 norm under dw); pair_phases[n]:
    chi_n with v_n ~ exp(i chi_n) u_n for shared-beam amplitudes;
    beam_overlap[n]: |<u_n, v_n>| diagnostic (~1 when the beam is shared).
    """

    grid: FrequencyGrid
    lambdas: np.ndarray
    modes_s: np.ndarray
    modes_i: np.ndarray
    pair_phases: np.ndarray
    beam_overlap: np.ndarray
    rank_kept: int
    all_lambdas: np.ndarray
    truncation_tol: float
    pair_tol: float
    method: str

    @property
    def fingerprint(self) -> str:
        """Identifies the weight spectrum; gain states carry it for provenance."""
        return _fingerprint(self.lambdas)

    def reconstruct(self) -> np.ndarray:
        """sum_n sqrt(lambda_n) u_n(ws) v_n(wi) over the kept modes."""
        return (self.modes_s.T * np.sqrt(self.lambdas)) @ self.modes_i

    def schmidt_number(self) -> float:
        """Effective mode number of the bare weights."""
        return schmidt_number(self.lambdas)


def _svd(matrix, method):
    if method == "svd":
        try:
            u, s, vh = np.linalg.svd(matrix)
        except np.linalg.LinAlgError as exc:
            raise DecompositionError(
                f"SVD failed on {matrix.shape} matrix "
                f"(finite={np.all(np.isfinite(matrix.view(float)))}, "
                f"fro={np.linalg.norm(matrix):.3e}): {exc}"
            ) from exc
        return u, s, vh.conj().T
    # Gram route: eigendecomposition of F^H F.  ~4x faster than zgesdd on
    # one core; singular values below ~sqrt(eps)*||F|| lose accuracy, which
    # truncation discards anyway.
    gram = matrix.conj().T @ matrix
    try:
        w, v = np.linalg.eigh(gram)
    except np.linalg.LinAlgError as exc:
        raise DecompositionError(f"eigh failed on Gram matrix: {exc}") from exc
    w = w[::-1]
    v = v[:, ::-1]
    s = np.sqrt(np.clip(w, 0.0, None))
    u = matrix @ v
    good = s > s[0] * 1e-12
    u[:, good] /= s[good]
    # columns with negligible singular value: orthonormalize arbitrarily
    u[:, ~good] = 0.0
    return u, s, v


def decompose(
    tpa: JointSpectralAmplitude,
    truncation_tol=DEFAULT_TRUNCATION_TOL,
    max_rank=None,
    pair_tol=DEFAULT_PAIR_TOL,
    method="auto",
) -> SchmidtDecomposition:
    """Schmidt-decompose a normalized two-photon amplitude.

    Modes are kept until their cumulative weight reaches
    1 - truncation_tol, capped at max_rank if given.  method: "svd"
    (exact, slower), "gram" (eigendecomposition of F^H F), or "auto"
    (gram for grids of 512 points and larger).
    """
    if tpa.normalization != "l2":
        raise ValidationError("decompose expects an L2-normalized amplitude")
    grid = tpa.grid
    if method == "auto":
        method = "gram" if grid.n >= 512 else "svd"
    matrix = tpa.values * grid.delta
    u, s, v = _svd(matrix, method)

    lambdas_all = s**2

    if max_rank is None:
        max_rank = grid.n
    if truncation_tol <= 0.0:
        rank = grid.n
    else:
        cum = np.cumsum(lambdas_all)
        rank = int(np.searchsorted(cum, cum[-1] * (1.0 - truncation_tol)) + 1)
    rank = max(1, min(rank, int(max_rank), grid.n))

    scale = 1.0 / np.sqrt(grid.delta)
    modes_s = (u[:, :rank].T * scale).copy()
    modes_i = (v[:, :rank].conj().T * scale).copy()
    lambdas = lambdas_all[:rank].copy()

    _rotate_degenerate_pairs(grid, lambdas, modes_s, modes_i, pair_tol)
    _canonical_phases(grid, modes_s, modes_i)
    pair_phases, overlap = _pair_phases(grid, modes_s, modes_i)

    return SchmidtDecomposition(
        grid=grid,
        lambdas=lambdas,
        modes_s=modes_s,
        modes_i=modes_i,
        pair_phases=pair_phases,
        beam_overlap=overlap,
        rank_kept=rank,
        all_lambdas=lambdas_all,
        truncation_tol=truncation_tol,
        pair_tol=pair_tol,
        method=method,
    )


def _rotate_degenerate_pairs(grid, lambdas, modes_s, modes_i, pair_tol):
    """Mix each near-degenerate pair into reflection eigenvectors.

    The 2x2 Hermitian projection of the reflection operator onto the
    pair subspace is diagonalized; its eigenvectors give the even (+)
    and odd (-) combinations.  Applied in place to u and, with the
    conjugate rotation, to v, preserving sum u_n v_n.
    """
    refl = grid.reflect_index()
    n = lambdas.size
    k = 0
    while k + 1 < n:
        gap = abs(lambdas[k] - lambdas[k + 1])
        if lambdas[k] > 0 and gap / lambdas[k] <= pair_tol:
            pair_u = modes_s[k : k + 2]
            pair_v = modes_i[k : k + 2]
            g = (pair_u.conj() @ pair_u[:, refl].T) * grid.delta
            g = 0.5 * (g + g.conj().T)
            evals, evecs = np.linalg.eigh(g)
            order = np.argsort(evals)[::-1]  # even (+1-ish) first
            rot = evecs[:, order]
            modes_s[k : k + 2] = rot.T @ pair_u
            modes_i[k : k + 2] = rot.conj().T @ pair_v
            k += 2
        else:
            k += 1


def _canonical_phases(grid, modes_s, modes_i):
    for idx in range(modes_s.shape[0]):
        u = modes_s[idx]
        j = int(np.argmax(np.abs(u)))
        a = u[j]
        if a == 0:
            continue
        phase = a / abs(a)
        modes_s[idx] = u / phase
        modes_i[idx] = modes_i[idx] * phase


def _pair_phases(grid, modes_s, modes_i):
    overlap = np.einsum("nj,nj->n", modes_s.conj(), modes_i) * grid.delta
    mag = np.abs(overlap)
    chi = np.where(mag > 1e-6, np.angle(np.where(mag > 0, overlap, 1.0)), 0.0)
    return chi, mag


@dataclass(frozen=True)
class GainState:
    """Per-mode squeezing at parametric gain G.

    r[n] = G sqrt(lambda_n); Lambdas are the gain-redistributed weights
    (sum to one); mean_photons[n] = sinh^2 r_n.
    """

    gain: float
    r: np.ndarray
    Lambdas: np.ndarray
    mean_photons: np.ndarray
    lambda_fingerprint: str = ""

    @property
    def total_photons(self) -> float:
        return float(self.mean_photons.sum())


def redistribute(lambdas, gain, fingerprint=None) -> GainState:
    """Gain-redistributed weights Lambda_n from bare weights lambda_n.

    Lambda_n = sinh^2(G sqrt(lambda_n)) / sum_m sinh^2(G sqrt(lambda_m)).
    At G = 0 the limit Lambda_n = lambda_n / sum(lambda) is used (the
    ratio sinh^2(G x)/G^2 -> x^2); mean photon numbers are then zero.
    """
    lam = np.asarray(lambdas, dtype=float)
    if lam.ndim != 1 or lam.size == 0:
        raise ValidationError("lambdas must be a non-empty 1-D array")
    if np.any(lam < -1e-12):
        raise ValidationError("lambdas must be non-negative")
    gain = float(gain)
    if gain < 0:
        raise ValidationError("parametric gain must be >= 0")
    lam = np.clip(lam, 0.0, None)
    r = gain * np.sqrt(lam)
    sinh2 = np.sinh(r) ** 2
    if gain == 0.0 or sinh2.sum() == 0.0:
        # zero-gain limit of sinh^2(G sqrt(lam))/sum: the bare weights
        # (also covers gains small enough for sinh^2 to underflow)
        weights = lam / lam.sum()
    else:
        weights = sinh2 / sinh2.sum()
    if fingerprint is None:
        fingerprint = _fingerprint(lam)
    return GainState(
        gain=gain,
        r=r,
        Lambdas=weights,
        mean_photons=sinh2,
        lambda_fingerprint=fingerprint,
    )


def gain_state(decomp: SchmidtDecomposition, gain) -> GainState:
    """Redistribute a decomposition's weights, stamping its provenance."""
    return redistribute(decomp.lambdas, gain, fingerprint=decomp.fingerprint)


def schmidt_number(weights) -> float:
    """Effective mode number K = 1 / sum_n w_n^2 of normalized weights."""
    w = np.asarray(weights, dtype=float)
    total = w.sum()
    if total <= 0:
        raise ValidationError("weights must have positive sum")
    w = w / total
    return float(1.0 / np.sum(w**2))


def pair_superpositions(decomp: SchmidtDecomposition, n: int, pair_tol=None):
    """Even/odd superpositions (u_n + u_{n+1})/sqrt(2), (u_n - u_{n+1})/sqrt(2).

    Defined for a degenerate pair of a shared-beam decomposition: after
    the reflection convention these localize on the two spectral peaks
    of a two-color state.  Raises DegeneracyError when the weights are
    not degenerate within pair_tol (defaults to the decomposition's).
    """
    if pair_tol is None:
        pair_tol = decomp.pair_tol
    if n < 0 or n + 1 >= decomp.rank_kept:
        raise ValidationError(f"pair index {n} out of range (rank {decomp.rank_kept})")
    lam_n, lam_next = decomp.lambdas[n], decomp.lambdas[n + 1]
    rel_gap = abs(lam_n - lam_next) / lam_n if lam_n > 0 else np.inf
    if rel_gap > pair_tol:
        raise DegeneracyError(n, lam_n, lam_next, rel_gap, pair_tol)
    if np.any(decomp.beam_overlap[[n, n + 1]] < 0.99):
        raise ValidationError(
            "pair superpositions need a shared-beam decomposition "
            f"(|<u,v>| = {decomp.beam_overlap[n]:.3f}, {decomp.beam_overlap[n + 1]:.3f})"
        )
    u_a, u_b = decomp.modes_s[n], decomp.modes_s[n + 1]
    plus = (u_a + u_b) / np.sqrt(2.0)
    minus = (u_a - u_b) / np.sqrt(2.0)
    return plus, minus
