import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bsvsim import jsa, schmidt
from bsvsim.errors import DegeneracyError, ValidationError


def make_grid(n=256, half_span=8.0, center=2.0):
    return jsa.FrequencyGrid.make(center, half_span, n)


def tpa_from_kernel(grid, fn):
    x = grid.omega_s - grid.center
    vals = fn(x[:, None], x[None, :])
    return jsa.JointSpectralAmplitude.from_values(grid, vals)


# ---------------------------------------------------------------------------
# analytic oracles


def test_separable_kernel_is_rank_one():
    grid = make_grid(128, 6.0)
    tpa = tpa_from_kernel(grid, lambda x, y: np.exp(-(x**2)) * np.exp(-((y - 0.3) ** 2) / 2))
    dec = schmidt.decompose(tpa, method="svd")
    assert dec.lambdas[0] == pytest.approx(1.0, abs=1e-12)
    assert np.all(dec.all_lambdas[1:] < 1e-12)
    assert dec.schmidt_number() == pytest.approx(1.0, abs=1e-10)


class MehlerOracle:
    """Independent analytic decomposition of a double-Gaussian kernel.

    For K(x, y) = exp(-a (x+y)^2 - b (x-y)^2) the weights are geometric,
    lambda_n = (1 - mu) mu^n with mu = ((sqrt a - sqrt b)/(sqrt a + sqrt b))^2,
    and the modes are Hermite-Gauss functions of scale s = 2 (a b)^(1/4).
    """

    def __init__(self, a, b):
        self.a, self.b = a, b
        ra, rb = np.sqrt(a), np.sqrt(b)
        self.mu = ((ra - rb) / (ra + rb)) ** 2
        self.scale = 2.0 * (a * b) ** 0.25

    def lambdas(self, n):
        return (1.0 - self.mu) * self.mu ** np.arange(n)

    def mode(self, n, x):
        import math

        from numpy.polynomial.hermite import hermval

        coeff = np.zeros(n + 1)
        coeff[n] = 1.0
        s = self.scale
        norm = np.sqrt(s / (np.pi**0.5 * 2.0**n * float(math.factorial(n))))
        return norm * hermval(s * x, coeff) * np.exp(-0.5 * (s * x) ** 2)

    def self_check(self, x, rank=64):
        # the oracle reproduces the kernel it claims to decompose; for
        # a > b the factorization alternates sign between consecutive
        # modes (the idler factor is (-1)^n times the signal one)
        k_direct = np.exp(
            -self.a * (x[:, None] + x[None, :]) ** 2
            - self.b * (x[:, None] - x[None, :]) ** 2
        )
        dx = x[1] - x[0]
        k_direct /= np.sqrt(np.sum(np.abs(k_direct) ** 2) * dx**2)
        lam = self.lambdas(rank)
        signs = (-1.0) ** np.arange(rank)
        modes = np.array([self.mode(n, x) for n in range(rank)])
        k_series = np.einsum("n,nj,nk->jk", signs * np.sqrt(lam), modes, modes)
        assert np.max(np.abs(k_series - k_direct)) < 1e-8
        return k_direct


@pytest.fixture(scope="module")
def mehler_case():
    grid = make_grid(512, 8.0)
    oracle = MehlerOracle(a=1.0, b=0.04)
    x = grid.omega_s - grid.center
    oracle.self_check(x)
    tpa = tpa_from_kernel(grid, lambda xs, ys: np.exp(-(xs + ys) ** 2 - 0.04 * (xs - ys) ** 2))
    return grid, oracle, tpa


def test_double_gaussian_matches_mehler_weights(mehler_case):
    grid, oracle, tpa = mehler_case
    dec = schmidt.decompose(tpa, method="svd")
    np.testing.assert_allclose(dec.lambdas[:10], oracle.lambdas(10), atol=1e-6, rtol=0)


def test_double_gaussian_matches_hermite_modes(mehler_case):
    grid, oracle, tpa = mehler_case
    dec = schmidt.decompose(tpa, method="svd")
    x = grid.omega_s - grid.center
    for n in range(6):
        expected = oracle.mode(n, x)
        got = dec.modes_s[n]
        # global sign/phase is conventional: compare up to it
        overlap = abs(np.sum(np.conj(got) * expected) * grid.delta)
        assert overlap == pytest.approx(1.0, abs=1e-6)


def test_double_gaussian_schmidt_number(mehler_case):
    _, oracle, tpa = mehler_case
    dec = schmidt.decompose(tpa, method="svd")
    expected = (1.0 + oracle.mu) / (1.0 - oracle.mu)
    assert dec.schmidt_number() == pytest.approx(expected, rel=1e-6)


# ---------------------------------------------------------------------------
# structural invariants


@pytest.fixture(scope="module")
def generic_tpa():
    grid = make_grid(160, 6.0)
    return tpa_from_kernel(
        grid,
        lambda x, y: np.exp(-0.8 * (x + y) ** 2 - 0.1 * (x - y) ** 2)
        * np.exp(1j * 0.3 * x * y),
    )


def test_parseval_at_full_rank(generic_tpa):
    dec = schmidt.decompose(generic_tpa, truncation_tol=0.0, method="svd")
    assert dec.all_lambdas.sum() == pytest.approx(1.0, abs=1e-10)


def test_mode_orthonormality(generic_tpa):
    dec = schmidt.decompose(generic_tpa, method="svd")
    for modes in (dec.modes_s, dec.modes_i):
        gram = modes.conj() @ modes.T * dec.grid.delta
        np.testing.assert_allclose(gram, np.eye(dec.rank_kept), rtol=0, atol=1e-10)


def test_reconstruction_full_rank(mehler_case):
    # kernel with well-separated weights: reconstruction is exact
    _, _, tpa = mehler_case
    dec = schmidt.decompose(tpa, truncation_tol=0.0, method="svd")
    err = np.linalg.norm(dec.reconstruct() - tpa.values) / np.linalg.norm(tpa.values)
    assert err < 1e-10


def test_reconstruction_with_degenerate_pairs(generic_tpa):
    # kernels with near-degenerate weights pay the pair-rotation budget:
    # mixing weights that agree to pair_tol perturbs the product by O(gap)
    dec = schmidt.decompose(generic_tpa, truncation_tol=0.0, method="svd")
    err = np.linalg.norm(dec.reconstruct() - generic_tpa.values) / np.linalg.norm(
        generic_tpa.values
    )
    assert err < 1e-7
    # disabling the rotation restores exactness
    dec_plain = schmidt.decompose(
        generic_tpa, truncation_tol=0.0, method="svd", pair_tol=0.0
    )
    err_plain = np.linalg.norm(dec_plain.reconstruct() - generic_tpa.values) / np.linalg.norm(
        generic_tpa.values
    )
    assert err_plain < 1e-10


def test_redecomposition_returns_same_weights(generic_tpa):
    dec = schmidt.decompose(generic_tpa, truncation_tol=0.0, pair_tol=0.0, method="svd")
    rebuilt = jsa.JointSpectralAmplitude.from_values(
        generic_tpa.grid, dec.reconstruct(), normalize=True
    )
    again = schmidt.decompose(rebuilt, truncation_tol=0.0, pair_tol=0.0, method="svd")
    np.testing.assert_allclose(again.lambdas[:40], dec.lambdas[:40], rtol=0, atol=1e-10)


def test_gram_method_agrees_with_svd(generic_tpa):
    a = schmidt.decompose(generic_tpa, method="svd")
    b = schmidt.decompose(generic_tpa, method="gram")
    n = min(a.rank_kept, b.rank_kept, 30)
    np.testing.assert_allclose(a.lambdas[:n], b.lambdas[:n], rtol=0, atol=1e-10)
    for k in range(5):
        ov = abs(np.sum(np.conj(a.modes_s[k]) * b.modes_s[k]) * a.grid.delta)
        assert ov == pytest.approx(1.0, abs=1e-8)


def test_canonical_phase_is_deterministic(generic_tpa):
    a = schmidt.decompose(generic_tpa, method="svd")
    b = schmidt.decompose(generic_tpa, method="svd")
    np.testing.assert_array_equal(a.modes_s, b.modes_s)
    for k in range(6):
        j = np.argmax(np.abs(a.modes_s[k]))
        val = a.modes_s[k][j]
        assert val.imag == pytest.approx(0.0, abs=1e-12)
        assert val.real > 0


def test_truncation_controls(generic_tpa):
    dec = schmidt.decompose(generic_tpa, max_rank=3, method="svd")
    assert dec.rank_kept == 3
    assert dec.lambdas.size == 3
    dec2 = schmidt.decompose(generic_tpa, truncation_tol=1e-4, method="svd")
    assert dec2.lambdas.sum() >= (1.0 - 1e-4) * dec2.all_lambdas.sum() - 1e-12


def test_decompose_requires_normalized_input(generic_tpa):
    raw = jsa.JointSpectralAmplitude.from_values(
        generic_tpa.grid, generic_tpa.values * 3.0, normalize=False
    )
    with pytest.raises(ValidationError):
        schmidt.decompose(raw)


# ---------------------------------------------------------------------------
# gain redistribution


def test_redistribute_zero_gain_limit():
    lam = np.array([0.5, 0.3, 0.2])
    state = schmidt.redistribute(lam, 0.0)
    np.testing.assert_allclose(state.Lambdas, lam, rtol=0, atol=1e-15)
    assert state.total_photons == 0.0
    # continuity: tiny gain stays near the limit
    state_eps = schmidt.redistribute(lam, 1e-6)
    np.testing.assert_allclose(state_eps.Lambdas, lam, rtol=0, atol=1e-9)


def test_redistribute_large_gain_concentrates():
    lam = np.array([0.4, 0.3, 0.2, 0.1])
    state = schmidt.redistribute(lam, 60.0)
    assert state.Lambdas[0] > 0.999
    assert schmidt.schmidt_number(state.Lambdas) == pytest.approx(1.0, abs=1e-2)


def test_redistribute_symmetric_pair_stays_balanced():
    lam = np.array([0.5, 0.5])
    for gain in (0.0, 1.0, 7.3, 13.0):
        state = schmidt.redistribute(lam, gain)
        np.testing.assert_allclose(state.Lambdas, [0.5, 0.5], rtol=0, atol=1e-15)


def test_redistribute_squeezing_parameters():
    lam = np.array([0.6, 0.4])
    state = schmidt.redistribute(lam, 2.5)
    np.testing.assert_allclose(state.r, 2.5 * np.sqrt(lam), rtol=1e-15)
    np.testing.assert_allclose(state.mean_photons, np.sinh(state.r) ** 2, rtol=1e-15)


def test_redistribute_rejects_bad_input():
    with pytest.raises(ValidationError):
        schmidt.redistribute(np.array([0.5, 0.5]), -1.0)
    with pytest.raises(ValidationError):
        schmidt.redistribute(np.array([-0.5, 1.5]), 1.0)


@st.composite
def weight_spectra(draw):
    n = draw(st.integers(min_value=2, max_value=12))
    raw = draw(
        st.lists(st.floats(min_value=1e-3, max_value=1.0), min_size=n, max_size=n)
    )
    lam = np.sort(np.array(raw))[::-1]
    return lam / lam.sum()


@settings(max_examples=60, deadline=None)
@given(weight_spectra(), st.floats(min_value=0.0, max_value=15.0))
def test_redistribute_weights_normalized_and_ordered(lam, gain):
    state = schmidt.redistribute(lam, gain)
    assert state.Lambdas.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.all(np.diff(state.Lambdas) <= 1e-15)  # ordering follows lambda


@settings(max_examples=60, deadline=None)
@given(weight_spectra())
def test_schmidt_number_nonincreasing_in_gain(lam):
    gains = np.linspace(0.0, 15.0, 31)
    ks = [schmidt.schmidt_number(schmidt.redistribute(lam, g).Lambdas) for g in gains]
    diffs = np.diff(ks)
    assert np.all(diffs <= 1e-9)
    assert all(k >= 1.0 - 1e-12 for k in ks)


def test_schmidt_number_trivial_cases():
    assert schmidt.schmidt_number([1.0]) == pytest.approx(1.0, abs=1e-15)
    for n in (2, 7, 64):
        assert schmidt.schmidt_number(np.full(n, 1.0 / n)) == pytest.approx(n, abs=1e-9)
    with pytest.raises(ValidationError):
        schmidt.schmidt_number([0.0, 0.0])


# ---------------------------------------------------------------------------
# pair superpositions


def symmetric_pair_tpa():
    # two separated peaks paired by the ridge: exact two-color toy
    grid = make_grid(256, 6.0)
    x = grid.omega_s - grid.center
    f = np.exp(-((x + 2.5) ** 2) * 4.0)
    g = np.exp(-((x - 2.5) ** 2) * 4.0)
    f /= np.sqrt(np.sum(f**2) * grid.delta)
    g /= np.sqrt(np.sum(g**2) * grid.delta)
    vals = np.outer(f, g) + np.outer(g, f)
    return grid, f, g, jsa.JointSpectralAmplitude.from_values(grid, vals)


def test_pair_superpositions_orthonormal_and_localized():
    grid, f, g, tpa = symmetric_pair_tpa()
    dec = schmidt.decompose(tpa, method="svd")
    assert dec.lambdas[0] == pytest.approx(dec.lambdas[1], rel=1e-12)
    plus, minus = schmidt.pair_superpositions(dec, 0)
    dx = grid.delta
    assert np.sum(np.abs(plus) ** 2) * dx == pytest.approx(1.0, abs=1e-10)
    assert np.sum(np.abs(minus) ** 2) * dx == pytest.approx(1.0, abs=1e-10)
    assert abs(np.sum(np.conj(plus) * minus) * dx) < 1e-10
    # each superposition localizes on one peak
    half = grid.n // 2
    w_plus_left = np.sum(np.abs(plus[:half]) ** 2) * dx
    w_minus_left = np.sum(np.abs(minus[:half]) ** 2) * dx
    sides = sorted([w_plus_left, w_minus_left])
    assert sides[0] < 1e-6 and sides[1] > 1.0 - 1e-6


def test_pair_superpositions_preserve_photon_number():
    # equal r on a degenerate pair: total mean photons invariant under the
    # 2x2 mode rotation
    grid, f, g, tpa = symmetric_pair_tpa()
    dec = schmidt.decompose(tpa, method="svd")
    state = schmidt.gain_state(dec, 2.0)
    assert state.r[0] == pytest.approx(state.r[1], rel=1e-12)
    total = state.mean_photons[:2].sum()
    # rotated modes have the same r, hence the same total photon number
    assert 2.0 * np.sinh(state.r[0]) ** 2 == pytest.approx(total, rel=1e-12)


def test_pair_superpositions_reject_nondegenerate():
    grid = make_grid(128, 6.0)
    tpa = tpa_from_kernel(grid, lambda x, y: np.exp(-(x + y) ** 2 - 0.3 * (x - y) ** 2))
    dec = schmidt.decompose(tpa, method="svd")
    with pytest.raises(DegeneracyError) as err:
        schmidt.pair_superpositions(dec, 0)
    assert err.value.rel_gap > 0


def test_reflection_convention_on_degenerate_pair():
    grid, f, g, tpa = symmetric_pair_tpa()
    dec = schmidt.decompose(tpa, method="svd")
    refl = grid.reflect_index()
    u0, u1 = dec.modes_s[0], dec.modes_s[1]
    assert np.max(np.abs(u0 - u0[refl])) < 1e-8 * np.max(np.abs(u0))
    assert np.max(np.abs(u1 + u1[refl])) < 1e-8 * np.max(np.abs(u1))
    # twin-beam pair phase: chi_0 - chi_1 = pi (mod 2 pi)
    dchi = (dec.pair_phases[0] - dec.pair_phases[1]) % (2 * np.pi)
    assert dchi == pytest.approx(np.pi, abs=1e-8)
