import numpy as np
import pytest

from bsvsim import dispersion as disp
from bsvsim import jsa
from bsvsim import materials as mat
from bsvsim import units
from bsvsim.errors import ValidationError


@pytest.fixture(scope="module")
def table():
    return mat.load_material_table()


@pytest.fixture(scope="module")
def crystal(table):
    return disp.PhaseMatchedCrystal(table["bbo_o"], table["bbo_e"], units.omega_from_nm(400.0))


@pytest.fixture(scope="module")
def media(table):
    return disp.InterferometerMedia.from_table(table, "sf6", "vacuum")


@pytest.fixture(scope="module")
def pump():
    return jsa.PumpConfig(wavelength_nm=400.0, tau_fs=units.tau_from_fwhm_ps(1.0))


def grid_for(pump, half_span=0.25, n=256):
    return jsa.FrequencyGrid.make(pump.omega_p / 2.0, half_span, n)


def test_pump_config_identities(pump):
    assert pump.bandwidth == pytest.approx(1.0 / pump.tau_fs, rel=1e-15)
    assert units.fwhm_ps_from_tau(pump.tau_fs) == pytest.approx(1.0, rel=1e-12)
    with pytest.raises(ValidationError):
        jsa.PumpConfig(wavelength_nm=400.0, tau_fs=0.0)


def test_grid_symmetry_and_reflection(pump):
    for n in (64, 65):
        grid = grid_for(pump, n=n)
        grid.validate_symmetry()
        refl = grid.reflect_index()
        np.testing.assert_allclose(
            grid.omega_s + grid.omega_s[refl], 2.0 * grid.center, rtol=0, atol=1e-12
        )
    with pytest.raises(ValidationError):
        jsa.FrequencyGrid.make(2.35, -0.1, 64)


def test_normalization(pump, crystal):
    grid = grid_for(pump)
    tpa = jsa.build_single_crystal_tpa(grid, pump, crystal, 3.0, check_edges=False)
    total = np.sum(np.abs(tpa.values) ** 2) * grid.delta**2
    assert total == pytest.approx(1.0, abs=1e-12)
    assert np.all(np.isfinite(tpa.values.view(float)))


def test_peak_at_degeneracy(pump, crystal):
    grid = grid_for(pump, n=255)  # odd grid puts the center on a sample
    tpa = jsa.build_single_crystal_tpa(grid, pump, crystal, 3.0, check_edges=False)
    peak_index = np.unravel_index(np.argmax(np.abs(tpa.values)), tpa.values.shape)
    mid = grid.n // 2
    assert peak_index == (mid, mid)


def test_exchange_symmetry(pump, crystal):
    grid = grid_for(pump)
    tpa = jsa.build_single_crystal_tpa(grid, pump, crystal, 3.0, check_edges=False)
    np.testing.assert_allclose(tpa.values, tpa.values.T, rtol=0, atol=1e-14)


def test_interferometer_zero_geometry_is_back_to_back(pump, crystal, media):
    # with d = d_a = d0 = 0 the modulation reduces to cos(dk L / 2) e^{-i dk L / 2}
    grid = grid_for(pump, n=128)
    geo = disp.Geometry(crystal_length_mm=3.0)
    single = jsa.build_single_crystal_tpa(
        grid, pump, crystal, 3.0, normalize=False, check_edges=False
    )
    both = jsa.build_interferometer_tpa(
        grid, pump, crystal, geo, media, normalize=False, check_edges=False
    )
    arg = 0.5 * crystal.mismatch(grid.omega_s[:, None], grid.omega_i[None, :]) * 3.0
    expected = single.values * np.cos(arg) * np.exp(-1j * arg)
    # ulp-level slack: the builder evaluates the pump branch on the 2n-1
    # distinct frequency sums, the reference expression pairwise
    np.testing.assert_allclose(both.values, expected, rtol=0, atol=1e-10)


def test_modulation_off_recovers_single_crystal_envelope(pump, crystal, media):
    grid = grid_for(pump, n=128)
    geo = disp.Geometry(crystal_length_mm=3.0, gvd_length_cm=36.0, pump_path_cm=60.0)
    plain = jsa.build_interferometer_tpa(
        grid, pump, crystal, geo, media, include_modulation=False, check_edges=False
    )
    single = jsa.build_single_crystal_tpa(grid, pump, crystal, 3.0, check_edges=False)
    np.testing.assert_allclose(np.abs(plain.values), np.abs(single.values), atol=1e-13)


def test_phase_lock_amplification_and_dark(pump, crystal, media):
    geo = disp.Geometry(crystal_length_mm=3.0, gvd_length_cm=36.0)
    wp = crystal.pump_omega
    wdeg = wp / 2.0
    d0 = disp.find_pump_path(wdeg, geo, media, wp)
    geo = geo.replace(pump_path_cm=d0)

    offset = jsa.phase_lock(wdeg, crystal, geo, media)
    assert abs(offset) <= np.pi
    theta = jsa.modulation_argument_at(wdeg, wdeg, crystal, geo, media, offset)
    assert np.cos(theta) == pytest.approx(1.0, abs=1e-12)

    # locking and building: |F| at degeneracy is maximal over lock offsets
    grid = jsa.FrequencyGrid.make(wdeg, 0.02, 129)
    mid = grid.n // 2
    locked = jsa.build_interferometer_tpa(
        grid, pump, crystal, geo, media, phase_offset=offset,
        normalize=False, check_edges=False,
    )
    amp_locked = abs(locked.values[mid, mid])
    for trim in (-0.8, -0.3, 0.4, 1.2):
        other = jsa.build_interferometer_tpa(
            grid, pump, crystal, geo, media, phase_offset=offset + trim,
            normalize=False, check_edges=False,
        )
        assert abs(other.values[mid, mid]) < amp_locked

    # half-fringe offset extinguishes the degenerate amplitude
    dark = jsa.build_interferometer_tpa(
        grid, pump, crystal, geo, media, phase_offset=offset + np.pi / 2.0,
        normalize=False, check_edges=False,
    )
    assert abs(dark.values[mid, mid]) < 1e-10 * amp_locked


def test_lock_trim_fringe_period_matches_analytic(crystal, media, pump):
    # scanning the GVD length by micrometers, the degenerate amplitude
    # oscillates with the analytic amplification period
    from bsvsim.scenario import analytic_period

    geo = disp.Geometry(crystal_length_mm=3.0, gvd_length_cm=5.0)
    wp = crystal.pump_omega
    wdeg = wp / 2.0
    geo = geo.replace(pump_path_cm=disp.find_pump_path(wdeg, geo, media, wp))
    offset = jsa.phase_lock(wdeg, crystal, geo, media)
    period_um = analytic_period("sf6", 800.0)

    def degenerate_amplitude(extra_um):
        g = geo.replace(gvd_length_cm=geo.gvd_length_cm + extra_um * 1e-4)
        th = jsa.modulation_argument_at(wdeg, wdeg, crystal, g, media, offset)
        return abs(np.cos(th))

    # brute-force scan: |cos Theta| repeats after one period, dips mid-period
    xs = np.linspace(0.0, 2.0 * period_um, 81)
    vals = np.array([degenerate_amplitude(x) for x in xs])
    assert degenerate_amplitude(period_um) == pytest.approx(1.0, abs=1e-4)
    assert degenerate_amplitude(period_um / 2.0) < 0.02
    tops = np.nonzero(vals > 0.999)[0]
    assert xs[tops[-1]] - xs[tops[0]] == pytest.approx(2.0 * period_um, rel=0.05)


def test_marginal_refinement_stability(pump, crystal):
    # doubling the grid changes the normalized signal marginal by < 1e-3
    def marginal(n):
        grid = grid_for(pump, half_span=0.25, n=n)
        tpa = jsa.build_single_crystal_tpa(grid, pump, crystal, 3.0, check_edges=False)
        m = tpa.marginal_signal()
        return grid.omega_s, m / m.max()

    w1, m1 = marginal(512)
    w2, m2 = marginal(1024)
    interp = np.interp(w1, w2, m2)
    assert np.max(np.abs(interp - m1)) < 1e-3


def test_edge_decay_warning(pump, crystal, caplog):
    import logging

    grid = grid_for(pump, half_span=0.05, n=64)  # far too narrow
    with caplog.at_level(logging.WARNING, logger="bsvsim.jsa"):
        jsa.build_single_crystal_tpa(grid, pump, crystal, 3.0, check_edges=True)
    assert any("grid span" in rec.message for rec in caplog.records)


def test_from_values_validation(pump, crystal):
    grid = grid_for(pump, n=64)
    good = np.ones((64, 64), dtype=complex)
    jsa.JointSpectralAmplitude.from_values(grid, good)
    with pytest.raises(ValidationError):
        jsa.JointSpectralAmplitude.from_values(grid, np.ones((32, 32)))
    bad = good.copy()
    bad[3, 4] = np.nan
    with pytest.raises(ValidationError):
        jsa.JointSpectralAmplitude.from_values(grid, bad)
    with pytest.raises(ValidationError):
        jsa.JointSpectralAmplitude.from_values(grid, np.zeros((64, 64)))
