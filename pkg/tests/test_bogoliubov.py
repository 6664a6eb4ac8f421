import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from phonon_gw.bogoliubov import (
    BogoliubovSet,
    WaveParams,
    check_long_time,
    discrete_coefficients,
    generic_kernel,
    oscillatory_integral,
    particle_number,
    resonant_coefficients,
    resonant_kernel,
    time_dependent_coefficients,
)
from phonon_gw.cavity import CavityConfig, mode_frequency, resonant_drive_frequency
from phonon_gw.errors import DomainError, GateError, RegimeWarning
from phonon_gw.oracle import quad_oscillatory


def test_discrete_examples(small_cavity):
    eps = 1e-4
    b = discrete_coefficients(eps, small_cavity)
    assert b.beta_mn(1, 2) == pytest.approx(math.sqrt(2) / 6 * eps, rel=1e-14)
    assert b.alpha_mn(1, 2) == pytest.approx(math.sqrt(2) / 2 * eps, rel=1e-14)
    assert b.beta_mn(1, 1) == 0 and b.alpha_mn(3, 3) == 1
    # odd m+n flips the sign relative to even
    assert b.beta_mn(1, 3) == pytest.approx(-math.sqrt(3) / 8 * eps, rel=1e-14)


def test_discrete_symmetries(small_cavity):
    b = discrete_coefficients(3e-3, small_cavity)
    np.testing.assert_array_equal(b.beta, b.beta.T)
    off = b.alpha - np.eye(8)
    np.testing.assert_allclose(off, -off.T, atol=0)


@pytest.mark.parametrize("eps", [0.1, -0.2, 1.0])
def test_discrete_amplitude_limit(small_cavity, eps):
    with pytest.raises(DomainError):
        discrete_coefficients(eps, small_cavity)


def test_arrays_read_only(small_cavity):
    b = discrete_coefficients(1e-4, small_cavity)
    with pytest.raises(ValueError):
        b.beta[0, 1] = 1.0


def test_wave_params_validation():
    with pytest.raises(DomainError):
        WaveParams(0.5, 1.0, 1.0)
    with pytest.raises(DomainError):
        WaveParams(1e-4, 0.0, 1.0)
    with pytest.raises(DomainError):
        WaveParams(1e-4, 1.0, -1.0)
    with pytest.warns(RegimeWarning):
        WaveParams(0.01, 1.0, 1.0)


def _sets(cfg, eps):
    w1 = cfg.fundamental
    drive = resonant_drive_frequency(1, 2, cfg)
    wave = WaveParams(eps, drive, 1e3 / w1)
    return [
        discrete_coefficients(eps, cfg),
        time_dependent_coefficients(wave, cfg),
        resonant_coefficients(1, 2, wave, cfg),
    ]


@pytest.mark.parametrize("which", [0, 1, 2])
def test_bogoliubov_identity_second_order(small_cavity, which):
    """Deviation from |alpha|^2 - |beta|^2 = 1 scales as eps^2 for every method."""
    epss = [1e-6, 1e-5, 1e-4]
    devs = [np.max(np.abs(_sets(small_cavity, e)[which].bogoliubov_identity() - 1)) for e in epss]
    assert devs[0] < 1e-5
    for lo, hi in zip(devs, devs[1:]):
        assert hi / lo == pytest.approx(100, rel=1e-3)


def test_kernel_at_zero_time():
    assert oscillatory_integral(3.0, 5.0, 0.0) == 0
    assert oscillatory_integral(5.0, 5.0, 0.0) == 0


@pytest.mark.parametrize("t", [1.0, 10.0, 1e3, 1e5])
def test_kernel_magnitude_at_resonance(t):
    drive = 2.0
    val = oscillatory_integral(drive, drive, t)
    assert abs(abs(val) / (t / 2) - 1) <= 1 / (drive * t)
    assert val == pytest.approx(resonant_kernel(drive, t), rel=1e-12, abs=1e-14)


@pytest.mark.parametrize("omega,drive,t", [(2.0, 1.0, 7.3), (0.3, 1.7, 40.0), (-2.5, 1.0, 12.0), (0.0, 1.0, 3.0)])
def test_kernel_matches_generic_form(omega, drive, t):
    assert oscillatory_integral(omega, drive, t) == pytest.approx(generic_kernel(omega, drive, t), rel=1e-12)


def test_kernel_against_quadrature_two_omega():
    drive, t = 1.3, 250.0
    ref = quad_oscillatory(2 * drive, drive, t)
    assert ref.converged
    assert abs(oscillatory_integral(2 * drive, drive, t) - ref.value) <= 1e-10 * max(1, abs(ref.value))


@pytest.mark.parametrize("delta", [1e-12, 1e-9, 1e-6, 1e-3])
def test_kernel_continuous_across_resonance(delta):
    drive, t = 1.0, 500.0
    at = oscillatory_integral(drive, drive, t)
    near = oscillatory_integral(drive * (1 + delta), drive, t)
    # derivative of the kernel in omega is bounded by t^2 / 2
    assert abs(near - at) <= drive * delta * t**2 / 2 * (1 + 1e-9)


def test_kernel_broadcasts():
    om = np.linspace(0, 3, 7)
    val = oscillatory_integral(om, 1.5, 20.0)
    assert val.shape == (7,)
    assert val[2] == oscillatory_integral(om[2], 1.5, 20.0)


def test_kernel_negative_time():
    with pytest.raises(DomainError):
        oscillatory_integral(1.0, 1.0, -1.0)


def test_time_dependent_zero_duration(small_cavity):
    wave = WaveParams(1e-4, 3.0 * small_cavity.fundamental, 0.0)
    b = time_dependent_coefficients(wave, small_cavity)
    np.testing.assert_array_equal(b.alpha, np.eye(8))
    np.testing.assert_array_equal(b.beta, 0)


@pytest.mark.parametrize("w1t", [1e3, 1e4, 1e5])
def test_time_dependent_resonant_growth(small_cavity, w1t):
    eps = 1e-5
    w1 = small_cavity.fundamental
    wave = WaveParams(eps, 3 * w1, w1t / w1)
    b = time_dependent_coefficients(wave, small_cavity)
    expected = eps / 4 * math.sqrt(2) * w1t
    assert abs(abs(b.beta_mn(2, 1)) / expected - 1) <= 1 / w1t


@settings(max_examples=40, deadline=None)
@given(
    j=st.integers(1, 8),
    k=st.integers(1, 8),
    drive_ratio=st.floats(0.37, 14.1),
    w1t=st.floats(0.1, 300.0),
)
def test_off_resonant_envelope(j, k, drive_ratio, w1t):
    """Off resonance |beta_jk| stays below w |beta^d| (1/|Omega - w| + 1/(Omega + w)) for all t."""
    cfg = CavityConfig(1e-6, 1e-2, 8)
    w1 = cfg.fundamental
    w = (j + k) * w1
    drive = drive_ratio * w1
    if j == k or abs(drive - w) < 0.05 * w1:
        return
    eps = 1e-4
    b = time_dependent_coefficients(WaveParams(eps, drive, w1t / w1), cfg)
    bd = discrete_coefficients(eps, cfg).beta_mn(j, k)
    bound = w * abs(bd) * (1 / abs(drive - w) + 1 / (drive + w))
    assert abs(b.beta_mn(j, k)) <= bound * (1 + 1e-12)


@pytest.mark.parametrize("j,k", [(1, 2), (2, 5), (3, 3), (4, 1)])
def test_time_dependent_against_quadrature(small_cavity, j, k):
    eps = 1e-4
    w1 = small_cavity.fundamental
    drive = 3.7 * w1
    t = 40 / w1
    b = time_dependent_coefficients(WaveParams(eps, drive, t), small_cavity)
    d = discrete_coefficients(eps, small_cavity)
    w = (j + k) * w1
    ref = 1j * w * d.beta_mn(j, k) * quad_oscillatory(w, drive, t).value
    assert b.beta_mn(j, k) == pytest.approx(ref, rel=1e-9, abs=1e-22)


def test_resonant_values(paper_cavity):
    eps = 1e-4
    w1 = paper_cavity.fundamental
    t = 1e3 / w1
    wave = WaveParams(eps, resonant_drive_frequency(1, 2, paper_cavity), t)
    b = resonant_coefficients(1, 2, wave, paper_cavity)
    assert b.beta_mn(2, 1) == pytest.approx(eps / 4 * math.sqrt(2) * w1 * t, rel=1e-14)
    assert b.beta_mn(2, 1) == b.beta_mn(1, 2)
    assert np.count_nonzero(b.beta) == 2
    np.testing.assert_array_equal(b.alpha, np.eye(24))
    assert b.notes["prefactor"] == "per_pair"


def test_resonant_pair_reduces_to_textbook_form(paper_cavity):
    eps, n, m = 1e-4, 11, 10
    w1 = paper_cavity.fundamental
    t = 2e3 / w1
    wave = WaveParams(eps, resonant_drive_frequency(m, n, paper_cavity), t)
    b = resonant_coefficients(m, n, wave, paper_cavity)
    textbook = eps / 4 * math.sqrt(n / m) * mode_frequency(m, paper_cavity) * t
    assert b.beta_mn(n, m) == pytest.approx(textbook, rel=1e-14)
    paper = resonant_coefficients(m, n, wave, paper_cavity, paper_prefactor=True)
    on = paper.beta[paper.beta != 0]
    assert len(on) == 20 and np.all(on == on[0])


def test_resonant_zero_time(small_cavity):
    wave = WaveParams(1e-4, 3 * small_cavity.fundamental, 0.0)
    with pytest.warns(RegimeWarning):
        b = resonant_coefficients(1, 2, wave, small_cavity)
    np.testing.assert_array_equal(b.beta, 0)


def test_resonant_gates(small_cavity):
    w1 = small_cavity.fundamental
    with pytest.raises(GateError, match="even"):
        resonant_coefficients(1, 3, WaveParams(1e-4, 4 * w1, 1.0), small_cavity)
    with pytest.raises(GateError, match="off"):
        resonant_coefficients(1, 2, WaveParams(1e-4, 3.01 * w1, 1.0), small_cavity)
    with pytest.warns(RegimeWarning, match="omega_1"):
        check_long_time(WaveParams(1e-4, 3 * w1, 50 / w1), small_cavity)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        check_long_time(WaveParams(1e-4, 3 * w1, 150 / w1), small_cavity)


@pytest.mark.parametrize("pair", [(1, 2), (2, 3), (3, 4), (1, 4)])
@pytest.mark.parametrize("w1t", [1e3, 1e4, 1e5])
def test_resonant_agrees_with_exact_integral(small_cavity, pair, w1t):
    """Every resonant entry matches the exact-integral coefficient to O(1/(w1 t))."""
    m, n = pair
    w1 = small_cavity.fundamental
    wave = WaveParams(1e-5, resonant_drive_frequency(m, n, small_cavity), w1t / w1)
    res = resonant_coefficients(m, n, wave, small_cavity)
    ex = time_dependent_coefficients(wave, small_cavity)
    mask = res.beta != 0
    np.testing.assert_allclose(np.abs(ex.beta[mask]), np.abs(res.beta[mask]), rtol=0.01)


def test_particle_number(small_cavity):
    assert particle_number(discrete_coefficients(0.0, small_cavity), 3) == 0
    w1 = small_cavity.fundamental
    eps = 1e-5
    n_at = []
    for t in (1e3 / w1, 2e3 / w1):
        wave = WaveParams(eps, 3 * w1, t)
        b = resonant_coefficients(1, 2, wave, small_cavity)
        n_at.append(particle_number(b, 1))
    assert n_at[0] == pytest.approx(eps**2 / 16 * 2 * 1e6, rel=1e-12)
    assert n_at[1] / n_at[0] == pytest.approx(4, rel=1e-12)
    with pytest.raises(DomainError):
        particle_number(b, 9)


def test_set_shape_validation(small_cavity):
    with pytest.raises(DomainError):
        BogoliubovSet(np.eye(3), np.zeros((3, 3)), "discrete", small_cavity, 0.0)
    with pytest.raises(DomainError):
        BogoliubovSet(np.eye(8), np.zeros((8, 8)), "bogus", small_cavity, 0.0)
