import math
import time
import pytest
import numpy as np
from concurrent.futures import ThreadPoolExecutor
from scipy.special import hankel1, iv, jv, kv
import abresolvent.kernel as kernel
from abresolvent.geometry import CirculationProfile, PolarPoint, distance
from abresolvent.kernel import (EXPECTED_NORMALIZATION, TABLE_R_COARSE, TABLE_R_MIN, KernelContext, BoundaryRadial,
                                HankelRadial, RadialTransform, angular_A,
                                angular_B, bracket_parts, calibrate_normalization, diffraction_bracket,
                                diffractive_terms, direct_angular_factor, direct_terms, free_oracle,
                                radial_lambda_integrals, resolvent_kernel, spectral_measure_kernel, table_nodes)
from abresolvent.regimes import Branch, SpectralParameter


@pytest.fixture
def return_context():
    return KernelContext(tol=1e-10, radial_method='hankel', normalization=EXPECTED_NORMALIZATION)


def partial_wave_kernel(alpha, r1, r2, delta, terms=80):
    # (1/2π)Σ_m e^{imΔ}I_ν(r<)K_ν(r>), ν = |m + α|; real for Δ ∈ {0, π}
    small, large = min(r1, r2), max(r1, r2)
    total = 0.0
    for m in range(-terms, terms + 1):
        nu = abs(m + alpha)
        total += math.cos(m * delta) * iv(nu, small) * kv(nu, large)
    return total / (2 * math.pi)


def test_direct_angular_factor_branches():
    alpha = 0.3
    assert direct_angular_factor(alpha, 1.0) == pytest.approx(np.exp(1j * alpha) / (4 * math.pi ** 2))
    wrapped = np.exp(1j * alpha * 1.5 * math.pi) * np.exp(-2j * math.pi * alpha) / (4 * math.pi ** 2)
    assert direct_angular_factor(alpha, 1.5 * math.pi) == pytest.approx(wrapped)
    mean = 0.5 * np.exp(1j * alpha * math.pi) * (1 + np.exp(-2j * math.pi * alpha)) / (4 * math.pi ** 2)
    assert direct_angular_factor(alpha, math.pi) == pytest.approx(mean)
    with pytest.raises(ValueError):
        direct_angular_factor(alpha, 7.0)


def test_bracket_matches_direct_formula():
    alpha = 0.35
    s = np.array([0.05, 0.7, 3.0])
    phi = 2.1
    direct = math.sin(abs(alpha) * math.pi) * np.exp(-abs(alpha) * s) + math.sin(alpha * math.pi) * \
        ((np.exp(-s) - math.cos(phi)) * np.sinh(alpha * s) - 1j * math.sin(phi) * np.cosh(alpha * s)) / \
        (np.cosh(s) - math.cos(phi))
    assert np.allclose(diffraction_bracket(alpha, s, phi), direct, rtol=1e-12)


def test_bracket_limits():
    exp_term, sinh_term, cosh_term = bracket_parts(0.4, 0.0, 0.0)
    assert exp_term == 1.0
    assert sinh_term == pytest.approx(-0.8)
    assert cosh_term == 0.0
    large = bracket_parts(0.4, 800.0, 1.0)
    assert all(np.isfinite(part) for part in large)


def test_lambda_integrals_give_macdonald_function():
    for r in (0.3, 1.0, 4.0):
        plus, minus = radial_lambda_integrals(r, SpectralParameter(-1.0))
        assert abs(plus + minus - kv(0, r)) < 1e-8


def test_radial_profiles():
    u = np.array([0.2, 0.6, 2.0, 20.0])
    hankel = HankelRadial(1.0)
    assert np.allclose(hankel.full(u), np.exp(1j * u) * hankel.far(u) + hankel.near(u), rtol=1e-10)
    boundary = BoundaryRadial(Branch.MINUS)
    assert np.allclose(boundary.full(u), np.conj(hankel.full(u)), rtol=1e-9)
    assert np.allclose(boundary.full(u), np.exp(-1j * u) * boundary.far(u) + boundary.near(u), rtol=1e-9)
    with pytest.raises(ValueError):
        HankelRadial(complex(1.0, -0.1))


@pytest.mark.parametrize("sigma", [-1.0, complex(-0.4, 0.9), complex(0.6, 0.8), complex(0.6, -0.8)])
def test_zero_flux_is_free_kernel(return_context, sigma):
    profile = CirculationProfile.constant(0.0)
    x = PolarPoint(0.8, 0.3)
    y = PolarPoint(1.9, 2.2)
    value = resolvent_kernel(profile, sigma, x, y, return_context)
    assert value.d1 == 0 and value.d2 == 0
    assert abs(value.total - free_oracle(sigma, x, y)) < 1e-9 * abs(free_oracle(sigma, x, y))


@pytest.mark.parametrize("branch", [Branch.PLUS, Branch.MINUS])
def test_zero_flux_boundary_kernel(return_context, branch):
    profile = CirculationProfile.constant(0.0)
    sigma = SpectralParameter.boundary(1.5, branch)
    x = PolarPoint(0.5, 0.0)
    y = PolarPoint(1.2, 1.0)
    value = resolvent_kernel(profile, sigma, x, y, return_context)
    assert value.branch == branch
    assert abs(value.total - free_oracle(sigma, x, y)) < 1e-8


@pytest.mark.parametrize("alpha", [0.3, -0.45, 0.8])
@pytest.mark.parametrize("delta", [0.0, math.pi])
def test_flux_kernel_matches_partial_waves(return_context, alpha, delta):
    profile = CirculationProfile.constant(alpha)
    x = PolarPoint(1.0, 0.4)
    y = PolarPoint(2.0, 0.4 + delta)
    value = resolvent_kernel(profile, -1.0, x, y, return_context)
    expected = partial_wave_kernel(alpha, 1.0, 2.0, delta)
    assert abs(value.total - expected) < 1e-6 * abs(expected)


def test_kernel_scaling(return_context):
    profile = CirculationProfile.constant(0.25)
    x = PolarPoint(0.6, 0.1)
    y = PolarPoint(1.1, 2.5)
    scaled = resolvent_kernel(profile, -4.0, x, y, return_context).total
    unit = resolvent_kernel(profile, -1.0, x.scaled(2.0), y.scaled(2.0), return_context).total
    assert abs(scaled - unit) < 1e-12 * abs(unit)


def test_kernel_input_checks(return_context):
    profile = CirculationProfile.constant(0.2)
    x = PolarPoint(1.0, 0.0)
    with pytest.raises(ValueError):
        resolvent_kernel(profile, -1.0, x, x, return_context)
    with pytest.raises(TypeError):
        resolvent_kernel(0.2, -1.0, x, PolarPoint(2.0, 0.0), return_context)
    with pytest.raises(ValueError):
        resolvent_kernel(profile, 2.0, x, PolarPoint(2.0, 0.0), return_context)
    with pytest.raises(ValueError):
        KernelContext(radial_method='series')


def test_kernel_value_dict(return_context):
    value = resolvent_kernel(CirculationProfile.constant(0.5), -1.0, PolarPoint(1.0, 0.0), PolarPoint(1.5, 1.0),
                             return_context)
    data = value.to_dict()
    assert set(data) == {"g1", "g2", "d1", "d2", "total", "error", "regime", "branch"}
    assert data['regime'] == 'i'
    assert abs(value.parts() * EXPECTED_NORMALIZATION * 1j / (4 * math.pi) - value.total) < 1e-13


def test_calibration_recovers_expected_constant():
    context = KernelContext(radial_method='hankel')
    value, variance = calibrate_normalization(context, pairs=10, seed=3)
    assert value == pytest.approx(EXPECTED_NORMALIZATION, rel=1e-9)
    assert variance < 1e-12


def test_free_spectral_measure(return_context):
    x = PolarPoint(0.7, 0.2)
    y = PolarPoint(1.4, 1.7)
    lam = 1.3
    value = spectral_measure_kernel(CirculationProfile.constant(0.0), lam, x, y, return_context)
    expected = lam * jv(0, lam * distance(x, y)) / (2 * math.pi)
    assert abs(value - expected) < 1e-8


def test_angular_A_is_hermitian():
    constant = CirculationProfile.constant(0.3)
    assert angular_A(constant, 0.4, 1.4) == pytest.approx(direct_angular_factor(0.3, 1.0))
    profile = CirculationProfile.fourier({"cos": [0.3, 0.2], "sin": [0.1]})
    theta1, theta2 = np.array([0.2, 0.5, 1.0]), np.array([1.1, 4.5, 6.0])
    forward = angular_A(profile, theta1, theta2)
    assert np.allclose(forward, np.conj(angular_A(profile, theta2, theta1)))
    assert np.isclose(abs(forward[0]), 1.0 / (4 * math.pi ** 2))
    with pytest.raises(TypeError):
        angular_A(0.3, 0.0, 1.0)


def test_angular_B_constant_flux():
    s = np.array([0.0, 0.5, 2.0])
    assert np.all(angular_B(CirculationProfile.constant(0.0), s, 0.3, 1.2) == 0)
    value = angular_B(CirculationProfile.constant(0.4), s, 0.3, 1.2)
    assert np.allclose(value, -diffraction_bracket(0.4, s, 0.3 - 1.2 + math.pi) / (4 * math.pi ** 2))
    with pytest.raises(ValueError):
        angular_B(CirculationProfile.constant(0.4), -1.0, 0.3, 1.2)


@pytest.mark.parametrize("r2", [0.3, 2.5])
def test_direct_terms_free_hankel(r2):
    x, y = PolarPoint(1.0, 0.5), PolarPoint(1.0 + r2, 0.5)
    g1, g2 = direct_terms(CirculationProfile.constant(0.0), x, y)
    assert abs(g1 + g2 - hankel1(0, r2) / (4 * math.pi ** 2)) < 1e-9 * abs(hankel1(0, r2))
    assert (g1 == 0) if r2 < 0.5 else (g2 == 0)
    with pytest.raises(ValueError):
        direct_terms(CirculationProfile.constant(0.0), x, x)


def test_diffractive_terms_gauge():
    x, y = PolarPoint(0.8, 0.2), PolarPoint(1.3, 2.9)
    assert diffractive_terms(CirculationProfile.constant(0.0), x, y) == pytest.approx((0j, 0j), abs=1e-14)
    constant = diffractive_terms(CirculationProfile.constant(0.3), x, y)
    profile = CirculationProfile.fourier({"cos": [0.3, 0.2]})
    gauged = diffractive_terms(profile, x, y)
    assert np.allclose(np.abs(gauged), np.abs(constant), rtol=1e-9)
    assert abs(constant[0]) > 0
    with pytest.raises(ValueError):
        diffractive_terms(profile, x, x)


def test_table_nodes_density():
    nodes = table_nodes(15.0, 16)
    assert np.all(np.diff(nodes) > 0)
    assert nodes[0] == pytest.approx(math.log(TABLE_R_MIN))
    assert nodes[-1] == pytest.approx(math.log(15.0))
    split = math.log(TABLE_R_COARSE)
    coarse = np.diff(nodes[nodes <= split + 1e-12])
    fine = np.diff(nodes[nodes >= split - 1e-12])
    assert coarse.mean() / fine.mean() == pytest.approx(4.0, rel=0.1)
    assert np.all(table_nodes(1e-3, 16) <= math.log(1e-3) + 1e-12)


@pytest.mark.parametrize("sigma", [complex(-0.6, 0.8), complex(0.6, -0.8)])
def test_sparse_radial_table_matches_hankel(sigma):
    table = RadialTransform(SpectralParameter(sigma), points_per_decade=16, threads=2)
    assert len(table.x) == len(table_nodes(table.r_max, 16))
    u = np.array([1e-3, 0.05, 0.4, 2.0, 9.0])
    expected = hankel1(0, table.k * u)
    assert np.allclose(table.full(u), expected, rtol=1e-4)


def test_context_table_density():
    context = KernelContext(table_density=16, threads=2)
    table = context.radial(SpectralParameter(-1.0))
    assert isinstance(table, RadialTransform)
    assert len(table.x) == len(table_nodes(table.r_max, 16))
    assert context.radial(SpectralParameter(-4.0)) is table
    with pytest.raises(ValueError):
        RadialTransform(SpectralParameter(-1.0), points_per_decade=2)


def test_kernel_error_estimate(return_context):
    x, y = PolarPoint(0.9, 0.1), PolarPoint(1.6, 2.4)
    free = resolvent_kernel(CirculationProfile.constant(0.0), -1.0, x, y, return_context)
    assert free.error == 0.0
    flux = resolvent_kernel(CirculationProfile.constant(0.3), -1.0, x, y, return_context)
    assert 0.0 < flux.error < 1e-6
    assert flux.error < abs(flux.total)


def test_normalization_calibrated_once(monkeypatch):
    calls = []

    def slow_calibration(context):
        calls.append(context)
        time.sleep(0.05)
        return 1.25, 0.0

    monkeypatch.setattr(kernel, 'calibrate_normalization', slow_calibration)
    context = KernelContext(radial_method='hankel')
    with ThreadPoolExecutor(max_workers=8) as pool:
        values = list(pool.map(lambda _: context.normalization, range(16)))
    assert len(calls) == 1
    assert values == [1.25] * 16
    assert context.normalization_variance == 0.0
