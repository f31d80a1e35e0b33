import math
import pytest
import numpy as np
from abresolvent.geometry import (PolarPoint, CirculationProfile, distance, diffractive_distance, diffractive_angle,
                                  diffractive_phase_derivatives, flux_phase)


@pytest.fixture
def return_fourier_profile():
    return CirculationProfile.fourier({"cos": [0.3, 0.2], "sin": [0.1]})


def test_polar_point_reduces_angle():
    x = PolarPoint(1.0, -0.5)
    assert math.isclose(x.theta, 2 * math.pi - 0.5)
    assert PolarPoint(2.0, 4 * math.pi).theta == 0.0


def test_polar_point_rejects_bad_input():
    with pytest.raises(ValueError):
        PolarPoint(0.0, 1.0)
    with pytest.raises(TypeError):
        PolarPoint("1", 1.0)
    with pytest.raises(ValueError):
        PolarPoint.from_string("1,2,3")


def test_polar_point_from_string():
    x = PolarPoint.from_string("2, 3.0")
    assert x.r == 2.0 and x.theta == 3.0


def test_distance_matches_cartesian():
    x = PolarPoint(1.3, 0.4)
    y = PolarPoint(0.7, 2.9)
    assert math.isclose(distance(x, y), np.linalg.norm(x.to_cartesian() - y.to_cartesian()), rel_tol=1e-12)


def test_diffractive_distance_at_zero_and_large_s():
    assert math.isclose(diffractive_distance(1.0, 2.0, 0.0), 3.0, rel_tol=1e-14)
    s = np.array([10.0, 25.0, 60.0])
    expected = np.sqrt(1.0 + 4.0 + 4.0 * np.cosh(s))
    assert np.allclose(diffractive_distance(1.0, 2.0, s), expected, rtol=1e-12)


def test_diffractive_angle_inverts_distance():
    s = np.array([1e-6, 0.3, 2.0, 15.0])
    u = diffractive_distance(0.4, 1.7, s)
    assert np.allclose(diffractive_angle(0.4, 1.7, u), s, rtol=1e-8)
    with pytest.raises(ValueError):
        diffractive_angle(1.0, 1.0, 1.0)


def test_phase_derivatives_match_finite_differences():
    r1, r2 = 0.8, 1.5
    s = np.linspace(0.1, 5.0, 20)
    h = 1e-5
    first, second = diffractive_phase_derivatives(r1, r2, s)
    fd1 = (diffractive_distance(r1, r2, s + h) - diffractive_distance(r1, r2, s - h)) / (2 * h)
    fd2 = (diffractive_distance(r1, r2, s + h) - 2 * diffractive_distance(r1, r2, s)
           + diffractive_distance(r1, r2, s - h)) / h ** 2
    assert np.allclose(first, fd1, rtol=1e-7)
    assert np.allclose(second, fd2, rtol=1e-4)


def test_constant_profile():
    profile = CirculationProfile.constant(0.5)
    assert profile.is_constant
    assert profile.mean_flux == 0.5
    assert profile.gauge_phase(1.0) == 0.0
    assert profile.to_dict() == {"type": "constant", "alpha": 0.5}


def test_fourier_profile_mean_and_gauge(return_fourier_profile):
    profile = return_fourier_profile
    assert math.isclose(profile.mean_flux, 0.3, abs_tol=1e-12)
    theta = np.linspace(0.0, 2 * math.pi, 9)
    exact = 0.3 * theta + 0.2 * np.sin(theta) + 0.1 * (1 - np.cos(theta))
    assert np.allclose(profile.antiderivative(theta), exact, atol=1e-10)
    assert math.isclose(profile.gauge_phase(2 * math.pi), profile.gauge_phase(0.0), abs_tol=1e-12)


def test_callable_profile_quadrature_table():
    profile = CirculationProfile.from_callable(lambda theta: 0.4 + 0.1 * np.sin(theta))
    assert not profile.is_constant
    assert math.isclose(profile.mean_flux, 0.4, abs_tol=1e-10)
    theta = np.linspace(0.0, 2 * math.pi, 7)
    assert np.allclose(profile.antiderivative(theta), 0.4 * theta + 0.1 * (1 - np.cos(theta)), atol=1e-9)
    with pytest.raises(TypeError):
        CirculationProfile.from_callable(0.4)


def test_fourier_without_harmonics_is_constant():
    assert CirculationProfile.fourier({"cos": [0.25], "sin": [0.0]}).is_constant


def test_profile_from_config():
    profile = CirculationProfile.from_config({"type": "fourier", "coeffs": {"cos": [0.1, 0.05], "sin": []}})
    assert math.isclose(profile.mean_flux, 0.1, abs_tol=1e-12)
    with pytest.raises(ValueError):
        CirculationProfile.from_config({"type": "constant"})
    with pytest.raises(ValueError):
        CirculationProfile.from_config({"type": "unknown"})


def test_flux_phase_is_unimodular(return_fourier_profile):
    value = flux_phase(return_fourier_profile, np.array([0.1, 1.0]), np.array([2.0, 5.5]))
    assert np.allclose(np.abs(value), 1.0)
