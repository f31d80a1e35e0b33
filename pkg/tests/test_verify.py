import math
import pytest
import numpy as np
from abresolvent.analysis.grid import GridSpec
from abresolvent.geometry import diffractive_phase_derivatives, polar_distance
from abresolvent.verify.appendix import (AppendixGrid, amplitude_profile, appendix_reports, b_zero_limit,
                                         check_appendix, check_appendix_slices, model_weight, reduced_difference)
from abresolvent.verify.dyadic import (DiffractiveSuite, MultiplierSuite, angular_window, check_diffractive_dyadic,
                                       check_direct_dyadic, check_multiplier_bound, distance_derivatives, dyadic_levels,
                                       far_amplitude, model_h, morse_frequency, quadratic_lorentz_integral)
from abresolvent.verify.facts import (angle_grid, bracket_integrals, check_B_facts, check_B_integrability,
                                      check_cutoff_stability, check_g2_claim, check_phase_derivatives,
                                      check_radial_envelopes)
from abresolvent.verify.schur import (check_q4_divergence, check_schur_bound, check_schur_sup_bound,
                                      disc_power_norm, envelope_operator)


@pytest.fixture
def return_appendix_grid():
    return AppendixGrid(n_s=64, n_b=8, n_alpha=9, j_values=(1, 3), totals=(0.8,), fractions=(0.05, 0.5))


@pytest.fixture
def return_radial_grid():
    return GridSpec(1e-4, 8.0 / 3.0, 120, 1)


def central_difference(func, x, h=1e-6):
    return (func(x + h) - func(x - h)) / (2.0 * h)


# ---------------------------------------------------------------- dyadic pieces

def test_angular_window():
    theta = np.array([math.pi, math.pi + 0.05, math.pi - 0.1, math.pi + 0.2])
    assert np.allclose(angular_window(theta), [1.0, 1.0, 0.0, 0.0])


def test_distance_derivatives():
    r1, r2, delta = 0.7, 1.3, 2.4
    first, second = distance_derivatives(r1, r2, delta)
    assert math.isclose(first, central_difference(lambda t: polar_distance(r1, r2, t), delta), rel_tol=1e-6)
    assert math.isclose(second, central_difference(lambda t: distance_derivatives(r1, r2, t)[0], delta),
                        rel_tol=1e-6)


def test_dyadic_levels():
    assert dyadic_levels(5, (2, 3)) == [2, 3, 2, 3, 2]
    with pytest.raises(ValueError):
        dyadic_levels(0, (2,))
    with pytest.raises(ValueError):
        dyadic_levels(3, ())


def test_far_amplitude_vanishes_near_origin():
    values = far_amplitude(np.array([1e-3, 0.4, 2.0]))
    assert values[0] == 0 and values[1] == 0
    # a(r) → e^{−iπ/4}√(2/π)
    assert abs(far_amplitude(np.array([1e6]))[0] - np.exp(-0.25j * math.pi) * math.sqrt(2.0 / math.pi)) < 1e-6


def test_morse_frequency_is_phase_curvature():
    r1, r2, j = 0.3, 1.1, 5
    second = diffractive_phase_derivatives(r1, r2, 0.0)[1]
    assert math.isclose(morse_frequency(j, r1, r2), 2.0 ** j * 0.5 * float(second), rel_tol=1e-12)


def test_quadratic_lorentz_integral():
    b_sq = 0.3
    assert math.isclose(abs(quadratic_lorentz_integral(0.0, b_sq)), math.pi / math.sqrt(2.0 * b_sq), rel_tol=1e-12)
    suite = DiffractiveSuite(j_range=(3,), verbose=False)
    assert suite._closed_form_error(3, 0.4, 1.0, 0.8) < 1e-6
    with pytest.raises(ValueError):
        quadratic_lorentz_integral(1.0, 0.0)
    assert model_h(3, 0.4, 1.0, 0.0) == 0


def test_direct_dyadic_run():
    report = check_direct_dyadic(j_range=(2, 3), samples=4, seed=1, verbose=False)
    assert report.claim_id == 'direct_dyadic'
    assert report.sample_count + report.skipped == 4
    assert math.isfinite(report.max_ratio)


def test_multiplier_run():
    reports = MultiplierSuite(j_range=(2, 3), verbose=False).run(8, seed=2)
    assert [r.claim_id for r in reports] == ['multiplier', 'multiplier_van_der_corput']
    assert math.isfinite(reports[0].max_ratio)
    single = check_multiplier_bound(j_range=(2, 3), samples=8, seed=2, verbose=False)
    assert single.claim_id == 'multiplier'
    assert single.max_ratio == reports[0].max_ratio


def test_diffractive_run():
    reports = check_diffractive_dyadic(3, j_range=(2, 3), samples=4, seed=3, verbose=False)
    assert [r.claim_id for r in reports] == ['diffractive_dyadic_3e', 'diffractive_dyadic_3m', 'diffractive_dyadic_3H',
                                             'diffractive_h_closed_form']
    assert reports[-1].verdict
    with pytest.raises(ValueError):
        check_diffractive_dyadic(4)
    with pytest.raises(ValueError):
        DiffractiveSuite(parts=('4',))
    with pytest.raises(ValueError):
        DiffractiveSuite(j_range=(0, 1))


# ---------------------------------------------------------------- schur envelope

def test_envelope_operator_needs_radial_grid():
    with pytest.raises(ValueError):
        envelope_operator(3, GridSpec(0.1, 2.0, 4, 4))


def test_schur_norms_decrease(return_radial_grid):
    report = check_schur_bound(j_range=(2, 3, 4), grid=return_radial_grid)
    norms = report.details['norm'].to_numpy()
    assert np.all(np.diff(norms) < 0)
    with pytest.raises(ValueError):
        check_schur_bound(p=1.2, q=4.0)
    with pytest.raises(ValueError):
        check_schur_bound(j_range=(2,))


def test_schur_sup_corner(return_radial_grid):
    assert check_schur_sup_bound((2, 4), return_radial_grid).verdict


def test_q4_divergence():
    radius = 100.0
    exact = 2.0 * math.pi * (math.log(1.0 + radius) + 1.0 / (1.0 + radius) - 1.0)
    assert math.isclose(disc_power_norm(4.0, radius), exact, rel_tol=1e-8)
    report = check_q4_divergence()
    assert report.claim_id == 'schur_q4_divergence'
    assert report.verdict
    with pytest.raises(ValueError):
        check_q4_divergence(radii=(10.0, 100.0))


# ---------------------------------------------------------------- appendix inequalities

def test_reduced_difference_slices():
    s = np.geomspace(1e-3, 1.0, 50)
    assert np.all(reduced_difference(s, 0.4, 0.0) == 0)
    assert np.allclose(reduced_difference(s, 0.0, 0.6), b_zero_limit(s, 0.6), atol=1e-10)
    assert reduced_difference(0.0, 0.0, 0.6, k=1) == 0.6
    with pytest.raises(ValueError):
        reduced_difference(s, 0.1, 0.2, k=2)


def test_analytic_derivatives():
    s0, b, alpha = 0.3, 0.5, 0.7
    fd = central_difference(lambda s: float(reduced_difference(s, b, alpha, 0)), s0)
    assert math.isclose(float(reduced_difference(s0, b, alpha, 1)), fd, rel_tol=1e-6)
    fd = central_difference(lambda s: float(model_weight(s, b, alpha)[0]), s0)
    assert math.isclose(float(model_weight(s0, b, alpha)[1]), fd, rel_tol=1e-6)
    value, derivative = amplitude_profile(3, 0.5, 1.0, np.array([0.4]))
    fd = central_difference(lambda s: amplitude_profile(3, 0.5, 1.0, np.array([s]))[0][0], 0.4)
    assert abs(derivative[0] - fd) < 1e-6 * abs(derivative[0])


def test_appendix_slices(return_appendix_grid):
    reports = check_appendix_slices(return_appendix_grid)
    assert [r.claim_id for r in reports] == ['appendix_b0_slice', 'appendix_alpha0_slice',
                                             'appendix_angular_reduction']
    assert all(r.verdict for r in reports)


@pytest.mark.parametrize("inequality", [1, 2, 3])
def test_appendix_inequality(inequality, return_appendix_grid):
    report = check_appendix(inequality, return_appendix_grid)
    assert report.claim_id == f"appendix_{inequality}"
    assert report.verdict
    assert report.sample_count > len(report.details)


def test_appendix_grid():
    with pytest.raises(ValueError):
        AppendixGrid(n_s=4)
    with pytest.raises(ValueError):
        appendix_reports(4)
    assert AppendixGrid.for_points(10 ** 7).n_s * 48 * 41 * 2 >= 10 ** 7
    assert AppendixGrid().doubled().n_alpha == 81


# ---------------------------------------------------------------- bracket facts

def test_angle_grid_skips_zero():
    phi = angle_grid(8)
    assert phi.size == 8 and np.all(phi > 0) and np.all(phi < 2 * math.pi)
    with pytest.raises(ValueError):
        angle_grid(2)


def test_exponential_bracket_integral():
    values = bracket_integrals(0.4, angle_grid(8))
    assert np.allclose(values['exponential'], 2.5, rtol=1e-8)
    assert np.all(values['amplitude'] > 0)
    with pytest.raises(ValueError):
        bracket_integrals(0.0, angle_grid(8))


def test_bracket_facts_small():
    report = check_B_facts(alphas=(-0.5, 0.3), n_angles=8)
    assert report.claim_id == 'bracket_integrals'
    assert report.verdict
    assert set(report.details['fact']) == {'exponential', 'sinh', 'cosh'}


def test_amplitude_integrability_small():
    report = check_B_integrability(alphas=(-0.5, 0.3), n_angles=8)
    assert report.claim_id == 'amplitude_integrability'
    assert report.sample_count == 16
    assert report.verdict
    details = report.details
    assert np.allclose(details['ratio'], details['direct'] + details['diffractive'])
    expected = bracket_integrals(0.3, angle_grid(8))['amplitude'] / (4 * math.pi ** 2)
    assert np.allclose(details[details['alpha'] == 0.3]['diffractive'], expected, rtol=1e-10)
    assert np.all(details['direct'] <= 1.0 / (4 * math.pi ** 2) + 1e-15)


def test_phase_lower_bounds():
    first = check_phase_derivatives(40, seed=5)
    second = check_phase_derivatives(40, seed=5)
    assert first.verdict
    assert first.max_ratio == second.max_ratio


def test_cutoff_stability():
    report = check_cutoff_stability()
    assert report.verdict
    assert report.sample_count == 6
    assert report.max_ratio >= 1.0


def test_near_diffractive_log():
    report = check_g2_claim(totals=(0.01, 0.3), fractions=(0.5,), alphas=(0.5,), n_angles=8)
    assert report.claim_id == 'near_diffractive_log'
    assert math.isfinite(report.max_ratio)
    with pytest.raises(ValueError):
        check_g2_claim(totals=(0.8,))


def test_radial_envelopes_small():
    report = check_radial_envelopes(points=3, deltas=(-0.6, 0.6), tol=1e-8)
    assert report.claim_id == 'radial_envelopes'
    assert report.verdict
    assert set(report.details['regime']) == {'negative', 'positive'}
