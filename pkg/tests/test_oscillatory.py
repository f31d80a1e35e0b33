import math
import pytest
import numpy as np
from scipy.special import fresnel
from abresolvent.oscillatory import (OscillatoryProblem, QuadratureError, build_fixture, integrate, load_corpus,
                                     nonstationary_decay_check, run_corpus, van_der_corput_check)


def linear_problem(frequency, interval=(0.0, 1.0), amplitude=None):
    return OscillatoryProblem(phase=lambda x: np.asarray(x, dtype=float),
                              amplitude=amplitude if amplitude is not None else
                              (lambda x: np.ones_like(np.asarray(x, dtype=float))),
                              frequency=frequency,
                              interval=interval,
                              phase_derivative=lambda x: np.ones_like(np.asarray(x, dtype=float)),
                              phase_second_derivative=lambda x: np.zeros_like(np.asarray(x, dtype=float)))


@pytest.mark.parametrize("lam", [0.5, 10.0, 1000.0, -250.0])
def test_linear_phase_exact(lam):
    value, error = integrate(linear_problem(lam), tol=1e-12)
    expected = (np.exp(1j * lam) - 1.0) / (1j * lam)
    assert abs(value - expected) < 1e-11
    assert error < 1e-10


@pytest.mark.parametrize("lam", [16.0, 512.0, 8192.0])
def test_stationary_phase_fresnel(lam):
    problem = OscillatoryProblem(phase=lambda x: np.asarray(x, dtype=float) ** 2,
                                 amplitude=lambda x: np.ones_like(np.asarray(x, dtype=float)),
                                 frequency=lam,
                                 interval=(-1.0, 1.0),
                                 phase_derivative=lambda x: 2.0 * np.asarray(x, dtype=float),
                                 phase_second_derivative=lambda x: np.full(np.shape(x), 2.0))
    value, _ = integrate(problem, tol=1e-11)
    # ∫_{−1}^{1} e^{iλx²} = 2√(π/2λ)(C(z) + iS(z)), z = √(2λ/π)
    s, c = fresnel(math.sqrt(2.0 * lam / math.pi))
    expected = 2.0 * math.sqrt(math.pi / (2.0 * lam)) * (c + 1j * s)
    assert abs(value - expected) < 1e-9


def test_finite_difference_fallback_matches():
    exact = linear_problem(30.0)
    fallback = OscillatoryProblem(phase=exact.phase, amplitude=exact.amplitude, frequency=30.0,
                                  interval=(0.0, 1.0))
    assert fallback.finite_difference_fallback
    assert abs(integrate(fallback, tol=1e-11)[0] - integrate(exact, tol=1e-11)[0]) < 1e-9


def test_infinite_interval_with_tail():
    problem = linear_problem(1.0, interval=(0.0, np.inf), amplitude=lambda x: np.exp(-np.asarray(x, dtype=float)))
    value, _ = integrate(problem, tol=1e-11)
    assert abs(value - 1.0 / (1.0 - 1j)) < 1e-9


def test_infinite_interval_algebraic_decay():
    problem = linear_problem(2.0, interval=(0.0, np.inf),
                             amplitude=lambda x: 1.0 / (1.0 + np.asarray(x, dtype=float)) ** 2)
    value, _ = integrate(problem, tol=1e-10)
    reference, _ = integrate(linear_problem(2.0, interval=(0.0, 400.0),
                                            amplitude=lambda x: 1.0 / (1.0 + np.asarray(x, dtype=float)) ** 2),
                             tol=1e-12)
    # tail beyond 400 is O(1/400²)
    assert abs(value - reference) < 1e-5


def test_vector_amplitude():
    problem = linear_problem(7.0, amplitude=lambda x: np.stack([np.ones_like(x), np.asarray(x)], axis=1))
    value, _ = integrate(problem, tol=1e-12)
    assert value.shape == (2,)
    assert abs(value[0] - (np.exp(7j) - 1.0) / 7j) < 1e-11


def test_problem_validation():
    with pytest.raises(ValueError):
        linear_problem(1.0, interval=(1.0, 1.0))
    with pytest.raises(ValueError):
        linear_problem(np.inf)
    with pytest.raises(TypeError):
        OscillatoryProblem(phase=1.0, amplitude=np.ones_like, frequency=1.0, interval=(0.0, 1.0))
    with pytest.raises(ValueError):
        integrate(linear_problem(1.0), tol=0.0)


def test_quadrature_error_carries_estimate():
    problem = linear_problem(1.0, amplitude=lambda x: np.abs(np.asarray(x) - 1.0 / 3.0) ** -0.5)
    with pytest.raises(QuadratureError) as info:
        integrate(problem, tol=1e-14, max_panels=20)
    assert info.value.error > 0


def test_nonstationary_decay():
    corpus = load_corpus()
    row = corpus[corpus['fixture'] == 'linear_bump'].iloc[0]
    report = nonstationary_decay_check(build_fixture(row), K=2)
    assert report.passed


def test_decay_check_detects_stationary_phase():
    corpus = load_corpus()
    row = corpus[corpus['fixture'] == 'quadratic_one'].iloc[0]
    report = nonstationary_decay_check(build_fixture(row), K=1)
    assert not report.passed
    assert 'stationary' in report.reason


def test_van_der_corput_constant():
    corpus = load_corpus()
    row = corpus[corpus['fixture'] == 'quadratic_one'].iloc[0]
    report = van_der_corput_check(build_fixture(row), k=2, exponents=range(4, 10))
    assert math.isfinite(report.max_ratio)
    assert report.trend_slope <= 0.15


def test_corpus_table():
    table = run_corpus(lambdas=[16.0, 64.0])
    assert list(table.columns) == ['fixture', 'lambda', 'abs_I', 'bound', 'ratio']
    assert len(table) == 2 * len(load_corpus())
    assert np.all(np.isfinite(table['ratio']))
    with pytest.raises(ValueError):
        build_fixture({"phase": "sine", "amplitude": "one", "a": 0, "b": 1, "params": ""})
