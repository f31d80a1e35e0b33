import math
import pytest
import numpy as np
from scipy.special import hankel1
from abresolvent.specfun import (CROSSOVER, SmoothCutoff, DyadicCutoff, hankel0_plus, hankel0_minus,
                                 hankel_amplitude_asymptotic, split_ab, finite_difference_bounds)


@pytest.fixture
def return_log_grid():
    return np.geomspace(1e-3, 50.0, 200)


def test_hankel_matches_scipy(return_log_grid):
    r = return_log_grid
    ours = hankel0_plus(r)
    reference = hankel1(0, r)
    assert np.max(np.abs(ours - reference) / np.abs(reference)) < 1e-9


def test_hankel_continuous_at_crossover():
    below = hankel0_plus(CROSSOVER * (1 - 1e-12))
    above = hankel0_plus(CROSSOVER * (1 + 1e-12))
    assert abs(below - above) < 1e-9


def test_hankel_minus_is_conjugate():
    assert hankel0_minus(2.0) == np.conj(hankel0_plus(2.0))


def test_hankel_scalar_and_invalid():
    assert isinstance(hankel0_plus(1.0), complex)
    with pytest.raises(ValueError):
        hankel0_plus(0.0)
    with pytest.raises(ValueError):
        hankel0_plus(np.array([1.0, -1.0]))


def test_amplitude_factor(return_log_grid):
    r = return_log_grid
    rebuilt = np.exp(1j * r) * r ** -0.5 * hankel_amplitude_asymptotic(r)
    assert np.allclose(rebuilt, hankel1(0, r), rtol=1e-9)
    assert abs(hankel_amplitude_asymptotic(1e4) - math.sqrt(2 / math.pi) * np.exp(-0.25j * math.pi)) < 1e-4


def test_cutoff_kinds():
    for kind in SmoothCutoff.KINDS:
        chi = SmoothCutoff(kind)
        assert chi(0.1) == 1.0
        assert chi(0.9) == 0.0
        values = chi(np.linspace(0.5, 0.75, 50))
        assert np.all(np.diff(values) <= 1e-15)
    with pytest.raises(ValueError):
        SmoothCutoff('box')
    with pytest.raises(ValueError):
        SmoothCutoff('bump', 0.8, 0.5)


def test_split_reconstruction(return_log_grid):
    split = split_ab(return_log_grid)
    assert split.reconstruction_error() < 1e-10
    r = return_log_grid
    assert np.all(split.a_part[r <= 0.5] == 0)
    assert np.all(split.b_part[r >= 0.75] == 0)


def test_split_with_smoothstep():
    split = split_ab(np.linspace(0.4, 0.9, 30), SmoothCutoff('smoothstep'))
    assert split.reconstruction_error() < 1e-10
    with pytest.raises(TypeError):
        split_ab(1.0, cutoff='bump')


def test_dyadic_partition_of_unity():
    r = np.geomspace(1e-3, 1e4, 500)
    assert np.max(np.abs(DyadicCutoff.partition_sum(r) - 1.0)) < 1e-12


def test_dyadic_support():
    beta = DyadicCutoff(3)
    assert beta(8.0 * 0.7) == 0.0
    assert beta(8.0 * 2.7) == 0.0
    assert beta(8.0 * 1.5) > 0.0
    assert math.isclose(DyadicCutoff(0)(1e-4), 1.0, abs_tol=1e-12)
    with pytest.raises(ValueError):
        DyadicCutoff(-1)
    with pytest.raises(TypeError):
        DyadicCutoff(1.5)


def test_finite_difference_bounds_of_power():
    r = np.geomspace(0.1, 10.0, 400)
    report = finite_difference_bounds(lambda x: x ** 3, r, [0, 1, 2],
                                      lambda x, k: math.factorial(3) / math.factorial(3 - k) * x ** (3 - k))
    for k in (0, 1, 2):
        assert abs(report.max_ratio[k] - 1.0) < 1e-3


def test_finite_difference_rejects_coarse_grid():
    with pytest.raises(ValueError):
        finite_difference_bounds(np.sin, np.geomspace(0.1, 10.0, 20), [1], lambda x, k: np.ones_like(x))
