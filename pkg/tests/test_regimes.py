import math
import pytest
import numpy as np
from abresolvent.regimes import Branch, Regime, SpectralParameter


def test_regime_labels():
    assert Regime.from_label('i') == Regime.NEGATIVE
    assert Regime.from_label(' II ') == Regime.POSITIVE
    assert Regime.from_label('boundary') == Regime.BOUNDARY
    assert Regime.BOUNDARY.label == 'iii'
    with pytest.raises(ValueError):
        Regime.from_label('iv')
    with pytest.raises(TypeError):
        Regime.from_label(1.5)


def test_branch_from_sign():
    assert Branch.from_sign('+') == Branch.PLUS
    assert Branch.from_sign(-3.0) == Branch.MINUS
    with pytest.raises(ValueError):
        Branch.from_sign(0)


@pytest.mark.parametrize("sigma, regime", [(-1.0, Regime.NEGATIVE),
                                           (complex(-0.5, 2.0), Regime.NEGATIVE),
                                           (complex(0.6, 0.8), Regime.POSITIVE),
                                           (complex(0.999, 0.05), Regime.BOUNDARY)])
def test_regime_of_parameter(sigma, regime):
    assert SpectralParameter(sigma).regime == regime


def test_positive_axis_requires_branch():
    with pytest.raises(ValueError):
        SpectralParameter(2.0)
    with pytest.raises(ValueError):
        SpectralParameter(0.0, branch=Branch.PLUS)
    sigma = SpectralParameter(4.0, branch='-')
    assert sigma.regime == Regime.BOUNDARY
    assert sigma.boundary_branch == Branch.MINUS
    assert sigma.wavenumber() == -2.0


def test_from_delta_decomposition():
    for delta in (-0.9, -0.05, 0.3, 1.0):
        for sign in (1, -1):
            sigma = SpectralParameter.from_delta(delta, sign=sign, modulus=3.0)
            assert math.isclose(sigma.delta, delta, abs_tol=1e-14)
            assert math.isclose(sigma.modulus, 3.0)
            assert abs(sigma.reconstruct() - sigma.sigma) < 1e-13
    with pytest.raises(ValueError):
        SpectralParameter.from_delta(1.5)


def test_wavenumber_in_upper_half_plane():
    for sigma in (complex(-1.0, 0.0), complex(0.6, -0.8), complex(-0.3, 0.2)):
        k = SpectralParameter(sigma).wavenumber()
        assert k.imag > 0
        assert abs(k ** 2 - sigma) < 1e-13


def test_normalized_and_boundary_lambda():
    sigma = SpectralParameter(complex(3.0, 0.3))
    unit = sigma.normalized()
    assert math.isclose(unit.modulus, 1.0)
    assert sigma.boundary_lambda == pytest.approx(math.sqrt(3.0 / abs(complex(3.0, 0.3))))
    assert SpectralParameter.boundary(2.0).sigma == 4.0
    assert np.isclose(sigma.to_dict()['delta'], sigma.delta)


def test_strip_edge_belongs_to_positive_regime():
    assert SpectralParameter.from_delta(0.1).regime == Regime.POSITIVE
    assert SpectralParameter.from_delta(-0.1).regime == Regime.POSITIVE
    assert SpectralParameter.from_delta(0.0999).regime == Regime.BOUNDARY
    assert SpectralParameter.from_delta(0.3, epsilon=0.3).regime == Regime.POSITIVE
