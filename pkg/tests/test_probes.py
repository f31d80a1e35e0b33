import math
import pytest
import numpy as np
from abresolvent.analysis.grid import GridOperator, GridSpec
from abresolvent.analysis.probes import (check_exponent_window, conjugate_exponent, discrete_norm, duality_gap,
                                         probe_family, probe_norm)


@pytest.fixture
def return_identity():
    grid = GridSpec(0.05, 4.0, 6, 8)
    return GridOperator(grid, np.eye(grid.size, dtype=complex))


@pytest.mark.parametrize("p, q", [(1.2, 6.0), (1.0, 5.0), (1.3, math.inf)])
def test_admissible_window(p, q):
    check_exponent_window(p, q)


@pytest.mark.parametrize("p, q, message", [(1.4, 6.0, "p must"),
                                           (1.2, 4.0, "q must"),
                                           (1.3, 5.0, "1/p - 1/q"),
                                           (0.9, 8.0, "p must"),
                                           (1.0, math.inf, "1/p - 1/q")])
def test_rejected_window(p, q, message):
    with pytest.raises(ValueError) as info:
        check_exponent_window(p, q)
    assert message in str(info.value)


def test_conjugate_exponent():
    assert conjugate_exponent(1.0) == math.inf
    assert conjugate_exponent(math.inf) == 1.0
    assert math.isclose(conjugate_exponent(1.25), 5.0)


def test_discrete_norm():
    grid = GridSpec(0.1, 1.0, 5, 4)
    ones = np.ones(grid.size)
    area = math.pi * (1.0 - 0.01)
    assert math.isclose(discrete_norm(ones, grid.weights, 2.0), math.sqrt(area), rel_tol=1e-12)
    assert discrete_norm(2 * ones, grid.weights, math.inf) == 2.0
    with pytest.raises(ValueError):
        discrete_norm(ones, grid.weights, 0.5)


def test_probe_family_is_versioned(return_identity):
    probes = probe_family(return_identity.grid)
    ids = [p.probe_id for p in probes]
    assert len(ids) == len(set(ids))
    assert all(p.values.shape == (return_identity.grid.size,) for p in probes)
    with pytest.raises(ValueError):
        probe_family(return_identity.grid, version="0")


def test_identity_probe_norm(return_identity):
    result = probe_norm(return_identity, 2.0, 2.0, enforce_window=False)
    assert math.isclose(result.value, 1.0, rel_tol=1e-12)
    assert list(result.ratios.columns) == ['probe_id', 'ratio']
    assert duality_gap(return_identity, 2.0, 2.0) < 1e-12
    with pytest.raises(ValueError):
        probe_norm(return_identity, 2.0, 2.0)
    with pytest.raises(TypeError):
        probe_norm(np.eye(3), 1.2, 6.0)
