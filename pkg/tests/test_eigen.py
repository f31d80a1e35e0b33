import math
import pytest
import numpy as np
from abresolvent.analysis.eigen import (BirmanSchwinger, PolarHamiltonian, Potential, birman_schwinger_eigen,
                                        dense_eigenvalues, disc_family, eigen_bound_sweep, in_search_region,
                                        match_eigenvalues, search_tiles, secant_refine, shallow_well_eigenvalue)
from abresolvent.analysis.grid import GridSpec
from abresolvent.geometry import CirculationProfile


@pytest.fixture
def return_grid():
    return GridSpec(0.05, 6.0, 12, 8)


def test_disc_potential_on_grid():
    grid = GridSpec(0.25, 4.0, 4, 6)
    potential = Potential.disc(1.0, -2.0 + 1.0j)
    values = potential.on_grid(grid).reshape(4, 6)
    assert np.allclose(values[:2], -2.0 + 1.0j)
    assert np.allclose(values[2:], 0.0)
    expected = abs(-2.0 + 1.0j) ** 1.5 * math.pi * (1.0 - 0.25 ** 2)
    assert math.isclose(potential.lp_integral(grid, 0.5), expected, rel_tol=1e-12)


def test_potential_config():
    potential = Potential.from_config({"type": "disc", "radius": 0.5, "re": -1.0, "im": 0.25})
    assert potential.strength == complex(-1.0, 0.25)
    assert potential.to_dict() == {"type": "disc", "radius": 0.5, "re": -1.0, "im": 0.25}
    with pytest.raises(ValueError):
        Potential.from_config({"type": "disc", "re": 1.0})
    with pytest.raises(ValueError):
        Potential('ring')
    with pytest.raises(ValueError):
        Potential.sampled([1.0, np.nan])
    with pytest.raises(ValueError):
        Potential.sampled(np.ones(5)).on_grid(GridSpec(0.1, 1.0, 2, 2))


def test_hamiltonian_is_weighted_self_adjoint(return_grid):
    profile = CirculationProfile.fourier({"cos": [0.3, 0.2]})
    hamiltonian = PolarHamiltonian(profile, return_grid)
    weighted = return_grid.weights[:, None] * hamiltonian.matrix
    assert np.allclose(weighted, np.conj(weighted.T), atol=1e-10 * np.max(np.abs(weighted)))


def test_search_region():
    assert in_search_region(-1.0 + 0j)
    assert not in_search_region(1.0 + 1e-5j)
    assert not in_search_region(-5.0 + 0j)
    assert in_search_region(2.0 + 0.5j)
    assert len(search_tiles()) == 3


def test_disc_family_is_seeded():
    first = disc_family(5, seed=1)
    second = disc_family(5, seed=1)
    assert [p.strength for p in first] == [p.strength for p in second]
    assert all(p.radius == 1.0 for p in first)


def test_birman_schwinger_matches_dense(return_grid):
    profile = CirculationProfile.constant(0.3)
    potential = Potential.disc(1.0, -3.0 + 0.0j)
    result = birman_schwinger_eigen(profile, potential, 0.5, return_grid, verbose=False)
    reference = dense_eigenvalues(profile, potential, return_grid)
    assert reference.size > 0
    assert result.eigenvalues.size > 0
    assert match_eigenvalues(result.eigenvalues, reference) < 1e-6
    assert np.allclose(result.ratios, np.abs(result.eigenvalues) ** 0.5 / result.integral)
    assert result.report.claim_id == 'eigenvalue_bound'


def test_birman_schwinger_input_checks(return_grid):
    profile = CirculationProfile.constant(0.3)
    with pytest.raises(ValueError):
        birman_schwinger_eigen(profile, Potential.disc(1.0, -1.0), 0.75, return_grid, verbose=False)
    with pytest.raises(ValueError):
        BirmanSchwinger(profile, Potential.disc(1.0, -1.0), return_grid, backend='lu')
    empty = birman_schwinger_eigen(profile, Potential.disc(1.0, 0.0), 0.5, return_grid, verbose=False)
    assert empty.eigenvalues.size == 0 and empty.report.verdict


def test_eigen_bound_sweep(return_grid):
    potentials = [Potential.disc(1.0, -2.5 + 0.5j), Potential.disc(1.0, 0.5 + 0.0j)]
    sweep = eigen_bound_sweep(CirculationProfile.constant(0.5), potentials, grid=return_grid, verbose=False)
    assert list(sweep.table.columns) == ['potential', 're', 'im', 'integral', 'ratio']
    assert sweep.mismatch < 1e-6
    assert sweep.report.claim_id == 'eigenvalue_bound'


def test_disc_family_sweep_collects_failures(return_grid):
    sweep = eigen_bound_sweep(CirculationProfile.constant(0.5), disc_family(4, seed=0), gamma=0.5,
                              grid=return_grid, verbose=False)
    assert all(message.startswith('potential ') for message in sweep.failures)
    assert set(sweep.table['potential']) <= {0, 1, 2, 3}
    if sweep.failures:
        assert not sweep.report.verdict


def test_secant_stays_in_accepted_region():
    visited = []

    def func(z):
        visited.append(z)
        return np.exp(z)

    z, converged = secant_refine(func, -1.0 + 0.1j, accept=lambda w: abs(w) <= 4.0)
    assert not converged
    assert abs(z) <= 4.0
    assert all(abs(w) <= 4.0 for w in visited)
    root, converged = secant_refine(lambda w: w * w + 1.0, 0.2 + 0.9j, accept=lambda w: abs(w) <= 4.0)
    assert converged and abs(root - 1j) < 1e-10


def test_match_is_two_sided():
    located = np.array([-1.0 + 0j])
    assert match_eigenvalues(located, np.array([-1.0 + 0j])) == 0.0
    assert match_eigenvalues(located, np.array([-1.0 + 0j, -2.0 + 0j])) == pytest.approx(0.5)
    assert match_eigenvalues(np.array([], dtype=complex), np.array([-1.0 + 0j])) == math.inf
    # a dense value next to the cut may be missed
    assert match_eigenvalues(located, np.array([-1.0 + 0j, 0.5 + 0.005j])) == 0.0


def test_shallow_well():
    shallow = shallow_well_eigenvalue(1.0)
    deeper = shallow_well_eigenvalue(4.0)
    assert -1.0 < shallow < 0.0
    assert deeper < shallow
    with pytest.raises(ValueError):
        shallow_well_eigenvalue(6.0)
