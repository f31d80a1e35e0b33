import math
import pytest
import numpy as np
import pandas as pd
import abresolvent.analysis.scan as scan
from abresolvent.analysis.grid import GridSpec
from abresolvent.analysis.scan import (boundary_approximation_gap, contrast_diagnostic, kernel_envelope_check,
                                       sigma_for, sigma_scan)
from abresolvent.geometry import CirculationProfile, PolarPoint
from abresolvent.kernel import EXPECTED_NORMALIZATION, KernelContext, resolvent_kernel
from abresolvent.regimes import Branch, Regime, SpectralParameter


@pytest.fixture
def return_context():
    return KernelContext(tol=1e-9, radial_method='hankel', normalization=EXPECTED_NORMALIZATION,
                         boundary_approximation=False)


@pytest.fixture
def return_grid():
    return GridSpec(0.05, 3.0, 3, 6)


def test_sigma_for_regimes():
    assert sigma_for('i', 0.0).sigma == -1.0
    assert sigma_for('i', 0.3).regime == Regime.NEGATIVE
    assert sigma_for('ii', -0.5).regime == Regime.POSITIVE
    boundary = sigma_for('iii', 0.0)
    assert boundary.regime == Regime.BOUNDARY and boundary.branch == Branch.PLUS
    assert sigma_for(Regime.BOUNDARY, -0.05).regime == Regime.BOUNDARY
    # the strip edge is accepted by both sweeps
    assert sigma_for('iii', 0.1).regime == Regime.POSITIVE
    assert sigma_for('ii', -0.1).regime == Regime.POSITIVE
    with pytest.raises(ValueError):
        sigma_for('ii', 0.05)
    with pytest.raises(ValueError):
        sigma_for('iii', 0.5)


def test_sigma_scan_table(return_context, return_grid):
    result = sigma_scan(CirculationProfile.constant(0.5), 1.2, 6.0, 'i', [-0.5, 0.5], grid=return_grid,
                        context=return_context, verbose=False)
    assert list(result.table.columns) == ['delta', 'regime', 'probe_id', 'ratio']
    assert set(result.table['delta']) == {-0.5, 0.5}
    assert np.all(result.norms > 0)
    assert result.spread >= 1.0
    assert result.failures == 0
    assert result.verdict == (result.spread < 2.0)
    assert list(result.summary.columns) == ['delta', 'norm', 'contrast', 'duality_gap', 'failures']
    assert np.all(result.summary['duality_gap'].between(0.0, 1.0))
    assert result.contrast_slope is not None


def test_sigma_scan_rejects_window(return_context, return_grid):
    with pytest.raises(ValueError):
        sigma_scan(CirculationProfile.constant(0.5), 1.0, math.inf, 'i', [0.5], grid=return_grid,
                   context=return_context, verbose=False)
    with pytest.raises(ValueError):
        sigma_scan(CirculationProfile.constant(0.5), 1.2, 6.0, 'i', [], grid=return_grid,
                   context=return_context, verbose=False)
    with pytest.raises(ValueError):
        sigma_scan(CirculationProfile.constant(0.5), 1.2, 6.0, 'iii', [0.01], grid=return_grid,
                   context=KernelContext(radial_method='hankel', normalization=EXPECTED_NORMALIZATION),
                   verbose=False)


def test_assembly_failures_fail_the_sweep(return_context, return_grid, monkeypatch):
    assemble = scan.assemble

    def failing_assemble(*args, **kwargs):
        operator = assemble(*args, **kwargs)
        operator.failures.append((0, 0, 'quadrature did not converge'))
        return operator

    monkeypatch.setattr(scan, 'assemble', failing_assemble)
    result = sigma_scan(CirculationProfile.constant(0.5), 1.2, 6.0, 'i', [-0.5, 0.5], grid=return_grid,
                        context=return_context, verbose=False)
    assert result.failures == 2
    assert list(result.summary['failures']) == [1, 1]
    assert not result.verdict


def test_regime_iii_scan_depends_on_delta(return_context, return_grid):
    result = sigma_scan(CirculationProfile.constant(0.5), 1.2, 6.0, 'iii', [0.1, 0.01], grid=return_grid,
                        context=return_context, verbose=False)
    assert result.norms.iloc[0] != pytest.approx(result.norms.iloc[1], rel=1e-6)


def test_contrast_diagnostic_slope():
    summary = pd.DataFrame({"delta": [0.1, 0.01, 0.001, 0.0],
                            "contrast": [1.0 + 2.0 * math.log(10.0 ** k) for k in (1, 2, 3)] + [50.0]})
    assert contrast_diagnostic(summary) == pytest.approx(2.0)
    assert contrast_diagnostic(summary.iloc[2:]) is None


def test_boundary_approximation_gap(return_context):
    profile = CirculationProfile.constant(0.5)
    pair = ((PolarPoint(1.0, 0.0), PolarPoint(12.0, 2.0)),)
    table = boundary_approximation_gap(profile, [0.05, 1e-4, 0.0], pair, return_context)
    assert list(table['delta']) == [0.05, 1e-4]
    exact, approximate = table['exact'].to_numpy(), table['approximate'].to_numpy()
    # the far field of the exact kernel decays with Im k, the approximation does not see δ
    assert abs(exact[0] - exact[1]) > 0.1 * exact[1]
    assert approximate[0] == pytest.approx(approximate[1], rel=1e-2)
    assert table['relative_gap'].iloc[1] < table['relative_gap'].iloc[0]


def test_kernel_envelope(return_context):
    profile = CirculationProfile.constant(0.5)
    report = kernel_envelope_check(profile, SpectralParameter(-1.0), samples=20, context=return_context)
    assert report.claim_id == 'resolvent_envelope_i'
    assert report.sample_count == 20
    assert report.verdict
    far = report.details[report.details['distance'] > 0.75].iloc[0]
    value = resolvent_kernel(profile, -1.0, PolarPoint(far['r1'], far['theta1']),
                             PolarPoint(far['r2'], far['theta2']), return_context).total
    assert far['ratio'] == pytest.approx(abs(value) * far['distance'], rel=1e-12)
