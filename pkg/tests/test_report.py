import math
import pytest
import numpy as np
import pandas as pd
from abresolvent.report import BoundCheckReport, VerificationSuite, reports_to_frame, stability_change


@pytest.fixture
def return_samples():
    return pd.DataFrame({"j": [1, 1, 2, 2, 3, 3],
                         "s": [0.1, 0.2, 0.3, 0.4, 0.5, 0.6],
                         "ratio": [0.5, 0.7, 0.6, 0.9, 0.8, 0.4]})


class HalfSuite(VerificationSuite):
    name = 'half'

    def run(self, samples, seed):
        table, skipped = self.sweep(range(samples), lambda k: None if k % 2 else {"k": k, "ratio": k / 10.0},
                                    desc='half')
        return [BoundCheckReport.from_samples('half', table, skipped=skipped)]


def test_from_samples(return_samples):
    report = BoundCheckReport.from_samples('claim', return_samples)
    assert report.verdict
    assert report.max_ratio == 0.9
    assert report.worst_point == {"j": 2, "s": 0.4}
    assert report.sample_count == 6
    assert report.trend_slope is None
    with pytest.raises(ValueError):
        BoundCheckReport.from_samples('claim', return_samples, ratio_column='missing')


def test_non_finite_samples_are_skipped(return_samples):
    samples = return_samples.copy()
    samples.loc[0, 'ratio'] = np.nan
    report = BoundCheckReport.from_samples('claim', samples, skipped=2)
    assert report.skipped == 3
    assert report.sample_count == 5
    all_bad = BoundCheckReport.from_samples('claim', samples.assign(ratio=np.inf))
    assert not all_bad.verdict
    empty = BoundCheckReport.from_samples('claim', pd.DataFrame())
    assert not empty.verdict and empty.max_ratio == math.inf


def test_recorded_constant(return_samples):
    assert BoundCheckReport.from_samples('claim', return_samples, recorded_constant=0.8).verdict
    assert not BoundCheckReport.from_samples('claim', return_samples, recorded_constant=0.5).verdict


def test_trend_rule(return_samples):
    flat = BoundCheckReport.from_samples('claim', return_samples, trend_column='j', require_flat=True)
    assert flat.verdict
    growing = pd.DataFrame({"j": [1, 2, 3, 4], "ratio": [1.0, 2.0, 4.0, 8.0]})
    report = BoundCheckReport.from_samples('claim', growing, trend_column='j', require_flat=True)
    assert math.isclose(report.trend_slope, 1.0, abs_tol=1e-12)
    assert not report.verdict
    assert BoundCheckReport.from_samples('claim', growing, trend_column='j').verdict


def test_from_tolerance():
    samples = pd.DataFrame({"r": [1.0, 2.0], "error": [1e-12, 3e-11]})
    assert BoundCheckReport.from_tolerance('agree', samples, 1e-10, error_column='error').verdict
    report = BoundCheckReport.from_tolerance('agree', samples, 1e-11, error_column='error')
    assert not report.verdict
    assert report.recorded_constant == 1e-11


def test_refinement(return_samples):
    coarse = BoundCheckReport.from_samples('claim', return_samples)
    fine = BoundCheckReport.from_samples('claim', return_samples.assign(ratio=return_samples['ratio'] * 1.1))
    refined = coarse.refined(fine)
    assert math.isclose(refined.refinement_change, 0.1)
    assert refined.verdict
    drifting = BoundCheckReport.from_samples('claim', return_samples.assign(ratio=return_samples['ratio'] * 2))
    assert not coarse.refined(drifting).verdict
    with pytest.raises(ValueError):
        coarse.refined(BoundCheckReport.from_samples('other', return_samples))
    zero = BoundCheckReport('claim', 1, 0.0, {}, True)
    assert stability_change(zero, zero) == 0.0


def test_summary_and_offenders(return_samples):
    report = BoundCheckReport.from_samples('claim', return_samples)
    summary = report.to_summary()
    assert summary['verdict'] == 'pass'
    assert summary['constant'] == 0.9
    worst = report.worst_offenders(3)
    assert list(worst['ratio']) == [0.9, 0.8, 0.7]
    assert list(worst.columns) == ['claim_id', 'j', 's', 'ratio']
    frame = reports_to_frame([report, BoundCheckReport.from_samples('empty', pd.DataFrame())])
    assert list(frame['verdict']) == ['pass', 'fail']
    assert frame.loc[0, 'worst_point'].endswith('s=0.4')


@pytest.mark.parametrize("threads", [1, 2])
def test_suite_sweep(threads):
    report, = HalfSuite(verbose=False, threads=threads).run(10, seed=0)
    assert report.skipped == 5
    assert report.sample_count == 5
    assert list(report.details['k']) == [0, 2, 4, 6, 8]
    assert math.isclose(report.max_ratio, 0.8)
