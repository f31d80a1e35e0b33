import math
import numpy as np
import pandas as pd
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from tqdm import tqdm
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from abresolvent.utils import complex_to_dict, fit_slope, parallel_map


# relative change of a recorded constant still accepted on re-runs and refinement
REFINEMENT_SLACK = 0.25
# largest fitted slope of log2 ratio against j still accepted as bounded
TREND_TOLERANCE = 0.15


@dataclass
class BoundCheckReport:
    """
    BoundCheckReport(claim_id, sample_count, max_ratio, worst_point, verdict, ...)

        Result of comparing sampled values of an estimate against its claimed envelope.
        A claim passes when the observed maximal ratio is finite and, if a constant was recorded
        earlier, does not exceed it by more than REFINEMENT_SLACK

        Parameters
        ----------
        claim_id: str
        sample_count: int
            number of evaluated samples
        max_ratio: float
            max of |observed| / envelope
        worst_point: dict
            parameters of the sample reaching max_ratio
        verdict: bool
        recorded_constant: float, optional
        skipped: int
            samples skipped by rule or lost to quadrature failure
        trend_slope: float, optional
            fitted slope of log2(ratio) against j (or log λ)
        refinement_change: float, optional
            relative change of max_ratio against a run at doubled density
        details: pd.DataFrame, optional
            one row per sample with its parameters and ratio

    """
    claim_id: str
    sample_count: int
    max_ratio: float
    worst_point: Dict[str, Any]
    verdict: bool
    recorded_constant: Optional[float] = None
    skipped: int = 0
    trend_slope: Optional[float] = None
    refinement_change: Optional[float] = None
    details: Optional[pd.DataFrame] = field(default=None, repr=False)

    @classmethod
    def from_samples(cls,
                     claim_id: str,
                     samples: pd.DataFrame,
                     ratio_column: str = 'ratio',
                     recorded_constant: Optional[float] = None,
                     skipped: int = 0,
                     trend_column: Optional[str] = None,
                     require_flat: bool = False) -> 'BoundCheckReport':
        """
        from_samples(claim_id, samples, ratio_column, recorded_constant, skipped, trend_column, require_flat)

            Builds the report from a per-sample table. With trend_column the per-level maxima of the
            ratio are fitted in log2 against that column; require_flat adds slope ≤ TREND_TOLERANCE (no growth)
            to the verdict
        """
        if samples.empty:
            return cls(claim_id=claim_id, sample_count=0, max_ratio=math.inf, worst_point={}, verdict=False,
                       recorded_constant=recorded_constant, skipped=skipped, details=samples)
        if ratio_column not in samples.columns:
            raise ValueError(f'Missing {ratio_column} in samples table')
        ratios = samples[ratio_column].to_numpy(dtype=float)
        finite = np.isfinite(ratios)
        if not np.any(finite):
            return cls(claim_id=claim_id, sample_count=len(samples), max_ratio=math.inf, worst_point={},
                       verdict=False, recorded_constant=recorded_constant,
                       skipped=skipped + len(samples), details=samples)
        skipped += int(np.count_nonzero(~finite))
        worst = int(np.argmax(np.where(finite, ratios, -np.inf)))
        worst_point = {key: _plain(value) for key, value in samples.iloc[worst].items() if key != ratio_column}
        max_ratio = float(ratios[worst])

        trend = None
        if trend_column is not None:
            levels = samples.loc[finite].groupby(trend_column)[ratio_column].max()
            levels = levels[levels > 0]
            if len(levels) >= 2:
                trend, _ = fit_slope(levels.index.to_numpy(dtype=float), np.log2(levels.to_numpy(dtype=float)))

        report = cls(claim_id=claim_id, sample_count=int(np.count_nonzero(finite)), max_ratio=max_ratio,
                     worst_point=worst_point, verdict=True, recorded_constant=recorded_constant,
                     skipped=skipped, trend_slope=trend, details=samples)
        report.verdict = report.evaluate(require_flat)
        return report
    # ------------------------------------------------------------------------------------------------------------------

    @classmethod
    def from_tolerance(cls,
                       claim_id: str,
                       samples: pd.DataFrame,
                       limit: float,
                       error_column: str = 'ratio',
                       skipped: int = 0) -> 'BoundCheckReport':
        """
        from_tolerance(claim_id, samples, limit, error_column, skipped)

            Report of an asserted absolute limit (agreement errors, closed-form slices, explicit
            constants): passes when every sampled value is finite and max ≤ limit
        """
        report = cls.from_samples(claim_id, samples, ratio_column=error_column, skipped=skipped)
        report.recorded_constant = limit
        report.verdict = report.verdict and report.max_ratio <= limit
        return report
    # ------------------------------------------------------------------------------------------------------------------

    def evaluate(self,
                 require_flat: bool = False) -> bool:
        if not math.isfinite(self.max_ratio) or self.sample_count == 0:
            return False
        if self.recorded_constant is not None and self.max_ratio > self.recorded_constant * (1.0 + REFINEMENT_SLACK):
            return False
        if require_flat and (self.trend_slope is None or self.trend_slope > TREND_TOLERANCE):
            return False
        return True
    # ------------------------------------------------------------------------------------------------------------------

    def refined(self,
                fine: 'BoundCheckReport') -> 'BoundCheckReport':
        """
        refined(fine)

            The report of the doubled density run, with the relative change of max_ratio against this
            one recorded; the verdict also requires a change below REFINEMENT_SLACK
        """
        if fine.claim_id != self.claim_id:
            raise ValueError(f"cannot compare {self.claim_id} with {fine.claim_id}")
        fine.refinement_change = stability_change(self, fine)
        fine.verdict = fine.verdict and self.verdict and fine.refinement_change < REFINEMENT_SLACK
        return fine
    # ------------------------------------------------------------------------------------------------------------------

    def to_summary(self) -> Dict[str, Any]:
        return {"claim_id": self.claim_id,
                "verdict": "pass" if self.verdict else "fail",
                "constant": _plain(self.max_ratio),
                "recorded_constant": _plain(self.recorded_constant),
                "samples": self.sample_count,
                "skipped": self.skipped,
                "trend_slope": _plain(self.trend_slope),
                "refinement_change": _plain(self.refinement_change),
                "worst_point": self.worst_point}
    # ------------------------------------------------------------------------------------------------------------------

    def worst_offenders(self,
                        count: int = 20,
                        ratio_column: str = 'ratio') -> pd.DataFrame:
        if self.details is None or ratio_column not in self.details.columns:
            return pd.DataFrame()
        table = self.details.sort_values(ratio_column, ascending=False, kind='mergesort').head(count)
        table = table.reset_index(drop=True)
        table.insert(0, 'claim_id', self.claim_id)
        return table
# ----------------------------------------------------------------------------------------------------------------------


def _plain(value):
    if value is None:
        return None
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if math.isfinite(value) else str(value)
    if isinstance(value, (complex, np.complexfloating)):
        return complex_to_dict(value)
    return value
# ----------------------------------------------------------------------------------------------------------------------


def stability_change(coarse: BoundCheckReport,
                     fine: BoundCheckReport) -> float:
    """Relative change of max_ratio between two sample densities."""
    if coarse.max_ratio == 0:
        return 0.0 if fine.max_ratio == 0 else math.inf
    return abs(fine.max_ratio - coarse.max_ratio) / abs(coarse.max_ratio)
# ----------------------------------------------------------------------------------------------------------------------


class VerificationSuite(ABC):
    """
    VerificationSuite(verbose, threads)

        Abstract family of bound checks run by verify-bounds. Samples are drawn up front from the
        seed, so the rows and their order do not depend on the thread count

    """
    name = ''

    def __init__(self,
                 verbose: bool = True,
                 threads: int = 1):
        self.verbose = verbose
        self.threads = threads
    # ------------------------------------------------------------------------------------------------------------------

    @abstractmethod
    def run(self,
            samples: int,
            seed: int) -> List[BoundCheckReport]:
        raise NotImplementedError("Method run must be implemented!")
    # ------------------------------------------------------------------------------------------------------------------

    def sweep(self,
              items: Sequence,
              func: Callable[[Any], Optional[Dict[str, Any]]],
              desc: str) -> Tuple[pd.DataFrame, int]:
        """
        sweep(items, func, desc)

            Evaluates func on every item; func returns a row dict with a 'ratio' entry or None for a
            skipped sample

            Returns
            -------
            (pd.DataFrame, int)
                evaluated rows and number of skipped samples
        """
        if self.threads > 1:
            results = parallel_map(func, items, threads=self.threads, desc=desc, verbose=self.verbose)
            rows = [row for row in results if row is not None]
            return pd.DataFrame(rows), len(results) - len(rows)
        rows = []
        skipped = 0
        worst = 0.0
        bar = tqdm(items, desc=desc, disable=not self.verbose)
        for item in bar:
            row = func(item)
            if row is None:
                skipped += 1
                continue
            rows.append(row)
            if np.isfinite(row['ratio']):
                worst = max(worst, row['ratio'])
            bar.set_postfix_str(f"worst ratio: {worst:.4g}")
        return pd.DataFrame(rows), skipped
# ----------------------------------------------------------------------------------------------------------------------


def reports_to_frame(reports: Iterable[BoundCheckReport]) -> pd.DataFrame:
    rows = []
    for report in reports:
        summary = report.to_summary()
        summary['worst_point'] = ';'.join(f"{k}={v}" for k, v in report.worst_point.items())
        rows.append(summary)
    return pd.DataFrame(rows)
# ----------------------------------------------------------------------------------------------------------------------
