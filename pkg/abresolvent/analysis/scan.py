import math
import numpy as np
import pandas as pd
from dataclasses import dataclass
from tqdm import tqdm
from typing import List, Optional, Sequence, Tuple, Union

from abresolvent.analysis.grid import GridSpec, assemble
from abresolvent.analysis.probes import Probe, check_exponent_window, duality_gap, probe_family, probe_norm
from abresolvent.geometry import CirculationProfile, PolarPoint, TWO_PI, polar_distance
from abresolvent.kernel import KernelContext, resolvent_kernel
from abresolvent.regimes import BOUNDARY_EPSILON, Branch, Regime, SpectralParameter
from abresolvent.report import BoundCheckReport
from abresolvent.utils import fit_slope


# max/min of the probe norms over a δ-sweep still counted as uniform
UNIFORMITY_SPREAD = 2.0
# |log d| envelope up to this distance, d^{−1} beyond
NEAR_DISTANCE = 0.75
# point pairs of the boundary approximation comparison, one near and one far
BOUNDARY_PAIRS = ((PolarPoint(1.0, 0.0), PolarPoint(12.0, 2.0)),
                  (PolarPoint(0.5, 0.3), PolarPoint(1.5, 2.5)))


def sigma_for(regime: Union[Regime, str],
              delta: float,
              epsilon: float = BOUNDARY_EPSILON) -> SpectralParameter:
    """
    sigma_for(regime, delta, epsilon)

        Normalized parameter of a sweep point: −√(1 − δ²) + iδ for regime i, √(1 − δ²) + iδ for
        regime ii (|δ| ≥ ε) and iii (|δ| ≤ ε, δ = 0 meaning 1 + i0). The endpoint |δ| = ε is accepted
        by both sweeps and classified as regime ii
    """
    regime = regime if isinstance(regime, Regime) else Regime.from_label(regime)
    if regime == Regime.NEGATIVE:
        if delta == 0:
            return SpectralParameter(-1.0, epsilon=epsilon)
        return SpectralParameter.from_delta(delta, sign=-1, epsilon=epsilon)
    if regime == Regime.POSITIVE:
        if abs(delta) < epsilon:
            raise ValueError(f"regime ii requires |delta| >= {epsilon}")
        return SpectralParameter.from_delta(delta, sign=1, epsilon=epsilon)
    if abs(delta) > epsilon:
        raise ValueError(f"regime iii requires |delta| <= {epsilon}")
    if delta == 0:
        return SpectralParameter.boundary(1.0, Branch.PLUS)
    return SpectralParameter.from_delta(delta, sign=1, epsilon=epsilon)
# ----------------------------------------------------------------------------------------------------------------------


@dataclass
class ScanResult:
    """
    ScanResult(table, norms, spread, verdict, summary, failures, contrast_slope)

        table has one row per (delta, probe) with columns delta, regime, probe_id, ratio;
        norms holds the probe norm per δ; spread = max/min of norms. summary has one row per δ with
        columns delta, norm, contrast, duality_gap, failures, where contrast is the (1, ∞) probe norm
        and failures the number of radius pairs lost to quadrature failure
    """
    table: pd.DataFrame
    norms: pd.Series
    spread: float
    verdict: bool
    summary: Optional[pd.DataFrame] = None
    failures: int = 0
    contrast_slope: Optional[float] = None
# ----------------------------------------------------------------------------------------------------------------------


def sigma_scan(profile: CirculationProfile,
               p: float,
               q: float,
               regime: Union[Regime, str],
               deltas: Sequence[float],
               grid: Optional[GridSpec] = None,
               context: Optional[KernelContext] = None,
               probes: Optional[List[Probe]] = None,
               threads: int = 1,
               verbose: bool = True) -> ScanResult:
    """
    sigma_scan(profile, p, q, regime, deltas, grid, context, probes, threads, verbose)

        Probe norms of the discretized resolvent over a δ-sweep of one regime at |σ| = 1, assembled
        with the exact wavenumber k = √σ. The sweep is uniform when max/min of the norms stays below
        UNIFORMITY_SPREAD; any quadrature failure during assembly fails it

        Parameters
        ----------
        profile: CirculationProfile
        p: float
        q: float
        regime: Regime or str
            'i', 'ii' or 'iii'
        deltas: Sequence[float]
        grid: GridSpec, optional
        context: KernelContext, optional
            must not use the boundary approximation
        probes: List[Probe], optional
        threads: int
        verbose: bool

        Returns
        -------
        ScanResult
    """
    check_exponent_window(p, q)
    if len(deltas) == 0:
        raise ValueError("deltas must not be empty")
    regime = regime if isinstance(regime, Regime) else Regime.from_label(regime)
    grid = grid if grid is not None else GridSpec()
    context = context if context is not None else KernelContext(boundary_approximation=False)
    if context.boundary_approximation:
        raise ValueError("sigma scans need a context with boundary_approximation=False")
    probes = probe_family(grid) if probes is None else probes
    frames, rows = [], []
    bar = tqdm(deltas, desc=f"Sigma scan, regime {regime.label}", disable=not verbose)
    for delta in bar:
        sigma = sigma_for(regime, float(delta))
        operator = assemble(profile, sigma, grid, context, threads=threads, verbose=False)
        result = probe_norm(operator, p, q, probes, threads=threads)
        frame = result.ratios.copy()
        frame.insert(0, 'regime', regime.label)
        frame.insert(0, 'delta', float(delta))
        frames.append(frame)
        rows.append({"delta": float(delta),
                     "norm": result.value,
                     "contrast": probe_norm(operator, 1.0, math.inf, probes, enforce_window=False).value,
                     "duality_gap": duality_gap(operator, p, q, probes),
                     "failures": len(operator.failures)})
        bar.set_postfix_str(f"norm: {result.value:.4g}")
    table = pd.concat(frames, ignore_index=True)[['delta', 'regime', 'probe_id', 'ratio']]
    summary = pd.DataFrame(rows, columns=['delta', 'norm', 'contrast', 'duality_gap', 'failures'])
    norms = pd.Series(summary['norm'].to_numpy(), index=summary['delta'].to_numpy(), name='norm')
    spread = float(norms.max() / norms.min()) if norms.min() > 0 else math.inf
    failures = int(summary['failures'].sum())
    if failures:
        print(f"Sigma scan: {failures} radius pairs failed during assembly, the sweep does not pass")
    return ScanResult(table=table, norms=norms, spread=spread,
                      verdict=spread < UNIFORMITY_SPREAD and failures == 0,
                      summary=summary, failures=failures, contrast_slope=contrast_diagnostic(summary))
# ----------------------------------------------------------------------------------------------------------------------


def contrast_diagnostic(summary: pd.DataFrame) -> Optional[float]:
    """
    contrast_diagnostic(summary)

        Slope of the probe norm at the excluded corner (p, q) = (1, ∞), where 1/p − 1/q = 1 and no
        uniform bound holds, fitted against log(1/|δ|) over the nonzero δ of a scan summary.
        Recorded, not asserted

        Returns
        -------
        float or None
            None with fewer than two nonzero δ
    """
    nonzero = summary[summary['delta'] != 0]
    if len(nonzero) < 2:
        return None
    slope, _ = fit_slope(np.log(1.0 / np.abs(nonzero['delta'].to_numpy())), nonzero['contrast'].to_numpy())
    return float(slope)
# ----------------------------------------------------------------------------------------------------------------------


def boundary_approximation_gap(profile: CirculationProfile,
                               deltas: Sequence[float],
                               pairs: Sequence[Tuple[PolarPoint, PolarPoint]] = BOUNDARY_PAIRS,
                               context: Optional[KernelContext] = None) -> pd.DataFrame:
    """
    boundary_approximation_gap(profile, deltas, pairs, context)

        Kernel at the boundary strip points σ = √(1 − δ²) + iδ, 0 < |δ| ≤ ε, evaluated with the exact
        wavenumber and with σ replaced by λ_b² ± i0. Recorded next to regime iii scans

        Returns
        -------
        pd.DataFrame
            columns delta, pair, exact, approximate, relative_gap (magnitudes)
    """
    context = context if context is not None else KernelContext(boundary_approximation=False)
    exact = KernelContext(tol=context.tol, cutoff=context.cutoff, radial_method=context.radial_method,
                          normalization=context.normalization, boundary_approximation=False,
                          table_density=context.table_density, threads=context.threads)
    approximate = KernelContext(tol=context.tol, cutoff=context.cutoff, radial_method=context.radial_method,
                                normalization=context.normalization, boundary_approximation=True,
                                table_density=context.table_density, threads=context.threads)
    rows = []
    for delta in deltas:
        if delta == 0:
            continue
        sigma = sigma_for(Regime.BOUNDARY, float(delta))
        for index, (x, y) in enumerate(pairs):
            value = abs(resolvent_kernel(profile, sigma, x, y, exact).total)
            approx = abs(resolvent_kernel(profile, sigma, x, y, approximate).total)
            rows.append({"delta": float(delta), "pair": index, "exact": value, "approximate": approx,
                         "relative_gap": abs(value - approx) / value if value > 0 else math.inf})
    return pd.DataFrame(rows, columns=['delta', 'pair', 'exact', 'approximate', 'relative_gap'])
# ----------------------------------------------------------------------------------------------------------------------


def kernel_envelope_check(profile: CirculationProfile,
                          sigma: SpectralParameter,
                          samples: int = 200,
                          seed: int = 0,
                          context: Optional[KernelContext] = None,
                          verbose: bool = False) -> BoundCheckReport:
    """
    kernel_envelope_check(profile, sigma, samples, seed, context, verbose)

        Pointwise kernel magnitudes against |log d| for d ≤ 3/4 and d^{−1} beyond, d the distance
        of the scaled points
    """
    context = context if context is not None else KernelContext()
    rng = np.random.default_rng(seed)
    rows = []
    scale = math.sqrt(sigma.modulus)
    for _ in tqdm(range(samples), desc='Kernel envelope', disable=not verbose):
        r1, r2 = rng.uniform(0.01, 6.0, size=2)
        t1, t2 = rng.uniform(0.0, TWO_PI, size=2)
        d = float(polar_distance(r1, r2, t2 - t1)) * scale
        if d == 0:
            continue
        value = resolvent_kernel(profile, sigma, PolarPoint(r1, t1), PolarPoint(r2, t2), context).total
        envelope = abs(math.log(d)) if d <= NEAR_DISTANCE else 1.0 / d
        rows.append({"r1": r1, "r2": r2, "theta1": t1, "theta2": t2, "distance": d,
                     "ratio": abs(value) / envelope})
    claim = f"resolvent_envelope_{sigma.regime.label}"
    return BoundCheckReport.from_samples(claim, pd.DataFrame(rows))
# ----------------------------------------------------------------------------------------------------------------------
