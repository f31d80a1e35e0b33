import math
import numpy as np
import pandas as pd
from dataclasses import dataclass
from typing import List, Optional

from abresolvent.analysis.grid import GridOperator, GridSpec
from abresolvent.utils import parallel_map


PROBE_FAMILY_VERSION = "1"
GAUSSIAN_SCALES = (0.125, 0.25, 0.5, 1.0, 2.0)
GAUSSIAN_CENTRES = 8
ANNULUS_COUNT = 6
ANGULAR_FREQUENCIES = (0, 1, -1, 3, -3)


@dataclass
class Probe:
    probe_id: str
    values: np.ndarray
# ----------------------------------------------------------------------------------------------------------------------


def probe_family(grid: GridSpec,
                 version: str = PROBE_FAMILY_VERSION) -> List[Probe]:
    """
    probe_family(grid, version)

        Versioned family of test functions on the grid nodes:
        Gaussians of 5 widths around 8 centres spread along a spiral, indicators of dyadic annuli
        [a, 2a], and e^{iωθ}·e^{−r²/2} for ω ∈ {0, ±1, ±3}

        Parameters
        ----------
        grid: GridSpec
        version: str

        Returns
        -------
        List[Probe]
    """
    if version != PROBE_FAMILY_VERSION:
        raise ValueError(f"unknown probe family version '{version}'")
    r, theta = grid.node_coordinates()
    x, y = r * np.cos(theta), r * np.sin(theta)
    probes = []
    for c in range(GAUSSIAN_CENTRES):
        radius = grid.r_max * c / (2.0 * GAUSSIAN_CENTRES)
        cx, cy = radius * math.cos(c * math.pi / 4.0), radius * math.sin(c * math.pi / 4.0)
        for scale in GAUSSIAN_SCALES:
            values = np.exp(-((x - cx) ** 2 + (y - cy) ** 2) / (2.0 * scale ** 2)).astype(complex)
            probes.append(Probe(f"gauss_c{c}_s{scale:g}", values))
    for k in range(1, ANNULUS_COUNT + 1):
        inner = grid.r_max * 2.0 ** -(k + 1)
        values = ((r >= inner) & (r < 2.0 * inner)).astype(complex)
        probes.append(Probe(f"annulus_{inner:.4g}", values))
    for omega in ANGULAR_FREQUENCIES:
        probes.append(Probe(f"angular_w{omega:+d}", np.exp(1j * omega * theta - 0.5 * r ** 2)))
    return [p for p in probes if np.any(np.abs(p.values) > 0)]
# ----------------------------------------------------------------------------------------------------------------------


def discrete_norm(values: np.ndarray,
                  weights: np.ndarray,
                  p: float) -> float:
    """‖f‖_p with the grid quadrature weights, p = inf allowed."""
    if p < 1:
        raise ValueError("p must be at least 1")
    size = np.abs(np.asarray(values))
    if math.isinf(p):
        return float(np.max(size))
    return float(np.sum(weights * size ** p) ** (1.0 / p))
# ----------------------------------------------------------------------------------------------------------------------


def check_exponent_window(p: float,
                          q: float):
    """
    check_exponent_window(p, q)

        Raises ValueError unless 1 ≤ p < 4/3, 4 < q ≤ ∞ and 2/3 ≤ 1/p − 1/q < 1
    """
    if not 1.0 <= p < 4.0 / 3.0:
        raise ValueError("p must lie in [1, 4/3)")
    if not q > 4.0:
        raise ValueError("q must lie in (4, inf]")
    gap = 1.0 / p - (0.0 if math.isinf(q) else 1.0 / q)
    if not 2.0 / 3.0 - 1e-12 <= gap < 1.0:
        raise ValueError("1/p - 1/q must lie in [2/3, 1)")
# ----------------------------------------------------------------------------------------------------------------------


def conjugate_exponent(p: float) -> float:
    if p == 1.0:
        return math.inf
    if math.isinf(p):
        return 1.0
    return p / (p - 1.0)
# ----------------------------------------------------------------------------------------------------------------------


@dataclass
class ProbeNormResult:
    """
    ProbeNormResult(value, probe_id, ratios)

        value = max over probes of ‖Tf‖_q/‖f‖_p, a lower bound of the discrete operator norm
    """
    value: float
    probe_id: str
    ratios: pd.DataFrame
# ----------------------------------------------------------------------------------------------------------------------


def probe_norm(operator: GridOperator,
               p: float,
               q: float,
               probes: Optional[List[Probe]] = None,
               enforce_window: bool = True,
               threads: int = 1,
               verbose: bool = False) -> ProbeNormResult:
    """
    probe_norm(operator, p, q, probes, enforce_window, threads, verbose)

        Lower bound of ‖T‖_{L^p→L^q} over a probe family, norms computed with the grid weights

        Parameters
        ----------
        operator: GridOperator
        p: float
        q: float
        probes: List[Probe], optional
            defaults to probe_family(operator.grid)
        enforce_window: bool
            checks the admissible exponent window first
        threads: int
        verbose: bool

        Returns
        -------
        ProbeNormResult
    """
    if not isinstance(operator, GridOperator):
        raise TypeError(f"operator must be GridOperator, not {type(operator)}")
    if enforce_window:
        check_exponent_window(p, q)
    probes = probe_family(operator.grid) if probes is None else probes
    if len(probes) == 0:
        raise ValueError("probe family must not be empty")
    weights = operator.grid.weights

    def ratio(probe):
        denominator = discrete_norm(probe.values, weights, p)
        if denominator == 0:
            raise ValueError(f"probe {probe.probe_id} vanishes on the grid")
        return discrete_norm(operator.apply(probe.values), weights, q) / denominator

    ratios = parallel_map(ratio, probes, threads=threads, desc='Probe norms', verbose=verbose)
    table = pd.DataFrame({"probe_id": [pr.probe_id for pr in probes], "ratio": ratios})
    best = int(np.argmax(table['ratio'].to_numpy()))
    return ProbeNormResult(value=float(table['ratio'].iloc[best]), probe_id=str(table['probe_id'].iloc[best]),
                           ratios=table)
# ----------------------------------------------------------------------------------------------------------------------


def duality_gap(operator: GridOperator,
                p: float,
                q: float,
                probes: Optional[List[Probe]] = None) -> float:
    """
    duality_gap(operator, p, q, probes)

        Relative difference of the probe norms of T: L^p → L^q and T*: L^{q′} → L^{p′}
    """
    direct = probe_norm(operator, p, q, probes, enforce_window=False).value
    dual = probe_norm(operator.adjoint(), conjugate_exponent(q), conjugate_exponent(p), probes,
                      enforce_window=False).value
    return abs(direct - dual) / max(direct, dual)
# ----------------------------------------------------------------------------------------------------------------------
