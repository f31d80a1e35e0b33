import math
import numpy as np
import pandas as pd
from scipy.integrate import quad
from typing import List, Optional, Sequence

from abresolvent.analysis.grid import GridOperator, GridSpec
from abresolvent.analysis.probes import GAUSSIAN_SCALES, Probe, conjugate_exponent, probe_norm
from abresolvent.report import BoundCheckReport, VerificationSuite
from abresolvent.specfun import DyadicCutoff
from abresolvent.utils import fit_slope


SCHUR_J_RANGE = tuple(range(2, 8))
# relative error of the fitted decay exponent accepted by the scaling check
SLOPE_TOLERANCE = 0.15
# radial grid of the envelope operator: 2^j·r1r2 ~ 1 must be resolved at the largest j
SCHUR_GRID = GridSpec(r_min=1e-5, r_max=8.0 / 3.0, n_r=480, n_theta=1, spacing='log')
ANNULUS_LEVELS = 12
DIVERGENCE_RADII = tuple(2.0 ** k for k in range(4, 21, 2))
# ‖(1 + |x|)^{−1/2}‖⁴ on a disc of radius R grows like 2π·ln R
DIVERGENCE_RATE = 2.0 * math.pi


def envelope_kernel(j: int,
                    r1: np.ndarray,
                    r2: np.ndarray) -> np.ndarray:
    """2^{−j/2}(1 + 2^jr1r2)^{−1/2}β(r1 + r2), zero where r1 + r2 leaves the support of β."""
    r1 = np.asarray(r1, dtype=float)
    r2 = np.asarray(r2, dtype=float)
    return 2.0 ** (-0.5 * j) * (1.0 + 2.0 ** j * r1 * r2) ** -0.5 * DyadicCutoff.beta(r1 + r2)
# ----------------------------------------------------------------------------------------------------------------------


def envelope_operator(j: int,
                      grid: GridSpec = SCHUR_GRID) -> GridOperator:
    """
    envelope_operator(j, grid)

        Radial Nyström operator of an angle independent kernel satisfying the dyadic envelope bound
        with equality. With n_theta = 1 the node weights are the full ring areas, so
        (Tf)(r1) = Σ K(r1, r2)·f(r2)·|ring(r2)|
    """
    if grid.n_theta != 1:
        raise ValueError("envelope operator acts on radial grids (n_theta = 1)")
    r = grid.radii
    matrix = envelope_kernel(j, r[:, None], r[None, :]) * grid.weights[None, :]
    return GridOperator(grid, matrix.astype(complex), diagonal_policy='none', profile={"envelope_j": j})
# ----------------------------------------------------------------------------------------------------------------------


def radial_probes(grid: GridSpec) -> List[Probe]:
    """Indicators of dyadic annuli [2^{−k−1}, 2^{−k}] and centred Gaussians of the probe widths."""
    r = grid.radii
    probes = []
    for k in range(ANNULUS_LEVELS):
        values = ((r >= 2.0 ** -(k + 1)) & (r < 2.0 ** -k)).astype(complex)
        if np.any(values != 0):
            probes.append(Probe(f"annulus_2^-{k + 1}", values))
    for scale in GAUSSIAN_SCALES:
        probes.append(Probe(f"gauss_s{scale:g}", np.exp(-0.5 * (r / scale) ** 2).astype(complex)))
    return probes
# ----------------------------------------------------------------------------------------------------------------------


def _check_schur_exponents(p: float,
                           q: float):
    if p < 1:
        raise ValueError("p must be at least 1")
    if not q > 4.0:
        raise ValueError("q must exceed 4")
    if not q > conjugate_exponent(p):
        raise ValueError("q must exceed the conjugate exponent p'")
# ----------------------------------------------------------------------------------------------------------------------


def check_schur_bound(j_range: Sequence[int] = SCHUR_J_RANGE,
                      p: float = 1.2,
                      q: float = 6.0,
                      grid: GridSpec = SCHUR_GRID,
                      verbose: bool = False) -> BoundCheckReport:
    """
    check_schur_bound(j_range, p, q, grid, verbose)

        Probe norms of the envelope operator over j against 2^{−j(1/2 + 2/q)}. The report's ratio is
        norm/2^{−j(1/2 + 2/q)}; the fitted log2 slope of the norms must match −(1/2 + 2/q) within
        SLOPE_TOLERANCE (relative)

        Parameters
        ----------
        j_range: Sequence[int]
        p: float
        q: float
            q > 4 and q > p′
        grid: GridSpec
            radial grid
        verbose: bool

        Returns
        -------
        BoundCheckReport
            claim 'schur_scaling'; details hold j, norm, predicted, probe_id, ratio
    """
    _check_schur_exponents(p, q)
    if len(j_range) < 2:
        raise ValueError("at least two levels are needed for the scaling fit")
    exponent = 0.5 + 2.0 / q
    probes = radial_probes(grid)
    rows = []
    for j in j_range:
        result = probe_norm(envelope_operator(j, grid), p, q, probes, enforce_window=False, verbose=verbose)
        predicted = 2.0 ** (-j * exponent)
        rows.append({"j": int(j), "p": p, "q": q, "norm": result.value, "predicted": predicted,
                     "probe_id": result.probe_id, "ratio": result.value / predicted})
    table = pd.DataFrame(rows)
    report = BoundCheckReport.from_samples('schur_scaling', table, trend_column='j')
    slope, _ = fit_slope(table['j'], np.log2(table['norm']))
    report.verdict = report.verdict and abs(slope + exponent) <= SLOPE_TOLERANCE * exponent
    return report
# ----------------------------------------------------------------------------------------------------------------------


def check_schur_sup_bound(j_range: Sequence[int] = SCHUR_J_RANGE,
                          grid: GridSpec = SCHUR_GRID) -> BoundCheckReport:
    """
    check_schur_sup_bound(j_range, grid)

        The corner p = 1, q = ∞: ‖Tf‖_∞ ≤ sup|K|·‖f‖₁ ≤ 2^{−j/2}‖f‖₁, so the probe norm divided by
        2^{−j/2} stays below 1
    """
    probes = radial_probes(grid)
    rows = []
    for j in j_range:
        result = probe_norm(envelope_operator(j, grid), 1.0, math.inf, probes, enforce_window=False)
        rows.append({"j": int(j), "norm": result.value, "ratio": result.value * 2.0 ** (0.5 * j)})
    return BoundCheckReport.from_tolerance('schur_sup_bound', pd.DataFrame(rows), 1.0 + 1e-12)
# ----------------------------------------------------------------------------------------------------------------------


def disc_power_norm(q: float,
                    radius: float) -> float:
    """‖(1 + |x|)^{−1/2}‖_{L^q(|x| ≤ R)}^q = 2π∫₀^R (1 + r)^{−q/2}r dr, integrated in log r."""
    value, _ = quad(lambda t: math.exp(2.0 * t) * (1.0 + math.exp(t)) ** (-0.5 * q), -40.0, math.log(radius),
                    limit=400)
    return 2.0 * math.pi * value
# ----------------------------------------------------------------------------------------------------------------------


def check_q4_divergence(radii: Sequence[float] = DIVERGENCE_RADII,
                        q_reference: float = 6.0) -> BoundCheckReport:
    """
    check_q4_divergence(radii, q_reference)

        At q = 4 the L^q norm of (1 + |x|)^{−1/2} on discs of growing radius R keeps growing, its
        fourth power like 2π·ln R, while for q > 4 it converges. The ratio column is the fourth power
        over ln R; the check passes when the last two increments of the q = 4 integral per unit ln R
        are within 10% of 2π and the q_reference integral has settled to 1e-3 relative

        Returns
        -------
        BoundCheckReport
            claim 'schur_q4_divergence'
    """
    if len(radii) < 3:
        raise ValueError("at least three radii are needed")
    if not q_reference > 4:
        raise ValueError("q_reference must exceed 4")
    rows = []
    for radius in sorted(radii):
        power4 = disc_power_norm(4.0, radius)
        reference = disc_power_norm(q_reference, radius)
        rows.append({"radius": radius, "norm_q4": power4 ** 0.25, "norm_ref": reference ** (1.0 / q_reference),
                     "power_q4": power4, "power_ref": reference, "ratio": power4 / math.log(radius)})
    table = pd.DataFrame(rows)
    report = BoundCheckReport.from_samples('schur_q4_divergence', table)
    rates = np.diff(table['power_q4']) / np.diff(np.log(table['radius']))
    settled = abs(table['power_ref'].iloc[-1] - table['power_ref'].iloc[-2]) <= 1e-3 * table['power_ref'].iloc[-1]
    growing = bool(np.all(np.abs(rates[-2:] - DIVERGENCE_RATE) <= 0.1 * DIVERGENCE_RATE))
    report.verdict = report.verdict and growing and bool(settled)
    return report
# ----------------------------------------------------------------------------------------------------------------------


class SchurSuite(VerificationSuite):
    """
    SchurSuite(p, q, j_range, grid, verbose, threads)

        Deterministic: the envelope operator needs no random samples, so samples and seed are ignored

    """
    name = 'schur'

    def __init__(self,
                 p: float = 1.2,
                 q: float = 6.0,
                 j_range: Sequence[int] = SCHUR_J_RANGE,
                 grid: Optional[GridSpec] = None,
                 verbose: bool = True,
                 threads: int = 1):
        super().__init__(verbose=verbose, threads=threads)
        _check_schur_exponents(p, q)
        self.p = p
        self.q = q
        self.j_range = tuple(j_range)
        self.grid = grid if grid is not None else SCHUR_GRID
    # ------------------------------------------------------------------------------------------------------------------

    def run(self,
            samples: int,
            seed: int) -> List[BoundCheckReport]:
        return [check_schur_bound(self.j_range, self.p, self.q, self.grid, verbose=self.verbose),
                check_schur_sup_bound(self.j_range, self.grid),
                check_q4_divergence()]
# ----------------------------------------------------------------------------------------------------------------------
