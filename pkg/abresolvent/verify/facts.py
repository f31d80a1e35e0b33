import math
import numpy as np
import pandas as pd
from scipy.integrate import quad_vec
from tqdm import tqdm
from typing import Dict, List, Optional, Sequence, Tuple

from abresolvent.geometry import diffractive_phase_derivatives
from abresolvent.kernel import BoundaryRadial, bracket_parts, diffractive_row, direct_angular_factor, \
    radial_lambda_integrals
from abresolvent.oscillatory import QuadratureError
from abresolvent.regimes import Branch, SpectralParameter
from abresolvent.report import BoundCheckReport, VerificationSuite
from abresolvent.specfun import SmoothCutoff, finite_difference_bounds, split_ab


FLUX_VALUES = (-0.9, -0.7, -0.5, -0.3, -0.1, 0.1, 0.3, 0.5, 0.7, 0.9)
ANGLE_POINTS = 256
# singular-denominator split of [0, 1]: the profiles vary on the scale s ~ |sin(φ/2)|
SPLIT_POINTS = tuple(np.geomspace(1e-4, 0.5, 14))
QUAD_EPSABS = 1e-10
QUAD_EPSREL = 1e-8
CLOSED_FORM_LIMIT = 1e-8

LOG_CLAIM_TOTALS = tuple(np.geomspace(1e-3, 0.7, 12))
LOG_CLAIM_FRACTIONS = (0.05, 0.5)
LOG_CLAIM_FLUXES = (-0.7, 0.3, 0.5, 0.9)
LOG_CLAIM_ANGLES = 32

PHASE_NEAR = np.linspace(0.0, 1.0, 65)
PHASE_FAR = np.geomspace(1.0, 40.0, 64)

ENVELOPE_DELTAS = (-0.6, -0.2, 0.2, 0.6)
# |δ| below this is the boundary strip, outside the positive regime envelope
POSITIVE_DELTA_MIN = 0.1
NEAR_RADII = (1e-4, 0.7)
FAR_RADII = (0.75, 50.0)
ENVELOPE_POINTS = 24
ENVELOPE_TOL = 1e-10

CUTOFF_GRID = np.geomspace(1e-4, 50.0, 1200)
CUTOFF_ORDERS = (0, 1, 2)


def angle_grid(count: int = ANGLE_POINTS) -> np.ndarray:
    """Midpoint grid φ = 2π(k + ½)/count of the angle φ = θ1 − θ2 + π; φ ≡ 0 itself is left out."""
    if count < 4:
        raise ValueError("angle grid needs at least 4 points")
    return 2.0 * math.pi * (np.arange(count) + 0.5) / count
# ----------------------------------------------------------------------------------------------------------------------


def _integrate_profile(profile,
                       phi: np.ndarray) -> Tuple[np.ndarray, float]:
    """∫₀^∞ profile(s, φ) ds for a vector of angles, split at s = 1 and at the points of SPLIT_POINTS."""
    head, err_head = quad_vec(lambda s: profile(s, phi), 0.0, 1.0, epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL,
                              norm='max', points=SPLIT_POINTS)
    tail, err_tail = quad_vec(lambda s: profile(s, phi), 1.0, np.inf, epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL,
                              norm='max')
    return np.asarray(head) + np.asarray(tail), float(err_head + err_tail)
# ----------------------------------------------------------------------------------------------------------------------


def bracket_integrals(alpha: float,
                      phi: np.ndarray) -> Dict[str, np.ndarray]:
    """
    bracket_integrals(alpha, phi)

        The three absolute s-integrals of the diffraction bracket:
            'exponential': ∫₀^∞ e^{−|α|s} ds;
            'sinh': ∫₀^∞ |(e^{−s} − cos φ)sinh(αs)/(cosh s − cos φ)| ds;
            'cosh': ∫₀^∞ |sin φ·cosh(αs)/(cosh s − cos φ)| ds,
        and 'amplitude': ∫₀^∞ |sin(|α|π)e^{−|α|s} + sin(απ)(sinh part − i·cosh part)| ds

        Parameters
        ----------
        alpha: float
            α ∈ (−1, 1)∖{0}
        phi: np.ndarray

        Returns
        -------
        Dict[str, np.ndarray]
            one value per angle, plus 'error' with the summed quadrature error estimate
    """
    if not 0 < abs(alpha) < 1:
        raise ValueError("alpha must lie in (-1, 1) without 0")
    phi = np.asarray(phi, dtype=float)
    weights = (math.sin(abs(alpha) * math.pi), math.sin(alpha * math.pi))

    def part(index):
        return lambda s, angles: np.abs(bracket_parts(alpha, s, angles)[index])

    def amplitude(s, angles):
        exp_term, sinh_term, cosh_term = bracket_parts(alpha, s, angles)
        return np.abs(weights[0] * exp_term + weights[1] * (sinh_term - 1j * cosh_term))

    values = {}
    error = 0.0
    for name, profile in (('exponential', part(0)), ('sinh', part(1)), ('cosh', part(2)), ('amplitude', amplitude)):
        values[name], err = _integrate_profile(profile, phi)
        error += err
    values['error'] = error
    return values
# ----------------------------------------------------------------------------------------------------------------------


def check_B_facts(alphas: Sequence[float] = FLUX_VALUES,
                  n_angles: int = ANGLE_POINTS,
                  verbose: bool = False) -> BoundCheckReport:
    """
    check_B_facts(alphas, n_angles, verbose)

        Maxima over α and the angle grid of the three integrals
        ∫e^{−|α|s}, ∫|(e^{−s} − cos φ)sinh(αs)/(cosh s − cos φ)| and ∫|sin φ·cosh(αs)/(cosh s − cos φ)|
        over s ∈ (0, ∞). The exponential integral must also match 1/|α| to CLOSED_FORM_LIMIT (relative)

        Parameters
        ----------
        alphas: Sequence[float]
        n_angles: int
        verbose: bool

        Returns
        -------
        BoundCheckReport
            claim 'bracket_integrals'; details hold fact, alpha, phi, value and ratio = value
    """
    phi = angle_grid(n_angles)
    rows = []
    closed_form_error = 0.0
    for alpha in tqdm(alphas, desc='Bracket integrals', disable=not verbose):
        values = bracket_integrals(alpha, phi)
        closed_form_error = max(closed_form_error,
                                float(np.max(np.abs(values['exponential'] * abs(alpha) - 1.0))))
        for fact in ('exponential', 'sinh', 'cosh'):
            for angle, value in zip(phi, values[fact]):
                rows.append({"fact": fact, "alpha": alpha, "phi": angle, "value": float(value),
                             "ratio": float(value)})
    report = BoundCheckReport.from_samples('bracket_integrals', pd.DataFrame(rows))
    report.verdict = report.verdict and closed_form_error <= CLOSED_FORM_LIMIT
    return report
# ----------------------------------------------------------------------------------------------------------------------


def check_B_integrability(alphas: Sequence[float] = FLUX_VALUES,
                          n_angles: int = ANGLE_POINTS,
                          verbose: bool = False) -> BoundCheckReport:
    """
    check_B_integrability(alphas, n_angles, verbose)

        |A_α(θ1, θ2)| + ∫₀^∞|B_α(s, θ1, θ2)| ds over α and the angle grid, both angular factors
        carrying their 1/(4π²) normalization. For constant flux |A_α| depends on Δ = θ2 − θ1 only,
        and is evaluated at Δ = φ − π
    """
    phi = angle_grid(n_angles)
    rows = []
    for alpha in tqdm(alphas, desc='Amplitude integrability', disable=not verbose):
        integral = bracket_integrals(alpha, phi)['amplitude'] / (4.0 * math.pi ** 2)
        direct = np.abs(direct_angular_factor(alpha, phi - math.pi))
        for angle, a_value, b_value in zip(phi, direct, integral):
            rows.append({"alpha": alpha, "phi": angle, "direct": float(a_value), "diffractive": float(b_value),
                         "ratio": float(a_value + b_value)})
    return BoundCheckReport.from_samples('amplitude_integrability', pd.DataFrame(rows))
# ----------------------------------------------------------------------------------------------------------------------


def check_g2_claim(totals: Sequence[float] = LOG_CLAIM_TOTALS,
                   fractions: Sequence[float] = LOG_CLAIM_FRACTIONS,
                   alphas: Sequence[float] = LOG_CLAIM_FLUXES,
                   n_angles: int = LOG_CLAIM_ANGLES,
                   tol: float = 1e-9,
                   verbose: bool = False) -> BoundCheckReport:
    """
    check_g2_claim(totals, fractions, alphas, n_angles, tol, verbose)

        Near diffractive part d2 of the boundary kernel against |log(r1 + r2)| for r1 + r2 < 3/4,
        with r1 = S·t, r2 = S·(1 − t). Quadrature failures are skipped and counted

        Returns
        -------
        BoundCheckReport
            claim 'near_diffractive_log'
    """
    if any(total >= 0.75 for total in totals):
        raise ValueError("r1 + r2 must stay below 3/4")
    radial = BoundaryRadial(Branch.PLUS)
    deltas = angle_grid(n_angles) - math.pi
    rows = []
    skipped = 0
    jobs = [(total, t, alpha) for total in totals for t in fractions for alpha in alphas]
    bar = tqdm(jobs, desc='Near diffractive part', disable=not verbose)
    worst = 0.0
    for total, t, alpha in bar:
        r1, r2 = total * t, total * (1.0 - t)
        try:
            _, d2, _ = diffractive_row(alpha, r1, r2, deltas, radial, tol)
        except QuadratureError:
            skipped += len(deltas)
            continue
        envelope = abs(math.log(total))
        for delta, value in zip(deltas, np.abs(d2)):
            rows.append({"alpha": alpha, "r1": r1, "r2": r2, "delta": delta, "value": float(value),
                         "ratio": float(value) / envelope})
        worst = max(worst, float(np.max(np.abs(d2))) / envelope)
        bar.set_postfix_str(f"worst ratio: {worst:.4g}")
    return BoundCheckReport.from_samples('near_diffractive_log', pd.DataFrame(rows), skipped=skipped)
# ----------------------------------------------------------------------------------------------------------------------


def check_phase_derivatives(samples: int = 2000,
                            seed: int = 0) -> BoundCheckReport:
    """
    check_phase_derivatives(samples, seed)

        Lower bounds of the diffracted phase φ(s) = |n(s)| used by the dyadic checks:
        φ″ ≥ c·r1r2/(r1 + r2) on [0, 1] and φ′ ≥ c·r1r2/(r1 + r2) on [1, ∞), with r1 + r2 ∈ [3/4, 8/3].
        The ratio is (r1r2/(r1 + r2))/φ″ (resp. /φ′), so 1/max_ratio is the observed c

        Returns
        -------
        BoundCheckReport
            claim 'phase_lower_bounds'
    """
    rng = np.random.default_rng(seed)
    rows = []
    for index in range(samples):
        total = rng.uniform(0.75, 8.0 / 3.0)
        t = rng.uniform(1e-3, 1.0 - 1e-3)
        r1, r2 = total * t, total * (1.0 - t)
        scale = r1 * r2 / total
        _, second = diffractive_phase_derivatives(r1, r2, PHASE_NEAR)
        first, _ = diffractive_phase_derivatives(r1, r2, PHASE_FAR)
        near = scale / np.abs(second)
        far = scale / first
        rows.append({"sample": index, "r1": r1, "r2": r2, "range": 'near', "s": float(PHASE_NEAR[np.argmax(near)]),
                     "ratio": float(np.max(near))})
        rows.append({"sample": index, "r1": r1, "r2": r2, "range": 'far', "s": float(PHASE_FAR[np.argmax(far)]),
                     "ratio": float(np.max(far))})
    return BoundCheckReport.from_samples('phase_lower_bounds', pd.DataFrame(rows))
# ----------------------------------------------------------------------------------------------------------------------


def _split_envelope(piece: str):
    def envelope(r, k):
        r = np.asarray(r, dtype=float)
        if piece == 'b' and k == 0:
            return np.abs(np.log(r))
        return r ** (-float(k))
    return envelope
# ----------------------------------------------------------------------------------------------------------------------


def split_constants(cutoff: SmoothCutoff,
                    r: np.ndarray = CUTOFF_GRID,
                    orders: Sequence[int] = CUTOFF_ORDERS) -> Dict[Tuple[str, int], float]:
    """
    split_constants(cutoff, r, orders)

        Constants of |a^{(k)}(r)| ≲ r^{−k}, |b(r)| ≲ |log r| and |b^{(k)}(r)| ≲ r^{−k} (k ≥ 1) for the
        Hankel split made with the given cutoff, estimated by finite differences on a log grid
    """
    split = split_ab(r, cutoff)
    constants = {}
    for piece, values in (('a', split.a_part), ('b', split.b_part)):
        fd = finite_difference_bounds(np.asarray(values), r, orders, _split_envelope(piece))
        for k in orders:
            constants[(piece, k)] = fd.max_ratio[k]
    return constants
# ----------------------------------------------------------------------------------------------------------------------


def check_cutoff_stability(alternative: str = 'smoothstep') -> BoundCheckReport:
    """
    check_cutoff_stability(alternative)

        Hankel split constants for the default 'bump' cutoff and an alternative kind. The ratio
        column is max(C_alt/C_ref, C_ref/C_alt) per piece and order; both constants must be finite
        and positive, the spread is recorded

        Returns
        -------
        BoundCheckReport
            claim 'split_cutoff_stability'
    """
    reference = split_constants(SmoothCutoff('bump'))
    other = split_constants(SmoothCutoff(alternative))
    rows = []
    for (piece, k), value in reference.items():
        alt = other[(piece, k)]
        spread = max(alt / value, value / alt) if value > 0 and alt > 0 else math.inf
        rows.append({"piece": piece, "order": k, "reference": value, "alternative": alt, "ratio": spread})
    return BoundCheckReport.from_samples('split_cutoff_stability', pd.DataFrame(rows))
# ----------------------------------------------------------------------------------------------------------------------


def envelope_radii(points: int = ENVELOPE_POINTS) -> Tuple[np.ndarray, np.ndarray]:
    return np.geomspace(*NEAR_RADII, points), np.geomspace(*FAR_RADII, points)
# ----------------------------------------------------------------------------------------------------------------------


def check_radial_envelopes(points: int = ENVELOPE_POINTS,
                           deltas: Sequence[float] = ENVELOPE_DELTAS,
                           tol: float = ENVELOPE_TOL,
                           verbose: bool = False) -> BoundCheckReport:
    """
    check_radial_envelopes(points, deltas, tol, verbose)

        The λ-integrals ∫₀^∞ λ/(λ² − σ)·a±(λr)e^{±iλr} dλ of the negative (σ = −√(1 − δ²) + iδ) and
        positive (σ = √(1 − δ²) + iδ, |δ| ≥ 0.1) regimes, with a± the two halves of J₀, against
        −log r on (0, 3/4) and r^{−1} on [3/4, 50]

        Parameters
        ----------
        points: int
            radii per range, geometric
        deltas: Sequence[float]
        tol: float
        verbose: bool

        Returns
        -------
        BoundCheckReport
            claim 'radial_envelopes'; details hold regime, delta, r, range, plus, minus and ratio.
            The verdict needs every (regime, range) group finite
    """
    near, far = envelope_radii(points)
    jobs = []
    for sign, regime in ((-1, 'negative'), (1, 'positive')):
        for delta in deltas:
            if sign > 0 and abs(delta) < POSITIVE_DELTA_MIN:
                continue
            sigma = SpectralParameter.from_delta(delta, sign=sign)
            jobs.extend((regime, delta, sigma, r, 'near') for r in near)
            jobs.extend((regime, delta, sigma, r, 'far') for r in far)
    rows = []
    skipped = 0
    worst = 0.0
    bar = tqdm(jobs, desc='Radial envelopes', disable=not verbose)
    for regime, delta, sigma, r, part in bar:
        try:
            plus, minus = radial_lambda_integrals(float(r), sigma, tol=tol)
        except QuadratureError:
            skipped += 1
            continue
        envelope = -math.log(r) if part == 'near' else 1.0 / r
        ratio = max(abs(plus), abs(minus)) / envelope
        rows.append({"regime": regime, "delta": delta, "r": float(r), "range": part,
                     "plus": abs(plus), "minus": abs(minus), "ratio": ratio})
        worst = max(worst, ratio)
        bar.set_postfix_str(f"worst ratio: {worst:.4g}")
    return BoundCheckReport.from_samples('radial_envelopes', pd.DataFrame(rows), skipped=skipped)
# ----------------------------------------------------------------------------------------------------------------------


class BracketFactsSuite(VerificationSuite):
    """
    BracketFactsSuite(n_angles, verbose, threads)

        Integrability facts of the diffractive amplitude: bracket integrals on the angle grid and on its
        doubling, amplitude integrability, the near part log claim, the phase lower bounds on
        `samples` radius pairs and the cutoff stability of the Hankel split

    """
    name = 'bfacts'

    def __init__(self,
                 n_angles: int = ANGLE_POINTS,
                 verbose: bool = True,
                 threads: int = 1):
        super().__init__(verbose=verbose, threads=threads)
        self.n_angles = n_angles
    # ------------------------------------------------------------------------------------------------------------------

    def run(self,
            samples: int,
            seed: int) -> List[BoundCheckReport]:
        coarse = check_B_facts(n_angles=self.n_angles, verbose=self.verbose)
        fine = check_B_facts(n_angles=2 * self.n_angles, verbose=self.verbose)
        return [coarse.refined(fine),
                check_B_integrability(n_angles=self.n_angles, verbose=self.verbose),
                check_g2_claim(verbose=self.verbose),
                check_phase_derivatives(samples, seed),
                check_cutoff_stability()]
# ----------------------------------------------------------------------------------------------------------------------


class RadialEnvelopeSuite(VerificationSuite):
    name = 'lemma3'

    def __init__(self,
                 points: Optional[int] = None,
                 verbose: bool = True,
                 threads: int = 1):
        super().__init__(verbose=verbose, threads=threads)
        self.points = points if points is not None else ENVELOPE_POINTS
    # ------------------------------------------------------------------------------------------------------------------

    def run(self,
            samples: int,
            seed: int) -> List[BoundCheckReport]:
        coarse = check_radial_envelopes(self.points, verbose=self.verbose)
        fine = check_radial_envelopes(2 * self.points, verbose=self.verbose)
        return [coarse.refined(fine)]
# ----------------------------------------------------------------------------------------------------------------------
