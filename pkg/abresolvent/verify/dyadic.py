import math
import numpy as np
import pandas as pd
from scipy.special import wofz
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from abresolvent.geometry import TWO_PI, diffractive_angle, diffractive_distance, diffractive_phase_derivatives, \
    polar_distance
from abresolvent.kernel import DIFFRACTIVE_WEIGHT, BoundaryRadial, bracket_parts, diffractive_row, \
    geometric_breakpoints
from abresolvent.oscillatory import OscillatoryProblem, QuadratureError, integrate, van_der_corput_bound
from abresolvent.regimes import Branch
from abresolvent.report import BoundCheckReport, VerificationSuite
from abresolvent.specfun import DyadicCutoff, SmoothCutoff, hankel_amplitude_asymptotic


# half width of the angular window around θ1 − θ2 = π
WINDOW_EPSILON = 0.05
DEFAULT_J_RANGE = tuple(range(2, 9))
# van der Corput constant for a second derivative lower bound
VDC_CONSTANT_2 = 8.0
CONSISTENCY_LIMIT = 1e-6
CLOSED_FORM_LIMIT = 1e-6
# every CONSISTENCY_STRIDE-th diffractive sample is compared with the kernel module
CONSISTENCY_STRIDE = 4
QUADRATURE_TOL = 1e-10
QUADRATURE_RTOL = 1e-8
DIFFRACTIVE_PARTS = ('1', '2', '3e', '3m', '3H')


def far_amplitude(r: np.ndarray,
                  cutoff: Optional[SmoothCutoff] = None) -> np.ndarray:
    """a(r) = (1 − χ(r))·H₀⁺(r)·e^{−ir}·r^{1/2}, without forming the oscillating product."""
    cutoff = cutoff if cutoff is not None else SmoothCutoff()
    r = np.asarray(r, dtype=float)
    weight = 1.0 - cutoff(r)
    out = np.zeros(r.shape, dtype=complex)
    active = weight > 0
    if np.any(active):
        out[active] = weight[active] * hankel_amplitude_asymptotic(r[active])
    return out
# ----------------------------------------------------------------------------------------------------------------------


def angular_window(theta: np.ndarray,
                   epsilon: float = WINDOW_EPSILON) -> np.ndarray:
    """η(θ): 1 for |θ − π| ≤ ε, 0 for |θ − π| ≥ 2ε."""
    return SmoothCutoff(lower=epsilon, upper=2.0 * epsilon)(np.abs(np.asarray(theta, dtype=float) - math.pi))
# ----------------------------------------------------------------------------------------------------------------------


def distance_derivatives(r1: float,
                         r2: float,
                         delta: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    distance_derivatives(r1, r2, delta)

        θ-derivatives of d(θ) = |x − y| at angle difference delta = θ1 − θ2:
        ∂d = r1r2·sin(delta)/d and ∂²d = r1r2·cos(delta)/d − (r1r2·sin(delta))²/d³
    """
    delta = np.asarray(delta, dtype=float)
    d = polar_distance(r1, r2, delta)
    product = r1 * r2
    first = product * np.sin(delta) / d
    second = product * np.cos(delta) / d - (product * np.sin(delta)) ** 2 / d ** 3
    return first, second
# ----------------------------------------------------------------------------------------------------------------------


def dyadic_levels(samples: int,
                  j_range: Sequence[int]) -> List[int]:
    """Levels j assigned round robin to the samples."""
    if samples < 1:
        raise ValueError("samples must be positive")
    if len(j_range) == 0:
        raise ValueError("j_range must not be empty")
    return [int(j_range[i % len(j_range)]) for i in range(samples)]
# ----------------------------------------------------------------------------------------------------------------------


def direct_dyadic_kernel(j: int,
                         r1: float,
                         r2: float,
                         r2_prime: float,
                         theta2: float,
                         theta2_prime: float,
                         epsilon: float = WINDOW_EPSILON,
                         tol: float = QUADRATURE_TOL) -> complex:
    """
    direct_dyadic_kernel(j, r1, r2, r2_prime, theta2, theta2_prime, epsilon, tol)

        The θ1-integral of the composed direct dyadic kernel
        2^{−j}∫ e^{i2^j(d − d′)}·β(d)d^{−1/2}·β(d′)d′^{−1/2}·a(2^jd)·conj(a(2^jd′))·η(θ1−θ2)η(θ1−θ2′) dθ1,
        d = |x − y|, d′ = |x − z| with x = (r1, θ1), y = (r2, θ2), z = (r2′, θ2′), over
        [max(θ2, θ2′) + π − 2ε, min(θ2, θ2′) + π]

        Parameters
        ----------
        j: int
        r1: float
        r2: float
        r2_prime: float
        theta2: float
        theta2_prime: float
        epsilon: float
        tol: float

        Returns
        -------
        complex
    """
    lower = max(theta2, theta2_prime) + math.pi - 2.0 * epsilon
    upper = min(theta2, theta2_prime) + math.pi
    if not upper > lower:
        return 0j
    lam = 2.0 ** j

    def amplitude(theta):
        d = polar_distance(r1, r2, theta - theta2)
        dp = polar_distance(r1, r2_prime, theta - theta2_prime)
        return DyadicCutoff.beta(d) * d ** -0.5 * DyadicCutoff.beta(dp) * dp ** -0.5 * \
            far_amplitude(lam * d) * np.conj(far_amplitude(lam * dp)) * \
            angular_window(theta - theta2, epsilon) * angular_window(theta - theta2_prime, epsilon)

    def phase(theta):
        return polar_distance(r1, r2, theta - theta2) - polar_distance(r1, r2_prime, theta - theta2_prime)

    def phase_d1(theta):
        return distance_derivatives(r1, r2, theta - theta2)[0] - distance_derivatives(r1, r2_prime,
                                                                                     theta - theta2_prime)[0]

    def phase_d2(theta):
        return distance_derivatives(r1, r2, theta - theta2)[1] - distance_derivatives(r1, r2_prime,
                                                                                     theta - theta2_prime)[1]

    problem = OscillatoryProblem(phase=phase, amplitude=amplitude, frequency=lam, interval=(lower, upper),
                                 phase_derivative=phase_d1, phase_second_derivative=phase_d2,
                                 name='direct dyadic')
    value, _ = integrate(problem, tol=tol, rtol=QUADRATURE_RTOL)
    return complex(value) / lam
# ----------------------------------------------------------------------------------------------------------------------


def multiplier_problem(j: int,
                       r1: float,
                       r2: float,
                       zeta: float,
                       epsilon: float = WINDOW_EPSILON) -> OscillatoryProblem:
    """
    multiplier_problem(j, r1, r2, zeta, epsilon)

        ∫_{π−2ε}^{π} e^{iζθ + i2^j d(θ)}·β(d)·(2^jd)^{−1/2}·a(2^jd)·η(θ) dθ as an oscillatory problem
        of frequency 2^j and phase d(θ) + ζθ/2^j, d(θ) = |x − y| at angle difference θ
    """
    lam = 2.0 ** j

    def amplitude(theta):
        d = polar_distance(r1, r2, theta)
        return DyadicCutoff.beta(d) * (lam * d) ** -0.5 * far_amplitude(lam * d) * angular_window(theta, epsilon)

    return OscillatoryProblem(phase=lambda theta: polar_distance(r1, r2, theta) + zeta * np.asarray(theta) / lam,
                              amplitude=amplitude,
                              frequency=lam,
                              interval=(math.pi - 2.0 * epsilon, math.pi),
                              phase_derivative=lambda theta: distance_derivatives(r1, r2, theta)[0] + zeta / lam,
                              phase_second_derivative=lambda theta: distance_derivatives(r1, r2, theta)[1],
                              name='multiplier')
# ----------------------------------------------------------------------------------------------------------------------


def diffractive_amplitudes(j: int,
                           r1: float,
                           r2: float,
                           alpha: float,
                           angle: float) -> Callable:
    """
    diffractive_amplitudes(j, r1, r2, alpha, angle)

        Amplitudes (ψ1, ψ2, ψ3, ψ3m, ψ3e) of the diffractive dyadic pieces as functions of (s, |n|):
        ψℓ = |n|^{−1/2}a(2^j|n|)fℓ(s) with f1 = e^{−|α|s}, f2 = (e^{−s} − cos φ)sinh(αs)/(cosh s − cos φ),
        f3 = sin φ·cosh(αs)/(cosh s − cos φ); the model part ψ3m = S^{−1/2}a(2^jS)·sin φ/(s²/2 + b²),
        S = r1 + r2, b² = 2sin²(φ/2), vanishes for b = 0, and ψ3e = ψ3 − ψ3m
    """
    lam = 2.0 ** j
    total = r1 + r2
    b_sq = 2.0 * math.sin(0.5 * angle) ** 2
    model_scale = total ** -0.5 * complex(far_amplitude(np.array([lam * total]))[0]) * math.sin(angle)

    def amplitude(s, n):
        s = np.asarray(s, dtype=float)
        n = np.asarray(n, dtype=float)
        exp_term, sinh_term, cosh_term = bracket_parts(alpha, s, angle)
        base = n ** -0.5 * far_amplitude(lam * n)
        psi3 = base * cosh_term
        if b_sq > 0:
            model = model_scale / (0.5 * s ** 2 + b_sq)
        else:
            model = np.zeros(s.shape, dtype=complex)
        return np.stack([base * exp_term, base * sinh_term, psi3, model, psi3 - model], axis=-1)

    return amplitude
# ----------------------------------------------------------------------------------------------------------------------


def diffractive_integrals(j: int,
                          r1: float,
                          r2: float,
                          amplitude: Callable,
                          tol: float = QUADRATURE_TOL) -> np.ndarray:
    """
    diffractive_integrals(j, r1, r2, amplitude, tol)

        ∫₀^∞ e^{i2^j|n(s)|}·amplitude(s, |n(s)|) ds for a vector valued amplitude: s ∈ [0, 1] directly,
        the rest in u = |n| where the phase is linear, with jacobian u/(r1r2·sinh s)
    """
    lam = 2.0 ** j

    def phase(s):
        return diffractive_distance(r1, r2, np.asarray(s, dtype=float))

    near = OscillatoryProblem(phase=phase,
                              amplitude=lambda s: amplitude(s, phase(s)),
                              frequency=lam,
                              interval=(0.0, 1.0),
                              phase_derivative=lambda s: diffractive_phase_derivatives(r1, r2, s)[0],
                              phase_second_derivative=lambda s: diffractive_phase_derivatives(r1, r2, s)[1],
                              breakpoints=geometric_breakpoints(0.0, 1.0),
                              name='diffractive dyadic')
    head, _ = integrate(near, tol=tol, rtol=QUADRATURE_RTOL)

    def in_u(u):
        u = np.asarray(u, dtype=float)
        s = diffractive_angle(r1, r2, u)
        return amplitude(s, u) * (u / (r1 * r2 * np.sinh(s)))[:, None]

    tail = OscillatoryProblem(phase=lambda u: np.asarray(u, dtype=float),
                              amplitude=in_u,
                              frequency=lam,
                              interval=(float(phase(1.0)), np.inf),
                              phase_derivative=lambda u: np.ones_like(np.asarray(u, dtype=float)),
                              phase_second_derivative=lambda u: np.zeros_like(np.asarray(u, dtype=float)),
                              name='diffractive dyadic tail')
    rest, _ = integrate(tail, tol=tol, rtol=QUADRATURE_RTOL)
    return np.asarray(head) + np.asarray(rest)
# ----------------------------------------------------------------------------------------------------------------------


def morse_frequency(j: int,
                    r1: float,
                    r2: float) -> float:
    """Coefficient κ of the quadratic normal form |n(s)| − (r1 + r2) ≈ (κ/2^j)·s², times 2^j."""
    return 2.0 ** j * r1 * r2 / (2.0 * (r1 + r2))
# ----------------------------------------------------------------------------------------------------------------------


def quadratic_lorentz_integral(kappa: float,
                               b_sq: float) -> complex:
    """
    quadratic_lorentz_integral(kappa, b_sq)

        ∫₀^∞ e^{iκs²}/(s²/2 + b²) ds = (π/c)·w(i·c·√κ·e^{−iπ/4}), c = √2·b, with w the Faddeeva function
    """
    if b_sq <= 0:
        raise ValueError("b_sq must be positive")
    if kappa < 0:
        raise ValueError("kappa must be nonnegative")
    c = math.sqrt(2.0 * b_sq)
    return complex(math.pi / c * wofz(1j * c * math.sqrt(kappa) * np.exp(-0.25j * math.pi)))
# ----------------------------------------------------------------------------------------------------------------------


def model_h(j: int,
            r1: float,
            r2: float,
            angle: float) -> complex:
    """
    model_h(j, r1, r2, angle)

        H = 2^{−j/2}β(S)·∫₀^∞ e^{iκs²}ψ3m(s) ds in closed form, S = r1 + r2, κ = morse_frequency;
        zero when b = 0
    """
    b_sq = 2.0 * math.sin(0.5 * angle) ** 2
    if b_sq == 0:
        return 0j
    lam = 2.0 ** j
    total = r1 + r2
    scale = total ** -0.5 * complex(far_amplitude(np.array([lam * total]))[0]) * math.sin(angle)
    return lam ** -0.5 * DyadicCutoff.beta(total) * scale * \
        quadratic_lorentz_integral(morse_frequency(j, r1, r2), b_sq)
# ----------------------------------------------------------------------------------------------------------------------


def diffractive_envelope(j: int,
                         r1: float,
                         r2: float) -> float:
    return 2.0 ** (-0.5 * j) * (1.0 + 2.0 ** j * r1 * r2) ** -0.5
# ----------------------------------------------------------------------------------------------------------------------


class DyadicSuite(VerificationSuite):
    """
    DyadicSuite(j_range, tol, verbose, threads)

        Base of the sampled dyadic kernel checks: one level j per sample, assigned round robin over
        j_range, and ratios fitted in log2 against j

    """

    def __init__(self,
                 j_range: Sequence[int] = DEFAULT_J_RANGE,
                 tol: float = QUADRATURE_TOL,
                 verbose: bool = True,
                 threads: int = 1):
        super().__init__(verbose=verbose, threads=threads)
        self.j_range = tuple(int(j) for j in j_range)
        if any(j < 1 for j in self.j_range):
            raise ValueError("dyadic levels must be at least 1")
        self.tol = tol
    # ------------------------------------------------------------------------------------------------------------------

    def report(self,
               claim_id: str,
               table: pd.DataFrame,
               skipped: int) -> BoundCheckReport:
        return BoundCheckReport.from_samples(claim_id, table, skipped=skipped, trend_column='j', require_flat=True)
# ----------------------------------------------------------------------------------------------------------------------


class DirectDyadicSuite(DyadicSuite):
    """
    DirectDyadicSuite(j_range, tol, verbose, threads)

        |K̃^j_G(r1, r2, r2′; θ2, θ2′)| against 2^{−j}(2^j|r2 − r2′|)^{−1/2}r1^{−1}.
        Samples: S = r1 + r2 ∈ [0.8, 2.4], |r2 − r2′| = 10^{U(−3, −0.5)}, |θ2 − θ2′| < ε.
        Each row carries the diagnostic label of the two proof cases, r1r2′|θ2 − θ2′| < ε^{−1}r1²|r2 − r2′|
        (case 1) or not (case 2); the evaluation itself does not branch

    """
    name = 'direct'

    def draw(self,
             samples: int,
             seed: int) -> List[Dict]:
        rng = np.random.default_rng(seed)
        draws = []
        for index, j in enumerate(dyadic_levels(samples, self.j_range)):
            total = rng.uniform(0.8, 2.4)
            r1 = total * rng.uniform(0.1, 0.9)
            r2 = total - r1
            gap = 10.0 ** rng.uniform(-3.0, -0.5) * rng.choice([-1.0, 1.0])
            r2_prime = r2 + gap if r2 + gap > 0.05 else r2 - gap
            theta2 = rng.uniform(0.0, TWO_PI)
            theta2_prime = theta2 + rng.uniform(-WINDOW_EPSILON, WINDOW_EPSILON)
            draws.append({"sample": index, "j": j, "r1": r1, "r2": r2, "r2_prime": r2_prime,
                          "theta2": theta2, "theta2_prime": theta2_prime})
        return draws
    # ------------------------------------------------------------------------------------------------------------------

    def evaluate(self,
                 point: Dict) -> Optional[Dict]:
        j, r1, r2, r2_prime = point['j'], point['r1'], point['r2'], point['r2_prime']
        gap = abs(r2 - r2_prime)
        if gap == 0:
            # envelope infinite, the claim is vacuous
            return None
        try:
            value = direct_dyadic_kernel(j, r1, r2, r2_prime, point['theta2'], point['theta2_prime'], tol=self.tol)
        except QuadratureError:
            return None
        envelope = 2.0 ** -j * (2.0 ** j * gap) ** -0.5 / r1
        angular = abs(point['theta2'] - point['theta2_prime'])
        case = 1 if r1 * r2_prime * angular < r1 ** 2 * gap / WINDOW_EPSILON else 2
        return {**point, "case": case, "value": abs(value), "ratio": abs(value) / envelope}
    # ------------------------------------------------------------------------------------------------------------------

    def run(self,
            samples: int,
            seed: int) -> List[BoundCheckReport]:
        table, skipped = self.sweep(self.draw(samples, seed), self.evaluate, desc='Direct dyadic kernel')
        return [self.report('direct_dyadic', table, skipped)]
# ----------------------------------------------------------------------------------------------------------------------


class MultiplierSuite(DyadicSuite):
    """
    MultiplierSuite(j_range, tol, verbose, threads)

        |M_j(ζ)| against 2^{−j/2}(2^jr1r2)^{−1/2}, and at ζ = 0 the van der Corput consistency
        |M_j(0)| ≤ 8·(2^j·min|d″|)^{−1/2}(|ψ(π)| + ∫|ψ′|) on the same phase.
        Samples: S ∈ [0.8, 2.4], r1 = St with t log-uniform in [1e-3, 1/2]; ζ either resolves the
        stationary point inside the window or is drawn from [−2^j, 2^j]

    """
    name = 'multiplier'

    def draw(self,
             samples: int,
             seed: int) -> List[Dict]:
        rng = np.random.default_rng(seed)
        draws = []
        for index, j in enumerate(dyadic_levels(samples, self.j_range)):
            total = rng.uniform(0.8, 2.4)
            t = 10.0 ** rng.uniform(-3.0, math.log10(0.5))
            r1, r2 = total * t, total * (1.0 - t)
            if index % 2 == 0:
                zeta = rng.uniform(-1.0, 1.0) * 2.0 ** j * r1 * r2 * 2.0 * WINDOW_EPSILON / total
            else:
                zeta = rng.uniform(-1.0, 1.0) * 2.0 ** j
            draws.append({"sample": index, "j": j, "r1": r1, "r2": r2, "zeta": zeta})
        return draws
    # ------------------------------------------------------------------------------------------------------------------

    def evaluate(self,
                 point: Dict) -> Optional[Dict]:
        j, r1, r2 = point['j'], point['r1'], point['r2']
        try:
            value, _ = integrate(multiplier_problem(j, r1, r2, point['zeta']), tol=self.tol, rtol=QUADRATURE_RTOL)
        except QuadratureError:
            return None
        envelope = 2.0 ** (-0.5 * j) * (2.0 ** j * r1 * r2) ** -0.5
        return {**point, "value": abs(value), "ratio": abs(value) / envelope}
    # ------------------------------------------------------------------------------------------------------------------

    def evaluate_stationary(self,
                            point: Dict) -> Optional[Dict]:
        j, r1, r2 = point['j'], point['r1'], point['r2']
        problem = multiplier_problem(j, r1, r2, 0.0)
        try:
            value, _ = integrate(problem, tol=self.tol, rtol=QUADRATURE_RTOL)
            bound = van_der_corput_bound(problem, 2, problem.frequency)
        except (QuadratureError, ValueError):
            return None
        if bound == 0:
            return None
        return {"sample": point['sample'], "j": j, "r1": r1, "r2": r2, "ratio": abs(value) / bound}
    # ------------------------------------------------------------------------------------------------------------------

    def run(self,
            samples: int,
            seed: int) -> List[BoundCheckReport]:
        draws = self.draw(samples, seed)
        table, skipped = self.sweep(draws, self.evaluate, desc='Multiplier')
        stationary = [point for point in draws if point['sample'] % 8 == 0]
        consistency, lost = self.sweep(stationary, self.evaluate_stationary, desc='Multiplier at zeta = 0')
        return [self.report('multiplier', table, skipped),
                BoundCheckReport.from_tolerance('multiplier_van_der_corput', consistency, VDC_CONSTANT_2,
                                                skipped=lost)]
# ----------------------------------------------------------------------------------------------------------------------


class DiffractiveSuite(DyadicSuite):
    """
    DiffractiveSuite(j_range, tol, verbose, threads)

        The diffractive dyadic pieces K̃ℓ = 2^{−j/2}β(r1 + r2)∫₀^∞ e^{i2^j|n|}ψℓ ds against
        2^{−j/2}(1 + 2^jr1r2)^{−1/2}: ℓ = 1, 2 directly, ℓ = 3 through its three parts, the remainder
        ψ3 − ψ3m, the difference |e^{−i2^jS}K̃3m − H| between the model part and its quadratic phase
        version H, and H itself. Side checks: H against its numerical quadrature, and the diffractive
        term d1 of the kernel module against −(1/4π³)[sin(|α|π)K1 + sin(απ)(K2 − iK3)] without β.

        Samples: S ∈ [0.9, 2.4], t log-uniform in [1e-4, 1/2], r1 = St, r2 = S(1 − t), α uniform in
        (−1, 1) with |α| ≥ 0.05, φ uniform in (−π, π) for even samples and ±10^{U(−6, −1)} for odd ones

    """
    name = 'diffractive'

    def __init__(self,
                 j_range: Sequence[int] = DEFAULT_J_RANGE,
                 tol: float = QUADRATURE_TOL,
                 parts: Sequence[str] = DIFFRACTIVE_PARTS,
                 consistency: bool = True,
                 verbose: bool = True,
                 threads: int = 1):
        super().__init__(j_range=j_range, tol=tol, verbose=verbose, threads=threads)
        unknown = set(parts) - set(DIFFRACTIVE_PARTS)
        if unknown:
            raise ValueError(f"unknown diffractive parts {sorted(unknown)}")
        self.parts = tuple(parts)
        self.consistency = consistency
    # ------------------------------------------------------------------------------------------------------------------

    def draw(self,
             samples: int,
             seed: int) -> List[Dict]:
        rng = np.random.default_rng(seed)
        draws = []
        for index, j in enumerate(dyadic_levels(samples, self.j_range)):
            total = rng.uniform(0.9, 2.4)
            t = 10.0 ** rng.uniform(-4.0, math.log10(0.5))
            alpha = rng.uniform(-1.0, 1.0)
            while abs(alpha) < 0.05:
                alpha = rng.uniform(-1.0, 1.0)
            if index % 2 == 0:
                angle = rng.uniform(-math.pi, math.pi)
            else:
                angle = rng.choice([-1.0, 1.0]) * 10.0 ** rng.uniform(-6.0, -1.0)
            draws.append({"sample": index, "j": j, "r1": total * t, "r2": total * (1.0 - t),
                          "alpha": alpha, "angle": angle})
        return draws
    # ------------------------------------------------------------------------------------------------------------------

    def evaluate(self,
                 point: Dict) -> Optional[Dict]:
        j, r1, r2, alpha, angle = point['j'], point['r1'], point['r2'], point['alpha'], point['angle']
        total = r1 + r2
        lam = 2.0 ** j
        try:
            raw = lam ** -0.5 * diffractive_integrals(j, r1, r2, diffractive_amplitudes(j, r1, r2, alpha, angle),
                                                      tol=self.tol)
        except QuadratureError:
            return None
        beta = DyadicCutoff.beta(total)
        k1, k2, k3, k3m, k3e = beta * raw
        h = model_h(j, r1, r2, angle)
        envelope = diffractive_envelope(j, r1, r2)
        values = {'1': abs(k1), '2': abs(k2), '3e': abs(k3e),
                  '3m': abs(np.exp(-1j * lam * total) * k3m - h), '3H': abs(h)}
        row = {**point, "small_product": lam * r1 * r2 <= 1.0}
        for part in DIFFRACTIVE_PARTS:
            row[f"ratio_{part}"] = values[part] / envelope
        row['ratio'] = max(row[f"ratio_{part}"] for part in self.parts)
        row['closed_form_error'] = self._closed_form_error(j, r1, r2, angle)
        row['consistency_error'] = np.nan
        if self.consistency and point['sample'] % CONSISTENCY_STRIDE == 0:
            row['consistency_error'] = self._consistency_error(j, r1, r2, alpha, angle, raw)
        return row
    # ------------------------------------------------------------------------------------------------------------------

    def _closed_form_error(self,
                           j: int,
                           r1: float,
                           r2: float,
                           angle: float) -> float:
        b_sq = 2.0 * math.sin(0.5 * angle) ** 2
        if b_sq == 0:
            return np.nan
        kappa = morse_frequency(j, r1, r2)
        exact = quadratic_lorentz_integral(kappa, b_sq)
        problem = OscillatoryProblem(phase=lambda s: np.asarray(s, dtype=float) ** 2,
                                     amplitude=lambda s: 1.0 / (0.5 * np.asarray(s, dtype=float) ** 2 + b_sq),
                                     frequency=kappa,
                                     interval=(0.0, np.inf),
                                     phase_derivative=lambda s: 2.0 * np.asarray(s, dtype=float),
                                     phase_second_derivative=lambda s: np.full(np.shape(s), 2.0),
                                     breakpoints=geometric_breakpoints(0.0, 1.0, first=0.01 * math.sqrt(b_sq)),
                                     name='quadratic Lorentz')
        try:
            value, _ = integrate(problem, tol=1e-12 * abs(exact), rtol=1e-10)
        except QuadratureError:
            return np.nan
        return abs(value - exact) / abs(exact)
    # ------------------------------------------------------------------------------------------------------------------

    def _consistency_error(self,
                           j: int,
                           r1: float,
                           r2: float,
                           alpha: float,
                           angle: float,
                           raw: np.ndarray) -> float:
        lam = 2.0 ** j
        try:
            d1, _, _ = diffractive_row(alpha, lam * r1, lam * r2, np.array([angle - math.pi]),
                                       BoundaryRadial(Branch.PLUS), tol=self.tol)
        except QuadratureError:
            return np.nan
        expected = -DIFFRACTIVE_WEIGHT / (4.0 * math.pi ** 2) * \
            (math.sin(abs(alpha) * math.pi) * raw[0] + math.sin(alpha * math.pi) * (raw[1] - 1j * raw[2]))
        return abs(d1[0] - expected) / max(abs(expected), 1e-12)
    # ------------------------------------------------------------------------------------------------------------------

    def run(self,
            samples: int,
            seed: int) -> List[BoundCheckReport]:
        table, skipped = self.sweep(self.draw(samples, seed), self.evaluate, desc='Diffractive dyadic kernels')
        ratio_columns = [f"ratio_{part}" for part in DIFFRACTIVE_PARTS]
        side = ['ratio', 'closed_form_error', 'consistency_error']
        reports = []
        for part in self.parts:
            if table.empty:
                claim = table
            else:
                claim = table.drop(columns=[c for c in ratio_columns + side if c != f"ratio_{part}"])
                claim = claim.rename(columns={f"ratio_{part}": 'ratio'})
            reports.append(self.report(f"diffractive_dyadic_{part}", claim, skipped))
        if '3H' in self.parts or '3m' in self.parts:
            reports.append(self._side_report('diffractive_h_closed_form', table, 'closed_form_error',
                                             CLOSED_FORM_LIMIT))
        if self.consistency:
            reports.append(self._side_report('diffractive_kernel_consistency', table, 'consistency_error',
                                             CONSISTENCY_LIMIT))
        return reports
    # ------------------------------------------------------------------------------------------------------------------

    @staticmethod
    def _side_report(claim_id: str,
                     table: pd.DataFrame,
                     column: str,
                     limit: float) -> BoundCheckReport:
        if table.empty:
            return BoundCheckReport.from_tolerance(claim_id, table, limit)
        keep = ['sample', 'j', 'r1', 'r2', 'alpha', 'angle', column]
        side = table.loc[table[column].notna(), keep].rename(columns={column: 'ratio'})
        return BoundCheckReport.from_tolerance(claim_id, side.reset_index(drop=True), limit)
# ----------------------------------------------------------------------------------------------------------------------


def check_direct_dyadic(j_range: Sequence[int] = DEFAULT_J_RANGE,
                        samples: int = 10000,
                        seed: int = 0,
                        tol: float = QUADRATURE_TOL,
                        verbose: bool = True,
                        threads: int = 1) -> BoundCheckReport:
    """
    check_direct_dyadic(j_range, samples, seed, tol, verbose, threads)

        Sampled ratios of the composed direct dyadic kernel to 2^{−j}(2^j|r2 − r2′|)^{−1/2}r1^{−1};
        passes when finite and not growing in j

        Returns
        -------
        BoundCheckReport
            claim 'direct_dyadic'

        Examples
        --------
            report = check_direct_dyadic(j_range=(2, 4, 6), samples=60, seed=1, verbose=False)
    """
    return DirectDyadicSuite(j_range, tol, verbose, threads).run(samples, seed)[0]
# ----------------------------------------------------------------------------------------------------------------------


def check_multiplier_bound(j_range: Sequence[int] = DEFAULT_J_RANGE,
                           samples: int = 10000,
                           seed: int = 0,
                           tol: float = QUADRATURE_TOL,
                           verbose: bool = True,
                           threads: int = 1) -> BoundCheckReport:
    """
    check_multiplier_bound(j_range, samples, seed, tol, verbose, threads)

        Sampled ratios of the angular Fourier multiplier integral to 2^{−j/2}(2^jr1r2)^{−1/2}.
        The ζ = 0 van der Corput comparison is part of MultiplierSuite.run
    """
    return MultiplierSuite(j_range, tol, verbose, threads).run(samples, seed)[0]
# ----------------------------------------------------------------------------------------------------------------------


def check_diffractive_dyadic(ell: int,
                             j_range: Sequence[int] = DEFAULT_J_RANGE,
                             samples: int = 10000,
                             seed: int = 0,
                             tol: float = QUADRATURE_TOL,
                             verbose: bool = True,
                             threads: int = 1) -> List[BoundCheckReport]:
    """
    check_diffractive_dyadic(ell, j_range, samples, seed, tol, verbose, threads)

        Sampled ratios of the diffractive dyadic kernel pieces to 2^{−j/2}(1 + 2^jr1r2)^{−1/2}

        Parameters
        ----------
        ell: int
            1 or 2 give one report; 3 gives the reports of the remainder ('3e'), the model comparison
            ('3m'), H ('3H') and the closed form check of H
        j_range: Sequence[int]
        samples: int
        seed: int
        tol: float
        verbose: bool
        threads: int

        Returns
        -------
        List[BoundCheckReport]
    """
    parts = {1: ('1',), 2: ('2',), 3: ('3e', '3m', '3H')}
    if ell not in parts:
        raise ValueError("ell must be 1, 2 or 3")
    suite = DiffractiveSuite(j_range, tol, parts=parts[ell], consistency=False, verbose=verbose, threads=threads)
    return suite.run(samples, seed)
# ----------------------------------------------------------------------------------------------------------------------
