import heapq
import math
import numpy as np
import pandas as pd
from dataclasses import dataclass, field
from numpy.polynomial.legendre import leggauss, legvander
from pathlib import Path
from scipy.optimize import brentq
from scipy.special import spherical_jn
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

from abresolvent.geometry import diffractive_distance, diffractive_phase_derivatives
from abresolvent.utils import fit_slope, parallel_map


GAUSS_LOW = 8
GAUSS_HIGH = 16
_RULES = {n: leggauss(n) for n in (GAUSS_LOW, GAUSS_HIGH)}
_VANDER = {n: legvander(_RULES[n][0], n - 1) for n in (GAUSS_LOW, GAUSS_HIGH)}
CORPUS_PATH = Path(__file__).parent / 'data' / 'oscillatory_corpus.csv'


class QuadratureError(RuntimeError):
    """
    QuadratureError(message, value, error)

        Raised when the requested tolerance is not met within the panel budget;
        carries the best value and its error estimate
    """

    def __init__(self,
                 message: str,
                 value: Union[complex, np.ndarray],
                 error: float):
        super().__init__(message)
        self.value = value
        self.error = error
# ----------------------------------------------------------------------------------------------------------------------


@dataclass
class OscillatoryProblem:
    """
    OscillatoryProblem(phase, amplitude, frequency, interval, phase_derivative, phase_second_derivative,
                       breakpoints, name)

        Integral ∫_a^b e^{iλφ(x)}ψ(x)dx with b possibly +inf

        Parameters
        ----------
        phase: Callable
            real φ, vectorized
        amplitude: Callable
            ψ, vectorized; may return shape (n,) or (n, m) for m integrands sharing one phase
        frequency: float
            λ, any real number
        interval: Tuple[float, float]
        phase_derivative: Callable, optional
            φ′; central differences are used when omitted
        phase_second_derivative: Callable, optional
            φ″; central differences of φ′ are used when omitted
        breakpoints: Sequence[float]
            points where ψ or φ is not smooth, or where the integrand changes scale
        name: str

        Examples
        --------
            problem = OscillatoryProblem(phase=lambda x: x ** 2, amplitude=np.ones_like,
                                         frequency=50.0, interval=(0.0, 1.0),
                                         phase_derivative=lambda x: 2 * x)
            value, error = integrate(problem, tol=1e-10)

    """
    phase: Callable
    amplitude: Callable
    frequency: float
    interval: Tuple[float, float]
    phase_derivative: Optional[Callable] = None
    phase_second_derivative: Optional[Callable] = None
    breakpoints: Sequence[float] = ()
    name: str = ''

    def __post_init__(self):
        if not callable(self.phase) or not callable(self.amplitude):
            raise TypeError("phase and amplitude must be callable")
        a, b = self.interval
        if not np.isfinite(a):
            raise ValueError("lower integration limit must be finite")
        if not b > a:
            raise ValueError(f"empty integration interval [{a}, {b}]")
        if not np.isfinite(self.frequency):
            raise ValueError("frequency must be finite")
        self.frequency = float(self.frequency)
    # ------------------------------------------------------------------------------------------------------------------

    @property
    def finite_difference_fallback(self) -> bool:
        return self.phase_derivative is None or self.phase_second_derivative is None
    # ------------------------------------------------------------------------------------------------------------------

    @property
    def is_infinite(self) -> bool:
        return not np.isfinite(self.interval[1])
    # ------------------------------------------------------------------------------------------------------------------

    def derivative(self,
                   x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.phase_derivative is not None:
            return np.asarray(self.phase_derivative(x), dtype=float)
        h = 1e-5 * np.maximum(1.0, np.abs(x))
        return (np.asarray(self.phase(x + h)) - np.asarray(self.phase(x - h))) / (2.0 * h)
    # ------------------------------------------------------------------------------------------------------------------

    def second_derivative(self,
                          x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.phase_second_derivative is not None:
            return np.asarray(self.phase_second_derivative(x), dtype=float)
        h = 1e-4 * np.maximum(1.0, np.abs(x))
        return (self.derivative(x + h) - self.derivative(x - h)) / (2.0 * h)
# ----------------------------------------------------------------------------------------------------------------------


def _moments(kappa: float,
             n: int) -> np.ndarray:
    # ∫_{−1}^{1} e^{iκt}P_j(t)dt = 2·i^j·j_j(κ), with j_j(−κ) = (−1)^j j_j(κ)
    j = np.arange(n)
    sign = np.where(j % 2 == 1, -1.0, 1.0) if kappa < 0 else np.ones(n)
    return (2 * j + 1) * (1j ** j) * spherical_jn(j, abs(kappa)) * sign
# ----------------------------------------------------------------------------------------------------------------------


def _amplitude_values(problem: OscillatoryProblem,
                      x: np.ndarray) -> np.ndarray:
    values = np.asarray(problem.amplitude(x), dtype=complex)
    if values.ndim == 0:
        values = np.full(x.shape, values)
    return values
# ----------------------------------------------------------------------------------------------------------------------


def _panel(problem: OscillatoryProblem,
           a: float,
           b: float,
           stationary: bool) -> Tuple[Union[complex, np.ndarray], float]:
    centre = 0.5 * (a + b)
    half = 0.5 * (b - a)
    lam = problem.frequency
    results = []
    plain = stationary or lam == 0.0
    for n in (GAUSS_LOW, GAUSS_HIGH):
        t, w = _RULES[n]
        x = centre + half * t
        phi = np.asarray(problem.phase(x), dtype=float)
        if n == GAUSS_LOW and not plain:
            # slowly oscillating panels are integrated by the plain rule
            plain = abs(lam) * (np.max(phi) - np.min(phi)) < 2.0 * math.pi
        psi = _amplitude_values(problem, x)
        if plain:
            weights = half * w * np.exp(1j * lam * phi)
        else:
            phi_c = float(problem.phase(np.array([centre]))[0])
            slope = float(problem.derivative(np.array([centre]))[0])
            residual = phi - phi_c - slope * (x - centre)
            kappa = lam * slope * half
            weights = half * np.exp(1j * lam * phi_c) * np.exp(1j * lam * residual) * \
                w * (_VANDER[n] @ _moments(kappa, n))
        results.append(weights @ psi)
    error = float(np.max(np.abs(results[1] - results[0])))
    return results[1], error
# ----------------------------------------------------------------------------------------------------------------------


def _stationary_points(problem: OscillatoryProblem,
                       a: float,
                       b: float) -> List[float]:
    grid = np.linspace(a, b, 257)
    d = problem.derivative(grid)
    points = []
    for i in range(grid.size - 1):
        if d[i] == 0.0:
            points.append(float(grid[i]))
        elif d[i] * d[i + 1] < 0:
            points.append(brentq(lambda x: float(problem.derivative(np.array([x]))[0]), grid[i], grid[i + 1],
                                 xtol=1e-14))
    if d[-1] == 0.0:
        points.append(float(b))
    return points
# ----------------------------------------------------------------------------------------------------------------------


def _initial_panels(problem: OscillatoryProblem,
                    a: float,
                    b: float) -> List[Tuple[float, float, bool]]:
    points = {a, b}
    points.update(float(p) for p in problem.breakpoints if a < p < b)
    if a > 0 and b / a > 1e3:
        points.update(a * 4.0 ** np.arange(1, int(math.log(b / a, 4.0)) + 1))
    windows = []
    if problem.frequency != 0.0:
        for x0 in _stationary_points(problem, a, b):
            curvature = abs(float(problem.second_derivative(np.array([x0]))[0]))
            lam = abs(problem.frequency)
            width = (lam * curvature) ** -0.5 if curvature > 0 else lam ** (-1.0 / 3.0)
            lo, hi = max(a, x0 - width), min(b, x0 + width)
            points.update(p for p in (lo, x0, hi) if a <= p <= b)
            windows.append((lo, hi))
    nodes = sorted(p for p in points if a <= p <= b)
    panels = []
    for left, right in zip(nodes[:-1], nodes[1:]):
        if right - left <= 0:
            continue
        mid = 0.5 * (left + right)
        inside = any(lo <= mid <= hi for lo, hi in windows)
        panels.append((left, right, inside))
    return panels
# ----------------------------------------------------------------------------------------------------------------------


def _adaptive(problem: OscillatoryProblem,
              a: float,
              b: float,
              tol: float,
              rtol: float,
              max_panels: int) -> Tuple[Union[complex, np.ndarray], float]:
    heap = []
    counter = 0
    value = 0.0
    error = 0.0
    for left, right, stationary in _initial_panels(problem, a, b):
        panel_value, panel_error = _panel(problem, left, right, stationary)
        heapq.heappush(heap, (-panel_error, counter, left, right, stationary, panel_value))
        value = value + panel_value
        error += panel_error
        counter += 1

    frozen = []
    while heap and error > max(tol, rtol * float(np.max(np.abs(value)))):
        if counter >= max_panels:
            raise QuadratureError(f"tolerance {tol:.3g} not reached within {max_panels} panels"
                                  f"{' (' + problem.name + ')' if problem.name else ''}", value, error)
        neg_error, _, left, right, stationary, panel_value = heapq.heappop(heap)
        mid = 0.5 * (left + right)
        if right - left <= 1e-13 * max(1.0, abs(mid)):
            frozen.append((-neg_error, panel_value))
            continue
        value = value - panel_value
        error -= -neg_error
        for lo, hi in ((left, mid), (mid, right)):
            child_value, child_error = _panel(problem, lo, hi, stationary)
            heapq.heappush(heap, (-child_error, counter, lo, hi, stationary, child_value))
            value = value + child_value
            error += child_error
            counter += 1
        if not heap:
            break

    # exact resummation removes the drift of the running sums
    entries = [(-entry[0], entry[5]) for entry in heap] + frozen
    value = sum(entry[1] for entry in entries)
    error = float(sum(entry[0] for entry in entries))
    return value, error
# ----------------------------------------------------------------------------------------------------------------------


def _ibp_terms(problem: OscillatoryProblem,
               u: float) -> Tuple[Union[complex, np.ndarray], Union[complex, np.ndarray]]:
    # ∫_u^∞ e^{iλφ}ψ = −e^{iλφ(u)}[g(u) − g′(u)/(iλφ′(u))] + ..., g = ψ/(iλφ′)
    lam = problem.frequency
    h = 1e-4 * max(1.0, u)
    x = np.array([u - h, u, u + h])
    values = _amplitude_values(problem, x)
    denominator = 1j * lam * problem.derivative(x)
    g = values / (denominator if values.ndim == 1 else denominator[:, None])
    g_prime = (g[2] - g[0]) / (2.0 * h)
    slope = float(problem.derivative(np.array([u]))[0])
    oscillation = np.exp(1j * lam * float(problem.phase(np.array([u]))[0]))
    first = -oscillation * g[1]
    second = oscillation * g_prime / (1j * lam * slope)
    return first, second
# ----------------------------------------------------------------------------------------------------------------------


def integrate(problem: OscillatoryProblem,
              tol: float = 1e-10,
              max_panels: int = 4000,
              rtol: float = 0.0) -> Tuple[Union[complex, np.ndarray], float]:
    """
    integrate(problem, tol, max_panels, rtol)

        Adaptive oscillatory quadrature. Panels are integrated by a Filon-type rule: the phase is
        linearized at the panel centre, the remainder of the phase is folded into the amplitude, the
        amplitude is interpolated by Legendre polynomials at Gauss nodes and integrated exactly
        against the linear phase. Panels where λ·(phase variation) < 2π and windows of width
        (λ|φ″|)^{−1/2} around stationary points use the plain Gauss rule. The error estimate of a
        panel is the difference between the 16- and 8-point rules; the worst panel is bisected
        until the summed estimate is below max(tol, rtol·|value|).

        An infinite upper limit is handled by integrating up to U and adding the
        integration-by-parts tail, with U doubled until the second order tail term is below tol/10.
        For λ = 0 the interval is truncated where |ψ(U)|·U < tol/10.

        Parameters
        ----------
        problem: OscillatoryProblem
        tol: float
            absolute tolerance
        max_panels: int
        rtol: float
            relative tolerance

        Returns
        -------
        (value, error)
            value is complex, or an array for vector-valued amplitudes
    """
    if not isinstance(problem, OscillatoryProblem):
        raise TypeError(f"problem must be OscillatoryProblem, not {type(problem)}")
    if tol <= 0:
        raise ValueError("tol must be positive")
    a, b = problem.interval
    if not problem.is_infinite:
        return _adaptive(problem, a, b, tol, rtol, max_panels)

    finite = [float(p) for p in problem.breakpoints if p > a and np.isfinite(p)]
    upper = max([a + 1.0, 2.0 * abs(a)] + finite)
    value, error = _adaptive(problem, a, upper, 0.5 * tol, rtol, max_panels)
    for step in range(64):
        if problem.frequency == 0.0:
            size = float(np.max(np.abs(_amplitude_values(problem, np.array([upper]))))) * upper
            if size < 0.1 * tol:
                return value, error + size
        else:
            first, second = _ibp_terms(problem, upper)
            size = float(np.max(np.abs(second)))
            if size < 0.1 * tol and np.all(np.isfinite(first)):
                return value + first + second, error + size
        piece, piece_error = _adaptive(problem, upper, 2.0 * upper, tol * 2.0 ** -(step + 2), rtol, max_panels)
        value = value + piece
        error += piece_error
        upper *= 2.0
    raise QuadratureError(f"infinite tail did not converge{' (' + problem.name + ')' if problem.name else ''}",
                          value, error)
# ----------------------------------------------------------------------------------------------------------------------


@dataclass
class DecayReport:
    """
    DecayReport(order, slope, passed, lambdas, magnitudes, reason)

        Fitted decay of |I(λ)| for a nonstationary phase
    """
    order: int
    slope: float
    passed: bool
    lambdas: List[float] = field(default_factory=list)
    magnitudes: List[float] = field(default_factory=list)
    reason: str = ''
# ----------------------------------------------------------------------------------------------------------------------


def _with_frequency(problem: OscillatoryProblem,
                    frequency: float) -> OscillatoryProblem:
    return OscillatoryProblem(phase=problem.phase,
                              amplitude=problem.amplitude,
                              frequency=frequency,
                              interval=problem.interval,
                              phase_derivative=problem.phase_derivative,
                              phase_second_derivative=problem.phase_second_derivative,
                              breakpoints=problem.breakpoints,
                              name=problem.name)
# ----------------------------------------------------------------------------------------------------------------------


def nonstationary_decay_check(problem: OscillatoryProblem,
                              K: int,
                              exponents: Sequence[int] = tuple(range(1, 9)),
                              tol: float = 1e-12) -> DecayReport:
    """
    nonstationary_decay_check(problem, K, exponents, tol)

        Measures the decay of |I(λ)| for λ = 2^k and checks that the fitted log-log slope is ≤ −K.
        The envelope at λ is the max of |I| over 8 frequencies in [λ, 2λ); the two smallest λ are
        discarded and values below the noise floor 100·tol are dropped from the fit.
        The hypothesis min|φ′| > 0 is certified on a sample grid first; a vanishing φ′ fails the check.

        Parameters
        ----------
        problem: OscillatoryProblem
            compactly supported smooth amplitude on a finite interval
        K: int
        exponents: Sequence[int]
        tol: float

        Returns
        -------
        DecayReport
    """
    a, b = problem.interval
    if problem.is_infinite:
        raise ValueError("decay check requires a finite interval")
    derivative = problem.derivative(np.linspace(a, b, 2049))
    if np.min(np.abs(derivative)) <= 1e-10 or np.min(derivative) * np.max(derivative) < 0:
        return DecayReport(order=K, slope=float('nan'), passed=False,
                           reason="phase derivative vanishes on the interval: stationary case, "
                                  "use van_der_corput_check")

    lambdas = [2.0 ** k for k in sorted(exponents)]
    envelope = []
    for lam in lambdas:
        values = [abs(np.max(np.abs(integrate(_with_frequency(problem, lam * 2.0 ** (i / 8.0)), tol=tol)[0])))
                  for i in range(8)]
        envelope.append(max(values))
    lambdas, envelope = lambdas[2:], envelope[2:]
    kept = [(lam, e) for lam, e in zip(lambdas, envelope) if e > 100.0 * tol]
    if len(kept) < 2:
        # decays below the noise floor faster than the λ grid resolves
        return DecayReport(order=K, slope=-float('inf'), passed=True, lambdas=lambdas, magnitudes=envelope,
                           reason="magnitudes below noise floor")
    slope, _ = fit_slope(np.log([k[0] for k in kept]), np.log([k[1] for k in kept]))
    return DecayReport(order=K, slope=slope, passed=slope <= -K, lambdas=lambdas, magnitudes=envelope)
# ----------------------------------------------------------------------------------------------------------------------


@dataclass
class VanDerCorputReport:
    """
    VanDerCorputReport(order, max_ratio, ratios, lambdas, trend_slope)

        Ratios |I(λ)|/(λ·m)^{−1/k}(|ψ(b)| + ∫|ψ′|), m = min|φ^{(k)}|
    """
    order: int
    max_ratio: float
    ratios: List[float] = field(default_factory=list)
    lambdas: List[float] = field(default_factory=list)
    trend_slope: float = 0.0
# ----------------------------------------------------------------------------------------------------------------------


def _derivative_of_order(problem: OscillatoryProblem,
                         x: np.ndarray,
                         k: int) -> np.ndarray:
    if k == 1:
        return problem.derivative(x)
    if k == 2:
        return problem.second_derivative(x)
    values = problem.second_derivative(x)
    for _ in range(k - 2):
        values = np.gradient(values, x, edge_order=2)
    return values
# ----------------------------------------------------------------------------------------------------------------------


def van_der_corput_bound(problem: OscillatoryProblem,
                         k: int,
                         frequency: float) -> float:
    a, b = problem.interval
    x = np.linspace(a, b, 4097)
    scale = float(np.min(np.abs(_derivative_of_order(problem, x, k))))
    if scale <= 0:
        raise ValueError(f"phase derivative of order {k} vanishes on the interval")
    psi = _amplitude_values(problem, x)
    if psi.ndim > 1:
        psi = np.max(np.abs(psi), axis=1)
    variation = float(np.trapz(np.abs(np.gradient(psi, x)), x))
    return (abs(frequency) * scale) ** (-1.0 / k) * (abs(psi[-1]) + variation)
# ----------------------------------------------------------------------------------------------------------------------


def van_der_corput_check(problem: OscillatoryProblem,
                         k: int,
                         exponents: Sequence[int] = tuple(range(4, 15)),
                         tol: float = 1e-12) -> VanDerCorputReport:
    """
    van_der_corput_check(problem, k, exponents, tol)

        Verifies |I(λ)| ≤ c_k·λ^{−1/k}(|ψ(b)| + ∫|ψ′|) for λ = 2^4..2^14, after rescaling λ by
        min|φ^{(k)}| on the interval, and reports the observed c_k

        Parameters
        ----------
        problem: OscillatoryProblem
            finite interval; for k = 1, φ′ monotonic
        k: int
        exponents: Sequence[int]
        tol: float

        Returns
        -------
        VanDerCorputReport
    """
    if problem.is_infinite:
        raise ValueError("van der Corput check requires a finite interval")
    if k < 1:
        raise ValueError("derivative order must be at least 1")
    lambdas = [2.0 ** e for e in exponents]
    ratios = []
    for lam in lambdas:
        value, _ = integrate(_with_frequency(problem, lam), tol=tol)
        ratios.append(float(np.max(np.abs(value))) / van_der_corput_bound(problem, k, lam))
    slope = fit_slope(np.log2(lambdas), np.log2(np.maximum(ratios, 1e-300)))[0] if len(lambdas) > 1 else 0.0
    return VanDerCorputReport(order=k, max_ratio=float(max(ratios)), ratios=ratios, lambdas=lambdas,
                              trend_slope=slope)
# ----------------------------------------------------------------------------------------------------------------------


def _bump(a: float,
          b: float) -> Callable:
    def amplitude(x):
        t = (2.0 * np.asarray(x, dtype=float) - (a + b)) / (b - a)
        out = np.zeros_like(t)
        inside = np.abs(t) < 1.0
        out[inside] = np.exp(-1.0 / (1.0 - t[inside] ** 2))
        return out
    return amplitude
# ----------------------------------------------------------------------------------------------------------------------


def _phase_linear(params):
    return (lambda x: np.asarray(x, dtype=float),
            lambda x: np.ones_like(np.asarray(x, dtype=float)),
            lambda x: np.zeros_like(np.asarray(x, dtype=float)))


def _phase_quadratic(params):
    return (lambda x: 0.5 * np.asarray(x, dtype=float) ** 2,
            lambda x: np.asarray(x, dtype=float),
            lambda x: np.ones_like(np.asarray(x, dtype=float)))


def _phase_cubic(params):
    return (lambda x: np.asarray(x, dtype=float) + np.asarray(x, dtype=float) ** 3 / 3.0,
            lambda x: 1.0 + np.asarray(x, dtype=float) ** 2,
            lambda x: 2.0 * np.asarray(x, dtype=float))


def _phase_cosh_distance(params):
    r1, r2 = float(params['r1']), float(params['r2'])
    return (lambda s: diffractive_distance(r1, r2, np.asarray(s, dtype=float)),
            lambda s: diffractive_phase_derivatives(r1, r2, np.asarray(s, dtype=float))[0],
            lambda s: diffractive_phase_derivatives(r1, r2, np.asarray(s, dtype=float))[1])


def _amplitude_one(params, a, b):
    return lambda x: np.ones_like(np.asarray(x, dtype=float))


def _amplitude_bump(params, a, b):
    return _bump(a, b)


def _amplitude_lorentz(params, a, b):
    width = float(params['b'])
    return lambda x: width / (0.5 * np.asarray(x, dtype=float) ** 2 + width ** 2)


PHASES = {'linear': _phase_linear, 'quadratic': _phase_quadratic, 'cubic': _phase_cubic,
          'cosh_distance': _phase_cosh_distance}
AMPLITUDES = {'one': _amplitude_one, 'bump': _amplitude_bump, 'lorentz': _amplitude_lorentz}
# ----------------------------------------------------------------------------------------------------------------------


def _parse_params(text) -> Dict[str, float]:
    if not isinstance(text, str) or not text.strip():
        return {}
    params = {}
    for item in text.split(';'):
        key, value = item.split('=')
        params[key.strip()] = float(value)
    return params
# ----------------------------------------------------------------------------------------------------------------------


def load_corpus(path: Optional[str] = None) -> pd.DataFrame:
    """
    load_corpus(path)

        Reads the fixture corpus: columns fixture, phase, amplitude, a, b, kind, order, params
    """
    corpus = pd.read_csv(path if path is not None else CORPUS_PATH, keep_default_na=False)
    required = ['fixture', 'phase', 'amplitude', 'a', 'b', 'kind', 'order', 'params']
    for column in required:
        if column not in corpus.columns:
            raise ValueError(f'Missing {column} in oscillatory corpus')
    return corpus
# ----------------------------------------------------------------------------------------------------------------------


def build_fixture(row: Union[pd.Series, Dict],
                  frequency: float = 1.0) -> OscillatoryProblem:
    """
    build_fixture(row, frequency)

        Instantiates a corpus row as OscillatoryProblem
    """
    if row['phase'] not in PHASES:
        raise ValueError(f"Unknown phase id: {row['phase']}")
    if row['amplitude'] not in AMPLITUDES:
        raise ValueError(f"Unknown amplitude id: {row['amplitude']}")
    params = _parse_params(row['params'])
    a, b = float(row['a']), float(row['b'])
    phase, d1, d2 = PHASES[row['phase']](params)
    return OscillatoryProblem(phase=phase,
                              amplitude=AMPLITUDES[row['amplitude']](params, a, b),
                              frequency=frequency,
                              interval=(a, b),
                              phase_derivative=d1,
                              phase_second_derivative=d2,
                              name=str(row['fixture']))
# ----------------------------------------------------------------------------------------------------------------------


def run_corpus(corpus: Optional[pd.DataFrame] = None,
               lambdas: Optional[Sequence[float]] = None,
               tol: float = 1e-10,
               threads: int = 1,
               verbose: bool = False) -> pd.DataFrame:
    """
    run_corpus(corpus, lambdas, tol, threads, verbose)

        Evaluates every fixture at every λ. The bound column is the van der Corput bound for
        stationary fixtures and (1 + λ)^{−K} for nonstationary ones

        Returns
        -------
        pd.DataFrame
            columns fixture, lambda, abs_I, bound, ratio
    """
    corpus = corpus if corpus is not None else load_corpus()
    lambdas = list(lambdas) if lambdas is not None else [2.0 ** k for k in range(4, 11)]
    jobs = [(row, lam) for _, row in corpus.iterrows() for lam in lambdas]

    def evaluate(job):
        row, lam = job
        problem = build_fixture(row, lam)
        value, _ = integrate(problem, tol=tol)
        if row['kind'] == 'stationary':
            bound = van_der_corput_bound(problem, int(row['order']), lam)
        else:
            bound = (1.0 + lam) ** -float(row['order'])
        return {"fixture": row['fixture'], "lambda": lam, "abs_I": float(abs(value)),
                "bound": bound, "ratio": float(abs(value)) / bound}

    rows = parallel_map(evaluate, jobs, threads=threads, desc='Oscillatory corpus', verbose=verbose)
    return pd.DataFrame(rows, columns=['fixture', 'lambda', 'abs_I', 'bound', 'ratio'])
# ----------------------------------------------------------------------------------------------------------------------
