import math
import threading
import numpy as np
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from scipy.interpolate import CubicSpline
from scipy.special import hankel1, hankel1e
from typing import Dict, List, Optional, Tuple, Union

from abresolvent.geometry import CirculationProfile, PolarPoint, TWO_PI, diffractive_angle, \
    diffractive_distance, diffractive_phase_derivatives, distance, polar_distance
from abresolvent.oscillatory import OscillatoryProblem, QuadratureError, integrate
from abresolvent.regimes import Branch, Regime, SpectralParameter
from abresolvent.specfun import SmoothCutoff, hankel0_plus, hankel_amplitude_asymptotic
from abresolvent.utils import complex_to_dict, parallel_map


# N with (i/4π)·N/(4π²) = i/4, the free Green's function normalization
EXPECTED_NORMALIZATION = 4.0 * math.pi ** 3
# weight of the s-integral of the diffractive amplitude
DIFFRACTIVE_WEIGHT = 1.0 / math.pi
ANGLE_TOL = 1e-12
# λ-integral tables: points per decade and range in log r
TABLE_POINTS_PER_DECADE = 64
# below TABLE_R_COARSE, where h(r) = c1·ln r + c0 + O(r² ln r), the table uses a quarter of the density
TABLE_R_COARSE = 1e-2
TABLE_R_MIN = 1e-8
TABLE_R_MAX = 1e4
# the λ-integral is tabulated while e^{−Im k·r} stays above e^{−TABLE_DECAY}
TABLE_DECAY = 15.0
LOG_PROBE = 1e-6


def _angle_check(delta: np.ndarray):
    if np.any(np.abs(delta) > TWO_PI + ANGLE_TOL):
        raise ValueError("|theta1 - theta2| must not exceed 2*pi")
# ----------------------------------------------------------------------------------------------------------------------


def direct_angular_factor(alpha: float,
                          delta: Union[float, np.ndarray]) -> Union[complex, np.ndarray]:
    """
    direct_angular_factor(alpha, delta)

        A_α for constant α as a function of Δ = θ2 − θ1 ∈ [−2π, 2π]:
        e^{iαΔ}/(4π²) for |Δ| < π, e^{iαΔ}e^{−i2πα·sgn Δ}/(4π²) for |Δ| > π, the mean of both at |Δ| = π
    """
    delta = np.asarray(delta, dtype=float)
    _angle_check(delta)
    wrap = np.exp(-2j * math.pi * alpha * np.sign(delta))
    size = np.abs(delta)
    branch = np.where(size < math.pi - ANGLE_TOL, 1.0 + 0j,
                      np.where(size > math.pi + ANGLE_TOL, wrap, 0.5 * (1.0 + wrap)))
    value = np.exp(1j * alpha * delta) * branch / (4.0 * math.pi ** 2)
    return value if value.ndim else complex(value)
# ----------------------------------------------------------------------------------------------------------------------


def angular_A(profile: CirculationProfile,
              theta1: Union[float, np.ndarray],
              theta2: Union[float, np.ndarray]) -> Union[complex, np.ndarray]:
    """
    angular_A(profile, theta1, theta2)

        Angular factor of the direct term
        e^{i∫_{θ1}^{θ2}α}/(4π²)·(𝟙_{[0,π]}(|θ1 − θ2|) + e^{−i2πα·sgn(θ2−θ1)}𝟙_{[π,2π]}(|θ1 − θ2|)),
        with half weight on each branch at |θ1 − θ2| = π

        Parameters
        ----------
        profile: CirculationProfile
        theta1: float or np.ndarray
        theta2: float or np.ndarray

        Returns
        -------
        complex or np.ndarray
    """
    if not isinstance(profile, CirculationProfile):
        raise TypeError(f"profile must be CirculationProfile, not {type(profile)}")
    delta = np.asarray(theta2, dtype=float) - np.asarray(theta1, dtype=float)
    _angle_check(delta)
    gauge = np.exp(1j * (profile.gauge_phase(theta2) - profile.gauge_phase(theta1)))
    value = gauge * direct_angular_factor(profile.mean_flux, delta)
    return value if np.ndim(value) else complex(value)
# ----------------------------------------------------------------------------------------------------------------------


def bracket_parts(alpha: float,
                  s: Union[float, np.ndarray],
                  phi: Union[float, np.ndarray]) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    bracket_parts(alpha, s, phi)

        The three s-profiles of the diffractive amplitude:
        e^{−|α|s}, (e^{−s} − cos φ)sinh(αs)/(cosh s − cos φ) and sin φ·cosh(αs)/(cosh s − cos φ).
        Numerator and denominator are multiplied by 2e^{−s} so that large s does not overflow, and
        expm1 keeps cosh s − cos φ accurate near s = 0. At s = 0, φ ≡ 0 (mod 2π) the limits along
        φ = 0, namely −2α and 0, are returned
    """
    s = np.asarray(s, dtype=float)
    phi = np.asarray(phi, dtype=float)
    decay = np.exp(-s)
    em1 = np.expm1(-s)
    half_sq = np.sin(0.5 * phi) ** 2
    denominator = em1 ** 2 + 4.0 * decay * half_sq
    plus = np.exp((alpha - 1.0) * s)
    minus = np.exp(-(alpha + 1.0) * s)
    with np.errstate(divide='ignore', invalid='ignore'):
        sinh_term = (em1 + 2.0 * half_sq) * (plus - minus) / denominator
        cosh_term = np.sin(phi) * (plus + minus) / denominator
    singular = denominator == 0.0
    if np.any(singular):
        sinh_term = np.where(singular, -2.0 * alpha, sinh_term)
        cosh_term = np.where(singular, 0.0, cosh_term)
    return np.exp(-abs(alpha) * s) * np.ones_like(sinh_term), sinh_term, cosh_term
# ----------------------------------------------------------------------------------------------------------------------


def diffraction_bracket(alpha: float,
                        s: Union[float, np.ndarray],
                        phi: Union[float, np.ndarray]) -> Union[complex, np.ndarray]:
    """
    diffraction_bracket(alpha, s, phi)

        sin(|α|π)e^{−|α|s} + sin(απ)·((e^{−s} − cos φ)sinh(αs) − i·sin φ·cosh(αs))/(cosh s − cos φ),
        assembled from bracket_parts

        Parameters
        ----------
        alpha: float
        s: float or np.ndarray
        phi: float or np.ndarray
            broadcast against s

        Returns
        -------
        complex or np.ndarray
    """
    exp_term, sinh_term, cosh_term = bracket_parts(alpha, s, phi)
    value = math.sin(abs(alpha) * math.pi) * exp_term + math.sin(alpha * math.pi) * (sinh_term - 1j * cosh_term)
    return value if np.ndim(value) else complex(value)
# ----------------------------------------------------------------------------------------------------------------------


def angular_B(profile: CirculationProfile,
              s: Union[float, np.ndarray],
              theta1: float,
              theta2: float) -> Union[complex, np.ndarray]:
    """
    angular_B(profile, s, theta1, theta2)

        Diffractive amplitude
        −(1/4π²)·e^{−iα(θ1−θ2) + i∫_{θ2}^{θ1}α}·[sin(|α|π)e^{−|α|s}
        + sin(απ)((e^{−s} − cos φ)sinh(αs) − i·sin φ·cosh(αs))/(cosh s − cos φ)], φ = θ1 − θ2 + π,
        with α the mean flux

        Parameters
        ----------
        profile: CirculationProfile
        s: float or np.ndarray
            s ≥ 0
        theta1: float
        theta2: float

        Returns
        -------
        complex or np.ndarray
    """
    if not isinstance(profile, CirculationProfile):
        raise TypeError(f"profile must be CirculationProfile, not {type(profile)}")
    if np.any(np.asarray(s) < 0):
        raise ValueError("s must be nonnegative")
    alpha = profile.mean_flux
    if alpha == 0.0:
        return np.zeros(np.shape(s), dtype=complex) if np.ndim(s) else 0j
    gauge = np.exp(-1j * alpha * (theta1 - theta2) +
                   1j * (profile.antiderivative(theta1) - profile.antiderivative(theta2)))
    value = -gauge * diffraction_bracket(alpha, s, theta1 - theta2 + math.pi) / (4.0 * math.pi ** 2)
    return value if np.ndim(value) else complex(value)
# ----------------------------------------------------------------------------------------------------------------------


class RadialFunction(ABC):
    """
    RadialFunction()

        Radial profile h(u) of a kernel piece, split as h(u) = e^{iωu}·far(u) + near(u) with
        near = χh supported in u ≤ 3/4 and far = (1 − χ)h·e^{−iωu} vanishing for u ≤ 1/2.
        Near the origin h(u) = c1·ln u + c0 + o(1)

    """

    def __init__(self,
                 cutoff: Optional[SmoothCutoff] = None):
        self.cutoff = cutoff if cutoff is not None else SmoothCutoff()
        self.frequency = 0.0
        self.log_coefficient = 2j / math.pi
    # ------------------------------------------------------------------------------------------------------------------

    @abstractmethod
    def full(self,
             u: np.ndarray) -> np.ndarray:
        raise NotImplementedError("Method full must be implemented!")
    # ------------------------------------------------------------------------------------------------------------------

    @abstractmethod
    def far(self,
            u: np.ndarray) -> np.ndarray:
        raise NotImplementedError("Method far must be implemented!")
    # ------------------------------------------------------------------------------------------------------------------

    def near(self,
             u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        chi = self.cutoff(u)
        out = np.zeros(u.shape, dtype=complex)
        inside = chi > 0
        if np.any(inside):
            out[inside] = chi[inside] * self.full(u[inside])
        return out
    # ------------------------------------------------------------------------------------------------------------------

    def constant_term(self) -> complex:
        value = complex(np.asarray(self.full(np.array([LOG_PROBE])))[0])
        return value - self.log_coefficient * math.log(LOG_PROBE)
# ----------------------------------------------------------------------------------------------------------------------


class BoundaryRadial(RadialFunction):
    """
    BoundaryRadial(branch, cutoff)

        h = H₀⁺ (branch PLUS) or H₀⁻ (branch MINUS), the limiting absorption profile at λ = 1
    """

    def __init__(self,
                 branch: Branch = Branch.PLUS,
                 cutoff: Optional[SmoothCutoff] = None):
        super().__init__(cutoff)
        self.branch = Branch(branch)
        self.frequency = float(self.branch)
        self.log_coefficient = self.branch * 2j / math.pi
    # ------------------------------------------------------------------------------------------------------------------

    def full(self,
             u: np.ndarray) -> np.ndarray:
        value = hankel0_plus(np.asarray(u, dtype=float))
        return value if self.branch == Branch.PLUS else np.conj(value)
    # ------------------------------------------------------------------------------------------------------------------

    def far(self,
            u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        weight = 1.0 - self.cutoff(u)
        out = np.zeros(u.shape, dtype=complex)
        active = weight > 0
        if np.any(active):
            amplitude = u[active] ** -0.5 * hankel_amplitude_asymptotic(u[active])
            out[active] = weight[active] * (amplitude if self.branch == Branch.PLUS else np.conj(amplitude))
        return out
# ----------------------------------------------------------------------------------------------------------------------


class HankelRadial(RadialFunction):
    """
    HankelRadial(k, cutoff)

        h(u) = H₀^{(1)}(ku), Im k ≥ 0, evaluated with scipy's Hankel functions
    """

    def __init__(self,
                 k: complex,
                 cutoff: Optional[SmoothCutoff] = None):
        super().__init__(cutoff)
        self.k = complex(k)
        if self.k.imag < 0:
            raise ValueError("wavenumber must satisfy Im k >= 0")
        self.frequency = self.k.real
    # ------------------------------------------------------------------------------------------------------------------

    def full(self,
             u: np.ndarray) -> np.ndarray:
        return hankel1(0, self.k * np.asarray(u, dtype=float))
    # ------------------------------------------------------------------------------------------------------------------

    def far(self,
            u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        weight = 1.0 - self.cutoff(u)
        out = np.zeros(u.shape, dtype=complex)
        active = weight > 0
        if np.any(active):
            x = u[active]
            out[active] = weight[active] * hankel1e(0, self.k * x) * np.exp(-self.k.imag * x)
        return out
# ----------------------------------------------------------------------------------------------------------------------


def radial_lambda_integrals(r: float,
                            sigma: Union[SpectralParameter, complex],
                            cutoff: Optional[SmoothCutoff] = None,
                            tol: float = 1e-12) -> Tuple[complex, complex]:
    """
    radial_lambda_integrals(r, sigma, cutoff, tol)

        The two oscillatory pieces of the λ-integral ∫₀^∞ λJ₀(λr)/(λ² − σ)dλ = L₊ + L₋,
        L± = ∫₀^∞ e^{±it}·t·a±(t)/(t² − σr²)dt, where J₀(t) = e^{it}a₊(t) + e^{−it}a₋(t) with
        a₊(t) = ½t^{−1/2}a(t) + ½χ(t)J₀(t)e^{−it} and a₋ = conj(a₊); a is the far field amplitude of H₀⁺

        Parameters
        ----------
        r: float
        sigma: SpectralParameter or complex
        cutoff: SmoothCutoff, optional
        tol: float

        Returns
        -------
        (complex, complex)
    """
    if r <= 0:
        raise ValueError("r must be positive")
    sigma = sigma if isinstance(sigma, SpectralParameter) else SpectralParameter(complex(sigma))
    cutoff = cutoff if cutoff is not None else SmoothCutoff()
    w = sigma.sigma * r ** 2
    root = np.sqrt(w)

    def a_plus(t):
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape, dtype=complex)
        positive = t > 0
        tp = t[positive]
        chi = cutoff(tp)
        h = hankel0_plus(tp)
        out[positive] = 0.5 * (1.0 - chi) * tp ** -0.5 * hankel_amplitude_asymptotic(tp) + \
            0.5 * chi * np.real(h) * np.exp(-1j * tp)
        out[~positive] = 0.5
        return out

    breakpoints = {cutoff.lower, cutoff.upper, 12.0}
    for j in range(-4, 5):
        point = root.real + j * abs(root.imag)
        if point > 0:
            breakpoints.add(point)
    scale = abs(root)
    if scale < 1.0:
        breakpoints.update(scale * 0.25 * 2.0 ** np.arange(0, int(math.log2(4.0 / scale)) + 1))
    breakpoints = sorted(p for p in breakpoints if p > 0)

    values = []
    for sign in (1, -1):
        def amplitude(t, sign=sign):
            t = np.asarray(t, dtype=float)
            a = a_plus(t) if sign > 0 else np.conj(a_plus(t))
            return t * a / (t ** 2 - w)

        problem = OscillatoryProblem(phase=lambda t: np.asarray(t, dtype=float),
                                     amplitude=amplitude,
                                     frequency=float(sign),
                                     interval=(0.0, np.inf),
                                     phase_derivative=lambda t: np.ones_like(np.asarray(t, dtype=float)),
                                     phase_second_derivative=lambda t: np.zeros_like(np.asarray(t, dtype=float)),
                                     breakpoints=breakpoints,
                                     name=f"lambda integral r={r:.3g}")
        value, _ = integrate(problem, tol=tol, max_panels=20000)
        values.append(complex(value))
    return values[0], values[1]
# ----------------------------------------------------------------------------------------------------------------------


def table_nodes(upper: float,
                points_per_decade: int = TABLE_POINTS_PER_DECADE) -> np.ndarray:
    """Log radii x = ln r of a λ-table on [TABLE_R_MIN, upper], a quarter of the density below TABLE_R_COARSE."""
    split = min(TABLE_R_COARSE, upper)
    count = int(math.ceil(math.log10(split / TABLE_R_MIN) * points_per_decade / 4.0)) + 1
    coarse = np.linspace(math.log(TABLE_R_MIN), math.log(split), max(count, 2))
    if upper <= TABLE_R_COARSE:
        return coarse
    count = int(math.ceil(math.log10(upper / TABLE_R_COARSE) * points_per_decade)) + 1
    fine = np.linspace(math.log(TABLE_R_COARSE), math.log(upper), max(count, 2))
    return np.concatenate([coarse, fine[1:]])
# ----------------------------------------------------------------------------------------------------------------------


class RadialTransform(RadialFunction):
    """
    RadialTransform(sigma, cutoff, tol, points_per_decade, threads, verbose)

        h(u) = (2/(iπ))·∫₀^∞ λJ₀(λu)/(λ² − σ)dλ for a normalized σ off [0, ∞), tabulated as
        g(x) = h(e^x)·e^{−ik·e^x} on a log grid and interpolated by cubic splines.
        Below the table h(u) = c1·ln u + c0; beyond the point where e^{−Im k·u} drops under
        e^{−15} the large argument Hankel form is used

        Parameters
        ----------
        sigma: SpectralParameter
        cutoff: SmoothCutoff, optional
        tol: float
            absolute tolerance of each λ-integral
        points_per_decade: int
            table density above TABLE_R_COARSE, a quarter of it below
        threads: int
            worker threads over the table nodes
        verbose: bool

    """

    def __init__(self,
                 sigma: SpectralParameter,
                 cutoff: Optional[SmoothCutoff] = None,
                 tol: float = 1e-12,
                 points_per_decade: int = TABLE_POINTS_PER_DECADE,
                 threads: int = 1,
                 verbose: bool = False):
        super().__init__(cutoff)
        if not isinstance(sigma, SpectralParameter):
            raise TypeError(f"sigma must be SpectralParameter, not {type(sigma)}")
        if points_per_decade < 4:
            raise ValueError("points_per_decade must be at least 4")
        self.sigma = sigma
        self.k = sigma.wavenumber()
        self.frequency = self.k.real
        upper = TABLE_R_MAX if self.k.imag <= 0 else min(TABLE_R_MAX, TABLE_DECAY / self.k.imag)
        self.r_max = upper
        self.x = table_nodes(upper, points_per_decade)
        radii = np.exp(self.x)

        def node(r):
            plus, minus = radial_lambda_integrals(float(r), sigma, self.cutoff, tol)
            return (2.0 / (1j * math.pi)) * (plus + minus)

        values = np.array(parallel_map(node, radii, threads=threads, desc=f"Radial table sigma={sigma.sigma:.4g}",
                                       verbose=verbose), dtype=complex)
        self.table = values
        g = values * np.exp(-1j * self.k * radii)
        self._re = CubicSpline(self.x, g.real)
        self._im = CubicSpline(self.x, g.imag)
        self._c0 = values[0] - self.log_coefficient * math.log(TABLE_R_MIN)
    # ------------------------------------------------------------------------------------------------------------------

    def _scaled(self,
                u: np.ndarray) -> np.ndarray:
        x = np.log(u)
        return self._re(x) + 1j * self._im(x)
    # ------------------------------------------------------------------------------------------------------------------

    def full(self,
             u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        out = np.empty(u.shape, dtype=complex)
        below = u < TABLE_R_MIN
        above = u > self.r_max
        inside = ~below & ~above
        out[below] = self.log_coefficient * np.log(u[below]) + self._c0
        out[inside] = self._scaled(u[inside]) * np.exp(1j * self.k * u[inside])
        out[above] = hankel1(0, self.k * u[above])
        return out
    # ------------------------------------------------------------------------------------------------------------------

    def far(self,
            u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        weight = 1.0 - self.cutoff(u)
        out = np.zeros(u.shape, dtype=complex)
        active = weight > 0
        if np.any(active):
            x = u[active]
            inside = x <= self.r_max
            value = np.empty(x.shape, dtype=complex)
            value[inside] = self._scaled(x[inside]) * np.exp(-self.k.imag * x[inside])
            value[~inside] = hankel1e(0, self.k * x[~inside]) * np.exp(-self.k.imag * x[~inside])
            out[active] = weight[active] * value
        return out
# ----------------------------------------------------------------------------------------------------------------------


@dataclass
class KernelValue:
    """
    KernelValue(g1, g2, d1, d2, total, error, regime, branch)

        Four-part decomposition of the resolvent kernel at a point pair:
        total = N·(±i/4π)·(g1 + g2 + d1 + d2), the sign being the branch in the boundary regime
    """
    g1: complex
    g2: complex
    d1: complex
    d2: complex
    total: complex
    error: float = 0.0
    regime: Optional[Regime] = None
    branch: Optional[Branch] = None

    def parts(self) -> complex:
        return self.g1 + self.g2 + self.d1 + self.d2
    # ------------------------------------------------------------------------------------------------------------------

    def to_dict(self) -> Dict:
        return {"g1": complex_to_dict(self.g1), "g2": complex_to_dict(self.g2), "d1": complex_to_dict(self.d1),
                "d2": complex_to_dict(self.d2), "total": complex_to_dict(self.total), "error": float(self.error),
                "regime": None if self.regime is None else self.regime.label,
                "branch": None if self.branch is None else int(self.branch)}
# ----------------------------------------------------------------------------------------------------------------------


@dataclass
class KernelRow:
    """
    KernelRow(deltas, g1, g2, d1, d2, error)

        Kernel parts of a constant flux profile for fixed radii over angle differences Δ = θ2 − θ1,
        normalization, prefactor and gauge not applied
    """
    deltas: np.ndarray
    g1: np.ndarray
    g2: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    error: float = 0.0

    def parts(self) -> np.ndarray:
        return self.g1 + self.g2 + self.d1 + self.d2
# ----------------------------------------------------------------------------------------------------------------------


def geometric_breakpoints(start: float,
                      stop: float,
                      first: float = 1e-6) -> List[float]:
    points = []
    step = first
    while start + step < stop:
        points.append(start + step)
        step *= 2.0
    return points
# ----------------------------------------------------------------------------------------------------------------------


def diffractive_row(alpha: float,
                    r1: float,
                    r2: float,
                    deltas: np.ndarray,
                    radial: RadialFunction,
                    tol: float = 1e-9) -> Tuple[np.ndarray, np.ndarray, float]:
    """
    diffractive_row(alpha, r1, r2, deltas, radial, tol)

        Diffractive parts (d1, d2) of the kernel for a constant flux α over Δ = θ2 − θ1:
        d = (1/π)∫₀^∞ h(|n(s)|)·B(s) ds with B evaluated at φ = Δ + π, split into the far part
        d1 (profile e^{iω|n|}far(|n|)) and the near part d2 (profile near(|n|), only when r1 + r2 < 3/4).
        For s ≥ 1 the far part is integrated in u = |n| where the phase is linear

        Returns
        -------
        (np.ndarray, np.ndarray, float)
            d1, d2 and the summed error estimate
    """
    deltas = np.atleast_1d(np.asarray(deltas, dtype=float))
    zeros = np.zeros(deltas.shape, dtype=complex)
    if alpha == 0.0:
        return zeros, zeros.copy(), 0.0
    phi = deltas + math.pi
    factor = -DIFFRACTIVE_WEIGHT / (4.0 * math.pi ** 2)
    total = r1 + r2
    prod = r1 * r2
    omega = radial.frequency
    error = 0.0

    def phase(s):
        return diffractive_distance(r1, r2, np.asarray(s, dtype=float))

    def phase_d1(s):
        return diffractive_phase_derivatives(r1, r2, np.asarray(s, dtype=float))[0]

    def phase_d2(s):
        return diffractive_phase_derivatives(r1, r2, np.asarray(s, dtype=float))[1]

    d2 = zeros.copy()
    if total < radial.cutoff.upper:
        s_b = diffractive_angle(r1, r2, radial.cutoff.upper)
        if s_b > 0:
            problem = OscillatoryProblem(phase=phase,
                                         amplitude=lambda s: radial.near(phase(s))[:, None] *
                                         diffraction_bracket(alpha, np.asarray(s)[:, None], phi[None, :]),
                                         frequency=0.0,
                                         interval=(0.0, s_b),
                                         phase_derivative=phase_d1,
                                         phase_second_derivative=phase_d2,
                                         breakpoints=geometric_breakpoints(0.0, s_b),
                                         name='near diffractive')
            value, err = integrate(problem, tol=tol)
            d2 = factor * np.asarray(value)
            error += err

    s_a = diffractive_angle(r1, r2, radial.cutoff.lower) if total < radial.cutoff.lower else 0.0
    s_1 = max(s_a, 1.0)
    value_a = zeros.copy()
    if s_1 > s_a:
        problem = OscillatoryProblem(phase=phase,
                                     amplitude=lambda s: radial.far(phase(s))[:, None] *
                                     diffraction_bracket(alpha, np.asarray(s)[:, None], phi[None, :]),
                                     frequency=omega,
                                     interval=(s_a, s_1),
                                     phase_derivative=phase_d1,
                                     phase_second_derivative=phase_d2,
                                     breakpoints=geometric_breakpoints(s_a, s_1),
                                     name='far diffractive')
        value_a, err = integrate(problem, tol=tol)
        error += err

    u_1 = phase(s_1)

    def far_in_u(u):
        u = np.asarray(u, dtype=float)
        s = diffractive_angle(r1, r2, u)
        jacobian = u / (prod * np.sinh(s))
        return (radial.far(u) * jacobian)[:, None] * diffraction_bracket(alpha, s[:, None], phi[None, :])

    problem = OscillatoryProblem(phase=lambda u: np.asarray(u, dtype=float),
                                 amplitude=far_in_u,
                                 frequency=omega,
                                 interval=(u_1, np.inf),
                                 phase_derivative=lambda u: np.ones_like(np.asarray(u, dtype=float)),
                                 phase_second_derivative=lambda u: np.zeros_like(np.asarray(u, dtype=float)),
                                 name='far diffractive tail')
    value_b, err = integrate(problem, tol=tol)
    error += err
    d1 = factor * (np.asarray(value_a) + np.asarray(value_b))
    return d1, d2, error
# ----------------------------------------------------------------------------------------------------------------------


def kernel_row(alpha: float,
               r1: float,
               r2: float,
               deltas: np.ndarray,
               radial: RadialFunction,
               tol: float = 1e-9) -> KernelRow:
    """
    kernel_row(alpha, r1, r2, deltas, radial, tol)

        All four kernel parts of a constant flux α at radii (r1, r2) over the angle differences
        Δ = θ2 − θ1 ∈ [−2π, 2π]. Coincident points give nan in g2

        Returns
        -------
        KernelRow
    """
    deltas = np.atleast_1d(np.asarray(deltas, dtype=float))
    d = polar_distance(r1, r2, deltas)
    angular = direct_angular_factor(alpha, deltas)
    g1 = np.zeros(deltas.shape, dtype=complex)
    g2 = np.full(deltas.shape, np.nan, dtype=complex)
    positive = d > 0
    if np.any(positive):
        g1[positive] = np.exp(1j * radial.frequency * d[positive]) * radial.far(d[positive]) * angular[positive]
        g2[positive] = radial.near(d[positive]) * angular[positive]
    d1, d2, error = diffractive_row(alpha, r1, r2, deltas, radial, tol)
    return KernelRow(deltas=deltas, g1=g1, g2=g2, d1=d1, d2=d2, error=error)
# ----------------------------------------------------------------------------------------------------------------------


def direct_terms(profile: CirculationProfile,
                 x: PolarPoint,
                 y: PolarPoint,
                 radial: Optional[RadialFunction] = None) -> Tuple[complex, complex]:
    """
    direct_terms(profile, x, y, radial)

        g1 = e^{iωd}·far(d)·A_α(θ1, θ2), g2 = near(d)·A_α(θ1, θ2), d = |x − y|.
        With the default radial profile H₀⁺: g1 = e^{id}d^{−1/2}a(d)A_α, g2 = b(d)A_α

        Returns
        -------
        (complex, complex)
    """
    radial = radial if radial is not None else BoundaryRadial(Branch.PLUS)
    d = distance(x, y)
    if d == 0.0:
        raise ValueError("x and y must not coincide")
    angular = angular_A(profile, x.theta, y.theta)
    g1 = complex(np.exp(1j * radial.frequency * d) * radial.far(np.array([d]))[0]) * angular
    g2 = complex(radial.near(np.array([d]))[0]) * angular
    return g1, g2
# ----------------------------------------------------------------------------------------------------------------------


def diffractive_terms(profile: CirculationProfile,
                      x: PolarPoint,
                      y: PolarPoint,
                      tol: float = 1e-9,
                      radial: Optional[RadialFunction] = None) -> Tuple[complex, complex]:
    """
    diffractive_terms(profile, x, y, tol, radial)

        (d1, d2) = (1/π)∫₀^∞ (far, near parts of h)(|n|)·B_α(s, θ2, θ1) ds, including the gauge
        factor of a non-constant profile. Quadrature failure raises QuadratureError

        Returns
        -------
        (complex, complex)
    """
    d1, d2, _ = _diffractive_parts(profile, x, y, tol, radial)
    return d1, d2
# ----------------------------------------------------------------------------------------------------------------------


def _diffractive_parts(profile: CirculationProfile,
                       x: PolarPoint,
                       y: PolarPoint,
                       tol: float,
                       radial: Optional[RadialFunction]) -> Tuple[complex, complex, float]:
    radial = radial if radial is not None else BoundaryRadial(Branch.PLUS)
    if x == y:
        raise ValueError("x and y must not coincide")
    alpha = profile.mean_flux
    d1, d2, error = diffractive_row(alpha, x.r, y.r, np.array([y.theta - x.theta]), radial, tol)
    gauge = np.exp(1j * (profile.gauge_phase(y.theta) - profile.gauge_phase(x.theta)))
    return complex(gauge * d1[0]), complex(gauge * d2[0]), float(error)
# ----------------------------------------------------------------------------------------------------------------------


def free_oracle(sigma: Union[SpectralParameter, complex],
                x: PolarPoint,
                y: PolarPoint) -> complex:
    """
    free_oracle(sigma, x, y)

        Free Green's function (i/4)H₀^{(1)}(√σ·|x − y|), Im √σ > 0; on (0, ∞) the limit
        (±i/4)H₀^±(√σ·|x − y|) of the chosen branch
    """
    sigma = sigma if isinstance(sigma, SpectralParameter) else SpectralParameter(complex(sigma))
    d = distance(x, y)
    if d == 0.0:
        raise ValueError("x and y must not coincide")
    if sigma.sigma.imag == 0.0 and sigma.sigma.real > 0:
        value = hankel1(0, math.sqrt(sigma.sigma.real) * d)
        if sigma.boundary_branch == Branch.MINUS:
            return complex(-0.25j * np.conj(value))
        return complex(0.25j * value)
    return complex(0.25j * hankel1(0, sigma.wavenumber() * d))
# ----------------------------------------------------------------------------------------------------------------------


class KernelContext:
    """
    KernelContext(tol, cutoff, radial_method, normalization, boundary_approximation, table_density, threads, verbose)

        Shared evaluation settings of the resolvent kernel. Radial tables are built once per
        normalized spectral parameter and cached; the context may be shared by worker threads

        Parameters
        ----------
        tol: float
            absolute tolerance of the s-integrals
        cutoff: SmoothCutoff, optional
        radial_method: str
            'quadrature' evaluates h through the λ-integral, 'hankel' through scipy's Hankel functions
        normalization: float, optional
            global constant N; calibrated against the free Green's function on first use when omitted
        boundary_approximation: bool
            in the boundary regime, replace σ/|σ| by λ_b² ± i0 with λ_b = √(Re σ/|σ|)
        table_density: int
            points per decade of the λ-integral tables
        threads: int
            worker threads building a table
        verbose: bool

        Examples
        --------
            context = KernelContext(radial_method='hankel')
            value = resolvent_kernel(profile, SpectralParameter(-1.0), x, y, context)

    """
    METHODS = ('quadrature', 'hankel')

    def __init__(self,
                 tol: float = 1e-9,
                 cutoff: Optional[SmoothCutoff] = None,
                 radial_method: str = 'quadrature',
                 normalization: Optional[float] = None,
                 boundary_approximation: bool = True,
                 table_density: int = TABLE_POINTS_PER_DECADE,
                 threads: int = 1,
                 verbose: bool = False):
        if radial_method not in self.METHODS:
            raise ValueError(f"radial_method must be one of {self.METHODS}, got '{radial_method}'")
        if tol <= 0:
            raise ValueError("tol must be positive")
        self.tol = tol
        self.cutoff = cutoff if cutoff is not None else SmoothCutoff()
        self.radial_method = radial_method
        self._normalization = normalization
        self.normalization_variance = None
        self.boundary_approximation = boundary_approximation
        self.table_density = table_density
        self.threads = threads
        self.verbose = verbose
        self._tables = {}
        self._lock = threading.Lock()
        # held while calibrating; calibration reaches radial(), which takes _lock
        self._calibration_lock = threading.Lock()
    # ------------------------------------------------------------------------------------------------------------------

    @property
    def normalization(self) -> float:
        if self._normalization is None:
            with self._calibration_lock:
                if self._normalization is None:
                    value, variance = calibrate_normalization(self)
                    self.normalization_variance = variance
                    self._normalization = value
        return self._normalization
    # ------------------------------------------------------------------------------------------------------------------

    def uses_boundary(self,
                      sigma: SpectralParameter) -> bool:
        if sigma.regime != Regime.BOUNDARY:
            return False
        return self.boundary_approximation or sigma.delta == 0.0
    # ------------------------------------------------------------------------------------------------------------------

    def radial(self,
               sigma: SpectralParameter) -> RadialFunction:
        """
        radial(sigma)

            Radial profile for the normalized parameter σ/|σ|
        """
        unit = sigma.normalized()
        if self.uses_boundary(unit):
            return BoundaryRadial(unit.boundary_branch, self.cutoff)
        if self.radial_method == 'hankel':
            return HankelRadial(unit.wavenumber(), self.cutoff)
        key = (round(unit.sigma.real, 14), round(unit.sigma.imag, 14), self.cutoff.kind, self.table_density)
        with self._lock:
            table = self._tables.get(key)
        if table is None:
            table = RadialTransform(unit, self.cutoff, tol=min(1e-12, self.tol), points_per_decade=self.table_density,
                                    threads=self.threads, verbose=self.verbose)
            with self._lock:
                table = self._tables.setdefault(key, table)
        return table
    # ------------------------------------------------------------------------------------------------------------------

    def scale(self,
              sigma: SpectralParameter) -> float:
        """Factor applied to the coordinates: √|σ|, times λ_b in the boundary approximation."""
        factor = math.sqrt(sigma.modulus)
        if self.uses_boundary(sigma.normalized()):
            factor *= max(sigma.boundary_lambda, 1e-300)
        return factor
    # ------------------------------------------------------------------------------------------------------------------

    def prefactor(self,
                  sigma: SpectralParameter,
                  normalization: Optional[float] = None) -> complex:
        n = self.normalization if normalization is None else normalization
        if self.uses_boundary(sigma.normalized()):
            return n * int(sigma.boundary_branch) * 1j / (4.0 * math.pi)
        return n * 1j / (4.0 * math.pi)
# ----------------------------------------------------------------------------------------------------------------------


def _as_sigma(sigma) -> SpectralParameter:
    if isinstance(sigma, SpectralParameter):
        return sigma
    if isinstance(sigma, (int, float, complex, np.number)):
        return SpectralParameter(complex(sigma))
    raise TypeError(f"sigma must be SpectralParameter or complex, not {type(sigma)}")
# ----------------------------------------------------------------------------------------------------------------------


def resolvent_kernel(profile: CirculationProfile,
                     sigma: Union[SpectralParameter, complex],
                     x: PolarPoint,
                     y: PolarPoint,
                     context: Optional[KernelContext] = None,
                     normalization: Optional[float] = None) -> KernelValue:
    """
    resolvent_kernel(profile, sigma, x, y, context, normalization)

        Kernel of (𝓛_A − σ)^{−1} at (x, y). The parameter is reduced to |σ| = 1 by
        R(σ)(x, y) = R(σ/|σ|)(√|σ|x, √|σ|y); in the boundary regime the points are scaled further by
        λ_b and the limiting absorption profile H₀^± of the branch sign(Im σ) is used, otherwise the
        profile of the normalized parameter from the context

        Parameters
        ----------
        profile: CirculationProfile
        sigma: SpectralParameter or complex
        x: PolarPoint
        y: PolarPoint
        context: KernelContext, optional
        normalization: float, optional
            overrides the context constant (used by the calibration itself)

        Returns
        -------
        KernelValue
    """
    if not isinstance(profile, CirculationProfile):
        raise TypeError(f"profile must be CirculationProfile, not {type(profile)}")
    for point, name in ((x, 'x'), (y, 'y')):
        if not isinstance(point, PolarPoint):
            raise TypeError(f"{name} must be PolarPoint, not {type(point)}")
    if x == y:
        raise ValueError("x and y must not coincide")
    sigma = _as_sigma(sigma)
    context = context if context is not None else KernelContext()
    radial = context.radial(sigma)
    factor = context.scale(sigma)
    xs, ys = x.scaled(factor), y.scaled(factor)
    g1, g2 = direct_terms(profile, xs, ys, radial)
    d1, d2, error = _diffractive_parts(profile, xs, ys, context.tol, radial)
    prefactor = context.prefactor(sigma, normalization)
    regime = sigma.regime
    branch = sigma.boundary_branch if context.uses_boundary(sigma.normalized()) else None
    return KernelValue(g1=g1, g2=g2, d1=d1, d2=d2, total=prefactor * (g1 + g2 + d1 + d2),
                       error=abs(prefactor) * error, regime=regime, branch=branch)
# ----------------------------------------------------------------------------------------------------------------------


def calibrate_normalization(context: KernelContext,
                            pairs: int = 100,
                            seed: int = 0) -> Tuple[float, float]:
    """
    calibrate_normalization(context, pairs, seed)

        Least squares fit of the global constant N against the free Green's function at α = 0,
        σ = −1 on random point pairs with radii in (0.2, 3)

        Returns
        -------
        (float, float)
            N and the variance of the pointwise ratios oracle/raw around N
    """
    rng = np.random.default_rng(seed)
    profile = CirculationProfile.constant(0.0)
    sigma = SpectralParameter(-1.0)
    raw = np.empty(pairs, dtype=complex)
    oracle = np.empty(pairs, dtype=complex)
    for i in range(pairs):
        x = PolarPoint(rng.uniform(0.2, 3.0), rng.uniform(0.0, TWO_PI))
        y = PolarPoint(rng.uniform(0.2, 3.0), rng.uniform(0.0, TWO_PI))
        raw[i] = resolvent_kernel(profile, sigma, x, y, context, normalization=1.0).total
        oracle[i] = free_oracle(sigma, x, y)
    value = np.vdot(raw, oracle) / np.vdot(raw, raw)
    ratios = oracle / raw
    variance = float(np.mean(np.abs(ratios - value) ** 2) / abs(value) ** 2)
    print(f"Kernel normalization calibrated: N = {value.real:.12g} (expected {EXPECTED_NORMALIZATION:.12g}), "
          f"relative variance = {variance:.3e}")
    return float(value.real), variance
# ----------------------------------------------------------------------------------------------------------------------


def spectral_measure_kernel(profile: CirculationProfile,
                            lam: float,
                            x: PolarPoint,
                            y: PolarPoint,
                            context: Optional[KernelContext] = None) -> complex:
    """
    spectral_measure_kernel(profile, lam, x, y, context)

        dE(λ)(x, y) = (λ/iπ)·(R(λ² + i0) − R(λ² − i0))(x, y)
    """
    if lam <= 0:
        raise ValueError("lambda must be positive")
    context = context if context is not None else KernelContext()
    plus = resolvent_kernel(profile, SpectralParameter.boundary(lam, Branch.PLUS), x, y, context).total
    minus = resolvent_kernel(profile, SpectralParameter.boundary(lam, Branch.MINUS), x, y, context).total
    return complex(lam / (1j * math.pi) * (plus - minus))
# ----------------------------------------------------------------------------------------------------------------------
