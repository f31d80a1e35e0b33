import math
import numpy as np
from dataclasses import dataclass
from scipy.integrate import quad
from scipy.interpolate import CubicSpline
from typing import Callable, Dict, List, Optional, Tuple, Union


TWO_PI = 2.0 * math.pi
# cells of the cached antiderivative table of a non-constant profile
PROFILE_TABLE_CELLS = 4096
# above this hyperbolic angle cosh(s) is evaluated in factored form
COSH_OVERFLOW_GUARD = 20.0


@dataclass(frozen=True)
class PolarPoint:
    """
    PolarPoint(r, theta)

        Point of the punctured plane in polar coordinates

        Parameters
        ----------
        r: float
            radius, must be positive
        theta: float
            angle, reduced mod 2π at construction

        Attributes
        ----------
        r: float
        theta: float

        Examples
        --------
            x = PolarPoint(1.0, 0.7)
            y = PolarPoint.from_string("2,3.14")

    """
    r: float
    theta: float

    def __post_init__(self):
        if not isinstance(self.r, (int, float, np.integer, np.floating)):
            raise TypeError(f"r must be real number, not {type(self.r)}")
        if not isinstance(self.theta, (int, float, np.integer, np.floating)):
            raise TypeError(f"theta must be real number, not {type(self.theta)}")
        if not np.isfinite(self.r) or self.r <= 0:
            raise ValueError("r must be positive")
        theta = float(np.mod(float(self.theta), TWO_PI))
        # np.mod may round a tiny negative angle up to exactly 2π
        if theta >= TWO_PI:
            theta = 0.0
        object.__setattr__(self, 'r', float(self.r))
        object.__setattr__(self, 'theta', theta)
    # ------------------------------------------------------------------------------------------------------------------

    @classmethod
    def from_string(cls,
                    text: str) -> 'PolarPoint':
        """
        from_string(text)

            Parses point from "r,theta" string

            Parameters
            ----------
            text: str

            Returns
            -------
            PolarPoint
        """
        if not isinstance(text, str):
            raise TypeError(f"text must be str, not {type(text)}")
        parts = [p.strip() for p in text.split(',')]
        if len(parts) != 2:
            raise ValueError(f"point must be given as 'r,theta', got '{text}'")
        return cls(float(parts[0]), float(parts[1]))
    # ------------------------------------------------------------------------------------------------------------------

    def to_cartesian(self) -> np.ndarray:
        return np.array([self.r * math.cos(self.theta), self.r * math.sin(self.theta)])
    # ------------------------------------------------------------------------------------------------------------------

    def scaled(self,
               factor: float) -> 'PolarPoint':
        """
        scaled(factor)

            Returns the point factor·x, factor > 0
        """
        if factor <= 0:
            raise ValueError("scaling factor must be positive")
        return PolarPoint(self.r * factor, self.theta)
# ----------------------------------------------------------------------------------------------------------------------


def _check_point(point, name: str):
    if not isinstance(point, PolarPoint):
        raise TypeError(f"{name} must be PolarPoint, not {type(point)}")
# ----------------------------------------------------------------------------------------------------------------------


def polar_distance(r1: Union[float, np.ndarray],
                   r2: Union[float, np.ndarray],
                   delta: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """
    polar_distance(r1, r2, delta)

        Euclidean distance of two points given by radii and angle difference,
        evaluated as √((r1 − r2)² + 4r1r2·sin²(delta/2)) which keeps full relative
        precision for nearby points

        Parameters
        ----------
        r1: float or np.ndarray
        r2: float or np.ndarray
        delta: float or np.ndarray
            θ2 − θ1

        Returns
        -------
        float or np.ndarray
    """
    half = np.sin(0.5 * np.asarray(delta, dtype=float))
    return np.sqrt((np.asarray(r1) - np.asarray(r2)) ** 2 + 4.0 * np.asarray(r1) * np.asarray(r2) * half ** 2)
# ----------------------------------------------------------------------------------------------------------------------


def distance(x: PolarPoint,
             y: PolarPoint) -> float:
    """
    distance(x, y)

        |x − y| = √(r1² + r2² − 2r1r2·cos(θ1 − θ2))

        Parameters
        ----------
        x: PolarPoint
        y: PolarPoint

        Returns
        -------
        float
    """
    _check_point(x, 'x')
    _check_point(y, 'y')
    return float(polar_distance(x.r, y.r, y.theta - x.theta))
# ----------------------------------------------------------------------------------------------------------------------


def diffractive_distance(r1: float,
                         r2: float,
                         s: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """
    diffractive_distance(r1, r2, s)

        Length of the diffracted path |n| = √(r1² + r2² + 2r1r2·cosh s), s ≥ 0.
        For large s the factored form √(r1r2)·e^{s/2}·√(1 + e^{−2s} + (r1² + r2²)e^{−s}/(r1r2))
        is used instead of cosh s

        Parameters
        ----------
        r1: float
        r2: float
        s: float or np.ndarray

        Returns
        -------
        float or np.ndarray
    """
    if r1 <= 0 or r2 <= 0:
        raise ValueError("radii must be positive")
    s_arr = np.asarray(s, dtype=float)
    if np.any(s_arr < 0):
        raise ValueError("s must be nonnegative")
    prod = r1 * r2
    small = np.minimum(s_arr, COSH_OVERFLOW_GUARD)
    direct = np.sqrt(r1 ** 2 + r2 ** 2 + 2.0 * prod * np.cosh(small))
    large = np.maximum(s_arr, COSH_OVERFLOW_GUARD)
    with np.errstate(over='ignore'):
        factored = np.sqrt(prod) * np.exp(0.5 * large) * \
            np.sqrt(1.0 + np.exp(-2.0 * large) + (r1 ** 2 + r2 ** 2) * np.exp(-large) / prod)
    result = np.where(s_arr > COSH_OVERFLOW_GUARD, factored, direct)
    if np.ndim(s) == 0:
        return float(result)
    return result
# ----------------------------------------------------------------------------------------------------------------------


def diffractive_phase_derivatives(r1: float,
                                  r2: float,
                                  s: Union[float, np.ndarray]) -> Tuple[np.ndarray, np.ndarray]:
    """
    diffractive_phase_derivatives(r1, r2, s)

        First and second s-derivatives of φ(s) = |n(s)|:
        φ′ = r1r2·sinh s/|n|, φ″ = r1r2·cosh s/|n| − φ′²/|n|

        Returns
        -------
        (np.ndarray, np.ndarray)
    """
    s_arr = np.asarray(s, dtype=float)
    n = diffractive_distance(r1, r2, s_arr)
    prod = r1 * r2
    small = np.minimum(s_arr, COSH_OVERFLOW_GUARD)
    large = np.maximum(s_arr, COSH_OVERFLOW_GUARD)
    with np.errstate(over='ignore', invalid='ignore'):
        ratio_sinh = np.where(s_arr > COSH_OVERFLOW_GUARD,
                              0.5 * prod * np.exp(0.5 * large) * (1.0 - np.exp(-2.0 * large)) /
                              (np.sqrt(prod) * np.sqrt(1.0 + np.exp(-2.0 * large) +
                                                       (r1 ** 2 + r2 ** 2) * np.exp(-large) / prod)),
                              prod * np.sinh(small) / n)
        ratio_cosh = np.where(s_arr > COSH_OVERFLOW_GUARD,
                              0.5 * prod * np.exp(0.5 * large) * (1.0 + np.exp(-2.0 * large)) /
                              (np.sqrt(prod) * np.sqrt(1.0 + np.exp(-2.0 * large) +
                                                       (r1 ** 2 + r2 ** 2) * np.exp(-large) / prod)),
                              prod * np.cosh(small) / n)
    first = ratio_sinh
    second = ratio_cosh - first ** 2 / n
    return first, second
# ----------------------------------------------------------------------------------------------------------------------


def diffractive_angle(r1: float,
                      r2: float,
                      u: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """
    diffractive_angle(r1, r2, u)

        Inverse of diffractive_distance: the s ≥ 0 with |n(s)| = u, for u ≥ r1 + r2
    """
    u_arr = np.asarray(u, dtype=float)
    if np.any(u_arr < (r1 + r2) * (1.0 - 1e-14)):
        raise ValueError("u must not be smaller than r1 + r2")
    # cosh s − 1 = (u² − (r1 + r2)²)/(2r1r2) keeps precision near s = 0
    excess = np.maximum((u_arr - r1 - r2) * (u_arr + r1 + r2), 0.0) / (2.0 * r1 * r2)
    result = 2.0 * np.arcsinh(np.sqrt(0.5 * excess))
    if np.ndim(u) == 0:
        return float(result)
    return result
# ----------------------------------------------------------------------------------------------------------------------


class CirculationProfile:
    """
    CirculationProfile(alpha_of_theta, antiderivative, constant_value, spec)

        Angular profile α(θ) of a transversal magnetic potential A = α(θ)/r·(−sin θ, cos θ),
        its antiderivative ∫₀^θ α and the mean flux ᾱ = (1/2π)∫₀^{2π} α

        Parameters
        ----------
        alpha_of_theta: Callable
            2π-periodic Lipschitz function, vectorized over numpy arrays
        antiderivative: Callable, optional
            exact ∫₀^θ α on [0, 2π]; when omitted a quadrature table on a uniform grid with
            a periodic cubic interpolant of the gauge part is built
        constant_value: float, optional
            marks the Aharonov-Bohm case α(θ) ≡ constant_value
        spec: dict, optional
            serializable description used by configuration files

        Attributes
        ----------
        mean_flux: float
        is_constant: bool

        Examples
        --------
            profile = CirculationProfile.constant(0.5)
            profile = CirculationProfile.fourier({"cos": [0.5], "sin": [0.1]})

    """

    def __init__(self,
                 alpha_of_theta: Callable,
                 antiderivative: Optional[Callable] = None,
                 constant_value: Optional[float] = None,
                 spec: Optional[Dict] = None):
        if not callable(alpha_of_theta):
            raise TypeError(f"alpha_of_theta must be callable, not {type(alpha_of_theta)}")
        self.alpha_of_theta = alpha_of_theta
        self.is_constant = constant_value is not None
        self.spec = spec if spec is not None else {"type": "callable"}
        self._constant = None if constant_value is None else float(constant_value)

        if self.is_constant:
            self.mean_flux = self._constant
            self._gauge = None
            return

        if antiderivative is None:
            grid, values = self._quadrature_table()
        else:
            grid = np.linspace(0.0, TWO_PI, PROFILE_TABLE_CELLS + 1)
            values = np.asarray(antiderivative(grid), dtype=float) - float(antiderivative(0.0))

        self.mean_flux = float(values[-1] / TWO_PI)
        gauge = values - self.mean_flux * grid
        gauge[-1] = gauge[0]
        self._gauge = CubicSpline(grid, gauge, bc_type='periodic')
        self._exact = antiderivative
    # ------------------------------------------------------------------------------------------------------------------

    def _quadrature_table(self) -> Tuple[np.ndarray, np.ndarray]:
        grid = np.linspace(0.0, TWO_PI, PROFILE_TABLE_CELLS + 1)
        increments = np.empty(PROFILE_TABLE_CELLS)
        for i in range(PROFILE_TABLE_CELLS):
            increments[i] = quad(lambda t: float(self.alpha_of_theta(t)), grid[i], grid[i + 1],
                                 epsabs=1e-14, epsrel=1e-12)[0]
        return grid, np.concatenate([[0.0], np.cumsum(increments)])
    # ------------------------------------------------------------------------------------------------------------------

    @classmethod
    def constant(cls,
                 alpha: float) -> 'CirculationProfile':
        if not isinstance(alpha, (int, float, np.integer, np.floating)):
            raise TypeError(f"alpha must be real number, not {type(alpha)}")
        value = float(alpha)
        return cls(lambda theta: np.full(np.shape(theta), value) if np.ndim(theta) else value,
                   constant_value=value,
                   spec={"type": "constant", "alpha": value})
    # ------------------------------------------------------------------------------------------------------------------

    @classmethod
    def fourier(cls,
                coeffs: Union[Dict, List]) -> 'CirculationProfile':
        """
        fourier(coeffs)

            α(θ) = c0 + Σ_k a_k·cos(kθ) + b_k·sin(kθ)

            Parameters
            ----------
            coeffs: dict or list
                {"cos": [c0, a1, a2, ...], "sin": [b1, b2, ...]} or the pair [cos, sin]

            Returns
            -------
            CirculationProfile
        """
        if isinstance(coeffs, dict):
            cos_c = [float(c) for c in coeffs.get('cos', [0.0])]
            sin_c = [float(c) for c in coeffs.get('sin', [])]
        elif isinstance(coeffs, (list, tuple)) and len(coeffs) == 2:
            cos_c = [float(c) for c in coeffs[0]]
            sin_c = [float(c) for c in coeffs[1]]
        else:
            raise TypeError(f"coeffs must be dict or [cos, sin] pair, not {type(coeffs)}")
        if not cos_c:
            cos_c = [0.0]

        def alpha(theta):
            theta = np.asarray(theta, dtype=float)
            value = np.full(theta.shape, cos_c[0])
            for k, a_k in enumerate(cos_c[1:], start=1):
                value = value + a_k * np.cos(k * theta)
            for k, b_k in enumerate(sin_c, start=1):
                value = value + b_k * np.sin(k * theta)
            return value if value.ndim else float(value)

        def antiderivative(theta):
            theta = np.asarray(theta, dtype=float)
            value = cos_c[0] * theta
            for k, a_k in enumerate(cos_c[1:], start=1):
                value = value + a_k * np.sin(k * theta) / k
            for k, b_k in enumerate(sin_c, start=1):
                value = value + b_k * (1.0 - np.cos(k * theta)) / k
            return value

        if all(c == 0.0 for c in cos_c[1:]) and all(c == 0.0 for c in sin_c):
            return cls.constant(cos_c[0])
        return cls(alpha,
                   antiderivative=antiderivative,
                   spec={"type": "fourier", "coeffs": {"cos": cos_c, "sin": sin_c}})
    # ------------------------------------------------------------------------------------------------------------------

    @classmethod
    def from_callable(cls,
                      alpha_of_theta: Callable,
                      antiderivative: Optional[Callable] = None) -> 'CirculationProfile':
        return cls(alpha_of_theta, antiderivative=antiderivative)
    # ------------------------------------------------------------------------------------------------------------------

    @classmethod
    def from_samples(cls,
                     thetas: np.ndarray,
                     values: np.ndarray) -> 'CirculationProfile':
        """
        from_samples(thetas, values)

            Profile interpolated by a periodic cubic spline through samples on [0, 2π)
        """
        thetas = np.asarray(thetas, dtype=float)
        values = np.asarray(values, dtype=float)
        if thetas.shape != values.shape or thetas.ndim != 1 or thetas.size < 4:
            raise ValueError("thetas and values must be 1D arrays of the same length (at least 4)")
        order = np.argsort(np.mod(thetas, TWO_PI))
        nodes = np.mod(thetas, TWO_PI)[order]
        vals = values[order]
        spline = CubicSpline(np.append(nodes, nodes[0] + TWO_PI), np.append(vals, vals[0]), bc_type='periodic')

        def alpha(theta):
            out = spline(np.mod(theta, TWO_PI) + np.where(np.mod(theta, TWO_PI) < nodes[0], TWO_PI, 0.0))
            return out if np.ndim(out) else float(out)

        return cls(alpha,
                   spec={"type": "samples", "thetas": nodes.tolist(), "values": vals.tolist()})
    # ------------------------------------------------------------------------------------------------------------------

    @classmethod
    def from_config(cls,
                    config: Dict) -> 'CirculationProfile':
        """
        from_config(config)

            Builds profile from {"type": "constant", "alpha": ...}, {"type": "fourier", "coeffs": ...}
            or {"type": "samples", "thetas": [...], "values": [...]}
        """
        if not isinstance(config, dict):
            raise TypeError(f"profile config must be dict, not {type(config)}")
        if 'type' not in config:
            raise ValueError('Missing type in profile configuration')
        kind = config['type']
        if kind == 'constant':
            if 'alpha' not in config:
                raise ValueError('Missing alpha in profile configuration')
            return cls.constant(float(config['alpha']))
        elif kind == 'fourier':
            if 'coeffs' not in config:
                raise ValueError('Missing coeffs in profile configuration')
            return cls.fourier(config['coeffs'])
        elif kind == 'samples':
            return cls.from_samples(np.asarray(config['thetas']), np.asarray(config['values']))
        raise ValueError(f"Unsupported profile type: {kind}")
    # ------------------------------------------------------------------------------------------------------------------

    def to_dict(self) -> Dict:
        return dict(self.spec)
    # ------------------------------------------------------------------------------------------------------------------

    def alpha(self,
              theta: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
        return self.alpha_of_theta(theta)
    # ------------------------------------------------------------------------------------------------------------------

    def gauge_phase(self,
                    theta: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
        """
        gauge_phase(theta)

            Periodic part P(θ) = ∫₀^θ α − ᾱθ of the antiderivative; identically 0 for a constant profile
        """
        if self.is_constant:
            return np.zeros(np.shape(theta)) if np.ndim(theta) else 0.0
        value = self._gauge(np.mod(theta, TWO_PI))
        return value if np.ndim(value) else float(value)
    # ------------------------------------------------------------------------------------------------------------------

    def antiderivative(self,
                       theta: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
        """
        antiderivative(theta)

            ∫₀^θ α(θ′)dθ′ for any real θ, continued by ∫₀^{θ+2π} α = ∫₀^θ α + 2πᾱ
        """
        theta = np.asarray(theta, dtype=float) if np.ndim(theta) else float(theta)
        if self.is_constant:
            return self._constant * theta
        return self.mean_flux * theta + self.gauge_phase(theta)
# ----------------------------------------------------------------------------------------------------------------------


def flux_phase(profile: CirculationProfile,
               theta1: Union[float, np.ndarray],
               theta2: Union[float, np.ndarray]) -> Union[complex, np.ndarray]:
    """
    flux_phase(profile, theta1, theta2)

        exp(i∫_{θ1}^{θ2} α(θ′)dθ′), a unit-modulus complex number

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
    value = np.exp(1j * (profile.antiderivative(theta2) - profile.antiderivative(theta1)))
    return value if np.ndim(value) else complex(value)
# ----------------------------------------------------------------------------------------------------------------------
