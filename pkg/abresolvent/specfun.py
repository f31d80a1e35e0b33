import math
import numpy as np
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

from abresolvent.utils import check_positive


# ascending series is used up to this argument, the Hankel asymptotic expansion above it
CROSSOVER = 12.0
SERIES_TERMS = 60
ASYMPTOTIC_TERMS = 24
# transition interval of the near/far field cutoff χ
CUTOFF_LOWER = 0.5
CUTOFF_UPPER = 0.75
# support of the dyadic bump ψ
DYADIC_SUPPORT = (0.75, 8.0 / 3.0)

_HARMONIC = np.concatenate([[0.0], np.cumsum(1.0 / np.arange(1, SERIES_TERMS + 1))])


def _series_terms(r: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    quarter = 0.25 * r ** 2
    term = np.ones_like(r)
    j0 = np.ones_like(r)
    tail = np.zeros_like(r)
    for k in range(1, SERIES_TERMS + 1):
        term = -term * quarter / (k * k)
        j0 = j0 + term
        # Σ (−1)^{k+1} H_k (r²/4)^k/(k!)²
        tail = tail - _HARMONIC[k] * term
    return j0, tail
# ----------------------------------------------------------------------------------------------------------------------


def _asymptotic_sum(r: np.ndarray) -> np.ndarray:
    """Σ_k i^k a_k(0)/r^k of the Hankel expansion, summed until the terms start to grow."""
    total = np.ones_like(r, dtype=complex)
    term = np.ones_like(r, dtype=complex)
    active = np.ones_like(r, dtype=bool)
    previous = np.abs(term)
    for k in range(1, ASYMPTOTIC_TERMS + 1):
        term = term * 1j * (-(2 * k - 1) ** 2) / (8.0 * k * r)
        size = np.abs(term)
        active &= size < previous
        total = total + np.where(active, term, 0.0)
        previous = size
    return total
# ----------------------------------------------------------------------------------------------------------------------


def bessel_j0_y0(r: Union[float, np.ndarray]) -> Tuple[np.ndarray, np.ndarray]:
    """
    bessel_j0_y0(r)

        Bessel functions J0, Y0 for r > 0: ascending series for r ≤ CROSSOVER,
        Hankel asymptotic expansion above

        Parameters
        ----------
        r: float or np.ndarray

        Returns
        -------
        (np.ndarray, np.ndarray)
    """
    h = hankel0_plus(r)
    return np.real(h), np.imag(h)
# ----------------------------------------------------------------------------------------------------------------------


def hankel_amplitude_asymptotic(r: Union[float, np.ndarray]) -> Union[complex, np.ndarray]:
    """
    hankel_amplitude_asymptotic(r)

        Slowly varying factor m(r) of H₀⁺(r) = e^{ir}·r^{−1/2}·m(r), evaluated without forming
        the oscillating product for r > CROSSOVER
    """
    r_arr = np.atleast_1d(np.asarray(r, dtype=float))
    check_positive(r_arr, 'r')
    out = np.empty(r_arr.shape, dtype=complex)
    far = r_arr > CROSSOVER
    if np.any(far):
        out[far] = math.sqrt(2.0 / math.pi) * np.exp(-0.25j * math.pi) * _asymptotic_sum(r_arr[far])
    if np.any(~far):
        near = r_arr[~far]
        j0, tail = _series_terms(near)
        y0 = (2.0 / math.pi) * ((np.log(0.5 * near) + np.euler_gamma) * j0 + tail)
        out[~far] = (j0 + 1j * y0) * np.exp(-1j * near) * np.sqrt(near)
    if np.ndim(r) == 0:
        return complex(out[0])
    return out.reshape(np.shape(r))
# ----------------------------------------------------------------------------------------------------------------------


def hankel0_plus(r: Union[float, np.ndarray]) -> Union[complex, np.ndarray]:
    """
    hankel0_plus(r)

        Outgoing Hankel function H₀⁺(r) = J₀(r) + iY₀(r), r > 0

        Parameters
        ----------
        r: float or np.ndarray

        Returns
        -------
        complex or np.ndarray
    """
    r_arr = np.atleast_1d(np.asarray(r, dtype=float))
    check_positive(r_arr, 'r')
    out = np.empty(r_arr.shape, dtype=complex)
    far = r_arr > CROSSOVER
    if np.any(far):
        x = r_arr[far]
        out[far] = np.sqrt(2.0 / (math.pi * x)) * np.exp(1j * (x - 0.25 * math.pi)) * _asymptotic_sum(x)
    if np.any(~far):
        x = r_arr[~far]
        j0, tail = _series_terms(x)
        y0 = (2.0 / math.pi) * ((np.log(0.5 * x) + np.euler_gamma) * j0 + tail)
        out[~far] = j0 + 1j * y0
    if np.ndim(r) == 0:
        return complex(out[0])
    return out.reshape(np.shape(r))
# ----------------------------------------------------------------------------------------------------------------------


def hankel0_minus(r: Union[float, np.ndarray]) -> Union[complex, np.ndarray]:
    return np.conj(hankel0_plus(r))
# ----------------------------------------------------------------------------------------------------------------------


class SmoothCutoff:
    """
    SmoothCutoff(kind, lower, upper)

        Smooth transition χ equal to 1 on (0, lower] and 0 on [upper, ∞)

        Parameters
        ----------
        kind: str
            'bump': quotient of e^{−1/t} bumps (C^∞);
            'smoothstep': quintic smoothstep (C²), used as the alternative cutoff
        lower: float
        upper: float

    """
    KINDS = ('bump', 'smoothstep')

    def __init__(self,
                 kind: str = 'bump',
                 lower: float = CUTOFF_LOWER,
                 upper: float = CUTOFF_UPPER):
        if kind not in self.KINDS:
            raise ValueError(f"cutoff kind must be one of {self.KINDS}, got '{kind}'")
        if not 0 < lower < upper:
            raise ValueError("cutoff requires 0 < lower < upper")
        self.kind = kind
        self.lower = lower
        self.upper = upper
    # ------------------------------------------------------------------------------------------------------------------

    @staticmethod
    def _flat(t: np.ndarray) -> np.ndarray:
        out = np.zeros_like(t)
        positive = t > 0
        out[positive] = np.exp(-1.0 / t[positive])
        return out
    # ------------------------------------------------------------------------------------------------------------------

    def __call__(self,
                 r: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
        r_arr = np.atleast_1d(np.asarray(r, dtype=float))
        t = np.clip((r_arr - self.lower) / (self.upper - self.lower), 0.0, 1.0)
        if self.kind == 'bump':
            up = self._flat(1.0 - t)
            down = self._flat(t)
            value = up / (up + down)
        else:
            value = 1.0 - t ** 3 * (10.0 - 15.0 * t + 6.0 * t ** 2)
        if np.ndim(r) == 0:
            return float(value[0])
        return value.reshape(np.shape(r))
    # ------------------------------------------------------------------------------------------------------------------

    def to_dict(self) -> Dict:
        return {"kind": self.kind, "lower": self.lower, "upper": self.upper}
# ----------------------------------------------------------------------------------------------------------------------


@dataclass
class HankelSplit:
    """
    HankelSplit(r, a_part, b_part, full)

        Decomposition H₀⁺(r) = e^{ir}·r^{−1/2}·a(r) + b(r) with a = 0 below 1/2 and b = 0 above 3/4
    """
    r: Union[float, np.ndarray]
    a_part: Union[complex, np.ndarray]
    b_part: Union[complex, np.ndarray]
    full: Union[complex, np.ndarray]

    def reconstruct(self) -> Union[complex, np.ndarray]:
        return np.exp(1j * np.asarray(self.r)) * np.asarray(self.r) ** -0.5 * self.a_part + self.b_part
    # ------------------------------------------------------------------------------------------------------------------

    def reconstruction_error(self) -> float:
        return float(np.max(np.abs(self.reconstruct() - self.full) / np.abs(self.full)))
# ----------------------------------------------------------------------------------------------------------------------


def split_ab(r: Union[float, np.ndarray],
             cutoff: Optional[SmoothCutoff] = None) -> HankelSplit:
    """
    split_ab(r, cutoff)

        Splits H₀⁺ into the oscillatory far field amplitude a(r) = (1 − χ(r))·H₀⁺(r)·e^{−ir}·r^{1/2}
        and the logarithmic near field b(r) = χ(r)·H₀⁺(r)

        Parameters
        ----------
        r: float or np.ndarray
        cutoff: SmoothCutoff, optional
            defaults to the 'bump' cutoff on [1/2, 3/4]

        Returns
        -------
        HankelSplit

        Examples
        --------
            split = split_ab(0.6)
            split.reconstruction_error() < 1e-10

    """
    cutoff = cutoff if cutoff is not None else SmoothCutoff()
    if not isinstance(cutoff, SmoothCutoff):
        raise TypeError(f"cutoff must be SmoothCutoff, not {type(cutoff)}")
    full = hankel0_plus(r)
    chi = cutoff(r)
    b_part = chi * full
    a_part = (1.0 - chi) * hankel_amplitude_asymptotic(r)
    return HankelSplit(r=r, a_part=a_part, b_part=b_part, full=full)
# ----------------------------------------------------------------------------------------------------------------------


class DyadicCutoff:
    """
    DyadicCutoff(j)

        Piece of the dyadic partition of unity β₀(r) + Σ_{j≥1} β(2^{−j}r) = 1, r > 0.
        β(u) = ψ(u)/Σ_{k∈ℤ}ψ(2^{−k}u) with ψ a C^∞ bump supported in [3/4, 8/3]

        Parameters
        ----------
        j: int
            0 selects β₀, j ≥ 1 selects β(2^{−j}·)

        Examples
        --------
            beta = DyadicCutoff(3)
            beta(10.0)

    """

    def __init__(self,
                 j: int = 0):
        if not isinstance(j, (int, np.integer)):
            raise TypeError(f"j must be int, not {type(j)}")
        if j < 0:
            raise ValueError("j must be nonnegative")
        self.j = int(j)
    # ------------------------------------------------------------------------------------------------------------------

    @staticmethod
    def psi(u: np.ndarray) -> np.ndarray:
        lo, hi = DYADIC_SUPPORT
        u = np.asarray(u, dtype=float)
        t = (2.0 * u - (lo + hi)) / (hi - lo)
        out = np.zeros_like(u)
        inside = np.abs(t) < 1.0
        out[inside] = np.exp(-1.0 / (1.0 - t[inside] ** 2))
        return out
    # ------------------------------------------------------------------------------------------------------------------

    @classmethod
    def normalizer(cls,
                   u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        centre = np.floor(np.log2(u))
        total = np.zeros_like(u)
        for k in range(-2, 3):
            total = total + cls.psi(u * 2.0 ** -(centre + k))
        return total
    # ------------------------------------------------------------------------------------------------------------------

    @classmethod
    def beta(cls,
             u: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
        u_arr = np.atleast_1d(np.asarray(u, dtype=float))
        check_positive(u_arr, 'u')
        out = np.zeros_like(u_arr)
        inside = (u_arr > DYADIC_SUPPORT[0]) & (u_arr < DYADIC_SUPPORT[1])
        out[inside] = cls.psi(u_arr[inside]) / cls.normalizer(u_arr[inside])
        if np.ndim(u) == 0:
            return float(out[0])
        return out.reshape(np.shape(u))
    # ------------------------------------------------------------------------------------------------------------------

    @classmethod
    def beta0(cls,
              r: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
        """
        beta0(r)

            β₀(r) = Σ_{m≥0} β(2^m r), summed over the (at most two) nonzero terms
        """
        r_arr = np.atleast_1d(np.asarray(r, dtype=float))
        check_positive(r_arr, 'r')
        lo, hi = DYADIC_SUPPORT
        m_low = np.maximum(np.floor(np.log2(lo / r_arr)), 0.0)
        out = np.zeros_like(r_arr)
        for k in range(0, 4):
            u = r_arr * 2.0 ** (m_low + k)
            out = out + cls.beta(u)
        out[r_arr * 2.0 ** m_low >= hi] = 0.0
        if np.ndim(r) == 0:
            return float(out[0])
        return out.reshape(np.shape(r))
    # ------------------------------------------------------------------------------------------------------------------

    def __call__(self,
                 r: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
        if self.j == 0:
            return self.beta0(r)
        return self.beta(np.asarray(r, dtype=float) * 2.0 ** -self.j)
    # ------------------------------------------------------------------------------------------------------------------

    @classmethod
    def partition_sum(cls,
                      r: Union[float, np.ndarray]) -> np.ndarray:
        """
        partition_sum(r)

            β₀(r) + Σ_{j≥1} β(2^{−j}r), truncated once 2^{−j}r < 3/4
        """
        r_arr = np.atleast_1d(np.asarray(r, dtype=float))
        total = cls.beta0(r_arr)
        j_max = int(max(1, np.ceil(np.log2(np.max(r_arr) / DYADIC_SUPPORT[0])) + 1))
        for j in range(1, j_max + 1):
            total = total + cls.beta(r_arr * 2.0 ** -j)
        return total
# ----------------------------------------------------------------------------------------------------------------------


@dataclass
class FiniteDifferenceReport:
    """
    FiniteDifferenceReport(orders, max_ratio, worst_r)

        Max over the grid of |f^{(k)}(r)|/envelope(r, k) per derivative order
    """
    orders: List[int]
    max_ratio: Dict[int, float] = field(default_factory=dict)
    worst_r: Dict[int, float] = field(default_factory=dict)

    def constant(self) -> float:
        return float(max(self.max_ratio.values())) if self.max_ratio else 0.0
# ----------------------------------------------------------------------------------------------------------------------


def finite_difference_bounds(f: Union[Callable, np.ndarray],
                             r: np.ndarray,
                             orders: Sequence[int],
                             claimed_envelope: Callable) -> FiniteDifferenceReport:
    """
    finite_difference_bounds(f, r, orders, claimed_envelope)

        Estimates |f^{(k)}(r)| by repeated second-order differences on a log-spaced grid and
        reports max |f^{(k)}|/claimed_envelope(r, k)

        Parameters
        ----------
        f: Callable or np.ndarray
            function of r or its samples on the grid
        r: np.ndarray
            increasing log-spaced grid
        orders: Sequence[int]
        claimed_envelope: Callable
            envelope(r, k) -> np.ndarray

        Returns
        -------
        FiniteDifferenceReport
    """
    r = np.asarray(r, dtype=float)
    if r.ndim != 1 or np.any(np.diff(r) <= 0):
        raise ValueError("r must be an increasing 1D grid")
    check_positive(r, 'r')
    values = np.asarray(f(r) if callable(f) else f)
    if values.shape != r.shape:
        raise ValueError("sampled function must have the shape of the grid")

    log_step = float(np.max(np.diff(np.log(r))))
    report = FiniteDifferenceReport(orders=list(orders))
    for k in orders:
        if log_step > 0.05 or r.size < 2 * k + 3:
            raise ValueError(f"grid too coarse for order {k} finite differences "
                             f"(log step {log_step:.3g}, {r.size} points)")
        derivative = values.astype(complex)
        for _ in range(k):
            derivative = np.gradient(derivative, r, edge_order=2)
        inner = slice(k, r.size - k) if k > 0 else slice(0, r.size)
        envelope = np.asarray(claimed_envelope(r, k), dtype=float)
        with np.errstate(divide='ignore', invalid='ignore'):
            ratio = np.abs(derivative[inner]) / envelope[inner]
        ratio = np.where(np.isfinite(ratio), ratio, 0.0)
        worst = int(np.argmax(ratio))
        report.max_ratio[k] = float(ratio[worst])
        report.worst_r[k] = float(r[inner][worst])
    return report
# ----------------------------------------------------------------------------------------------------------------------
