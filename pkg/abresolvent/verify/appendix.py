import math
import numpy as np
import pandas as pd
from dataclasses import dataclass, replace
from scipy.special import hankel1e
from tqdm import tqdm
from typing import List, Tuple

from abresolvent.geometry import diffractive_distance, diffractive_phase_derivatives
from abresolvent.kernel import bracket_parts
from abresolvent.report import BoundCheckReport, VerificationSuite


# below this s the b = 0 slice of the first inequality is evaluated from its Taylor polynomial
TAYLOR_CUTOFF = 1e-3
SLICE_LIMIT = 1e-8
REDUCTION_LIMIT = 1e-10
# relative deviation of analytic s-derivatives from finite differences on the s grid
DERIVATIVE_LIMIT = 5e-3
INEQUALITIES = (1, 2, 3)


@dataclass(frozen=True)
class AppendixGrid:
    """
    AppendixGrid(n_s, n_b, n_alpha, j_values, totals, fractions, s_min)

        Parameter grid of the appendix inequalities: s geometric on [s_min, 1] (with s = 0 added for
        the s-integrals), b = 0 plus geometric values up to 2, α uniform on [−1, 1], radii
        r1 = S·t, r2 = S·(1 − t) over totals S × fractions t

    """
    n_s: int = 512
    n_b: int = 48
    n_alpha: int = 41
    j_values: Tuple[int, ...] = tuple(range(1, 9))
    totals: Tuple[float, ...] = (0.8, 1.5)
    fractions: Tuple[float, ...] = (1e-3, 0.05, 0.5)
    s_min: float = 1e-4

    def __post_init__(self):
        if self.n_s < 16 or self.n_b < 2 or self.n_alpha < 2:
            raise ValueError("appendix grid needs n_s >= 16, n_b >= 2 and n_alpha >= 2")
        if not 0 < self.s_min < 1:
            raise ValueError("s_min must lie in (0, 1)")
    # ------------------------------------------------------------------------------------------------------------------

    @classmethod
    def for_points(cls,
                   points: int) -> 'AppendixGrid':
        """Default grid with n_s raised until the first inequality alone covers the requested points."""
        grid = cls()
        n_s = max(grid.n_s, int(math.ceil(points / (grid.n_b * grid.n_alpha * 2))))
        return replace(grid, n_s=n_s)
    # ------------------------------------------------------------------------------------------------------------------

    def doubled(self) -> 'AppendixGrid':
        return replace(self, n_s=2 * self.n_s, n_b=2 * self.n_b, n_alpha=2 * self.n_alpha - 1)
    # ------------------------------------------------------------------------------------------------------------------

    @property
    def s(self) -> np.ndarray:
        return np.geomspace(self.s_min, 1.0, self.n_s)
    # ------------------------------------------------------------------------------------------------------------------

    @property
    def s_with_origin(self) -> np.ndarray:
        return np.concatenate([[0.0], self.s])
    # ------------------------------------------------------------------------------------------------------------------

    @property
    def b(self) -> np.ndarray:
        return np.concatenate([[0.0], np.geomspace(1e-4, 2.0, self.n_b - 1)])
    # ------------------------------------------------------------------------------------------------------------------

    @property
    def alpha(self) -> np.ndarray:
        return np.linspace(-1.0, 1.0, self.n_alpha)
    # ------------------------------------------------------------------------------------------------------------------

    @property
    def radius_pairs(self) -> List[Tuple[float, float]]:
        return [(total * t, total * (1.0 - t)) for total in self.totals for t in self.fractions]
# ----------------------------------------------------------------------------------------------------------------------


def reduced_difference(s: np.ndarray,
                       b: np.ndarray,
                       alpha: np.ndarray,
                       k: int = 0) -> np.ndarray:
    """
    reduced_difference(s, b, alpha, k)

        k-th s-derivative (k = 0, 1) of
        (e^{−s} − 1 + b²)sinh(αs)/(2sinh²(s/2) + b²) − (−s + b²)(αs)/(s²/2 + b²), broadcast over the
        arguments. At b = 0 and s < TAYLOR_CUTOFF the Taylor polynomial αs − (α/6 + α³/3)s² (and its
        derivative) replaces the quotients
    """
    if k not in (0, 1):
        raise ValueError("k must be 0 or 1")
    s, b, alpha = np.broadcast_arrays(np.asarray(s, dtype=float), np.asarray(b, dtype=float),
                                      np.asarray(alpha, dtype=float))
    b_sq = b ** 2
    em1 = np.expm1(-s)
    first_num = (em1 + b_sq) * np.sinh(alpha * s)
    first_den = 2.0 * np.sinh(0.5 * s) ** 2 + b_sq
    second_num = (b_sq - s) * alpha * s
    second_den = 0.5 * s ** 2 + b_sq
    with np.errstate(divide='ignore', invalid='ignore'):
        if k == 0:
            value = first_num / first_den - second_num / second_den
            taylor = alpha * s - (alpha / 6.0 + alpha ** 3 / 3.0) * s ** 2
        else:
            first_num_d = -np.exp(-s) * np.sinh(alpha * s) + alpha * (em1 + b_sq) * np.cosh(alpha * s)
            second_num_d = alpha * (b_sq - 2.0 * s)
            value = (first_num_d * first_den - first_num * np.sinh(s)) / first_den ** 2 - \
                (second_num_d * second_den - second_num * s) / second_den ** 2
            taylor = alpha - (alpha / 3.0 + 2.0 * alpha ** 3 / 3.0) * s
    series = (b_sq == 0) & (s < TAYLOR_CUTOFF)
    value = np.where(series, taylor, value)
    # s = 0 with b = 0 is the common limit of both quotients
    return np.where((s == 0) & (b_sq == 0), 0.0 if k == 0 else alpha, value)
# ----------------------------------------------------------------------------------------------------------------------


def b_zero_limit(s: np.ndarray,
                 alpha: np.ndarray) -> np.ndarray:
    """(e^{−s} − 1)sinh(αs)/(2sinh²(s/2)) + 2α, the first inequality's expression at b = 0."""
    s = np.asarray(s, dtype=float)
    return np.expm1(-s) * np.sinh(alpha * s) / (2.0 * np.sinh(0.5 * s) ** 2) + 2.0 * alpha
# ----------------------------------------------------------------------------------------------------------------------


def angular_difference(s: np.ndarray,
                       angle: np.ndarray,
                       alpha: float) -> np.ndarray:
    """
    angular_difference(s, angle, alpha)

        The first inequality in the angle φ = θ1 − θ2 + π:
        (e^{−s} − cos φ)sinh(αs)/(cosh s − cos φ) − (−s + b²)(αs)/(s²/2 + b²), b² = 2sin²(φ/2),
        with the first quotient taken from the kernel's diffraction bracket
    """
    s = np.asarray(s, dtype=float)
    angle = np.asarray(angle, dtype=float)
    _, sinh_term, _ = bracket_parts(alpha, s, angle)
    b_sq = 2.0 * np.sin(0.5 * angle) ** 2
    return sinh_term - (b_sq - s) * alpha * s / (0.5 * s ** 2 + b_sq)
# ----------------------------------------------------------------------------------------------------------------------


def far_amplitude_derivative(r: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """a(r) = √r·H₀⁺(r)e^{−ir} and a′(r) = √r·(−H₁⁺(r) − iH₀⁺(r) + H₀⁺(r)/(2r))e^{−ir}, for r > 3/4."""
    r = np.asarray(r, dtype=float)
    h0 = hankel1e(0, r)
    h1 = hankel1e(1, r)
    root = np.sqrt(r)
    return root * h0, root * (-h1 - 1j * h0 + 0.5 * h0 / r)
# ----------------------------------------------------------------------------------------------------------------------


def amplitude_profile(j: int,
                      r1: float,
                      r2: float,
                      s: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    amplitude_profile(j, r1, r2, s)

        A(s) = |n|^{−1/2}a(2^j|n|) and its s-derivative, |n| = |n(s)| the diffracted path length
    """
    lam = 2.0 ** j
    n = diffractive_distance(r1, r2, s)
    n_prime = diffractive_phase_derivatives(r1, r2, s)[0]
    a, a_prime = far_amplitude_derivative(lam * n)
    value = n ** -0.5 * a
    derivative = n_prime * (-0.5 * n ** -1.5 * a + n ** -0.5 * lam * a_prime)
    return value, derivative
# ----------------------------------------------------------------------------------------------------------------------


def model_weight(s: np.ndarray,
                 b: np.ndarray,
                 alpha: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """G = b·cosh(αs)/(2sinh²(s/2) + b²) − b/(s²/2 + b²) and ∂_sG; G ≡ 0 for b = 0."""
    s, b, alpha = np.broadcast_arrays(np.asarray(s, dtype=float), np.asarray(b, dtype=float),
                                      np.asarray(alpha, dtype=float))
    b_sq = b ** 2
    first_den = 2.0 * np.sinh(0.5 * s) ** 2 + b_sq
    second_den = 0.5 * s ** 2 + b_sq
    with np.errstate(divide='ignore', invalid='ignore'):
        value = b * np.cosh(alpha * s) / first_den - b / second_den
        derivative = b * (alpha * np.sinh(alpha * s) * first_den - np.cosh(alpha * s) * np.sinh(s)) / \
            first_den ** 2 + b * s / second_den ** 2
    zero = b == 0
    return np.where(zero, 0.0, value), np.where(zero, 0.0, derivative)
# ----------------------------------------------------------------------------------------------------------------------


def _variation(derivative: np.ndarray,
               s: np.ndarray) -> np.ndarray:
    return np.trapz(np.abs(derivative), s, axis=-1)
# ----------------------------------------------------------------------------------------------------------------------


def _derivative_mismatch(value: np.ndarray,
                         derivative: np.ndarray,
                         s: np.ndarray) -> float:
    numeric = np.gradient(value, s, axis=-1, edge_order=2)
    scale = np.max(np.abs(derivative), axis=-1, keepdims=True)
    scale = np.where(scale > 0, scale, 1.0)
    return float(np.max(np.abs(numeric - derivative)[..., 2:-2] / scale))
# ----------------------------------------------------------------------------------------------------------------------


def _first_inequality(grid: AppendixGrid) -> Tuple[pd.DataFrame, float]:
    s = grid.s
    b = grid.b[:, None, None]
    alpha = grid.alpha[None, :, None]
    rows = []
    mismatch = 0.0
    for k in (0, 1):
        values = np.abs(reduced_difference(s[None, None, :], b, alpha, k))
        worst = np.argmax(values, axis=-1)
        for ib, b_value in enumerate(grid.b):
            for ia, alpha_value in enumerate(grid.alpha):
                rows.append({"k": k, "b": b_value, "alpha": alpha_value, "s": s[worst[ib, ia]],
                             "ratio": values[ib, ia, worst[ib, ia]]})
    # derivative check away from the Taylor branch
    inner = s >= TAYLOR_CUTOFF
    value = reduced_difference(s[None, None, inner], b, alpha, 0)
    derivative = reduced_difference(s[None, None, inner], b, alpha, 1)
    mismatch = max(mismatch, _derivative_mismatch(value, derivative, s[inner]))
    return pd.DataFrame(rows), mismatch
# ----------------------------------------------------------------------------------------------------------------------


def _integral_inequality(inequality: int,
                         grid: AppendixGrid,
                         verbose: bool) -> Tuple[pd.DataFrame, float]:
    s = grid.s_with_origin
    b = grid.b[:, None, None]
    alpha = grid.alpha[None, :, None]
    rows = []
    mismatch = 0.0
    jobs = [(j, pair) for j in grid.j_values for pair in grid.radius_pairs]
    for j, (r1, r2) in tqdm(jobs, desc=f"Appendix inequality {inequality}", disable=not verbose):
        amplitude, amplitude_d = amplitude_profile(j, r1, r2, s)
        if inequality == 2:
            weight, weight_d = model_weight(s[None, None, :], b, alpha)
            product = amplitude * weight
            derivative = amplitude_d * weight + amplitude * weight_d
        else:
            b_only = grid.b[:, None]
            with np.errstate(divide='ignore', invalid='ignore'):
                weight = np.where(b_only == 0, 0.0, b_only / (0.5 * s[None, :] ** 2 + b_only ** 2))
                weight_d = np.where(b_only == 0, 0.0, -b_only * s[None, :] / (0.5 * s[None, :] ** 2 +
                                                                              b_only ** 2) ** 2)
            product = (amplitude - amplitude[0]) * weight
            derivative = amplitude_d * weight + (amplitude - amplitude[0]) * weight_d
        variation = _variation(derivative, s)
        mismatch = max(mismatch, _derivative_mismatch(product, derivative, s))
        if inequality == 2:
            for ib, b_value in enumerate(grid.b):
                for ia, alpha_value in enumerate(grid.alpha):
                    rows.append({"j": j, "r1": r1, "r2": r2, "b": b_value, "alpha": alpha_value,
                                 "ratio": float(variation[ib, ia])})
        else:
            for ib, b_value in enumerate(grid.b):
                rows.append({"j": j, "r1": r1, "r2": r2, "b": b_value, "ratio": float(variation[ib])})
    return pd.DataFrame(rows), mismatch
# ----------------------------------------------------------------------------------------------------------------------


def appendix_reports(inequality: int,
                     grid: AppendixGrid = AppendixGrid(),
                     verbose: bool = False) -> Tuple[BoundCheckReport, BoundCheckReport]:
    """
    appendix_reports(inequality, grid, verbose)

        Evaluates one inequality on the grid and returns its report together with the comparison of
        the analytic s-derivatives against finite differences (claim f'appendix_{inequality}_derivatives')
    """
    if inequality not in INEQUALITIES:
        raise ValueError("inequality must be 1, 2 or 3")
    if inequality == 1:
        table, mismatch = _first_inequality(grid)
        points = 2 * grid.n_s * grid.n_b * grid.n_alpha
    else:
        table, mismatch = _integral_inequality(inequality, grid, verbose)
        points = len(table) * (grid.n_s + 1)
    report = BoundCheckReport.from_samples(f"appendix_{inequality}", table)
    report.sample_count = points
    check = BoundCheckReport.from_tolerance(f"appendix_{inequality}_derivatives",
                                            pd.DataFrame([{"inequality": inequality, "ratio": mismatch}]),
                                            DERIVATIVE_LIMIT)
    return report, check
# ----------------------------------------------------------------------------------------------------------------------


def check_appendix(inequality: int,
                   grid: AppendixGrid = AppendixGrid(),
                   verbose: bool = False) -> BoundCheckReport:
    """
    check_appendix(inequality, grid, verbose)

        Grid maxima of the three auxiliary inequalities in the reduced variables (s, b):
            1: |∂_s^k((e^{−s} − 1 + b²)sinh(αs)/(2sinh²(s/2) + b²) − (−s + b²)(αs)/(s²/2 + b²))|, k = 0, 1;
            2: ∫₀¹|∂_s[A(s)·(b·cosh(αs)/(2sinh²(s/2) + b²) − b/(s²/2 + b²))]| ds;
            3: ∫₀¹|∂_s[(A(s) − A(0))·b/(s²/2 + b²)]| ds,
        A(s) = |n|^{−1/2}a(2^j|n|). Derivatives are analytic

        Parameters
        ----------
        inequality: int
            1, 2 or 3
        grid: AppendixGrid
        verbose: bool

        Returns
        -------
        BoundCheckReport
            claim f'appendix_{inequality}'; sample_count counts every (s, parameter) point
    """
    return appendix_reports(inequality, grid, verbose)[0]
# ----------------------------------------------------------------------------------------------------------------------


def check_appendix_slices(grid: AppendixGrid = AppendixGrid()) -> List[BoundCheckReport]:
    """
    check_appendix_slices(grid)

        Closed form slices of the first inequality: at b = 0 it equals
        (e^{−s} − 1)sinh(αs)/(2sinh²(s/2)) + 2α, at α = 0 it vanishes identically; and its angular
        form with b² = 2sin²(φ/2) agrees with the reduced one

        Returns
        -------
        List[BoundCheckReport]
            'appendix_b0_slice', 'appendix_alpha0_slice', 'appendix_angular_reduction'
    """
    s = grid.s[grid.s >= TAYLOR_CUTOFF]
    alpha = grid.alpha
    rows = []
    for a in alpha:
        error = np.abs(reduced_difference(s, 0.0, a, 0) - b_zero_limit(s, a))
        rows.append({"alpha": a, "s": float(s[np.argmax(error)]), "ratio": float(np.max(error))})
    b_zero = BoundCheckReport.from_tolerance('appendix_b0_slice', pd.DataFrame(rows), SLICE_LIMIT)

    rows = []
    for b in grid.b:
        for k in (0, 1):
            rows.append({"b": b, "k": k, "ratio": float(np.max(np.abs(reduced_difference(grid.s, b, 0.0, k))))})
    alpha_zero = BoundCheckReport.from_tolerance('appendix_alpha0_slice', pd.DataFrame(rows), SLICE_LIMIT)

    rows = []
    angles = np.linspace(-math.pi, math.pi, 65)[1:-1]
    for a in alpha[::4]:
        for angle in angles:
            b = math.sqrt(2.0) * abs(math.sin(0.5 * angle))
            error = np.abs(angular_difference(grid.s, angle, a) - reduced_difference(grid.s, b, a, 0))
            rows.append({"alpha": a, "angle": angle, "ratio": float(np.max(error))})
    reduction = BoundCheckReport.from_tolerance('appendix_angular_reduction', pd.DataFrame(rows), REDUCTION_LIMIT)
    return [b_zero, alpha_zero, reduction]
# ----------------------------------------------------------------------------------------------------------------------


class AppendixSuite(VerificationSuite):
    """
    AppendixSuite(grid, verbose, threads)

        All three inequalities on the grid and on its doubling (refinement change recorded in the
        reports), their derivative checks and the closed form slices. The grid is deterministic,
        the seed is not used

    """
    name = 'appendix'

    def __init__(self,
                 grid: AppendixGrid = None,
                 verbose: bool = True,
                 threads: int = 1):
        super().__init__(verbose=verbose, threads=threads)
        self.grid = grid

    def run(self,
            samples: int,
            seed: int) -> List[BoundCheckReport]:
        grid = self.grid if self.grid is not None else AppendixGrid.for_points(samples)
        reports = []
        for inequality in INEQUALITIES:
            coarse = check_appendix(inequality, grid, self.verbose)
            fine, derivatives = appendix_reports(inequality, grid.doubled(), self.verbose)
            reports.extend([coarse.refined(fine), derivatives])
        return reports + check_appendix_slices(grid)
# ----------------------------------------------------------------------------------------------------------------------
