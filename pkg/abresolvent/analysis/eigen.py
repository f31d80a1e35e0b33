import math
import numpy as np
import pandas as pd
from dataclasses import dataclass, field, replace
from scipy import linalg
from scipy.optimize import brentq
from scipy.special import j0, j1, k0e, k1e
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from abresolvent.analysis.grid import GridSpec, assemble
from abresolvent.geometry import CirculationProfile
from abresolvent.kernel import KernelContext
from abresolvent.regimes import SpectralParameter
from abresolvent.report import BoundCheckReport
from abresolvent.utils import parallel_map


SEARCH_RADIUS = 4.0
SEARCH_MARGIN = 1e-3
NODES_PER_EDGE = 32
MAX_PROBE_COLUMNS = 24
RANK_TOL = 1e-9
# relative distance under which two located eigenvalues are merged
MERGE_TOL = 1e-6
# width of the band along the search boundary, in units of the margin, where a dense eigenvalue may go unmatched
MATCH_GUARD = 10.0


class Potential:
    """
    Potential(kind, strength, radius, values, spec)

        Complex potential V on the polar grid: a disc {|x| ≤ radius} of constant strength,
        or values sampled at the grid nodes

        Examples
        --------
            V = Potential.disc(1.0, -2.0 + 0.5j)
            V = Potential.from_config({"type": "disc", "radius": 1.0, "re": -2.0, "im": 0.5})

    """

    def __init__(self,
                 kind: str,
                 strength: complex = 0j,
                 radius: Optional[float] = None,
                 values: Optional[np.ndarray] = None):
        if kind not in ('disc', 'sampled'):
            raise ValueError(f"Unsupported potential type: {kind}")
        if kind == 'disc' and (radius is None or radius <= 0):
            raise ValueError("disc radius must be positive")
        if kind == 'sampled':
            values = np.asarray(values, dtype=complex).ravel()
            if not np.all(np.isfinite(values)):
                raise ValueError("potential values must be finite")
        self.kind = kind
        self.strength = complex(strength)
        self.radius = radius
        self.values = values
    # ------------------------------------------------------------------------------------------------------------------

    @classmethod
    def disc(cls,
             radius: float,
             strength: complex) -> 'Potential':
        return cls('disc', strength=strength, radius=radius)
    # ------------------------------------------------------------------------------------------------------------------

    @classmethod
    def sampled(cls,
                values: np.ndarray) -> 'Potential':
        return cls('sampled', values=values)
    # ------------------------------------------------------------------------------------------------------------------

    @classmethod
    def from_config(cls,
                    config: Dict) -> 'Potential':
        if 'type' not in config:
            raise ValueError('Missing type in potential configuration')
        if config['type'] == 'disc':
            for key in ('radius', 're'):
                if key not in config:
                    raise ValueError(f'Missing {key} in potential configuration')
            return cls.disc(float(config['radius']), complex(float(config['re']), float(config.get('im', 0.0))))
        if config['type'] == 'sampled':
            if 're' not in config:
                raise ValueError('Missing re in potential configuration')
            re = np.asarray(config['re'], dtype=float)
            im = np.asarray(config.get('im', np.zeros_like(re)), dtype=float)
            return cls.sampled(re + 1j * im)
        raise ValueError(f"Unsupported potential type: {config['type']}")
    # ------------------------------------------------------------------------------------------------------------------

    def to_dict(self) -> Dict:
        if self.kind == 'disc':
            return {"type": "disc", "radius": self.radius, "re": self.strength.real, "im": self.strength.imag}
        return {"type": "sampled", "re": self.values.real.tolist(), "im": self.values.imag.tolist()}
    # ------------------------------------------------------------------------------------------------------------------

    def on_grid(self,
                grid: GridSpec) -> np.ndarray:
        """Node values; a disc is averaged over each ring by the covered area fraction."""
        if self.kind == 'sampled':
            if self.values.shape[0] != grid.size:
                raise ValueError(f"potential has {self.values.shape[0]} values, grid has {grid.size} nodes")
            return self.values.copy()
        e = grid.edges
        covered = np.clip(np.minimum(self.radius, e[1:]) ** 2 - e[:-1] ** 2, 0.0, None)
        fraction = covered / (e[1:] ** 2 - e[:-1] ** 2)
        return np.repeat(self.strength * fraction, grid.n_theta)
    # ------------------------------------------------------------------------------------------------------------------

    def lp_integral(self,
                    grid: GridSpec,
                    gamma: float) -> float:
        """∫|V|^{γ+1} with the grid weights."""
        return float(np.sum(grid.weights * np.abs(self.on_grid(grid)) ** (gamma + 1.0)))
# ----------------------------------------------------------------------------------------------------------------------


class PolarHamiltonian:
    """
    PolarHamiltonian(profile, grid)

        Finite volume discretization of −∂²_r − r^{−1}∂_r + r^{−2}(−i∂_θ + α(θ))² on the grid cells,
        zero flux at r_min and Dirichlet condition at r_max. The angular part is diagonal in Fourier
        modes after the gauge transform: e^{−iP}F^{−1}diag((m + ᾱ)²)F e^{iP}, P the periodic part of
        the antiderivative of α. The matrix is self-adjoint for the weighted inner product Σw·f·conj g
    """

    def __init__(self,
                 profile: CirculationProfile,
                 grid: GridSpec):
        if not isinstance(profile, CirculationProfile):
            raise TypeError(f"profile must be CirculationProfile, not {type(profile)}")
        if not isinstance(grid, GridSpec):
            raise TypeError(f"grid must be GridSpec, not {type(grid)}")
        self.profile = profile
        self.grid = grid
        self.radial = self._radial_matrix(grid)
        self.angular = self._angular_matrix(profile, grid)
        self.matrix = np.kron(self.radial, np.eye(grid.n_theta)) + \
            np.kron(np.diag(grid.radii ** -2.0), self.angular)
    # ------------------------------------------------------------------------------------------------------------------

    @staticmethod
    def _radial_matrix(grid: GridSpec) -> np.ndarray:
        e = grid.edges
        r = grid.radii
        area = 0.5 * (e[1:] ** 2 - e[:-1] ** 2)
        n = grid.n_r
        matrix = np.zeros((n, n))
        for k in range(n - 1):
            conductance = e[k + 1] / (r[k + 1] - r[k])
            matrix[k, k] += conductance / area[k]
            matrix[k, k + 1] -= conductance / area[k]
            matrix[k + 1, k + 1] += conductance / area[k + 1]
            matrix[k + 1, k] -= conductance / area[k + 1]
        matrix[n - 1, n - 1] += e[n] / (e[n] - r[n - 1]) / area[n - 1]
        return matrix
    # ------------------------------------------------------------------------------------------------------------------

    @staticmethod
    def _angular_matrix(profile: CirculationProfile,
                        grid: GridSpec) -> np.ndarray:
        n = grid.n_theta
        modes = np.fft.fftfreq(n, d=1.0 / n)
        theta = grid.thetas
        fourier = np.exp(-1j * np.outer(modes, theta)) / math.sqrt(n)
        symbol = (modes + profile.mean_flux) ** 2
        gauge = np.exp(1j * profile.gauge_phase(theta))
        core = np.conj(fourier.T) @ (symbol[:, None] * fourier)
        return np.conj(gauge)[:, None] * core * gauge[None, :]
# ----------------------------------------------------------------------------------------------------------------------


def in_search_region(z: complex,
                     radius: float = SEARCH_RADIUS,
                     margin: float = SEARCH_MARGIN) -> bool:
    """|z| ≤ radius and dist(z, [0, ∞)) ≥ margin."""
    dist = abs(z) if z.real < 0 else abs(z.imag)
    return abs(z) <= radius and dist >= margin
# ----------------------------------------------------------------------------------------------------------------------


def dense_eigenvalues(profile: CirculationProfile,
                      potential: Potential,
                      grid: GridSpec,
                      radius: float = SEARCH_RADIUS,
                      margin: float = SEARCH_MARGIN,
                      hamiltonian: Optional[PolarHamiltonian] = None) -> np.ndarray:
    """Eigenvalues of the discretized 𝓛_{A,0} + V inside the search region, sorted by real part."""
    hamiltonian = hamiltonian if hamiltonian is not None else PolarHamiltonian(profile, grid)
    values = linalg.eigvals(hamiltonian.matrix + np.diag(potential.on_grid(grid)))
    found = [complex(z) for z in values if in_search_region(complex(z), radius, margin)]
    return np.array(sorted(found, key=lambda z: (z.real, z.imag)), dtype=complex)
# ----------------------------------------------------------------------------------------------------------------------


class BirmanSchwinger:
    """
    BirmanSchwinger(profile, potential, grid, backend, context)

        K(z) = |V|^{1/2}(𝓛_{A,0} − z)^{−1}V^{1/2} restricted to the support of V, with
        V^{1/2} = |V|^{1/2}·V/|V|. z is an eigenvalue of 𝓛_{A,0} + V iff det(I + K(z)) = 0.
        The 'matrix' backend inverts the finite volume Hamiltonian, the 'kernel' backend assembles
        the resolvent kernel on the rings carrying V

        Parameters
        ----------
        profile: CirculationProfile
        potential: Potential
        grid: GridSpec
        backend: str
            'matrix' or 'kernel'
        context: KernelContext, optional
            used by the 'kernel' backend

    """
    BACKENDS = ('matrix', 'kernel')

    def __init__(self,
                 profile: CirculationProfile,
                 potential: Potential,
                 grid: GridSpec,
                 backend: str = 'matrix',
                 context: Optional[KernelContext] = None):
        if backend not in self.BACKENDS:
            raise ValueError(f"backend must be one of {self.BACKENDS}, got '{backend}'")
        self.profile = profile
        self.grid = grid
        self.backend = backend
        self.context = context
        values = potential.on_grid(grid)
        self.support = np.flatnonzero(np.abs(values) > 0)
        magnitude = np.abs(values[self.support])
        self.sqrt_abs = np.sqrt(magnitude)
        self.sqrt_signed = values[self.support] / self.sqrt_abs
        if backend == 'matrix':
            self.hamiltonian = PolarHamiltonian(profile, grid).matrix
        else:
            rings = int(self.support.max() // grid.n_theta) + 1 if self.support.size else 1
            self.subgrid = grid.truncated(rings)
            if self.context is None:
                self.context = KernelContext(radial_method='hankel')
    # ------------------------------------------------------------------------------------------------------------------

    @property
    def size(self) -> int:
        return int(self.support.size)
    # ------------------------------------------------------------------------------------------------------------------

    def resolvent_block(self,
                        z: complex) -> np.ndarray:
        if self.backend == 'matrix':
            n = self.hamiltonian.shape[0]
            rhs = np.zeros((n, self.size), dtype=complex)
            rhs[self.support, np.arange(self.size)] = 1.0
            solution = linalg.solve(self.hamiltonian - z * np.eye(n), rhs)
            return solution[self.support, :]
        operator = assemble(self.profile, SpectralParameter(complex(z)), self.subgrid, self.context, verbose=False)
        return operator.matrix[np.ix_(self.support, self.support)]
    # ------------------------------------------------------------------------------------------------------------------

    def operator(self,
                 z: complex) -> np.ndarray:
        return self.sqrt_abs[:, None] * self.resolvent_block(z) * self.sqrt_signed[None, :]
    # ------------------------------------------------------------------------------------------------------------------

    def characteristic(self,
                       z: complex) -> np.ndarray:
        return np.eye(self.size) + self.operator(z)
    # ------------------------------------------------------------------------------------------------------------------

    def distance_to_minus_one(self,
                              z: complex) -> complex:
        """μ(z) + 1 for the eigenvalue μ of K(z) nearest to −1."""
        mu = linalg.eigvals(self.operator(z))
        return complex(mu[np.argmin(np.abs(mu + 1.0))] + 1.0)
# ----------------------------------------------------------------------------------------------------------------------


def search_tiles(radius: float = SEARCH_RADIUS,
                 margin: float = SEARCH_MARGIN) -> List[Tuple[float, float, float, float]]:
    """Rectangles (re_min, re_max, im_min, im_max) covering {|z| ≤ radius, dist(z, [0, ∞)) ≥ margin}."""
    split = -0.5 * margin
    edge = radius * 1.01
    return [(-edge, split, -edge, edge),
            (split, edge, margin, edge),
            (split, edge, -edge, -margin)]
# ----------------------------------------------------------------------------------------------------------------------


def _contour_nodes(tile: Tuple[float, float, float, float],
                   nodes_per_edge: int) -> Tuple[np.ndarray, np.ndarray]:
    x0, x1, y0, y1 = tile
    corners = [complex(x0, y0), complex(x1, y0), complex(x1, y1), complex(x0, y1)]
    t, w = np.polynomial.legendre.leggauss(nodes_per_edge)
    points, weights = [], []
    for a, b in zip(corners, corners[1:] + corners[:1]):
        points.append(0.5 * (a + b) + 0.5 * (b - a) * t)
        weights.append(0.5 * (b - a) * w)
    return np.concatenate(points), np.concatenate(weights)
# ----------------------------------------------------------------------------------------------------------------------


def beyn_eigenvalues(characteristic: Callable[[complex], np.ndarray],
                     size: int,
                     tile: Tuple[float, float, float, float],
                     nodes_per_edge: int = NODES_PER_EDGE,
                     seed: int = 0) -> Tuple[np.ndarray, bool]:
    """
    beyn_eigenvalues(characteristic, size, tile, nodes_per_edge, seed)

        Contour integral method for the nonlinear eigenproblem T(z)v = 0 inside a rectangle:
        A_k = (1/2πi)∮z^k T(z)^{−1}V̂ dz with a random V̂, rank revealing SVD of A_0 and the eigenvalues
        of U₀ᴴA_1W₀Σ₀^{−1}

        Returns
        -------
        (np.ndarray, bool)
            approximate eigenvalues and whether the probe block was large enough
    """
    columns = min(size, MAX_PROBE_COLUMNS)
    rng = np.random.default_rng(seed)
    probe = rng.standard_normal((size, columns)) + 1j * rng.standard_normal((size, columns))
    points, weights = _contour_nodes(tile, nodes_per_edge)
    a0 = np.zeros((size, columns), dtype=complex)
    a1 = np.zeros((size, columns), dtype=complex)
    for z, w in zip(points, weights):
        solved = linalg.solve(characteristic(complex(z)), probe)
        a0 += w * solved
        a1 += w * z * solved
    a0 /= 2j * math.pi
    a1 /= 2j * math.pi
    u, s, vh = linalg.svd(a0, full_matrices=False)
    if s.size == 0 or s[0] == 0:
        return np.array([], dtype=complex), True
    rank = int(np.count_nonzero(s > RANK_TOL * max(s[0], 1.0)))
    if rank == 0:
        return np.array([], dtype=complex), True
    reduced = np.conj(u[:, :rank].T) @ a1 @ np.conj(vh[:rank, :].T) / s[:rank][None, :]
    return linalg.eigvals(reduced), rank < columns
# ----------------------------------------------------------------------------------------------------------------------


def secant_refine(func: Callable[[complex], complex],
                  z0: complex,
                  tol: float = 1e-12,
                  iterations: int = 60,
                  accept: Optional[Callable[[complex], bool]] = None) -> Tuple[complex, bool]:
    """
    secant_refine(func, z0, tol, iterations, accept)

        Secant iteration for a root of func started at z0. An iterate that is not finite or that
        accept rejects stops the iteration as not converged; func is never called there
    """
    z_prev = complex(z0)
    z = z_prev * (1.0 + 1e-5) + 1e-7j
    if accept is not None and not (accept(z_prev) and accept(z)):
        return z_prev, False
    f_prev, f = func(z_prev), func(z)
    for _ in range(iterations):
        if f == f_prev:
            return z, abs(f) < 1e-10
        z_next = z - f * (z - z_prev) / (f - f_prev)
        if not (math.isfinite(z_next.real) and math.isfinite(z_next.imag)):
            return z, False
        if accept is not None and not accept(z_next):
            return z, False
        if abs(z_next - z) < tol * max(1.0, abs(z_next)):
            return z_next, True
        z_prev, f_prev = z, f
        z = z_next
        f = func(z)
    return z, False
# ----------------------------------------------------------------------------------------------------------------------


def _merge(values: Sequence[complex]) -> List[complex]:
    merged = []
    for z in sorted(values, key=lambda v: (v.real, v.imag)):
        if not any(abs(z - m) <= MERGE_TOL * max(1.0, abs(m)) for m in merged):
            merged.append(z)
    return merged
# ----------------------------------------------------------------------------------------------------------------------


@dataclass
class EigenResult:
    """
    EigenResult(eigenvalues, ratios, integral, report, failures)

        Located eigenvalues, their ratios |λ|^γ/∫|V|^{γ+1} and the bound report;
        failures lists tiles or starting points where the search did not converge
    """
    eigenvalues: np.ndarray
    ratios: np.ndarray
    integral: float
    report: BoundCheckReport
    failures: List[str] = field(default_factory=list)
# ----------------------------------------------------------------------------------------------------------------------


def _eigen_report(eigenvalues: np.ndarray,
                  ratios: np.ndarray,
                  recorded_constant: Optional[float]) -> BoundCheckReport:
    if eigenvalues.size == 0:
        return BoundCheckReport(claim_id='eigenvalue_bound', sample_count=0, max_ratio=0.0, worst_point={},
                                verdict=True, recorded_constant=recorded_constant)
    table = pd.DataFrame({"re": eigenvalues.real, "im": eigenvalues.imag, "ratio": ratios})
    return BoundCheckReport.from_samples('eigenvalue_bound', table, recorded_constant=recorded_constant)
# ----------------------------------------------------------------------------------------------------------------------


def birman_schwinger_eigen(profile: CirculationProfile,
                           potential: Potential,
                           gamma: float = 0.5,
                           grid: Optional[GridSpec] = None,
                           backend: str = 'matrix',
                           context: Optional[KernelContext] = None,
                           radius: float = SEARCH_RADIUS,
                           margin: float = SEARCH_MARGIN,
                           nodes_per_edge: int = NODES_PER_EDGE,
                           seed: int = 0,
                           recorded_constant: Optional[float] = None,
                           threads: int = 1,
                           verbose: bool = True) -> EigenResult:
    """
    birman_schwinger_eigen(profile, potential, gamma, grid, backend, context, radius, margin,
                           nodes_per_edge, seed, recorded_constant, threads, verbose)

        Eigenvalues of the discretized 𝓛_{A,0} + V off [0, ∞): the Birman-Schwinger function
        I + K(z) is searched by the contour integral method over three rectangles covering
        {|z| ≤ radius, dist(z, [0, ∞)) ≥ margin}, and every candidate is refined by a secant iteration
        on μ(z) + 1. Each eigenvalue is reported with |λ|^γ/∫|V|^{γ+1}

        Parameters
        ----------
        profile: CirculationProfile
        potential: Potential
        gamma: float
            0 < γ ≤ 1/2
        grid: GridSpec, optional
        backend: str
            'matrix' or 'kernel'
        context: KernelContext, optional
        radius: float
        margin: float
        nodes_per_edge: int
        seed: int
        recorded_constant: float, optional
        threads: int
            worker threads over tiles
        verbose: bool

        Returns
        -------
        EigenResult
    """
    if not 0 < gamma <= 0.5:
        raise ValueError("gamma must lie in (0, 1/2]")
    grid = grid if grid is not None else GridSpec(1e-3, 16.0, 24, 16)
    integral = potential.lp_integral(grid, gamma)
    if not math.isfinite(integral):
        raise ValueError("potential must have finite L^(gamma+1) norm on the grid")
    if integral == 0:
        empty = np.array([], dtype=complex)
        return EigenResult(empty, np.array([]), 0.0, _eigen_report(empty, np.array([]), recorded_constant))

    bs = BirmanSchwinger(profile, potential, grid, backend, context)
    tiles = search_tiles(radius, margin)

    def locate(job):
        index, tile = job
        x0, x1, y0, y1 = tile

        def inside(z):
            return x0 <= z.real <= x1 and y0 <= z.imag <= y1 and in_search_region(z, radius, margin)

        found, failures = [], []
        try:
            candidates, complete = beyn_eigenvalues(bs.characteristic, bs.size, tile, nodes_per_edge, seed + index)
        except (linalg.LinAlgError, ValueError) as error:
            return found, [f"tile {index}: contour integral failed: {error}"]
        if not complete:
            failures.append(f"tile {index}: probe block saturated, eigenvalues may be missing")
        for z0 in candidates:
            if not (x0 <= z0.real <= x1 and y0 <= z0.imag <= y1):
                continue
            try:
                z, converged = secant_refine(bs.distance_to_minus_one, complex(z0), accept=inside)
            except (linalg.LinAlgError, ValueError) as error:
                failures.append(f"tile {index}: refinement from {complex(z0):.6g} failed: {error}")
                continue
            if converged:
                found.append(z)
            elif in_search_region(complex(z0), radius, margin):
                failures.append(f"tile {index}: refinement from {complex(z0):.6g} did not converge")
        return found, failures

    results = parallel_map(locate, list(enumerate(tiles)), threads=threads, desc='Contour tiles', verbose=verbose)
    located, failures = [], []
    for found, tile_failures in results:
        located.extend(found)
        failures.extend(tile_failures)
    eigenvalues = np.array([z for z in _merge(located) if in_search_region(z, radius, margin)], dtype=complex)
    ratios = np.abs(eigenvalues) ** gamma / integral
    for message in failures:
        print(message)
    return EigenResult(eigenvalues, ratios, integral, _eigen_report(eigenvalues, ratios, recorded_constant), failures)
# ----------------------------------------------------------------------------------------------------------------------


def _relative_gap(values: np.ndarray,
                  targets: np.ndarray) -> float:
    if values.size == 0:
        return 0.0
    if targets.size == 0:
        return math.inf
    return float(max(np.min(np.abs(targets - z)) / max(abs(z), SEARCH_MARGIN) for z in values))
# ----------------------------------------------------------------------------------------------------------------------


def match_eigenvalues(located: np.ndarray,
                      reference: np.ndarray,
                      radius: float = SEARCH_RADIUS,
                      margin: float = SEARCH_MARGIN,
                      guard: float = MATCH_GUARD) -> float:
    """
    match_eigenvalues(located, reference, radius, margin, guard)

        Worst relative distance between the two sets, taken both ways: every located value against
        the nearest reference value, and every reference value at least guard·margin inside the search
        region against the nearest located value. Reference values in the guard band may be missed
        by the contour search without counting as a mismatch

        Returns
        -------
        float
            inf when one side is empty and the other is not
    """
    located = np.asarray(located, dtype=complex)
    reference = np.asarray(reference, dtype=complex)
    interior = np.array([z for z in reference if in_search_region(complex(z), radius - guard * margin,
                                                                  guard * margin)], dtype=complex)
    return max(_relative_gap(located, reference), _relative_gap(interior, located))
# ----------------------------------------------------------------------------------------------------------------------


def disc_family(count: int = 20,
                seed: int = 0,
                radius: float = 1.0) -> List[Potential]:
    """Complex disc potentials of strength 0.5..8 and phase in [0.6π, 1.4π]."""
    rng = np.random.default_rng(seed)
    strengths = np.geomspace(0.5, 8.0, count)
    phases = rng.uniform(0.6 * math.pi, 1.4 * math.pi, size=count)
    return [Potential.disc(radius, s * complex(math.cos(ph), math.sin(ph))) for s, ph in zip(strengths, phases)]
# ----------------------------------------------------------------------------------------------------------------------


@dataclass
class EigenSweep:
    """
    EigenSweep(table, report, mismatch, failures)

        Rows (potential, re, im, integral, ratio) of every located eigenvalue, the bound report, the worst
        two-sided mismatch against the dense eigensolve and the per-potential failure messages.
        The report does not pass while failures is non-empty
    """
    table: pd.DataFrame
    report: BoundCheckReport
    mismatch: float
    failures: List[str] = field(default_factory=list)
# ----------------------------------------------------------------------------------------------------------------------


def eigen_bound_sweep(profile: CirculationProfile,
                      potentials: Sequence[Potential],
                      gamma: float = 0.5,
                      grid: Optional[GridSpec] = None,
                      backend: str = 'matrix',
                      context: Optional[KernelContext] = None,
                      threads: int = 1,
                      verbose: bool = True) -> EigenSweep:
    """
    eigen_bound_sweep(profile, potentials, gamma, grid, backend, context, threads, verbose)

        Runs the eigenvalue search for every potential. A potential whose search raises or reports
        failures stays in the sweep; its messages are collected and fail the report

        Returns
        -------
        EigenSweep
    """
    grid = grid if grid is not None else GridSpec(1e-3, 16.0, 24, 16)
    hamiltonian = PolarHamiltonian(profile, grid)
    rows, failures = [], []
    mismatch = 0.0
    for index, potential in enumerate(potentials):
        try:
            result = birman_schwinger_eigen(profile, potential, gamma, grid, backend, context,
                                            threads=threads, verbose=verbose)
        except (linalg.LinAlgError, ValueError) as error:
            failures.append(f"potential {index}: {error}")
            print(f"potential {index}: eigenvalue search failed: {error}")
            continue
        failures.extend(f"potential {index}: {message}" for message in result.failures)
        reference = dense_eigenvalues(profile, potential, grid, hamiltonian=hamiltonian)
        mismatch = max(mismatch, match_eigenvalues(result.eigenvalues, reference))
        for z, ratio in zip(result.eigenvalues, result.ratios):
            rows.append({"potential": index, "re": z.real, "im": z.imag, "integral": result.integral,
                         "ratio": ratio})
    table = pd.DataFrame(rows, columns=['potential', 're', 'im', 'integral', 'ratio'])
    if table.empty:
        report = BoundCheckReport(claim_id='eigenvalue_bound', sample_count=0, max_ratio=0.0, worst_point={},
                                  verdict=True)
    else:
        report = BoundCheckReport.from_samples('eigenvalue_bound', table)
    if failures:
        report = replace(report, verdict=False, skipped=report.skipped + len(failures))
    return EigenSweep(table, report, mismatch, failures)
# ----------------------------------------------------------------------------------------------------------------------


def shallow_well_eigenvalue(kappa: float,
                            radius: float = 1.0) -> float:
    """
    shallow_well_eigenvalue(kappa, radius)

        Ground state E = −k² of −Δ − κ𝟙_{|x|≤radius} in the plane from the radial matching condition
        q·J₁(qR)/J₀(qR) = k·K₁(kR)/K₀(kR), q = √(κ − k²), solved for log k
    """
    if kappa <= 0 or radius <= 0:
        raise ValueError("kappa and radius must be positive")
    if kappa * radius ** 2 >= 5.78:
        raise ValueError("only wells with kappa*radius^2 below the first zero of J0 squared are supported")

    def matching(log_k):
        k = math.exp(log_k)
        q = math.sqrt(max(kappa - k * k, 0.0))
        # K1/K0 in exponentially scaled form
        return q * j1(q * radius) * k0e(k * radius) - k * k1e(k * radius) * j0(q * radius)

    upper = 0.5 * math.log(kappa) - 1e-12
    log_k = brentq(matching, -700.0, upper, xtol=1e-14, maxiter=500)
    return -math.exp(2.0 * log_k)
# ----------------------------------------------------------------------------------------------------------------------
