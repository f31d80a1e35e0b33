import math
import h5py
import json
import numpy as np
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple, Union

from abresolvent.geometry import CirculationProfile, TWO_PI
from abresolvent.kernel import KernelContext, kernel_row, direct_angular_factor
from abresolvent.oscillatory import QuadratureError
from abresolvent.regimes import SpectralParameter
from abresolvent.utils import parallel_map


@dataclass(frozen=True)
class GridSpec:
    """
    GridSpec(r_min, r_max, n_r, n_theta, spacing)

        Polar product grid. Radial cells [e_k, e_{k+1}] are log-spaced (or uniform) on [r_min, r_max],
        nodes sit at the cell midpoints (geometric midpoints for log spacing), angles are m·2π/n_theta.
        Node weights are the exact cell areas ½(e_{k+1}² − e_k²)·Δθ, so Σw = π(r_max² − r_min²).
        Flat node index i = k·n_theta + m

        Parameters
        ----------
        r_min: float
        r_max: float
        n_r: int
        n_theta: int
        spacing: str
            'log' or 'uniform'

    """
    r_min: float = 1e-3
    r_max: float = 16.0
    n_r: int = 96
    n_theta: int = 128
    spacing: str = 'log'

    def __post_init__(self):
        if not self.r_min > 0:
            raise ValueError("r_min must be positive")
        if not self.r_max > self.r_min:
            raise ValueError("r_max must exceed r_min")
        if int(self.n_r) < 1 or int(self.n_theta) < 1:
            raise ValueError("n_r and n_theta must be positive")
        if self.spacing not in ('log', 'uniform'):
            raise ValueError(f"spacing must be 'log' or 'uniform', got '{self.spacing}'")
        object.__setattr__(self, 'n_r', int(self.n_r))
        object.__setattr__(self, 'n_theta', int(self.n_theta))
    # ------------------------------------------------------------------------------------------------------------------

    @classmethod
    def from_string(cls,
                    text: str,
                    spacing: str = 'log') -> 'GridSpec':
        """from_string("rmin,rmax,nr,ntheta")"""
        parts = [p.strip() for p in text.split(',')]
        if len(parts) != 4:
            raise ValueError(f"grid must be given as 'rmin,rmax,nr,ntheta', got '{text}'")
        return cls(float(parts[0]), float(parts[1]), int(parts[2]), int(parts[3]), spacing)
    # ------------------------------------------------------------------------------------------------------------------

    @classmethod
    def from_dict(cls,
                  config: Dict) -> 'GridSpec':
        for key in ('r_min', 'r_max', 'n_r', 'n_theta'):
            if key not in config:
                raise ValueError(f'Missing {key} in grid configuration')
        return cls(float(config['r_min']), float(config['r_max']), int(config['n_r']), int(config['n_theta']),
                   config.get('spacing', 'log'))
    # ------------------------------------------------------------------------------------------------------------------

    def to_dict(self) -> Dict:
        return {"r_min": self.r_min, "r_max": self.r_max, "n_r": self.n_r, "n_theta": self.n_theta,
                "spacing": self.spacing}
    # ------------------------------------------------------------------------------------------------------------------

    @property
    def size(self) -> int:
        return self.n_r * self.n_theta
    # ------------------------------------------------------------------------------------------------------------------

    @property
    def d_theta(self) -> float:
        return TWO_PI / self.n_theta
    # ------------------------------------------------------------------------------------------------------------------

    @property
    def edges(self) -> np.ndarray:
        if self.spacing == 'log':
            return np.geomspace(self.r_min, self.r_max, self.n_r + 1)
        return np.linspace(self.r_min, self.r_max, self.n_r + 1)
    # ------------------------------------------------------------------------------------------------------------------

    @property
    def radii(self) -> np.ndarray:
        e = self.edges
        if self.spacing == 'log':
            return np.sqrt(e[:-1] * e[1:])
        return 0.5 * (e[:-1] + e[1:])
    # ------------------------------------------------------------------------------------------------------------------

    @property
    def thetas(self) -> np.ndarray:
        return np.arange(self.n_theta) * self.d_theta
    # ------------------------------------------------------------------------------------------------------------------

    @property
    def ring_weights(self) -> np.ndarray:
        e = self.edges
        return 0.5 * (e[1:] ** 2 - e[:-1] ** 2) * self.d_theta
    # ------------------------------------------------------------------------------------------------------------------

    @property
    def weights(self) -> np.ndarray:
        return np.repeat(self.ring_weights, self.n_theta)
    # ------------------------------------------------------------------------------------------------------------------

    def node_coordinates(self) -> Tuple[np.ndarray, np.ndarray]:
        """Flat (r, θ) arrays of all nodes."""
        return np.repeat(self.radii, self.n_theta), np.tile(self.thetas, self.n_r)
    # ------------------------------------------------------------------------------------------------------------------

    def node(self,
             index: int) -> Tuple[int, int]:
        if not 0 <= index < self.size:
            raise IndexError(f"node {index} is out of range for grid of {self.size} nodes")
        return divmod(index, self.n_theta)
    # ------------------------------------------------------------------------------------------------------------------

    def truncated(self,
                  rings: int) -> 'GridSpec':
        """Grid of the innermost rings, with the same cells."""
        if not 1 <= rings <= self.n_r:
            raise IndexError(f"{rings} rings requested from grid with {self.n_r} rings")
        return GridSpec(self.r_min, float(self.edges[rings]), rings, self.n_theta, self.spacing)
# ----------------------------------------------------------------------------------------------------------------------


@dataclass
class GridOperator:
    """
    GridOperator(grid, matrix, diagonal_policy, sigma, profile, failures)

        Nyström discretization (Tf)_i = Σ_j K(x_i, x_j)·w_j·f_j of an integral operator on a polar grid.
        Kernel quadrature failures are kept in failures as (node_i, node_j, message) with the
        affected entries set to zero
    """
    grid: GridSpec
    matrix: np.ndarray
    diagonal_policy: str = 'log_disc'
    sigma: Optional[complex] = None
    profile: Dict = field(default_factory=dict)
    failures: List[Tuple[int, int, str]] = field(default_factory=list)

    def __post_init__(self):
        n = self.grid.size
        if self.matrix.shape != (n, n):
            raise ValueError(f"matrix must have shape {(n, n)}, got {self.matrix.shape}")
    # ------------------------------------------------------------------------------------------------------------------

    def apply(self,
              f: np.ndarray) -> np.ndarray:
        f = np.asarray(f)
        if f.shape[0] != self.grid.size:
            raise ValueError(f"function must have {self.grid.size} grid values, got {f.shape[0]}")
        return self.matrix @ f
    # ------------------------------------------------------------------------------------------------------------------

    def kernel_values(self) -> np.ndarray:
        return self.matrix / self.grid.weights[None, :]
    # ------------------------------------------------------------------------------------------------------------------

    def adjoint(self) -> 'GridOperator':
        """Operator of the kernel conj K(y, x) on the same grid."""
        w = self.grid.weights
        matrix = np.conj(self.matrix.T) / w[:, None] * w[None, :]
        sigma = None if self.sigma is None else complex(np.conj(self.sigma))
        return GridOperator(self.grid, matrix, self.diagonal_policy, sigma, dict(self.profile), list(self.failures))
    # ------------------------------------------------------------------------------------------------------------------

    def save_to_h5(self,
                   path_to_file: str,
                   h5_key: str = 'operator'):
        """
        save_to_h5(path_to_file, h5_key)

            Saves matrix and metadata to .h5 file
        """
        with h5py.File(path_to_file, 'w') as f:
            dataset = f.create_dataset(h5_key, data=self.matrix)
            dataset.attrs['grid'] = json.dumps(self.grid.to_dict())
            dataset.attrs['diagonal_policy'] = self.diagonal_policy
            dataset.attrs['profile'] = json.dumps(self.profile)
            if self.sigma is not None:
                dataset.attrs['sigma'] = json.dumps([self.sigma.real, self.sigma.imag])
    # ------------------------------------------------------------------------------------------------------------------

    @classmethod
    def load_from_h5(cls,
                     path_to_file: str,
                     h5_key: str = 'operator') -> 'GridOperator':
        with h5py.File(path_to_file, 'r') as f:
            if h5_key not in f:
                raise KeyError(f"{h5_key} not found in {path_to_file}")
            dataset = f[h5_key]
            matrix = np.array(dataset)
            grid = GridSpec.from_dict(json.loads(dataset.attrs['grid']))
            sigma = None
            if 'sigma' in dataset.attrs:
                re, im = json.loads(dataset.attrs['sigma'])
                sigma = complex(re, im)
            return cls(grid, matrix, str(dataset.attrs['diagonal_policy']), sigma,
                       json.loads(dataset.attrs['profile']))
# ----------------------------------------------------------------------------------------------------------------------


def _circulant_index(n: int) -> np.ndarray:
    m = np.arange(n)
    return (m[None, :] - m[:, None]) % n
# ----------------------------------------------------------------------------------------------------------------------


def assemble(profile: CirculationProfile,
             sigma: Union[SpectralParameter, complex],
             grid: GridSpec,
             context: Optional[KernelContext] = None,
             threads: int = 1,
             verbose: bool = True) -> GridOperator:
    """
    assemble(profile, sigma, grid, context, threads, verbose)

        Dense GridOperator of the resolvent kernel R(σ). For a constant flux the kernel depends on the
        radii and on θ2 − θ1 only and is symmetric in the radii, so one kernel row over the n_theta
        angle differences is evaluated per radius pair k1 ≤ k2; a non-constant profile contributes the
        gauge factor e^{i(P(θ2) − P(θ1))}. The diagonal cell integrates the logarithmic part over a disc
        of the cell area: w·(c1(ln ρ − ½) + c0)·A_α(0) with ρ = √(w/π) in scaled coordinates, plus
        the (bounded) diffractive part at coincident points

        Parameters
        ----------
        profile: CirculationProfile
        sigma: SpectralParameter or complex
        grid: GridSpec
        context: KernelContext, optional
        threads: int
            worker threads over radius pairs
        verbose: bool

        Returns
        -------
        GridOperator
    """
    if not isinstance(profile, CirculationProfile):
        raise TypeError(f"profile must be CirculationProfile, not {type(profile)}")
    if not isinstance(grid, GridSpec):
        raise TypeError(f"grid must be GridSpec, not {type(grid)}")
    sigma = sigma if isinstance(sigma, SpectralParameter) else SpectralParameter(complex(sigma))
    context = context if context is not None else KernelContext()
    radial = context.radial(sigma)
    factor = context.scale(sigma)
    prefactor = context.prefactor(sigma)
    alpha = profile.mean_flux

    radii = grid.radii * factor
    ring_weights = grid.ring_weights
    deltas = grid.thetas
    n_r, n_t = grid.n_r, grid.n_theta
    pairs = [(k1, k2) for k1 in range(n_r) for k2 in range(k1, n_r)]

    def evaluate(pair):
        k1, k2 = pair
        try:
            row = kernel_row(alpha, radii[k1], radii[k2], deltas, radial, context.tol)
        except QuadratureError as error:
            return pair, np.zeros(n_t, dtype=complex), str(error)
        values = row.parts()
        if k1 == k2:
            rho = math.sqrt(ring_weights[k1] / math.pi) * factor
            local = radial.log_coefficient * (math.log(rho) - 0.5) + radial.constant_term()
            values[0] = direct_angular_factor(alpha, 0.0) * local + row.d1[0] + row.d2[0]
        return pair, prefactor * values, None

    rows = parallel_map(evaluate, pairs, threads=threads, desc='Assembling kernel rows', verbose=verbose)

    index = _circulant_index(n_t)
    gauge = np.exp(1j * profile.gauge_phase(grid.thetas))
    gauge_outer = np.conj(gauge)[:, None] * gauge[None, :]
    matrix = np.zeros((grid.size, grid.size), dtype=complex)
    failures = []
    for (k1, k2), values, message in rows:
        block = gauge_outer * values[index]
        matrix[k1 * n_t:(k1 + 1) * n_t, k2 * n_t:(k2 + 1) * n_t] = block * ring_weights[k2]
        if k1 != k2:
            matrix[k2 * n_t:(k2 + 1) * n_t, k1 * n_t:(k1 + 1) * n_t] = block * ring_weights[k1]
        if message is not None:
            failures.append((k1 * n_t, k2 * n_t, message))
    if failures:
        print(f"Kernel quadrature failed for {len(failures)} radius pairs")
    return GridOperator(grid=grid, matrix=matrix, diagonal_policy='log_disc', sigma=sigma.sigma,
                        profile=profile.to_dict(), failures=failures)
# ----------------------------------------------------------------------------------------------------------------------


def resolvent_identity_residual(profile: CirculationProfile,
                                sigma1: Union[SpectralParameter, complex],
                                sigma2: Union[SpectralParameter, complex],
                                grid: GridSpec,
                                context: Optional[KernelContext] = None,
                                verbose: bool = False) -> float:
    """
    resolvent_identity_residual(profile, sigma1, sigma2, grid, context, verbose)

        ‖(R1 − R2) − (σ1 − σ2)R1R2‖_F / ‖R1 − R2‖_F for the discretized resolvents, a proxy for the
        discretization error
    """
    s1 = sigma1 if isinstance(sigma1, SpectralParameter) else SpectralParameter(complex(sigma1))
    s2 = sigma2 if isinstance(sigma2, SpectralParameter) else SpectralParameter(complex(sigma2))
    r1 = assemble(profile, s1, grid, context, verbose=verbose).matrix
    r2 = assemble(profile, s2, grid, context, verbose=verbose).matrix
    difference = r1 - r2
    residual = difference - (s1.sigma - s2.sigma) * (r1 @ r2)
    return float(np.linalg.norm(residual) / np.linalg.norm(difference))
# ----------------------------------------------------------------------------------------------------------------------
