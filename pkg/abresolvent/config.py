import copy
import hashlib
import json
import math
import yaml
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional

from abresolvent.analysis.grid import GridSpec
from abresolvent.analysis.probes import check_exponent_window
from abresolvent.analysis.scan import sigma_for
from abresolvent.geometry import CirculationProfile, PolarPoint
from abresolvent.regimes import Regime, SpectralParameter
from abresolvent.utils import load_structured_file


COMMANDS = ('eval-kernel', 'scan-sigma', 'verify-bounds', 'eigen-bounds', 'check-appendix', 'selftest')
SUITES = ('direct', 'diffractive', 'multiplier', 'schur', 'appendix', 'bfacts', 'lemma3')
DEFAULT_CONFIG_PATH = Path(__file__).resolve().parent.parent / 'config.yaml'
REQUIRED_FIELDS = ('command', 'tolerance', 'seed', 'output')


class UsageError(ValueError):
    """Invalid command line or run configuration, reported with exit status 2."""
# ----------------------------------------------------------------------------------------------------------------------


@dataclass
class RunConfig:
    """
    RunConfig(command, tolerance, seed, output, threads, profile, grid, params)

        Fully serializable description of one run. The canonical JSON form (sorted keys, no
        whitespace) is hashed with SHA-256 to identify the run in the constants ledger

        Parameters
        ----------
        command: str
            one of COMMANDS
        tolerance: float
            absolute quadrature tolerance
        seed: int
        output: str
            directory of the JSON summary and CSV details
        threads: int
        profile: dict
            {"type": "constant", "alpha": ...} or {"type": "fourier", "coeffs": {...}}
        grid: dict
            {"r_min", "r_max", "n_r", "n_theta", "spacing"}
        params: dict
            command specific values: p, q, regime, deltas, samples, suite, gamma, ...

        Examples
        --------
            config = RunConfig.from_file('config.yaml')
            config.validate()
            config.config_hash()

    """
    command: str
    tolerance: float
    seed: int
    output: str
    threads: int = 1
    profile: Dict[str, Any] = field(default_factory=lambda: {"type": "constant", "alpha": 0.5})
    grid: Dict[str, Any] = field(default_factory=lambda: GridSpec().to_dict())
    params: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_dict(cls,
                  data: Dict) -> 'RunConfig':
        if not isinstance(data, dict):
            raise TypeError(f"run configuration must be dict, not {type(data)}")
        if 'run' in data and isinstance(data['run'], dict):
            data = data['run']
        for key in REQUIRED_FIELDS:
            if key not in data:
                raise UsageError(f'Missing {key} in run configuration')
        return cls(command=str(data['command']),
                   tolerance=float(data['tolerance']),
                   seed=int(data['seed']),
                   output=str(data['output']),
                   threads=int(data.get('threads', 1)),
                   profile=copy.deepcopy(data.get('profile', {"type": "constant", "alpha": 0.5})),
                   grid=copy.deepcopy(data.get('grid', GridSpec().to_dict())),
                   params=copy.deepcopy(data.get('params', {})) or {})
    # ------------------------------------------------------------------------------------------------------------------

    @classmethod
    def from_file(cls,
                  path: str) -> 'RunConfig':
        """Reads a JSON or YAML run configuration."""
        return cls.from_dict(load_structured_file(str(path)))
    # ------------------------------------------------------------------------------------------------------------------

    @classmethod
    def default(cls) -> 'RunConfig':
        if DEFAULT_CONFIG_PATH.exists():
            return cls.from_file(str(DEFAULT_CONFIG_PATH))
        print(f"Default configuration {DEFAULT_CONFIG_PATH} does not exist! Using built-in values")
        return cls(command='selftest', tolerance=1e-9, seed=7, output='results')
    # ------------------------------------------------------------------------------------------------------------------

    def to_dict(self) -> Dict:
        return asdict(self)
    # ------------------------------------------------------------------------------------------------------------------

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(',', ':'))
    # ------------------------------------------------------------------------------------------------------------------

    def config_hash(self) -> str:
        return hashlib.sha256(self.to_json().encode('utf-8')).hexdigest()
    # ------------------------------------------------------------------------------------------------------------------

    def save(self,
             path: str):
        """
        save(path)

            Writes the configuration as JSON (.json) or YAML (.yaml, .yml) under the 'run' key for YAML
        """
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, 'w') as file:
            if path.suffix.lower() in ('.yaml', '.yml'):
                yaml.safe_dump({"run": self.to_dict()}, file, sort_keys=True)
            else:
                file.write(json.dumps(self.to_dict(), sort_keys=True, indent=2))
    # ------------------------------------------------------------------------------------------------------------------

    def with_overrides(self,
                       **values) -> 'RunConfig':
        """
        with_overrides(**values)

            Copy with top level fields replaced; unknown keys and None values go to / are skipped in params
        """
        data = self.to_dict()
        for key, value in values.items():
            if value is None:
                continue
            if key in data and key != 'params':
                data[key] = value
            else:
                data['params'][key] = value
        return RunConfig.from_dict(data)
    # ------------------------------------------------------------------------------------------------------------------

    def profile_object(self) -> CirculationProfile:
        return CirculationProfile.from_config(self.profile)
    # ------------------------------------------------------------------------------------------------------------------

    def grid_spec(self) -> GridSpec:
        return GridSpec.from_dict(self.grid)
    # ------------------------------------------------------------------------------------------------------------------

    def param(self,
              key: str,
              default: Optional[Any] = None) -> Any:
        return self.params.get(key, default)
    # ------------------------------------------------------------------------------------------------------------------

    def validate(self) -> 'RunConfig':
        """
        validate()

            Raises UsageError naming the violated constraint: unknown command or suite, nonpositive
            tolerance or thread count, exponents outside the uniform window, deltas that do not fit the
            regime, a flux outside (−1, 1), malformed grid, profile, spectral parameter or points
        """
        if self.command not in COMMANDS:
            raise UsageError(f"command must be one of {COMMANDS}, got '{self.command}'")
        if not self.tolerance > 0:
            raise UsageError("tolerance must be positive")
        if self.threads < 1:
            raise UsageError("threads must be at least 1")
        try:
            self.grid_spec()
            profile = self.profile_object()
        except (KeyError, TypeError, ValueError) as error:
            raise UsageError(f"invalid grid or profile: {error}") from error
        if not -1.0 < profile.mean_flux < 1.0:
            raise UsageError("mean flux alpha must lie in (-1, 1)")
        if self.command == 'eval-kernel':
            self._validate_eval_kernel()
        if self.command == 'scan-sigma':
            self._validate_scan()
        if self.command == 'verify-bounds':
            suite = self.params.get('suite')
            if suite not in SUITES:
                raise UsageError(f"suite must be one of {SUITES}, got '{suite}'")
        if self.command in ('verify-bounds', 'check-appendix') and int(self.params.get('samples', 1)) < 1:
            raise UsageError("samples must be positive")
        if self.command == 'eigen-bounds' and not 0 < float(self.params.get('gamma', 0.5)) <= 0.5:
            raise UsageError("gamma must lie in (0, 1/2]")
        return self
    # ------------------------------------------------------------------------------------------------------------------

    def _validate_eval_kernel(self):
        for key in ('sigma_re', 'sigma_im', 'x', 'y'):
            if self.params.get(key) is None:
                raise UsageError(f'Missing {key} in run configuration')
        try:
            self.spectral_parameter()
            PolarPoint.from_string(self.params['x'])
            PolarPoint.from_string(self.params['y'])
        except (TypeError, ValueError) as error:
            raise UsageError(str(error)) from error
    # ------------------------------------------------------------------------------------------------------------------

    def _validate_scan(self):
        for key in ('p', 'q', 'regime', 'deltas'):
            if key not in self.params:
                raise UsageError(f'Missing {key} in run configuration')
        try:
            q = self.params['q']
            check_exponent_window(float(self.params['p']), math.inf if q in ('inf', math.inf) else float(q))
            regime = Regime.from_label(self.params['regime'])
            deltas = [float(d) for d in self.params['deltas']]
        except (TypeError, ValueError) as error:
            raise UsageError(str(error)) from error
        if any(not 0 < abs(d) <= 1 for d in deltas):
            raise UsageError("deltas must lie in [-1, 1] without 0")
        for delta in deltas:
            try:
                sigma_for(regime, delta)
            except ValueError as error:
                raise UsageError(f"deltas do not fit regime {regime.label}: {error}") from error
    # ------------------------------------------------------------------------------------------------------------------

    def spectral_parameter(self) -> SpectralParameter:
        """σ of eval-kernel; the branch is used only for σ on (0, ∞)."""
        sigma = complex(float(self.params['sigma_re']), float(self.params['sigma_im']))
        on_axis = sigma.imag == 0 and sigma.real > 0
        return SpectralParameter(sigma, branch=self.params.get('branch') if on_axis else None)
# ----------------------------------------------------------------------------------------------------------------------
