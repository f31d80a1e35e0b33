import enum
import math
import numpy as np
from dataclasses import dataclass
from typing import Optional, Union


# width of the boundary strip |δ| < ε around the positive real axis; |δ| = ε belongs to the positive regime
BOUNDARY_EPSILON = 0.1


class BaseIntEnum(enum.IntEnum):
    """
    Base class for int enumeration
    """
    @classmethod
    def enum_names(cls):
        return [v.name for v in list(cls)]
# ----------------------------------------------------------------------------------------------------------------------


class Regime(BaseIntEnum):
    """
    Regime of the normalized spectral parameter σ/|σ| = ±√(1 − δ²) + iδ:
    NEGATIVE (case i, real part negative), POSITIVE (case ii, |δ| ≥ ε),
    BOUNDARY (case iii, |δ| < ε, limiting absorption λ² ± i0)
    """
    NEGATIVE = 1
    POSITIVE = 2
    BOUNDARY = 3

    @classmethod
    def from_label(cls,
                   label: Union[str, int]) -> 'Regime':
        labels = {'i': cls.NEGATIVE, 'ii': cls.POSITIVE, 'iii': cls.BOUNDARY}
        if isinstance(label, (int, np.integer)):
            return cls(int(label))
        if not isinstance(label, str):
            raise TypeError(f"regime label must be str, not {type(label)}")
        key = label.strip().lower()
        if key in labels:
            return labels[key]
        if key.upper() in cls.enum_names():
            return cls[key.upper()]
        raise ValueError(f"regime must be one of i, ii, iii, got '{label}'")
    # ------------------------------------------------------------------------------------------------------------------

    @property
    def label(self) -> str:
        return {1: 'i', 2: 'ii', 3: 'iii'}[int(self)]
# ----------------------------------------------------------------------------------------------------------------------


class Branch(BaseIntEnum):
    """
    Side of the limiting absorption: PLUS for λ² + i0, MINUS for λ² − i0
    """
    PLUS = 1
    MINUS = -1

    @classmethod
    def from_sign(cls,
                  value: Union[str, float]) -> 'Branch':
        if isinstance(value, str):
            if value.strip() in ('+', 'plus', 'PLUS'):
                return cls.PLUS
            if value.strip() in ('-', 'minus', 'MINUS'):
                return cls.MINUS
            raise ValueError(f"branch must be '+' or '-', got '{value}'")
        if value == 0:
            raise ValueError("branch sign must be nonzero")
        return cls.PLUS if value > 0 else cls.MINUS
# ----------------------------------------------------------------------------------------------------------------------


@dataclass(frozen=True)
class SpectralParameter:
    """
    SpectralParameter(sigma, branch, epsilon)

        Spectral parameter σ ∉ [0, ∞) together with its normalized form σ/|σ| = ±√(1 − δ²) + iδ.
        A point of (0, ∞) is accepted only with an explicit branch and then means σ ± i0

        Parameters
        ----------
        sigma: complex
        branch: Branch, optional
            side of the limiting absorption; required on (0, ∞), otherwise sign(Im σ) is used
        epsilon: float
            width of the boundary strip

        Attributes
        ----------
        modulus: float
        unit: complex
        delta: float
        regime: Regime

        Examples
        --------
            SpectralParameter(-1.0).regime == Regime.NEGATIVE
            SpectralParameter.from_delta(0.01, sign=1).regime == Regime.BOUNDARY

    """
    sigma: complex
    branch: Optional[Branch] = None
    epsilon: float = BOUNDARY_EPSILON

    def __post_init__(self):
        if not isinstance(self.sigma, (int, float, complex, np.number)):
            raise TypeError(f"sigma must be complex number, not {type(self.sigma)}")
        sigma = complex(self.sigma)
        if not np.isfinite(sigma.real) or not np.isfinite(sigma.imag):
            raise ValueError("sigma must be finite")
        branch = self.branch
        if branch is not None and not isinstance(branch, Branch):
            branch = Branch.from_sign(branch)
        if sigma.imag == 0.0 and sigma.real >= 0.0:
            if sigma.real == 0.0 or branch is None:
                raise ValueError("sigma must not lie on [0, inf) unless a branch (+i0 or -i0) is given")
        if not 0 < self.epsilon < 1:
            raise ValueError("epsilon must lie in (0, 1)")
        object.__setattr__(self, 'sigma', sigma)
        object.__setattr__(self, 'branch', branch)
    # ------------------------------------------------------------------------------------------------------------------

    @classmethod
    def from_delta(cls,
                   delta: float,
                   sign: int = 1,
                   modulus: float = 1.0,
                   epsilon: float = BOUNDARY_EPSILON) -> 'SpectralParameter':
        """
        from_delta(delta, sign, modulus, epsilon)

            σ = modulus·(sign·√(1 − δ²) + iδ)
        """
        if not -1.0 <= delta <= 1.0:
            raise ValueError("delta must lie in [-1, 1]")
        if sign not in (1, -1):
            raise ValueError("sign must be 1 or -1")
        if modulus <= 0:
            raise ValueError("modulus must be positive")
        branch = None if delta != 0 else Branch.PLUS
        return cls(modulus * complex(sign * math.sqrt(1.0 - delta ** 2), delta), branch=branch, epsilon=epsilon)
    # ------------------------------------------------------------------------------------------------------------------

    @classmethod
    def boundary(cls,
                 lam: float,
                 branch: Union[Branch, str, int] = Branch.PLUS) -> 'SpectralParameter':
        """
        boundary(lam, branch)

            Limiting absorption parameter λ² ± i0
        """
        if lam <= 0:
            raise ValueError("lambda must be positive")
        if not isinstance(branch, Branch):
            branch = Branch.from_sign(branch)
        return cls(complex(lam ** 2, 0.0), branch=branch)
    # ------------------------------------------------------------------------------------------------------------------

    @property
    def modulus(self) -> float:
        return abs(self.sigma)
    # ------------------------------------------------------------------------------------------------------------------

    @property
    def unit(self) -> complex:
        return self.sigma / self.modulus
    # ------------------------------------------------------------------------------------------------------------------

    @property
    def delta(self) -> float:
        return self.unit.imag
    # ------------------------------------------------------------------------------------------------------------------

    @property
    def sign(self) -> int:
        return 1 if self.unit.real >= 0 else -1
    # ------------------------------------------------------------------------------------------------------------------

    @property
    def regime(self) -> Regime:
        if self.sign < 0:
            return Regime.NEGATIVE
        delta = abs(self.delta)
        # σ built from δ = ε may carry |δ| = ε ± ulp
        if delta < self.epsilon and not math.isclose(delta, self.epsilon, rel_tol=1e-12):
            return Regime.BOUNDARY
        return Regime.POSITIVE
    # ------------------------------------------------------------------------------------------------------------------

    @property
    def boundary_branch(self) -> Branch:
        if self.branch is not None:
            return self.branch
        return Branch.PLUS if self.sigma.imag > 0 else Branch.MINUS
    # ------------------------------------------------------------------------------------------------------------------

    @property
    def boundary_lambda(self) -> float:
        """Normalized λ_b = √(Re σ/|σ|) of the boundary approximation."""
        return math.sqrt(max(self.unit.real, 0.0))
    # ------------------------------------------------------------------------------------------------------------------

    def wavenumber(self) -> complex:
        """k = √σ with Im k > 0; on (0, ∞) the limit from the side given by the branch."""
        if self.sigma.imag == 0.0 and self.sigma.real > 0:
            return self.boundary_branch * math.sqrt(self.sigma.real) + 0j
        k = np.sqrt(self.sigma)
        return complex(-k if k.imag < 0 else k)
    # ------------------------------------------------------------------------------------------------------------------

    def normalized(self) -> 'SpectralParameter':
        return SpectralParameter(self.unit, branch=self.branch, epsilon=self.epsilon)
    # ------------------------------------------------------------------------------------------------------------------

    def reconstruct(self) -> complex:
        """σ recomputed from the decomposition modulus·(sign·√(1 − δ²) + iδ)."""
        return self.modulus * complex(self.sign * math.sqrt(max(1.0 - self.delta ** 2, 0.0)), self.delta)
    # ------------------------------------------------------------------------------------------------------------------

    def to_dict(self):
        return {"re": self.sigma.real, "im": self.sigma.imag, "delta": self.delta,
                "regime": self.regime.label, "branch": None if self.branch is None else int(self.branch)}
# ----------------------------------------------------------------------------------------------------------------------
