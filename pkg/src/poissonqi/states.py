"""Density operators, intensity operators and their finite-M / Fock forms."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import DimensionMismatch, NegativeN, NotNormalized
from .psd import PSDMatrix, validate_psd

TOL_TRACE = 1e-10
DEFAULT_TAIL_BOUND = 1e-12


@dataclass(frozen=True, eq=False)
class DensityOperator:
    psd: PSDMatrix

    def __post_init__(self):
        tr = self.psd.trace
        if abs(tr - 1.0) > TOL_TRACE:
            raise NotNormalized(f"density operator has trace {tr!r}, not 1")

    @classmethod
    def from_array(cls, a) -> "DensityOperator":
        return cls(validate_psd(a))

    @property
    def matrix(self) -> np.ndarray:
        return self.psd.matrix

    @property
    def dim(self) -> int:
        return self.psd.dim


@dataclass(frozen=True, eq=False)
class IntensityOperator:
    """Unnormalized PSD operator whose trace is the expected object count."""

    psd: PSDMatrix

    @classmethod
    def from_array(cls, a) -> "IntensityOperator":
        return cls(validate_psd(a))

    @property
    def matrix(self) -> np.ndarray:
        return self.psd.matrix

    @property
    def dim(self) -> int:
        return self.psd.dim

    @property
    def N(self) -> float:
        return max(self.psd.trace, 0.0)

    def normalized(self) -> DensityOperator:
        """The one-object density operator ``Gamma / N`` (requires N > 0)."""
        if self.N <= 0:
            raise NegativeN("cannot normalize a zero intensity operator")
        return DensityOperator.from_array(self.matrix / self.N)


def as_intensity(G) -> IntensityOperator:
    if isinstance(G, IntensityOperator):
        return G
    if isinstance(G, DensityOperator):
        return IntensityOperator(G.psd)
    return IntensityOperator(validate_psd(G))


def as_density(t) -> DensityOperator:
    if isinstance(t, DensityOperator):
        return t
    return DensityOperator.from_array(t.matrix if hasattr(t, "matrix") else t)


def intensity_from_density(tau1, N: float) -> IntensityOperator:
    """``Gamma = N * tau1``."""
    if N < 0:
        raise NegativeN(f"expected object number must be >= 0, got {N}")
    tau1 = as_density(tau1)
    return IntensityOperator(validate_psd(N * tau1.matrix))


@dataclass(frozen=True, eq=False)
class RareStateSpec:
    """Per-mode rare state: vacuum with probability ``1 - epsilon``,
    one object in state ``tau1`` with probability ``epsilon``, repeated
    over ``M`` temporal modes."""

    epsilon: float
    tau1: DensityOperator
    M: int

    def __post_init__(self):
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError(f"epsilon must lie in [0, 1], got {self.epsilon}")
        if self.M < 1:
            raise ValueError(f"M must be a positive integer, got {self.M}")

    @classmethod
    def from_intensity(cls, G, M: int) -> "RareStateSpec":
        """Rare state with ``epsilon = N / M`` whose Poisson limit is ``G``."""
        G = as_intensity(G)
        N = G.N
        if N > 0:
            tau1 = G.normalized()
        else:
            e0 = np.zeros((G.dim, G.dim))
            e0[0, 0] = 1.0
            tau1 = DensityOperator.from_array(e0)
        return cls(N / M, tau1, M)

    @property
    def N(self) -> float:
        return self.M * self.epsilon

    @property
    def object_dim(self) -> int:
        return self.tau1.dim


def single_mode_matrix(spec: RareStateSpec) -> DensityOperator:
    """The ``(d+1) x (d+1)`` matrix ``(1-eps) tau0 (+) eps tau1``.

    The vacuum occupies index 0.
    """
    d = spec.object_dim
    dtype = complex if np.iscomplexobj(spec.tau1.matrix) else float
    tau = np.zeros((d + 1, d + 1), dtype=dtype)
    tau[0, 0] = 1.0 - spec.epsilon
    tau[1:, 1:] = spec.epsilon * spec.tau1.matrix
    return DensityOperator.from_array(tau)


@dataclass(frozen=True, eq=False)
class FockRepresentation:
    """Truncated ``exp(-N) (+)_l Gamma^{(x) l} / l!``.

    Only the Poisson weights and ``Gamma`` are stored; tensor powers are
    never materialized.
    """

    N: float
    gamma: IntensityOperator
    l_max: int
    weights: np.ndarray

    @property
    def tail_mass(self) -> float:
        return float(stats.poisson.sf(self.l_max, self.N)) if self.N > 0 else 0.0


def poisson_weights(N: float, l_max: int) -> np.ndarray:
    l = np.arange(l_max + 1)
    if N == 0:
        w = np.zeros(l_max + 1)
        w[0] = 1.0
        return w
    return np.exp(-N + l * math.log(N) - np.array([math.lgamma(k + 1) for k in l]))


def fock_truncate(gamma, tail_bound: float = DEFAULT_TAIL_BOUND) -> FockRepresentation:
    """Smallest ``l_max`` whose Poisson(N) tail mass is <= ``tail_bound``."""
    if not 0.0 < tail_bound < 1.0:
        raise ValueError(f"tail_bound must lie in (0, 1), got {tail_bound}")
    gamma = as_intensity(gamma)
    N = gamma.N
    l_max = 0
    if N > 0:
        # sf(l) = P(L > l)
        while stats.poisson.sf(l_max, N) > tail_bound:
            l_max += 1
    w = poisson_weights(N, l_max)
    w.setflags(write=False)
    return FockRepresentation(N, gamma, l_max, w)


def _common_weights(a: FockRepresentation, b: FockRepresentation):
    if a.gamma.dim != b.gamma.dim:
        raise DimensionMismatch("Fock representations live on different spaces")
    l_max = max(a.l_max, b.l_max)
    return poisson_weights(a.N, l_max), poisson_weights(b.N, l_max), l_max


def fock_fidelity(a: FockRepresentation, b: FockRepresentation) -> float:
    """Block-wise fidelity of two truncated Fock representations.

    Uses ``F(tau1^{(x)l}, tau1'^{(x)l}) = F(tau1, tau1')**l``.
    """
    from .divergences import fidelity

    wa, wb, l_max = _common_weights(a, b)
    if a.N > 0 and b.N > 0:
        f1 = fidelity(a.gamma, b.gamma) / math.sqrt(a.N * b.N)
    else:
        f1 = 0.0
    l = np.arange(l_max + 1)
    return float(np.sum(np.sqrt(wa * wb) * f1 ** l))


def fock_chernoff(a: FockRepresentation, b: FockRepresentation, s: float) -> float:
    """Block-wise ``tr rho^s rho'^{1-s}`` of two truncated representations."""
    from .divergences import chernoff_quantity

    wa, wb, l_max = _common_weights(a, b)
    if a.N > 0 and b.N > 0:
        c1 = chernoff_quantity(a.gamma, b.gamma, s) / (a.N ** s * b.N ** (1 - s))
    else:
        c1 = 0.0
    l = np.arange(l_max + 1)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where((wa > 0) & (wb > 0), wa ** s * wb ** (1 - s) * c1 ** l, 0.0)
    return float(np.sum(terms))


def fock_relative_entropy(a: FockRepresentation, b: FockRepresentation) -> float:
    """Block-wise relative entropy; ``D`` is additive over tensor powers."""
    from .divergences import relative_entropy

    wa, wb, l_max = _common_weights(a, b)
    if a.N == 0:
        d1 = 0.0
    elif b.N == 0:
        return math.inf
    else:
        d1 = relative_entropy(a.gamma.normalized(), b.gamma.normalized())
        if math.isinf(d1):
            return math.inf
    l = np.arange(l_max + 1)
    m = wa > 0
    if np.any(wb[m] == 0):
        return math.inf
    return float(np.sum(wa[m] * (np.log(wa[m]) - np.log(wb[m]) + l[m] * d1)))
