"""Two partially coherent point sources imaged through a Gaussian PSF.

The intensity operator is

    Gamma = N0 (|psi1><psi1| + |psi2><psi2| + g |psi1><psi2| + g* |psi2><psi1|)

with ``psi1, psi2`` the PSF shifted to ``-theta/2`` and ``+theta/2``. The
Helstrom information for the separation ``theta`` is computed in the
nonorthogonal basis ``{psi1, psi2, d psi1/d theta, d psi2/d theta}`` with the
analytic Gram matrix, by a regularized Lyapunov solve. A truncated
Hermite-Gauss representation of the same family is provided as an
independent orthonormal-basis check.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .errors import DimensionMismatch
from .estimation import DELTA_REG, GramBasisProblem, ParamFamily, sld_gram

THETA_STEP = 0.05
THETA_COUNT = 160
GAMMA_STEP = 0.2
HG_MODES = 60


def default_theta_grid() -> np.ndarray:
    """0.05, 0.10, ..., 8.00."""
    return np.arange(1, THETA_COUNT + 1) * THETA_STEP


def default_gamma_grid() -> np.ndarray:
    """-1.0, -0.8, ..., 1.0."""
    return np.round(np.arange(-5, 6) * GAMMA_STEP, 12)


def psf(x):
    """Gaussian amplitude PSF ``(2 pi)^(-1/4) exp(-x^2 / 4)``."""
    return (2 * np.pi) ** -0.25 * np.exp(-np.asarray(x, dtype=float) ** 2 / 4)


def gram_matrix(theta: float) -> np.ndarray:
    """Analytic Gram matrix of ``{psi1, psi2, d psi1, d psi2}``."""
    e = math.exp(-theta ** 2 / 8)
    g14 = -theta / 8 * e
    g34 = (theta ** 2 - 4) / 64 * e
    return np.array([
        [1.0, e, 0.0, g14],
        [e, 1.0, g14, 0.0],
        [0.0, g14, 1 / 16, g34],
        [g14, 0.0, g34, 1 / 16],
    ])


def gamma_and_derivative(N0: float, gamma: complex) -> tuple[np.ndarray, np.ndarray]:
    """Coefficient matrices of ``Gamma`` and ``dGamma/dtheta`` in the 4-vector basis."""
    dtype = complex if np.iscomplexobj(gamma) and np.imag(gamma) != 0 else float
    g = gamma if dtype is complex else float(np.real(gamma))
    gc = np.conj(g)
    Gt = N0 * np.array([
        [1, g, 0, 0],
        [gc, 1, 0, 0],
        [0, 0, 0, 0],
        [0, 0, 0, 0],
    ], dtype=dtype)
    Dt = N0 * np.array([
        [0, 0, 1, g],
        [0, 0, gc, 1],
        [1, g, 0, 0],
        [gc, 1, 0, 0],
    ], dtype=dtype)
    return Gt, Dt


def expected_photon_number(N0: float, gamma: complex, theta: float) -> float:
    """``2 N0 [1 + Re(gamma <psi2|psi1>)]`` with ``<psi2|psi1> = exp(-theta^2/8)``."""
    return 2 * N0 * (1 + float(np.real(gamma)) * math.exp(-theta ** 2 / 8))


def helstrom_gram(N0: float, gamma: complex, theta: float,
                  delta_reg: float = DELTA_REG) -> float:
    """Helstrom information ``K(Gamma)`` for the separation (unnormalized)."""
    Gt, Dt = gamma_and_derivative(N0, gamma)
    _, K = sld_gram(GramBasisProblem(gram_matrix(theta), Gt, Dt, delta_reg, (2, 3)))
    return K


@dataclass(frozen=True, eq=False)
class ImagingConfig:
    N0: float = 1.0
    theta_grid: np.ndarray = field(default_factory=default_theta_grid)
    gamma_grid: Sequence[complex] = field(default_factory=default_gamma_grid)
    delta_reg: float = DELTA_REG

    def __post_init__(self):
        if self.N0 <= 0:
            raise ValueError("N0 must be positive for a normalized sweep")
        th = np.asarray(self.theta_grid, dtype=float)
        if th.size == 0 or np.any(th <= 0) or np.any(np.diff(th) <= 0):
            raise ValueError("theta grid must be positive and strictly ascending")
        if any(abs(g) > 1 + 1e-12 for g in self.gamma_grid):
            raise ValueError("degree of coherence must satisfy |gamma| <= 1")


@dataclass(frozen=True, eq=False)
class SweepResult:
    gammas: np.ndarray
    thetas: np.ndarray
    K_normalized: np.ndarray  # shape (len(gammas), len(thetas))

    def rows(self) -> Iterator[tuple[complex, float, float]]:
        """``(gamma, theta, K/(N0/2))``, gamma-major, theta-minor."""
        for i, g in enumerate(self.gammas):
            for j, t in enumerate(self.thetas):
                yield g, float(t), float(self.K_normalized[i, j])


def helstrom_sweep(cfg: ImagingConfig = ImagingConfig()) -> SweepResult:
    """``K(Gamma) / (N0/2)`` over the configured grid."""
    thetas = np.asarray(cfg.theta_grid, dtype=float)
    gammas = np.asarray(cfg.gamma_grid)
    K = np.empty((gammas.size, thetas.size))
    for i, g in enumerate(gammas):
        for j, t in enumerate(thetas):
            K[i, j] = helstrom_gram(cfg.N0, g, t, cfg.delta_reg) / (cfg.N0 / 2)
    return SweepResult(gammas, thetas, K)


# --- orthonormal Hermite-Gauss representation --------------------------------

def _shifted_coefficients(q: float, n_modes: int) -> tuple[np.ndarray, np.ndarray]:
    """HG coefficients ``e^{-q^2/2} q^n / sqrt(n!)`` and their q-derivatives."""
    c = np.empty(n_modes)
    c[0] = math.exp(-q * q / 2)
    for n in range(1, n_modes):
        c[n] = c[n - 1] * q / math.sqrt(n)
    dc = -q * c
    dc[1:] += np.sqrt(np.arange(1, n_modes)) * c[:-1]
    return c, dc


def intensity_family(N0: float, gamma: complex, n_modes: int = HG_MODES) -> ParamFamily:
    """``theta -> Gamma(theta)`` as an ``n_modes`` square matrix in the HG basis.

    A shift of the PSF by ``a`` has HG amplitudes with ``q = a / 2``; the
    sources sit at ``-theta/2`` and ``+theta/2``.
    """
    g = complex(gamma)

    def vectors(theta):
        t = float(np.atleast_1d(theta)[0])
        c1, dc1 = _shifted_coefficients(-t / 4, n_modes)
        c2, dc2 = _shifted_coefficients(t / 4, n_modes)
        return c1, c2, -dc1 / 4, dc2 / 4

    def build(a1, b1, a2, b2):
        out = (np.outer(a1, b1) + np.outer(a2, b2)
               + g * np.outer(a1, b2) + np.conj(g) * np.outer(a2, b1))
        return N0 * (out if g.imag else out.real)

    def gamma_of(theta):
        c1, c2, _, _ = vectors(theta)
        return build(c1, c1, c2, c2)

    def dgamma_of(theta):
        c1, c2, d1, d2 = vectors(theta)
        # d(|a><b|) = |da><b| + |a><db|; the coefficient vectors are real
        out = (np.outer(d1, c1) + np.outer(c1, d1) + np.outer(d2, c2) + np.outer(c2, d2)
               + g * (np.outer(d1, c2) + np.outer(c1, d2))
               + np.conj(g) * (np.outer(d2, c1) + np.outer(c2, d1)))
        return [N0 * (out if g.imag else out.real)]

    return ParamFamily(gamma_of, dgamma_of)


def direct_imaging_intensities(N0: float, gamma: complex, theta: float,
                               bin_width: float = 0.1,
                               half_width: float = 12.0) -> tuple[np.ndarray, np.ndarray]:
    """Binned direct-imaging intensities and their theta-derivatives.

    ``Lambda_j = bin_width * <x_j|Gamma|x_j>`` at the bin midpoints ``x_j`` of
    ``[-half_width, half_width]``.
    """
    n_bins = int(round(2 * half_width / bin_width))
    if not math.isclose(n_bins * bin_width, 2 * half_width):
        raise DimensionMismatch("bin width does not tile the imaging window")
    x = -half_width + bin_width * (np.arange(n_bins) + 0.5)
    p1, p2 = psf(x + theta / 2), psf(x - theta / 2)
    d1 = -(x + theta / 2) / 4 * p1      # d psi(x + theta/2) / d theta
    d2 = (x - theta / 2) / 4 * p2       # d psi(x - theta/2) / d theta
    rg = float(np.real(gamma))
    dens = p1 ** 2 + p2 ** 2 + 2 * rg * p1 * p2
    ddens = 2 * p1 * d1 + 2 * p2 * d2 + 2 * rg * (d1 * p2 + p1 * d2)
    lam = np.clip(N0 * bin_width * dens, 0.0, None)
    return lam, N0 * bin_width * ddens
