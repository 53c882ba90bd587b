"""Divergences between intensity operators and between intensity vectors.

Quantum quantities take anything :func:`~poissonqi.states.as_intensity`
accepts (an :class:`IntensityOperator`, a :class:`PSDMatrix` or a plain
array). Classical quantities take nonnegative 1-D arrays.

Relative entropies that are infinite because of a support violation are
returned as ``math.inf``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import DimensionMismatch, LengthMismatch, NegativeIntensity, SOutOfRange
from .psd import TOL_PSD, TOL_SUPP, logm_on_support, power_on_support
from .states import IntensityOperator, as_intensity

TOL_S = 1e-9
GRID_POINTS = 101

KINDS = ("fidelity", "bures_sq", "chernoff_s", "chernoff_distance",
         "alpha_div", "rel_entropy")


@dataclass(frozen=True)
class DivergenceReport:
    kind: str
    value: float
    s_star: Optional[float] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown divergence kind {self.kind!r}")
        if (self.s_star is not None) != (self.kind == "chernoff_distance"):
            raise ValueError("s_star is reported only for chernoff_distance")


def _pair(G, G2) -> tuple[IntensityOperator, IntensityOperator]:
    a, b = as_intensity(G), as_intensity(G2)
    if a.dim != b.dim:
        raise DimensionMismatch(f"operators have dimensions {a.dim} and {b.dim}")
    return a, b


def _check_s(s: float, open_interval: bool = False):
    if open_interval:
        if not 0.0 < s < 1.0:
            raise SOutOfRange(f"s must lie in (0, 1), got {s}")
    elif not 0.0 <= s <= 1.0:
        raise SOutOfRange(f"s must lie in [0, 1], got {s}")


# --- quantum -----------------------------------------------------------------

def fidelity(G, G2) -> float:
    """``tr sqrt(sqrt(G) G2 sqrt(G))`` for unnormalized PSD operators.

    Evaluated as the sum of singular values of ``sqrt(G) sqrt(G2)``; these are
    the square roots of the spectrum of ``G G2``. The square roots are taken
    on the supports so that rounding noise in a null space (``sqrt(1e-17)``
    is ``3e-9``) does not leak into the result.
    """
    a, b = _pair(G, G2)
    sv = np.linalg.svd(power_on_support(a.psd, 0.5) @ power_on_support(b.psd, 0.5),
                       compute_uv=False)
    return float(np.sum(sv))


def fidelity_product_spectrum(G, G2) -> float:
    """Fidelity from the eigenvalues of the non-Hermitian product ``G G2``."""
    a, b = _pair(G, G2)
    ev = np.linalg.eigvals(a.matrix @ b.matrix).real
    return float(np.sum(np.sqrt(np.clip(ev, 0.0, None))))


def fidelity_nested(G, G2) -> float:
    """Fidelity by the textbook nested square roots."""
    a, b = _pair(G, G2)
    r = power_on_support(a.psd, 0.5)
    inner = r @ b.matrix @ r
    w = np.linalg.eigvalsh((inner + inner.conj().T) / 2)
    return float(np.sum(np.sqrt(np.clip(w, 0.0, None))))


def bures_sq(G, G2) -> float:
    """Squared Bures-Wasserstein distance ``N + N' - 2 F(G, G2)``."""
    a, b = _pair(G, G2)
    return max(a.N + b.N - 2.0 * fidelity(a, b), 0.0)


def poisson_state_fidelity(G, G2) -> float:
    """Uhlmann fidelity of the two Poisson states, ``exp(-d_B^2 / 2)``."""
    return math.exp(-bures_sq(G, G2) / 2.0)


def chernoff_quantity(G, G2, s: float, tol_supp: float = TOL_SUPP) -> float:
    """``tr G^s G2^(1-s)`` with powers taken on the supports.

    At ``s = 0`` (``s = 1``) the zeroth power is the support projector of
    ``G`` (``G2``).
    """
    _check_s(s)
    a, b = _pair(G, G2)
    A = power_on_support(a.psd, s, tol_supp)
    B = power_on_support(b.psd, 1.0 - s, tol_supp)
    return max(float(np.real(np.sum(A * B.T))), 0.0)


def poisson_state_chernoff(G, G2, s: float) -> float:
    """``tr rho^s rho'^(1-s)`` of the two Poisson states."""
    a, b = _pair(G, G2)
    return math.exp(-s * a.N - (1 - s) * b.N + chernoff_quantity(a, b, s))


def maximize_on_unit_interval(f: Callable[[float], float], tol_s: float = TOL_S,
                              grid_points: int = GRID_POINTS) -> tuple[float, float]:
    """Maximize ``f`` on ``[0, 1]``: grid prescan, then golden section.

    Concavity is not assumed; the golden-section refinement is confined to
    the two grid cells around the best grid point. Returns ``(value, s)``.
    """
    grid = np.linspace(0.0, 1.0, grid_points)
    vals = np.array([f(s) for s in grid])
    i = int(np.argmax(vals))
    best_s, best_v = float(grid[i]), float(vals[i])
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, grid_points - 1)]
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = hi - invphi * (hi - lo)
    d = lo + invphi * (hi - lo)
    fc, fd = f(c), f(d)
    while hi - lo > tol_s:
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - invphi * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + invphi * (hi - lo)
            fd = f(d)
    s_mid = (lo + hi) / 2.0
    for s, v in ((c, fc), (d, fd), (s_mid, f(s_mid))):
        if v > best_v:
            best_s, best_v = float(s), float(v)
    return best_v, best_s


def chernoff_distance(G, G2, tol_s: float = TOL_S) -> DivergenceReport:
    """``sup_s [s N + (1-s) N' - C_s(G, G2)]`` with its maximizer."""
    a, b = _pair(G, G2)
    value, s_star = maximize_on_unit_interval(
        lambda s: s * a.N + (1 - s) * b.N - chernoff_quantity(a, b, s), tol_s)
    return DivergenceReport("chernoff_distance", max(value, 0.0), s_star)


def alpha_divergence(G, G2, s: float) -> float:
    """``[s N + (1-s) N' - C_s] / (s (1-s))`` for ``0 < s < 1``."""
    _check_s(s, open_interval=True)
    a, b = _pair(G, G2)
    val = (s * a.N + (1 - s) * b.N - chernoff_quantity(a, b, s)) / (s * (1 - s))
    return max(val, 0.0)


def support_contained(G, G2, tol_supp: float = TOL_SUPP,
                      tol_psd: float = TOL_PSD) -> bool:
    """Whether ``supp G`` lies inside ``supp G2`` (spectral supports)."""
    a, b = _pair(G, G2)
    if a.N == 0:
        return True
    kernel = b.psd.eigenvectors[:, ~b.psd.support_mask(tol_supp)]
    if kernel.shape[1] == 0:
        return True
    leak = float(np.real(np.trace(kernel.conj().T @ a.matrix @ kernel)))
    return leak <= tol_psd * a.psd.lambda_max


def relative_entropy(G, G2, tol_supp: float = TOL_SUPP) -> float:
    """``N' - N + tr G (ln G - ln G2)``; ``inf`` if ``supp G`` is not in ``supp G2``."""
    a, b = _pair(G, G2)
    if not support_contained(a, b, tol_supp):
        return math.inf
    la = logm_on_support(a.psd, tol_supp)
    lb = logm_on_support(b.psd, tol_supp)
    val = b.N - a.N + float(np.real(np.sum(a.matrix * (la - lb).T)))
    return max(val, 0.0)


# --- classical ---------------------------------------------------------------

def intensity_vector(values) -> np.ndarray:
    """Validate and return a 1-D array of nonnegative intensities."""
    v = np.atleast_1d(np.asarray(values, dtype=float))
    if v.ndim != 1:
        raise ValueError("an intensity vector must be one-dimensional")
    if np.any(v < 0) or not np.all(np.isfinite(v)):
        raise NegativeIntensity("intensities must be finite and nonnegative")
    return v


def _vec_pair(L, L2):
    a, b = intensity_vector(L), intensity_vector(L2)
    if a.shape != b.shape:
        raise LengthMismatch(f"intensity vectors have lengths {a.size} and {b.size}")
    return a, b


def classical_chernoff_quantity(L, L2, s: float) -> float:
    """``sum_j L_j^s L2_j^(1-s)``, with ``0^0`` read as 0 off the support."""
    _check_s(s)
    a, b = _vec_pair(L, L2)
    m = (a > 0) & (b > 0)
    return float(np.sum(a[m] ** s * b[m] ** (1 - s)))


def classical_fidelity(L, L2) -> float:
    return classical_chernoff_quantity(L, L2, 0.5)


def classical_bures_sq(L, L2) -> float:
    a, b = _vec_pair(L, L2)
    return max(a.sum() + b.sum() - 2.0 * classical_fidelity(a, b), 0.0)


def classical_chernoff_distance(L, L2, tol_s: float = TOL_S) -> DivergenceReport:
    a, b = _vec_pair(L, L2)
    N, N2 = a.sum(), b.sum()
    value, s_star = maximize_on_unit_interval(
        lambda s: s * N + (1 - s) * N2 - classical_chernoff_quantity(a, b, s), tol_s)
    return DivergenceReport("chernoff_distance", max(value, 0.0), s_star)


def classical_alpha_divergence(L, L2, s: float) -> float:
    _check_s(s, open_interval=True)
    a, b = _vec_pair(L, L2)
    val = (s * a.sum() + (1 - s) * b.sum() - classical_chernoff_quantity(a, b, s)) / (s * (1 - s))
    return max(val, 0.0)


def classical_relative_entropy(L, L2) -> float:
    """``N' - N + sum_j L_j ln(L_j / L2_j)`` with ``0 ln 0 = 0``."""
    a, b = _vec_pair(L, L2)
    if np.any((a > 0) & (b == 0)):
        return math.inf
    m = a > 0
    val = b.sum() - a.sum() + float(np.sum(a[m] * np.log(a[m] / b[m])))
    return max(val, 0.0)


_ALIASES = {
    "fidelity": "fidelity",
    "bures": "bures_sq",
    "bures_sq": "bures_sq",
    "chernoff": "chernoff_s",
    "chernoff_s": "chernoff_s",
    "chernoff-distance": "chernoff_distance",
    "chernoff_distance": "chernoff_distance",
    "alpha": "alpha_div",
    "alpha_div": "alpha_div",
    "kl": "rel_entropy",
    "rel_entropy": "rel_entropy",
}


def canonical_kind(kind: str) -> str:
    try:
        return _ALIASES[kind]
    except KeyError:
        raise ValueError(f"unknown divergence kind {kind!r}") from None


def classical_divergences(L, L2, kind: str, s: Optional[float] = None) -> float:
    """Dispatch over the classical divergences by ``kind``."""
    kind = canonical_kind(kind)
    if kind == "fidelity":
        return classical_fidelity(L, L2)
    if kind == "bures_sq":
        return classical_bures_sq(L, L2)
    if kind == "chernoff_s":
        return classical_chernoff_quantity(L, L2, 0.5 if s is None else s)
    if kind == "chernoff_distance":
        return classical_chernoff_distance(L, L2).value
    if kind == "alpha_div":
        return classical_alpha_divergence(L, L2, 0.5 if s is None else s)
    return classical_relative_entropy(L, L2)


def divergence(kind: str, a, b, s: Optional[float] = None,
               classical: bool = False, tol_s: float = TOL_S,
               tol_supp: float = TOL_SUPP) -> DivergenceReport:
    """Compute one divergence and wrap it in a :class:`DivergenceReport`."""
    kind = canonical_kind(kind)
    if kind == "chernoff_distance":
        if classical:
            return classical_chernoff_distance(a, b, tol_s)
        return chernoff_distance(a, b, tol_s)
    if classical:
        return DivergenceReport(kind, classical_divergences(a, b, kind, s))
    if kind == "fidelity":
        value = fidelity(a, b)
    elif kind == "bures_sq":
        value = bures_sq(a, b)
    elif kind == "chernoff_s":
        value = chernoff_quantity(a, b, 0.5 if s is None else s, tol_supp)
    elif kind == "alpha_div":
        value = alpha_divergence(a, b, 0.5 if s is None else s)
    else:
        value = relative_entropy(a, b, tol_supp)
    return DivergenceReport(kind, value)
