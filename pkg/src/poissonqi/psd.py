"""Hermitian / positive-semidefinite validation and spectral matrix functions.

All tolerances are relative: Hermiticity to the largest entry, PSD and
support thresholds to the largest eigenvalue magnitude.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import FunctionUndefined, NegativeEigenvalue, NotHermitian

TOL_HERM = 1e-10
TOL_PSD = 1e-10
TOL_SUPP = 1e-12
TOL_RECON = 1e-10
_EIGH_ROUNDING = 8 * np.finfo(float).eps


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


def as_square_array(H) -> np.ndarray:
    """Return ``H`` as a 2-D square ndarray (float or complex)."""
    if isinstance(H, PSDMatrix):
        return H.matrix
    if hasattr(H, "psd"):
        return H.psd.matrix
    a = np.asarray(H)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.iscomplexobj(a):
        a = a.astype(float)
    return a


def check_hermitian(H, tol_herm: float = TOL_HERM) -> np.ndarray:
    """Validate Hermiticity and return the exactly symmetrized matrix."""
    a = as_square_array(H)
    scale = np.max(np.abs(a)) if a.size else 0.0
    err = np.max(np.abs(a - a.conj().T)) if a.size else 0.0
    if err > tol_herm * scale:
        raise NotHermitian(
            f"matrix is not Hermitian: max |H - H^dagger| = {err:.3e} "
            f"exceeds {tol_herm:g} x {scale:.3e}")
    return (a + a.conj().T) / 2


@dataclass(frozen=True)
class SpectralDecomposition:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        V = self.eigenvectors
        return (V * self.eigenvalues) @ V.conj().T


@dataclass(frozen=True, eq=False)
class PSDMatrix:
    """A validated PSD matrix together with its (clipped) spectrum."""

    matrix: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.matrix)))

    @property
    def lambda_max(self) -> float:
        return float(self.eigenvalues[-1]) if self.dim else 0.0

    def support_mask(self, tol_supp: float = TOL_SUPP) -> np.ndarray:
        lmax = self.lambda_max
        if lmax <= 0:
            return np.zeros(self.dim, dtype=bool)
        return self.eigenvalues > tol_supp * lmax

    def support_projector(self, tol_supp: float = TOL_SUPP) -> np.ndarray:
        V = self.eigenvectors[:, self.support_mask(tol_supp)]
        return V @ V.conj().T

    def rank(self, tol_supp: float = TOL_SUPP) -> int:
        return int(np.count_nonzero(self.support_mask(tol_supp)))


def spectral_decompose(H, tol_herm: float = TOL_HERM) -> SpectralDecomposition:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending."""
    a = check_hermitian(H, tol_herm)
    w, V = np.linalg.eigh(a)
    return SpectralDecomposition(_frozen(w), _frozen(V))


def validate_psd(H, tol_psd: float = TOL_PSD,
                 tol_herm: float = TOL_HERM) -> PSDMatrix:
    """Check that ``H`` is Hermitian PSD and return it as a :class:`PSDMatrix`.

    Eigenvalues in ``[-tol_psd * lambda_max, 0)`` are rounding noise and are
    clipped to zero. The matrix is rebuilt from the clipped spectrum unless
    the negativity is at the level of the eigensolver's own rounding, in
    which case the input entries are kept so exact inputs stay exact.
    Anything more negative raises :class:`NegativeEigenvalue`.
    """
    if isinstance(H, PSDMatrix):
        return H
    a = check_hermitian(H, tol_herm)
    w, V = np.linalg.eigh(a)
    scale = float(np.max(np.abs(w))) if w.size else 0.0
    if w.size and w[0] < -tol_psd * scale:
        raise NegativeEigenvalue(
            f"eigenvalue {w[0]:.6g} is below -{tol_psd:g} x {scale:.6g}")
    if w.size and w[0] < 0:
        if w[0] < -_EIGH_ROUNDING * w.size * scale:
            b = (V * np.clip(w, 0.0, None)) @ V.conj().T
            a = (b + b.conj().T) / 2
        w = np.clip(w, 0.0, None)
    return PSDMatrix(_frozen(a), _frozen(w), _frozen(V))


def apply_spectral_function(P, f: Callable[[np.ndarray], np.ndarray],
                            on_support_only: bool = False,
                            tol_supp: float = TOL_SUPP) -> np.ndarray:
    """Return ``V diag(f(lambda)) V^dagger`` for a PSD matrix.

    With ``on_support_only`` the function is evaluated only on eigenvalues
    above ``tol_supp * lambda_max``; the remaining eigenvalues map to 0.
    Otherwise ``f`` must be finite on the whole (clipped) spectrum.
    """
    P = validate_psd(P)
    w, V = P.eigenvalues, P.eigenvectors
    if on_support_only:
        mask = P.support_mask(tol_supp)
        fw = np.zeros_like(w)
        if mask.any():
            fw[mask] = f(w[mask])
    else:
        with np.errstate(all="ignore"):
            fw = np.asarray(f(w), dtype=float)
        if not np.all(np.isfinite(fw)):
            raise FunctionUndefined(
                "function is not finite on the spectrum; pass "
                "on_support_only=True to restrict it to the support")
    out = (V * fw) @ V.conj().T
    return (out + out.conj().T) / 2


def sqrtm_psd(P) -> np.ndarray:
    return apply_spectral_function(P, np.sqrt)


def power_on_support(P, p: float, tol_supp: float = TOL_SUPP) -> np.ndarray:
    """``P**p`` with the power taken on the support only.

    ``p = 0`` gives the support projector, which is the convention used for
    the endpoints of the Chernoff family.
    """
    return apply_spectral_function(P, lambda x: x ** p, on_support_only=True,
                                   tol_supp=tol_supp)


def logm_on_support(P, tol_supp: float = TOL_SUPP) -> np.ndarray:
    return apply_spectral_function(P, np.log, on_support_only=True,
                                   tol_supp=tol_supp)
