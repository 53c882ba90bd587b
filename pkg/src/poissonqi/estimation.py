"""Symmetric logarithmic derivatives, Helstrom and Poisson Fisher information.

Two routes to the SLD of an intensity operator are provided:

* :func:`sld` works in an orthonormal basis and solves the Jordan-product
  equation element-wise in the eigenbasis of ``Gamma``;
* :func:`sld_gram` works with coefficient matrices in a nonorthogonal basis
  with Gram matrix ``G`` and solves a dense Lyapunov equation.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
import scipy.linalg

from .errors import (DerivativeOutsideSupport, DimensionMismatch,
                     SingularLyapunov, ZeroIntensityWithDerivative)
from .psd import TOL_SUPP, check_hermitian, validate_psd
from .states import as_intensity

FD_STEP = 1e-5
DELTA_REG = 1e-13
TOL_DERIV = 1e-8
TOL_LYAP_RESIDUAL = 1e-8
TOL_K_NEG = 1e-8


@dataclass(frozen=True, eq=False)
class ParamFamily:
    """``theta -> Gamma(theta)`` with optional analytic derivatives.

    ``dgamma_of(theta)`` returns the list ``[dGamma/dtheta_mu for mu]``.
    """

    gamma_of: Callable[[np.ndarray], np.ndarray]
    dgamma_of: Optional[Callable[[np.ndarray], Sequence[np.ndarray]]] = None


@dataclass(frozen=True, eq=False)
class HelstromMatrix:
    K: np.ndarray

    @property
    def q(self) -> int:
        return self.K.shape[0]

    def scalar(self) -> float:
        if self.K.shape != (1, 1):
            raise ValueError("Helstrom matrix is not 1x1")
        return float(self.K[0, 0])


@dataclass(frozen=True, eq=False)
class GramBasisProblem:
    """Coefficients of ``Gamma`` and ``dGamma`` in a nonorthogonal basis.

    ``reg_indices`` selects the diagonal entries of ``Gamma_t`` that receive
    ``delta_reg``; by default these are the basis vectors on which
    ``Gamma_t`` vanishes identically (the derivative vectors).
    """

    G: np.ndarray
    Gamma_t: np.ndarray
    Delta_t: np.ndarray
    delta_reg: float = DELTA_REG
    reg_indices: Optional[Sequence[int]] = field(default=None)

    def __post_init__(self):
        if self.delta_reg <= 0:
            raise ValueError("delta_reg must be positive")
        shapes = {np.shape(self.G), np.shape(self.Gamma_t), np.shape(self.Delta_t)}
        if len(shapes) != 1:
            raise DimensionMismatch(f"Gram problem matrices have shapes {shapes}")
        validate_psd(self.G)
        check_hermitian(self.Gamma_t)
        check_hermitian(self.Delta_t)

    def regularization_indices(self) -> list[int]:
        if self.reg_indices is not None:
            return list(self.reg_indices)
        Gt = np.asarray(self.Gamma_t)
        return [j for j in range(Gt.shape[0])
                if not np.any(Gt[j]) and not np.any(Gt[:, j])]


def sld(G, dG, tol_supp: float = TOL_SUPP, tol_deriv: float = TOL_DERIV) -> np.ndarray:
    """Hermitian ``S`` with ``(S G + G S) / 2 = dG`` on the support of ``G``.

    In the eigenbasis of ``G``, ``S_jk = 2 dG_jk / (l_j + l_k)``; entries with
    ``l_j + l_k <= tol_supp * l_max`` are set to zero, which requires ``dG``
    to vanish there.
    """
    G = as_intensity(G)
    dG = check_hermitian(dG)
    if dG.shape != G.matrix.shape:
        raise DimensionMismatch(f"dGamma has shape {dG.shape}, Gamma {G.matrix.shape}")
    w, V = G.psd.eigenvalues, G.psd.eigenvectors
    D = V.conj().T @ dG @ V
    den = w[:, None] + w[None, :]
    keep = den > tol_supp * max(G.psd.lambda_max, 0.0)
    if not keep.all():
        scale = max(float(np.max(np.abs(dG))), 1.0)
        outside = float(np.max(np.abs(D[~keep])))
        if outside > tol_deriv * scale:
            raise DerivativeOutsideSupport(
                f"derivative has weight {outside:.3e} outside the support of Gamma")
    S = np.where(keep, 2.0 * D / np.where(keep, den, 1.0), 0.0)
    S = V @ S @ V.conj().T
    return (S + S.conj().T) / 2


def _symmetrize_K(K: np.ndarray) -> np.ndarray:
    K = np.real((K + K.conj().T) / 2)
    w, V = np.linalg.eigh(K)
    lmax = max(float(np.max(np.abs(w))), 0.0) if w.size else 0.0
    if w.size and w[0] < 0 and w[0] >= -TOL_K_NEG * lmax:
        K = (V * np.clip(w, 0.0, None)) @ V.T
    return K


def helstrom_from_derivatives(G, dGs: Sequence[np.ndarray],
                              tol_supp: float = TOL_SUPP) -> HelstromMatrix:
    """``K_{mu nu} = Re tr[(S_mu S_nu + S_nu S_mu) / 2 Gamma]``."""
    G = as_intensity(G)
    S = [sld(G, d, tol_supp) for d in dGs]
    q = len(S)
    K = np.zeros((q, q))
    for mu in range(q):
        for nu in range(mu, q):
            jordan = (S[mu] @ S[nu] + S[nu] @ S[mu]) / 2
            K[mu, nu] = K[nu, mu] = float(np.real(np.sum(jordan * G.matrix.T)))
    return HelstromMatrix(_symmetrize_K(K))


def finite_difference_derivatives(gamma_of, theta, fd_step: float = FD_STEP) -> list[np.ndarray]:
    """Central differences with step ``fd_step * (|theta_mu| + 1)``."""
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    out = []
    for mu in range(theta.size):
        h = fd_step * (abs(theta[mu]) + 1.0)
        e = np.zeros_like(theta)
        e[mu] = h
        plus = np.asarray(gamma_of(theta + e))
        minus = np.asarray(gamma_of(theta - e))
        d = (plus - minus) / (2 * h)
        out.append((d + d.conj().T) / 2)
    return out


def family_derivatives(family: ParamFamily, theta, fd_step: float = FD_STEP) -> list[np.ndarray]:
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    if family.dgamma_of is not None:
        return [check_hermitian(d) for d in family.dgamma_of(theta)]
    return finite_difference_derivatives(family.gamma_of, theta, fd_step)


def helstrom(family: ParamFamily, theta, fd_step: float = FD_STEP,
             tol_supp: float = TOL_SUPP) -> HelstromMatrix:
    """Helstrom information matrix of an intensity-operator family at ``theta``."""
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    G = as_intensity(family.gamma_of(theta))
    return helstrom_from_derivatives(G, family_derivatives(family, theta, fd_step), tol_supp)


def sld_gram(problem: GramBasisProblem,
             tol_residual: float = TOL_LYAP_RESIDUAL) -> tuple[np.ndarray, float]:
    """Solve ``2 Delta_t = S_t G Gamma_t + Gamma_t G S_t`` and return ``(S_t, K)``.

    ``K = tr(G S_t G Delta_t)``. ``delta_reg`` is added to the selected
    diagonal entries of ``Gamma_t`` first. The dense solve may perturb
    near-resonant eigenvalue pairs of ``Gamma_t G``; the solution is accepted
    as long as it satisfies the regularized equation to ``tol_residual``
    (relative), otherwise :class:`SingularLyapunov` is raised.
    """
    G = np.asarray(problem.G)
    Gt = np.array(problem.Gamma_t, dtype=complex if np.iscomplexobj(problem.Gamma_t) else float)
    Dt = np.asarray(problem.Delta_t)
    for j in problem.regularization_indices():
        Gt[j, j] += problem.delta_reg
    if not np.any(Dt):
        return np.zeros_like(Gt), 0.0
    A = Gt @ G
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        try:
            S = scipy.linalg.solve_continuous_lyapunov(A, 2.0 * Dt)
        except (np.linalg.LinAlgError, ValueError) as exc:
            raise SingularLyapunov(str(exc)) from exc
    if not np.all(np.isfinite(S)):
        raise SingularLyapunov("Lyapunov solution is not finite")
    S = (S + S.conj().T) / 2
    resid = A @ S + S @ A.conj().T - 2.0 * Dt
    scale = np.linalg.norm(2.0 * Dt) + np.linalg.norm(A) * np.linalg.norm(S)
    if np.linalg.norm(resid) > tol_residual * scale:
        raise SingularLyapunov(
            "Lyapunov equation has no solution even after regularization "
            f"(relative residual {np.linalg.norm(resid) / scale:.3e})")
    K = np.trace(G @ S @ G @ Dt)
    return S, float(np.real(K))


def fisher_poisson(L, dL) -> np.ndarray:
    """``J_{mu nu} = sum_j dL_{j mu} dL_{j nu} / L_j`` for Poisson counts."""
    L = np.asarray(L, dtype=float).ravel()
    dL = np.asarray(dL, dtype=float)
    if dL.ndim == 1:
        dL = dL[:, None]
    if dL.shape[0] != L.size:
        raise DimensionMismatch(f"dLambda has {dL.shape[0]} rows for {L.size} intensities")
    zero = L <= 0
    if np.any(np.abs(dL[zero]) > 0):
        raise ZeroIntensityWithDerivative(
            "an outcome with zero intensity has a nonzero derivative")
    keep = ~zero
    W = dL[keep] / np.sqrt(L[keep])[:, None]
    return W.T @ W
