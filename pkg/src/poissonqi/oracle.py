"""Finite-M rare-state oracle.

Exact pre-limit quantities for ``rho_M = tau^{(x) M}`` computed from the
``(d+1)``-dimensional single-mode matrices, via

    F(rho_M, rho_M') = F(tau, tau')^M
    C_s(rho_M, rho_M') = C_s(tau, tau')^M
    D(rho_M || rho_M') = M D(tau || tau')
    K(rho_M) = M K(tau)

These converge to the closed forms of :mod:`poissonqi.divergences` and
:mod:`poissonqi.estimation` at rate ``1/M`` and are used to check them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from . import divergences as dv
from .errors import DimensionMismatch, ModeCountMismatch
from .estimation import (FD_STEP, ParamFamily, finite_difference_derivatives,
                         helstrom, helstrom_from_derivatives)
from .psd import logm_on_support
from .states import RareStateSpec, as_intensity, single_mode_matrix


def power_m(x: float, M: float) -> float:
    """``x**M`` as ``exp(M log1p(x - 1))``, stable for ``x`` near 1 and large M."""
    if x <= 0:
        return 0.0
    return math.exp(M * math.log1p(x - 1.0))


@dataclass(frozen=True)
class FiniteMQuantities:
    F_M: float
    C_sM: float
    D_M: float
    note: str = ""


def _check_pair(a: RareStateSpec, b: RareStateSpec):
    if a.M != b.M:
        raise ModeCountMismatch(f"mode counts differ: {a.M} vs {b.M}")
    if a.object_dim != b.object_dim:
        raise DimensionMismatch(
            f"object spaces differ: {a.object_dim} vs {b.object_dim}")


def _density_relative_entropy(t, t2) -> float:
    """``tr t (ln t - ln t2)`` for unit-trace operators (no trace terms)."""
    if not dv.support_contained(t, t2):
        return math.inf
    la = logm_on_support(t.psd)
    lb = logm_on_support(t2.psd)
    return float(np.real(np.sum(t.matrix * (la - lb).T)))


def finite_m_quantities(a: RareStateSpec, b: RareStateSpec, s: float = 0.5) -> FiniteMQuantities:
    _check_pair(a, b)
    tau, tau2 = single_mode_matrix(a), single_mode_matrix(b)
    f = dv.fidelity(tau, tau2)
    c = dv.chernoff_quantity(tau, tau2, s)
    d = _density_relative_entropy(tau, tau2)
    note = "support violation: relative entropy is infinite" if math.isinf(d) else ""
    return FiniteMQuantities(power_m(f, a.M), power_m(c, a.M),
                             math.inf if math.isinf(d) else a.M * d, note)


@dataclass(frozen=True, eq=False)
class RareFamily:
    """Parametric rare state: expected count ``N(theta)`` and ``tau1(theta)``.

    At a given ``M`` the per-mode probability is ``epsilon = N / M``.
    """

    n_of: Callable[[np.ndarray], float]
    tau1_of: Callable[[np.ndarray], np.ndarray]
    dn_of: Optional[Callable[[np.ndarray], Sequence[float]]] = None
    dtau1_of: Optional[Callable[[np.ndarray], Sequence[np.ndarray]]] = None

    @classmethod
    def from_intensity_family(cls, family: ParamFamily) -> "RareFamily":
        def n_of(theta):
            return float(np.real(np.trace(family.gamma_of(theta))))

        def tau1_of(theta):
            g = np.asarray(family.gamma_of(theta))
            return g / np.real(np.trace(g))

        if family.dgamma_of is None:
            return cls(n_of, tau1_of)

        def dn_of(theta):
            return [float(np.real(np.trace(d))) for d in family.dgamma_of(theta)]

        def dtau1_of(theta):
            g = np.asarray(family.gamma_of(theta))
            n = float(np.real(np.trace(g)))
            return [(d - np.real(np.trace(d)) * g / n) / n
                    for d in family.dgamma_of(theta)]

        return cls(n_of, tau1_of, dn_of, dtau1_of)

    def intensity_family(self) -> ParamFamily:
        """The Poisson-limit family ``Gamma(theta) = N(theta) tau1(theta)``."""
        def gamma_of(theta):
            return self.n_of(theta) * np.asarray(self.tau1_of(theta))

        if self.dn_of is None or self.dtau1_of is None:
            return ParamFamily(gamma_of)

        def dgamma_of(theta):
            n, t = self.n_of(theta), np.asarray(self.tau1_of(theta))
            return [dn * t + n * np.asarray(dt)
                    for dn, dt in zip(self.dn_of(theta), self.dtau1_of(theta))]

        return ParamFamily(gamma_of, dgamma_of)


def _tau_matrix(n: float, tau1: np.ndarray, M: float) -> np.ndarray:
    eps = n / M
    d = tau1.shape[0]
    tau = np.zeros((d + 1, d + 1), dtype=np.result_type(tau1, float))
    tau[0, 0] = 1.0 - eps
    tau[1:, 1:] = eps * tau1
    return tau


def finite_m_helstrom(fam: RareFamily, theta, M: float,
                      fd_step: float = FD_STEP) -> np.ndarray:
    """``M K(tau)`` from single-mode SLDs, vacuum-block term included."""
    theta = np.atleast_1d(np.asarray(theta, dtype=float))

    def tau_of(t):
        return _tau_matrix(fam.n_of(t), np.asarray(fam.tau1_of(t)), M)

    tau = tau_of(theta)
    if fam.dn_of is not None and fam.dtau1_of is not None:
        n, t1 = fam.n_of(theta), np.asarray(fam.tau1_of(theta))
        dtaus = []
        for dn, dt1 in zip(fam.dn_of(theta), fam.dtau1_of(theta)):
            dt = np.zeros_like(tau)
            dt[0, 0] = -dn / M
            dt[1:, 1:] = (dn * t1 + n * np.asarray(dt1)) / M
            dtaus.append(dt)
    else:
        dtaus = finite_difference_derivatives(tau_of, theta, fd_step)
    return M * helstrom_from_derivatives(as_intensity(tau), dtaus).K


@dataclass(frozen=True)
class SweepRow:
    M: int
    finite: float
    limit: float
    abs_error: float


def _limit_value(kind: str, G, G2, s: float) -> float:
    if kind == "fidelity":
        return dv.poisson_state_fidelity(G, G2)
    if kind == "chernoff":
        return dv.poisson_state_chernoff(G, G2, s)
    return dv.relative_entropy(G, G2)


def convergence_sweep(G, G2, M_list: Sequence[float], kind: str = "fidelity",
                      s: float = 0.5) -> list[SweepRow]:
    """Finite-M value against the Poisson limit for each ``M``.

    ``kind`` is ``fidelity``, ``chernoff`` or ``kl``. Rows whose finite-M
    relative entropy is infinite are dropped.
    """
    if kind not in ("fidelity", "chernoff", "kl"):
        raise ValueError(f"unknown sweep kind {kind!r}")
    Ms = [int(round(m)) for m in M_list]
    if any(b <= a for a, b in zip(Ms, Ms[1:])):
        raise ValueError("M_list must be strictly ascending")
    G, G2 = as_intensity(G), as_intensity(G2)
    limit = _limit_value(kind, G, G2, s)
    rows = []
    for M in Ms:
        a = RareStateSpec.from_intensity(G, M)
        b = RareStateSpec.from_intensity(G2, M)
        q = finite_m_quantities(a, b, s)
        val = {"fidelity": q.F_M, "chernoff": q.C_sM, "kl": q.D_M}[kind]
        if math.isinf(val):
            continue
        rows.append(SweepRow(M, val, limit, abs(val - limit)))
    return rows


def helstrom_convergence_sweep(fam: RareFamily, theta, M_list: Sequence[float],
                               fd_step: float = FD_STEP, mu: int = 0,
                               nu: int = 0) -> list[SweepRow]:
    """Sweep of one entry of ``M K(tau)`` against the Poisson-limit ``K(Gamma)``."""
    Ms = [int(round(m)) for m in M_list]
    if any(b <= a for a, b in zip(Ms, Ms[1:])):
        raise ValueError("M_list must be strictly ascending")
    limit = float(helstrom(fam.intensity_family(), theta, fd_step).K[mu, nu])
    rows = []
    for M in Ms:
        val = float(finite_m_helstrom(fam, theta, M, fd_step)[mu, nu])
        rows.append(SweepRow(M, val, limit, abs(val - limit)))
    return rows


def loglog_slope(rows: Sequence[SweepRow]) -> float:
    """Least-squares slope of ``log(abs_error)`` against ``log(M)``.

    Rows with zero error are ignored; ``nan`` if fewer than two remain.
    """
    pts = [(math.log(r.M), math.log(r.abs_error)) for r in rows if r.abs_error > 0]
    if len(pts) < 2:
        return math.nan
    x, y = np.array(pts).T
    return float(np.polyfit(x, y, 1)[0])
