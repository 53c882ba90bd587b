"""Poisson channels acting on intensity operators.

A :class:`ChannelSpec` is a closed, validated description; :func:`apply`
interprets it. Every map here is affine in ``Gamma``::

    Gamma -> offset + sum_a A_a Gamma A_a^dagger

and the named kinds are special cases (the POVM kind instead returns the
classical intensity vector).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .errors import DimensionMismatch, InvalidChannel, RarityViolated
from .psd import validate_psd
from .states import IntensityOperator, as_intensity

TOL_CHANNEL = 1e-10
DEFAULT_MAX_EMISSION = 1e-2

KINDS = ("unitary", "povm", "loss", "background", "compose", "marginalize", "affine")


@dataclass(frozen=True, eq=False)
class ChannelSpec:
    kind: str
    params: dict = field(default_factory=dict)
    dim_in: int = 0
    dim_out: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidChannel(f"unknown channel kind {self.kind!r}")


def _eye_close(M: np.ndarray, what: str):
    d = M.shape[0]
    err = np.max(np.abs(M - np.eye(d))) if d else 0.0
    if err > TOL_CHANNEL:
        raise InvalidChannel(f"{what}: deviation from identity {err:.3e}")


def unitary(U) -> ChannelSpec:
    U = np.asarray(U)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        raise InvalidChannel("unitary must be a square matrix")
    _eye_close(U.conj().T @ U, "U^dagger U != I")
    return ChannelSpec("unitary", {"U": U}, U.shape[0], U.shape[0])


def povm(elements: Sequence) -> ChannelSpec:
    """Object-counting measurement; output is ``Lambda_j = tr E_j Gamma``."""
    E = [validate_psd(e).matrix for e in elements]
    if not E:
        raise InvalidChannel("a POVM needs at least one element")
    d = E[0].shape[0]
    if any(e.shape != (d, d) for e in E):
        raise InvalidChannel("POVM elements have inconsistent shapes")
    _eye_close(sum(E), "POVM elements do not sum to I")
    return ChannelSpec("povm", {"E": E}, d, len(E))


def loss(eta, dim: Optional[int] = None) -> ChannelSpec:
    """``Gamma -> T Gamma T`` with ``T = diag(sqrt(eta))``.

    A scalar ``eta`` with ``dim`` given is uniform loss on ``dim`` modes.
    """
    eta = np.asarray(eta, dtype=float).ravel()
    if eta.size == 1 and dim is not None:
        eta = np.full(int(dim), eta[0])
    if np.any(eta < 0) or np.any(eta > 1):
        raise InvalidChannel("transmission coefficients must lie in [0, 1]")
    return ChannelSpec("loss", {"eta": eta}, eta.size, eta.size)


def background(gamma_bg) -> ChannelSpec:
    """``Gamma -> Gamma + Gamma_bg`` (spontaneous emission / dark counts)."""
    bg = as_intensity(gamma_bg)
    return ChannelSpec("background", {"gamma": bg}, bg.dim, bg.dim)


def compose(gamma_other, dim_in: int) -> ChannelSpec:
    """Tensor product with an independent Poisson state: ``Gamma (+) Gamma'``."""
    other = as_intensity(gamma_other)
    return ChannelSpec("compose", {"gamma": other}, dim_in, dim_in + other.dim)


def marginalize(keep: Sequence[int], dim_in: int) -> ChannelSpec:
    """Keep the principal block on the listed basis indices."""
    keep = [int(k) for k in keep]
    if len(set(keep)) != len(keep) or any(k < 0 or k >= dim_in for k in keep):
        raise InvalidChannel(f"invalid subspace indices {keep} for dimension {dim_in}")
    return ChannelSpec("marginalize", {"keep": keep}, dim_in, len(keep))


def affine(offset, kraus: Sequence) -> ChannelSpec:
    """General ``Gamma -> offset + sum_a A_a Gamma A_a^dagger``."""
    ops = [np.atleast_2d(np.asarray(a)) for a in kraus]
    if not ops:
        raise InvalidChannel("at least one Kraus operator is required")
    d_in = ops[0].shape[1]
    d_out = ops[0].shape[0]
    if any(a.shape != (d_out, d_in) for a in ops):
        raise InvalidChannel("Kraus operators have inconsistent shapes")
    off = as_intensity(offset if offset is not None else np.zeros((d_out, d_out)))
    if off.dim != d_out:
        raise InvalidChannel("offset does not match the output dimension")
    total = sum(a.conj().T @ a for a in ops)
    # the object-to-object blocks can only lose weight
    w = np.linalg.eigvalsh((total + total.conj().T) / 2)
    if w[-1] > 1 + TOL_CHANNEL:
        raise InvalidChannel("sum A11^dagger A11 exceeds the identity")
    return ChannelSpec("affine", {"offset": off, "kraus": ops}, d_in, d_out)


def affine_from_kraus(blocks: Sequence[tuple], modes: float = 1.0,
                      max_emission: float = DEFAULT_MAX_EMISSION) -> ChannelSpec:
    """Intensity map induced by a single-mode Kraus channel.

    Each block is ``(A10, A11)``: ``A10`` is a column (vacuum to object) and
    ``A11`` maps objects to objects; either may be ``None``. The offset is
    ``modes * sum A10 A10^dagger``; the per-mode emission probability
    ``tr sum A10 A10^dagger`` must not exceed ``max_emission``.
    """
    a10s, a11s = [], []
    for a10, a11 in blocks:
        if a10 is not None:
            a10s.append(np.asarray(a10).reshape(-1, 1))
        if a11 is not None:
            a11s.append(np.atleast_2d(np.asarray(a11)))
    if not a11s and not a10s:
        raise InvalidChannel("no Kraus blocks given")
    d_out = (a11s[0].shape[0] if a11s else a10s[0].shape[0])
    if any(a.shape[0] != d_out for a in a10s + a11s):
        raise InvalidChannel("Kraus blocks have inconsistent output dimensions")
    emission = sum((a.conj().T @ a).real.item() for a in a10s) if a10s else 0.0
    if emission > max_emission:
        raise RarityViolated(
            f"per-mode emission probability {emission:.3g} exceeds {max_emission:g}")
    offset = modes * sum(a @ a.conj().T for a in a10s) if a10s else np.zeros((d_out, d_out))
    if not a11s:
        # emission only: objects present at the input are absorbed
        a11s = [np.zeros((d_out, d_out))]
    return affine(offset, a11s)


def apply(ch: ChannelSpec, G) -> Union[IntensityOperator, np.ndarray]:
    """Apply a channel to an intensity operator."""
    G = as_intensity(G)
    if ch.kind != "compose" and ch.dim_in != G.dim:
        raise DimensionMismatch(
            f"channel expects dimension {ch.dim_in}, operator has {G.dim}")
    M = G.matrix
    p = ch.params
    if ch.kind == "unitary":
        U = p["U"]
        out = U @ M @ U.conj().T
    elif ch.kind == "povm":
        return np.array([max(float(np.real(np.sum(E * M.T))), 0.0) for E in p["E"]])
    elif ch.kind == "loss":
        # sqrt(eta_i eta_j) keeps the uniform-loss case exact: sqrt(x*x) == x
        out = np.sqrt(np.outer(p["eta"], p["eta"])) * M
    elif ch.kind == "background":
        out = M + p["gamma"].matrix
    elif ch.kind == "compose":
        other = p["gamma"].matrix
        d1, d2 = M.shape[0], other.shape[0]
        dtype = np.result_type(M, other)
        out = np.zeros((d1 + d2, d1 + d2), dtype=dtype)
        out[:d1, :d1] = M
        out[d1:, d1:] = other
    elif ch.kind == "marginalize":
        k = p["keep"]
        out = M[np.ix_(k, k)]
    else:
        out = p["offset"].matrix + sum(A @ M @ A.conj().T for A in p["kraus"])
    return IntensityOperator(validate_psd(out))


def apply_derivative(ch: ChannelSpec, dG) -> np.ndarray:
    """Derivative of the output of a theta-independent channel.

    Affine maps drop their offset; the POVM kind returns ``dLambda_j``.
    """
    dG = np.asarray(dG)
    p = ch.params
    if ch.kind == "unitary":
        return p["U"] @ dG @ p["U"].conj().T
    if ch.kind == "povm":
        return np.array([float(np.real(np.sum(E * dG.T))) for E in p["E"]])
    if ch.kind == "loss":
        return np.sqrt(np.outer(p["eta"], p["eta"])) * dG
    if ch.kind == "background":
        return dG
    if ch.kind == "compose":
        d1, d2 = dG.shape[0], p["gamma"].dim
        out = np.zeros((d1 + d2, d1 + d2), dtype=dG.dtype)
        out[:d1, :d1] = dG
        return out
    if ch.kind == "marginalize":
        k = p["keep"]
        return dG[np.ix_(k, k)]
    return sum(A @ dG @ A.conj().T for A in p["kraus"])
