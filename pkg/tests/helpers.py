"""Random test instances shared by the test modules."""
import numpy as np


def rng(seed=0):
    return np.random.default_rng(seed)


def rand_unitary(r, d):
    z = r.normal(size=(d, d)) + 1j * r.normal(size=(d, d))
    q, rr = np.linalg.qr(z)
    return q * (np.diag(rr) / np.abs(np.diag(rr)))


def rand_psd(r, d, rank=None, scale=1.0, real=False):
    k = d if rank is None else rank
    if real:
        A = r.normal(size=(d, k))
    else:
        A = r.normal(size=(d, k)) + 1j * r.normal(size=(d, k))
    G = A @ A.conj().T
    return scale * G / np.real(np.trace(G)) * r.uniform(0.5, 3.0)


def rand_hermitian(r, d):
    A = r.normal(size=(d, d)) + 1j * r.normal(size=(d, d))
    return (A + A.conj().T) / 2


def rand_povm(r, d, J):
    """Random J-element POVM; the last element completes the identity."""
    Bs = [rand_psd(r, d, rank=r.integers(1, d + 1)) for _ in range(J - 1)]
    if not Bs:
        return [np.eye(d)]
    S = sum(Bs)
    c = np.linalg.eigvalsh(S)[-1] * r.uniform(1.0, 2.0)
    Es = [B / c for B in Bs]
    last = np.eye(d) - S / c
    return Es + [(last + last.conj().T) / 2]
