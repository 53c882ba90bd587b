"""Monte Carlo sampling of Poisson count records via the Kac construction.

Each trial draws a total count ``L ~ Poisson(N)`` and then ``L`` i.i.d.
outcomes with probabilities ``Lambda_j / N``; the per-outcome counts are then
independent Poisson variables with means ``Lambda_j``.

Randomness comes from a Philox counter-based generator. Trials are cut into
fixed-size blocks and block ``k`` is keyed by ``(seed, k)``, so results do not
depend on how many workers process the blocks.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import stats

from . import channels
from .divergences import intensity_vector
from .errors import InvalidChannel, PoissonQIError, SupportViolation

BLOCK_TRIALS = 8192
INVERSION_MAX_MEAN = 10.0
INVERSION_TABLE = 64  # P(L >= 64) < 1e-25 for N < 10


@dataclass(frozen=True, eq=False)
class SampleBatch:
    counts: np.ndarray
    seed: int
    Lambda_used: np.ndarray

    @property
    def trials(self) -> int:
        return self.counts.shape[0]


def block_generator(seed: int, block: int) -> np.random.Generator:
    """Philox stream for one block of trials."""
    ss = np.random.SeedSequence(entropy=int(seed) & (2**64 - 1), spawn_key=(int(block),))
    return np.random.Generator(np.random.Philox(ss))


def poisson_totals(N: float, n: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` draws from Poisson(N).

    Below ``INVERSION_MAX_MEAN`` by inversion of the cumulative distribution
    (one uniform per draw); above it numpy's transformed-rejection sampler
    (PTRS, Hoermann 1993), which numpy uses for every mean >= 10.
    """
    if N == 0:
        return np.zeros(n, dtype=np.int64)
    if N < INVERSION_MAX_MEAN:
        cdf = stats.poisson.cdf(np.arange(INVERSION_TABLE), N)
        u = rng.random(n)
        return np.minimum(np.searchsorted(cdf, u, side="right"), INVERSION_TABLE - 1)
    return rng.poisson(N, size=n)


def _sample_block(p_cum: np.ndarray, N: float, n_trials: int, rng) -> np.ndarray:
    J = p_cum.size
    counts = np.zeros((n_trials, J), dtype=np.int64)
    if N == 0:
        return counts
    totals = poisson_totals(N, n_trials, rng)
    u = rng.random(int(totals.sum()))
    outcome = np.minimum(np.searchsorted(p_cum, u, side="right"), J - 1)
    trial = np.repeat(np.arange(n_trials), totals)
    np.add.at(counts, (trial, outcome), 1)
    return counts


def sample(L, trials: int, seed: int, workers: int = 1) -> SampleBatch:
    """Draw ``trials`` independent count vectors with means ``L``."""
    L = intensity_vector(L)
    trials = int(trials)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    N = float(L.sum())
    p_cum = np.cumsum(L / N) if N > 0 else np.zeros_like(L)
    sizes = [min(BLOCK_TRIALS, trials - k) for k in range(0, trials, BLOCK_TRIALS)]

    def run(block):
        return _sample_block(p_cum, N, sizes[block], block_generator(seed, block))

    if workers > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, range(len(sizes))))
    else:
        parts = [run(b) for b in range(len(sizes))]
    counts = np.concatenate(parts, axis=0)
    counts.setflags(write=False)
    return SampleBatch(counts, int(seed), L)


def measure_and_sample(G, E, trials: int, seed: int, workers: int = 1) -> SampleBatch:
    """Intensities ``Lambda_j = tr E_j Gamma`` of a POVM, then :func:`sample`."""
    try:
        ch = channels.povm(E)
    except PoissonQIError as exc:
        if isinstance(exc, InvalidChannel):
            raise
        raise InvalidChannel(f"invalid POVM element: {exc}") from exc
    return sample(channels.apply(ch, G), trials, seed, workers)


def log_likelihood_ratios(batch: SampleBatch, L, L2) -> np.ndarray:
    """Per-trial ``sum_j [L2_j - L_j + m_j ln(L_j / L2_j)]``.

    A trial that hits an outcome with ``L_j = 0 < L2_j`` gets ``-inf``.
    """
    L, L2 = intensity_vector(L), intensity_vector(L2)
    if L.shape != L2.shape or L.size != batch.counts.shape[1]:
        raise ValueError("intensity vectors do not match the batch outcomes")
    if np.any((L > 0) & (L2 == 0)):
        raise SupportViolation("supp Lambda is not contained in supp Lambda'")
    m = L > 0
    log_ratio = np.zeros_like(L)
    log_ratio[m] = np.log(L[m] / L2[m])
    out = batch.counts @ log_ratio + (L2.sum() - L.sum())
    impossible = (batch.counts[:, ~m] > 0).any(axis=1)
    out[impossible] = -math.inf
    return out


def empirical_relative_entropy(batch: SampleBatch, L, L2) -> float:
    """Sample mean of the log-likelihood ratio.

    For a batch drawn from ``L`` this estimates ``D(L || L2)``; for a batch
    drawn from ``L2`` it estimates ``-D(L2 || L)``.
    """
    return float(np.mean(log_likelihood_ratios(batch, L, L2)))
