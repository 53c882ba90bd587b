import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from poissonqi import divergences as dv
from poissonqi.errors import DimensionMismatch, LengthMismatch, NegativeIntensity, SOutOfRange

from helpers import rand_povm, rand_psd, rand_unitary, rng

E1 = np.diag([1.0, 0.0])
E2 = np.diag([0.0, 1.0])


def test_fidelity_examples():
    assert abs(dv.fidelity([[1.0]], [[4.0]]) - 2) < 1e-12
    assert abs(dv.fidelity(np.diag([1.0, 2.0]), np.diag([1.0, 2.0])) - 3) < 1e-12
    v = np.array([1, 1]) / math.sqrt(2)
    assert abs(dv.fidelity(E1, np.outer(v, v)) - math.sqrt(0.5)) < 1e-12


def test_fidelity_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        dv.fidelity(np.eye(2), np.eye(3))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_fidelity_formulas_agree(d, seed):
    r = rng(seed)
    a, b = rand_psd(r, d, rank=r.integers(1, d + 1)), rand_psd(r, d)
    f = dv.fidelity(a, b)
    # nested square roots lose half the digits on zero eigenvalues (sqrt of rounding noise)
    assert abs(f - dv.fidelity_nested(a, b)) < 1e-7 * max(1, f)
    assert abs(f - dv.fidelity_product_spectrum(a, b)) < 1e-7 * max(1, f)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_fidelity_rank_one_closed_form(d, seed):
    r = rng(seed)
    u = r.normal(size=d) + 1j * r.normal(size=d)
    a = np.outer(u, u.conj())
    b = rand_psd(r, d)
    exact = math.sqrt(np.vdot(u, b @ u).real)
    assert abs(dv.fidelity(a, b) - exact) < 1e-12 * max(1, exact)


def test_bures_examples():
    assert abs(dv.bures_sq([[1.0]], [[4.0]]) - 1) < 1e-12
    assert abs(dv.bures_sq(np.diag([1.0, 2.0]), np.diag([1.0, 2.0]))) < 1e-12
    assert abs(dv.bures_sq(E1, E2) - 2) < 1e-12


def test_poisson_state_fidelity_examples():
    assert abs(dv.poisson_state_fidelity([[1.0]], [[4.0]]) - math.exp(-0.5)) < 1e-12
    assert abs(dv.poisson_state_fidelity(np.eye(2), np.eye(2)) - 1) < 1e-12
    assert abs(dv.poisson_state_fidelity(np.zeros((2, 2)), np.eye(2)) - math.exp(-1)) < 1e-12


def test_chernoff_quantity_examples():
    assert abs(dv.chernoff_quantity([[1.0]], [[4.0]], 0.5) - 2) < 1e-12
    for s in (0.0, 0.3, 1.0):
        assert abs(dv.chernoff_quantity(np.diag([1.0, 2.0]), np.diag([1.0, 2.0]), s) - 3) < 1e-12
    assert abs(dv.chernoff_quantity(np.diag([1.0, 2.0]), np.diag([2.0, 1.0]), 0.5)
               - 2 * math.sqrt(2)) < 1e-12


def test_chernoff_endpoints_use_support_projectors():
    # s = 0: tr P_G G2 ; s = 1: tr G P_G2
    G, G2 = np.diag([1.0, 0.0]), np.diag([2.0, 3.0])
    assert abs(dv.chernoff_quantity(G, G2, 0.0) - 2) < 1e-12
    assert abs(dv.chernoff_quantity(G2, G, 1.0) - 2) < 1e-12


def test_s_out_of_range():
    with pytest.raises(SOutOfRange):
        dv.chernoff_quantity([[1.0]], [[1.0]], 1.5)
    with pytest.raises(SOutOfRange):
        dv.alpha_divergence([[1.0]], [[1.0]], 0.0)


def test_chernoff_distance_scalar():
    rep = dv.chernoff_distance([[1.0]], [[4.0]])
    # f(s) = 4 - 3 s - 4^(1-s) is maximal where 4^(1-s) ln 4 = 3
    s_star = 1 - math.log(3 / math.log(4)) / math.log(4)
    value = 4 - 3 * s_star - 4 ** (1 - s_star)
    assert abs(rep.value - value) < 1e-12
    assert abs(rep.s_star - s_star) < 1e-8
    assert rep.kind == "chernoff_distance"


def test_chernoff_distance_identical_and_orthogonal():
    assert abs(dv.chernoff_distance(np.eye(2), np.eye(2)).value) < 1e-12
    rep = dv.chernoff_distance(E1, E2)
    s = np.linspace(0, 1, 1001)
    brute = max(si + (1 - si) - dv.chernoff_quantity(E1, E2, si) for si in s)
    assert abs(rep.value - 1) < 1e-12 and abs(rep.value - brute) < 1e-12
    assert rep.s_star in (0.0, 1.0)


def test_alpha_divergence_examples():
    assert abs(dv.alpha_divergence([[1.0]], [[4.0]], 0.5) - 2) < 1e-12
    assert abs(dv.alpha_divergence(np.eye(2), np.eye(2), 0.5)) < 1e-12
    assert abs(dv.alpha_divergence(np.diag([1.0, 2.0]), np.diag([2.0, 1.0]), 0.5)
               - 4 * (3 - 2 * math.sqrt(2))) < 1e-12


def test_relative_entropy_examples():
    assert abs(dv.relative_entropy([[1.0]], [[4.0]]) - (3 - math.log(4))) < 1e-12
    assert abs(dv.relative_entropy(np.eye(2), np.eye(2))) < 1e-12
    assert dv.relative_entropy(np.eye(2), E1) == math.inf


def test_classical_examples():
    for kind in ("bures", "chernoff-distance", "alpha", "kl"):
        assert abs(dv.classical_divergences([1, 1], [1, 1], kind)) < 1e-12
    assert abs(dv.classical_divergences([1, 1], [1, 1], "chernoff", 0.3) - 2) < 1e-12
    assert abs(dv.classical_divergences([1], [4], "kl") - (3 - math.log(4))) < 1e-12
    assert dv.classical_divergences([1, 1], [2, 0], "kl") == math.inf
    assert math.isfinite(dv.classical_divergences([2, 0], [1, 1], "kl"))


def test_classical_errors():
    with pytest.raises(LengthMismatch):
        dv.classical_divergences([1, 2], [1], "kl")
    with pytest.raises(NegativeIntensity):
        dv.classical_divergences([1, -2], [1, 1], "kl")


def test_report_shape():
    rep = dv.divergence("kl", np.eye(2), E1)
    assert rep.kind == "rel_entropy" and rep.value == math.inf and rep.s_star is None
    assert dv.divergence("chernoff-distance", [1.0], [4.0], classical=True).s_star is not None


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_ordering_chernoff_fidelity_geometric_mean(d, seed):
    r = rng(seed)
    a, b = rand_psd(r, d), rand_psd(r, d)
    c = dv.chernoff_quantity(a, b, 0.5)
    f = dv.fidelity(a, b)
    Na, Nb = np.trace(a).real, np.trace(b).real
    assert c <= f + 1e-10
    assert f <= math.sqrt(Na * Nb) + 1e-10


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**32 - 1), st.floats(0.05, 0.95))
def test_commuting_reduction(d, seed, s):
    r = rng(seed)
    U = rand_unitary(r, d)
    la, lb = r.uniform(0.1, 2, d), r.uniform(0.1, 2, d)
    a = U @ np.diag(la) @ U.conj().T
    b = U @ np.diag(lb) @ U.conj().T
    pairs = [
        (dv.fidelity(a, b), dv.classical_fidelity(la, lb)),
        (dv.bures_sq(a, b), dv.classical_bures_sq(la, lb)),
        (dv.chernoff_quantity(a, b, s), dv.classical_chernoff_quantity(la, lb, s)),
        (dv.alpha_divergence(a, b, s), dv.classical_alpha_divergence(la, lb, s)),
        (dv.relative_entropy(a, b), dv.classical_relative_entropy(la, lb)),
        (dv.chernoff_distance(a, b).value, dv.classical_chernoff_distance(la, lb).value),
    ]
    for q, c in pairs:
        assert abs(q - c) < 1e-10 * max(1, abs(c))


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_unitary_invariance(d, seed):
    r = rng(seed)
    a, b = rand_psd(r, d), rand_psd(r, d)
    U = rand_unitary(r, d)
    ua, ub = U @ a @ U.conj().T, U @ b @ U.conj().T
    for f in (dv.fidelity, dv.bures_sq, dv.relative_entropy,
              lambda x, y: dv.chernoff_quantity(x, y, 0.3),
              lambda x, y: dv.alpha_divergence(x, y, 0.7)):
        v = f(a, b)
        assert abs(f(ua, ub) - v) < 1e-10 * max(1, abs(v))


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 5), st.integers(0, 2**32 - 1), st.floats(0.1, 10))
def test_fidelity_scaling(d, seed, c):
    r = rng(seed)
    a, b = rand_psd(r, d), rand_psd(r, d)
    assert abs(dv.fidelity(c * a, c * b) - c * dv.fidelity(a, b)) < 1e-10 * c * max(1, dv.fidelity(a, b))


def test_measurement_monotonicity_small():
    r = rng(11)
    for _ in range(20):
        d = r.integers(1, 5)
        a, b = rand_psd(r, d), rand_psd(r, d)
        E = rand_povm(r, d, r.integers(1, 5))
        La = np.array([np.trace(e @ a).real for e in E])
        Lb = np.array([np.trace(e @ b).real for e in E])
        assert dv.fidelity(a, b) <= dv.classical_chernoff_quantity(La, Lb, 0.5) + 1e-8
        assert dv.relative_entropy(a, b) >= dv.classical_relative_entropy(La, Lb) - 1e-8
