import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from poissonqi import channels as ch
from poissonqi import divergences as dv
from poissonqi.errors import DimensionMismatch, InvalidChannel, RarityViolated
from poissonqi.estimation import helstrom_from_derivatives
from poissonqi.psd import validate_psd

from helpers import rand_hermitian, rand_povm, rand_psd, rand_unitary, rng


def test_loss_example():
    out = ch.apply(ch.loss([0.5, 1.0]), np.diag([2.0, 2.0]))
    assert np.array_equal(out.matrix, np.diag([1.0, 2.0]))


def test_background_of_zero_is_offset():
    bg = np.array([[1.0, 0.5], [0.5, 2.0]])
    out = ch.apply(ch.background(bg), np.zeros((2, 2)))
    assert np.array_equal(out.matrix, bg)


def test_compose_example():
    out = ch.apply(ch.compose([[2.0]], 1), [[1.0]])
    assert np.array_equal(out.matrix, np.diag([1.0, 2.0])) and out.N == 3


def test_compose_then_marginalize_recovers_input():
    r = rng(1)
    G = rand_psd(r, 3)
    big = ch.apply(ch.compose(rand_psd(r, 2), 3), G)
    back = ch.apply(ch.marginalize([0, 1, 2], 5), big)
    assert np.array_equal(back.matrix, validate_psd(G).matrix)


def test_unitary_preserves_trace_and_povm_intensities():
    r = rng(2)
    G = rand_psd(r, 3)
    U = rand_unitary(r, 3)
    out = ch.apply(ch.unitary(U), G)
    assert abs(out.N - np.trace(G).real) < 1e-12
    L = ch.apply(ch.povm([np.diag([1.0, 0, 0]), np.diag([0, 1.0, 1.0])]), np.diag([1.0, 2, 3]))
    assert np.allclose(L, [1, 5])


def test_invalid_channels():
    with pytest.raises(InvalidChannel):
        ch.unitary([[1.0, 1.0], [0.0, 1.0]])
    with pytest.raises(InvalidChannel):
        ch.povm([np.diag([1.0, 0.5])])
    with pytest.raises(InvalidChannel):
        ch.loss([1.5])
    with pytest.raises(InvalidChannel):
        ch.marginalize([0, 3], 2)
    with pytest.raises(DimensionMismatch):
        ch.apply(ch.loss([1.0, 1.0]), np.eye(3))


def test_affine_from_kraus_reproduces_loss_and_unitary():
    r = rng(3)
    G = rand_psd(r, 3)
    eta = np.array([0.2, 0.7, 1.0])
    a = ch.apply(ch.affine_from_kraus([(None, np.diag(np.sqrt(eta)))]), G).matrix
    assert np.allclose(a, ch.apply(ch.loss(eta), G).matrix, atol=1e-14)
    U = rand_unitary(r, 3)
    b = ch.apply(ch.affine_from_kraus([(None, U)]), G).matrix
    assert np.allclose(b, ch.apply(ch.unitary(U), G).matrix, atol=1e-14)


def test_affine_from_kraus_emission_only():
    a10 = np.array([1e-3, 2e-3])
    spec = ch.affine_from_kraus([(a10, None)], modes=1e5)
    out = ch.apply(spec, np.zeros((2, 2))).matrix
    assert np.allclose(out, 1e5 * np.outer(a10, a10))
    with pytest.raises(RarityViolated):
        ch.affine_from_kraus([(np.array([0.5]), None)])


def _channels_for(r, d):
    U = rand_unitary(r, d)
    keep = sorted(r.choice(d, size=r.integers(1, d + 1), replace=False).tolist())
    return [ch.unitary(U), ch.loss(r.uniform(0, 1, d)), ch.background(rand_psd(r, d)),
            ch.compose(rand_psd(r, 2), d), ch.marginalize(keep, d),
            ch.povm(rand_povm(r, d, r.integers(1, 5)))]


def _quantum_or_classical(a, b, s):
    if isinstance(a, np.ndarray):
        return (dv.classical_bures_sq(a, b), dv.classical_alpha_divergence(a, b, s),
                dv.classical_relative_entropy(a, b))
    return dv.bures_sq(a, b), dv.alpha_divergence(a, b, s), dv.relative_entropy(a, b)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 5), st.integers(0, 2**32 - 1), st.floats(0.05, 0.95))
def test_data_processing(d, seed, s):
    r = rng(seed)
    a, b = rand_psd(r, d), rand_psd(r, d)
    before = (dv.bures_sq(a, b), dv.alpha_divergence(a, b, s), dv.relative_entropy(a, b))
    for c in _channels_for(r, d):
        after = _quantum_or_classical(ch.apply(c, a), ch.apply(c, b), s)
        for x, y in zip(before, after):
            assert y <= x + 1e-8 * max(1, x)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_helstrom_monotone_under_channels(d, seed):
    r = rng(seed)
    G, dG = rand_psd(r, d), rand_hermitian(r, d)
    K = helstrom_from_derivatives(G, [dG]).scalar()
    for c in _channels_for(r, d):
        if c.kind == "povm":
            continue
        out = ch.apply(c, G)
        K2 = helstrom_from_derivatives(out, [ch.apply_derivative(c, dG)]).scalar()
        assert K2 <= K + 1e-8 * max(1, K)


def test_unitary_preserves_divergences():
    r = rng(4)
    a, b = rand_psd(r, 4), rand_psd(r, 4)
    c = ch.unitary(rand_unitary(r, 4))
    ua, ub = ch.apply(c, a), ch.apply(c, b)
    assert abs(dv.bures_sq(a, b) - dv.bures_sq(ua, ub)) < 1e-10
    assert abs(dv.relative_entropy(a, b) - dv.relative_entropy(ua, ub)) < 1e-10
    assert abs(dv.alpha_divergence(a, b, 0.3) - dv.alpha_divergence(ua, ub, 0.3)) < 1e-10


def test_background_is_not_linear():
    bg = np.eye(2)
    c = ch.background(bg)
    G = np.diag([1.0, 2.0])
    lhs = ch.apply(c, 2 * G).matrix
    rhs = 2 * ch.apply(c, G).matrix
    assert not np.allclose(lhs, rhs)
    assert math.isclose(ch.apply(c, G).N, 5.0)
