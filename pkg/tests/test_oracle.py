import math

import numpy as np
import pytest

from poissonqi import divergences as dv
from poissonqi.errors import DimensionMismatch, ModeCountMismatch
from poissonqi.estimation import ParamFamily, helstrom
from poissonqi.imaging import intensity_family
from poissonqi.oracle import (RareFamily, convergence_sweep, finite_m_helstrom,
                              finite_m_quantities, helstrom_convergence_sweep, loglog_slope,
                              power_m)
from poissonqi.states import RareStateSpec, as_density


def test_power_m_stable():
    x = 1 - 2.0 ** -40          # exactly representable
    assert power_m(x, 1e8) == pytest.approx(math.exp(-1e8 * 2.0 ** -40), rel=1e-12)
    assert power_m(0.0, 5) == 0.0


def test_vacuum_and_identical_specs():
    t = as_density(np.eye(1))
    q = finite_m_quantities(RareStateSpec(0.0, t, 10), RareStateSpec(0.0, t, 10))
    assert (q.F_M, q.C_sM, q.D_M) == (1.0, 1.0, 0.0)
    t2 = as_density(np.diag([0.3, 0.7]))
    a = RareStateSpec(0.01, t2, 100)
    q = finite_m_quantities(a, a)
    assert abs(q.F_M - 1) < 1e-12 and abs(q.D_M) < 1e-12


def test_mismatched_specs():
    t = as_density(np.eye(1))
    with pytest.raises(ModeCountMismatch):
        finite_m_quantities(RareStateSpec(0.1, t, 10), RareStateSpec(0.1, t, 11))
    with pytest.raises(DimensionMismatch):
        finite_m_quantities(RareStateSpec(0.1, t, 10),
                            RareStateSpec(0.1, as_density(np.eye(2) / 2), 10))


def test_scalar_fidelity_at_1e4():
    t = as_density(np.eye(1))
    q = finite_m_quantities(RareStateSpec(1e-4, t, 10000), RareStateSpec(4e-4, t, 10000))
    assert abs(q.F_M - math.exp(-0.5)) < 1e-3


def test_sweep_identical_pair_has_zero_error():
    G = np.diag([0.4, 0.6])
    for kind in ("fidelity", "chernoff", "kl"):
        rows = convergence_sweep(G, G, [100, 1000], kind)
        assert all(r.abs_error < 1e-12 for r in rows)


def test_sweep_scalar_rate():
    rows = convergence_sweep([[1.0]], [[4.0]], [1e2, 1e3, 1e4, 1e5], "fidelity")
    ratios = [a.abs_error / b.abs_error for a, b in zip(rows, rows[1:])]
    assert all(8 < x < 12 for x in ratios)
    assert abs(loglog_slope(rows) + 1) < 0.2


def test_sweep_support_violation_rows_dropped():
    rows = convergence_sweep(np.eye(2), np.diag([1.0, 0.0]), [100, 1000], "kl")
    assert rows == []


def test_sweep_rejects_unsorted():
    with pytest.raises(ValueError):
        convergence_sweep([[1.0]], [[4.0]], [1000, 100])


def test_helstrom_constant_family_is_zero():
    fam = RareFamily(lambda t: 2.0, lambda t: np.eye(2) / 2)
    assert abs(finite_m_helstrom(fam, [1.0], 1000)[0, 0]) < 1e-9


def test_helstrom_linear_intensity():
    fam = RareFamily(lambda t: t[0], lambda t: np.eye(1), lambda t: [1.0], lambda t: [np.zeros((1, 1))])
    K = finite_m_helstrom(fam, [2.0], 1e6)[0, 0]
    assert abs(K - 0.5) < 1e-5


def test_helstrom_imaging_family_cross_module():
    fam = RareFamily.from_intensity_family(intensity_family(1.0, 0.0))
    K_lim = helstrom(intensity_family(1.0, 0.0), [2.0]).scalar()
    K_M = finite_m_helstrom(fam, [2.0], 1e6)[0, 0]
    assert abs(K_M - K_lim) < 1e-4 * K_lim


def test_helstrom_sweep_rate():
    base, gen = np.diag([1.0, 2.0]), np.array([[1.0, 0.3], [0.3, -0.5]])
    fam = RareFamily.from_intensity_family(
        ParamFamily(lambda t: base + t[0] * gen, lambda t: [gen]))
    rows = helstrom_convergence_sweep(fam, [0.3], [1e2, 1e3, 1e4])
    assert abs(loglog_slope(rows) + 1) < 0.2


def test_helstrom_exact_when_n_is_constant():
    # traceless generator: the vacuum-block term vanishes and M K(tau) = K(Gamma)
    base, gen = np.diag([1.0, 2.0]), np.array([[0.0, 1.0], [1.0, 0.0]])
    fam = RareFamily.from_intensity_family(
        ParamFamily(lambda t: base + t[0] * gen, lambda t: [gen]))
    rows = helstrom_convergence_sweep(fam, [0.3], [1e2, 1e4])
    assert all(r.abs_error < 1e-12 for r in rows)


def test_finite_m_values_in_range():
    r = np.random.default_rng(3)
    for _ in range(10):
        A = r.normal(size=(2, 2)) + 1j * r.normal(size=(2, 2))
        B = r.normal(size=(2, 2)) + 1j * r.normal(size=(2, 2))
        for M in (100, 1000):
            rows = convergence_sweep(A @ A.conj().T, B @ B.conj().T, [M], "fidelity")
            assert 0 < rows[0].finite <= 1
            rows = convergence_sweep(A @ A.conj().T, B @ B.conj().T, [M], "kl")
            assert rows[0].finite >= 0
    assert dv.poisson_state_fidelity([[1.0]], [[1.0]]) == 1.0
