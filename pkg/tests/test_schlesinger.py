import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pfaffian.schlesinger import (CollisionError, SchlesingerState, flatness_defect, integrate,
                                  isomonodromy_check, rhs)
from pfaffian.transport import PathSpec

seeds = st.integers(0, 2 ** 32 - 1)
TOL = 1e-10


def random_state(rng: np.random.Generator, k=3, n=2, scale=0.3) -> SchlesingerState:
    lam = np.array([0.0, 1.0, 2.0 + 0.5j, -1.0 + 1.5j][:k]) + 0.1 * (
        rng.normal(size=k) + 1j * rng.normal(size=k))
    res = scale * (rng.normal(size=(k, n, n)) + 1j * rng.normal(size=(k, n, n)))
    res[-1] = -res[:-1].sum(0)
    return SchlesingerState(lam, res)


def random_path(rng, lam, legs=2, size=0.15) -> PathSpec:
    pts = [lam]
    for _ in range(legs):
        pts.append(pts[-1] + size * (rng.normal(size=len(lam)) + 1j * rng.normal(size=len(lam))))
    return PathSpec.polyline(pts)


def oracle_rhs(lam, res, v):
    """Direct double loop over the pole pairs."""
    k = len(lam)
    out = []
    for s in range(k):
        acc = np.zeros_like(res[s])
        for j in range(k):
            if j != s:
                comm = res[s] @ res[j] - res[j] @ res[s]
                acc = acc - comm * (v[s] - v[j]) / (lam[s] - lam[j])
        out.append(acc)
    return np.array(out)


@given(seeds)
def test_rhs_matches_oracle(seed):
    rng = np.random.default_rng(seed)
    st0 = random_state(rng)
    v = rng.normal(size=3) + 1j * rng.normal(size=3)
    want = oracle_rhs(st0.lambdas, st0.residues, v)
    assert np.abs(rhs(st0, v) - want).max() <= 1e-13 * max(1.0, np.abs(want).max())


@given(seeds)
def test_rhs_summand_antisymmetry(seed):
    # swapping s and j and negating the direction leaves each summand unchanged
    rng = np.random.default_rng(seed)
    st0 = random_state(rng, k=2)
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    swapped = SchlesingerState(st0.lambdas[::-1].copy(), st0.residues[::-1].copy())
    a = rhs(st0, v)
    b = rhs(swapped, -v[::-1])
    assert np.abs(a - (-b[::-1])).max() <= 1e-13 * max(1.0, np.abs(a).max())


@given(seeds)
def test_rhs_preserves_residue_sum(seed):
    rng = np.random.default_rng(seed)
    st0 = random_state(rng, k=4, n=3)
    v = rng.normal(size=4)
    assert np.abs(rhs(st0, v).sum(0)).max() < 1e-12


def test_rhs_vanishes_on_diagonal_data():
    res = np.array([np.diag([0.2, -0.1]), np.diag([0.3, 0.4]), np.diag([-0.5, -0.3])])
    st0 = SchlesingerState(np.array([0, 1, 2.5]), res)
    assert np.abs(rhs(st0, [1, -2, 0.5j])).max() == 0


def test_rhs_vanishes_for_two_balanced_poles():
    A = np.array([[0.1, 0.3], [0.2, -0.4]])
    st0 = SchlesingerState(np.array([0, 1.0]), np.array([A, -A]))
    assert np.abs(rhs(st0, [0.3, -1])).max() == 0


def test_rhs_rejects_bad_direction():
    st0 = random_state(np.random.default_rng(0))
    with pytest.raises(ValueError):
        rhs(st0, [1, 2])


def test_integrate_diagonal_data_is_constant():
    res = np.array([np.diag([0.2, -0.1]), np.diag([0.3, 0.4]), np.diag([-0.5, -0.3])]) + 0j
    st0 = SchlesingerState(np.array([0, 1, 2.5 + 0j]), res)
    out = integrate(st0, random_path(np.random.default_rng(1), st0.lambdas), TOL)
    assert np.abs(out.residues - res).max() <= TOL


def test_integrate_two_balanced_poles_is_constant():
    A = np.array([[0.1, 0.3], [0.2, -0.4]]) + 0j
    st0 = SchlesingerState(np.array([0, 1.0 + 0j]), np.array([A, -A]))
    out = integrate(st0, random_path(np.random.default_rng(2), st0.lambdas), TOL)
    assert np.abs(out.residues - st0.residues).max() <= TOL


@given(seeds)
@settings(max_examples=10)
def test_forward_then_reverse_returns(seed):
    rng = np.random.default_rng(seed)
    st0 = random_state(rng)
    path = random_path(rng, st0.lambdas)
    there = integrate(st0, path, TOL)
    back = integrate(there, path.reversed(), TOL)
    assert np.abs(back.residues - st0.residues).max() <= 10 * TOL


@given(seeds)
@settings(max_examples=10)
def test_first_integrals_drift(seed):
    rng = np.random.default_rng(seed)
    st0 = random_state(rng)
    out = integrate(st0, random_path(rng, st0.lambdas), TOL)
    assert out.info["sum_drift"] <= 10 * TOL
    assert out.info["charpoly_drift"] <= 10 * TOL
    assert np.abs(np.trace(out.residues, axis1=1, axis2=2)
                  - np.trace(st0.residues, axis1=1, axis2=2)).max() <= 10 * TOL
    assert np.abs(np.linalg.det(out.residues) - np.linalg.det(st0.residues)).max() <= 10 * TOL


def test_integrate_reports_collision():
    st0 = random_state(np.random.default_rng(3))
    lam = st0.lambdas
    target = lam.copy()
    target[1] = lam[0]
    with pytest.raises(CollisionError, match="collision"):
        integrate(st0, PathSpec.polyline([lam, target]), TOL)


def test_state_rejects_unbalanced_residues():
    st0 = random_state(np.random.default_rng(4))
    st0.residues[0] += 1
    with pytest.raises(ValueError, match="sum to zero"):
        integrate(st0, random_path(np.random.default_rng(0), st0.lambdas), TOL)


def test_isomonodromy_trivial_deformation():
    st0 = random_state(np.random.default_rng(5))
    rep = isomonodromy_check(st0, st0.copy())
    assert rep.max_difference == 0 and rep.ok


def test_isomonodromy_diagonal_data():
    res = np.array([np.diag([0.2, -0.1]), np.diag([0.3, 0.4]), np.diag([-0.5, -0.3])]) + 0j
    st0 = SchlesingerState(np.array([0, 1, 2.5 + 0j]), res)
    st1 = integrate(st0, random_path(np.random.default_rng(6), st0.lambdas, size=0.1), TOL)
    rep = isomonodromy_check(st0, st1)
    assert rep.ok


@pytest.mark.parametrize("seed", [7, 8, 9])
def test_isomonodromy_generic_small_deformation(seed):
    rng = np.random.default_rng(seed)
    st0 = random_state(rng)
    st1 = integrate(st0, random_path(rng, st0.lambdas, legs=1, size=0.1), TOL)
    rep = isomonodromy_check(st0, st1)
    assert rep.max_difference <= 1e-6


def test_non_isomonodromic_change_is_detected():
    # with three 2x2 poles the trace data is rigid, so use four
    rng = np.random.default_rng(10)
    st0 = random_state(rng, k=4)
    moved = SchlesingerState(st0.lambdas + np.array([0, 0.1j, -0.2, 0.1]), st0.residues.copy())
    assert not isomonodromy_check(st0, moved).ok
    st1 = integrate(st0, PathSpec.polyline([st0.lambdas, moved.lambdas]), TOL)
    assert isomonodromy_check(st0, st1).ok


def test_flatness_bridge_along_trajectory():
    rng = np.random.default_rng(11)
    st0 = random_state(rng)
    path = random_path(rng, st0.lambdas)
    zs = [0.5 + 2j, -1.3 - 0.4j, 3.1 + 0.2j]
    state = st0
    for a, b in zip(path.points, path.points[1:]):
        state = integrate(state, PathSpec.polyline([a, b]), TOL)
        assert flatness_defect(state, zs) <= 1e-6
