import random

import pytest
import sympy as sp
from hypothesis import given, strategies as st

from builders import (T2, XY, const, euler, manylines, q, rand_commuting_family, rand_matrix,
                      random_form, random_poly, threelines, var)
from pfaffian import linalg
from pfaffian.blowup import blowup_pullback
from pfaffian.connection import Connection, PolarComponent, gauge
from pfaffian.exterior import MatrixKForm, ScalarKForm, d, wedge
from pfaffian.logpole import (NotLogarithmicError, conjugacy_constancy, is_logarithmic, residue,
                              residue_commutativity, resonance_report, saito_decompose)

seeds = st.integers(0, 2 ** 32 - 1)
dt1, dt2 = ScalarKForm.dt(0, T2), ScalarKForm.dt(1, T2)


def _mform(mat_of_forms):
    return MatrixKForm(mat_of_forms, 1)


def test_euler_is_logarithmic_with_constant_residues():
    rng = random.Random(1)
    A1, A2 = rand_commuting_family(rng, 2, 2)
    conn = euler([A1, A2])
    assert is_logarithmic(conn, 0) and is_logarithmic(conn, 1)
    assert residue(conn, 0).constant_matrix() == A1
    assert residue(conn, 1).constant_matrix() == A2


def test_non_logarithmic_witness():
    t1 = var(0, T2)
    A = [[q(1), q(2)], [q(0), q(1)]]
    conn = Connection(_mform([[dt2 * (t1 ** -1 * x) for x in r] for r in A]),
                      [PolarComponent.coordinate(0)])
    chk = is_logarithmic(conn, 0)
    assert not chk and chk.witness is not None
    with pytest.raises(NotLogarithmicError):
        residue(conn, 0)


def test_threelines_is_logarithmic_on_all_lines():
    conn = threelines()
    for c in conn.polar:
        assert is_logarithmic(conn, c)
    x, y = var(0, XY), var(1, XY)
    assert is_logarithmic(conn, x * y * (x - y))


def test_threelines_coordinate_residues():
    conn = threelines()
    x, y = var(0, XY), var(1, XY)
    assert residue(conn, 0).as_laurent() == [[y ** -1]]
    assert residue(conn, 1).as_laurent() == [[x ** -1]]


def _diagonal_line_residue_oracle():
    """Residue of the threelines form on y = x in coordinates (x, f = y - x), via sympy."""
    X, F = sp.symbols("x f")
    Y = X + F
    # dx/x - dy/y with dy = dx + df, then divided by f
    coef_df = -1 / Y / F
    return sp.simplify(sp.limit(coef_df * F, F, 0))


def test_threelines_diagonal_residue_matches_sympy_oracle():
    x, y = var(0, XY), var(1, XY)
    oracle = _diagonal_line_residue_oracle()
    got = residue(threelines(), y - x).as_laurent()[0][0]
    for xv in (1, 2, 5, -3):
        assert complex(got.evaluate([xv, xv])) == complex(oracle.subs("x", xv))


def test_residue_of_non_constant_log_part():
    t1, t2 = var(0, T2), var(1, T2)
    A = [[q(1, 3), q(0)], [q(0), q(1, 7)]]
    B = [[q(0), q(-4, 21)], [q(0), q(0)]]
    hol = [[dt2, ScalarKForm.zero(1, T2)], [dt1 * t2, dt2 * t1]]
    om = _mform([[dt1 * (t1 ** -1 * (const(A[i][j], T2) + t2 * B[i][j])) + hol[i][j]
                  for j in range(2)] for i in range(2)])
    conn = Connection(om, [PolarComponent.coordinate(0)])
    assert residue(conn, 0).as_laurent() == [[const(A[i][j], T2) + t2 * B[i][j]
                                              for j in range(2)] for i in range(2)]


def test_saito_on_euler():
    rng = random.Random(4)
    A1, A2 = rand_commuting_family(rng, 3, 2)
    dec = saito_decompose(euler([A1, A2]))
    assert [[[p.constant_term() for p in r] for r in A] for A in dec.residues] == [A1, A2]
    assert dec.eta.is_zero()


@given(seeds)
def test_saito_roundtrip_with_holomorphic_remainder(seed):
    rng = random.Random(seed)
    n = 2
    A1, A2 = rand_commuting_family(rng, n, 2)
    eta0 = MatrixKForm([[random_form(rng, 1, T2, 0, 2) for _ in range(n)] for _ in range(n)], 1)
    conn = Connection(euler([A1, A2]).omega + eta0,
                      [PolarComponent.coordinate(0), PolarComponent.coordinate(1)])
    dec = saito_decompose(conn)
    assert dec.eta == eta0
    assert [[[p.constant_term() for p in r] for r in A] for A in dec.residues] == [A1, A2]
    num, den = dec.reassemble()
    assert num == conn.numerator * den


def test_saito_on_blown_up_manylines():
    rng = random.Random(8)
    m1, m2 = rand_matrix(rng, 2), rand_matrix(rng, 2)
    m3 = rand_matrix(rng, 2)
    lams = [q(0), q(1), q(-2)]
    B = [[m1[i][j] + m2[i][j] + m3[i][j] for j in range(2)] for i in range(2)]
    pulled = blowup_pullback(manylines([m1, m2, m3], lams), 2)
    dec = saito_decompose(pulled)
    res = {str(f): [[p.constant_term() for p in r] for r in A]
           for f, A in zip(dec.components, dec.residues)}
    sprime = var(0, pulled.vars)
    assert res[str(var(1, pulled.vars))] == B
    for lam, A in zip(lams, (m1, m2, m3)):
        assert res[str(sprime - const(lam, pulled.vars))] == A
    assert dec.eta.is_zero()


def test_commutativity_reports():
    rng = random.Random(2)
    assert residue_commutativity(euler(rand_commuting_family(rng, 3, 3))).ok
    bad = residue_commutativity(euler([rand_matrix(rng, 2), rand_matrix(rng, 2)]))
    assert not bad.ok and bad.violations == [(0, 1)]


def test_commutativity_after_manylines_blowup():
    rng = random.Random(3)
    A = rand_commuting_family(rng, 2, 3)
    pulled = blowup_pullback(manylines(A, [q(1), q(2), q(3)]), 2)
    dec = saito_decompose(pulled)
    for X in dec.residues:
        for Y in dec.residues:
            assert linalg.is_zero_matrix(linalg.commutator(
                [[p.constant_term() for p in r] for r in X],
                [[p.constant_term() for p in r] for r in Y]))


def _unimodular_t2(rng):
    one, zero = const(1, T2), const(0, T2)
    t2 = var(1, T2)
    c = rng.choice([q(1), q(-2), q(1, 2)])
    H = [[one, t2 * c], [zero, one]]
    Hi = [[one, -(t2 * c)], [zero, one]]
    return H, Hi


def test_conjugacy_constancy_examples():
    rng = random.Random(6)
    C = [[q(1, 2), q(1)], [q(0), q(-1, 3)]]
    conn = euler([C])
    assert conjugacy_constancy(conn, 0)
    conn2 = euler([C, [[q(0)] * 2] * 2])
    H, Hi = _unimodular_t2(rng)
    g = gauge(conn2, H, Hi)
    assert not residue(g, 0).is_constant()
    assert conjugacy_constancy(g, 0)
    t1, t2 = var(0, T2), var(1, T2)
    broken = Connection(_mform([[dt1 * (t1 ** -1 * t2), ScalarKForm.zero(1, T2)],
                                [ScalarKForm.zero(1, T2), ScalarKForm.zero(1, T2)]]),
                        [PolarComponent.coordinate(0)])
    assert not conjugacy_constancy(broken, 0)


@given(seeds)
def test_conjugacy_constancy_gauge_invariant(seed):
    rng = random.Random(seed)
    A1, A2 = rand_commuting_family(rng, 2, 2)
    conn = euler([A1, A2])
    H, Hi = _unimodular_t2(rng)
    C = [[q(1), q(1)], [q(1), q(2)]]
    for g in (gauge(conn, C), gauge(conn, H, Hi)):
        assert conjugacy_constancy(g, 0) == conjugacy_constancy(conn, 0)


def test_resonance_examples():
    assert resonance_report({"matrix": [[q(0), q(0)], [q(0), q(1, 2)]]}).verdict == "nonresonant"
    rep = resonance_report([[q(1, 2), q(1, 3)], [q(3, 2), q(1, 3)]])
    assert rep.resonant
    cls = {(p.i, p.j): p.classification for p in rep.pairs}
    assert cls[(1, 0)] == "nonnegative-integer" and cls[(0, 1)] == "integer"
    assert resonance_report({"matrix": [[q(0), q(0)], [q(0), q(5)]]}).resonant
    assert resonance_report({"matrix": [[0.0, 0.0], [0.0, 2.0 + 1e-12]]}).resonant
    assert not resonance_report({"matrix": [[0.0, 0.0], [0.0, 0.5]]}).resonant


V3 = ("t1", "t2", "t3")


def _random_log_form(rng):
    ts = [var(i, V3) for i in range(3)]
    w = random_form(rng, 1, V3, 0, 2)
    for i in range(3):
        w = w + ScalarKForm.dt(i, V3) * (ts[i] ** -1 * random_poly(rng, V3, 2, 0, 1))
    return w


@given(seeds)
def test_wedge_of_log_forms_is_log(seed):
    rng = random.Random(seed)
    a, b = _random_log_form(rng), _random_log_form(rng)
    f = var(0, V3) * var(1, V3) * var(2, V3)
    ab = wedge(a, b)
    assert not (ab * f).has_negative_exponents()
    assert not wedge(d(ScalarKForm.function(f)), ab).has_negative_exponents()


@given(seeds)
def test_closed_log_forms_have_constant_residues(seed):
    rng = random.Random(seed)
    ts = [var(i, T2) for i in range(2)]
    a = [q(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(2)]
    w = d(ScalarKForm.function(random_poly(rng, T2, 3, 0, 3)))
    for i in range(2):
        w = w + ScalarKForm.dt(i, T2) * (ts[i] ** -1 * a[i])
    conn = Connection(MatrixKForm([[w]]), [PolarComponent.coordinate(0),
                                           PolarComponent.coordinate(1)])
    for i in range(2):
        r = residue(conn, i)
        assert r.is_constant() and r.constant_matrix() == [[a[i]]]
