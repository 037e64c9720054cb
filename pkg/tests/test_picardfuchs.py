import math
import random
from fractions import Fraction

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, strategies as st

from builders import q
from pfaffian._sym import to_sympy
from pfaffian.exterior import ScalarKForm, d, wedge
from pfaffian.picardfuchs import (FamilyError, HFamily, PeriodError, compute_R, coframe_check,
                                  discriminant, divide_2form, division_identities,
                                  elliptic_coframe, elliptic_family, elliptic_periods,
                                  milnor_number, period_determinants, picard_lefschetz_check)
from pfaffian.scalars import ExactScalar, LaurentPoly

W = ("w1", "w2")
seeds = st.integers(0, 2 ** 32 - 1)
w1, w2 = LaurentPoly.var(0, W), LaurentPoly.var(1, W)
dw1, dw2 = ScalarKForm.dt(0, W), ScalarKForm.dt(1, W)
ROOT = math.sqrt(4 / 27)


def _w(terms):
    return LaurentPoly({e: ExactScalar.coerce(c) for e, c in terms.items()}, W)


# ------------------------------------------------------------------ Milnor numbers
def test_milnor_number_cusp():
    assert milnor_number(_w({(0, 2): 1, (3, 0): 1}), (2, 3)) == 2


@pytest.mark.parametrize("r", [2, 3, 4])
def test_milnor_number_homogeneous(r):
    assert milnor_number(_w({(r, 0): 1, (0, r): 1})) == (r - 1) ** 2


def test_milnor_number_node():
    assert milnor_number(_w({(1, 1): 1})) == 1


def test_milnor_number_rejects_non_isolated():
    with pytest.raises(FamilyError):
        milnor_number(_w({(2, 1): 1}))


def test_family_validation():
    with pytest.raises(FamilyError, match="quasihomogeneous"):
        HFamily((1, 1), _w({(2, 0): 1, (0, 3): 1}), ())
    with pytest.raises(FamilyError, match="lower degree"):
        HFamily((2, 3), _w({(0, 2): 1, (3, 0): 1}), ((3, 0),))


# ------------------------------------------------------------------ coframes
def test_coframe_elliptic_is_basic():
    chk = coframe_check(elliptic_family(), elliptic_coframe())
    assert chk and chk.degree_sum == chk.expected == 12


def test_coframe_with_closed_form_is_dependent():
    chk = coframe_check(elliptic_family(), [dw1 * w2, dw1 * w1 ** 2])
    assert not chk and "dependent" in chk.reason


def test_coframe_degree_condition():
    chk = coframe_check(elliptic_family(), [dw1 * w2, dw1 * w2])
    assert not chk and "degree" in chk.reason


# ------------------------------------------------------------------ division
def test_divide_differential_of_coframe_form():
    fam = elliptic_family()
    sig = elliptic_coframe()
    for j, s in enumerate(sig):
        om = ScalarKForm(2, {(0, 1): fam.lift(d(s).coefficient((0, 1)))}, fam.vars)
        res = divide_2form(fam, om, sig)
        assert res.eta.is_zero()
        assert [c.constant_term() for c in res.remainder] == [q(int(i == j)) for i in range(2)]


@given(seeds)
def test_multiple_of_dH_has_zero_remainder(seed):
    rng = random.Random(seed)
    fam = elliptic_family()
    V = fam.vars
    H1, H2 = fam.full_jacobian()
    dH = ScalarKForm(1, {(0,): H1, (1,): H2}, V)
    eta = ScalarKForm(1, {(i,): LaurentPoly({tuple(rng.randint(0, 2) for _ in V):
                                             ExactScalar(Fraction(rng.randint(-4, 4), 3))},
                                            V) for i in range(2)}, V)
    om = wedge(eta, dH)
    res = divide_2form(fam, om, elliptic_coframe())
    assert all(c.is_zero() for c in res.remainder)
    assert res.residual(fam, om, elliptic_coframe()).is_zero()


@given(seeds)
def test_division_residual_is_exactly_zero(seed):
    rng = random.Random(seed)
    fam = elliptic_family()
    V = fam.vars
    g = LaurentPoly({tuple(rng.randint(0, 3) for _ in V): ExactScalar(Fraction(
        rng.randint(-5, 5), rng.choice((1, 2, 7)))) for _ in range(4)}, V)
    om = ScalarKForm(2, {(0, 1): g}, V)
    res = divide_2form(fam, om, elliptic_coframe())
    assert res.residual(fam, om, elliptic_coframe()).is_zero()


def test_division_identities_hold():
    fam = elliptic_family()
    for om, res in division_identities(fam, elliptic_coframe()):
        assert res.residual(fam, om, elliptic_coframe()).is_zero()


# ------------------------------------------------------------------ R(t)
def _reduction_oracle():
    """Remainders of ``H g`` modulo the full Jacobian ideal, by univariate division in w1.

    The coframe differentials are ``-g dw1^dw2`` with ``g = 1, w1``; dividing
    by ``dH`` amounts to reducing ``H g`` modulo ``<H_w1, H_w2>``.
    """
    a, b, t1, t2 = sp.symbols("w1 w2 t1 t2")
    H = b ** 2 + a ** 3 + t2 * a + t1
    rows = []
    for g in (1, a):
        r = sp.Poly(H * g, a, b)
        r = sp.Poly(r.as_expr().subs(b, 0), a)       # H_w2 = 2 w2
        r = sp.rem(r, sp.Poly(3 * a ** 2 + t2, a))    # H_w1 = 3 w1^2 + t2
        r = sp.Poly(r, a)
        rows.append([sp.expand(r.coeff_monomial(1)), sp.expand(r.coeff_monomial(a))])
    return rows, (t1, t2)


def test_R_matches_reduction_oracle():
    fam = elliptic_family()
    R = compute_R(fam, elliptic_coframe())
    oracle, syms = _reduction_oracle()
    for i in range(2):
        for j in range(2):
            assert sp.expand(to_sympy(R[i][j], syms) - oracle[i][j]) == 0


def test_discriminant_matches_resultant():
    fam = elliptic_family()
    D = discriminant(compute_R(fam, elliptic_coframe()))
    a, t1, t2 = sp.symbols("w1 t1 t2")
    p = a ** 3 + t2 * a + t1
    res = sp.resultant(p, sp.diff(p, a), a)
    ratio = sp.cancel(to_sympy(D, (t1, t2)) / res)
    assert ratio.is_number and ratio != 0
    assert sp.expand(res - (4 * t2 ** 3 + 27 * t1 ** 2)) == 0


def test_R_at_origin_matches_division_by_principal_part():
    fam = elliptic_family()
    R = compute_R(fam, elliptic_coframe())
    at0 = [[p.evaluate([q(0), q(0)]) for p in row] for row in R]
    bare = HFamily(fam.weights, fam.principal, ())
    R0 = compute_R(bare, elliptic_coframe())
    assert at0 == [[p.constant_term() for p in row] for row in R0]


def test_det_R_vanishes_at_critical_parameters():
    rng = random.Random(3)
    D = discriminant(compute_R(elliptic_family(), elliptic_coframe()))
    fam = elliptic_family()
    H = fam.H()
    for _ in range(20):
        x = ExactScalar(Fraction(rng.randint(-9, 9), rng.randint(1, 5)))
        # dH = 0 at (x, 0) forces t2 = -3 x^2, then H = 0 forces t1 = 2 x^3
        t = [x * x * x * 2, x * x * -3]
        point = [x, q(0)] + t
        assert H.evaluate(point) == 0
        assert all(g.evaluate(point) == 0 for g in fam.full_jacobian())
        assert D.evaluate(t) == 0


@given(st.integers(-9, 9), st.integers(-9, 9))
def test_det_R_nonzero_off_discriminant(a, b):
    D = discriminant(compute_R(elliptic_family(), elliptic_coframe()))
    assert (D.evaluate([q(a), q(b)]) == 0) == (4 * b ** 3 + 27 * a ** 2 == 0)


# ------------------------------------------------------------------ periods
def _det_R(t):
    return t[0] ** 2 + 4 / 27 * t[1] ** 3


def test_det_X_over_det_R_is_constant():
    pts = [(0.3, -1.0), (0.5 + 0.2j, -1.2), (-0.1 + 0.3j, -0.8 + 0.1j), (0.2, -0.7j),
           (0.9 + 0.3j, -0.5)]
    dets = period_determinants(pts)
    ratios = [dx / _det_R(t) for dx, t in zip(dets, pts)]
    assert max(abs(r / ratios[0] - 1) for r in ratios) <= 1e-4


def test_det_X_is_quadratic_in_t1():
    t2 = -1.0
    t1s = np.linspace(-0.3, 0.3, 7) + 0.05j
    dets = np.array(period_determinants([(t, t2) for t in t1s]))
    coef = np.polyfit(t1s, dets, 2)
    resid = np.abs(np.polyval(coef, t1s) - dets).max()
    assert resid <= 1e-4 * max(1.0, np.abs(dets).max())


def test_period_matrix_is_nondegenerate():
    assert abs(np.linalg.det(elliptic_periods((0.3, -1.0)))) > 1e-3


def test_period_rejects_discriminant_point():
    with pytest.raises(PeriodError):
        elliptic_periods((ROOT, -1.0))


def test_vanishing_column_shrinks_near_discriminant():
    sizes = [np.abs(elliptic_periods((ROOT - eps, -1.0))[:, 0]).max()
             for eps in (1e-1, 1e-2, 1e-3)]
    assert sizes[0] > sizes[1] > sizes[2]


@pytest.mark.parametrize("center", [ROOT, -ROOT])
def test_picard_lefschetz_around_one_root(center):
    res = picard_lefschetz_check(center, -1.0, 0.1)
    assert res.encircled == 1 and res.ok
    assert res.c in (-1, 1)
    assert np.abs(res.monodromy - np.array([[1, res.c], [0, 1]])).max() <= 1e-6


def test_picard_lefschetz_around_no_root():
    res = picard_lefschetz_check(2.0, -1.0, 0.3)
    assert res.encircled == 0
    assert np.abs(res.monodromy - np.eye(2)).max() <= 1e-6


def test_picard_lefschetz_rejects_grazing_loop():
    with pytest.raises(PeriodError, match="too close"):
        picard_lefschetz_check(ROOT + 0.1, -1.0, 0.1)
