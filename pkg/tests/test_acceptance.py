"""End-to-end acceptance criteria 1-11, each printing one PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v``; the summary lines are
printed even when output capture is on.
"""
import itertools
import math
import random
import time
from contextlib import contextmanager

import numpy as np
import pytest
from scipy.linalg import expm

from builders import (T2, XY, const, euler, manylines, nonconstant_residue_model,
                      nonresonant_round_trip_case, q, rand_commuting_family, rand_matrix,
                      random_form, random_matrix_form, random_poly, threelines, var)
from conftest import DATA
from pfaffian import linalg
from pfaffian import serialize as S
from pfaffian.blowup import blowup_pullback
from pfaffian.connection import flatness_residual
from pfaffian.exterior import PolyMap, ScalarKForm, d, pullback, wedge
from pfaffian.logpole import is_logarithmic, residue
from pfaffian.normalform import ClosedLogForm, nabla, poincare_dulac
from pfaffian.picardfuchs import (compute_R, discriminant, division_identities, elliptic_coframe,
                                  elliptic_family, milnor_number, period_determinants,
                                  picard_lefschetz_check)
from pfaffian.schlesinger import SchlesingerState, integrate, isomonodromy_check
from pfaffian.transport import (PathSpec, euler_from_monodromy, euler_loop, exp2pii,
                                holonomy_residue_limit, monodromy)

pytestmark = pytest.mark.acceptance
TWO_PI_I = 2j * math.pi


@pytest.fixture
def criterion(capsys):
    """Context manager timing a criterion and printing its verdict line."""

    @contextmanager
    def run(number, title, limit=None):
        t0 = time.perf_counter()
        verdict, detail = "PASS", ""
        try:
            yield
            elapsed = time.perf_counter() - t0
            if limit is not None and elapsed >= limit:
                verdict, detail = "FAIL", f"over the {limit:g} s limit"
                raise AssertionError(f"criterion {number} took {elapsed:.1f} s (limit {limit} s)")
        except BaseException as exc:
            verdict = "FAIL"
            detail = detail or str(exc).splitlines()[0][:160]
            raise
        finally:
            elapsed = time.perf_counter() - t0
            line = f"ACCEPTANCE {number:>2} {verdict}  {title}  ({elapsed:.2f} s)"
            if detail:
                line += f"  [{detail}]"
            with capsys.disabled():
                print("\n" + line)

    return run


def _is_zero_matrix(M):
    return all(x == 0 for r in M for x in r)


# 1 -----------------------------------------------------------------------------
def test_criterion_01_flatness_iff_commuting(criterion):
    with criterion(1, "Euler flatness <=> commuting residues (200 cases)", 10):
        rng = random.Random(101)
        seen = {True: 0, False: 0}
        for case in range(200):
            n, k = rng.randint(1, 4), rng.randint(1, 3)
            if case % 2:
                mats = rand_commuting_family(rng, n, k)
            else:
                mats = [rand_matrix(rng, n) for _ in range(k)]
            flat = flatness_residual(euler(mats)).is_zero()
            commuting = all(_is_zero_matrix(linalg.commutator(a, b))
                            for a, b in itertools.combinations(mats, 2))
            assert flat == commuting, f"case {case}: flat={flat}, commuting={commuting}"
            seen[flat] += 1
        assert seen[True] and seen[False]


# 2 -----------------------------------------------------------------------------
def test_criterion_02_manylines(criterion):
    with criterion(2, "three balanced lines flat; two lines force [A1,A2]=0"):
        rng = random.Random(202)
        lams = [q(0), q(1), q(-2)]
        for _ in range(5):
            A1, A2 = rand_matrix(rng, 3), rand_matrix(rng, 3)
            assert not _is_zero_matrix(linalg.commutator(A1, A2))
            A3 = [[-(A1[i][j] + A2[i][j]) for j in range(3)] for i in range(3)]
            assert flatness_residual(manylines([A1, A2, A3], lams)).is_zero()
            # two lines: non-commuting residues break flatness
            assert not flatness_residual(manylines([A1, A2], lams[:2])).is_zero()
            B1, B2 = rand_commuting_family(rng, 3, 2)
            assert flatness_residual(manylines([B1, B2], lams[:2])).is_zero()


# 3 -----------------------------------------------------------------------------
def test_criterion_03_threelines(criterion):
    with criterion(3, "threelines residues 1/y, 1/x, -2/x and blow-up pullback"):
        conn = threelines()
        x, y = var(0, XY), var(1, XY)
        problems = []
        if residue(conn, 0).as_laurent() != [[y ** -1]]:
            problems.append("residue on x = 0 is not 1/y")
        if residue(conn, 1).as_laurent() != [[x ** -1]]:
            problems.append("residue on y = 0 is not 1/x")
        diag = residue(conn, y - x)
        got = [diag.evaluate([q(a), q(a)])[0][0] for a in (1, 2, 3)]
        if got != [q(-2, a) for a in (1, 2, 3)]:
            problems.append(f"residue on y = x is {[str(g) for g in got]} at x = 1, 2, 3, "
                            "not -2/x")
        out = blowup_pullback(conn, 1)
        V = out.vars
        t1, s = var(0, V), var(1, V)
        want = ScalarKForm.dt(1, V) * (t1 ** -1)
        den = s * (s - const(1, V))
        lhs = out.numerator.entries[0][0] * den
        if lhs != want * out.denominator:
            sign = " (opposite sign)" if lhs == want * out.denominator * -1 else ""
            problems.append("pullback is not (1/t1) ds/(s(s-1))" + sign)
        flags = {str(c.defining_poly(V)): bool(is_logarithmic(out, c)) for c in out.polar}
        if flags != {"t1": False, "s": True, "-1 + s": True}:
            problems.append(f"log flags {flags}")
        assert not problems, "; ".join(problems)


# 4 -----------------------------------------------------------------------------
def test_criterion_04_poincare_dulac_round_trip(criterion):
    with criterion(4, "Poincare-Dulac round trip, 50 cases at order 8", 60):
        rng = random.Random(404)
        for case in range(50):
            base, conn, _ = nonresonant_round_trip_case(rng, order=8)
            res = poincare_dulac(conn, 8)
            assert res.normal.omega == base.omega, f"case {case}"
            assert res.resonant_terms == []
            again = poincare_dulac(conn, 8)
            assert S.dumps(S.connection_json(again.normal)) == \
                S.dumps(S.connection_json(res.normal))
            assert again == res


# 5 -----------------------------------------------------------------------------
def test_criterion_05_resonant_retention(criterion):
    with criterion(5, "diag(0,1) dt/t keeps exactly one resonant (2,1) term"):
        with open(DATA + "/resonant2x2.json", encoding="utf-8") as fh:
            conn = S.parse_connection(S.loads(fh.read()))
        res = poincare_dulac(conn, 8)
        # 0-based entry (1, 0) is the (2,1) entry; shape t^1 * c dt/t
        assert res.resonant_terms == [((1, 0), (1,), (q(3),))]
        assert res.normal.omega == conn.omega


# 6 -----------------------------------------------------------------------------
def _commuting_pair(rng: np.random.Generator, n):
    """Residue pair sharing an eigenbasis, sometimes with a Jordan block."""
    Q = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    J1 = np.diag(rng.uniform(-0.5, 0.5, n) + 1j * rng.uniform(-0.1, 0.1, n))
    J2 = np.diag(rng.uniform(-0.5, 0.5, n) + 1j * rng.uniform(-0.1, 0.1, n))
    if n > 1 and rng.random() < 0.5:
        J1[1, 1] = J1[0, 0]
        J2[1, 1] = J2[0, 0]
        J1[0, 1] = rng.uniform(0.2, 0.6)
        J2[0, 1] = 2 * J1[0, 1]
    Qi = np.linalg.inv(Q)
    return Q @ J1 @ Qi, Q @ J2 @ Qi


def test_criterion_06_monodromy_realization(criterion):
    with criterion(6, "Euler realization of 50 commuting monodromy pairs", 30):
        rng = np.random.default_rng(606)
        for case in range(50):
            n = int(rng.integers(1, 5))
            A, B = _commuting_pair(rng, n)
            Ms = [expm(TWO_PI_I * A), expm(TWO_PI_I * B)]
            eu = euler_from_monodromy(Ms)
            R = [np.array(X) for X in eu.residues]
            for Rj, Mj in zip(R, Ms):
                assert np.linalg.norm(exp2pii(Rj) - Mj, 2) <= 1e-9, f"case {case}"
            assert np.linalg.norm(R[0] @ R[1] - R[1] @ R[0], 2) <= 1e-9, f"case {case}"
            model = eu.to_connection()
            for j, Mj in enumerate(Ms):
                got = monodromy(model, euler_loop(eu, j), tol=1e-12).matrix
                assert np.linalg.norm(got - Mj, 2) <= 1e-7, f"case {case} loop {j}"


# 7 -----------------------------------------------------------------------------
def test_criterion_07_holonomy_residue_limit(criterion):
    with criterion(7, "small-loop holonomy -> exp(2 pi i (A + cB)) at rate O(r)"):
        c = 0.5
        conn = nonconstant_residue_model()
        lim = holonomy_residue_limit(conn, [0, c], 0, radii=(1e-1, 1e-2, 1e-3))
        A = np.array([[1 / 3, 0], [0, 1 / 7]])
        B = np.array([[0, -4 / 21], [0, 0]])
        assert np.abs(lim.target - expm(TWO_PI_I * (A + c * B))).max() < 1e-12
        assert lim.monotone, f"discrepancies {lim.discrepancies}"
        scaled = [e / r for e, r in zip(lim.discrepancies, lim.radii)]
        assert max(scaled) / min(scaled) < 2, f"discrepancy/r = {scaled}"


# 8 -----------------------------------------------------------------------------
def test_criterion_08_schlesinger_conservation(criterion):
    with criterion(8, "Schlesinger first integrals, isomonodromy, reversibility", 60):
        rng = np.random.default_rng(808)
        tol = 1e-10
        for trial in range(3):
            lam = np.array([0, 1, 2 + 0.5j]) + 0.1 * (rng.normal(size=3) + 1j * rng.normal(size=3))
            res = 0.3 * (rng.normal(size=(3, 2, 2)) + 1j * rng.normal(size=(3, 2, 2)))
            res[-1] = -res[:-1].sum(0)
            st0 = SchlesingerState(lam, res)
            pts = [lam]
            for _ in range(3):
                pts.append(pts[-1] + 0.1 * (rng.normal(size=3) + 1j * rng.normal(size=3)))
            path = PathSpec.polyline(pts)
            st1 = integrate(st0, path, tol)
            assert st1.info["sum_drift"] <= 1e-8, f"trial {trial}"
            assert st1.info["charpoly_drift"] <= 1e-8, f"trial {trial}"
            assert isomonodromy_check(st0, st1).max_difference <= 1e-6, f"trial {trial}"
            back = integrate(st1, path.reversed(), tol)
            assert np.abs(back.residues - st0.residues).max() <= 1e-8, f"trial {trial}"


# 9 -----------------------------------------------------------------------------
def test_criterion_09_picard_fuchs_exact(criterion):
    with criterion(9, "det R = c (4 t2^3 + 27 t1^2); exact division; Milnor numbers"):
        import sympy as sp

        from pfaffian._sym import to_sympy

        fam = elliptic_family()
        sig = elliptic_coframe()
        D = discriminant(compute_R(fam, sig))
        a, t1, t2 = sp.symbols("w1 t1 t2")
        p = a ** 3 + t2 * a + t1
        oracle = sp.resultant(p, sp.diff(p, a), a)
        ratio = sp.cancel(to_sympy(D, (t1, t2)) / oracle)
        assert ratio.is_number and ratio != 0
        assert sp.expand(oracle - (4 * t2 ** 3 + 27 * t1 ** 2)) == 0
        for om, res in division_identities(fam, sig):
            assert res.residual(fam, om, sig).is_zero()
        W = ("w1", "w2")
        cusp = S.parse_poly({"terms": [{"exps": [0, 2], "re": "1"}, {"exps": [3, 0], "re": "1"}]},
                            W)
        assert milnor_number(cusp, (2, 3)) == 2
        cubic = S.parse_poly({"terms": [{"exps": [3, 0], "re": "1"}, {"exps": [0, 3], "re": "1"},
                                        {"exps": [1, 2], "re": "2"}]}, W)
        assert milnor_number(cubic) == (3 - 1) ** 2


# 10 ----------------------------------------------------------------------------
def test_criterion_10_picard_fuchs_numeric(criterion):
    with criterion(10, "det X / det R constant; det X quadratic; Picard-Lefschetz", 120):
        def det_R(t):
            return t[0] ** 2 + 4 / 27 * t[1] ** 3

        pts = [(0.3, -1.0), (0.5 + 0.2j, -1.2), (-0.1 + 0.3j, -0.8 + 0.1j), (0.2, -0.7j),
               (0.9 + 0.3j, -0.5)]
        ratios = [x / det_R(t) for x, t in zip(period_determinants(pts), pts)]
        spread = max(abs(r / ratios[0] - 1) for r in ratios)
        assert spread <= 1e-4, f"ratio spread {spread:.2e}"
        t1s = np.linspace(-0.3, 0.3, 7) + 0.05j
        dets = np.array(period_determinants([(t, -1.0) for t in t1s]))
        fit = np.polyval(np.polyfit(t1s, dets, 2), t1s)
        assert np.abs(fit - dets).max() <= 1e-4
        pl = picard_lefschetz_check(math.sqrt(4 / 27), -1.0, 0.1)
        assert pl.encircled == 1
        assert pl.integer_error <= 1e-6 and pl.unipotent_error <= 1e-6
        assert pl.vanishing_error <= 1e-6 and pl.c in (-1, 1)


# 11 ----------------------------------------------------------------------------
def test_criterion_11_calculus_substrate(criterion):
    with criterion(11, "d^2 = 0, Leibniz, pullback functoriality, nabla^2 = 0", 10):
        rng = random.Random(1111)
        V3 = ("t1", "t2", "t3")
        for _ in range(25):
            k, m = rng.randint(0, 2), rng.randint(0, 1)
            a = random_matrix_form(rng, 2, k, V3, -1, 2)
            b = random_matrix_form(rng, 2, m, V3, -1, 2)
            assert d(d(a)).is_zero()
            sign = -1 if k % 2 else 1
            assert d(wedge(a, b)) == wedge(d(a), b) + wedge(a, d(b)) * sign
            imgs = [random_poly(rng, T2, 2, 0, 2) + const(rng.randint(-2, 2), T2)
                    for _ in range(3)]
            G = PolyMap(T2, imgs)
            U = ("u",)
            u = var(0, U)
            F = PolyMap(U, [u ** 2 + u * rng.randint(-2, 2), u * 3 - 1])
            w = random_form(rng, 1, V3, 0, 2)
            composite = PolyMap(U, [F.apply(p) for p in G.images])
            assert pullback(pullback(w, G), F) == pullback(w, composite)
            alpha = ClosedLogForm([q(rng.randint(-6, 6), rng.randint(1, 5)) for _ in range(2)],
                                  T2)
            x = random_form(rng, rng.randint(0, 1), T2, -2, 3, 3)
            assert nabla(alpha, nabla(alpha, x)).is_zero()
