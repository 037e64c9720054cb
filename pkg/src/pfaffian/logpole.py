"""Logarithmic poles, residues and resonance classification."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import sympy

from . import linalg
from ._sym import to_sympy
from .connection import Connection, PolarComponent
from .exterior import MatrixKForm, ScalarKForm, d, divide_by, wedge
from .scalars import ONE, ExactScalar, LaurentPoly


class NotLogarithmicError(ValueError):
    def __init__(self, witness):
        self.witness = witness
        super().__init__(f"not logarithmic: {witness}")


@dataclass(frozen=True)
class LogCheck:
    """Outcome of :func:`is_logarithmic`; truthy when the pole is logarithmic."""

    ok: bool
    witness: dict | None = None

    def __bool__(self):
        return self.ok


def _as_poly(conn: Connection, f) -> LaurentPoly:
    if isinstance(f, PolarComponent):
        return f.defining_poly(conn.vars)
    if isinstance(f, int):
        return LaurentPoly.var(f, conn.vars)
    if isinstance(f, LaurentPoly):
        if f.vars != conn.vars:
            raise ValueError("component polynomial uses different variables")
        return f
    raise TypeError("component must be a PolarComponent, variable index or LaurentPoly")


def _min_exp(p: LaurentPoly, i: int) -> int:
    return min(e[i] for e in p.terms)


def _dOmega_numerator(conn: Connection) -> MatrixKForm:
    """Numerator of dOmega over F**2."""
    F = conn.denominator
    N = conn.numerator
    if not conn.has_denominator:
        return d(N) * F * F
    return d(N) * F - wedge(d(ScalarKForm.function(F)), N)


def _sym_polys(polys: Sequence[LaurentPoly]):
    vars = polys[0].vars
    syms = sympy.symbols(vars)
    out = []
    for p in polys:
        _, q = p.monomial_content()
        out.append(sympy.Poly(to_sympy(q, syms), *syms, domain="QQ_I"))
    return out


def _holomorphic_along(num: LaurentPoly, den: LaurentPoly, g: LaurentPoly) -> bool:
    """Is ``g * num / den`` free of poles along ``{g = 0}`` (g without monomial factors)?"""
    if not num:
        return True
    P, D, G = _sym_polys([num * g, den, g])
    q = P.gcd(D)
    D1 = D.exquo(q)
    return D1.gcd(G).is_ground


def is_logarithmic(conn: Connection, f) -> LogCheck:
    """Check that ``f*Omega`` and ``f*dOmega`` are holomorphic along ``{f = 0}``.

    On failure the witness names the offending entry, coframe index and (for
    coordinate factors) the offending monomial.
    """
    fp = _as_poly(conn, f)
    content, g = fp.monomial_content()
    F = conn.denominator
    checks = [("Omega", conn.numerator, F), ("dOmega", _dOmega_numerator(conn), F * F)]
    for i, c in enumerate(content):
        if c <= 0:
            continue
        for label, M, den in checks:
            ordF = _min_exp(den, i)
            for (r, col, idx, ex, coef) in M.iter_terms():
                if ex[i] + c - ordF < 0:
                    return LogCheck(False, {"form": label, "entry": [r, col], "index": list(idx),
                                            "exponents": list(ex), "variable": conn.vars[i],
                                            "reason": "pole of excess order"})
    if not g.is_constant():
        for label, M, den in checks:
            for r, row in enumerate(M.entries):
                for col, e in enumerate(row):
                    for idx, p in e.items():
                        if not _holomorphic_along(p, den, g):
                            return LogCheck(False, {"form": label, "entry": [r, col],
                                                    "index": list(idx), "component": str(g),
                                                    "reason": "denominator survives along "
                                                              "component"})
    return LogCheck(True, None)


# ---------------------------------------------------------------------------
# residues


@dataclass(frozen=True)
class Residue:
    """Residue matrix on a component, as ``numerator / denominator``.

    The eliminated variable has been solved for on the component; the
    remaining variables parametrize it.
    """

    numerator: tuple
    denominator: LaurentPoly
    eliminated: int
    component: LaurentPoly

    def as_laurent(self) -> list:
        """Residue as a matrix of Laurent polynomials (denominator must divide)."""
        out = []
        for row in self.numerator:
            r = []
            for p in row:
                q = p.divide_exact(self.denominator)
                if q is None:
                    raise ArithmeticError("residue is not a Laurent polynomial")
                r.append(q)
            out.append(r)
        return out

    def is_laurent(self) -> bool:
        try:
            self.as_laurent()
        except ArithmeticError:
            return False
        return True

    def is_constant(self) -> bool:
        return self.is_laurent() and all(p.is_constant() for r in self.as_laurent() for p in r)

    def constant_matrix(self) -> list:
        mat = self.as_laurent()
        if not all(p.is_constant() for r in mat for p in r):
            raise ValueError("residue is not constant")
        return [[p.constant_term() for p in r] for r in mat]

    def evaluate(self, point) -> list:
        den = self.denominator.evaluate(point)
        return [[p.evaluate(point) / den for p in r] for r in self.numerator]


def _restriction_variable(f: LaurentPoly, prefer: int | None = None):
    """A variable ``t_p`` in which ``f = a*t_p + b`` with monomial ``a`` free of ``t_p``."""
    cands = []
    for p in range(f.nvars):
        if any(e[p] > 1 or e[p] < 0 for e in f.terms):
            continue
        a = LaurentPoly({tuple(x if k != p else 0 for k, x in enumerate(e)): c
                         for e, c in f.terms.items() if e[p] == 1}, f.vars)
        if a and a.is_monomial():
            b = LaurentPoly({e: c for e, c in f.terms.items() if e[p] == 0}, f.vars)
            cands.append((p, a, b))
    if not cands:
        raise ValueError(f"component {f} is not linear with monomial coefficient in any variable")
    if prefer is not None:
        for cand in cands:
            if cand[0] == prefer:
                return cand
        raise ValueError(f"component {f} cannot be solved for variable {prefer}")
    return cands[-1]


def _restrict_quotient(num: list, den: LaurentPoly, f: LaurentPoly, prefer=None):
    """Restrict the matrix ``num/den`` to ``{f = 0}`` by solving for one variable."""
    p, a, b = _restriction_variable(f, prefer)
    vars = f.vars
    polys = [q for r in num for q in r] + [den]
    K = max([0] + [-e[p] for q in polys for e in q.terms])
    if K:
        unit = tuple(K if i == p else 0 for i in range(len(vars)))
        num = [[q.shift(unit) for q in r] for r in num]
        den = den.shift(unit)
    images = [LaurentPoly.var(i, vars) for i in range(len(vars))]
    images[p] = -(b * (a ** -1))
    sub = lambda q: q.substitute(images, vars)  # noqa: E731
    rnum = [[sub(q) for q in r] for r in num]
    rden = sub(den)
    if not rden:
        raise ArithmeticError("denominator vanishes identically on the component")
    if rden.is_monomial():
        rnum = [[q.divide_exact(rden) for q in r] for r in rnum]
        rden = LaurentPoly.constant(ONE, vars)
    return rnum, rden, p


def residue(conn: Connection, f, eliminate: int | None = None) -> Residue:
    """Residue of a logarithmic connection on the smooth component ``{f = 0}``.

    Writes ``G f Omega = P`` with ``G`` the cofactor of ``f`` in the
    denominator, splits ``P = theta df + f eta`` by two exact divisions by
    ``df`` and restricts ``theta / G`` to the component.
    """
    fp = _as_poly(conn, f)
    chk = is_logarithmic(conn, fp)
    if not chk:
        raise NotLogarithmicError(chk.witness)
    F = conn.denominator
    if fp.is_monomial():
        (ex, _c), = fp.terms.items()
        i = next(k for k, x in enumerate(ex) if x)
        e = max(0, _min_exp(F, i))
        G = F.shift(tuple(-e if k == i else 0 for k in range(len(ex))))
    else:
        e, G = 0, F
        while True:
            q = G.divide_exact(fp)
            if q is None or q.has_negative_exponents():
                break
            G, e = q, e + 1
    # P = f * G * Omega = N * f / f**e
    N = conn.numerator
    if e == 0:
        P = N * fp
    else:
        fe1 = fp ** (e - 1)
        P = N.map_coeffs(lambda c: _exact_div(c, fe1))
    df = d(ScalarKForm.function(fp))
    n = conn.n
    theta = []
    for r in range(n):
        row = []
        for c in range(n):
            Pij = P.entries[r][c]
            Qij = wedge(df, Pij).map_coeffs(lambda x: _exact_div(x, fp))
            eta = divide_by(-Qij, df) if Qij else ScalarKForm.zero(1, conn.vars)
            rest = Pij - eta * fp
            th = divide_by(rest, df) if rest else ScalarKForm.zero(0, conn.vars)
            row.append(th.coefficient(()))
        theta.append(row)
    rnum, rden, p = _restrict_quotient(theta, G, fp, eliminate)
    return Residue(tuple(tuple(r) for r in rnum), rden, p, fp)


def _exact_div(p: LaurentPoly, q: LaurentPoly) -> LaurentPoly:
    out = p.divide_exact(q)
    if out is None:
        raise ArithmeticError("expected exact division failed; input is not logarithmic")
    return out


# ---------------------------------------------------------------------------
# Saito decomposition


@dataclass
class LogDecomposition:
    """``Omega = sum_j A_j df_j / f_j + eta`` with holomorphic ``eta``."""

    components: list
    residues: list
    eta: MatrixKForm
    vars: tuple = field(default=())

    def reassemble(self) -> "tuple[MatrixKForm, LaurentPoly]":
        """Return ``(numerator, denominator)`` of the reassembled form."""
        den = LaurentPoly.constant(ONE, self.vars)
        for f in self.components:
            if not f.is_monomial():
                den = den * f
        num = self.eta * den
        for f, A in zip(self.components, self.residues):
            df = d(ScalarKForm.function(f))
            if f.is_monomial():
                co = den * (f ** -1)
            else:
                co = den.divide_exact(f)
            n = len(A)
            num = num + MatrixKForm._raw([[df * (A[i][j] * co) for j in range(n)]
                                          for i in range(n)], 1, self.vars)
        return num, den


def saito_decompose(conn: Connection, components: Sequence | None = None) -> LogDecomposition:
    """Split a logarithmic connection into residue terms and a holomorphic part."""
    comps = list(conn.polar) if components is None else list(components)
    polys = [_as_poly(conn, c) for c in comps]
    residues = []
    for f in polys:
        res = residue(conn, f)
        A = res.as_laurent()
        if any(p.has_negative_exponents() for r in A for p in r):
            raise ValueError(f"residue on {f} is not holomorphic; not a normal crossing")
        residues.append(A)
    decomp = LogDecomposition(polys, residues, MatrixKForm.zero(conn.n, 1, conn.vars), conn.vars)
    num, den = decomp.reassemble()
    # eta = Omega - sum A df/f = (N*den - F*num_wo_eta) / (F*den)
    F = conn.denominator
    top = conn.numerator * den - num * F
    bottom = F * den
    eta = top.map_coeffs(lambda p: _exact_div(p, bottom))
    if eta.has_negative_exponents():
        raise ValueError("remainder is not holomorphic")
    decomp.eta = eta
    return decomp


# ---------------------------------------------------------------------------
# commutativity, conjugacy, resonance


@dataclass
class CommutativityReport:
    commutators: dict
    violations: list

    @property
    def ok(self) -> bool:
        return not self.violations


def residue_commutativity(conn: Connection) -> CommutativityReport:
    """Commutators of coordinate residues restricted to pairwise intersections."""
    coords = [c.var for c in conn.polar if c.kind == "coordinate"]
    vars = conn.vars
    res = {}
    for i in coords:
        res[i] = residue(conn, i).as_laurent()
    comms, bad = {}, []
    for i, j in itertools.combinations(coords, 2):
        C = linalg.commutator(res[i], res[j])
        images = [LaurentPoly.var(k, vars) for k in range(len(vars))]
        images[i] = LaurentPoly.zero(vars)
        images[j] = LaurentPoly.zero(vars)
        Cr = []
        for r in C:
            row = []
            for p in r:
                if any(e[i] < 0 or e[j] < 0 for e in p.terms):
                    raise ValueError("residues have poles on the intersection")
                row.append(p.substitute(images, vars))
            Cr.append(row)
        comms[(i, j)] = Cr
        if not linalg.is_zero_matrix(Cr):
            bad.append((i, j))
    return CommutativityReport(comms, bad)


def conjugacy_constancy(conn: Connection, component) -> bool:
    """All characteristic-polynomial coefficients of the residue are constant."""
    A = residue(conn, component).as_laurent()
    return all(c.is_constant() for c in linalg.charpoly(A))


@dataclass(frozen=True)
class PairClass:
    i: int
    j: int
    difference: tuple
    classification: str


@dataclass
class ResonanceReport:
    """Classification of pairwise differences of residue data.

    ``pairs`` lists ordered pairs ``(i, j)`` with ``a_i - a_j``.  In the
    vector case a pair is resonant when the difference is an integer vector
    (zero included); in the matrix case when eigenvalues differ by a nonzero
    integer.
    """

    mode: str
    pairs: list
    resonant_pairs: list

    @property
    def resonant(self) -> bool:
        return bool(self.resonant_pairs)

    @property
    def verdict(self) -> str:
        return "resonant" if self.resonant else "nonresonant"


def _classify_exact(diff) -> str:
    if all(x.is_integer for x in diff):
        return "nonnegative-integer" if all(x.re >= 0 for x in diff) else "integer"
    return "non-integer"


def _classify_float(diff, tol) -> str:
    ints = []
    for x in diff:
        z = complex(x)
        k = round(z.real)
        if abs(z - k) >= tol:
            return "non-integer"
        ints.append(k)
    return "nonnegative-integer" if all(k >= 0 for k in ints) else "integer"


def resonance_report(data, tol: float = 1e-9) -> ResonanceReport:
    """Classify residue-vector differences (list of vectors) or eigenvalues of one matrix.

    ``data`` is either a sequence of residue vectors ``a_1..a_n`` (one per
    diagonal entry) or ``{"matrix": A}``.
    """
    if isinstance(data, dict) and "matrix" in data:
        return _matrix_resonance(data["matrix"], tol)
    vecs = [tuple(v) for v in data]
    exact = all(isinstance(x, ExactScalar) for v in vecs for x in v)
    pairs, res = [], []
    for i, j in itertools.permutations(range(len(vecs)), 2):
        diff = tuple(a - b for a, b in zip(vecs[i], vecs[j]))
        cls = _classify_exact(diff) if exact else _classify_float(diff, tol)
        pairs.append(PairClass(i, j, diff, cls))
        if cls != "non-integer":
            res.append((i, j))
    return ResonanceReport("vectors", pairs, res)


def _matrix_resonance(A, tol) -> ResonanceReport:
    n = len(A)
    exact = all(isinstance(x, ExactScalar) for r in A for x in r)
    if exact:
        lower = any(A[i][j] for i in range(n) for j in range(i))
        upper = any(A[i][j] for i in range(n) for j in range(i + 1, n))
        if lower and upper:
            raise ValueError("exact resonance test needs a triangular matrix")
        eig = [A[i][i] for i in range(n)]
    else:
        import numpy as np
        eig = list(np.linalg.eigvals(np.array(A, dtype=complex)))
    pairs, res = [], []
    for i, j in itertools.permutations(range(n), 2):
        diff = (eig[i] - eig[j],)
        cls = _classify_exact(diff) if exact else _classify_float(diff, tol)
        nonzero = bool(diff[0]) if exact else abs(complex(diff[0])) >= tol
        pairs.append(PairClass(i, j, diff, cls))
        if cls != "non-integer" and nonzero:
            res.append((i, j))
    return ResonanceReport("matrix", pairs, res)


__all__ = ["is_logarithmic", "residue", "saito_decompose", "residue_commutativity",
           "conjugacy_constancy", "resonance_report", "LogCheck", "Residue",
           "LogDecomposition", "ResonanceReport", "CommutativityReport", "PairClass",
           "NotLogarithmicError"]

