"""Division of plane 2-forms by the differential of a deformed quasihomogeneous curve.

A family ``H_t = P + sum_a t_a w^a`` (``P`` quasihomogeneous, deformation
monomials of lower weighted degree) gives, for a basic coframe
``sigma_1..sigma_n``, the identities

    H_t dsigma_i = eta_i ^ dH_t + sum_j R_ij(t) dsigma_j

computed here exactly.  ``det R`` cuts out the discriminant.  The numeric
half computes period matrices of the elliptic family
``w2^2 + w1^3 + t2 w1 + t1`` and the monodromy of a small loop around a
simple discriminant point.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import linalg
from .exterior import ScalarKForm, d, wedge
from .scalars import ONE, ZERO, ExactScalar, LaurentPoly, Q


class FamilyError(ValueError):
    pass


class PeriodError(RuntimeError):
    pass


# ----------------------------------------------------------------- grading helpers
def _wdeg(e, weights) -> object:
    return sum((w * x for w, x in zip(weights, e)), Q(0))


def _monomials_of_degree(deg, weights) -> list:
    """Exponent pairs ``(a, b)`` with ``a*w1 + b*w2 == deg``, sorted lexicographically desc."""
    w1, w2 = weights
    out = []
    if deg < 0:
        return out
    a = 0
    while a * w1 <= deg:
        rest = deg - a * w1
        if rest % w2 == 0:
            out.append((a, int(rest / w2)))
        a += 1
    return sorted(out, reverse=True)


# ------------------------------------------------------------------------ family
@dataclass
class HFamily:
    """``H_t = P + sum_a t_a w^a`` in curve variables ``wvars``.

    ``deformation`` lists exponent pairs ``a``; parameter ``t_k`` multiplies the
    k-th one, so putting ``(0, 0)`` first makes ``t1`` the free term.
    """

    weights: tuple
    principal: LaurentPoly
    deformation: tuple
    tvars: tuple = ()
    degree: object = field(init=False)

    def __post_init__(self):
        self.weights = tuple(Q(w) for w in self.weights)
        if len(self.weights) != 2 or any(w <= 0 for w in self.weights):
            raise FamilyError("two positive curve weights are required")
        P = self.principal
        if P.nvars != 2 or P.has_negative_exponents() or P.is_zero():
            raise FamilyError("principal part must be a nonzero polynomial in two variables")
        degs = {_wdeg(e, self.weights) for e in P.terms}
        if len(degs) != 1:
            raise FamilyError("principal part is not quasihomogeneous")
        self.degree = degs.pop()
        self.deformation = tuple(tuple(int(x) for x in a) for a in self.deformation)
        for a in self.deformation:
            if len(a) != 2 or min(a) < 0:
                raise FamilyError(f"bad deformation monomial {a}")
            if _wdeg(a, self.weights) >= self.degree:
                raise FamilyError(f"deformation monomial {a} is not of lower degree")
        if len(set(self.deformation)) != len(self.deformation):
            raise FamilyError("repeated deformation monomial")
        if not self.tvars:
            self.tvars = tuple(f"t{k + 1}" for k in range(len(self.deformation)))
        self.tvars = tuple(self.tvars)
        if len(self.tvars) != len(self.deformation):
            raise FamilyError("one parameter name per deformation monomial")

    @property
    def wvars(self) -> tuple:
        return self.principal.vars

    @property
    def vars(self) -> tuple:
        return self.wvars + self.tvars

    def lift(self, p: LaurentPoly) -> LaurentPoly:
        """Embed a polynomial in the curve variables into the joint ring."""
        return p.embed(self.vars, [0, 1])

    def H(self) -> LaurentPoly:
        out = self.lift(self.principal)
        k = len(self.tvars)
        for j, a in enumerate(self.deformation):
            e = a + tuple(1 if i == j else 0 for i in range(k))
            out = out + LaurentPoly.monomial(e, ONE, self.vars)
        return out

    def jacobian(self) -> tuple:
        return self.principal.derivative(0), self.principal.derivative(1)

    def full_jacobian(self) -> tuple:
        H = self.H()
        return H.derivative(0), H.derivative(1)

    def specialize(self, values: dict) -> LaurentPoly:
        """``H_t`` with some parameters fixed (``{name: scalar}``); others remain."""
        H = self.H()
        images = [LaurentPoly.var(i, self.vars) for i in range(len(self.vars))]
        for name, v in values.items():
            images[self.vars.index(name)] = LaurentPoly.constant(ExactScalar.coerce(v), self.vars)
        return H.substitute(images, self.vars)


def elliptic_family() -> HFamily:
    wv = ("w1", "w2")
    P = LaurentPoly({(0, 2): ONE, (3, 0): ONE}, wv)
    return HFamily((2, 3), P, ((0, 0), (1, 0)), ("t1", "t2"))


def elliptic_coframe() -> list:
    wv = ("w1", "w2")
    w1, w2 = LaurentPoly.var(0, wv), LaurentPoly.var(1, wv)
    dw1 = ScalarKForm.dt(0, wv)
    return [dw1 * w2, dw1 * (w1 * w2)]


# ------------------------------------------------------------------ Milnor algebra
@dataclass
class _DegreeSpace:
    """Degree-``d`` slice of the Jacobian ideal in row-echelon form."""

    degree: object
    monomials: list
    rows: list          # reduced rows, one per pivot
    pivots: list        # pivot column (monomial index) per row

    def normal_form(self, vec: list) -> list:
        v = list(vec)
        for row, p in zip(self.rows, self.pivots):
            c = v[p]
            if c:
                v = [a - c * b for a, b in zip(v, row)]
        return v

    @property
    def complement(self) -> list:
        return [m for k, m in enumerate(self.monomials) if k not in self.pivots]


def _vector(p: LaurentPoly, monos: list) -> list:
    idx = {m: k for k, m in enumerate(monos)}
    v = [ZERO] * len(monos)
    for e, c in p.terms.items():
        if e not in idx:
            raise FamilyError("polynomial has a monomial outside the degree slice")
        v[idx[e]] = c
    return v


def _jacobian_space(P1, P2, weights, deg) -> _DegreeSpace:
    monos = _monomials_of_degree(deg, weights)
    gens = []
    for Pi in (P1, P2):
        if Pi.is_zero():
            continue
        di = _wdeg(next(iter(Pi.terms)), weights)
        for u in _monomials_of_degree(deg - di, weights):
            gens.append(_vector(Pi.shift(u), monos))
    if not gens or not monos:
        return _DegreeSpace(deg, monos, [], [])
    R, piv = linalg.rref(gens)
    return _DegreeSpace(deg, monos, R[:len(piv)], list(piv))


def _achievable(weights, upto) -> list:
    w1, w2 = weights
    out = set()
    a = 0
    while a * w1 <= upto:
        b = 0
        while a * w1 + b * w2 <= upto:
            out.add(a * w1 + b * w2)
            b += 1
        a += 1
    return sorted(out)


@dataclass
class MilnorData:
    number: int
    basis: list          # complement monomials, ascending degree
    socle_degree: object
    spaces: dict


def milnor_algebra(P: LaurentPoly, weights) -> MilnorData:
    weights = tuple(Q(w) for w in weights)
    degs = {_wdeg(e, weights) for e in P.terms}
    if len(degs) != 1:
        raise FamilyError("P is not quasihomogeneous")
    r = degs.pop()
    socle = 2 * r - 2 * (weights[0] + weights[1])
    P1, P2 = P.derivative(0), P.derivative(1)
    # past the socle degree the quotient must vanish; probe well beyond it
    probe = max(socle, Q(0)) + 2 * r + weights[0] + weights[1]
    spaces, basis = {}, []
    for deg in _achievable(weights, probe):
        sp = _jacobian_space(P1, P2, weights, deg)
        spaces[deg] = sp
        comp = sp.complement
        if comp and deg > socle:
            raise FamilyError("Jacobian quotient is infinite-dimensional (singularity not "
                              "isolated)")
        basis.extend(comp)
    return MilnorData(len(basis), basis, socle, spaces)


def milnor_number(P, weights=None) -> int:
    """Dimension of the Jacobian quotient of a quasihomogeneous ``P``."""
    if isinstance(P, HFamily):
        return milnor_algebra(P.principal, P.weights).number
    if weights is None:
        weights = (1, 1)
    return milnor_algebra(P, weights).number


# ---------------------------------------------------------------------- coframes
def _form_degree(s: ScalarKForm, weights):
    degs = set()
    for (idx,), p in s.comps.items():
        for e in p.terms:
            degs.add(_wdeg(e, weights) + weights[idx])
    if len(degs) != 1:
        raise FamilyError("coframe forms must be quasihomogeneous")
    return degs.pop()


def _top_coeff(s: ScalarKForm) -> LaurentPoly:
    """``g`` with ``dsigma = g dw1 ^ dw2``."""
    ds = d(s)
    return ds.coefficient((0, 1))


@dataclass
class CoframeCheck:
    ok: bool
    degree_sum: object
    expected: object
    images: list        # normal forms of the dsigma_i in the Jacobian quotient
    reason: str = ""

    def __bool__(self):
        return self.ok


def coframe_check(family: HFamily, sigmas: Sequence[ScalarKForm]) -> CoframeCheck:
    md = milnor_algebra(family.principal, family.weights)
    n = md.number
    w = family.weights
    try:
        degs = [_form_degree(s, w) for s in sigmas]
    except FamilyError as exc:
        return CoframeCheck(False, None, n * family.degree, [], str(exc))
    total = sum(degs, Q(0))
    expected = n * family.degree
    images = []
    for s in sigmas:
        g = _top_coeff(s)
        if g.is_zero():
            images.append(LaurentPoly.zero(family.wvars))
            continue
        deg = _wdeg(next(iter(g.terms)), w)
        sp = md.spaces.get(deg) or _jacobian_space(*family.jacobian(), w, deg)
        nf = sp.normal_form(_vector(g, sp.monomials))
        images.append(LaurentPoly({m: c for m, c in zip(sp.monomials, nf) if c},
                                  family.wvars))
    if len(sigmas) != n:
        return CoframeCheck(False, total, expected, images,
                            f"{len(sigmas)} forms given, Milnor number is {n}")
    problems = []
    if total != expected:
        problems.append("degree condition fails")
    monos = sorted({e for im in images for e in im.terms})
    mat = [[im.terms.get(m, ZERO) for m in monos] for im in images]
    if not monos or linalg.rank(mat) < n:
        problems.append("differentials are dependent modulo the Jacobian ideal")
    return CoframeCheck(not problems, total, expected, images, "; ".join(problems))


# ---------------------------------------------------------------------- division
@dataclass
class DivisionResult:
    """``omega = eta ^ dH_t + sum_j remainder[j] dsigma_j``."""

    eta: ScalarKForm
    remainder: list

    def residual(self, family: HFamily, omega: ScalarKForm, sigmas) -> ScalarKForm:
        H1, H2 = family.full_jacobian()
        dH = ScalarKForm(1, {(0,): H1, (1,): H2}, family.vars)
        total = wedge(self.eta, dH)
        for c, s in zip(self.remainder, sigmas):
            total = total + _lift_form(family, d(s)) * c.embed(family.vars,
                                                                list(range(2, len(family.vars))))
        return omega - total


def _lift_form(family: HFamily, s: ScalarKForm) -> ScalarKForm:
    comps = {}
    for idx, p in s.comps.items():
        comps[idx] = family.lift(p)
    return ScalarKForm(s.k, comps, family.vars)


class _Divider:
    def __init__(self, family: HFamily, sigmas):
        chk = coframe_check(family, sigmas)
        if not chk:
            raise FamilyError(f"not a basic coframe: {chk.reason}")
        self.family = family
        self.sigmas = list(sigmas)
        self.gs = [_top_coeff(s) for s in sigmas]
        w = family.weights
        self.gdeg = [_wdeg(next(iter(g.terms)), w) for g in self.gs]
        self.P = family.jacobian()
        self.Pdeg = [None if Pi.is_zero() else _wdeg(next(iter(Pi.terms)), w) for Pi in self.P]
        self.Hfull = family.full_jacobian()
        self.plans: dict = {}

    def plan(self, deg):
        """Square invertible system for the degree-``deg`` slice."""
        if deg in self.plans:
            return self.plans[deg]
        w = self.family.weights
        monos = _monomials_of_degree(deg, w)
        cols, labels = [], []
        for j, (g, gd) in enumerate(zip(self.gs, self.gdeg)):
            if gd == deg:
                cols.append(_vector(g, monos))
                labels.append(("sigma", j, None))
        for i, (Pi, di) in enumerate(zip(self.P, self.Pdeg)):
            if di is None:
                continue
            for u in _monomials_of_degree(deg - di, w):
                cols.append(_vector(Pi.shift(u), monos))
                labels.append(("jac", i, u))
        if not cols:
            raise FamilyError(f"degree {deg} slice is not spanned")
        # rref of the transposed column matrix selects an independent subset
        M = [[cols[c][r] for c in range(len(cols))] for r in range(len(monos))]
        _, piv = linalg.rref(M)
        if len(piv) != len(monos):
            raise FamilyError(f"degree {deg} slice is not spanned by the coframe and "
                              "Jacobian multiples")
        S = [[M[r][c] for c in piv] for r in range(len(monos))]
        plan = (monos, linalg.inverse(S), [labels[c] for c in piv])
        self.plans[deg] = plan
        return plan

    def divide(self, g: LaurentPoly):
        """``g = u H_1 + v H_2 + sum c_j g_j`` in the joint ring."""
        fam = self.family
        V = fam.vars
        w = fam.weights
        zero_t = LaurentPoly.zero(fam.tvars)
        c = [zero_t] * len(self.gs)
        uv = [LaurentPoly.zero(V), LaurentPoly.zero(V)]
        guard = 0
        while not g.is_zero():
            guard += 1
            if guard > 10000:
                raise FamilyError("division did not terminate")
            top = max(_wdeg(e[:2], w) for e in g.terms)
            part = LaurentPoly({e: x for e, x in g.terms.items() if _wdeg(e[:2], w) == top}, V)
            monos, Sinv, labels = self.plan(top)
            idx = {m: k for k, m in enumerate(monos)}
            by_t: dict = {}
            for e, x in part.terms.items():
                by_t.setdefault(e[2:], [ZERO] * len(monos))[idx[e[:2]]] = x
            for te, b in sorted(by_t.items()):
                sol = [sum((Sinv[r][k] * b[k] for k in range(len(b))), ZERO)
                       for r in range(len(b))]
                for (kind, i, u), x in zip(labels, sol):
                    if not x:
                        continue
                    if kind == "sigma":
                        c[i] = c[i] + LaurentPoly.monomial(te, x, fam.tvars)
                        g = g - fam.lift(self.gs[i]).shift((0, 0) + te) * x
                    else:
                        mono = LaurentPoly.monomial(tuple(u) + te, x, V)
                        uv[i] = uv[i] + mono
                        g = g - self.Hfull[i] * mono
        return uv, c


def _as_2form_coeff(family: HFamily, omega) -> LaurentPoly:
    if isinstance(omega, LaurentPoly):
        p = omega
    else:
        if omega.k != 2:
            raise ValueError("expected a 2-form")
        p = omega.coefficient((0, 1))
    if p.vars == family.wvars:
        p = family.lift(p)
    if p.vars != family.vars:
        raise ValueError("2-form must be written in the curve and parameter variables")
    if p.has_negative_exponents():
        raise ValueError("2-form coefficient must be polynomial")
    return p


def divide_2form(family: HFamily, omega, sigmas, _divider=None) -> DivisionResult:
    """Exact ``omega = eta ^ dH_t + sum_j c_j(t) dsigma_j``."""
    dv = _divider or _Divider(family, sigmas)
    g = _as_2form_coeff(family, omega)
    (u, v), c = dv.divide(g)
    # eta ^ dH = (eta1 H_2 - eta2 H_1) dw1^dw2, so eta = v dw1 - u dw2
    eta = ScalarKForm(1, {(0,): v, (1,): -u}, family.vars)
    return DivisionResult(eta, c)


def compute_R(family: HFamily, sigmas) -> list:
    dv = _Divider(family, sigmas)
    H = family.H()
    rows = []
    for g in dv.gs:
        res = divide_2form(family, H * family.lift(g), sigmas, dv)
        rows.append(res.remainder)
    return rows


def division_identities(family: HFamily, sigmas) -> list:
    """``(omega_i, DivisionResult)`` for ``omega_i = H_t dsigma_i``."""
    dv = _Divider(family, sigmas)
    H = family.H()
    out = []
    for g in dv.gs:
        om = ScalarKForm(2, {(0, 1): H * family.lift(g)}, family.vars)
        out.append((om, divide_2form(family, om, sigmas, dv)))
    return out


def discriminant(R) -> LaurentPoly:
    return linalg.det(R)


# ========================================================== numeric periods (elliptic)
def _cubic_roots(t1, t2) -> np.ndarray:
    return np.roots([1.0, 0.0, complex(t2), complex(t1)]).astype(complex)


def _to_dw1_integrand(sigma: ScalarKForm) -> dict:
    """``{(i, j): c}`` with ``sigma ~ sum c w1^i w2^j dw1`` modulo exact forms."""
    out: dict = {}
    for (idx,), p in sigma.comps.items():
        for (i, j), c in p.terms.items():
            c = complex(c)
            if idx == 0:
                out[(i, j)] = out.get((i, j), 0) + c
            elif i > 0:
                # w1^i w2^j dw2 = d(.) - i/(j+1) w1^(i-1) w2^(j+1) dw1
                key = (i - 1, j + 1)
                out[key] = out.get(key, 0) - c * i / (j + 1)
    return out


def _odd_polynomial(terms: dict, t1, t2) -> np.ndarray:
    """``G(w1)`` such that the odd part of ``A(w1, w2)`` is ``w2 G(w1)`` on the curve."""
    minus_p = np.poly1d([-1.0, 0.0, -complex(t2), -complex(t1)])
    G = np.poly1d([0.0 + 0j])
    for (i, j), c in terms.items():
        if j % 2 == 1:
            G = G + c * np.poly1d([1.0] + [0.0] * i) * minus_p ** ((j - 1) // 2)
    return G


def _segment_integral(G, p, q, r, tol):
    """``2 * int_p^q G(w) sqrt(-(w-p)(w-q)(w-r)) dw`` by Gauss-Chebyshev (2nd kind)."""
    h = (q - p) / 2
    sp = np.sqrt(p - r)
    prev = None
    N = 24
    while N <= 1 << 15:
        k = np.arange(1, N + 1)
        x = np.cos(k * np.pi / (N + 1))
        wts = np.pi / (N + 1) * np.sin(k * np.pi / (N + 1)) ** 2
        w = p + h * (1 + x)
        f = G(w) * sp * np.sqrt((w - r) / (p - r))
        val = 2 * h * h * np.dot(wts, f)
        if prev is not None and abs(val - prev) <= tol * (1 + abs(val)):
            return val
        prev = val
        N *= 2
    raise PeriodError("period quadrature did not converge (root close to the cycle)")


def _pair_vector(Gs, roots, pair, tol):
    i, j = pair
    r = roots[3 - i - j]
    return np.array([_segment_integral(G, roots[i], roots[j], r, tol) for G in Gs])


def _pair_quality(roots, pair) -> float:
    i, j = pair
    p, q, r = roots[i], roots[j], roots[3 - i - j]
    d = q - p
    s = np.clip(((r - p) * np.conj(d)).real / abs(d) ** 2, 0.0, 1.0)
    return abs(p + s * d - r) / abs(d)


_PAIRS = ((0, 1), (1, 2), (0, 2))


def _check_off_discriminant(roots, t):
    scale = 1 + max(abs(x) for x in roots)
    sep = min(abs(roots[i] - roots[j]) for i, j in _PAIRS)
    if sep < 1e-6 * scale:
        raise PeriodError(f"parameter {t} is on or too near the discriminant "
                          f"(root separation {sep:.3g})")


@dataclass
class PeriodState:
    t: tuple
    roots: np.ndarray
    X: np.ndarray           # rows: forms, columns: cycles


def _canonical(t, Gs, tol) -> PeriodState:
    roots = _cubic_roots(*t)
    _check_off_discriminant(roots, t)
    order = sorted(range(3), key=lambda k: (round(roots[k].real, 12), round(roots[k].imag, 12)))
    roots = roots[order]
    closest = min(_PAIRS, key=lambda pq: abs(roots[pq[0]] - roots[pq[1]]))
    a, b = closest
    c = 3 - a - b
    second = max(((b, c), (a, c)), key=lambda pq: _pair_quality(roots, pq))
    X = np.column_stack([_pair_vector(Gs, roots, (a, b), tol),
                         _pair_vector(Gs, roots, tuple(sorted(second)), tol)])
    return PeriodState(tuple(complex(x) for x in t), roots, X)


def _match_roots(old, new):
    best = None
    for perm in itertools.permutations(range(3)):
        cost = max(abs(old[k] - new[perm[k]]) for k in range(3))
        if best is None or cost < best[0]:
            best = (cost, perm)
    cost, perm = best
    sep = min(abs(new[i] - new[j]) for i, j in _PAIRS)
    return new[list(perm)], cost < 0.3 * sep


def _continue(state: PeriodState, target, Gs, tol, min_step=1e-7) -> PeriodState:
    """Analytic continuation of the period columns along a straight parameter path."""
    t0 = np.array(state.t, dtype=complex)
    t1 = np.array(target, dtype=complex)
    s, h = 0.0, 1.0 / 32
    roots, X = state.roots, state.X
    while s < 1.0:
        h = min(h, 1.0 - s)
        if h < min_step:
            raise PeriodError("branch tracking ambiguity: continuation step underflow")
        tn = t0 + (s + h) * (t1 - t0)
        raw = _cubic_roots(*tn)
        _check_off_discriminant(raw, tuple(tn))
        nr, ok = _match_roots(roots, raw)
        if not ok:
            h /= 2
            continue
        pairs = sorted(_PAIRS, key=lambda pq: -_pair_quality(nr, pq))[:2]
        B = np.column_stack([_pair_vector(Gs, nr, pq, tol) for pq in pairs])
        try:
            coeff = np.linalg.solve(B, X)
        except np.linalg.LinAlgError:
            h /= 2
            continue
        ints = np.round(coeff.real)
        if np.abs(coeff - ints).max() > 0.15:
            h /= 2
            continue
        Xn = B @ ints
        if np.abs(Xn - X).max() > 0.25 * max(np.abs(X).max(), 1e-300):
            h /= 2
            continue
        roots, X, s = nr, Xn, s + h
        h = min(2 * h, 1.0 / 8)
    return PeriodState(tuple(complex(x) for x in t1), roots, X)


def _integrands(sigmas, t):
    return [_odd_polynomial(_to_dw1_integrand(s), *t) for s in sigmas]


def elliptic_periods(t, sigmas=None, tol=1e-12, base=None) -> np.ndarray:
    """Period matrix ``X[i, j] = oint_{delta_j} sigma_i`` of the elliptic family at ``t``.

    Cycles are double covers of segments between roots of ``w1^3 + t2 w1 + t1``;
    the first column is the pair of closest roots (the cycle that vanishes on
    the nearby discriminant).  With ``base`` the cycles are those of ``base``
    continued along the straight segment to ``t``.
    """
    sigmas = elliptic_coframe() if sigmas is None else list(sigmas)
    if base is None:
        return _canonical_t(t, sigmas, tol).X
    st = _canonical_t(base, sigmas, tol)
    return _continue_t(st, t, sigmas, tol).X


def _canonical_t(t, sigmas, tol) -> PeriodState:
    return _canonical(t, _integrands(sigmas, t), tol)


def _continue_t(state, target, sigmas, tol) -> PeriodState:
    # integrand coefficients are polynomial in t; for dw1-type coframes whose w2
    # powers are 1 they do not depend on t at all, otherwise step in small pieces
    terms = [_to_dw1_integrand(s) for s in sigmas]
    if all(j <= 1 for tm in terms for (_, j) in tm):
        return _continue(state, target, _integrands(sigmas, target), tol)
    pts = np.linspace(0, 1, 65)
    t0, t1 = np.array(state.t), np.array(target, dtype=complex)
    for a in pts[1:]:
        tn = t0 + a * (t1 - t0)
        state = _continue(state, tn, _integrands(sigmas, tn), tol)
    return state


def period_determinants(points, sigmas=None, tol=1e-12, base=None):
    """``det X`` at each point, continued from a common base point."""
    sigmas = elliptic_coframe() if sigmas is None else list(sigmas)
    base = points[0] if base is None else base
    st = _canonical_t(base, sigmas, tol)
    return [complex(np.linalg.det(_continue_t(st, p, sigmas, tol).X)) for p in points]


@dataclass
class PicardLefschetzResult:
    monodromy: np.ndarray
    integer_error: float
    unipotent_error: float
    vanishing_error: float
    encircled: int
    tol: float

    @property
    def c(self) -> int:
        return int(round(self.monodromy[0, 1].real))

    @property
    def ok(self) -> bool:
        return (self.integer_error <= self.tol and self.unipotent_error <= self.tol
                and self.vanishing_error <= self.tol)


def picard_lefschetz_check(center, t2, radius, sigmas=None, tol=1e-6, steps=64,
                           quad_tol=1e-13) -> PicardLefschetzResult:
    """Monodromy of the period columns along ``t1 = center + radius e^{i theta}``."""
    sigmas = elliptic_coframe() if sigmas is None else list(sigmas)
    t2 = complex(t2)
    disc_roots = np.roots([27.0, 0.0, 4 * t2 ** 3]) if t2 != 0 else np.array([0j, 0j])
    dist = np.abs(disc_roots - complex(center))
    if np.any(np.abs(dist - radius) < 1e-3 * radius):
        raise PeriodError("loop passes too close to a discriminant point")
    inside = int(np.sum(dist < radius))
    start = (complex(center) + radius, t2)
    st0 = _canonical_t(start, sigmas, quad_tol)
    st = st0
    for k in range(1, steps + 1):
        th = 2 * math.pi * k / steps
        st = _continue_t(st, (complex(center) + radius * np.exp(1j * th), t2), sigmas,
                         quad_tol)
    M = np.linalg.solve(st0.X, st.X)
    E = np.eye(2)
    ierr = float(np.abs(M - np.round(M.real)).max())
    uerr = float(np.abs((M - E) @ (M - E)).max())
    verr = float(np.abs(M[:, 0] - E[:, 0]).max())
    return PicardLefschetzResult(M, ierr, uerr, verr, inside, tol)


__all__ = ["HFamily", "elliptic_family", "elliptic_coframe", "milnor_number", "milnor_algebra",
           "coframe_check", "CoframeCheck", "divide_2form", "DivisionResult", "compute_R",
           "division_identities", "discriminant", "elliptic_periods", "period_determinants",
           "picard_lefschetz_check", "PicardLefschetzResult", "FamilyError", "PeriodError"]
