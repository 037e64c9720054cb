"""The twisted differential ``d - alpha^`` and formal normalization of log connections.

For a closed logarithmic form ``alpha = sum a_s dt_s/t_s`` the operator
``nabla = d - alpha ^`` maps the monomial ``t^b`` to ``t^b (beta - alpha)``
with ``beta = sum b_s dt_s/t_s``.  Everything is solved one Laurent monomial at
a time, which is what makes the procedure exact and deterministic.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .connection import (Connection, MatrixSeries, PolarComponent, _achievable_degrees)
from .exterior import MatrixKForm, ScalarKForm, d, wedge
from .scalars import ZERO, ExactScalar, LaurentPoly, Q


class NotInKernelError(ArithmeticError):
    pass


class ResonantMonomialError(ArithmeticError):
    def __init__(self, b, coeffs):
        self.b = tuple(b)
        self.coeffs = tuple(coeffs)
        super().__init__(f"resonant monomial t^{self.b}")


class NotFlatError(ArithmeticError):
    def __init__(self, degree, entry):
        self.degree = degree
        self.entry = entry
        super().__init__(f"input not flat at degree {degree} (entry {entry})")


@dataclass(frozen=True)
class ClosedLogForm:
    """``alpha = sum_s a_s dt_s / t_s`` with exact constant residues."""

    a: tuple
    vars: tuple

    def __init__(self, a: Sequence, vars: Sequence[str]):
        vals = tuple(ExactScalar.coerce(x) for x in a)
        vars = tuple(vars)
        if len(vals) > len(vars):
            raise ValueError("more residues than variables")
        vals = vals + (ZERO,) * (len(vars) - len(vals))
        object.__setattr__(self, "a", vals)
        object.__setattr__(self, "vars", vars)

    def form(self) -> ScalarKForm:
        comps = {}
        m = len(self.vars)
        for s, c in enumerate(self.a):
            if c:
                e = tuple(-1 if i == s else 0 for i in range(m))
                comps[(s,)] = LaurentPoly.monomial(e, c, self.vars)
        return ScalarKForm(1, comps, self.vars)


def nabla(alpha: ClosedLogForm, x: ScalarKForm) -> ScalarKForm:
    """``dx - alpha ^ x``."""
    return d(x) - wedge(alpha.form(), x)


def _monomial_groups(w: ScalarKForm) -> dict:
    """Group a 1-form as ``sum_b t^b sum_s c_s dt_s/t_s``; returns ``{b: [c_s]}``."""
    m = len(w.vars)
    groups: dict = {}
    for (s,), p in w.comps.items():
        for e, c in p.terms.items():
            b = list(e)
            b[s] += 1
            vec = groups.setdefault(tuple(b), [ZERO] * m)
            vec[s] = vec[s] + c
    return groups


def nabla_solve(alpha: ClosedLogForm, w: ScalarKForm) -> LaurentPoly:
    """The unique ``h`` with ``nabla h = w``, assembled monomial by monomial.

    Raises ``NotInKernelError`` if ``nabla w != 0`` and ``ResonantMonomialError``
    when a monomial ``t^b`` with ``b = a`` occurs.
    """
    if w.k != 1:
        raise ValueError("nabla_solve expects a 1-form")
    if not nabla(alpha, w).is_zero():
        raise NotInKernelError("not in kernel of nabla")
    a = alpha.a
    out = {}
    groups = _monomial_groups(w)
    for b in sorted(groups):
        c = groups[b]
        diff = [ai - bi for ai, bi in zip(a, b)]
        if all(not x for x in diff):
            raise ResonantMonomialError(b, c)
        mu = _proportionality(c, diff)
        if mu is None:
            raise NotInKernelError(f"coefficient of t^{b} is not proportional to alpha - beta")
        if mu:
            out[b] = -mu
    return LaurentPoly(out, alpha.vars)


def _proportionality(c, v):
    """``mu`` with ``c == mu * v`` (v nonzero), else None."""
    k = next(i for i, x in enumerate(v) if x)
    mu = c[k] / v[k]
    if all(ci == mu * vi for ci, vi in zip(c, v)):
        return mu
    return None


@dataclass
class NormalFormResult:
    """Output of :func:`poincare_dulac`.

    ``resonant_terms`` entries are ``((i, j), b, c)`` (0-based entry indices)
    describing retained terms ``t^b sum_s c_s dt_s/t_s``.
    """

    gauge: MatrixSeries
    normal: Connection
    resonant_terms: list

    def __eq__(self, other):
        if not isinstance(other, NormalFormResult):
            return NotImplemented
        return (self.gauge == other.gauge and self.normal == other.normal
                and self.resonant_terms == other.resonant_terms)


def _principal_part(conn: Connection):
    """Split into the degree-0 part (diagonal Euler) and the positive-degree parts."""
    if conn.has_denominator:
        raise ValueError("normalization needs a connection with poles on coordinate "
                         "hyperplanes only")
    parts = conn.numerator.weighted_parts(conn.weights)
    if any(deg < 0 for deg in parts):
        raise ValueError("connection has parts of negative weighted degree")
    m, n = conn.m, conn.n
    omega0 = parts.pop(Q(0), MatrixKForm.zero(n, 1, conn.vars))
    vecs = [[ZERO] * m for _ in range(n)]
    for i, j, idx, ex, c in omega0.iter_terms():
        s = idx[0]
        if ex != tuple(-1 if k == s else 0 for k in range(m)):
            raise ValueError("principal part must have constant residues; non-constant "
                             "residues need a prior reduction that is not implemented")
        if i != j:
            raise ValueError("principal part must be diagonal")
        vecs[i][s] = c
    for deg, part in parts.items():
        for i, j, idx, ex, c in part.iter_terms():
            if ex[idx[0]] < -1 or any(e < 0 for k, e in enumerate(ex) if k != idx[0]):
                raise ValueError("higher-order terms must be logarithmic with holomorphic "
                                 "coefficients")
    return omega0, vecs, dict(sorted(parts.items()))


def poincare_dulac(conn: Connection, order=8) -> NormalFormResult:
    """Formal normal form through weighted degree ``order``.

    Solves ``dH + H Omega = Nf H`` degree by degree with ``H(0) = E``.  At
    degree ``r`` each entry obeys ``nabla_{a_i - a_j} h_ij = Nf_ij - w_ij``;
    monomials with ``b = a_i - a_j`` are resonant and stay in ``Nf``, all
    others are absorbed into ``H``.  No kernel elements are added to ``H``.
    """
    omega0, vecs, parts = _principal_part(conn)
    n, m, vars, w = conn.n, conn.m, conn.vars, conn.weights
    order = Q(order)
    alphas = [[ClosedLogForm([vecs[i][s] - vecs[j][s] for s in range(m)], vars)
               for j in range(n)] for i in range(n)]
    Hp: dict = {}
    Np: dict = {}
    resonant = []
    zero1 = ScalarKForm.zero(1, vars)
    for r in _achievable_degrees(w, order):
        tilde = parts.get(r, MatrixKForm.zero(n, 1, vars))
        for p, Hmat in Hp.items():
            q = r - p
            if q <= 0:
                continue
            Oq = parts.get(q)
            if Oq is not None:
                tilde = tilde + wedge(Hmat, Oq)
            Nq = Np.get(q)
            if Nq is not None:
                tilde = tilde - wedge(Nq, Hmat)
        if tilde.is_zero():
            continue
        Hr = [[LaurentPoly.zero(vars)] * n for _ in range(n)]
        Nr = [[zero1] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                wij = tilde.entries[i][j]
                if wij.is_zero():
                    continue
                alpha = alphas[i][j]
                if not nabla(alpha, wij).is_zero():
                    raise NotFlatError(r, (i, j))
                groups = _monomial_groups(wij)
                target = tuple(x for x in alpha.a)
                keep = {}
                for b, c in sorted(groups.items()):
                    if all(ExactScalar(bi) == ai for bi, ai in zip(b, target)):
                        keep[b] = c
                        resonant.append(((i, j), b, tuple(c)))
                nonres = wij
                if keep:
                    kept = _form_from_groups(keep, vars)
                    Nr[i][j] = kept
                    nonres = wij - kept
                if not nonres.is_zero():
                    Hr[i][j] = nabla_solve(alpha, -nonres)
        Hp[r] = MatrixKForm.from_functions(Hr)
        Nmat = MatrixKForm._raw(Nr, 1, vars)
        if not Nmat.is_zero():
            Np[r] = Nmat
    H = MatrixKForm.identity(n, vars)
    for part in Hp.values():
        H = H + part
    normal = omega0
    for part in Np.values():
        normal = normal + part
    polar = [PolarComponent.coordinate(s) for s in range(m)
             if any(vecs[i][s] for i in range(n))]
    normal_conn = Connection(normal, polar, w)
    return NormalFormResult(MatrixSeries(H, order, w), normal_conn, sorted(resonant,
                                                                            key=_res_key))


def _res_key(item):
    (i, j), b, _ = item
    return (i, j, b)


def _form_from_groups(groups: dict, vars) -> ScalarKForm:
    m = len(vars)
    comps: dict = {}
    for b, c in groups.items():
        for s in range(m):
            if c[s]:
                e = list(b)
                e[s] -= 1
                comps.setdefault((s,), {})[tuple(e)] = c[s]
    return ScalarKForm(1, {k: LaurentPoly(v, vars) for k, v in comps.items()}, vars)


__all__ = ["ClosedLogForm", "nabla", "nabla_solve", "poincare_dulac", "NormalFormResult",
           "NotInKernelError", "ResonantMonomialError", "NotFlatError"]

