"""Meromorphic matrix connections ``dX = Omega X``.

A connection is stored as ``Omega = N / F``: ``N`` is a matrix 1-form with
Laurent coefficients (coordinate poles appear as negative exponents) and
``F`` is the product of the declared non-coordinate polar equations raised to
their declared powers.  Everything here is exact unless the coefficients are
floats, in which case the same algebra runs in floating point.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

from . import linalg
from .exterior import MatrixKForm, ScalarKForm, d, wedge
from .scalars import ONE, ZERO, ExactScalar, LaurentPoly, Q, WeightVector


class ConnectionError_(ValueError):
    """Invalid connection data."""


class NotIntegrableError(ArithmeticError):
    def __init__(self, degree, message=None):
        self.degree = degree
        super().__init__(message or f"not integrable at degree {degree}")


@dataclass(frozen=True)
class PolarComponent:
    """A declared polar component: ``{t_var = 0}`` or ``{poly = 0}``.

    ``power`` is the multiplicity with which an equation divides the
    connection; coordinate poles are carried by negative exponents instead.
    """

    kind: str
    var: int | None = None
    poly: LaurentPoly | None = None
    power: int = 1

    @staticmethod
    def coordinate(i: int) -> "PolarComponent":
        return PolarComponent("coordinate", var=i, power=0)

    @staticmethod
    def equation(p: LaurentPoly, power: int = 1) -> "PolarComponent":
        return PolarComponent("equation", poly=p, power=power)

    def defining_poly(self, vars) -> LaurentPoly:
        if self.kind == "coordinate":
            return LaurentPoly.var(self.var, vars)
        return self.poly

    def __post_init__(self):
        if self.kind not in ("coordinate", "equation"):
            raise ConnectionError_(f"unknown component kind {self.kind!r}")
        if self.kind == "coordinate" and self.var is None:
            raise ConnectionError_("coordinate component needs a variable index")
        if self.kind == "equation" and self.poly is None:
            raise ConnectionError_("equation component needs a polynomial")
        if self.power < 0:
            raise ConnectionError_("component power must be nonnegative")


def is_squarefree(f: LaurentPoly) -> bool:
    """gcd(f, df/dt_1, ..., df/dt_m) is a nonzero constant."""
    import sympy

    from ._sym import to_sympy

    syms = sympy.symbols(f.vars)
    exprs = [to_sympy(f, syms)] + [to_sympy(f.derivative(i), syms) for i in range(f.nvars)]
    exprs = [e for e in exprs if e != 0]
    g = sympy.gcd_list(exprs, *syms, extension=True) if len(exprs) > 1 else exprs[0]
    return g != 0 and sympy.Poly(g, *syms).is_ground


def _undeclared_coordinate_poles(numer: MatrixKForm, declared: set) -> set:
    bad = set()
    for r in numer.entries:
        for e in r:
            for p in e.comps.values():
                for ex in p.terms:
                    for i, k in enumerate(ex):
                        if k < 0 and i not in declared:
                            bad.add(i)
    return bad


class Connection:
    """Matrix connection ``Omega = numerator / denominator``.

    Parameters
    ----------
    omega : MatrixKForm
        Numerator matrix 1-form (Laurent coefficients).
    polar : sequence of PolarComponent
        Declared components.  Coordinate components license negative powers
        of that variable; equation components divide the numerator.
    weights : sequence of rationals, optional
        Quasihomogeneous weights of the variables (default all 1).
    """

    def __init__(self, omega: MatrixKForm, polar: Sequence[PolarComponent] = (),
                 weights=None, validate: bool = True):
        if omega.k != 1:
            raise ConnectionError_("connection form must have degree 1")
        self.numerator = omega
        self.vars = omega.vars
        self.n = omega.n
        self.polar = tuple(polar)
        self.weights = WeightVector(weights) if weights is not None \
            else WeightVector.standard(len(self.vars))
        if len(self.weights) != len(self.vars):
            raise ConnectionError_("one weight per variable is required")
        den = LaurentPoly.constant(ONE if self._exact_hint() else 1 + 0j, self.vars)
        for c in self.polar:
            if c.kind == "equation" and c.power:
                den = den * (c.poly ** c.power)
        self.denominator = den
        if validate:
            self._validate()

    def _exact_hint(self) -> bool:
        for _, _, _, _, c in self.numerator.iter_terms():
            return isinstance(c, ExactScalar)
        return True

    def _validate(self):
        coords = {c.var for c in self.polar if c.kind == "coordinate"}
        bad = _undeclared_coordinate_poles(self.numerator, coords)
        if bad:
            names = ", ".join(self.vars[i] for i in sorted(bad))
            raise ConnectionError_(f"negative exponents in undeclared variables: {names}")
        for c in self.polar:
            if c.kind == "coordinate":
                if not 0 <= c.var < len(self.vars):
                    raise ConnectionError_(f"coordinate index {c.var} out of range")
                continue
            p = c.poly
            if p.vars != self.vars:
                raise ConnectionError_("component equation uses different variables")
            if p.has_negative_exponents():
                raise ConnectionError_("component equations must be polynomials")
            if p.is_constant():
                raise ConnectionError_("component equation is constant")
            if p.is_exact and not is_squarefree(p):
                raise ConnectionError_(f"component equation {p} is not square-free")

    # accessors --------------------------------------------------------
    @property
    def m(self) -> int:
        return len(self.vars)

    @property
    def has_denominator(self) -> bool:
        return not self.denominator.is_constant()

    @property
    def omega(self) -> MatrixKForm:
        """The matrix 1-form itself, when it is Laurent (no equation denominators)."""
        if self.has_denominator:
            raise ValueError("connection has a non-monomial denominator; use numerator/denominator")
        c = self.denominator.constant_term()
        return self.numerator if c == 1 else self.numerator * (ONE / c if isinstance(c, ExactScalar)
                                                               else 1 / c)

    def components(self) -> list:
        return [c.defining_poly(self.vars) for c in self.polar]

    def is_exact(self) -> bool:
        return all(isinstance(c, ExactScalar) for *_, c in self.numerator.iter_terms())

    def to_float(self) -> "Connection":
        polar = [c if c.kind == "coordinate" else
                 PolarComponent.equation(c.poly.to_float(), c.power) for c in self.polar]
        return Connection(self.numerator.to_float(), polar, self.weights, validate=False)

    def is_flat(self) -> bool:
        return flatness_residual(self).is_zero()

    def __eq__(self, other):
        if not isinstance(other, Connection):
            return NotImplemented
        return (self.numerator == other.numerator and self.polar == other.polar
                and self.weights == other.weights)

    def __hash__(self):
        return hash((self.numerator, self.polar, tuple(self.weights)))

    def __repr__(self):
        return f"Connection(n={self.n}, vars={self.vars}, polar={len(self.polar)})"


@dataclass(frozen=True)
class RationalMatrixForm:
    """Matrix form ``numerator / denominator`` with a polynomial denominator."""

    numerator: MatrixKForm
    denominator: LaurentPoly

    def is_zero(self) -> bool:
        return self.numerator.is_zero()

    @property
    def form(self) -> MatrixKForm:
        if not self.denominator.is_monomial():
            raise ValueError("denominator is not a monomial")
        inv = self.denominator ** -1
        return self.numerator.map_coeffs(lambda p: p * inv)


def flatness_residual(conn: Connection) -> RationalMatrixForm:
    """``dOmega - Omega ^ Omega`` with denominators cleared.

    For ``Omega = N/F`` the numerator is ``F dN - dF ^ N - N ^ N`` over ``F**2``.
    """
    N = conn.numerator
    if not conn.has_denominator:
        F = conn.denominator
        res = d(N) * F - wedge(N, N)
        return RationalMatrixForm(res, F * F)
    F = conn.denominator
    dF = d(ScalarKForm.function(F))
    res = d(N) * F - wedge(dF, N) - wedge(N, N)
    return RationalMatrixForm(res, F * F)


# ---------------------------------------------------------------------------
# truncated matrix series


class MatrixSeries:
    """Matrix of functions truncated at weighted degree ``order``.

    The value is a single 0-form matrix; graded parts are derived on demand.
    """

    def __init__(self, value: MatrixKForm, order, weights):
        if value.k != 0:
            raise ValueError("a matrix series is a 0-form")
        self.weights = WeightVector(weights)
        self.order = Q(order)
        self.value = value.truncate(self.order, self.weights)
        self.n = value.n
        self.vars = value.vars

    @classmethod
    def identity(cls, n, vars, order, weights) -> "MatrixSeries":
        return cls(MatrixKForm.identity(n, vars), order, weights)

    @classmethod
    def from_functions(cls, mat, order, weights) -> "MatrixSeries":
        return cls(MatrixKForm.from_functions(mat), order, weights)

    def parts(self) -> dict:
        return dict(sorted(self.value.weighted_parts(self.weights).items()))

    def part(self, r) -> MatrixKForm:
        return self.parts().get(Q(r), MatrixKForm.zero(self.n, 0, self.vars))

    def constant_part(self) -> list:
        """H0 as an exact constant matrix; raises when the degree-0 part is not constant."""
        H0 = self.part(0)
        mat = H0.functions()
        for r in mat:
            for p in r:
                if not p.is_constant():
                    raise ValueError("degree-0 part of the series is not constant")
        return [[p.constant_term() for p in r] for r in mat]

    def __mul__(self, other: "MatrixSeries") -> "MatrixSeries":
        order = min(self.order, other.order)
        return MatrixSeries(wedge(self.value, other.value), order, self.weights)

    def inverse(self) -> "MatrixSeries":
        parts = self.parts()
        if any(deg < 0 for deg in parts):
            raise ValueError("series has negative-degree parts")
        H0 = self.constant_part()
        try:
            H0inv = linalg.inverse(H0)
        except ZeroDivisionError:
            raise ValueError("gauge not invertible at origin") from None
        vars = self.vars
        H0inv_f = MatrixKForm.from_constant(H0inv, vars)
        U = wedge(self.value - MatrixKForm.from_constant(H0, vars), H0inv_f)
        U = U.truncate(self.order, self.weights)
        total = MatrixKForm.identity(self.n, vars)
        power = MatrixKForm.identity(self.n, vars)
        minw = min(self.weights)
        steps = int(self.order / minw) + 1
        for _ in range(steps):
            power = (-wedge(power, U)).truncate(self.order, self.weights)
            if power.is_zero():
                break
            total = total + power
        return MatrixSeries(wedge(H0inv_f, total), self.order, self.weights)

    def __eq__(self, other):
        if not isinstance(other, MatrixSeries):
            return NotImplemented
        return (self.value == other.value and self.order == other.order
                and self.weights == other.weights)

    def __hash__(self):
        return hash((self.value, self.order))

    def __repr__(self):
        return f"MatrixSeries(n={self.n}, order={self.order})"


def _coordinate_components(numer: MatrixKForm, polar) -> list:
    coords = {c.var for c in polar if c.kind == "coordinate"}
    extra = _undeclared_coordinate_poles(numer, coords)
    return list(polar) + [PolarComponent.coordinate(i) for i in sorted(extra)]


def _matrix_inverse_functions(H: list) -> list:
    """Inverse of a matrix of Laurent polynomials whose determinant is a monomial."""
    n = len(H)
    det = linalg.det(H)
    if not det or not det.is_monomial():
        raise ValueError("gauge matrix is not invertible in the Laurent ring; "
                         "supply its inverse explicitly")
    inv_det = det ** -1
    adj = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [[H[r][c] for c in range(n) if c != j] for r in range(n) if r != i]
            cof = linalg.det(minor) if minor else LaurentPoly.constant(ONE, H[0][0].vars)
            if (i + j) & 1:
                cof = -cof
            adj[j][i] = cof * inv_det
    return adj


def gauge(conn: Connection, H, H_inv=None) -> Connection:
    """Gauge transform ``Omega -> dH H^-1 + H Omega H^-1``.

    ``H`` may be a :class:`MatrixSeries` (result truncated at its order), a
    matrix of LaurentPoly / 0-form matrix (inverse supplied or computed when
    the determinant is a monomial) or a constant matrix.
    """
    vars = conn.vars
    if isinstance(H, MatrixSeries):
        if conn.has_denominator:
            raise ValueError("series gauge requires a Laurent connection")
        Hinv = H.inverse()
        Hv = H.value
        new = wedge(d(Hv) + wedge(Hv, conn.omega), Hinv.value)
        new = new.truncate(H.order, H.weights)
        return Connection(new, _coordinate_components(new, conn.polar), conn.weights)
    if isinstance(H, MatrixKForm):
        Hm = H.functions()
    else:
        Hm = [[p if isinstance(p, LaurentPoly) else LaurentPoly.constant(p, vars) for p in r]
              for r in H]
    if H_inv is None:
        if all(p.is_constant() for r in Hm for p in r):
            try:
                const_inv = linalg.inverse([[p.constant_term() for p in r] for r in Hm])
            except ZeroDivisionError:
                raise ValueError("gauge not invertible at origin") from None
            Hi = [[LaurentPoly.constant(c, vars) for c in r] for r in const_inv]
        else:
            Hi = _matrix_inverse_functions(Hm)
    else:
        Hi = H_inv.functions() if isinstance(H_inv, MatrixKForm) else \
            [[p if isinstance(p, LaurentPoly) else LaurentPoly.constant(p, vars) for p in r]
             for r in H_inv]
        prod = linalg.mat_mul(Hm, Hi)
        for i, r in enumerate(prod):
            for j, p in enumerate(r):
                if p != (1 if i == j else 0):
                    raise ValueError("supplied inverse does not satisfy H H^-1 = E")
    Hf = MatrixKForm.from_functions(Hm)
    Hif = MatrixKForm.from_functions(Hi)
    F = conn.denominator
    new = wedge(d(Hf), Hif) * F + wedge(wedge(Hf, conn.numerator), Hif)
    return Connection(new, _coordinate_components(new, conn.polar), conn.weights)


# ---------------------------------------------------------------------------
# solutions


def _achievable_degrees(weights: WeightVector, order) -> list:
    """All positive values ``b.w`` with ``b`` in Z_+^m not exceeding ``order``."""
    order = Q(order)
    degs = {Q(0)}
    frontier = [Q(0)]
    while frontier:
        nxt = []
        for base in frontier:
            for w in weights:
                v = base + w
                if v <= order and v not in degs:
                    degs.add(v)
                    nxt.append(v)
        frontier = nxt
    return sorted(x for x in degs if x > 0)


def _euler_contract(form: ScalarKForm, weights) -> LaurentPoly:
    """Contraction with the weighted Euler field ``sum w_s t_s d/dt_s`` (1-forms)."""
    out = LaurentPoly.zero(form.vars)
    m = len(form.vars)
    for (s,), p in form.comps.items():
        unit = [0] * m
        unit[s] = 1
        out = out + p.shift(tuple(unit)) * ExactScalar(weights[s])
    return out


def local_solution(conn: Connection, order=8) -> MatrixSeries:
    """Fundamental solution ``X`` with ``X(0) = E`` through weighted degree ``order``.

    Each graded piece solves ``dX_r = (Omega X)_r``; the right side must be
    closed, which is where a non-flat input is detected.
    """
    if conn.has_denominator or conn.numerator.has_negative_exponents():
        raise ValueError("local_solution requires a connection holomorphic at the origin")
    w = conn.weights
    omega_parts = conn.numerator.weighted_parts(w)
    if any(deg <= 0 for deg in omega_parts):
        raise ValueError("holomorphic connection has a part of nonpositive degree")
    vars, n = conn.vars, conn.n
    X = {Q(0): MatrixKForm.identity(n, vars)}
    for r in _achievable_degrees(w, order):
        rho = MatrixKForm.zero(n, 1, vars)
        for q, Oq in omega_parts.items():
            Xp = X.get(r - q)
            if Xp is not None:
                rho = rho + wedge(Oq, Xp)
        if rho.is_zero():
            continue
        if not d(rho).is_zero():
            raise NotIntegrableError(r)
        inv_r = ExactScalar(1) / ExactScalar(r)
        X[r] = MatrixKForm._raw(
            [[ScalarKForm.function(_euler_contract(e, w) * inv_r) for e in row]
             for row in rho.entries], 0, vars)
    total = MatrixKForm.zero(n, 0, vars)
    for part in X.values():
        total = total + part
    return MatrixSeries(total, order, w)


@dataclass
class EulerConnection:
    """``Omega_0 = sum_j A_j dt_j / t_j`` with constant residues."""

    residues: list
    vars: tuple = field(default=())

    def __post_init__(self):
        k = len(self.residues)
        if not self.vars:
            self.vars = tuple(f"t{j + 1}" for j in range(k))
        self.vars = tuple(self.vars)
        if len(self.vars) < k:
            raise ValueError("more residues than variables")
        n = len(self.residues[0])
        for A in self.residues:
            if len(A) != n or any(len(r) != n for r in A):
                raise ValueError("residues must be square matrices of one size")
        self.n = n

    @property
    def is_exact(self) -> bool:
        return all(isinstance(x, ExactScalar) for A in self.residues for r in A for x in r)

    def commutators(self) -> dict:
        out = {}
        for i, j in itertools.combinations(range(len(self.residues)), 2):
            out[(i, j)] = linalg.commutator(self.residues[i], self.residues[j])
        return out

    def height(self) -> float:
        """Diagnostic: sum of entrywise max-norms of the residues."""
        return float(sum(max(abs(complex(x)) for r in A for x in r) for A in self.residues))

    def to_connection(self) -> Connection:
        vars = self.vars
        m = len(vars)
        coeffs = {}
        for j, A in enumerate(self.residues):
            e = [0] * m
            e[j] = -1
            coeffs[(j,)] = [[LaurentPoly.monomial(e, x, vars) for x in r] for r in A]
        omega = MatrixKForm.from_coefficients(coeffs, self.n, 1, vars)
        polar = [PolarComponent.coordinate(j) for j in range(len(self.residues))]
        return Connection(omega, polar)


def euler_monomial_solutions(euler: EulerConnection) -> list:
    """All solutions ``t^a x`` of ``dx = Omega_0 x`` for diagonal exact residues.

    Returns ``[(a, x), ...]`` with ``x`` a standard basis vector, ordered by
    basis index.
    """
    n = euler.n
    for A in euler.residues:
        for i in range(n):
            for j in range(n):
                if i != j and A[i][j]:
                    raise ValueError("exact monomial solutions require diagonal residues")
    out = []
    m = len(euler.vars)
    for i in range(n):
        a = [ExactScalar.coerce(A[i][i]) for A in euler.residues]
        if all(x.is_integer for x in a):
            exps = tuple(int(x.re) for x in a) + (0,) * (m - len(a))
            vec = [ONE if j == i else ZERO for j in range(n)]
            out.append((exps, vec))
    return out


__all__ = ["Connection", "PolarComponent", "EulerConnection", "MatrixSeries",
           "RationalMatrixForm", "NotIntegrableError", "flatness_residual", "gauge",
           "local_solution", "euler_monomial_solutions", "is_squarefree"]

