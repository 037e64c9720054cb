"""Scalar and matrix differential forms with Laurent-polynomial coefficients.

A k-form is stored expanded over the coordinate coframe: a map from strictly
increasing index tuples ``(i1 < ... < ik)`` to the coefficient of
``dt_i1 ^ ... ^ dt_ik``.  Matrix forms are square arrays of such forms and
multiply by the usual row-by-column rule with wedge in place of product.
"""
from __future__ import annotations

from typing import Callable, Sequence

from .scalars import ONE, LaurentPoly, Q, WeightVector


def _merge_sign(I: tuple, J: tuple):
    """Sign and sorted union for ``dt_I ^ dt_J``; sign 0 when they overlap."""
    if not I:
        return 1, J
    if not J:
        return 1, I
    sJ = set(J)
    if any(i in sJ for i in I):
        return 0, None
    inversions = 0
    for i in I:
        for j in J:
            if i > j:
                inversions += 1
    return (-1 if inversions & 1 else 1), tuple(sorted(I + J))


class ScalarKForm:
    """A k-form ``sum_I c_I dt_I`` with :class:`LaurentPoly` coefficients."""

    __slots__ = ("k", "comps", "vars")

    def __init__(self, k: int, comps: dict, vars: Sequence[str]):
        self.vars = tuple(vars)
        m = len(self.vars)
        if k < 0 or k > m:
            raise ValueError(f"form degree {k} outside 0..{m}")
        self.k = k
        clean = {}
        for idx, c in comps.items():
            idx = tuple(idx)
            if len(idx) != k or any(a >= b for a, b in zip(idx, idx[1:])):
                raise ValueError(f"index tuple {idx} is not strictly increasing of length {k}")
            if any(i < 0 or i >= m for i in idx):
                raise ValueError(f"index tuple {idx} out of range")
            if not isinstance(c, LaurentPoly):
                c = LaurentPoly.constant(c, self.vars)
            if c.vars != self.vars:
                raise ValueError("coefficient variables differ from form variables")
            if c:
                clean[idx] = c
        self.comps = clean

    @classmethod
    def _raw(cls, k, comps, vars):
        f = cls.__new__(cls)
        f.k, f.comps, f.vars = k, comps, vars
        return f

    # constructors -----------------------------------------------------
    @classmethod
    def zero(cls, k: int, vars) -> "ScalarKForm":
        return cls._raw(k, {}, tuple(vars))

    @classmethod
    def function(cls, p) -> "ScalarKForm":
        return cls._raw(0, {(): p} if p else {}, p.vars)

    @classmethod
    def dt(cls, i: int, vars) -> "ScalarKForm":
        vars = tuple(vars)
        return cls._raw(1, {(i,): LaurentPoly.constant(ONE, vars)}, vars)

    @classmethod
    def from_gradient(cls, p: LaurentPoly) -> "ScalarKForm":
        return d(cls.function(p))

    # protocol ---------------------------------------------------------
    @property
    def nvars(self):
        return len(self.vars)

    def coefficient(self, idx) -> LaurentPoly:
        return self.comps.get(tuple(idx)) or LaurentPoly.zero(self.vars)

    def items(self):
        return sorted(self.comps.items())

    def is_zero(self) -> bool:
        return not self.comps

    def __bool__(self):
        return bool(self.comps)

    def __eq__(self, other):
        if not isinstance(other, ScalarKForm):
            return NotImplemented
        return self.k == other.k and self.vars == other.vars and self.comps == other.comps

    def __hash__(self):
        return hash((self.k, self.vars, frozenset(self.comps.items())))

    def _same(self, other: "ScalarKForm"):
        if other.vars != self.vars:
            raise ValueError("variable mismatch between forms")
        if other.k != self.k:
            raise ValueError(f"cannot add forms of degrees {self.k} and {other.k}")

    def __add__(self, other):
        if not isinstance(other, ScalarKForm):
            return NotImplemented
        self._same(other)
        out = dict(self.comps)
        for idx, c in other.comps.items():
            v = out.get(idx)
            s = c if v is None else v + c
            if s:
                out[idx] = s
            else:
                out.pop(idx, None)
        return ScalarKForm._raw(self.k, out, self.vars)

    def __neg__(self):
        return ScalarKForm._raw(self.k, {i: -c for i, c in self.comps.items()}, self.vars)

    def __sub__(self, other):
        if not isinstance(other, ScalarKForm):
            return NotImplemented
        return self + (-other)

    def __mul__(self, f):
        """Multiply by a function (LaurentPoly) or a scalar."""
        if isinstance(f, ScalarKForm):
            return NotImplemented
        out = {}
        for idx, c in self.comps.items():
            p = c * f
            if p:
                out[idx] = p
        return ScalarKForm._raw(self.k, out, self.vars)

    __rmul__ = __mul__

    def map_coeffs(self, fn: Callable[[LaurentPoly], LaurentPoly], vars=None) -> "ScalarKForm":
        vars = self.vars if vars is None else tuple(vars)
        out = {}
        for idx, c in self.comps.items():
            p = fn(c)
            if p:
                out[idx] = p
        return ScalarKForm._raw(self.k, out, vars)

    def weighted_parts(self, weights) -> dict:
        """Split into quasihomogeneous pieces; ``dt_s`` carries the weight of ``t_s``."""
        w = WeightVector(weights)
        parts: dict = {}
        for idx, c in self.comps.items():
            base = sum((w[i] for i in idx), Q(0))
            for e, v in c.terms.items():
                deg = base + w.degree(e)
                parts.setdefault(deg, {}).setdefault(idx, {})[e] = v
        return {deg: ScalarKForm._raw(self.k, {i: LaurentPoly._raw(t, self.vars)
                                               for i, t in comp.items()}, self.vars)
                for deg, comp in parts.items()}

    def has_negative_exponents(self) -> bool:
        return any(c.has_negative_exponents() for c in self.comps.values())

    def to_float(self) -> "ScalarKForm":
        return self.map_coeffs(LaurentPoly.to_float)

    def __repr__(self):
        return f"ScalarKForm({self})"

    def __str__(self):
        if not self.comps:
            return "0"
        out = []
        for idx, c in self.items():
            basis = "^".join(f"d{self.vars[i]}" for i in idx)
            out.append(f"({c})" + (f"*{basis}" if basis else ""))
        return " + ".join(out)


def _scalar_wedge(a: ScalarKForm, b: ScalarKForm) -> ScalarKForm:
    if a.vars != b.vars:
        raise ValueError("variable mismatch between forms")
    k = a.k + b.k
    if k > len(a.vars):
        return ScalarKForm._raw(k, {}, a.vars)
    out: dict = {}
    for I, p in a.comps.items():
        for J, q in b.comps.items():
            sign, K = _merge_sign(I, J)
            if not sign:
                continue
            term = p * q
            if sign < 0:
                term = -term
            v = out.get(K)
            out[K] = term if v is None else v + term
    return ScalarKForm._raw(k, {K: c for K, c in out.items() if c}, a.vars)


def _scalar_d(a: ScalarKForm) -> ScalarKForm:
    m = len(a.vars)
    if a.k + 1 > m:
        return ScalarKForm._raw(a.k + 1, {}, a.vars)
    out: dict = {}
    for I, p in a.comps.items():
        for i in range(m):
            if i in I:
                continue
            dp = p.derivative(i)
            if not dp:
                continue
            before = sum(1 for j in I if j < i)
            if before & 1:
                dp = -dp
            K = tuple(sorted(I + (i,)))
            v = out.get(K)
            out[K] = dp if v is None else v + dp
    return ScalarKForm._raw(a.k + 1, {K: c for K, c in out.items() if c}, a.vars)


class MatrixKForm:
    """An n-by-n matrix of k-forms over a common variable list."""

    __slots__ = ("n", "k", "entries", "vars")

    def __init__(self, entries: Sequence[Sequence[ScalarKForm]], k: int | None = None,
                 vars: Sequence[str] | None = None):
        rows = [list(r) for r in entries]
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise ValueError("matrix form must be square")
        if n == 0:
            raise ValueError("empty matrix form")
        self.n = n
        self.k = rows[0][0].k if k is None else k
        self.vars = rows[0][0].vars if vars is None else tuple(vars)
        for r in rows:
            for e in r:
                if e.k != self.k or e.vars != self.vars:
                    raise ValueError("entries must share degree and variables")
        self.entries = tuple(tuple(r) for r in rows)

    @classmethod
    def _raw(cls, entries, k, vars):
        f = cls.__new__(cls)
        f.entries = tuple(tuple(r) for r in entries)
        f.n = len(f.entries)
        f.k = k
        f.vars = tuple(vars)
        return f

    # constructors -----------------------------------------------------
    @classmethod
    def zero(cls, n: int, k: int, vars) -> "MatrixKForm":
        z = ScalarKForm.zero(k, vars)
        return cls._raw([[z] * n for _ in range(n)], k, vars)

    @classmethod
    def identity(cls, n: int, vars) -> "MatrixKForm":
        return cls.from_functions([[LaurentPoly.constant(1 if i == j else 0, vars)
                                    for j in range(n)] for i in range(n)])

    @classmethod
    def from_functions(cls, mat: Sequence[Sequence[LaurentPoly]]) -> "MatrixKForm":
        vars = mat[0][0].vars
        return cls._raw([[ScalarKForm.function(p) for p in row] for row in mat], 0, vars)

    @classmethod
    def from_constant(cls, mat, vars) -> "MatrixKForm":
        """Constant matrix (exact scalars) as a 0-form."""
        return cls.from_functions([[LaurentPoly.constant(c, vars) for c in row] for row in mat])

    @classmethod
    def from_coefficients(cls, coeffs: dict, n: int, k: int, vars) -> "MatrixKForm":
        """Build from ``{index_tuple: n x n matrix of LaurentPoly}``."""
        vars = tuple(vars)
        ent = [[dict() for _ in range(n)] for _ in range(n)]
        for idx, mat in coeffs.items():
            for i in range(n):
                for j in range(n):
                    p = mat[i][j]
                    if not isinstance(p, LaurentPoly):
                        p = LaurentPoly.constant(p, vars)
                    if p:
                        prev = ent[i][j].get(tuple(idx))
                        ent[i][j][tuple(idx)] = p if prev is None else prev + p
        return cls._raw([[ScalarKForm(k, ent[i][j], vars) for j in range(n)] for i in range(n)],
                        k, vars)

    # protocol ---------------------------------------------------------
    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def is_zero(self) -> bool:
        return all(e.is_zero() for r in self.entries for e in r)

    def __eq__(self, other):
        if not isinstance(other, MatrixKForm):
            return NotImplemented
        return (self.n == other.n and self.k == other.k and self.vars == other.vars
                and self.entries == other.entries)

    def __hash__(self):
        return hash((self.n, self.k, self.vars, self.entries))

    def _same(self, other):
        if not isinstance(other, MatrixKForm):
            raise TypeError("expected a MatrixKForm")
        if other.n != self.n or other.vars != self.vars:
            raise ValueError("matrix forms differ in size or variables")

    def __add__(self, other):
        if not isinstance(other, MatrixKForm):
            return NotImplemented
        self._same(other)
        if other.k != self.k:
            raise ValueError("cannot add matrix forms of different degrees")
        return MatrixKForm._raw([[a + b for a, b in zip(r, s)]
                                 for r, s in zip(self.entries, other.entries)], self.k, self.vars)

    def __neg__(self):
        return MatrixKForm._raw([[-a for a in r] for r in self.entries], self.k, self.vars)

    def __sub__(self, other):
        if not isinstance(other, MatrixKForm):
            return NotImplemented
        return self + (-other)

    def __mul__(self, f):
        """Entrywise multiplication by a scalar or scalar function."""
        if isinstance(f, MatrixKForm):
            return NotImplemented
        return MatrixKForm._raw([[a * f for a in r] for r in self.entries], self.k, self.vars)

    __rmul__ = __mul__

    def map_coeffs(self, fn, vars=None) -> "MatrixKForm":
        vars = self.vars if vars is None else tuple(vars)
        return MatrixKForm._raw([[a.map_coeffs(fn, vars) for a in r] for r in self.entries],
                                self.k, vars)

    def coefficient_matrix(self, idx) -> list:
        idx = tuple(idx)
        return [[e.coefficient(idx) for e in r] for r in self.entries]

    def index_tuples(self) -> list:
        out = set()
        for r in self.entries:
            for e in r:
                out.update(e.comps)
        return sorted(out)

    def functions(self) -> list:
        """For a 0-form: the matrix of coefficient functions."""
        if self.k != 0:
            raise ValueError("not a matrix of functions")
        return self.coefficient_matrix(())

    def iter_terms(self):
        """Yield ``(i, j, index_tuple, exponents, coefficient)`` deterministically."""
        for i, r in enumerate(self.entries):
            for j, e in enumerate(r):
                for idx, p in e.items():
                    for ex, c in p:
                        yield i, j, idx, ex, c

    def weighted_parts(self, weights) -> dict:
        parts: dict = {}
        for i, r in enumerate(self.entries):
            for j, e in enumerate(r):
                for deg, piece in e.weighted_parts(weights).items():
                    parts.setdefault(deg, {})[(i, j)] = piece
        out = {}
        for deg, ent in parts.items():
            z = ScalarKForm.zero(self.k, self.vars)
            out[deg] = MatrixKForm._raw([[ent.get((i, j), z) for j in range(self.n)]
                                         for i in range(self.n)], self.k, self.vars)
        return out

    def truncate(self, max_degree, weights) -> "MatrixKForm":
        """Keep only terms of weighted degree at most ``max_degree``."""
        out = MatrixKForm.zero(self.n, self.k, self.vars)
        for deg, part in self.weighted_parts(weights).items():
            if deg <= max_degree:
                out = out + part
        return out

    def has_negative_exponents(self) -> bool:
        return any(e.has_negative_exponents() for r in self.entries for e in r)

    def transpose(self) -> "MatrixKForm":
        return MatrixKForm._raw([list(c) for c in zip(*self.entries)], self.k, self.vars)

    def trace(self) -> ScalarKForm:
        out = ScalarKForm.zero(self.k, self.vars)
        for i in range(self.n):
            out = out + self.entries[i][i]
        return out

    def to_float(self) -> "MatrixKForm":
        return self.map_coeffs(LaurentPoly.to_float)

    def __repr__(self):
        return f"MatrixKForm(n={self.n}, k={self.k}, vars={self.vars})"

    def __str__(self):
        return "[" + ",\n ".join("[" + ", ".join(str(e) for e in r) + "]"
                                 for r in self.entries) + "]"


def wedge(a, b):
    """Wedge product; for matrix forms ``(A^B)_ij = sum_k A_ik ^ B_kj``."""
    if isinstance(a, ScalarKForm) and isinstance(b, ScalarKForm):
        return _scalar_wedge(a, b)
    if isinstance(a, MatrixKForm) and isinstance(b, MatrixKForm):
        a._same(b)
        n = a.n
        k = a.k + b.k
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = ScalarKForm.zero(k, a.vars)
                for l in range(n):
                    x, y = a.entries[i][l], b.entries[l][j]
                    if x.comps and y.comps:
                        acc = acc + _scalar_wedge(x, y)
                row.append(acc)
            rows.append(row)
        return MatrixKForm._raw(rows, k, a.vars)
    if isinstance(a, ScalarKForm) and isinstance(b, MatrixKForm):
        return MatrixKForm._raw([[_scalar_wedge(a, e) for e in r] for r in b.entries],
                                a.k + b.k, b.vars)
    if isinstance(a, MatrixKForm) and isinstance(b, ScalarKForm):
        return MatrixKForm._raw([[_scalar_wedge(e, b) for e in r] for r in a.entries],
                                a.k + b.k, a.vars)
    raise TypeError("wedge expects forms")


def d(a):
    """Exterior derivative, entrywise on matrix forms."""
    if isinstance(a, ScalarKForm):
        return _scalar_d(a)
    if isinstance(a, MatrixKForm):
        return MatrixKForm._raw([[_scalar_d(e) for e in r] for r in a.entries], a.k + 1, a.vars)
    raise TypeError("d expects a form")


def bracket(a: MatrixKForm, b: MatrixKForm) -> MatrixKForm:
    """Sign-adjusted bracket of matrix 1-forms: ``A^B + B^A``."""
    if a.k != 1 or b.k != 1:
        raise ValueError("bracket is defined for matrix 1-forms")
    return wedge(a, b) + wedge(b, a)


class PolyMap:
    """A Laurent-monomial-friendly polynomial map used for pullbacks.

    ``images[i]`` is the polynomial (in ``source_vars``) substituted for the
    i-th variable of the form being pulled back.
    """

    __slots__ = ("source_vars", "images")

    def __init__(self, source_vars: Sequence[str], images: Sequence[LaurentPoly]):
        self.source_vars = tuple(source_vars)
        imgs = []
        for p in images:
            if not isinstance(p, LaurentPoly):
                p = LaurentPoly.constant(p, self.source_vars)
            if p.vars != self.source_vars:
                raise ValueError("map components must be polynomials in the source variables")
            imgs.append(p)
        self.images = tuple(imgs)

    @property
    def target_dim(self):
        return len(self.images)

    def differentials(self) -> list:
        return [d(ScalarKForm.function(p)) if p else ScalarKForm.zero(1, self.source_vars)
                for p in self.images]

    def apply(self, p: LaurentPoly) -> LaurentPoly:
        if p.nvars != len(self.images):
            raise ValueError("polynomial variable count does not match the map")
        return p.substitute(self.images, self.source_vars)


def pullback(a, F: PolyMap):
    """Pull back a scalar or matrix form along ``F``."""
    if isinstance(a, MatrixKForm):
        cache: dict = {}
        rows = [[_scalar_pullback(e, F, cache) for e in r] for r in a.entries]
        return MatrixKForm._raw(rows, a.k, F.source_vars)
    if isinstance(a, ScalarKForm):
        return _scalar_pullback(a, F, {})
    if isinstance(a, LaurentPoly):
        return F.apply(a)
    raise TypeError("pullback expects a form")


def _scalar_pullback(a: ScalarKForm, F: PolyMap, cache: dict) -> ScalarKForm:
    if a.nvars != F.target_dim:
        raise ValueError("form variable count does not match the map")
    src = F.source_vars
    if "dF" not in cache:
        cache["dF"] = F.differentials()
    dF = cache["dF"]
    if a.k > len(src):
        return ScalarKForm.zero(a.k, src)
    out = ScalarKForm.zero(a.k, src)
    for idx, p in a.comps.items():
        key = ("basis", idx)
        if key not in cache:
            b = ScalarKForm.function(LaurentPoly.constant(ONE, src))
            for i in idx:
                b = _scalar_wedge(b, dF[i])
            cache[key] = b
        basis = cache[key]
        if basis.is_zero():
            continue
        out = out + basis * F.apply(p)
    return out


class DivisionError(ArithmeticError):
    pass


def divide_by(w: ScalarKForm, xi: ScalarKForm, pivot: int | None = None) -> ScalarKForm:
    """Find ``theta`` with ``theta ^ xi == w`` given ``w ^ xi == 0``.

    The ratio comes from rewriting ``w`` in the coframe where ``dt_pivot`` is
    replaced by ``xi``; the pivot coefficient of ``xi`` must be a unit or a
    monomial.  When ``pivot`` is None the first coordinate whose coefficient
    is a constant (else a monomial) is used.
    """
    if xi.k != 1:
        raise ValueError("divisor must be a 1-form")
    if w.k == 0:
        raise ValueError("cannot divide a 0-form by a 1-form")
    if not _scalar_wedge(w, xi).is_zero():
        raise DivisionError("not divisible: w ^ xi is nonzero")
    if pivot is None:
        pivot = _choose_pivot(xi)
    c = xi.coefficient((pivot,))
    if not c or not c.is_monomial():
        raise DivisionError("pivot not invertible in Laurent ring")
    out: dict = {}
    for idx, a in w.comps.items():
        if pivot not in idx:
            continue
        pos = idx.index(pivot)
        rest = idx[:pos] + idx[pos + 1:]
        term = a.divide_exact(c)
        if (pos + w.k - 1) & 1:
            term = -term
        prev = out.get(rest)
        out[rest] = term if prev is None else prev + term
    theta = ScalarKForm(w.k - 1, out, w.vars)
    return theta


def _choose_pivot(xi: ScalarKForm) -> int:
    mono = None
    for (i,), c in sorted(xi.comps.items()):
        if c.is_constant():
            return i
        if mono is None and c.is_monomial():
            mono = i
    if mono is None:
        raise DivisionError("pivot not invertible in Laurent ring")
    return mono


__all__ = [
    "ScalarKForm", "MatrixKForm", "PolyMap", "DivisionError", "wedge", "d", "bracket",
    "pullback", "divide_by",
]

