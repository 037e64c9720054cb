"""Exact and floating scalars, weights and multivariate Laurent polynomials.

Exact scalars are Gaussian rationals.  The rational backend is ``gmpy2.mpq``
when gmpy2 is importable and :class:`fractions.Fraction` otherwise; both print
and parse the same ``p/q`` syntax, so results never depend on the backend.
"""
from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Iterator, Mapping, Sequence

try:  # pragma: no cover - exercised implicitly
    from gmpy2 import mpq as _mpq

    def Q(x) -> "Rat":
        """Coerce an int, rational or ``"p/q"`` string to the rational type."""
        if isinstance(x, str):
            return _mpq(x.strip())
        if isinstance(x, float):
            raise TypeError("floats cannot be converted to exact rationals")
        return _mpq(x)

    Rat = type(_mpq(0))
    RATIONAL_BACKEND = "gmpy2"
except ImportError:  # pragma: no cover
    def Q(x) -> "Rat":
        if isinstance(x, float):
            raise TypeError("floats cannot be converted to exact rationals")
        return Fraction(x)

    Rat = Fraction
    RATIONAL_BACKEND = "fractions"

_RATIONAL_TYPES = (int, Rat, Fraction, Rational)


def format_rational(q) -> str:
    """Render a rational as ``"p"`` or ``"p/q"``."""
    q = Q(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def parse_rational(text: str):
    """Parse ``"p"`` or ``"p/q"``; raises ``ValueError`` on malformed input."""
    if not isinstance(text, str):
        raise ValueError(f"rational must be a string, got {type(text).__name__}")
    s = text.strip()
    parts = s.split("/")
    if len(parts) > 2 or not all(_is_int_literal(p) for p in parts):
        raise ValueError(f"malformed rational {text!r}")
    if len(parts) == 2 and int(parts[1]) == 0:
        raise ValueError(f"zero denominator in rational {text!r}")
    return Q(s)


def _is_int_literal(s: str) -> bool:
    s = s.strip()
    if s[:1] in "+-":
        s = s[1:]
    return s.isdigit()


class ExactScalar:
    """Gaussian rational ``re + i*im`` with exact arithmetic."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if type(re) is Rat else Q(re)
        self.im = im if type(im) is Rat else Q(im)

    @staticmethod
    def coerce(x) -> "ExactScalar":
        if isinstance(x, ExactScalar):
            return x
        if isinstance(x, _RATIONAL_TYPES) and not isinstance(x, bool):
            return ExactScalar(x)
        if isinstance(x, str):
            return ExactScalar(parse_rational(x))
        raise TypeError(f"cannot use {type(x).__name__} as an exact scalar")

    # arithmetic -------------------------------------------------------
    def _other(self, x):
        if isinstance(x, ExactScalar):
            return x
        if isinstance(x, _RATIONAL_TYPES) and not isinstance(x, bool):
            return ExactScalar(x)
        return None

    def __add__(self, x):
        o = self._other(x)
        if o is None:
            if isinstance(x, (float, complex)):
                return complex(self) + x
            return NotImplemented
        return ExactScalar(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, x):
        o = self._other(x)
        if o is None:
            if isinstance(x, (float, complex)):
                return complex(self) - x
            return NotImplemented
        return ExactScalar(self.re - o.re, self.im - o.im)

    def __rsub__(self, x):
        o = self._other(x)
        if o is None:
            if isinstance(x, (float, complex)):
                return x - complex(self)
            return NotImplemented
        return o - self

    def __mul__(self, x):
        o = self._other(x)
        if o is None:
            if isinstance(x, (float, complex)):
                return complex(self) * x
            return NotImplemented
        if not self.im and not o.im:
            return ExactScalar(self.re * o.re, self.im)
        return ExactScalar(self.re * o.re - self.im * o.im,
                           self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, x):
        o = self._other(x)
        if o is None:
            if isinstance(x, (float, complex)):
                return complex(self) / x
            return NotImplemented
        if not o:
            raise ZeroDivisionError("division by exact zero")
        if not o.im:
            return ExactScalar(self.re / o.re, self.im / o.re)
        den = o.re * o.re + o.im * o.im
        return ExactScalar((self.re * o.re + self.im * o.im) / den,
                           (self.im * o.re - self.re * o.im) / den)

    def __rtruediv__(self, x):
        o = self._other(x)
        if o is None:
            if isinstance(x, (float, complex)):
                return x / complex(self)
            return NotImplemented
        return o / self

    def __neg__(self):
        return ExactScalar(-self.re, -self.im)

    def __pos__(self):
        return self

    def __pow__(self, e: int):
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            return ExactScalar(1) / (self ** (-e))
        out = ExactScalar(1)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def conjugate(self) -> "ExactScalar":
        return ExactScalar(self.re, -self.im)

    # predicates -------------------------------------------------------
    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, x):
        o = self._other(x)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    @property
    def is_real(self) -> bool:
        return not self.im

    @property
    def is_integer(self) -> bool:
        return not self.im and self.re.denominator == 1

    def to_complex(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __complex__(self):
        return self.to_complex()

    def __repr__(self):
        return f"ExactScalar({str(self)!r})"

    def __str__(self):
        if not self.im:
            return format_rational(self.re)
        im = format_rational(self.im)
        if not self.re:
            return f"{im}*I"
        sign = "" if im.startswith("-") else "+"
        return f"{format_rational(self.re)}{sign}{im}*I"


ZERO = ExactScalar(0)
ONE = ExactScalar(1)
I = ExactScalar(0, 1)


def float_scalar(x) -> complex:
    """Validate and convert to a finite complex double (the float scalar domain)."""
    if isinstance(x, ExactScalar):
        z = x.to_complex()
    else:
        z = complex(x)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError(f"non-finite float scalar {x!r}")
    return z


def is_exact(c) -> bool:
    return isinstance(c, ExactScalar)


class WeightVector(tuple):
    """Positive rational weights, one per variable."""

    def __new__(cls, weights: Iterable):
        ws = tuple(Q(w) if not isinstance(w, str) else parse_rational(w) for w in weights)
        if any(w <= 0 for w in ws):
            raise ValueError("weights must be strictly positive")
        return super().__new__(cls, ws)

    @classmethod
    def standard(cls, m: int) -> "WeightVector":
        return cls([1] * m)

    def degree(self, exps: Sequence[int]):
        return sum((w * e for w, e in zip(self, exps)), Q(0))


def _exps_key(exps):
    return (sum(exps), exps)


class LaurentPoly:
    """Multivariate Laurent polynomial with a fixed scalar domain.

    ``terms`` maps exponent tuples to nonzero coefficients.  Coefficients are
    either all :class:`ExactScalar` or all Python ``complex``; mixing raises
    ``TypeError`` at the arithmetic level.
    """

    __slots__ = ("terms", "vars", "_hash")

    def __init__(self, terms: Mapping, vars: Sequence[str]):
        self.vars = tuple(vars)
        m = len(self.vars)
        clean = {}
        for e, c in terms.items():
            if not c:
                continue
            e = tuple(e)
            if len(e) != m:
                raise ValueError(f"exponent {e} has wrong length for {m} variables")
            clean[e] = c
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict, vars: tuple) -> "LaurentPoly":
        p = cls.__new__(cls)
        p.terms = terms
        p.vars = vars
        p._hash = None
        return p

    # constructors -----------------------------------------------------
    @classmethod
    def zero(cls, vars) -> "LaurentPoly":
        return cls._raw({}, tuple(vars))

    @classmethod
    def constant(cls, c, vars) -> "LaurentPoly":
        vars = tuple(vars)
        c = _coerce_coeff(c)
        return cls._raw({(0,) * len(vars): c} if c else {}, vars)

    @classmethod
    def monomial(cls, exps, c=1, vars=()) -> "LaurentPoly":
        vars = tuple(vars)
        c = _coerce_coeff(c)
        return cls._raw({tuple(exps): c} if c else {}, vars)

    @classmethod
    def var(cls, i: int, vars) -> "LaurentPoly":
        vars = tuple(vars)
        e = [0] * len(vars)
        e[i] = 1
        return cls._raw({tuple(e): ONE}, vars)

    # basic protocol ---------------------------------------------------
    @property
    def nvars(self) -> int:
        return len(self.vars)

    def __iter__(self) -> Iterator:
        """Terms in graded-lexicographic order (total degree, then exponents)."""
        for e in sorted(self.terms, key=_exps_key):
            yield e, self.terms[e]

    def sorted_terms(self, weights: Sequence | None = None):
        if weights is None:
            return list(self)
        return sorted(self.terms.items(),
                      key=lambda kv: (sum(w * e for w, e in zip(weights, kv[0])), kv[0]))

    def __len__(self):
        return len(self.terms)

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if isinstance(other, LaurentPoly):
            return self.vars == other.vars and self.terms == other.terms
        try:
            c = _coerce_coeff(other)
        except TypeError:
            return NotImplemented
        return self.terms == ({(0,) * self.nvars: c} if c else {})

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.vars, frozenset(self.terms.items())))
        return self._hash

    @property
    def is_exact(self) -> bool:
        return all(isinstance(c, ExactScalar) for c in self.terms.values())

    def is_constant(self) -> bool:
        z = (0,) * self.nvars
        return all(e == z for e in self.terms)

    def constant_term(self):
        z = (0,) * self.nvars
        c = self.terms.get(z)
        if c is not None:
            return c
        return ZERO if self.is_exact or not self.terms else 0j

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def has_negative_exponents(self) -> bool:
        return any(x < 0 for e in self.terms for x in e)

    def min_exponents(self) -> tuple:
        if not self.terms:
            return (0,) * self.nvars
        return tuple(min(col) for col in zip(*self.terms))

    def max_exponents(self) -> tuple:
        if not self.terms:
            return (0,) * self.nvars
        return tuple(max(col) for col in zip(*self.terms))

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def weighted_degree(self, weights) -> Rat:
        return max((sum((w * x for w, x in zip(weights, e)), Q(0)) for e in self.terms),
                   default=Q(0))

    # arithmetic -------------------------------------------------------
    def _check(self, other: "LaurentPoly"):
        if other.vars is not self.vars and other.vars != self.vars:
            raise ValueError(f"variable mismatch {self.vars} vs {other.vars}")

    def _lift(self, x) -> "LaurentPoly":
        if isinstance(x, LaurentPoly):
            self._check(x)
            return x
        return LaurentPoly.constant(x, self.vars)

    def __add__(self, other):
        try:
            o = self._lift(other)
        except TypeError:
            return NotImplemented
        if not o.terms:
            return self
        t = dict(self.terms)
        for e, c in o.terms.items():
            v = t.get(e)
            if v is None:
                t[e] = c
            else:
                s = v + c
                if s:
                    t[e] = s
                else:
                    del t[e]
        return LaurentPoly._raw(t, self.vars)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly._raw({e: -c for e, c in self.terms.items()}, self.vars)

    def __sub__(self, other):
        try:
            o = self._lift(other)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, LaurentPoly):
            try:
                c = _coerce_coeff(other)
            except TypeError:
                return NotImplemented
            return self.scale(c)
        self._check(other)
        if not self.terms or not other.terms:
            return LaurentPoly._raw({}, self.vars)
        t: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple([a + b for a, b in zip(e1, e2)])
                v = t.get(e)
                t[e] = c1 * c2 if v is None else v + c1 * c2
        return LaurentPoly._raw({e: c for e, c in t.items() if c}, self.vars)

    def __rmul__(self, other):
        return self.__mul__(other)

    def scale(self, c) -> "LaurentPoly":
        if not c:
            return LaurentPoly._raw({}, self.vars)
        return LaurentPoly._raw({e: v * c for e, v in self.terms.items()}, self.vars)

    def __truediv__(self, other):
        if isinstance(other, LaurentPoly):
            q = self.divide_exact(other)
            if q is None:
                raise ArithmeticError("polynomial division is not exact")
            return q
        c = _coerce_coeff(other)
        return LaurentPoly._raw({e: v / c for e, v in self.terms.items()}, self.vars)

    def __pow__(self, e: int):
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            if not self.is_monomial():
                raise ArithmeticError("negative power of a non-monomial")
            (ex, c), = self.terms.items()
            return LaurentPoly.monomial(tuple(-x * (-e) for x in ex), _one_like(c) / c ** (-e),
                                        self.vars)
        out = LaurentPoly.constant(_one_like(next(iter(self.terms.values()), ONE)), self.vars)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def shift(self, exps) -> "LaurentPoly":
        """Multiply by the monomial ``t**exps``."""
        return LaurentPoly._raw(
            {tuple([a + b for a, b in zip(e, exps)]): c for e, c in self.terms.items()},
            self.vars)

    # calculus ---------------------------------------------------------
    def derivative(self, i: int) -> "LaurentPoly":
        t = {}
        for e, c in self.terms.items():
            k = e[i]
            if k:
                ne = list(e)
                ne[i] -= 1
                t[tuple(ne)] = c * k
        return LaurentPoly._raw(t, self.vars)

    # evaluation and substitution --------------------------------------
    def evaluate(self, point: Sequence):
        """Evaluate at a point of exact or float scalars."""
        point = [ExactScalar.coerce(x) if isinstance(x, _RATIONAL_TYPES) else x for x in point]
        total = None
        for e, c in self.terms.items():
            v = c
            for x, k in zip(point, e):
                if k:
                    v = v * (x ** k)
            total = v if total is None else total + v
        if total is None:
            return ZERO if self.is_exact else 0j
        return total

    def substitute(self, images: Sequence["LaurentPoly"], vars=None) -> "LaurentPoly":
        """Substitute ``images[i]`` for variable ``i``.

        Negative exponents are allowed only when the image is a monomial.
        """
        if vars is None:
            vars = images[0].vars if images else ()
        vars = tuple(vars)
        cache: dict = {}

        def power(i, k):
            key = (i, k)
            if key not in cache:
                img = images[i]
                if k < 0 and not img.is_monomial():
                    raise ArithmeticError("non-monomial substitution into Laurent pole")
                cache[key] = img ** k
            return cache[key]

        out = LaurentPoly.zero(vars)
        for e, c in self.terms.items():
            term = LaurentPoly.constant(c, vars)
            for i, k in enumerate(e):
                if k:
                    term = term * power(i, k)
            out = out + term
        return out

    def to_float(self) -> "LaurentPoly":
        return LaurentPoly._raw({e: float_scalar(c) for e, c in self.terms.items()}, self.vars)

    def with_vars(self, vars) -> "LaurentPoly":
        vars = tuple(vars)
        if len(vars) != self.nvars:
            raise ValueError("renaming must keep the variable count")
        return LaurentPoly._raw(dict(self.terms), vars)

    def embed(self, vars, positions: Sequence[int]) -> "LaurentPoly":
        """Re-home into a larger variable list, variable i going to ``positions[i]``."""
        vars = tuple(vars)
        m = len(vars)
        t = {}
        for e, c in self.terms.items():
            ne = [0] * m
            for i, k in enumerate(e):
                ne[positions[i]] = k
            t[tuple(ne)] = c
        return LaurentPoly._raw(t, vars)

    # division ---------------------------------------------------------
    def divide_exact(self, other: "LaurentPoly") -> "LaurentPoly | None":
        """Exact quotient ``self / other`` in the Laurent ring, or None."""
        self._check(other)
        if not other.terms:
            raise ZeroDivisionError("division by zero polynomial")
        if not self.terms:
            return self
        if other.is_monomial():
            (e2, c2), = other.terms.items()
            return LaurentPoly._raw(
                {tuple([a - b for a, b in zip(e, e2)]): c / c2 for e, c in self.terms.items()},
                self.vars)
        # clear monomials and do polynomial long division in lex order
        sa, sb = self.min_exponents(), other.min_exponents()
        a = self.shift(tuple(-x for x in sa))
        b = other.shift(tuple(-x for x in sb))
        lead_b = max(b.terms)
        lc_b = b.terms[lead_b]
        rem = dict(a.terms)
        quot = {}
        while rem:
            lead = max(rem)
            diff = tuple([x - y for x, y in zip(lead, lead_b)])
            if any(x < 0 for x in diff):
                return None
            coef = rem[lead] / lc_b
            quot[diff] = coef
            for e, c in b.terms.items():
                ne = tuple([x + y for x, y in zip(e, diff)])
                v = rem.get(ne)
                nv = -coef * c if v is None else v - coef * c
                if nv:
                    rem[ne] = nv
                else:
                    rem.pop(ne, None)
        q = LaurentPoly._raw(quot, self.vars)
        return q.shift(tuple(x - y for x, y in zip(sa, sb)))

    def divides(self, other: "LaurentPoly") -> bool:
        """True when ``self`` divides ``other`` in the polynomial ring (no new poles)."""
        q = other.divide_exact(self)
        return q is not None and not q.has_negative_exponents()

    def monomial_content(self) -> tuple:
        """Split into (exponent vector of the largest monomial factor, cofactor)."""
        me = self.min_exponents()
        return me, self.shift(tuple(-x for x in me))

    # formatting -------------------------------------------------------
    def __repr__(self):
        return f"LaurentPoly({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        pieces = []
        for e, c in self:
            mono = "*".join(
                (v if k == 1 else f"{v}^{k}") for v, k in zip(self.vars, e) if k)
            cs = str(c) if isinstance(c, ExactScalar) else repr(c)
            if not mono:
                pieces.append(cs)
            elif cs == "1":
                pieces.append(mono)
            elif cs == "-1":
                pieces.append("-" + mono)
            else:
                pieces.append(f"({cs})*{mono}")
        return " + ".join(pieces)


def _coerce_coeff(c):
    if isinstance(c, (ExactScalar, complex)):
        return c
    if isinstance(c, float):
        return float_scalar(c)
    return ExactScalar.coerce(c)


def _one_like(c):
    return ONE if isinstance(c, ExactScalar) else 1 + 0j


def canonicalize(p: LaurentPoly) -> LaurentPoly:
    """Return ``p`` with zero coefficients removed (all constructors already do this)."""
    return LaurentPoly(p.terms, p.vars)


def graded_parts(p: LaurentPoly, w: Sequence) -> list:
    """Split ``p`` into quasihomogeneous parts.

    Returns ``[(degree, part), ...]`` with strictly increasing weighted degrees
    ``sum(b_j * w_j)``; the parts sum to ``p``.
    """
    w = WeightVector(w)
    buckets: dict = {}
    for e, c in p.terms.items():
        buckets.setdefault(w.degree(e), {})[e] = c
    return [(d, LaurentPoly._raw(buckets[d], p.vars)) for d in sorted(buckets)]


__all__ = [
    "ExactScalar", "LaurentPoly", "WeightVector", "Q", "Rat", "ZERO", "ONE", "I",
    "canonicalize", "graded_parts", "float_scalar", "format_rational", "parse_rational",
    "is_exact", "RATIONAL_BACKEND",
]

