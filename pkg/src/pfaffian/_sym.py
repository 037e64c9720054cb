"""Conversions between LaurentPoly and sympy expressions."""
from __future__ import annotations

import sympy

from .scalars import ExactScalar, LaurentPoly


def _coeff_to_sympy(c):
    if isinstance(c, ExactScalar):
        re = sympy.Rational(int(c.re.numerator), int(c.re.denominator))
        im = sympy.Rational(int(c.im.numerator), int(c.im.denominator))
        return re + sympy.I * im
    return sympy.Float(c.real) + sympy.I * sympy.Float(c.imag)


def to_sympy(p: LaurentPoly, syms=None):
    if syms is None:
        syms = sympy.symbols(p.vars)
    out = sympy.Integer(0)
    for e, c in p:
        term = _coeff_to_sympy(c)
        for s, k in zip(syms, e):
            if k:
                term = term * s ** k
        out += term
    return out


def from_sympy(expr, syms, vars) -> LaurentPoly:
    """Exact conversion of a polynomial expression with Gaussian-rational coefficients."""
    poly = sympy.Poly(sympy.expand(expr), *syms, domain="QQ_I")
    terms = {}
    for mon, c in poly.terms():
        re, im = sympy.re(c), sympy.im(c)
        terms[tuple(int(x) for x in mon)] = ExactScalar(
            f"{sympy.Rational(re).p}/{sympy.Rational(re).q}",
            f"{sympy.Rational(im).p}/{sympy.Rational(im).q}")
    return LaurentPoly(terms, vars)
