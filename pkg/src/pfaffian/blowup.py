"""Quadratic blow-up of the origin in the plane, chart by chart.

Chart 1 is ``(t1, s) -> (t1, s*t1)`` and chart 2 is ``(s', t2) -> (s'*t2, t2)``;
the exceptional divisor is ``{t1 = 0}`` resp. ``{t2 = 0}``.
"""
from __future__ import annotations

from dataclasses import dataclass

from .connection import Connection, PolarComponent, _coordinate_components, flatness_residual
from .exterior import PolyMap, pullback
from .logpole import residue
from .scalars import ZERO, ExactScalar, LaurentPoly


@dataclass(frozen=True)
class BlowupChart:
    chart: int
    source_vars: tuple = ()

    def __post_init__(self):
        if self.chart not in (1, 2):
            raise ValueError("chart must be 1 or 2")
        if not self.source_vars:
            object.__setattr__(self, "source_vars",
                               ("t1", "s") if self.chart == 1 else ("s'", "t2"))
        if len(self.source_vars) != 2:
            raise ValueError("a chart has two source variables")

    @property
    def exceptional_index(self) -> int:
        return 0 if self.chart == 1 else 1

    def polymap(self) -> PolyMap:
        v = self.source_vars
        a, b = LaurentPoly.var(0, v), LaurentPoly.var(1, v)
        images = [a, a * b] if self.chart == 1 else [a * b, b]
        return PolyMap(v, images)


@dataclass(frozen=True)
class PulledComponent:
    """Pullback ``F*f = monomial * strict`` of one declared component."""

    original: PolarComponent
    multiplicity: int
    monomial: tuple
    strict: LaurentPoly


def pullback_components(conn: Connection, chart: BlowupChart) -> list:
    F = chart.polymap()
    ex = chart.exceptional_index
    out = []
    for comp in conn.polar:
        g = F.apply(comp.defining_poly(conn.vars))
        mono, strict = g.monomial_content()
        out.append(PulledComponent(comp, mono[ex], mono, strict))
    return out


def blowup_pullback(conn: Connection, chart: BlowupChart | int) -> Connection:
    """Pull a two-variable connection back to a blow-up chart.

    Each declared equation becomes ``t^nu * strict``; the monomial factor is
    moved into the Laurent numerator and the strict transform (when not a
    unit) is declared as a new equation component.  Coordinate components
    for the exceptional divisor and for any other variable with negative
    exponents are declared automatically.
    """
    if isinstance(chart, int):
        chart = BlowupChart(chart)
    if conn.m != 2:
        raise ValueError("blow-up needs a connection in two variables")
    F = chart.polymap()
    N = pullback(conn.numerator, F)
    polar = [PolarComponent.coordinate(chart.exceptional_index)]
    for pc in pullback_components(conn, chart):
        comp = pc.original
        if comp.kind == "equation" and comp.power:
            shift = tuple(-comp.power * x for x in pc.monomial)
            N = N.map_coeffs(lambda p, s=shift: p.shift(s))
        for i, k in enumerate(pc.monomial):
            if k and all(not (c.kind == "coordinate" and c.var == i) for c in polar):
                polar.append(PolarComponent.coordinate(i))
        if not pc.strict.is_constant():
            power = comp.power if comp.kind == "equation" else 0
            c0 = pc.strict
            if any(c.kind == "equation" and c.poly == c0 for c in polar):
                continue
            polar.append(PolarComponent.equation(c0, power))
    polar = _coordinate_components(N, polar)
    # order: coordinates by index, then equations in declaration order
    coords = sorted((c for c in polar if c.kind == "coordinate"), key=lambda c: c.var)
    eqs = [c for c in polar if c.kind == "equation"]
    return Connection(N, coords + eqs)


class NotClosedError(ValueError):
    pass


def exceptional_residue(form: Connection, chart: BlowupChart | int = 1) -> ExactScalar:
    """Residue on the exceptional divisor of the pullback of a closed log 1-form.

    Equals ``sum_j nu_j a_j``, with ``a_j`` the (constant) residue on the j-th
    declared component and ``nu_j`` its multiplicity along the exceptional
    divisor.  The value is cross-checked against a direct residue computation
    on the pulled-back form.
    """
    if isinstance(chart, int):
        chart = BlowupChart(chart)
    if form.n != 1:
        raise ValueError("exceptional_residue expects a scalar form")
    if not flatness_residual(form).is_zero():
        raise NotClosedError("form is not closed")
    total = ZERO
    for pc in pullback_components(form, chart):
        res = residue(form, pc.original)
        if not res.is_constant():
            raise ValueError("residues of a closed log form must be constant")
        a = res.constant_matrix()[0][0]
        total = total + a * pc.multiplicity
    pulled = blowup_pullback(form, chart)
    direct = residue(pulled, chart.exceptional_index)
    if not direct.is_constant() or direct.constant_matrix()[0][0] != total:
        raise ArithmeticError("exceptional residue cross-check failed")
    return total


__all__ = ["BlowupChart", "PulledComponent", "blowup_pullback", "exceptional_residue",
           "pullback_components", "NotClosedError"]
