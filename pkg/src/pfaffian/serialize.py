"""JSON documents for connections, forms, matrices, paths, states and families.

Exact rationals travel as ``"p/q"`` strings; floats as JSON numbers written
with the shortest round-tripping representation.
"""
from __future__ import annotations

import json
from typing import Any

import numpy as np

from .connection import Connection, PolarComponent
from .exterior import MatrixKForm, ScalarKForm
from .scalars import ExactScalar, LaurentPoly, format_rational, parse_rational


class SchemaError(ValueError):
    """Malformed document; ``where`` names the offending field."""

    def __init__(self, where: str, message: str):
        self.where = where
        super().__init__(f"{where}: {message}")


# ------------------------------------------------------------------ scalars
def _num(v, where):
    if isinstance(v, bool):
        raise SchemaError(where, "boolean is not a number")
    if isinstance(v, str):
        try:
            return parse_rational(v)
        except (ValueError, ZeroDivisionError) as exc:
            raise SchemaError(where, f"bad rational {v!r} ({exc})") from None
    if isinstance(v, int):
        return v
    if isinstance(v, float):
        return v
    raise SchemaError(where, f"expected a number or rational string, got {type(v).__name__}")


def parse_scalar(obj, where="scalar"):
    """``{"re": .., "im": ..}``, a bare number/string, or ``[re, im]``."""
    if isinstance(obj, dict):
        re = _num(obj.get("re", "0"), where + ".re")
        im = _num(obj.get("im", "0"), where + ".im")
    elif isinstance(obj, (list, tuple)):
        if len(obj) != 2:
            raise SchemaError(where, "complex pair must have two entries")
        re, im = _num(obj[0], where + "[0]"), _num(obj[1], where + "[1]")
    else:
        re, im = _num(obj, where), 0
    if isinstance(re, float) or isinstance(im, float):
        return complex(float(re), float(im))
    return ExactScalar(re, im)


def scalar_json(c) -> dict:
    if isinstance(c, ExactScalar):
        return {"re": format_rational(c.re), "im": format_rational(c.im)}
    z = complex(c)
    return {"re": _float(z.real), "im": _float(z.imag)}


def _float(x: float) -> float:
    x = float(x)
    return 0.0 if x == 0 else x


def float_matrix_json(M) -> list:
    return [[scalar_json(complex(x)) for x in row] for row in np.asarray(M, dtype=complex)]


def parse_float_matrix(obj, where="matrix") -> np.ndarray:
    if not isinstance(obj, list) or not obj or not all(isinstance(r, list) for r in obj):
        raise SchemaError(where, "expected a non-empty list of rows")
    n = len(obj[0])
    out = np.zeros((len(obj), n), dtype=complex)
    for i, row in enumerate(obj):
        if len(row) != n:
            raise SchemaError(f"{where}[{i}]", "ragged matrix")
        for j, x in enumerate(row):
            out[i, j] = complex(parse_scalar(x, f"{where}[{i}][{j}]"))
    return out


def exact_matrix_json(M) -> list:
    return [[scalar_json(x) for x in row] for row in M]


# ------------------------------------------------------------------ polynomials
def _canon_coeffs(items):
    """Promote to complex when any coefficient is a float."""
    if any(not isinstance(c, ExactScalar) for _, c in items):
        return [(k, complex(c)) for k, c in items]
    return items


def poly_json(p: LaurentPoly) -> dict:
    return {"terms": [{**scalar_json(c), "exps": list(e)} for e, c in sorted(p.terms.items())]}


def parse_poly(obj, vars, where="poly") -> LaurentPoly:
    if not isinstance(obj, dict) or not isinstance(obj.get("terms"), list):
        raise SchemaError(where, "expected {\"terms\": [...]}")
    items = []
    for k, t in enumerate(obj["terms"]):
        w = f"{where}.terms[{k}]"
        e = _exps(t, len(vars), w)
        items.append((e, parse_scalar(t, w)))
    terms: dict = {}
    for e, c in _canon_coeffs(items):
        terms[e] = terms[e] + c if e in terms else c
    return LaurentPoly(terms, vars)


def _exps(t, m, where):
    if not isinstance(t, dict):
        raise SchemaError(where, "term must be an object")
    e = t.get("exps")
    if not isinstance(e, list) or len(e) != m or not all(isinstance(x, int) and
                                                         not isinstance(x, bool) for x in e):
        raise SchemaError(where + ".exps", f"expected {m} integers")
    return tuple(e)


def form_terms(s: ScalarKForm) -> list:
    out = []
    for idx, p in sorted(s.comps.items()):
        for e, c in sorted(p.terms.items()):
            term = {**scalar_json(c), "exps": list(e)}
            if s.k == 1:
                term["dvar"] = idx[0]
            elif s.k > 1:
                term["dvars"] = list(idx)
            out.append(term)
    return out


def parse_form_terms(terms, k, vars, where="terms") -> ScalarKForm:
    if not isinstance(terms, list):
        raise SchemaError(where, "expected a list of terms")
    m = len(vars)
    items = []
    for q, t in enumerate(terms):
        w = f"{where}[{q}]"
        e = _exps(t, m, w)
        if k == 1:
            s = t.get("dvar")
            if not isinstance(s, int) or not 0 <= s < m:
                raise SchemaError(w + ".dvar", f"expected an index in 0..{m - 1}")
            idx = (s,)
        elif k == 0:
            idx = ()
        else:
            idx = t.get("dvars")
            if not isinstance(idx, list) or len(idx) != k or \
                    any(not isinstance(x, int) or not 0 <= x < m for x in idx) or \
                    list(idx) != sorted(set(idx)):
                raise SchemaError(w + ".dvars", f"expected {k} increasing indices")
            idx = tuple(idx)
        items.append(((idx, e), parse_scalar(t, w)))
    comps: dict = {}
    for (idx, e), c in _canon_coeffs(items):
        bucket = comps.setdefault(idx, {})
        bucket[e] = bucket[e] + c if e in bucket else c
    return ScalarKForm(k, {idx: LaurentPoly(v, vars) for idx, v in comps.items()}, vars)


def matrix_form_json(M: MatrixKForm) -> list:
    out = []
    for i, row in enumerate(M.entries):
        for j, s in enumerate(row):
            if not s.is_zero():
                out.append({"row": i, "col": j, "terms": form_terms(s)})
    return out


def parse_matrix_form(entries, n, k, vars, where="entries") -> MatrixKForm:
    if not isinstance(entries, list):
        raise SchemaError(where, "expected a list")
    rows = [[ScalarKForm.zero(k, vars) for _ in range(n)] for _ in range(n)]
    seen = set()
    for q, ent in enumerate(entries):
        w = f"{where}[{q}]"
        if not isinstance(ent, dict):
            raise SchemaError(w, "entry must be an object")
        i, j = ent.get("row"), ent.get("col")
        if not isinstance(i, int) or not isinstance(j, int) or not (0 <= i < n and 0 <= j < n):
            raise SchemaError(w, f"row/col must be indices below {n}")
        if (i, j) in seen:
            raise SchemaError(w, f"duplicate entry ({i}, {j})")
        seen.add((i, j))
        rows[i][j] = parse_form_terms(ent.get("terms"), k, vars, w + ".terms")
    return MatrixKForm._raw(rows, k, tuple(vars))


def poly_matrix_json(M) -> list:
    return [[poly_json(p) for p in row] for row in M]


# ------------------------------------------------------------------ connections
def connection_json(conn: Connection) -> dict:
    polar = []
    for c in conn.polar:
        if c.kind == "coordinate":
            polar.append({"kind": "coordinate", "var": c.var})
        else:
            item = {"kind": "equation", "poly": poly_json(c.poly)}
            if c.power != 1:
                item["power"] = c.power
            polar.append(item)
    return {"variables": list(conn.vars),
            "weights": [format_rational(w) for w in conn.weights],
            "size": conn.n,
            "polar": polar,
            "entries": matrix_form_json(conn.numerator)}


def _raw_kinds(obj) -> set:
    """Which of ``str`` (exact) and ``float`` appear among re/im fields."""
    out: set = set()
    if isinstance(obj, dict):
        for key, v in obj.items():
            if key in ("re", "im") and isinstance(v, (str, float)):
                out.add(type(v))
            else:
                out |= _raw_kinds(v)
    elif isinstance(obj, list):
        for v in obj:
            out |= _raw_kinds(v)
    return out


def parse_connection(doc: Any) -> Connection:
    if not isinstance(doc, dict):
        raise SchemaError("$", "connection document must be an object")
    vars = doc.get("variables")
    if not isinstance(vars, list) or not vars or not all(isinstance(v, str) for v in vars):
        raise SchemaError("variables", "expected a non-empty list of names")
    if len(set(vars)) != len(vars):
        raise SchemaError("variables", "duplicate variable names")
    vars = tuple(vars)
    n = doc.get("size")
    if not isinstance(n, int) or n < 1:
        raise SchemaError("size", "expected a positive integer")
    weights = doc.get("weights")
    if weights is not None:
        if not isinstance(weights, list) or len(weights) != len(vars):
            raise SchemaError("weights", "one weight per variable")
        weights = [_num(w, f"weights[{k}]") for k, w in enumerate(weights)]
    polar = []
    for k, c in enumerate(doc.get("polar", [])):
        w = f"polar[{k}]"
        if not isinstance(c, dict):
            raise SchemaError(w, "component must be an object")
        if c.get("kind") == "coordinate":
            v = c.get("var")
            if not isinstance(v, int) or not 0 <= v < len(vars):
                raise SchemaError(w + ".var", "coordinate index out of range")
            polar.append(PolarComponent.coordinate(v))
        elif c.get("kind") == "equation":
            p = parse_poly(c.get("poly"), vars, w + ".poly")
            power = c.get("power", 1)
            if not isinstance(power, int) or power < 0:
                raise SchemaError(w + ".power", "expected a non-negative integer")
            polar.append(PolarComponent.equation(p, power))
        else:
            raise SchemaError(w + ".kind", "expected \"coordinate\" or \"equation\"")
    N = parse_matrix_form(doc.get("entries", []), n, 1, vars)
    if len(_raw_kinds(doc.get("entries", [])) | _raw_kinds(doc.get("polar", []))) > 1:
        raise SchemaError("$", "file mixes exact rationals and floats")
    try:
        return Connection(N, polar, weights)
    except ValueError as exc:
        raise SchemaError("$", str(exc)) from None


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"


def loads(text: str, source="<input>"):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{source}:{exc.lineno}:{exc.colno}", exc.msg) from None


# ------------------------------------------------------------------ paths, states
def parse_point(obj, where) -> list:
    if not isinstance(obj, list):
        obj = [obj]
    return [complex(parse_scalar(x, f"{where}[{k}]")) for k, x in enumerate(obj)]


def parse_path(doc):
    from .transport import PathSpec

    if not isinstance(doc, dict):
        raise SchemaError("path", "path must be an object")
    kind = doc.get("kind")
    try:
        if kind == "polyline":
            pts = doc.get("points")
            if not isinstance(pts, list):
                raise SchemaError("path.points", "expected a list of points")
            return PathSpec.polyline([parse_point(p, f"path.points[{k}]")
                                      for k, p in enumerate(pts)])
        if kind == "circle":
            return PathSpec.circle(parse_point(doc.get("center"), "path.center"),
                                   doc.get("coord", 0), float(doc.get("radius", 1.0)),
                                   doc.get("turns", 1))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, SchemaError):
            raise
        raise SchemaError("path", str(exc)) from None
    raise SchemaError("path.kind", "expected \"polyline\" or \"circle\"")


def path_json(path) -> dict:
    def pt(p):
        return [[_float(z.real), _float(z.imag)] for z in p]

    if path.kind == "polyline":
        return {"kind": "polyline", "points": [pt(p) for p in path.points]}
    return {"kind": "circle", "center": pt(path.center), "coord": path.coord,
            "radius": path.radius, "turns": path.turns}


def parse_state(doc):
    from .schlesinger import SchlesingerState

    if not isinstance(doc, dict):
        raise SchemaError("$", "state must be an object")
    lam = parse_point(doc.get("lambdas"), "lambdas")
    res = doc.get("residues")
    if not isinstance(res, list) or len(res) != len(lam):
        raise SchemaError("residues", "one residue matrix per pole")
    mats = [parse_float_matrix(A, f"residues[{k}]") for k, A in enumerate(res)]
    try:
        return SchlesingerState(lam, np.array(mats))
    except ValueError as exc:
        raise SchemaError("residues", str(exc)) from None


def state_json(state) -> dict:
    return {"lambdas": [[_float(z.real), _float(z.imag)] for z in state.lambdas],
            "residues": [float_matrix_json(A) for A in state.residues]}


# ------------------------------------------------------------------ families
def parse_family(doc):
    from .picardfuchs import FamilyError, HFamily

    if not isinstance(doc, dict):
        raise SchemaError("$", "family must be an object")
    wv = doc.get("variables", ["w1", "w2"])
    if not isinstance(wv, list) or len(wv) != 2:
        raise SchemaError("variables", "two curve variables expected")
    wv = tuple(wv)
    weights = doc.get("weights")
    if not isinstance(weights, list) or len(weights) != 2:
        raise SchemaError("weights", "two weights expected")
    weights = [_num(w, f"weights[{k}]") for k, w in enumerate(weights)]
    P = parse_poly(doc.get("principal"), wv, "principal")
    deform = doc.get("deformation", [])
    if not isinstance(deform, list):
        raise SchemaError("deformation", "expected a list of exponent pairs")
    tv = tuple(doc.get("parameters", [f"t{k + 1}" for k in range(len(deform))]))
    try:
        fam = HFamily(weights, P, tuple(tuple(a) for a in deform), tv)
    except (FamilyError, TypeError) as exc:
        raise SchemaError("$", str(exc)) from None
    cof = doc.get("coframe", [])
    if not isinstance(cof, list):
        raise SchemaError("coframe", "expected a list of 1-forms")
    sigmas = [parse_form_terms(s.get("terms") if isinstance(s, dict) else None, 1, wv,
                               f"coframe[{k}].terms") for k, s in enumerate(cof)]
    return fam, sigmas


def family_json(fam, sigmas) -> dict:
    return {"variables": list(fam.wvars),
            "weights": [format_rational(w) for w in fam.weights],
            "principal": poly_json(fam.principal),
            "deformation": [list(a) for a in fam.deformation],
            "parameters": list(fam.tvars),
            "coframe": [{"terms": form_terms(s)} for s in sigmas]}


__all__ = ["SchemaError", "parse_connection", "connection_json", "parse_poly", "poly_json",
           "parse_path", "path_json", "parse_state", "state_json", "parse_family",
           "family_json", "dumps", "loads", "scalar_json", "parse_scalar",
           "float_matrix_json", "parse_float_matrix", "exact_matrix_json",
           "matrix_form_json", "poly_matrix_json", "form_terms", "parse_form_terms"]
