"""Command-line front end: every command prints one JSON report.

Exit status is 0 for ``ok``, 1 for ``violated`` and 2 for ``error``.
"""
from __future__ import annotations

import argparse
import os
import sys
import traceback

import numpy as np

from . import serialize as S

EXIT = {"ok": 0, "violated": 1, "error": 2}


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _read_json(arg: str, what: str):
    """Load JSON from a file path, or parse ``arg`` itself when it looks inline."""
    text = arg.strip()
    if text.startswith("{") or text.startswith("["):
        return S.loads(text, f"<{what}>")
    if not os.path.exists(arg):
        raise S.SchemaError(what, f"no such file {arg!r}")
    with open(arg, encoding="utf-8") as fh:
        return S.loads(fh.read(), arg)


def report(command, status, payload=None, diagnostics=None) -> dict:
    return {"command": command, "status": status, "payload": payload or {},
            "diagnostics": list(diagnostics or [])}


# ------------------------------------------------------------------ commands
def cmd_check(a):
    from .connection import flatness_residual

    conn = S.parse_connection(_read_json(a.file, "file"))
    res = flatness_residual(conn)
    payload = {"residual": S.matrix_form_json(res.numerator),
               "denominator": S.poly_json(res.denominator)}
    return ("ok" if res.is_zero() else "violated"), payload, []


def _residue_json(r):
    return {"numerator": S.poly_matrix_json(r.numerator),
            "denominator": S.poly_json(r.denominator),
            "eliminated": r.eliminated}


def cmd_log(a):
    from .logpole import (conjugacy_constancy, is_logarithmic, residue, residue_commutativity,
                          saito_decompose)

    conn = S.parse_connection(_read_json(a.file, "file"))
    diags, comps = [], []
    all_log = True
    for k, c in enumerate(conn.polar):
        f = c.defining_poly(conn.vars)
        chk = is_logarithmic(conn, f)
        item = {"index": k, "component": S.poly_json(f), "logarithmic": bool(chk)}
        if chk:
            r = residue(conn, f)
            item["residue"] = _residue_json(r)
            item["conjugacy_constant"] = conjugacy_constancy(conn, f)
        else:
            all_log = False
            item["witness"] = str(chk.witness)
        comps.append(item)
    payload = {"components": comps}
    comm_ok = True
    if all_log:
        rep = residue_commutativity(conn)
        comm_ok = rep.ok
        payload["commutators"] = [{"pair": list(k), "commutator": S.poly_matrix_json(v)}
                                  for k, v in sorted(rep.commutators.items())]
        try:
            dec = saito_decompose(conn)
            payload["decomposition"] = {
                "residues": [S.poly_matrix_json(A) for A in dec.residues],
                "eta": S.matrix_form_json(dec.eta)}
        except (ValueError, ArithmeticError) as exc:
            diags.append(f"decomposition unavailable: {exc}")
    status = "ok" if all_log and comm_ok else "violated"
    return status, payload, diags


def cmd_resonance(a):
    from .connection import Connection
    from .logpole import residue, resonance_report

    doc = _read_json(a.file, "file")
    if isinstance(doc, dict) and "matrix" in doc:
        M = doc["matrix"]
        exact = all(isinstance(x, (str, dict)) and
                    not (isinstance(x, dict) and any(isinstance(v, float) for v in x.values()))
                    for row in M for x in row)
        if exact:
            mat = [[S.parse_scalar(x, f"matrix[{i}][{j}]") for j, x in enumerate(row)]
                   for i, row in enumerate(M)]
        else:
            mat = S.parse_float_matrix(M)
        reps = [("matrix", resonance_report({"matrix": mat}, a.tol))]
    else:
        conn: Connection = S.parse_connection(doc)
        mats = []
        for c in conn.polar:
            if c.kind != "coordinate":
                continue
            r = residue(conn, c.var)
            if not r.is_constant():
                raise ValueError("resonance needs constant residues on coordinate components")
            mats.append(r.constant_matrix())
        n = conn.n
        diagonal = all(not A[i][j] for A in mats for i in range(n) for j in range(n) if i != j)
        if diagonal and mats:
            vecs = [[A[i][i] for A in mats] for i in range(n)]
            reps = [("vectors", resonance_report(vecs, a.tol))]
        else:
            reps = [(f"residue{k}", resonance_report({"matrix": A}, a.tol))
                    for k, A in enumerate(mats)]
    out = []
    for label, rep in reps:
        out.append({"source": label, "mode": rep.mode, "verdict": rep.verdict,
                    "pairs": [{"i": p.i, "j": p.j, "class": p.classification,
                               "difference": [S.scalar_json(x) for x in p.difference]}
                              for p in rep.pairs],
                    "resonant_pairs": [list(p) for p in rep.resonant_pairs]})
    resonant = any(rep.resonant for _, rep in reps)
    return ("violated" if resonant else "ok"), {"reports": out}, []


def cmd_normalize(a):
    from .normalform import poincare_dulac

    conn = S.parse_connection(_read_json(a.file, "file"))
    res = poincare_dulac(conn, a.order)
    payload = {"order": a.order,
               "gauge": S.poly_matrix_json(res.gauge.value.functions()),
               "normal": S.connection_json(res.normal),
               "resonant_terms": [{"entry": list(ij), "exponent": list(b),
                                   "coefficients": [S.scalar_json(x) for x in c]}
                                  for ij, b, c in res.resonant_terms]}
    return "ok", payload, []


def cmd_euler(a):
    from .transport import euler_from_monodromy, exp2pii

    doc = _read_json(a.file, "matfile")
    mats = doc.get("matrices") if isinstance(doc, dict) else doc
    if not isinstance(mats, list) or not mats:
        raise S.SchemaError("matrices", "expected a non-empty list of matrices")
    Ms = [S.parse_float_matrix(M, f"matrices[{k}]") for k, M in enumerate(mats)]
    e = euler_from_monodromy(Ms, tol=a.tol)
    As = [np.array(A) for A in e.residues]
    recon = max(float(np.abs(exp2pii(A) - M).max()) for A, M in zip(As, Ms))
    comm = max((float(np.abs(A @ B - B @ A).max()) for i, A in enumerate(As)
                for B in As[i + 1:]), default=0.0)
    payload = {"residues": [S.float_matrix_json(A) for A in As],
               "reconstruction_error": recon, "commutator_norm": comm}
    ok = recon <= 1e-9 and comm <= 1e-9
    return ("ok" if ok else "violated"), payload, []


def cmd_monodromy(a):
    from .transport import transport

    conn = S.parse_connection(_read_json(a.file, "file"))
    path = S.parse_path(_read_json(a.loop, "loop"))
    res = transport(conn.to_float() if conn.is_exact() else conn, path, a.tol)
    payload = {"matrix": S.float_matrix_json(res.matrix), "error_estimate": res.error,
               "steps": res.steps, "rejected": res.rejected, "path": S.path_json(path)}
    return ("violated" if res.flagged else "ok"), payload, \
        (["error estimate exceeds tolerance budget"] if res.flagged else [])


def cmd_schlesinger(a):
    from .schlesinger import integrate, isomonodromy_check

    st0 = S.parse_state(_read_json(a.file, "statefile"))
    path = S.parse_path(_read_json(a.path, "path"))
    st1 = integrate(st0, path, a.tol)
    info = st1.info
    payload = {"state": S.state_json(st1),
               "steps": info["steps"], "error_estimate": info["error"],
               "sum_drift": info["sum_drift"], "charpoly_drift": info["charpoly_drift"]}
    ok = info["sum_drift"] <= 10 * a.tol * max(1.0, float(np.abs(st0.residues).max())) and \
        info["charpoly_drift"] <= max(10 * a.tol, 1e-8)
    if a.verify_isomonodromy:
        rep = isomonodromy_check(st0, st1)
        payload["isomonodromy"] = {"max_trace_difference": rep.max_difference,
                                   "tolerance": rep.tolerance, "ok": rep.ok}
        ok = ok and rep.ok
    return ("ok" if ok else "violated"), payload, []


def cmd_blowup(a):
    from .blowup import blowup_pullback
    from .logpole import is_logarithmic

    conn = S.parse_connection(_read_json(a.file, "file"))
    pulled = blowup_pullback(conn, a.chart)
    flags = []
    for k, c in enumerate(pulled.polar):
        f = c.defining_poly(pulled.vars)
        flags.append({"index": k, "component": S.poly_json(f),
                      "logarithmic": bool(is_logarithmic(pulled, f))})
    return "ok", {"connection": S.connection_json(pulled), "components": flags}, []


def _complex_args(values, count, what):
    if values is None or len(values) != count:
        raise UsageError(f"{what} expects {count} value(s)")
    try:
        return [complex(v.replace(" ", "")) for v in values]
    except ValueError:
        raise UsageError(f"{what}: values must be numbers such as 0.3 or 0.1+0.2j") from None


def _require_elliptic(fam):
    from .picardfuchs import elliptic_family

    ref = elliptic_family()
    if fam.principal.terms != ref.principal.terms or fam.deformation != ref.deformation or \
            fam.weights != ref.weights:
        raise ValueError("numeric periods are implemented for the elliptic benchmark family "
                         "w2^2 + w1^3 + t2*w1 + t1 only")


def cmd_pf(a):
    from . import picardfuchs as pf

    fam, sigmas = S.parse_family(_read_json(a.file, "familyfile"))
    if a.action in ("r", "disc"):
        R = pf.compute_R(fam, sigmas)
        if a.action == "r":
            return "ok", {"R": S.poly_matrix_json(R), "parameters": list(fam.tvars)}, []
        return "ok", {"discriminant": S.poly_json(pf.discriminant(R)),
                      "parameters": list(fam.tvars)}, []
    _require_elliptic(fam)
    if a.action == "periods":
        t = _complex_args(a.t, 2, "--t")
        X = pf.elliptic_periods(tuple(t), sigmas, tol=min(a.tol, 1e-10))
        return "ok", {"periods": S.float_matrix_json(X),
                      "determinant": S.scalar_json(complex(np.linalg.det(X)))}, []
    center, t2 = _complex_args(a.t, 2, "--t")
    res = pf.picard_lefschetz_check(center, t2, a.radius, sigmas, tol=max(a.tol, 1e-6))
    payload = {"monodromy": S.float_matrix_json(res.monodromy),
               "integer_error": res.integer_error, "unipotent_error": res.unipotent_error,
               "vanishing_error": res.vanishing_error, "encircled": res.encircled}
    return ("ok" if res.ok else "violated"), payload, []


# ------------------------------------------------------------------ dispatch
def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="pfaffian", description="Flat meromorphic connections toolkit.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def add(name, fn, help_, file_help="connection file", tol=None):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("file", help=file_help)
        if tol is not None:
            sp.add_argument("--tol", type=float, default=tol)
        sp.set_defaults(func=fn)
        return sp

    add("check", cmd_check, "flatness residual")
    add("log", cmd_log, "logarithmic poles, residues and commutativity")
    add("resonance", cmd_resonance, "resonance classification", tol=1e-9)
    sp = add("normalize", cmd_normalize, "formal normal form")
    sp.add_argument("--order", type=int, default=8)
    add("euler-from-monodromy", cmd_euler, "Euler system realizing commuting monodromy",
        "matrix file", tol=1e-10)
    sp = add("monodromy", cmd_monodromy, "transport along a loop", tol=1e-10)
    sp.add_argument("--loop", required=True, help="path spec (file or inline JSON)")
    sp = add("schlesinger", cmd_schlesinger, "isomonodromic deformation", "state file",
             tol=1e-10)
    sp.add_argument("--path", required=True, help="path spec (file or inline JSON)")
    sp.add_argument("--verify-isomonodromy", action="store_true")
    sp = add("blowup", cmd_blowup, "pullback to a blow-up chart")
    sp.add_argument("--chart", type=int, choices=(1, 2), required=True)
    sp = sub.add_parser("pf", help="Picard-Fuchs computations")
    sp.add_argument("action", choices=("r", "disc", "periods", "plcheck"))
    sp.add_argument("file", help="family file")
    sp.add_argument("--t", nargs="+", help="parameter values (periods: t1 t2; "
                                          "plcheck: loop centre in t1 and fixed t2)")
    sp.add_argument("--radius", type=float, default=0.1)
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.set_defaults(func=cmd_pf)
    return p


def run(argv=None) -> tuple:
    """Return ``(report_dict, exit_code)``."""
    parser = build_parser()
    command = "?"
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "command", None):
            raise UsageError("no command given")
        command = args.command if args.command != "pf" else f"pf {args.action}"
        status, payload, diags = args.func(args)
        rep = report(command, status, payload, diags)
    except UsageError as exc:
        rep = report(command, "error", None, [f"usage: {exc}"])
    except S.SchemaError as exc:
        rep = report(command, "error", None, [f"schema: {exc}"])
    except Exception as exc:  # noqa: BLE001 - every failure becomes an error report
        diag = [f"{type(exc).__name__}: {exc}"]
        if os.environ.get("PFAFFIAN_TRACEBACK"):
            diag.append(traceback.format_exc())
        rep = report(command, "error", None, diag)
    return rep, EXIT[rep["status"]]


def main(argv=None) -> int:
    rep, code = run(argv)
    sys.stdout.write(S.dumps(rep))
    return code


if __name__ == "__main__":
    sys.exit(main())
