"""Numeric transport of fundamental solutions, monodromy and matrix logarithms."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg as sla
import sympy

from . import _kernels as K
from ._sym import from_sympy, to_sympy
from .connection import Connection, EulerConnection, PolarComponent, _coordinate_components
from .exterior import PolyMap, pullback
from .scalars import ONE, ExactScalar, LaurentPoly


class TransportError(RuntimeError):
    """Integration failed; ``status`` is one of the kernel status codes."""

    def __init__(self, message, status=None):
        self.status = status
        super().__init__(message)


class MarginError(ValueError):
    pass


# --------------------------------------------------------------------------- paths
@dataclass(frozen=True)
class PathSpec:
    """A polyline through ``points`` or a circle in coordinate ``coord``.

    Circles start at ``center + radius`` in the chosen coordinate and wind
    ``turns`` times (negative for clockwise); the other coordinates stay at
    ``center``.
    """

    kind: str
    points: tuple = ()
    center: tuple = ()
    coord: int = 0
    radius: float = 1.0
    turns: int = 1

    @staticmethod
    def polyline(points) -> "PathSpec":
        pts = tuple(tuple(complex(x) for x in np.atleast_1d(p)) for p in points)
        if len(pts) < 2:
            raise ValueError("a polyline needs at least two points")
        if len({len(p) for p in pts}) != 1:
            raise ValueError("polyline points have different dimensions")
        return PathSpec("polyline", points=pts)

    @staticmethod
    def circle(center, coord=0, radius=1.0, turns=1) -> "PathSpec":
        c = tuple(complex(x) for x in np.atleast_1d(center))
        if not 0 <= coord < len(c):
            raise ValueError("circle coordinate out of range")
        if radius <= 0:
            raise ValueError("radius must be positive")
        if int(turns) != turns or turns == 0:
            raise ValueError("turns must be a nonzero integer")
        return PathSpec("circle", center=c, coord=int(coord), radius=float(radius),
                        turns=int(turns))

    @property
    def dim(self) -> int:
        return len(self.points[0]) if self.kind == "polyline" else len(self.center)

    def start(self) -> np.ndarray:
        if self.kind == "polyline":
            return np.array(self.points[0], dtype=complex)
        p = np.array(self.center, dtype=complex)
        p[self.coord] += self.radius
        return p

    def end(self) -> np.ndarray:
        return np.array(self.points[-1], dtype=complex) if self.kind == "polyline" \
            else self.start()

    def segments(self) -> list:
        """Kernel segment tuples ``(kind, p0, p1, coord, radius, th0, th1)``."""
        if self.kind == "polyline":
            pts = [np.array(p, dtype=np.complex128) for p in self.points]
            return [(K.PATH_LINE, a, b, 0, 0.0, 0.0, 0.0) for a, b in zip(pts, pts[1:])]
        c = np.array(self.center, dtype=np.complex128)
        step = math.copysign(2 * math.pi, self.turns)
        return [(K.PATH_ARC, c, c, self.coord, self.radius, k * step, (k + 1) * step)
                for k in range(abs(self.turns))]

    def sample(self, per_segment=128) -> np.ndarray:
        out = []
        for seg in self.segments():
            for s in np.linspace(0.0, 1.0, per_segment + 1):
                out.append(K.path_point(seg[0], seg[1], seg[2], seg[3], seg[4], seg[5],
                                        seg[6], float(s))[0])
        return np.array(out)

    def diameter(self) -> float:
        if self.kind == "circle":
            return 2 * self.radius
        pts = np.array(self.points)
        return float(max(np.linalg.norm(a - b) for a in pts for b in pts))

    def then(self, other: "PathSpec") -> "PathSpec":
        """Concatenate two polylines (the first must end where the second starts)."""
        if self.kind != "polyline" or other.kind != "polyline":
            raise ValueError("only polylines concatenate")
        if not np.allclose(self.end(), other.start()):
            raise ValueError("paths do not join")
        return PathSpec("polyline", points=self.points + other.points[1:])

    def reversed(self) -> "PathSpec":
        if self.kind == "polyline":
            return PathSpec("polyline", points=self.points[::-1])
        return PathSpec.circle(self.center, self.coord, self.radius, -self.turns)


# ----------------------------------------------------------------- compiled model
@dataclass
class CompiledConnection:
    """Float arrays describing ``Omega = N/F + sum_p R_p dt_c/(t_c - p)``."""

    n: int
    m: int
    exps: np.ndarray
    coef: np.ndarray
    dexps: np.ndarray
    dcoef: np.ndarray
    poles: np.ndarray
    pres: np.ndarray
    pole_coord: int = 0
    components: list = field(default_factory=list)

    def matrix(self, t, v) -> np.ndarray:
        """``Omega`` at ``t`` applied to the tangent vector ``v``."""
        return K.connection_matrix(self.exps, self.coef, self.dexps, self.dcoef, self.poles,
                                   self.pres, self.pole_coord,
                                   np.asarray(t, dtype=np.complex128),
                                   np.asarray(v, dtype=np.complex128))

    def args(self):
        return (self.exps, self.coef, self.dexps, self.dcoef, self.poles, self.pres,
                self.pole_coord)


def _poly_arrays(p: LaurentPoly, m: int):
    items = list(p.terms.items())
    ex = np.array([e for e, _ in items], dtype=np.int64).reshape(len(items), m)
    co = np.array([complex(c) for _, c in items], dtype=np.complex128)
    return ex, co


def compile_connection(conn: Connection) -> CompiledConnection:
    n, m = conn.n, conn.m
    rows: dict = {}
    for i, j, idx, ex, c in conn.numerator.iter_terms():
        rows.setdefault(ex, np.zeros((m, n, n), dtype=np.complex128))[idx[0], i, j] += complex(c)
    keys = sorted(rows)
    exps = np.array(keys, dtype=np.int64).reshape(len(keys), m)
    coef = np.array([rows[k] for k in keys], dtype=np.complex128).reshape(len(keys), m, n, n)
    den = conn.denominator
    if den.is_constant():
        coef = coef / complex(den.constant_term())
        dexps = np.zeros((0, m), dtype=np.int64)
        dcoef = np.zeros(0, dtype=np.complex128)
    else:
        dexps, dcoef = _poly_arrays(den, m)
    comps = []
    for c in conn.polar:
        if c.kind == "coordinate":
            comps.append(("coordinate", c.var))
        else:
            comps.append(("equation", c.poly.to_float()))
    return CompiledConnection(n, m, exps, coef, dexps, dcoef,
                              np.zeros(0, dtype=np.complex128),
                              np.zeros((0, n, n), dtype=np.complex128), 0, comps)


def fuchsian_model(lambdas, residues) -> CompiledConnection:
    """``sum_j A_j dz/(z - lambda_j)`` in one variable."""
    lam = np.asarray(lambdas, dtype=np.complex128)
    A = np.asarray(residues, dtype=np.complex128)
    n = A.shape[1]
    comps = [("point", complex(x)) for x in lam]
    return CompiledConnection(n, 1, np.zeros((0, 1), dtype=np.int64),
                              np.zeros((0, 1, n, n), dtype=np.complex128),
                              np.zeros((0, 1), dtype=np.int64), np.zeros(0, dtype=np.complex128),
                              lam, A, 0, comps)


def _distances(model: CompiledConnection, pts: np.ndarray) -> np.ndarray:
    """Per-sample distance proxy to the nearest declared component."""
    best = np.full(len(pts), np.inf)
    for kind, obj in model.components:
        if kind == "coordinate":
            dist = np.abs(pts[:, obj])
        elif kind == "point":
            dist = np.abs(pts[:, model.pole_coord] - obj)
        else:
            vals = np.array([obj.evaluate(p) for p in pts])
            grads = np.array([[obj.derivative(i).evaluate(p) for i in range(model.m)]
                              for p in pts])
            gn = np.linalg.norm(grads, axis=1)
            with np.errstate(divide="ignore", invalid="ignore"):
                dist = np.where(gn > 0, np.abs(vals) / gn, np.abs(vals))
        best = np.minimum(best, dist)
    return best


def check_margin(model: CompiledConnection, path: PathSpec, margin=None) -> float:
    """Smallest sampled distance to the polar locus; raises when below ``margin``."""
    if path.dim != model.m:
        raise ValueError(f"path lives in dimension {path.dim}, connection in {model.m}")
    eps = 1e-3 * path.diameter() if margin is None else float(margin)
    dist = float(np.min(_distances(model, path.sample()))) if model.components else math.inf
    if dist < eps:
        raise MarginError(f"path comes within {dist:.3g} of the polar locus "
                          f"(margin {eps:.3g})")
    return dist


# ---------------------------------------------------------------------- transport
@dataclass
class MonodromyResult:
    """Transport matrix ``X(end)`` with ``X(start) = E``.

    ``error`` is the sum of accepted local error estimates.  Each step is held
    to ``tol`` relative to the solution size at that step, so ``flagged`` fires
    when the sum exceeds ``steps * tol * (1 + |M|)``: intermediate growth has
    cost accuracy relative to the final matrix.
    """

    matrix: np.ndarray
    error: float
    tol: float
    path: PathSpec
    steps: int
    rejected: int

    @property
    def flagged(self) -> bool:
        budget = max(self.steps, 1) * self.tol * (1 + float(np.abs(self.matrix).max()))
        return not np.isfinite(self.error) or self.error > budget


def run_segments(kind, y0, n, model_args, segments, tol, max_steps, collision=0.0):
    y = np.asarray(y0, dtype=np.complex128).copy()
    err = 0.0
    acc = rej = 0
    for pk, p0, p1, pc, pr, a0, a1 in segments:
        y, e, a, r, status = K.integrate_segment(
            kind, y, n, *model_args, pk, p0, p1, pc, float(pr), float(a0), float(a1),
            float(tol), 0.01, 1e-13, int(max_steps), float(collision))
        err += e
        acc += a
        rej += r
        if status != K.STATUS_OK:
            return y, err, acc, rej, status
    return y, err, acc, rej, K.STATUS_OK


def transport(conn, path: PathSpec, tol=1e-10, margin=None, max_steps=200000) -> MonodromyResult:
    """Integrate ``dX = Omega X`` along ``path`` from ``X = E``."""
    model = conn if isinstance(conn, CompiledConnection) else compile_connection(conn)
    check_margin(model, path, margin)
    n = model.n
    y0 = np.eye(n, dtype=np.complex128).reshape(n * n)
    y, err, acc, rej, status = run_segments(K.RHS_LINEAR, y0, n, model.args(),
                                            path.segments(), tol, max_steps)
    if status == K.STATUS_UNDERFLOW:
        raise TransportError("path too close to polar locus", status)
    if status == K.STATUS_MAXSTEPS:
        raise TransportError("step budget exhausted", status)
    if not np.all(np.isfinite(y)):
        raise TransportError("non-finite transport matrix", status)
    return MonodromyResult(y.reshape(n, n), err, tol, path, acc, rej)


def monodromy(conn, path: PathSpec, tol=1e-10, margin=None) -> MonodromyResult:
    if not np.allclose(path.start(), path.end()):
        raise ValueError("monodromy needs a closed path")
    return transport(conn, path, tol, margin)


# ----------------------------------------------------------------------- restrict
def restrict(conn: Connection, curve: PolyMap) -> Connection:
    """Pull ``conn`` back along a curve ``tau -> z(tau)``."""
    if len(curve.source_vars) != 1:
        raise ValueError("restrict expects a curve (one source variable)")
    if curve.target_dim != conn.m:
        raise ValueError("curve target dimension does not match the connection")
    tau = curve.source_vars
    N = pullback(conn.numerator, curve)
    exact = conn.is_exact() and all(p.is_exact for p in curve.images)
    one = ONE if exact else 1.0 + 0j
    scale = LaurentPoly.constant(one, tau)
    factors: dict = {}
    for comp in conn.polar:
        if comp.kind != "equation" or not comp.power:
            continue
        g = curve.apply(comp.poly)
        if g.is_zero():
            raise ValueError("curve lies inside the polar locus")
        mono, strict = g.monomial_content()
        N = N.map_coeffs(lambda p, s=tuple(-comp.power * x for x in mono): p.shift(s))
        if strict.is_constant():
            scale = scale * strict ** comp.power
            continue
        if not exact:
            key = strict
            factors[key] = factors.get(key, 0) + comp.power
            continue
        sym = to_sympy(strict, sympy.symbols("x0:1"))
        c0, parts = sympy.sqf_list(sympy.Poly(sym, sympy.Symbol("x0"), domain="QQ_I"))
        scale = scale * LaurentPoly.constant(ExactScalar.coerce(_sym_scalar(c0)), tau) \
            ** comp.power
        for fac, e in parts:
            lead = fac.LC()
            scale = scale * LaurentPoly.constant(ExactScalar.coerce(_sym_scalar(lead)), tau) \
                ** (e * comp.power)
            monic = from_sympy((fac.as_expr() / lead), sympy.symbols("x0:1"), tau)
            factors[monic] = factors.get(monic, 0) + e * comp.power
    c = scale.constant_term()
    if c != 1:
        N = N * (one / c)
    polar = [PolarComponent.equation(p, e) for p, e in factors.items()]
    polar = _coordinate_components(N, polar)
    polar = sorted((p for p in polar if p.kind == "coordinate"), key=lambda p: p.var) + \
        [p for p in polar if p.kind == "equation"]
    return Connection(N, polar, validate=exact)


def _sym_scalar(x):
    re, im = sympy.Rational(sympy.re(x)), sympy.Rational(sympy.im(x))
    return ExactScalar(f"{re.p}/{re.q}", f"{im.p}/{im.q}")


# --------------------------------------------------------------------- logarithms
_TWO_PI_I = 2j * math.pi


def _cluster(eigs: np.ndarray, rel=1e-3) -> list:
    n = len(eigs)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(eigs[i] - eigs[j]) <= rel * max(abs(eigs[i]), abs(eigs[j])):
                parent[find(i)] = find(j)
    labels = [find(i) for i in range(n)]
    order = sorted(set(labels), key=labels.index)
    return [order.index(x) for x in labels]


def _reorder(T, Z, labels):
    """Bubble the Schur form so equal labels are contiguous (stable)."""
    labels = list(labels)
    n = len(labels)
    for _ in range(n):
        moved = False
        for k in range(n - 1):
            if labels[k] > labels[k + 1]:
                T, Z, info = sla.lapack.ztrexc(T, Z, k + 2, k + 1)
                if info != 0:
                    raise np.linalg.LinAlgError("Schur reordering failed")
                labels[k], labels[k + 1] = labels[k + 1], labels[k]
                moved = True
        if not moved:
            break
    return T, Z, labels


def _block_log(Tc: np.ndarray) -> np.ndarray:
    k = Tc.shape[0]
    lam = np.mean(np.diag(Tc))
    Nn = Tc / lam - np.eye(k)
    out = np.log(lam) * np.eye(k, dtype=complex)
    term = np.eye(k, dtype=complex)
    for j in range(1, 400):
        term = term @ Nn
        add = term * ((-1) ** (j + 1) / j)
        out = out + add
        if np.abs(add).max() < 1e-18 * max(1.0, np.abs(out).max()):
            break
    return out


def _log_upper(T: np.ndarray, labels) -> tuple:
    """Principal log of upper triangular ``T`` with contiguous clusters; returns (L, S)."""
    n = T.shape[0]
    bounds = []
    start = 0
    for k in range(1, n + 1):
        if k == n or labels[k] != labels[start]:
            bounds.append((start, k))
            start = k
    S = np.eye(n, dtype=complex)
    T = T.copy()
    for a, b in bounds[:-1]:
        T11, T12, T22 = T[a:b, a:b], T[a:b, b:], T[b:, b:]
        X = sla.solve_sylvester(T11, -T22, -T12)
        Sk = np.eye(n, dtype=complex)
        Sk[a:b, b:] = X
        T[a:b, b:] = 0
        S = S @ Sk
    L = np.zeros((n, n), dtype=complex)
    for a, b in bounds:
        L[a:b, a:b] = _block_log(T[a:b, a:b])
    return L, S


def matrix_log(M) -> np.ndarray:
    """``A`` with ``exp(2 pi i A) = M`` on the principal branch per eigenvalue."""
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("matrix_log expects a square matrix")
    n = M.shape[0]
    if n == 0:
        return M.copy()
    sv = np.linalg.svd(M, compute_uv=False)
    if sv[-1] <= 1e-14 * max(sv[0], 1e-300):
        raise np.linalg.LinAlgError("matrix is singular")
    T, Z = sla.schur(M, output="complex")
    labels = _cluster(np.diag(T))
    T, Z, labels = _reorder(T, Z, labels)
    L, S = _log_upper(T, labels)
    logM = Z @ S @ L @ np.linalg.solve(S, Z.conj().T)
    return logM / _TWO_PI_I


def exp2pii(A) -> np.ndarray:
    return sla.expm(_TWO_PI_I * np.asarray(A, dtype=complex))


class NonCommutingError(ValueError):
    pass


def euler_from_monodromy(matrices: Sequence, tol=1e-10, vars=None) -> EulerConnection:
    """Residues ``A_j`` of an Euler system whose coordinate loops have monodromy ``M_j``."""
    Ms = [np.asarray(M, dtype=complex) for M in matrices]
    if not Ms:
        raise ValueError("need at least one matrix")
    for i in range(len(Ms)):
        for j in range(i + 1, len(Ms)):
            C = Ms[i] @ Ms[j] - Ms[j] @ Ms[i]
            if np.abs(C).max() > tol * max(1.0, np.abs(Ms[i]).max() * np.abs(Ms[j]).max()):
                raise NonCommutingError(f"monodromy matrices {i} and {j} do not commute")
    n = Ms[0].shape[0]
    # a generic combination shares invariant flags with every M_j
    weights = [1.0 / (k + math.pi) + 1j / (k + math.e) for k in range(len(Ms))]
    C = sum(w * M for w, M in zip(weights, Ms))
    _, Q = sla.schur(C, output="complex")
    Qh = Q.conj().T
    logs = []
    for M in Ms:
        T = Qh @ M @ Q
        low = np.abs(np.tril(T, -1)).max() if n > 1 else 0.0
        if low <= 1e-9 * max(1.0, np.abs(T).max()):
            T, Qj, labels = _reorder(np.triu(T), Q.copy(), _cluster(np.diag(T)))
            L, S = _log_upper(T, labels)
            A = Qj @ S @ L @ np.linalg.solve(S, Qj.conj().T) / _TWO_PI_I
        else:
            A = matrix_log(M)
        logs.append(A)
    # huge eigenvalue spread in M_j destroys the small eigenvalues; the logs then stop commuting
    for i in range(len(logs)):
        for j in range(i + 1, len(logs)):
            C = logs[i] @ logs[j] - logs[j] @ logs[i]
            size = max(1.0, np.abs(logs[i]).max() * np.abs(logs[j]).max())
            if np.abs(C).max() > 1e-6 * size:
                raise ValueError(f"logarithms of matrices {i} and {j} do not commute; "
                                 "the monodromy is too ill-conditioned")
    residues = [[[complex(x) for x in row] for row in A] for A in logs]
    if vars is None:
        vars = tuple(f"t{j + 1}" for j in range(len(Ms)))
    return EulerConnection(residues, tuple(vars))


def euler_loop(euler: EulerConnection, j: int, radius=1.0) -> PathSpec:
    """Counterclockwise loop around ``t_j = 0`` with the other coordinates at 1."""
    center = [1.0] * len(euler.vars)
    center[j] = 0.0
    return PathSpec.circle(center, j, radius, 1)


# ------------------------------------------------------------- holonomy limits
@dataclass
class HolonomyLimit:
    radii: list
    matrices: list
    target: np.ndarray
    discrepancies: list
    rate: float

    @property
    def monotone(self) -> bool:
        return all(b < a for a, b in zip(self.discrepancies, self.discrepancies[1:]))

    @property
    def final(self) -> float:
        return self.discrepancies[-1]


def holonomy_residue_limit(conn: Connection, point, component, radii=(1e-1, 1e-2, 1e-3),
                           tol=1e-12) -> HolonomyLimit:
    """Monodromy of shrinking loops around ``component`` near the smooth point ``point``.

    The loops are circles in a coordinate along which the component's equation
    has nonzero derivative at ``point``; the target is ``exp(2 pi i Res(point))``.
    """
    from .logpole import _as_poly, residue

    f = _as_poly(conn, component)
    a = [complex(x) for x in point]
    if abs(complex(f.evaluate(a))) > 1e-12:
        raise ValueError("point is not on the component")
    grads = [abs(complex(f.derivative(i).evaluate(a))) for i in range(conn.m)]
    s = int(np.argmax(grads))
    if grads[s] == 0:
        raise ValueError("component is singular at the point")
    for other in conn.polar:
        g = other.defining_poly(conn.vars)
        if g != f and abs(complex(g.evaluate(a))) < 1e-12:
            raise ValueError("point lies on more than one component")
    res = residue(conn, f)
    target = exp2pii(np.array(res.evaluate(a), dtype=complex))
    model = compile_connection(conn)
    mats, disc = [], []
    for r in radii:
        path = PathSpec.circle(a, s, r, 1)
        M = transport(model, path, tol, margin=0.5 * r).matrix
        mats.append(M)
        disc.append(float(np.abs(M - target).max()))
    rate = float("nan")
    if len(radii) >= 2 and all(x > 0 for x in disc):
        rate = float(np.polyfit(np.log(radii), np.log(disc), 1)[0])
    return HolonomyLimit(list(radii), mats, target, disc, rate)


__all__ = ["PathSpec", "MonodromyResult", "TransportError", "MarginError", "transport",
           "monodromy", "restrict", "matrix_log", "exp2pii", "euler_from_monodromy",
           "euler_loop", "holonomy_residue_limit", "HolonomyLimit", "compile_connection",
           "fuchsian_model", "check_margin", "NonCommutingError"]
