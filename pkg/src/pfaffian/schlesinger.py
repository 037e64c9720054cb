"""Isomonodromic deformation of Fuchsian systems ``sum_j A_j dz/(z - lambda_j)``."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from .transport import PathSpec, fuchsian_model, run_segments, transport


class CollisionError(RuntimeError):
    pass


class MovablePoleError(RuntimeError):
    pass


@dataclass
class SchlesingerState:
    lambdas: np.ndarray
    residues: np.ndarray
    info: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        self.lambdas = np.asarray(self.lambdas, dtype=complex).reshape(-1)
        self.residues = np.asarray(self.residues, dtype=complex)
        k = self.lambdas.shape[0]
        if self.residues.ndim != 3 or self.residues.shape[0] != k \
                or self.residues.shape[1] != self.residues.shape[2]:
            raise ValueError("residues must be k square matrices, one per pole")

    @property
    def k(self) -> int:
        return self.lambdas.shape[0]

    @property
    def n(self) -> int:
        return self.residues.shape[1]

    def balance(self) -> float:
        return float(np.abs(self.residues.sum(axis=0)).max())

    def separation(self) -> float:
        return float(K._min_separation(self.lambdas))

    def diameter(self) -> float:
        lam = self.lambdas
        return float(max(abs(a - b) for a in lam for b in lam)) if self.k > 1 else 0.0

    def validate(self, balance_tol=1e-10, collision=None):
        if self.balance() > balance_tol * max(1.0, float(np.abs(self.residues).max())):
            raise ValueError(f"residues do not sum to zero (defect {self.balance():.3g})")
        thr = collision_threshold(self.lambdas) if collision is None else collision
        if self.k > 1 and self.separation() <= thr:
            raise CollisionError("collision locus approach: poles too close")
        return self

    def charpolys(self) -> np.ndarray:
        return np.array([np.poly(A) for A in self.residues])

    def copy(self) -> "SchlesingerState":
        return SchlesingerState(self.lambdas.copy(), self.residues.copy(), dict(self.info))


def collision_threshold(lambdas) -> float:
    lam = np.asarray(lambdas, dtype=complex)
    diam = max((abs(a - b) for a in lam for b in lam), default=0.0)
    return 1e-6 * diam


def rhs(state: SchlesingerState, direction) -> np.ndarray:
    """``dA_s = -sum_{j != s} [A_s, A_j] (dl_s - dl_j)/(l_s - l_j)`` on ``direction``."""
    state.validate(balance_tol=math.inf)
    v = np.asarray(direction, dtype=complex)
    if v.shape != (state.k,):
        raise ValueError("direction needs one component per pole")
    n, k = state.n, state.k
    y = state.residues.reshape(k * n * n)
    return K._schlesinger_rhs(y, state.lambdas, v, n).reshape(k, n, n)


def integrate(state0: SchlesingerState, path: PathSpec, tol=1e-10,
              max_steps=500000) -> SchlesingerState:
    """Carry the residues along ``path`` in pole-position space.

    The returned state's ``info`` records step counts, the accumulated error
    estimate and the drift of the first integrals (the residue sum and each
    residue's characteristic polynomial).
    """
    state0.validate()
    if path.dim != state0.k:
        raise ValueError("path must live in the space of pole positions")
    if not np.allclose(path.start(), state0.lambdas, atol=1e-12, rtol=1e-12):
        raise ValueError("path must start at the state's pole positions")
    thr = collision_threshold(state0.lambdas)
    pts = path.sample()
    seps = [K._min_separation(p) for p in pts]
    if min(seps) <= thr:
        raise CollisionError("collision locus approach: path meets the collision locus")
    n, k = state0.n, state0.k
    model_args = (np.zeros((0, k), dtype=np.int64), np.zeros((0, k, n, n), dtype=complex),
                  np.zeros((0, k), dtype=np.int64), np.zeros(0, dtype=complex),
                  np.zeros(0, dtype=complex), np.zeros((0, n, n), dtype=complex), 0)
    y, err, acc, rej, status = run_segments(K.RHS_SCHLESINGER, state0.residues.reshape(-1), n,
                                            model_args, path.segments(), tol, max_steps, thr)
    if status == K.STATUS_COLLISION:
        raise CollisionError("collision locus approach")
    if status in (K.STATUS_UNDERFLOW, K.STATUS_MAXSTEPS) or not np.all(np.isfinite(y)):
        raise MovablePoleError("movable pole suspected: step size underflow")
    out = SchlesingerState(path.end(), y.reshape(k, n, n))
    out.info = {"steps": acc, "rejected": rej, "error": err, **conservation_drift(state0, out)}
    return out


def conservation_drift(a: SchlesingerState, b: SchlesingerState) -> dict:
    return {"sum_drift": float(np.abs(b.residues.sum(0) - a.residues.sum(0)).max()),
            "charpoly_drift": float(np.abs(b.charpolys() - a.charpolys()).max())}


# ------------------------------------------------------------ isomonodromy
def _loop_vertices(center, rho, base, sides=16):
    """Polyline: base -> circle of radius ``rho`` around ``center`` (ccw) -> base."""
    u = (base - center) / abs(base - center)
    ring = [center + rho * u * np.exp(2j * math.pi * q / sides) for q in range(sides + 1)]
    return [base] + ring + [base]


@dataclass
class LoopPlan:
    base: complex
    rho: float


def _plan_loops(state: SchlesingerState) -> LoopPlan:
    lam = state.lambdas
    sep = state.separation() if state.k > 1 else 1.0
    rho = 0.25 * sep
    span = max(state.diameter(), 1.0)
    centre = lam.mean()
    for ang in np.linspace(-0.5 * math.pi, 1.5 * math.pi, 37)[:-1] + 0.1234:
        base = centre + 2.0 * span * np.exp(1j * ang)
        ok = True
        for j in range(state.k):
            seg_ok = _segment_clear(base, lam[j], lam, j, 0.5 * rho)
            ok = ok and seg_ok
        if ok:
            return LoopPlan(complex(base), rho)
    raise ValueError("no clear base point for the loop basis")


def _segment_clear(a, b, lam, skip, margin):
    for j, c in enumerate(lam):
        if j == skip:
            continue
        d = b - a
        s = np.clip(((c - a) * np.conj(d)).real / abs(d) ** 2, 0.0, 1.0)
        if abs(a + s * d - c) < margin:
            return False
    return True


def loop_monodromies(state: SchlesingerState, plan: LoopPlan | None = None, tol=1e-11):
    """Monodromy of each basic loop around ``lambda_j`` from a common base point."""
    plan = _plan_loops(state) if plan is None else plan
    model = fuchsian_model(state.lambdas, state.residues)
    out = []
    for j in range(state.k):
        verts = _loop_vertices(state.lambdas[j], plan.rho, plan.base)
        path = PathSpec.polyline([[v] for v in verts])
        out.append(transport(model, path, tol, margin=0.2 * plan.rho).matrix)
    return out, plan


@dataclass
class IsomonodromyReport:
    traces_before: list
    traces_after: list
    max_difference: float
    tolerance: float

    @property
    def ok(self) -> bool:
        return self.max_difference <= self.tolerance


def _trace_invariants(Ms):
    tr = [complex(np.trace(M)) for M in Ms]
    for i in range(len(Ms)):
        for j in range(i + 1, len(Ms)):
            tr.append(complex(np.trace(Ms[j] @ Ms[i])))
    return tr


def isomonodromy_check(state0: SchlesingerState, state1: SchlesingerState, tol=1e-6,
                       transport_tol=1e-11) -> IsomonodromyReport:
    """Compare conjugacy invariants of the loop monodromies before and after."""
    state0.validate(balance_tol=1e-8)
    state1.validate(balance_tol=1e-8)
    M0, plan = loop_monodromies(state0, None, transport_tol)
    M1, _ = loop_monodromies(state1, plan, transport_tol)
    t0, t1 = _trace_invariants(M0), _trace_invariants(M1)
    diff = max((abs(a - b) for a, b in zip(t0, t1)), default=0.0)
    return IsomonodromyReport(t0, t1, float(diff), tol)


def flatness_defect(state: SchlesingerState, z_points) -> float:
    """Residual of ``dOmega - Omega^Omega`` for the assembled deformation form.

    ``Omega = sum_j A_j d(z - l_j)/(z - l_j)`` in coordinates ``(z, l_1..l_k)``,
    with ``dA_j`` taken from :func:`rhs`.  Evaluated at the given ``z``.
    """
    k, n = state.k, state.n
    m = k + 1
    dA = np.array([rhs(state, np.eye(k)[s]) for s in range(k)])  # [s, j]
    worst = 0.0
    for z in z_points:
        w = np.zeros((k, m), dtype=complex)
        for j in range(k):
            inv = 1.0 / (z - state.lambdas[j])
            w[j, 0] = inv
            w[j, j + 1] = -inv
        Om = np.einsum("jc,jab->cab", w, state.residues)
        for a in range(m):
            for b in range(a + 1, m):
                dO = np.zeros((n, n), dtype=complex)
                for j in range(k):
                    # dA_j = sum_s dA[s, j] dl_s ; coordinate l_s is index s + 1
                    ca = dA[a - 1, j] if a > 0 else 0
                    cb = dA[b - 1, j] if b > 0 else 0
                    dO = dO + ca * w[j, b] - cb * w[j, a]
                ww = Om[a] @ Om[b] - Om[b] @ Om[a]
                worst = max(worst, float(np.abs(dO - ww).max()))
    return worst


__all__ = ["SchlesingerState", "rhs", "integrate", "isomonodromy_check", "IsomonodromyReport",
           "flatness_defect", "conservation_drift", "loop_monodromies", "CollisionError",
           "MovablePoleError", "collision_threshold"]
