"""Small exact linear-algebra helpers over ExactScalar or LaurentPoly entries.

Matrices are plain lists of lists.  Entries may be ExactScalar (field
operations available) or LaurentPoly (ring operations only; the
characteristic polynomial uses integer divisions, which are fine over Q).
"""
from __future__ import annotations

from typing import Sequence

from .scalars import ONE, ZERO, ExactScalar, LaurentPoly


def identity(n: int, one=ONE, zero=ZERO) -> list:
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def mat_mul(A: Sequence[Sequence], B: Sequence[Sequence]) -> list:
    n, m, p = len(A), len(B), len(B[0])
    out = []
    for i in range(n):
        row = []
        for j in range(p):
            acc = A[i][0] * B[0][j]
            for k in range(1, m):
                acc = acc + A[i][k] * B[k][j]
            row.append(acc)
        out.append(row)
    return out


def mat_add(A, B) -> list:
    return [[a + b for a, b in zip(r, s)] for r, s in zip(A, B)]


def mat_sub(A, B) -> list:
    return [[a - b for a, b in zip(r, s)] for r, s in zip(A, B)]


def mat_scale(A, c) -> list:
    return [[a * c for a in r] for r in A]


def commutator(A, B) -> list:
    return mat_sub(mat_mul(A, B), mat_mul(B, A))


def is_zero_matrix(A) -> bool:
    return all(not a for r in A for a in r)


def exact_matrix(rows) -> list:
    return [[ExactScalar.coerce(x) for x in r] for r in rows]


def rref(A: Sequence[Sequence[ExactScalar]]):
    """Reduced row echelon form; returns ``(R, pivot_columns)``."""
    R = [list(r) for r in A]
    rows = len(R)
    cols = len(R[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if R[i][c]), None)
        if piv is None:
            continue
        R[r], R[piv] = R[piv], R[r]
        inv = ONE / R[r][c]
        R[r] = [x * inv for x in R[r]]
        for i in range(rows):
            if i != r and R[i][c]:
                f = R[i][c]
                R[i] = [x - f * y for x, y in zip(R[i], R[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return R, pivots


def rank(A) -> int:
    if not A:
        return 0
    return len(rref(A)[1])


def inverse(A: Sequence[Sequence[ExactScalar]]) -> list:
    """Exact inverse by Gauss-Jordan elimination."""
    n = len(A)
    aug = [list(A[i]) + [ONE if i == j else ZERO for j in range(n)] for i in range(n)]
    R, piv = rref(aug)
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return [r[n:] for r in R]


def solve(A, b) -> list | None:
    """One solution of ``A x = b`` (free variables set to zero), or None."""
    rows = len(A)
    cols = len(A[0])
    aug = [list(A[i]) + [b[i]] for i in range(rows)]
    R, piv = rref(aug)
    if cols in piv:
        return None
    x = [ZERO] * cols
    for i, c in enumerate(piv):
        x[c] = R[i][cols]
    return x


def charpoly(A: Sequence[Sequence]) -> list:
    """Coefficients ``[c_n, ..., c_0]`` of ``det(x E - A)`` (Faddeev-LeVerrier).

    Works for ExactScalar or LaurentPoly entries; only division by integers
    is used.
    """
    n = len(A)
    if isinstance(A[0][0], LaurentPoly):
        vars = A[0][0].vars
        one = LaurentPoly.constant(ONE, vars)
        zero = LaurentPoly.zero(vars)
    else:
        one, zero = ONE, ZERO
    coeffs = [one]
    M = [[zero] * n for _ in range(n)]
    c = one
    for k in range(1, n + 1):
        # M_k = A M_{k-1} + c_{n-k+1} E
        M = mat_mul(A, M) if k > 1 else [[zero] * n for _ in range(n)]
        for i in range(n):
            M[i][i] = M[i][i] + c
        AM = mat_mul(A, M)
        tr = AM[0][0]
        for i in range(1, n):
            tr = tr + AM[i][i]
        c = tr * (ExactScalar(-1) / k)
        coeffs.append(c)
    return coeffs


def det(A) -> object:
    n = len(A)
    c0 = charpoly(A)[-1]
    return c0 if n % 2 == 0 else -c0


__all__ = ["identity", "mat_mul", "mat_add", "mat_sub", "mat_scale", "commutator",
           "is_zero_matrix", "exact_matrix", "rref", "rank", "inverse", "solve", "charpoly",
           "det"]
