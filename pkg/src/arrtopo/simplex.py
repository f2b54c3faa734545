"""Exact two-phase simplex over Fractions, Bland's rule throughout.

Solves   maximize c.x   subject to   A x <= b,  x >= 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

OPTIMAL, INFEASIBLE, UNBOUNDED = "optimal", "infeasible", "unbounded"


class LPIterationError(RuntimeError):
    pass


@dataclass
class LPResult:
    status: str
    x: Optional[list[Fraction]] = None
    value: Optional[Fraction] = None


def _pivot(T, basis, r, col):
    piv = T[r][col]
    T[r] = [v / piv for v in T[r]]
    for i in range(len(T)):
        if i != r and T[i][col] != 0:
            f = T[i][col]
            T[i] = [a - f * b for a, b in zip(T[i], T[r])]
    basis[r] = col


def _run(T, basis, ncols, max_iter):
    """Bland's rule on rows 0..m-1 with the objective in row m. Returns False if unbounded."""
    m = len(basis)
    obj = T[m]
    for _ in range(max_iter):
        obj = T[m]
        col = next((j for j in range(ncols) if obj[j] < 0), None)
        if col is None:
            return True
        best, r = None, None
        for i in range(m):
            if T[i][col] > 0:
                ratio = T[i][-1] / T[i][col]
                if best is None or ratio < best or (ratio == best and basis[i] < basis[r]):
                    best, r = ratio, i
        if r is None:
            return False
        _pivot(T, basis, r, col)
    raise LPIterationError(f"simplex exceeded {max_iter} pivots")


def lp_maximize(
    c: Sequence, A: Sequence[Sequence], b: Sequence, max_iter: int = 10_000
) -> LPResult:
    m, n = len(A), len(c)
    F = Fraction
    nv = n + m  # structural + slack; artificial gets index nv
    T = []
    for i in range(m):
        row = [F(v) for v in A[i]] + [F(0)] * m + [F(-1), F(b[i])]
        row[n + i] = F(1)
        T.append(row)
    basis = [n + i for i in range(m)]

    if m and min(F(v) for v in b) < 0:
        # phase 1: maximize -x0
        T.append([F(0)] * nv + [F(1), F(0)])
        r = min(range(m), key=lambda i: (F(b[i]), i))
        _pivot(T, basis, r, nv)
        _run(T, basis, nv + 1, max_iter)
        if T[m][-1] < 0:
            return LPResult(INFEASIBLE)
        if nv in basis:
            r = basis.index(nv)
            col = next((j for j in range(nv) if T[r][j] != 0), None)
            if col is not None:
                _pivot(T, basis, r, col)
        T.pop()
    T = [row[:nv] + [row[-1]] for row in T]

    obj = [-F(v) for v in c] + [F(0)] * m + [F(0)]
    for i, bv in enumerate(basis):
        if bv < nv and obj[bv] != 0:
            f = obj[bv]
            obj = [a - f * t for a, t in zip(obj, T[i])]
    T.append(obj)
    if not _run(T, basis, nv, max_iter):
        return LPResult(UNBOUNDED)
    x = [F(0)] * n
    for i, bv in enumerate(basis):
        if bv < n:
            x[bv] = T[i][-1]
    return LPResult(OPTIMAL, x, T[m][-1])
