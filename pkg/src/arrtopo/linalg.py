"""Exact row reduction over Q (Fraction) or a prime field F_p (int mod p)."""

from __future__ import annotations

from fractions import Fraction
from typing import Optional, Sequence

Row = tuple


def _inv(x, p: Optional[int]):
    if p is None:
        return 1 / Fraction(x)
    return pow(int(x), -1, p)


def _norm(x, p: Optional[int]):
    return Fraction(x) if p is None else int(x) % p


def rref(rows: Sequence[Sequence], ncols: int, p: Optional[int] = None) -> tuple[Row, ...]:
    """Reduced row-echelon form of the row span, zero rows dropped.

    Pivots are normalized to 1 and rows come out in increasing pivot order, so
    the result is a canonical key for the span.
    """
    m = [[_norm(x, p) for x in r] for r in rows]
    piv_r = 0
    for c in range(ncols):
        for i in range(piv_r, len(m)):
            if m[i][c] != 0:
                break
        else:
            continue
        m[piv_r], m[i] = m[i], m[piv_r]
        inv = _inv(m[piv_r][c], p)
        m[piv_r] = [_norm(x * inv, p) for x in m[piv_r]]
        for r in range(len(m)):
            if r != piv_r and m[r][c] != 0:
                f = m[r][c]
                m[r] = [_norm(a - f * b, p) for a, b in zip(m[r], m[piv_r])]
        piv_r += 1
        if piv_r == len(m):
            break
    return tuple(tuple(r) for r in m[:piv_r])


def rank(rows: Sequence[Sequence], ncols: int, p: Optional[int] = None) -> int:
    return len(rref(rows, ncols, p))


def in_span(basis: Sequence[Sequence], vec: Sequence, ncols: int, p: Optional[int] = None) -> bool:
    """True when `vec` lies in the span of the rows of an RREF `basis`."""
    v = [_norm(x, p) for x in vec]
    for row in basis:
        c = next(j for j, x in enumerate(row) if x != 0)
        if v[c] != 0:
            f = v[c]
            v = [_norm(a - f * b, p) for a, b in zip(v, row)]
    return all(x == 0 for x in v)


def nullspace(rows: Sequence[Sequence], ncols: int) -> list[tuple[Fraction, ...]]:
    """Rational basis of {v : row . v = 0 for every row}, one vector per free column."""
    red = rref(rows, ncols)
    pivots = [next(j for j, x in enumerate(r) if x != 0) for r in red]
    free = [j for j in range(ncols) if j not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for r, pc in zip(red, pivots):
            v[pc] = -r[f]
        basis.append(tuple(v))
    return basis


def dot(a: Sequence, b: Sequence):
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def matvec_rows(forms: Sequence[Sequence], basis: Sequence[Sequence]) -> list[tuple[Fraction, ...]]:
    """Coordinates of each form pulled back along the columns `basis` (form . v_j)."""
    return [tuple(dot(a, v) for v in basis) for a in forms]


def proportional(a: Sequence, b: Sequence) -> bool:
    return rank([a, b], len(a)) < 2


def normalize_form(a: Sequence) -> tuple[Fraction, ...]:
    """Scale so the first nonzero entry is 1; canonical representative of a hyperplane."""
    lead = next(x for x in a if x != 0)
    return tuple(Fraction(x) / lead for x in a)
