"""Intersection lattice, Moebius function and the polynomials built from it."""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

from arrtopo import linalg
from arrtopo.arrangement import CentralArrangement

DEFAULT_FLAT_CAP = 100_000


class LatticeError(RuntimeError):
    pass


class InternalConsistencyError(AssertionError):
    """An identity that holds for every central arrangement failed: a bug, not bad input."""


@dataclass(frozen=True)
class IntegerPolynomial:
    """Integer polynomial, coefficients listed from degree 0 upward, trailing zeros stripped."""

    coeffs: tuple[int, ...]

    def __post_init__(self):
        c = [int(x) for x in self.coeffs]
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def from_dict(cls, terms: dict[int, int]) -> "IntegerPolynomial":
        deg = max(terms, default=-1)
        return cls(tuple(terms.get(k, 0) for k in range(deg + 1)))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def coefficient(self, k: int) -> int:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0

    def __call__(self, t):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * t + c
        return acc

    def __add__(self, other: "IntegerPolynomial") -> "IntegerPolynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        return IntegerPolynomial(tuple(self.coefficient(k) + other.coefficient(k) for k in range(n)))

    def shift(self, k: int = 1) -> "IntegerPolynomial":
        """Multiply by t**k."""
        return IntegerPolynomial((0,) * k + self.coeffs) if self.coeffs else self

    def divide_by_one_plus_t(self) -> "IntegerPolynomial":
        # synthetic division by (t + 1), root -1
        if not self.coeffs:
            return self
        hi = list(reversed(self.coeffs))
        q, acc = [], 0
        for c in hi:
            acc = c - acc
            q.append(acc)
        rem = q.pop()
        if rem != 0:
            raise InternalConsistencyError(f"(1+t) does not divide {self}")
        return IntegerPolynomial(tuple(reversed(q)))

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            mag = abs(c)
            body = str(mag) if k == 0 or mag != 1 else ""
            if k >= 1:
                body += "t" if k == 1 else f"t^{k}"
            parts.append(("- " if c < 0 else "+ ") + body)
        s = " ".join(parts)
        return s[2:] if s.startswith("+ ") else "-" + s[2:]


@dataclass(frozen=True)
class Flat:
    defining_space: tuple[tuple, ...]
    dim: int
    contained_hyperplanes: frozenset
    moebius: Optional[int] = None

    @property
    def rank(self) -> int:
        return len(self.defining_space)


@dataclass(frozen=True)
class IntersectionLattice:
    ambient_dim: int
    n_forms: int
    flats: tuple[Flat, ...]

    @property
    def bottom(self) -> Flat:
        return self.flats[0]

    @property
    def center(self) -> Flat:
        return min(self.flats, key=lambda X: X.dim)

    def below(self, X: Flat) -> list[Flat]:
        """Flats strictly below X in the lattice order (i.e. strictly containing X)."""
        return [Y for Y in self.flats if Y.contained_hyperplanes < X.contained_hyperplanes]

    def leq(self, Y: Flat, X: Flat) -> bool:
        return Y.contained_hyperplanes <= X.contained_hyperplanes

    def rank_signature(self) -> dict[frozenset, int]:
        return {X.contained_hyperplanes: X.rank for X in self.flats}

    def to_dot(self) -> str:
        lines = ["digraph lattice {", "  rankdir=BT;"]
        for i, X in enumerate(self.flats):
            lines.append(f'  f{i} [label="{X.dim}/{X.moebius}"];')
        for i, X in enumerate(self.flats):
            for j, Y in enumerate(self.flats):
                # cover relations only
                if X.contained_hyperplanes < Y.contained_hyperplanes and Y.rank == X.rank + 1:
                    lines.append(f"  f{i} -> f{j};")
        lines.append("}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        flats = [
            {
                "dim": X.dim,
                "defining_space": [[str(c) for c in row] for row in X.defining_space],
                "contained_hyperplanes": sorted(X.contained_hyperplanes),
                "moebius": X.moebius,
            }
            for X in self.flats
        ]
        return json.dumps({"ambient_dim": self.ambient_dim, "flats": flats}, indent=2)


def _closure(forms: Sequence[Sequence], ncols: int, p: Optional[int], cap: int) -> list[Flat]:
    bottom_members = frozenset(i for i, a in enumerate(forms) if linalg.in_span((), a, ncols, p))
    flats = {(): Flat((), ncols, bottom_members)}
    frontier = [flats[()]]
    while frontier:
        nxt = []
        for X in frontier:
            for i, a in enumerate(forms):
                if i in X.contained_hyperplanes:
                    continue
                key = linalg.rref(list(X.defining_space) + [a], ncols, p)
                if key in flats:
                    continue
                members = frozenset(j for j, b in enumerate(forms) if linalg.in_span(key, b, ncols, p))
                Y = Flat(key, ncols - len(key), members)
                flats[key] = Y
                nxt.append(Y)
                if len(flats) > cap:
                    raise LatticeError(f"flat count exceeds cap {cap}")
        frontier = nxt
    return sorted(flats.values(), key=lambda X: (X.rank, sorted(X.contained_hyperplanes)))


def moebius_assign(L: IntersectionLattice) -> IntersectionLattice:
    mu: dict[frozenset, int] = {}
    out = []
    for X in L.flats:  # sorted by rank, so every Y < X is already done
        if X.rank == 0:
            val = 1
        else:
            val = -sum(mu[Y.contained_hyperplanes] for Y in L.flats
                       if Y.contained_hyperplanes < X.contained_hyperplanes)
        mu[X.contained_hyperplanes] = val
        out.append(replace(X, moebius=val))
    return replace(L, flats=tuple(out))


def build_lattice(
    A: CentralArrangement,
    cap: int = DEFAULT_FLAT_CAP,
    prime: Optional[int] = None,
) -> IntersectionLattice:
    """All intersections of subfamilies of A, deduplicated, with Moebius values.

    With `prime` set, the same construction runs over F_p (coefficients reduced
    mod p); used to decide whether p is a good prime.
    """
    forms = A.forms
    if prime is not None:
        forms = [tuple(_mod(c, prime) for c in a) for a in forms]
    flats = _closure(forms, A.ambient_dim, prime, cap)
    return moebius_assign(IntersectionLattice(A.ambient_dim, A.d, tuple(flats)))


def _mod(c: Fraction, p: int) -> int:
    if c.denominator % p == 0:
        raise ValueError(f"denominator {c.denominator} is not invertible mod {p}")
    return c.numerator * pow(c.denominator, -1, p) % p


def characteristic_polynomial(L: IntersectionLattice) -> IntegerPolynomial:
    terms: dict[int, int] = {}
    for X in L.flats:
        terms[X.dim] = terms.get(X.dim, 0) + X.moebius
    return IntegerPolynomial.from_dict(terms)


def poincare_polynomial(L: IntersectionLattice) -> IntegerPolynomial:
    """Sum of mu(X) (-t)^codim X: the Betti generating function of the affine complement."""
    terms: dict[int, int] = {}
    for X in L.flats:
        k = L.ambient_dim - X.dim
        terms[k] = terms.get(k, 0) + X.moebius * (-1) ** k
    return IntegerPolynomial.from_dict(terms)


def projective_poincare(L: IntersectionLattice) -> IntegerPolynomial:
    return poincare_polynomial(L).divide_by_one_plus_t()


def betti_vector(poly: IntegerPolynomial, length: int) -> list[int]:
    return [poly.coefficient(k) for k in range(length)]


def _restrict_forms(forms: Sequence[Sequence], h: Sequence, ncols: int):
    """Forms pulled back to the hyperplane h = 0, zero and repeated hyperplanes removed."""
    basis = linalg.nullspace([h], ncols)
    seen = {}
    for a in forms:
        r = linalg.matvec_rows([a], basis)[0]
        if any(c != 0 for c in r):
            seen.setdefault(linalg.normalize_form(r), None)
    return tuple(seen), ncols - 1


@lru_cache(maxsize=None)
def _dr(forms: tuple, ncols: int) -> IntegerPolynomial:
    if not forms:
        return IntegerPolynomial((1,))
    h, rest = forms[-1], forms[:-1]
    r_forms, r_cols = _restrict_forms(rest, h, ncols)
    return _dr(rest, ncols) + _dr(tuple(sorted(r_forms)), r_cols).shift(1)


def deletion_restriction_poincare(A: CentralArrangement) -> IntegerPolynomial:
    """Poincare polynomial from pi(A) = pi(A minus H) + t pi(A restricted to H), no lattice."""
    forms = tuple(sorted(linalg.normalize_form(a) for a in A.forms))
    return _dr(forms, A.ambient_dim)


def restricted_arrangement(A: CentralArrangement, h: Sequence) -> CentralArrangement:
    forms, ncols = _restrict_forms(A.forms, h, A.ambient_dim)
    return CentralArrangement(ncols, forms)


def restrict_to_generic_hyperplane(
    A: CentralArrangement, seed: int, budget: int = 1000
) -> CentralArrangement:
    """Induced arrangement on a seeded generic hyperplane through the origin.

    A candidate hyperplane is accepted only if the restricted Poincare polynomial
    agrees with that of A in every degree below n (the Lefschetz truncation).
    """
    from arrtopo.genericity import chart_candidates

    if A.n < 1:
        raise ValueError("restriction needs n >= 1")
    L = build_lattice(A)
    target = poincare_polynomial(L)
    for _, chart in zip(range(budget), chart_candidates(A, seed, L)):
        R = restricted_arrangement(A, chart.chart_form)
        got = poincare_polynomial(build_lattice(R))
        if all(got.coefficient(k) == target.coefficient(k) for k in range(A.n)):
            return R
    raise LatticeError(f"no generic hyperplane found within {budget} draws")
