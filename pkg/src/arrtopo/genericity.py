"""Seeded generic charts and generic hypersurfaces, certified exactly."""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional

import numpy as np

from arrtopo import linalg
from arrtopo.arrangement import CentralArrangement

COEFF_RANGE = 999
DEFAULT_BUDGET = 1000


class GenericityError(RuntimeError):
    pass


def _rng(seed: int, attempt: int, salt: int) -> np.random.Generator:
    return np.random.default_rng([abs(int(seed)), int(seed < 0), attempt, salt])


def _draw_ints(seed: int, attempt: int, salt: int, k: int) -> tuple[int, ...]:
    return tuple(int(x) for x in _rng(seed, attempt, salt).integers(-COEFF_RANGE, COEFF_RANGE + 1, size=k))


@dataclass(frozen=True)
class AffineChart:
    """The affine hyperplane {chart_form = 1} with an exact parametrization p + sum u_j v_j."""

    chart_form: tuple[Fraction, ...]
    basepoint: tuple[Fraction, ...]
    tangent_basis: tuple[tuple[Fraction, ...], ...]

    @classmethod
    def from_form(cls, form) -> "AffineChart":
        c = tuple(Fraction(x) for x in form)
        j = next(i for i, x in enumerate(c) if x != 0)
        p = tuple(Fraction(1) / c[j] if i == j else Fraction(0) for i in range(len(c)))
        return cls(c, p, tuple(linalg.nullspace([c], len(c))))

    @property
    def dim(self) -> int:
        return len(self.tangent_basis)

    def point(self, u) -> tuple[Fraction, ...]:
        x = list(self.basepoint)
        for uj, v in zip(u, self.tangent_basis):
            x = [a + uj * b for a, b in zip(x, v)]
        return tuple(x)

    def pullback(self, forms) -> list[tuple[Fraction, tuple[Fraction, ...]]]:
        """Each linear form as an affine function c + w.u of the chart coordinates."""
        return [
            (linalg.dot(a, self.basepoint), tuple(linalg.dot(a, v) for v in self.tangent_basis))
            for a in forms
        ]


def _positive_dim_flats(A: CentralArrangement, lattice=None):
    from arrtopo.lattice import build_lattice

    L = lattice if lattice is not None else build_lattice(A)
    return [X for X in L.flats if X.dim >= 1]


def _vanishes_on_some_flat(form, flats, ncols: int) -> bool:
    return any(linalg.in_span(X.defining_space, form, ncols) for X in flats)


def chart_candidates(A: CentralArrangement, seed: int, lattice=None) -> Iterator[AffineChart]:
    """Every accepted chart form in draw order; the first one is `sample_generic_chart`."""
    flats = _positive_dim_flats(A, lattice)
    for attempt in itertools.count():
        form = _draw_ints(seed, attempt, 1, A.ambient_dim)
        if any(form) and not _vanishes_on_some_flat(form, flats, A.ambient_dim):
            yield AffineChart.from_form(form)


def sample_generic_chart(
    A: CentralArrangement, seed: int, budget: int = DEFAULT_BUDGET, lattice=None
) -> AffineChart:
    """Seeded chart form l with integer coefficients in [-999, 999].

    Accepted when l is not identically zero on any flat of positive dimension;
    this also makes l non-proportional to every form of A.
    """
    flats = _positive_dim_flats(A, lattice)
    for attempt in range(budget):
        form = _draw_ints(seed, attempt, 1, A.ambient_dim)
        if any(form) and not _vanishes_on_some_flat(form, flats, A.ambient_dim):
            return AffineChart.from_form(form)
    raise GenericityError(f"no generic chart within {budget} draws (seed={seed})")


def monomials(nvars: int, e: int) -> list[tuple[int, ...]]:
    out = []
    for combo in itertools.combinations_with_replacement(range(nvars), e):
        exp = [0] * nvars
        for j in combo:
            exp[j] += 1
        out.append(tuple(exp))
    return out


@dataclass(frozen=True)
class GenericHypersurface:
    """Homogeneous polynomial f of degree e, stored as (exponent, coefficient) pairs."""

    degree: int
    nvars: int
    terms: tuple[tuple[tuple[int, ...], Fraction], ...]
    gen1_certified: bool = False
    warning: Optional[str] = None

    @classmethod
    def from_terms(cls, terms: dict, nvars: int, **kw) -> "GenericHypersurface":
        items = tuple(sorted((tuple(k), Fraction(v)) for k, v in terms.items() if v != 0))
        degs = {sum(k) for k, _ in items}
        if len(degs) != 1:
            raise ValueError("polynomial must be homogeneous and nonzero")
        return cls(degs.pop(), nvars, items, **kw)

    @classmethod
    def from_quadric(cls, S, **kw) -> "GenericHypersurface":
        """f(x) = x^T S x for a symmetric rational matrix S."""
        k = len(S)
        terms = {}
        for i in range(k):
            for j in range(i, k):
                exp = [0] * k
                exp[i] += 1
                exp[j] += 1
                terms[tuple(exp)] = Fraction(S[i][j]) * (1 if i == j else 2)
        return cls.from_terms(terms, k, **kw)

    def linear_coefficients(self) -> tuple[Fraction, ...]:
        assert self.degree == 1
        c = [Fraction(0)] * self.nvars
        for exp, v in self.terms:
            c[exp.index(1)] = v
        return tuple(c)

    def gram(self) -> list[list[Fraction]]:
        """Symmetric S with f(x) = x^T S x (degree 2 only)."""
        assert self.degree == 2
        S = [[Fraction(0)] * self.nvars for _ in range(self.nvars)]
        for exp, v in self.terms:
            idx = [j for j, k in enumerate(exp) for _ in range(k)]
            i, j = idx
            if i == j:
                S[i][i] += v
            else:
                S[i][j] += v / 2
                S[j][i] += v / 2
        return S

    def numeric(self) -> tuple[np.ndarray, np.ndarray]:
        """Exponent matrix and float coefficients for the numeric kernels."""
        E = np.array([exp for exp, _ in self.terms], dtype=np.int64)
        c = np.array([float(v) for _, v in self.terms], dtype=np.float64)
        return E, c


def certify_gen1(f: GenericHypersurface, A: CentralArrangement, lattice=None) -> bool:
    """Exact check that f restricted to every positive-dimensional flat is non-degenerate."""
    flats = _positive_dim_flats(A, lattice)
    n1 = A.ambient_dim
    if f.degree == 1:
        return not _vanishes_on_some_flat(f.linear_coefficients(), flats, n1)
    if f.degree == 2:
        S = f.gram()
        for X in flats:
            B = linalg.nullspace(X.defining_space, n1)
            SB = [[linalg.dot(S[i], v) for v in B] for i in range(n1)]
            restricted = [[sum(b[i] * SB[i][k] for i in range(n1)) for k in range(len(B))] for b in B]
            if linalg.rank(restricted, len(B)) < len(B):
                return False
        return True
    raise ValueError("exact GEN1 certification is only available for degree 1 and 2")


def sample_generic_hypersurface(
    A: CentralArrangement, e: int, seed: int, budget: int = DEFAULT_BUDGET
) -> GenericHypersurface:
    """Random homogeneous f of degree e; certified for e in {1, 2}, returned uncertified above."""
    if e < 1:
        raise ValueError("degree must be >= 1")
    from arrtopo.lattice import build_lattice

    mons = monomials(A.ambient_dim, e)
    if e >= 3:
        coeffs = _draw_ints(seed, 0, 2, len(mons))
        msg = f"degree {e} hypersurface returned without GEN1 certification"
        warnings.warn(msg, stacklevel=2)
        return GenericHypersurface.from_terms(dict(zip(mons, coeffs)), A.ambient_dim, warning=msg)
    L = build_lattice(A)
    for attempt in range(budget):
        coeffs = _draw_ints(seed, attempt, 2, len(mons))
        if not any(coeffs):
            continue
        f = GenericHypersurface.from_terms(dict(zip(mons, coeffs)), A.ambient_dim)
        if certify_gen1(f, A, L):
            return GenericHypersurface(f.degree, f.nvars, f.terms, gen1_certified=True)
    raise GenericityError(f"no GEN1-generic degree-{e} form within {budget} draws (seed={seed})")
