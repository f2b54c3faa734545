"""Brute-force oracles: point counts over F_q and real chamber enumeration.

Neither engine consults the Moebius values; they only use the lattice to
decide whether a prime is good.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from arrtopo import _kernels
from arrtopo.arrangement import CentralArrangement
from arrtopo.genericity import AffineChart, sample_generic_chart
from arrtopo.lattice import IntegerPolynomial, build_lattice, characteristic_polynomial
from arrtopo.simplex import OPTIMAL, UNBOUNDED, lp_maximize

log = logging.getLogger(__name__)

DEFAULT_PRIMES = (5, 7, 11, 13, 17)
ENUMERATION_BUDGET = 10**8


class OracleError(RuntimeError):
    pass


def is_prime(q: int) -> bool:
    if q < 2:
        return False
    i = 2
    while i * i <= q:
        if q % i == 0:
            return False
        i += 1
    return True


def next_primes(after: int):
    q = after + 1
    while True:
        if is_prime(q):
            yield q
        q += 1


def _reduce_mod(A: CentralArrangement, q: int) -> np.ndarray:
    rows = []
    for i, f in enumerate(A.forms, 1):
        row = []
        for c in f:
            if c.denominator % q == 0:
                raise OracleError(f"denominator of form {i} is not invertible mod {q}")
            row.append(c.numerator * pow(c.denominator, -1, q) % q)
        rows.append(row)
    return np.array(rows, dtype=np.int64)


def _good_prime(A: CentralArrangement, q: int) -> bool:
    return build_lattice(A, prime=q).rank_signature() == build_lattice(A).rank_signature()


@dataclass(frozen=True)
class PointCountResult:
    prime: int
    raw_count: int
    predicted: int
    good_prime: bool

    @property
    def match(self) -> bool:
        return self.raw_count == self.predicted


def count_points_mod_q(
    A: CentralArrangement, q: int, budget: int = ENUMERATION_BUDGET
) -> PointCountResult:
    """Exhaustive #{x in F_q^(n+1) : l_i(x) != 0 for all i}, next to chi_A(q)."""
    if not is_prime(q):
        raise OracleError(f"{q} is not prime")
    if q**A.ambient_dim > budget:
        raise OracleError(f"{q}^{A.ambient_dim} points exceed the enumeration budget {budget}")
    coeffs = _reduce_mod(A, q)
    raw = _kernels.count_nonvanishing(coeffs, q)
    predicted = characteristic_polynomial(build_lattice(A))(q)
    return PointCountResult(q, raw, predicted, _good_prime(A, q))


def _interpolate(points: Sequence[tuple[int, int]]) -> list[Fraction]:
    """Coefficients (low to high) of the unique polynomial of degree < len(points)."""
    k = len(points)
    coeffs = [Fraction(0)] * k
    for i, (xi, yi) in enumerate(points):
        basis = [Fraction(1)]
        denom = Fraction(1)
        for j, (xj, _) in enumerate(points):
            if j == i:
                continue
            basis = [Fraction(0)] + basis
            for t in range(len(basis) - 1):
                basis[t] -= xj * basis[t + 1]
            denom *= xi - xj
        for t in range(k):
            coeffs[t] += yi * basis[t] / denom
    return coeffs


def _monic_integer_fit(points: list[tuple[int, int]], degree: int) -> IntegerPolynomial:
    if len(points) < degree + 1:
        raise OracleError(f"need {degree + 1} good primes, have {len(points)}")
    coeffs = _interpolate(points[: degree + 1])
    if any(c.denominator != 1 for c in coeffs):
        raise OracleError("interpolated polynomial is not integral (a bad prime slipped through)")
    poly = IntegerPolynomial(tuple(int(c) for c in coeffs))
    if poly.degree != degree or poly.coefficient(degree) != 1:
        raise OracleError(f"interpolated polynomial {poly} is not monic of degree {degree}")
    for x, y in points[degree + 1:]:
        if poly(x) != y:
            raise OracleError(f"extra point q={x} disagrees with interpolant")
    return poly


def interpolate_char_poly(
    A: CentralArrangement, primes: Iterable[int] = DEFAULT_PRIMES, extend: bool = False
) -> IntegerPolynomial:
    """chi_A recovered purely from point counts at good primes.

    With `extend`, primes above the given ones are tried until enough are good.
    """
    primes = list(primes)
    for q in primes:
        if not is_prime(q):
            raise OracleError(f"{q} is not prime")
    pts = []

    def attempt(q):
        res = count_points_mod_q(A, q)
        if res.good_prime:
            pts.append((q, res.raw_count))
        else:
            log.info("skipping bad prime %d", q)

    for q in primes:
        attempt(q)
    if extend:
        gen = next_primes(max(primes, default=1))
        while len(pts) < A.ambient_dim + 1:
            attempt(next(gen))
    return _monic_integer_fit(pts, A.ambient_dim)


@dataclass
class ChamberCensus:
    chart: AffineChart
    sign_vectors: list[tuple[int, ...]]
    total_regions: int
    bounded_regions: int
    bounded: list[bool] = field(default_factory=list)
    interior_points: list[tuple[Fraction, ...]] = field(default_factory=list)

    def bounded_interior_points(self) -> list[tuple[Fraction, ...]]:
        return [p for p, b in zip(self.interior_points, self.bounded) if b]


def _feasible_point(aff, sigma, n) -> Optional[tuple[Fraction, ...]]:
    """A point with sigma_i (c_i + w_i.u) >= t > 0, maximizing t (capped at 1), or None."""
    # variables: u+ (n), u- (n), t
    A, b = [], []
    for (c0, w), s in zip(aff, sigma):
        A.append([-s * x for x in w] + [s * x for x in w] + [Fraction(1)])
        b.append(s * c0)
    A.append([Fraction(0)] * (2 * n) + [Fraction(1)])
    b.append(Fraction(1))
    res = lp_maximize([0] * (2 * n) + [1], A, b)
    if res.status != OPTIMAL or res.value <= 0:
        return None
    return tuple(res.x[j] - res.x[n + j] for j in range(n))


def _recession_cone_trivial(aff, sigma, n) -> bool:
    """True iff {v : sigma_i w_i.v >= 0 for all i} = {0}."""
    A, b = [], []
    for (_, w), s in zip(aff, sigma):
        A.append([-s * x for x in w] + [s * x for x in w])
        b.append(Fraction(0))
    for j in range(n):
        for sign in (1, -1):
            row = [Fraction(0)] * (2 * n)
            row[j], row[n + j] = Fraction(sign), Fraction(-sign)
            A.append(row)
            b.append(Fraction(1))
    for j in range(n):
        for sign in (1, -1):
            obj = [0] * (2 * n)
            obj[j], obj[n + j] = sign, -sign
            res = lp_maximize(obj, A, b)
            if res.status == UNBOUNDED or (res.status == OPTIMAL and res.value > 0):
                return False
    return True


def enumerate_regions(A: CentralArrangement, seed: int = 0, chart: Optional[AffineChart] = None) -> ChamberCensus:
    """Sign vectors of the real chart complement, grown one hyperplane at a time."""
    if chart is None:
        chart = sample_generic_chart(A, seed)
    n = chart.dim
    aff = chart.pullback(A.forms)
    partial: list[tuple[int, ...]] = [()]
    for k in range(A.d):
        grown = []
        for sig in partial:
            for s in (1, -1):
                cand = sig + (s,)
                if _feasible_point(aff[: k + 1], cand, n) is not None:
                    grown.append(cand)
        partial = grown
    partial.sort(reverse=True)
    points = [_feasible_point(aff, s, n) for s in partial]
    bounded = [_recession_cone_trivial(aff, s, n) for s in partial]
    return ChamberCensus(chart, partial, len(partial), sum(bounded), bounded, points)


def affine_char_poly(
    A: CentralArrangement, chart: AffineChart, primes: Iterable[int] = DEFAULT_PRIMES, extend: bool = True
) -> IntegerPolynomial:
    """chi of the arrangement induced on {l = 1}, from F_q counts on that chart."""
    form = chart.chart_form
    if any(c.denominator != 1 for c in form):
        raise OracleError("chart form must have integer coefficients")
    cone = CentralArrangement(A.ambient_dim, A.forms + (form,))
    need = A.n + 1
    pts, tried = [], []

    def attempt(q):
        tried.append(q)
        if q**A.ambient_dim > ENUMERATION_BUDGET:
            raise OracleError(f"{q}^{A.ambient_dim} exceeds the enumeration budget")
        try:
            coeffs = _reduce_mod(A, q)
        except OracleError as exc:
            log.info("skipping prime %d: %s", q, exc)
            return
        if not _good_prime(cone, q):
            log.info("skipping bad prime %d for the chart", q)
            return
        chart_row = np.array([int(c) % q for c in form], dtype=np.int64)
        pts.append((q, _kernels.count_nonvanishing(coeffs, q, chart=chart_row)))

    for q in primes:
        if not is_prime(q):
            raise OracleError(f"{q} is not prime")
        attempt(q)
    if extend:
        gen = next_primes(max(tried, default=1))
        while len(pts) < need:
            attempt(next(gen))
    return _monic_integer_fit(pts, A.n)


@dataclass(frozen=True)
class ZaslavskyVerdict:
    affine_char_poly: IntegerPolynomial
    predicted_regions: int
    predicted_bounded: int
    observed_regions: int
    observed_bounded: int

    @property
    def match(self) -> bool:
        return (self.predicted_regions, self.predicted_bounded) == (
            self.observed_regions,
            self.observed_bounded,
        )


def zaslavsky_check(
    A: CentralArrangement, census: ChamberCensus, primes: Iterable[int] = DEFAULT_PRIMES
) -> ZaslavskyVerdict:
    chi = affine_char_poly(A, census.chart, primes)
    sign = (-1) ** A.n
    return ZaslavskyVerdict(chi, sign * chi(-1), sign * chi(1), census.total_regions, census.bounded_regions)
