"""Topological invariants of the projective complement, computed combinatorially.

Everything here is exact integer arithmetic over the intersection lattice; a
failed divisibility raises InternalConsistencyError because it can only mean a
bug.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from math import gcd
from typing import Callable

from arrtopo.arrangement import CentralArrangement, essential_rank
from arrtopo.lattice import (
    InternalConsistencyError,
    IntersectionLattice,
    betti_vector,
    build_lattice,
    poincare_polynomial,
    projective_poincare,
    restrict_to_generic_hyperplane,
)


@dataclass(frozen=True)
class InvariantReport:
    betti_affine: list[int]
    betti_projective: list[int]
    euler_projective: int
    bn: int
    gradient_degree: int
    polar_invariant: int
    essential: bool
    # how each derived field was obtained, as a short human-readable tag
    provenance: dict = field(default_factory=dict)

    @property
    def dominance_matches_essentiality(self) -> bool:
        return (self.gradient_degree > 0) == self.essential


def euler_of(L: IntersectionLattice) -> int:
    """Euler characteristic of the projective complement, from the lattice."""
    return projective_poincare(L)(-1)


def invariant_report(A: CentralArrangement, lattice: IntersectionLattice | None = None) -> InvariantReport:
    L = lattice if lattice is not None else build_lattice(A)
    n = A.n
    aff = poincare_polynomial(L)
    proj = projective_poincare(L)
    bn = proj.coefficient(n)
    _, ess = essential_rank(A)
    return InvariantReport(
        betti_affine=betti_vector(aff, n + 2),
        betti_projective=betti_vector(proj, n + 1),
        euler_projective=proj(-1),
        bn=bn,
        gradient_degree=bn,
        polar_invariant=A.d * bn,
        essential=ess,
        provenance={
            "betti_affine": "lattice",
            "betti_projective": "lattice",
            "gradient_degree": "deg grad(Q) = b_n(D(Q))",
            "polar_invariant": "polar identity: P(F_t) = d * deg grad(Q)",
            "essential": "coefficient rank",
        },
    )


def euler_minus_generic_hyperplane(A: CentralArrangement, seed: int = 0) -> int:
    """(-1)^n (chi(D(Q)) - chi(D(Q) cap H)) for a concrete seeded hyperplane H."""
    return hyperplane_section_sides(A, seed)["euler_difference"]


def hyperplane_section_sides(A: CentralArrangement, seed: int = 0) -> dict:
    L = build_lattice(A)
    R = restrict_to_generic_hyperplane(A, seed)
    chi = euler_of(L)
    chi_h = euler_of(build_lattice(R))
    return {
        "chi": chi,
        "chi_restricted": chi_h,
        "euler_difference": (-1) ** A.n * (chi - chi_h),
        "bn": projective_poincare(L).coefficient(A.n),
        "restricted_forms": R.d,
    }


def smooth_hypersurface_euler(k: int, e: int) -> int:
    """Euler characteristic of a smooth degree-e hypersurface in P^k (empty for k = 0)."""
    if k < 0 or e < 1:
        raise ValueError("need k >= 0 and e >= 1")
    num = (1 - e) ** (k + 1) - 1
    if num % e:
        raise InternalConsistencyError(f"non-integral hypersurface Euler characteristic k={k} e={e}")
    return (k + 1) + num // e


def stratified_open_value(L: IntersectionLattice, closed: Callable[[int], int]) -> int:
    """Open-stratum value of the ambient P^n given closed values per projective flat.

    `closed(k)` is the Euler characteristic attached to a projective flat of
    dimension k; open values are peeled off from the smallest flats upward.
    """
    pflats = sorted((X for X in L.flats if X.dim >= 1), key=lambda X: X.dim)
    op: dict[frozenset, int] = {}
    for X in pflats:
        inner = sum(op[Z.contained_hyperplanes] for Z in pflats
                    if Z.contained_hyperplanes > X.contained_hyperplanes)
        op[X.contained_hyperplanes] = closed(X.dim - 1) - inner
    return op[L.bottom.contained_hyperplanes]


def stratified_self_test(A: CentralArrangement, lattice: IntersectionLattice | None = None) -> int:
    """chi(D(Q)) through the stratification with chi(P^k) = k + 1 as closed values."""
    L = lattice if lattice is not None else build_lattice(A)
    return stratified_open_value(L, lambda k: k + 1)


def euler_complement_with_hypersurface(
    A: CentralArrangement, e: int, lattice: IntersectionLattice | None = None
) -> int:
    """chi(D(fQ)) for a GEN1-generic f of degree e; depends only on e and the lattice."""
    if e < 1:
        raise ValueError("degree must be >= 1")
    L = lattice if lattice is not None else build_lattice(A)
    on_f = stratified_open_value(L, lambda k: smooth_hypersurface_euler(k, e))
    return euler_of(L) - on_f


@dataclass(frozen=True)
class MilnorChainReport:
    e: int
    chi_DfQ: int
    chi_F_minus_N: int
    chi_X_minus_X0: int
    c: int
    card_CV: int
    card_CH: int
    predicted_card_Cg: int
    relative_betti: int
    polar_line_count: int
    certificates: dict

    def as_dict(self) -> dict:
        return asdict(self)


def _exact_div(a: int, b: int, what: str) -> int:
    if a % b:
        raise InternalConsistencyError(f"{what}: {b} does not divide {a}")
    return a // b


def milnor_chain_report(
    A: CentralArrangement, e: int, lattice: IntersectionLattice | None = None
) -> MilnorChainReport:
    n, d = A.n, A.d
    sign = (-1) ** n
    chi = euler_complement_with_hypersurface(A, e, lattice)
    chi_F = e * chi
    chi_X = d * chi
    cg = sign * chi_F
    cv = sign * chi_X
    c = gcd(d, e)
    certs = {
        "e_divides_Cg": cg % e == 0,
        "d_divides_CV": cv % d == 0,
        "c_divides_CV": cv % c == 0,
        "CV_equals_d_over_e_Cg": cv * e == d * cg,
        "lines_agree": cg * d == cv * e,
        "lines_nonnegative": cg >= 0,
    }
    if not all(certs.values()):
        bad = [k for k, ok in certs.items() if not ok]
        raise InternalConsistencyError(f"Milnor chain integrality failed: {bad}")
    lines = _exact_div(cg, e, "polar lines")
    if lines != _exact_div(cv, d, "polar lines via X"):
        raise InternalConsistencyError("polar line counts disagree")
    return MilnorChainReport(
        e=e,
        chi_DfQ=chi,
        chi_F_minus_N=chi_F,
        chi_X_minus_X0=chi_X,
        c=c,
        card_CV=cv,
        card_CH=_exact_div(cv, c, "|C(H)|"),
        predicted_card_Cg=cg,
        relative_betti=cg,
        polar_line_count=lines,
        certificates=certs,
    )


@dataclass(frozen=True)
class MinimalCells:
    cells: list[int]
    relative_top: int
    alternating_sum: int


def minimal_cell_vector(A: CentralArrangement, seed: int = 0) -> MinimalCells:
    """Cell counts of a minimal CW model of D(Q), checked against the relative Euler count."""
    L = build_lattice(A)
    cells = betti_vector(projective_poincare(L), A.n + 1)
    rel = euler_minus_generic_hyperplane(A, seed)
    if rel != cells[A.n]:
        raise InternalConsistencyError(f"relative count {rel} != top cell count {cells[A.n]}")
    alt = sum((-1) ** k * b for k, b in enumerate(cells))
    if alt != euler_of(L):
        raise InternalConsistencyError("alternating cell sum differs from chi(D(Q))")
    return MinimalCells(cells, rel, alt)


def full_report(A: CentralArrangement, e: int = 2, seed: int = 0) -> dict:
    """The JSON report: invariants, the Milnor chain for degree e, minimal cells."""
    L = build_lattice(A)
    inv = invariant_report(A, L)
    return {
        "betti_affine": inv.betti_affine,
        "betti_projective": inv.betti_projective,
        "euler_projective": inv.euler_projective,
        "gradient_degree": inv.gradient_degree,
        "polar_invariant": inv.polar_invariant,
        "essential": inv.essential,
        "milnor_chain": milnor_chain_report(A, e, L).as_dict(),
        "minimal_cells": minimal_cell_vector(A, seed).cells,
    }
