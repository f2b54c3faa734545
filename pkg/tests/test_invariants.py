from math import comb

import pytest
from hypothesis import given, settings

from arrtopo.arrangement import CentralArrangement
from arrtopo.invariants import (
    euler_complement_with_hypersurface,
    euler_minus_generic_hyperplane,
    euler_of,
    full_report,
    hyperplane_section_sides,
    invariant_report,
    milnor_chain_report,
    minimal_cell_vector,
    smooth_hypersurface_euler,
    stratified_self_test,
)
from arrtopo.lattice import build_lattice
from conftest import CORPUS, load, small_arrangements

FOUR_PLANES = CentralArrangement(3, ((1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 1)))


@pytest.mark.parametrize(
    "name, betti, gdeg, essential",
    [
        ("boolean2", [1, 1], 1, True),
        ("boolean3", [1, 2, 1], 1, True),
        ("boolean4", [1, 3, 3, 1], 1, True),
        ("braid3", [1, 2, 0], 0, False),
        ("generic4", [1, 3, 3], 3, True),
        ("points6", [1, 5], 5, True),
        ("single1", [1, 0], 0, False),
    ],
)
def test_invariant_report(name, betti, gdeg, essential):
    A = load(name)
    rep = invariant_report(A)
    assert rep.betti_projective == betti
    assert rep.gradient_degree == rep.bn == gdeg
    assert rep.polar_invariant == A.d * gdeg
    assert rep.essential is essential
    assert rep.dominance_matches_essentiality


def test_affine_betti_is_projective_times_one_plus_t():
    assert invariant_report(FOUR_PLANES).betti_affine == [1, 4, 6, 3]
    assert invariant_report(FOUR_PLANES).betti_projective == [1, 3, 3]


@pytest.mark.parametrize(
    "A, chi, chi_h, result",
    [
        (FOUR_PLANES, 1, -2, 3),
        (load("boolean2"), 0, 1, 1),  # the restricted complement in P^0 is a single point
        (load("braid3"), -1, -1, 0),  # P^2 minus three concurrent lines; P^1 minus three points
    ],
)
def test_hyperplane_section_sides(A, chi, chi_h, result):
    sides = hyperplane_section_sides(A, seed=0)
    assert (sides["chi"], sides["chi_restricted"], sides["euler_difference"]) == (chi, chi_h, result)
    assert euler_minus_generic_hyperplane(A, seed=5) == result


@pytest.mark.parametrize("k, e, chi", [(1, 1, 1), (4, 1, 4), (2, 3, 0), (3, 2, 4), (1, 2, 2), (2, 2, 2), (2, 4, -4), (0, 2, 0)])
def test_smooth_hypersurface_euler(k, e, chi):
    assert smooth_hypersurface_euler(k, e) == chi


@pytest.mark.parametrize("name", CORPUS)
def test_stratified_self_test_matches_lattice(name):
    A = load(name)
    assert stratified_self_test(A) == euler_of(build_lattice(A))


def test_euler_with_conic():
    assert euler_complement_with_hypersurface(load("boolean2"), 2) == -2
    assert euler_complement_with_hypersurface(load("boolean3"), 2) == 4


def test_milnor_chain_boolean2():
    r = milnor_chain_report(load("boolean2"), 2)
    assert (r.chi_DfQ, r.chi_F_minus_N, r.predicted_card_Cg, r.c, r.card_CV, r.card_CH, r.polar_line_count) == (
        -2, -4, 4, 2, 4, 2, 2,
    )
    assert all(r.certificates.values())


def test_milnor_chain_boolean3():
    r = milnor_chain_report(load("boolean3"), 2)
    assert (r.chi_DfQ, r.chi_F_minus_N, r.predicted_card_Cg, r.c, r.card_CV, r.card_CH, r.polar_line_count) == (
        4, 8, 8, 1, 12, 12, 4,
    )


@pytest.mark.parametrize("name", CORPUS)
def test_linear_hypersurface_recovers_top_betti(name):
    A = load(name)
    assert milnor_chain_report(A, 1).predicted_card_Cg == invariant_report(A).bn


@settings(max_examples=30, deadline=None)
@given(small_arrangements(ambient=(2, 3, 4)))
def test_linear_hypersurface_property(A):
    assert milnor_chain_report(A, 1).predicted_card_Cg == invariant_report(A).bn
    for e in (2, 3):
        assert all(milnor_chain_report(A, e).certificates.values())


@pytest.mark.parametrize("n", [1, 2, 3])
def test_minimal_cells_of_torus(n):
    A = load(f"boolean{n + 1}")
    mc = minimal_cell_vector(A)
    assert mc.cells == [comb(n, k) for k in range(n + 1)]
    assert mc.relative_top == mc.cells[-1] == 1
    assert mc.alternating_sum == 0


def test_minimal_cells_examples():
    assert minimal_cell_vector(FOUR_PLANES).cells == [1, 3, 3]
    assert minimal_cell_vector(load("braid3")).cells == [1, 2, 0]


def test_full_report_schema():
    rep = full_report(load("braid3"))
    assert set(rep) == {
        "betti_affine", "betti_projective", "euler_projective", "gradient_degree",
        "polar_invariant", "essential", "milnor_chain", "minimal_cells",
    }
    assert rep["essential"] is False and rep["gradient_degree"] == 0
