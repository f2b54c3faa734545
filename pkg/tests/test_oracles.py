from fractions import Fraction

import pytest

from arrtopo.lattice import IntegerPolynomial, build_lattice, characteristic_polynomial
from arrtopo.oracles import (
    OracleError,
    affine_char_poly,
    count_points_mod_q,
    enumerate_regions,
    interpolate_char_poly,
    is_prime,
    zaslavsky_check,
)
from arrtopo.simplex import INFEASIBLE, OPTIMAL, UNBOUNDED, lp_maximize
from conftest import load


@pytest.mark.parametrize("name, q, count", [("boolean2", 5, 16), ("braid3", 5, 60), ("generic4", 7, None)])
def test_point_counts(name, q, count):
    A = load(name)
    res = count_points_mod_q(A, q)
    assert res.good_prime and res.match
    if count is not None:
        assert res.raw_count == count


def test_point_count_four_planes_by_hand():
    from arrtopo.arrangement import CentralArrangement

    A = CentralArrangement(3, ((1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 1)))
    assert count_points_mod_q(A, 7).raw_count == 343 - 196 + 42 - 3


def test_point_count_rejects_composites_and_budget():
    with pytest.raises(OracleError):
        count_points_mod_q(load("boolean2"), 9)
    with pytest.raises(OracleError):
        count_points_mod_q(load("boolean4"), 101, budget=10**6)


def test_bad_prime_is_flagged():
    # x0 + 2 x1 and x0 - 3 x1 coincide modulo 5
    from arrtopo.arrangement import CentralArrangement

    A = CentralArrangement(2, ((1, 2), (1, -3)))
    assert not count_points_mod_q(A, 5).good_prime
    assert count_points_mod_q(A, 7).match


def test_interpolation():
    assert interpolate_char_poly(load("boolean2"), [5, 7, 11]) == IntegerPolynomial((1, -2, 1))
    assert str(interpolate_char_poly(load("braid3"), [5, 7, 11, 13])) == "t^3 - 3t^2 + 2t"
    with pytest.raises(OracleError):
        interpolate_char_poly(load("boolean2"), [5, 6, 7])


@pytest.mark.parametrize("name", ["points3", "generic5", "nongeneric4", "boolean4"])
def test_interpolation_reproduces_moebius_route(name):
    A = load(name)
    assert interpolate_char_poly(A) == characteristic_polynomial(build_lattice(A))


@pytest.mark.parametrize("name, total, bounded", [("boolean3", 7, 1), ("generic4", 11, 3), ("braid3", 6, 0)])
@pytest.mark.parametrize("seed", [0, 3])
def test_region_counts(name, total, bounded, seed):
    census = enumerate_regions(load(name), seed)
    assert (census.total_regions, census.bounded_regions) == (total, bounded)
    assert len(set(census.sign_vectors)) == total


def test_interior_points_have_their_signs():
    census = enumerate_regions(load("generic4"), 0)
    aff = census.chart.pullback(load("generic4").forms)
    for sig, p in zip(census.sign_vectors, census.interior_points):
        for (c, w), s in zip(aff, sig):
            assert s * (c + sum(wi * ui for wi, ui in zip(w, p))) > 0


@pytest.mark.parametrize("name, chi_aff", [("boolean3", (3, -3, 1)), ("braid3", (2, -3, 1))])
def test_affine_characteristic_polynomial(name, chi_aff):
    A = load(name)
    chart = enumerate_regions(A, 0).chart
    assert affine_char_poly(A, chart) == IntegerPolynomial(chi_aff)


def test_zaslavsky_generic4():
    A = load("generic4")
    v = zaslavsky_check(A, enumerate_regions(A, 0))
    assert v.affine_char_poly == IntegerPolynomial((6, -4, 1))
    assert v.match and v.predicted_regions == 11 and v.predicted_bounded == 3


def test_is_prime():
    assert [q for q in range(20) if is_prime(q)] == [2, 3, 5, 7, 11, 13, 17, 19]


# ------------------------------------------------------------------- simplex


def test_lp_textbook_optimum():
    # max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), value 36
    res = lp_maximize([3, 5], [[1, 0], [0, 2], [3, 2]], [4, 12, 18])
    assert res.status == OPTIMAL
    assert res.x == [2, 6] and res.value == 36


def test_lp_negative_rhs_needs_phase_one():
    # max -x - y with x + y >= 2 (written -x - y <= -2), x <= 5
    res = lp_maximize([-1, -1], [[-1, -1], [1, 0]], [-2, 5])
    assert res.status == OPTIMAL and res.value == -2


def test_lp_infeasible_and_unbounded():
    assert lp_maximize([1], [[1], [-1]], [1, -2]).status == INFEASIBLE
    assert lp_maximize([1, 0], [[-1, 1]], [0]).status == UNBOUNDED


def test_lp_exact_fractions():
    res = lp_maximize([1], [[3]], [1])
    assert res.x == [Fraction(1, 3)]


def test_interpolation_extends_past_bad_primes():
    A = load("generic6")  # several minors are divisible by 5, 7 or 11
    with pytest.raises(OracleError):
        interpolate_char_poly(A)
    assert interpolate_char_poly(A, extend=True) == characteristic_polynomial(build_lattice(A))
