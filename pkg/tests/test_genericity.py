import warnings
from fractions import Fraction

import pytest

from arrtopo.genericity import (
    AffineChart,
    GenericHypersurface,
    certify_gen1,
    sample_generic_chart,
    sample_generic_hypersurface,
)
from arrtopo.linalg import dot
from conftest import CORPUS, load


def test_chart_for_boolean_plane_avoids_both_axes():
    chart = sample_generic_chart(load("boolean2"), seed=1)
    a, b = chart.chart_form
    assert a != 0 and b != 0


@pytest.mark.parametrize("seed", [0, 1, 2, 17, -4])
def test_chart_for_braid_avoids_the_center_line(seed):
    chart = sample_generic_chart(load("braid3"), seed)
    assert sum(chart.chart_form) != 0


@pytest.mark.parametrize("name", CORPUS)
def test_chart_is_deterministic(name):
    A = load(name)
    assert sample_generic_chart(A, 9) == sample_generic_chart(A, 9)


def test_chart_parametrization_lands_on_chart():
    chart = AffineChart.from_form((2, -1, 3))
    p = chart.point((Fraction(1, 2), Fraction(-3)))
    assert dot(chart.chart_form, p) == 1
    for const, w in chart.pullback([(1, 1, 1)]):
        assert const + sum(w[j] * u for j, u in enumerate((Fraction(1, 2), Fraction(-3)))) == sum(p)


def test_linear_hypersurface_on_boolean_plane():
    f = sample_generic_hypersurface(load("boolean2"), 1, seed=0)
    assert f.gen1_certified
    assert all(c != 0 for c in f.linear_coefficients())


def test_quadric_on_boolean3_is_nonzero_on_axes():
    f = sample_generic_hypersurface(load("boolean3"), 2, seed=0)
    assert f.gen1_certified
    S = f.gram()
    assert all(S[i][i] != 0 for i in range(3))


def test_degenerate_quadric_is_rejected():
    # x0 x1 vanishes on both coordinate axes of the Boolean plane
    f = GenericHypersurface.from_quadric([[0, Fraction(1, 2)], [Fraction(1, 2), 0]])
    assert not certify_gen1(f, load("boolean2"))
    assert certify_gen1(GenericHypersurface.from_quadric([[1, 0], [0, 1]]), load("boolean2"))


def test_cubic_is_returned_uncertified():
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        f = sample_generic_hypersurface(load("boolean3"), 3, seed=0)
    assert not f.gen1_certified and f.warning
    assert caught


def test_gram_round_trip():
    S = [[1, Fraction(3, 2)], [Fraction(3, 2), -2]]
    assert GenericHypersurface.from_quadric(S).gram() == S
