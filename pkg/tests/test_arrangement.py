from fractions import Fraction

import pytest
from hypothesis import given, settings

from arrtopo.arrangement import (
    ArrangementError,
    CentralArrangement,
    essential_rank,
    from_rows,
    parse_arrangement,
    serialize_arrangement,
)
from conftest import CORPUS, load, small_arrangements


def test_parse_boolean_plane():
    A = parse_arrangement("2 2\n1 0\n0 1\n")
    assert A.d == 2 and A.n == 1
    assert A.forms == ((1, 0), (0, 1))
    assert A.multiplicities == (1, 1)


def test_parse_rationals_comments_and_multiplicities():
    A = parse_arrangement("# header comment\n3 2\n1/2 -3 0 | 4\n0 1 2/3\n")
    assert A.forms[0] == (Fraction(1, 2), -3, 0)
    assert A.forms[1][2] == Fraction(2, 3)
    assert A.multiplicities == (4, 1)


@pytest.mark.parametrize(
    "text, line",
    [
        ("3 2\n1 0 0\n2 0 0\n", 3),  # proportional to line 2
        ("3 1\n0 0 0\n", 2),  # zero form
        ("3 1\n1 0.5 0\n", 2),  # floats are rejected
        ("3 1\n1 0\n", 2),  # wrong width
        ("3 1\n1 0 1 | 0\n", 2),  # multiplicity must be positive
        ("3 2\n1 0 0\n", None),  # too few rows
        ("1 1\n1\n", 1),  # ambient dimension below 2
    ],
)
def test_parse_errors_carry_line_numbers(text, line):
    with pytest.raises(ArrangementError) as exc:
        parse_arrangement(text)
    if line is not None:
        assert exc.value.line == line
        assert f"line {line}" in str(exc.value)


def test_proportional_message_names_both_forms():
    with pytest.raises(ArrangementError, match="forms 1 and 2 are proportional"):
        parse_arrangement("3 2\n1 1 0\n-2 -2 0\n")


def test_float_coefficients_rejected_programmatically():
    with pytest.raises(TypeError):
        CentralArrangement(2, ((1.0, 0), (0, 1)))


@pytest.mark.parametrize("name", CORPUS)
def test_corpus_round_trip(name):
    A = load(name)
    assert parse_arrangement(serialize_arrangement(A)) == A


@settings(max_examples=60, deadline=None)
@given(small_arrangements())
def test_serialize_round_trip(A):
    B = parse_arrangement(serialize_arrangement(A)) if A.ambient_dim >= 2 else A
    assert B == A
    assert B.digest() == A.digest()


def test_essentiality():
    assert essential_rank(load("boolean3")) == (3, True)
    assert essential_rank(load("braid3")) == (2, False)
    assert essential_rank(load("single1")) == (1, False)


def test_without_and_multiplicities():
    A = from_rows([(1, 0, 0), (0, 1, 0), (0, 0, 1)], multiplicities=(2, 3, 4))
    B = A.without(1)
    assert B.forms == ((1, 0, 0), (0, 0, 1))
    assert B.multiplicities == (2, 4)
    assert A.with_multiplicities((1, 1, 1)).multiplicities == (1, 1, 1)
