import itertools

import numpy as np
import pytest

from arrtopo.genericity import GenericHypersurface, sample_generic_chart, sample_generic_hypersurface
from arrtopo.invariants import milnor_chain_report
from arrtopo.solver import (
    SolverOptions,
    _root_of_unity_orbit,
    dedupe,
    gradient_fiber_count,
    morse_certify,
    multiplicity_probe,
    solve_critical_chart,
    solve_critical_on_hypersurface,
)
from conftest import load


@pytest.mark.parametrize("name, count", [("boolean3", 1), ("generic4", 3), ("braid3", 0), ("nongeneric4", 2)])
def test_chart_counts(name, count):
    A = load(name)
    S = solve_critical_chart(A, sample_generic_chart(A, 0))
    assert S.stability_certified
    assert S.stable_count == count == len(S.points)


@pytest.mark.parametrize("d", [3, 4, 5, 6])
def test_binary_forms_have_d_minus_one_critical_points(d):
    assert gradient_fiber_count(load(f"points{d}"), seed=2) == d - 1


@pytest.mark.parametrize("n", [1, 2, 3])
def test_boolean_gradient_degree_one(n):
    assert gradient_fiber_count(load(f"boolean{n + 1}")) == 1


def test_residual_contract_and_morse_on_chart():
    A = load("generic4")
    opts = SolverOptions()
    S = solve_critical_chart(A, sample_generic_chart(A, 1), opts)
    assert all(r <= opts.residual_tol for r in S.residual_norms)
    verdict = morse_certify(S, opts.morse_tol)
    assert verdict.ok and verdict.offending is None


def test_morse_certify_reports_offender():
    A = load("boolean3")
    S = solve_critical_chart(A, sample_generic_chart(A, 0))
    S.hessian_min_singular[0] = 1e-12
    assert morse_certify(S, 1e-8) == morse_certify(S, 1e-8)
    assert morse_certify(S, 1e-8).offending == 0


def test_nonunit_multiplicities_keep_the_count():
    A = load("generic4")
    chart = sample_generic_chart(A, 0)
    assert solve_critical_chart(A, chart, multiplicities=(2, 1, 1, 3)).stable_count == 3


@pytest.mark.parametrize("name, count", [("boolean3", 1), ("generic4", 3), ("braid3", 0)])
def test_multiplicity_probe(name, count):
    v = multiplicity_probe(load(name), trials=3, seed=4)
    assert v.status == "pass"
    assert v.baseline == count and set(v.counts) <= {count}
    assert all(1 <= m <= 5 for ms in v.multiplicities for m in ms)


def test_conic_on_boolean_plane():
    A = load("boolean2")
    f = GenericHypersurface.from_quadric([[1, 0], [0, 1]], gen1_certified=True)
    S = solve_critical_on_hypersurface(A, f)
    assert S.stability_certified and S.stable_count == 4
    for p in S.points:
        assert np.allclose(p**2, [0.5, 0.5], atol=1e-10)


def test_sphere_solutions_are_permutation_symmetric():
    A = load("boolean3")
    f = GenericHypersurface.from_quadric(np.eye(3, dtype=int).tolist(), gen1_certified=True)
    S = solve_critical_on_hypersurface(A, f)
    assert S.stable_count == 8
    pts = np.array(S.points)
    assert np.allclose(pts**2, 1 / 3, atol=1e-10)
    for perm in itertools.permutations(range(3)):
        moved = pts[:, perm]
        for q in moved:
            assert np.min(np.linalg.norm(pts - q, axis=1)) < 1e-6


@pytest.mark.parametrize("name", ["boolean3", "generic3", "braid3", "points4"])
def test_milnor_fiber_count_matches_prediction(name):
    A = load(name)
    S = solve_critical_on_hypersurface(A, sample_generic_hypersurface(A, 2, 0))
    assert S.stability_certified
    assert S.stable_count == milnor_chain_report(A, 2).predicted_card_Cg
    assert morse_certify(S).ok


@pytest.mark.parametrize("name", ["boolean3", "generic4", "points5"])
def test_linear_hypersurface_matches_chart(name):
    A = load(name)
    f = sample_generic_hypersurface(A, 1, 0)
    S = solve_critical_on_hypersurface(A, f)
    chart = solve_critical_chart(A, sample_generic_chart(A, 0))
    assert S.stable_count == chart.stable_count


def test_cubic_is_refused():
    A = load("boolean3")
    with pytest.warns(UserWarning):
        f = sample_generic_hypersurface(A, 3, 0)
    with pytest.raises(ValueError):
        solve_critical_on_hypersurface(A, f)


def test_dedupe_is_order_independent():
    rng = np.random.default_rng(0)
    base = rng.standard_normal((6, 2)) + 1j * rng.standard_normal((6, 2))
    noisy = np.vstack([base, base + 1e-9])
    a = [noisy[i] for i in dedupe(list(noisy), 1e-6)]
    perm = rng.permutation(len(noisy))
    b = [noisy[perm][i] for i in dedupe(list(noisy[perm]), 1e-6)]
    assert len(a) == 6
    assert np.allclose(np.array(a), np.array(b), atol=1e-8)


def test_root_of_unity_orbit():
    z = np.array([1 + 1j, 2.0, 3.0])
    orbit = _root_of_unity_orbit(z, 2)
    assert np.allclose(orbit[1][:2], -z[:2]) and orbit[1][2] == z[2]


def test_options_validation():
    with pytest.raises(ValueError):
        SolverOptions(residual_tol=1e-5, dedupe_tol=1e-6)
    with pytest.raises(ValueError):
        SolverOptions(stability_rounds=1)
    with pytest.raises(ValueError):
        SolverOptions(seeds=(0, 1), stability_rounds=3)


def test_point_dump_is_decimal_strings():
    A = load("boolean3")
    rows = solve_critical_chart(A, sample_generic_chart(A, 0)).to_json()
    assert len(rows) == 1
    re, im = rows[0]["coordinates"][0]
    assert isinstance(re, str) and float(im) == pytest.approx(0.0, abs=1e-12)
