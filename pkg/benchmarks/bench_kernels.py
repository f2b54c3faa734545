"""Time the numba kernels against the pure-numpy fallback on corpus inputs.

    python benchmarks/bench_kernels.py [--repeat 3] [--starts 400]

Each kernel is run once untimed per backend (to exclude numba compilation),
then timed `--repeat` times; the best time is reported. Results from the two
backends are compared so a speedup never hides a disagreement.
"""

from __future__ import annotations

import argparse
import time
from importlib import resources

import numpy as np

from arrtopo import _kernels
from arrtopo.arrangement import parse_arrangement
from arrtopo.genericity import sample_generic_chart, sample_generic_hypersurface
from arrtopo.oracles import _reduce_mod
from arrtopo.solver import _NumericChart, _full_support, _unit_forms


def load(name):
    text = resources.files("arrtopo").joinpath("corpus", name).read_text()
    return parse_arrangement(text)


def best_of(fn, repeat):
    fn()  # warm-up, compiles numba
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def cases(starts):
    rng = np.random.default_rng(0)

    A = load("generic6.arr")
    coeffs = _reduce_mod(A, 31)
    yield "count F_31^3, 6 planes", lambda nb: _kernels.count_nonvanishing(coeffs, 31, use_numba=nb)

    nc = _NumericChart(A, sample_generic_chart(A, 0))
    m = np.ones(A.d)
    U0 = rng.standard_normal((starts, 2)) + 1j * rng.standard_normal((starts, 2))
    yield f"newton chart, {starts} starts", lambda nb: _kernels.newton_chart(
        nc.W, nc.c0, m, U0, 80, 1e-12, use_numba=nb
    )

    B = load("generic4.arr")
    f = sample_generic_hypersurface(B, 2, 0)
    E, cf = _full_support(f)
    cf = cf / np.linalg.norm(cf)
    a = _unit_forms(B)
    mb = np.ones(B.d)
    X = rng.standard_normal((starts, 3)) + 1j * rng.standard_normal((starts, 3))
    Z0 = np.hstack([X, np.full((starts, 1), mb.sum() / 2, dtype=complex)])
    yield f"newton lagrange, {starts} starts", lambda nb: _kernels.newton_lagrange(
        a, mb, E, cf, Z0, 80, 1e-12, use_numba=nb
    )

    Z, status, _ = _kernels.newton_lagrange(a, mb, E, cf, Z0, 80, 1e-12)
    sols = Z[status == _kernels.CONVERGED][:20]
    target = rng.standard_normal(len(cf)) + 1j * rng.standard_normal(len(cf))
    target /= np.linalg.norm(target)
    yield f"track {len(sols)} paths", lambda nb: _kernels.track_lagrange(
        a, mb, E, cf, target, sols, use_numba=nb
    )


def agree(x, y) -> bool:
    """Same statuses, and the same points wherever a path converged or finished."""
    if not isinstance(x, tuple):
        return bool(np.array_equal(x, y))
    # Newton returns (points, status, residual); tracking returns (points, ok)
    keep = x[1] == _kernels.CONVERGED if len(x) == 3 else x[1]
    return np.array_equal(x[1], y[1]) and bool(np.allclose(x[0][keep], y[0][keep], atol=1e-8))


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--starts", type=int, default=400)
    args = parser.parse_args(argv)

    if not _kernels.HAVE_NUMBA:
        print("numba is not installed; only the numpy backend can be timed")
    print(f"{'kernel':<32} {'numpy s':>10} {'numba s':>10} {'speedup':>8}  agree")
    for name, fn in cases(args.starts):
        t_np, out_np = best_of(lambda: fn(False), args.repeat)
        if _kernels.HAVE_NUMBA:
            t_nb, out_nb = best_of(lambda: fn(True), args.repeat)
            print(f"{name:<32} {t_np:>10.4f} {t_nb:>10.4f} {t_np / t_nb:>7.1f}x  {agree(out_np, out_nb)}")
        else:
            print(f"{name:<32} {t_np:>10.4f} {'-':>10} {'-':>8}  -")


if __name__ == "__main__":
    main()
