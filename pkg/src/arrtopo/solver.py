"""Numeric critical points of master functions, by seeded multistart Newton.

Two systems are solved, both written through the logarithmic derivative
sum_i m_i a_i / l_i(x), which has the same zeros as dQ_m off the arrangement:

* on an affine chart {l = 1}: the tangential part of the log-gradient vanishes;
* on a Milnor fiber {f = 1}: the log-gradient is parallel to grad f (Lagrange).

Counts are reported as exact only when several disjoint seed sets agree.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from arrtopo import _kernels
from arrtopo.arrangement import CentralArrangement, essential_rank
from arrtopo.genericity import AffineChart, GenericHypersurface, monomials, sample_generic_chart
from arrtopo.oracles import enumerate_regions

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolverOptions:
    max_starts: int = 200
    newton_max_iter: int = 80
    residual_tol: float = 1e-12
    dedupe_tol: float = 1e-6
    seeds: tuple[int, ...] = (0, 1, 2)
    stability_rounds: int = 3
    morse_tol: float = 1e-8
    # monodromy completion on the Milnor fiber: stop after this many loops add nothing
    monodromy_stall: int = 25
    monodromy_max_loops: int = 400

    def __post_init__(self):
        if not self.residual_tol < self.dedupe_tol:
            raise ValueError("residual_tol must be smaller than dedupe_tol")
        if self.stability_rounds < 2:
            raise ValueError("stability_rounds must be at least 2")
        if len(self.seeds) < self.stability_rounds:
            raise ValueError("need one seed per stability round")


@dataclass
class CriticalPointSet:
    points: list[np.ndarray]
    residual_norms: list[float]
    hessian_min_singular: list[float]
    stable_count: int
    stability_certified: bool
    round_counts: list[int] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    # the numeric restricted second-derivative matrices, kept for morse_certify
    hessians: list[np.ndarray] = field(default_factory=list, repr=False)

    def to_json(self) -> list[dict]:
        return [
            {
                "coordinates": [[repr(float(z.real)), repr(float(z.imag))] for z in p],
                "residual": repr(float(r)),
                "hessian_min_singular": repr(float(h)),
            }
            for p, r, h in zip(self.points, self.residual_norms, self.hessian_min_singular)
        ]


def _unit_forms(A: CentralArrangement) -> np.ndarray:
    a = np.array([[float(c) for c in f] for f in A.forms])
    return a / np.linalg.norm(a, axis=1, keepdims=True)


def dedupe(points: Sequence[np.ndarray], tol: float) -> list[int]:
    """Indices of representatives, merging points closer than tol * max(1, |x|).

    The scan order is lexicographic on rounded coordinates, so the result does
    not depend on the order in which Newton runs finished.
    """
    if not points:
        return []
    decimals = max(0, int(-np.log10(tol)) - 1)

    def key(i):
        p = points[i]
        return tuple(v for z in np.round(p, decimals) for v in (z.real, z.imag))

    order = sorted(range(len(points)), key=key)
    kept: list[int] = []
    for i in order:
        p = points[i]
        scale = max(1.0, float(np.linalg.norm(p)))
        if all(np.linalg.norm(p - points[j]) > tol * scale for j in kept):
            kept.append(i)
    return sorted(kept, key=key)


def _far_from_arrangement(a: np.ndarray, x: np.ndarray, tol: float) -> bool:
    return float(np.min(np.abs(a @ x))) > tol * max(1.0, float(np.linalg.norm(x)))


def _merge_rounds(rounds: list[list[np.ndarray]], tol: float):
    counts = [len(r) for r in rounds]
    pool = [p for r in rounds for p in r]
    keep = dedupe(pool, tol)
    union = [pool[i] for i in keep]
    certified = len(set(counts)) == 1 and counts[0] == len(union)
    return union, counts, certified


# ------------------------------------------------------------------ chart system


class _NumericChart:
    """Orthonormal float coordinates on the chart, rescaled to {l_hat . x = 1}, |l_hat| = 1."""

    def __init__(self, A: CentralArrangement, chart: AffineChart):
        c = np.array([float(v) for v in chart.chart_form])
        self.norm_c = float(np.linalg.norm(c))
        self.c_hat = c / self.norm_c
        self.p0 = self.c_hat.copy()
        _, _, vh = np.linalg.svd(self.c_hat[None, :])
        self.V = vh[1:].T  # columns: orthonormal basis of ker(l)
        self.a = _unit_forms(A)
        self.W = self.a @ self.V
        self.c0 = self.a @ self.p0

    def to_u(self, x_exact) -> np.ndarray:
        x = np.array([float(v) for v in x_exact]) * self.norm_c
        return self.V.T @ (x - self.p0)

    def to_x(self, u: np.ndarray) -> np.ndarray:
        """Point on the original chart {l = 1}."""
        return (self.p0 + self.V @ u) / self.norm_c


def _ascend_in_chamber(W, c0, m, u, iters=100, tol=1e-14):
    """Damped Newton ascent of sum m_i log|l_i| inside the real chamber containing u."""
    sgn = np.sign(c0 + W @ u)

    def phi(v):
        ell = c0 + W @ v
        if np.any(np.sign(ell) != sgn):
            return -np.inf
        return float(np.sum(m * np.log(np.abs(ell))))

    val = phi(u)
    for _ in range(iters):
        ell = c0 + W @ u
        g = W.T @ (m / ell)
        if np.linalg.norm(g) <= tol * np.sum(m * np.linalg.norm(W, axis=1) / np.abs(ell)):
            break
        H = -(W.T * (m / ell**2)) @ W
        try:
            step = -np.linalg.solve(H, g)
        except np.linalg.LinAlgError:
            break
        t = 1.0
        while t > 1e-12:
            cand = u + t * step
            new = phi(cand)
            if new > val or (new >= val and t == 1.0):
                break
            t /= 2
        if t <= 1e-12:
            break
        u, val = cand, new
    return u


def _chart_hessian(W, c0, m, u):
    ell = c0 + W @ u
    return -(W.T * (m / ell**2)) @ W


def solve_critical_chart(
    A: CentralArrangement,
    chart: AffineChart,
    opts: SolverOptions = SolverOptions(),
    multiplicities: Optional[Sequence[int]] = None,
) -> CriticalPointSet:
    """Critical points of prod l_i^m_i on the chart {l = 1}, off the arrangement."""
    m = np.array(multiplicities if multiplicities is not None else A.multiplicities, dtype=float)
    nc = _NumericChart(A, chart)
    n = nc.V.shape[1]
    notes = []

    census = enumerate_regions(A, chart=chart)
    real_starts = []
    for p in census.bounded_interior_points():
        u = _ascend_in_chamber(nc.W, nc.c0, m, nc.to_u(chart.point(p)))
        real_starts.append(u)
    real_starts = np.array(real_starts, dtype=np.complex128).reshape(-1, n)

    rounds = []
    n_singular = 0
    for seed in opts.seeds[: opts.stability_rounds]:
        rng = np.random.default_rng([seed, 7])
        rand = rng.standard_normal((opts.max_starts, n)) + 1j * rng.standard_normal((opts.max_starts, n))
        U0 = np.vstack([real_starts, rand])
        U, status, resid = _kernels.newton_chart(
            nc.W, nc.c0, m, U0, opts.newton_max_iter, opts.residual_tol
        )
        n_singular += int(np.sum(status == _kernels.SINGULAR))
        found = []
        for u, st, r in zip(U, status, resid):
            if st != _kernels.CONVERGED:
                continue
            x = nc.p0 + nc.V @ u
            if _far_from_arrangement(nc.a, x, opts.dedupe_tol):
                found.append(u)
        rounds.append([found[i] for i in dedupe(found, opts.dedupe_tol)])

    union, counts, certified = _merge_rounds(rounds, opts.dedupe_tol)
    if n_singular:
        notes.append(f"{n_singular} Newton paths hit a singular Jacobian")
    if not essential_rank(A)[1]:
        notes.append("non-essential arrangement: no isolated critical points expected")
    if not certified:
        log.warning("chart critical count unstable across seed sets: %s", counts)

    points, res, hmin, hess = [], [], [], []
    for u in union:
        U, status, resid = _kernels.newton_chart(nc.W, nc.c0, m, u[None, :], 3, opts.residual_tol)
        H = _chart_hessian(nc.W, nc.c0, m, U[0])
        points.append(nc.to_x(U[0]))
        res.append(float(resid[0]))
        hess.append(H)
        hmin.append(float(np.linalg.svd(H, compute_uv=False).min()) if n else np.inf)
    stable = len(union) if certified else max(counts, default=0)
    return CriticalPointSet(points, res, hmin, stable, certified, counts, notes, hess)


def gradient_fiber_points(
    A: CentralArrangement, seed: int = 0, opts: SolverOptions = SolverOptions()
) -> CriticalPointSet:
    """Points of the gradient fiber over a generic direction y, one per polar line."""
    chart = sample_generic_chart(A, seed)
    return solve_critical_chart(A, chart, opts, multiplicities=[1] * A.d)


def gradient_fiber_count(A: CentralArrangement, seed: int = 0, opts: SolverOptions = SolverOptions()) -> int:
    """Numeric degree of grad(Q): #grad(Q)^-1(y) for a seeded generic y."""
    return gradient_fiber_points(A, seed, opts).stable_count


# ------------------------------------------------------------- Milnor fiber system


def _full_support(f: GenericHypersurface) -> tuple[np.ndarray, np.ndarray]:
    """Exponents of every degree-e monomial and f's coefficients on them (zeros allowed)."""
    mons = monomials(f.nvars, f.degree)
    coef = dict(f.terms)
    E = np.array(mons, dtype=np.int64)
    cf = np.array([float(coef.get(mon, 0)) for mon in mons])
    return E, cf


def _root_of_unity_orbit(z: np.ndarray, e: int) -> list[np.ndarray]:
    """(zeta x, lam) for zeta^e = 1; the Lagrange system is invariant under this action."""
    out = []
    for j in range(e):
        w = z.copy()
        w[:-1] *= np.exp(2j * np.pi * j / e)
        out.append(w)
    return out


def _monodromy_complete(a, m, E, cf, seeds_z, rng, opts, keep):
    """Grow a solution list by transporting it around random loops in coefficient space.

    Every loop base -> f1 -> f2 -> base returns solutions of the base system,
    possibly permuted; new ones are added. Stops after `monodromy_stall`
    consecutive loops without a new solution.
    """
    k = a.shape[1]
    e = int(E[0].sum())
    sols: list[np.ndarray] = []

    def add(z) -> int:
        added = 0
        for w in _root_of_unity_orbit(z, e):
            scale = max(1.0, float(np.linalg.norm(w)))
            if all(np.linalg.norm(w - v) > opts.dedupe_tol * scale for v in sols):
                sols.append(w)
                added += 1
        return added

    for z in seeds_z:
        add(z)
    stall = 0
    for _ in range(opts.monodromy_max_loops):
        if stall >= opts.monodromy_stall or not sols:
            break
        f1 = rng.standard_normal(len(cf)) + 1j * rng.standard_normal(len(cf))
        f2 = rng.standard_normal(len(cf)) + 1j * rng.standard_normal(len(cf))
        f1 /= np.linalg.norm(f1)
        f2 /= np.linalg.norm(f2)
        Z = np.array(sols)
        for src, dst in ((cf, f1), (f1, f2), (f2, cf)):
            Z, ok = _kernels.track_lagrange(a, m, E, src, dst, Z)
            Z = Z[ok]
            if not len(Z):
                break
        if not len(Z):
            stall += 1
            continue
        Z, status, _ = _kernels.newton_lagrange(a, m, E, cf, Z, opts.newton_max_iter, opts.residual_tol)
        added = 0
        for z, st in zip(Z, status):
            if st == _kernels.CONVERGED and keep(z[:k]):
                added += add(z)
        stall = 0 if added else stall + 1
    return sols


def solve_critical_on_hypersurface(
    A: CentralArrangement,
    f: GenericHypersurface,
    opts: SolverOptions = SolverOptions(),
    multiplicities: Optional[Sequence[int]] = None,
) -> CriticalPointSet:
    """Solutions of sum m_i a_i/l_i(x) = lam grad f(x), f(x) = 1, away from the arrangement.

    Each seed round runs multistart Newton from random points of {f = 1} and
    then completes the list by monodromy loops; rounds are compared for the
    stability certificate.
    """
    if f.degree > 2:
        raise ValueError("numeric Milnor-fiber solving supports degree 1 and 2 only")
    if not f.gen1_certified:
        log.warning("hypersurface is not GEN1-certified; counts may be degenerate")
    m = np.array(multiplicities if multiplicities is not None else A.multiplicities, dtype=float)
    e = f.degree
    E, cf = _full_support(f)
    s = float(np.linalg.norm(cf))
    cf_hat = cf / s  # f_hat = f / s; x = x_hat * s^(-1/e)
    back = s ** (-1.0 / e)
    a = _unit_forms(A)
    k = A.ambient_dim
    lam0 = m.sum() / e  # forced by Euler's relation on {f = 1}

    def keep(x):
        return _far_from_arrangement(a, x, opts.dedupe_tol)

    def fval(X):
        return (np.prod(X[:, None, :] ** E[None, :, :], axis=2) * cf_hat[None, :]).sum(axis=1)

    rounds = []
    n_singular = 0
    for seed in opts.seeds[: opts.stability_rounds]:
        rng = np.random.default_rng([seed, 11])
        X = rng.standard_normal((opts.max_starts, k)) + 1j * rng.standard_normal((opts.max_starts, k))
        with np.errstate(all="ignore"):
            X = X / fval(X)[:, None] ** (1.0 / e)
        Z0 = np.hstack([X, np.full((opts.max_starts, 1), lam0, dtype=np.complex128)])
        Z0 = Z0[np.all(np.isfinite(Z0), axis=1)]
        Z, status, resid = _kernels.newton_lagrange(
            a, m, E, cf_hat, Z0, opts.newton_max_iter, opts.residual_tol
        )
        n_singular += int(np.sum(status == _kernels.SINGULAR))
        found = [z for z, st in zip(Z, status) if st == _kernels.CONVERGED and keep(z[:k])]
        found = [found[i] for i in dedupe(found, opts.dedupe_tol)]
        if opts.monodromy_stall > 0:
            found = _monodromy_complete(a, m, E, cf_hat, found, rng, opts, keep)
        xs = [z[:k] for z in found]
        rounds.append([xs[i] for i in dedupe(xs, opts.dedupe_tol)])

    union, counts, certified = _merge_rounds(rounds, opts.dedupe_tol)
    notes = [f"{n_singular} Newton paths hit a singular Jacobian"] if n_singular else []
    if not certified:
        log.warning("Milnor-fiber critical count unstable across seed sets: %s", counts)

    points, res, hmin, hess = [], [], [], []
    for x in union:
        z0 = np.concatenate([x, [lam0]])[None, :]
        Z, _, resid = _kernels.newton_lagrange(a, m, E, cf_hat, z0, 3, opts.residual_tol)
        xs, lam = Z[0, :k], Z[0, k]
        H = _lagrangian_hessian(a, m, E, cf_hat, xs, lam)
        points.append(xs * back)
        res.append(float(resid[0]))
        hess.append(H)
        hmin.append(float(np.linalg.svd(H, compute_uv=False).min()) if H.size else np.inf)
    stable = len(union) if certified else max(counts, default=0)
    return CriticalPointSet(points, res, hmin, stable, certified, counts, notes, hess)


def _lagrangian_hessian(a, m, E, cf, x, lam) -> np.ndarray:
    """Second derivative of log Q_m - lam f restricted to the tangent space of {f = 1}."""
    _, grad, hess_f = _kernels._poly_derivs_numpy(E, cf.astype(np.complex128), x[None, :])
    ell = a @ x
    H = -(a.T * (m / ell**2)) @ a - lam * hess_f[0]
    g = grad[0]
    _, _, vh = np.linalg.svd(g[None, :])
    B = vh[1:].conj().T  # columns with g . b = 0 (bilinear)
    return B.T @ H @ B


# ----------------------------------------------------------------- certificates


@dataclass(frozen=True)
class MorseVerdict:
    ok: bool
    offending: Optional[int] = None
    min_singular: float = float("inf")


def morse_certify(S: CriticalPointSet, tol: float = 1e-8) -> MorseVerdict:
    """Every found point has a restricted Hessian with smallest singular value > tol."""
    worst = min(S.hessian_min_singular, default=float("inf"))
    for i, h in enumerate(S.hessian_min_singular):
        if not h > tol:
            return MorseVerdict(False, i, worst)
    return MorseVerdict(True, None, worst)


@dataclass(frozen=True)
class ProbeVerdict:
    status: str  # "pass", "fail" or "inconclusive"
    baseline: int
    counts: tuple[int, ...]
    multiplicities: tuple[tuple[int, ...], ...]


def multiplicity_probe(
    A: CentralArrangement,
    trials: int = 5,
    seed: int = 0,
    opts: SolverOptions = SolverOptions(),
    chart_seed: Optional[int] = None,
) -> ProbeVerdict:
    """Chart critical counts for random multiplicity vectors in {1..5}^d against m = 1."""
    chart = sample_generic_chart(A, seed if chart_seed is None else chart_seed)
    base = solve_critical_chart(A, chart, opts, multiplicities=[1] * A.d)
    rng = np.random.default_rng([seed, 8])
    ms, counts, stable = [], [], base.stability_certified
    for _ in range(trials):
        mv = tuple(int(v) for v in rng.integers(1, 6, size=A.d))
        S = solve_critical_chart(A, chart, opts, multiplicities=mv)
        ms.append(mv)
        counts.append(S.stable_count)
        stable &= S.stability_certified
    if not stable:
        status = "inconclusive"
    elif all(c == base.stable_count for c in counts):
        status = "pass"
    else:
        status = "fail"
    return ProbeVerdict(status, base.stable_count, tuple(counts), tuple(ms))
