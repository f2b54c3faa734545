"""Hot loops: finite-field enumeration and multistart Newton.

Each kernel has two implementations. The numba path compiles per-item loops
with @njit; the numpy path vectorizes over the whole batch (all points of a
chunk, all Newton starts). Set ARR_NO_NUMBA=1 to force the numpy path.
"""

from __future__ import annotations

import os

import numpy as np

CONVERGED, MAXITER, SINGULAR, DIVERGED = 0, 1, 2, 3

_DIVERGE_NORM = 1e8
_PIVOT_EPS = 1e-300
_POLISH_STEPS = 2

try:
    if os.environ.get("ARR_NO_NUMBA", "").strip() not in ("", "0"):
        raise ImportError("numba disabled by ARR_NO_NUMBA")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False


def backend() -> str:
    return "numba" if HAVE_NUMBA else "numpy"


# ---------------------------------------------------------------- numpy path


def _count_numpy(coeffs, q, chart, use_chart, chunk=1 << 16):
    k = coeffs.shape[1]
    total = q**k
    powers = q ** np.arange(k, dtype=np.int64)
    count = 0
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        digits = (idx[:, None] // powers[None, :]) % q
        vals = (digits @ coeffs.T) % q
        ok = np.all(vals != 0, axis=1)
        if use_chart:
            ok &= (digits @ chart) % q == 1
        count += int(ok.sum())
    return count


def _batched_solve(J, b):
    """Gaussian elimination with partial pivoting over a batch; flags singular items."""
    J = J.copy()
    b = b.copy()
    s, n = b.shape
    rows = np.arange(s)
    singular = np.zeros(s, dtype=bool)
    for c in range(n):
        piv = c + np.argmax(np.abs(J[:, c:, c]), axis=1)
        Jc, Jp = J[rows, c].copy(), J[rows, piv].copy()
        J[rows, c], J[rows, piv] = Jp, Jc
        bc, bp = b[rows, c].copy(), b[rows, piv].copy()
        b[rows, c], b[rows, piv] = bp, bc
        p = J[:, c, c]
        bad = np.abs(p) < _PIVOT_EPS
        singular |= bad
        p = np.where(bad, 1.0, p)
        for r in range(c + 1, n):
            f = J[:, r, c] / p
            J[:, r, :] -= f[:, None] * J[:, c, :]
            b[:, r] -= f * b[:, c]
    x = np.zeros_like(b)
    for r in range(n - 1, -1, -1):
        acc = b[:, r] - np.sum(J[:, r, r + 1:] * x[:, r + 1:], axis=1)
        d = J[:, r, r]
        x[:, r] = acc / np.where(np.abs(d) < _PIVOT_EPS, 1.0, d)
    return x, singular


def _chart_eval_numpy(W, c, m, U):
    ell = c[None, :] + U @ W.T
    inv = m[None, :] / ell
    G = inv @ W
    J = -np.einsum("si,ij,ik->sjk", inv / ell, W, W)
    scale = (np.abs(inv) * np.linalg.norm(W, axis=1)[None, :]).sum(axis=1)
    return ell, G, J, scale


def _newton_numpy(evaluate, Z0, max_iter, tol):
    Z = Z0.astype(np.complex128).copy()
    s = Z.shape[0]
    status = np.full(s, MAXITER, dtype=np.int64)
    resid = np.full(s, np.inf)
    active = np.ones(s, dtype=bool)
    polish = np.zeros(s, dtype=np.int64)
    for _ in range(max_iter + _POLISH_STEPS):
        if not active.any():
            break
        ids = np.nonzero(active)[0]
        with np.errstate(all="ignore"):
            G, J, scale, hit = evaluate(Z[ids])
            r = np.linalg.norm(G, axis=1) / np.maximum(scale, 1.0)
        resid[ids] = r
        bad = hit | ~np.isfinite(r) | (np.linalg.norm(Z[ids], axis=1) > _DIVERGE_NORM)
        status[ids[bad]] = DIVERGED
        active[ids[bad]] = False
        conv = (r <= tol) & ~bad
        polish[ids[conv]] += 1
        done = conv & (polish[ids] > _POLISH_STEPS)
        status[ids[done]] = CONVERGED
        active[ids[done]] = False
        step = ~bad & ~done
        if not step.any():
            continue
        sid = ids[step]
        with np.errstate(all="ignore"):
            dz, sing = _batched_solve(J[step], -G[step])
        status[sid[sing]] = SINGULAR
        active[sid[sing]] = False
        Z[sid[~sing]] += dz[~sing]
    # starts still polishing at the budget end count as converged if the residual held
    late = active & (resid <= tol)
    status[late] = CONVERGED
    return Z, status, resid


def _newton_chart_numpy(W, c, m, U0, max_iter, tol):
    def evaluate(U):
        ell, G, J, scale = _chart_eval_numpy(W, c, m, U)
        return G, J, scale, np.any(ell == 0, axis=1)

    return _newton_numpy(evaluate, U0, max_iter, tol)


def _poly_derivs_numpy(E, cf, X):
    """f, grad f, Hess f for f = sum_t cf_t x^E_t, evaluated over a batch X (s, k).

    cf is either one coefficient vector (t,) or one row per batch item (s, t).
    Derivatives are taken on exponents: d/dx_j x^E = E_j x^(E - e_j), with the
    multiplier vanishing whenever the shifted exponent would be negative.
    """
    cf = cf if cf.ndim == 2 else cf[None, :]
    k = X.shape[1]
    eye = np.eye(k, dtype=np.int64)
    c1 = E.astype(np.float64)                                        # (t, j)
    E1 = np.maximum(E[:, None, :] - eye[None, :, :], 0)              # (t, j, k)
    c2 = c1[:, :, None] * (E[:, None, :] - eye[None, :, :])          # (t, j, l)
    E2 = np.maximum(E[:, None, None, :] - eye[None, :, None, :] - eye[None, None, :, :], 0)
    f = (cf * np.prod(X[:, None, :] ** E[None], axis=2)).sum(axis=1)
    mon1 = np.prod(X[:, None, None, :] ** E1[None], axis=3)          # (s, t, j)
    grad = (cf[:, :, None] * c1[None] * mon1).sum(axis=1)
    mon2 = np.prod(X[:, None, None, None, :] ** E2[None], axis=4)    # (s, t, j, l)
    hess = (cf[:, :, None, None] * c2[None] * mon2).sum(axis=1)
    return f, grad, hess


def _lagrange_eval_numpy(Amat, m, E, cf, Z):
    k = Amat.shape[1]
    X, lam = Z[:, :k], Z[:, k]
    ell = X @ Amat.T
    inv = m[None, :] / ell
    f, grad, hess = _poly_derivs_numpy(E, cf, X)
    G = np.empty_like(Z)
    G[:, :k] = inv @ Amat - lam[:, None] * grad
    G[:, k] = f - 1.0
    s = Z.shape[0]
    J = np.zeros((s, k + 1, k + 1), dtype=np.complex128)
    J[:, :k, :k] = -np.einsum("si,ij,il->sjl", inv / ell, Amat, Amat) - lam[:, None, None] * hess
    J[:, :k, k] = -grad
    J[:, k, :k] = grad
    scale = (np.abs(inv) * np.linalg.norm(Amat, axis=1)[None, :]).sum(axis=1)
    scale = scale + np.abs(lam) * np.linalg.norm(grad, axis=1) + 1.0
    return G, J, scale, np.any(ell == 0, axis=1)


def _newton_lagrange_numpy(Amat, m, E, cf, Z0, max_iter, tol):
    def evaluate(Z):
        return _lagrange_eval_numpy(Amat, m, E, cf, Z)

    return _newton_numpy(evaluate, Z0, max_iter, tol)


def _track_numpy(Amat, m, E, cfa, cfb, Z0, h0, hmin, max_steps):
    """Follow solutions of the Lagrange system as f moves from cfa to cfb, all paths at once."""
    s = Z0.shape[0]
    Z = Z0.copy()
    t = np.zeros(s)
    h = np.full(s, h0)
    streak = np.zeros(s, dtype=np.int64)
    ok = np.ones(s, dtype=bool)
    active = np.ones(s, dtype=bool)
    dcf = cfb - cfa

    def velocity(Zs, ts):
        CF = cfa[None, :] + ts[:, None] * dcf[None, :]
        G, J, _, hit = _lagrange_eval_numpy(Amat, m, E, CF, Zs)
        # the system is affine in the coefficients, so dG/dt only involves dcf
        k = Amat.shape[1]
        df, dgrad, _ = _poly_derivs_numpy(E, dcf, Zs[:, :k])
        Gt = np.empty_like(Zs)
        Gt[:, :k] = -Zs[:, k:] * dgrad
        Gt[:, k] = df
        v, sing = _batched_solve(J, -Gt)
        return v, sing | hit

    for _ in range(max_steps):
        if not active.any():
            break
        ids = np.nonzero(active)[0]
        z, tt = Z[ids], t[ids]
        hh = np.minimum(h[ids], 1.0 - tt)
        with np.errstate(all="ignore"):
            k1, b1 = velocity(z, tt)
            k2, b2 = velocity(z + 0.5 * hh[:, None] * k1, tt + 0.5 * hh)
            k3, b3 = velocity(z + 0.5 * hh[:, None] * k2, tt + 0.5 * hh)
            k4, b4 = velocity(z + hh[:, None] * k3, tt + hh)
            zp = z + (hh / 6.0)[:, None] * (k1 + 2 * k2 + 2 * k3 + k4)
            CF = cfa[None, :] + (tt + hh)[:, None] * dcf[None, :]
            good = ~(b1 | b2 | b3 | b4) & np.all(np.isfinite(zp), axis=1)
            for it in range(3):
                G, J, _, hit = _lagrange_eval_numpy(Amat, m, E, CF, zp)
                dz, sing = _batched_solve(J, -G)
                good &= ~(sing | hit)
                dz[~good] = 0
                zp = zp + dz
                size = np.linalg.norm(dz, axis=1)
                if it == 0:
                    good &= size <= 1e-3 * (1 + np.linalg.norm(zp, axis=1))
            good &= size <= 1e-8 * (1 + np.linalg.norm(zp, axis=1))
        acc, rej = ids[good], ids[~good]
        Z[acc] = zp[good]
        t[acc] = tt[good] + hh[good]
        streak[acc] += 1
        grow = acc[streak[acc] >= 3]
        h[grow] = np.minimum(2 * h[grow], 0.1)
        streak[grow] = 0
        h[rej] /= 2
        streak[rej] = 0
        failed = rej[h[rej] < hmin]
        ok[failed] = False
        active[failed] = False
        active[acc[t[acc] >= 1.0]] = False
    ok &= t >= 1.0
    return Z, ok


# ---------------------------------------------------------------- numba path

if HAVE_NUMBA:

    @njit(cache=True)
    def _count_numba(coeffs, q, chart, use_chart):
        d, k = coeffs.shape
        total = 1
        for _ in range(k):
            total *= q
        digits = np.zeros(k, dtype=np.int64)
        count = 0
        for _ in range(total):
            ok = True
            if use_chart:
                v = 0
                for j in range(k):
                    v += chart[j] * digits[j]
                ok = v % q == 1
            if ok:
                for i in range(d):
                    v = 0
                    for j in range(k):
                        v += coeffs[i, j] * digits[j]
                    if v % q == 0:
                        ok = False
                        break
            if ok:
                count += 1
            # mixed-radix increment
            j = 0
            while j < k:
                digits[j] += 1
                if digits[j] < q:
                    break
                digits[j] = 0
                j += 1
        return count

    @njit(cache=True)
    def _solve_small(J, b):
        n = b.shape[0]
        J = J.copy()
        b = b.copy()
        for c in range(n):
            piv = c
            best = abs(J[c, c])
            for r in range(c + 1, n):
                if abs(J[r, c]) > best:
                    best = abs(J[r, c])
                    piv = r
            if best < _PIVOT_EPS:
                return b, True
            if piv != c:
                for j in range(n):
                    t = J[c, j]
                    J[c, j] = J[piv, j]
                    J[piv, j] = t
                t = b[c]
                b[c] = b[piv]
                b[piv] = t
            for r in range(c + 1, n):
                f = J[r, c] / J[c, c]
                for j in range(c, n):
                    J[r, j] -= f * J[c, j]
                b[r] -= f * b[c]
        x = np.zeros(n, dtype=np.complex128)
        for r in range(n - 1, -1, -1):
            acc = b[r]
            for j in range(r + 1, n):
                acc -= J[r, j] * x[j]
            x[r] = acc / J[r, r]
        return x, False

    @njit(cache=True)
    def _chart_system(W, c, m, u):
        d, n = W.shape
        G = np.zeros(n, dtype=np.complex128)
        J = np.zeros((n, n), dtype=np.complex128)
        scale = 0.0
        hit = False
        for i in range(d):
            ell = c[i]
            for j in range(n):
                ell += W[i, j] * u[j]
            if ell == 0:
                hit = True
                return G, J, 1.0, hit
            inv = m[i] / ell
            wn = 0.0
            for j in range(n):
                G[j] += inv * W[i, j]
                wn += abs(W[i, j]) ** 2
                for l in range(n):
                    J[j, l] -= inv / ell * W[i, j] * W[i, l]
            scale += abs(inv) * np.sqrt(wn)
        return G, J, scale, hit

    @njit(cache=True)
    def _lagrange_system(Amat, m, E, cf, z):
        d, k = Amat.shape
        t = E.shape[0]
        x = z[:k]
        lam = z[k]
        G = np.zeros(k + 1, dtype=np.complex128)
        J = np.zeros((k + 1, k + 1), dtype=np.complex128)
        scale = 1.0
        for i in range(d):
            ell = 0j
            for j in range(k):
                ell += Amat[i, j] * x[j]
            if ell == 0:
                return G, J, 1.0, True
            inv = m[i] / ell
            an = 0.0
            for j in range(k):
                G[j] += inv * Amat[i, j]
                an += abs(Amat[i, j]) ** 2
                for l in range(k):
                    J[j, l] -= inv / ell * Amat[i, j] * Amat[i, l]
            scale += abs(inv) * np.sqrt(an)
        f = 0j
        grad = np.zeros(k, dtype=np.complex128)
        hess = np.zeros((k, k), dtype=np.complex128)
        for s in range(t):
            mon = cf[s] + 0j
            for j in range(k):
                mon *= x[j] ** E[s, j]
            f += mon
            for j in range(k):
                if E[s, j] == 0:
                    continue
                dj = cf[s] * E[s, j] * x[j] ** (E[s, j] - 1)
                for l in range(k):
                    if l != j:
                        dj *= x[l] ** E[s, l]
                grad[j] += dj
                for l in range(k):
                    if l == j:
                        if E[s, j] < 2:
                            continue
                        h = cf[s] * E[s, j] * (E[s, j] - 1) * x[j] ** (E[s, j] - 2)
                        for r in range(k):
                            if r != j:
                                h *= x[r] ** E[s, r]
                    else:
                        if E[s, l] == 0:
                            continue
                        h = cf[s] * E[s, j] * x[j] ** (E[s, j] - 1) * E[s, l] * x[l] ** (E[s, l] - 1)
                        for r in range(k):
                            if r != j and r != l:
                                h *= x[r] ** E[s, r]
                    hess[j, l] += h
        gn = 0.0
        for j in range(k):
            G[j] -= lam * grad[j]
            gn += abs(grad[j]) ** 2
            for l in range(k):
                J[j, l] -= lam * hess[j, l]
            J[j, k] = -grad[j]
            J[k, j] = grad[j]
        G[k] = f - 1.0
        scale += abs(lam) * np.sqrt(gn)
        return G, J, scale, False

    @njit(cache=True)
    def _velocity(Amat, m, E, cfa, cfb, z, t):
        cft = cfa + t * (cfb - cfa)
        G, J, scale, hit = _lagrange_system(Amat, m, E, cft, z)
        Ga, _, _, ha = _lagrange_system(Amat, m, E, cfa, z)
        Gb, _, _, hb = _lagrange_system(Amat, m, E, cfb, z)
        if hit or ha or hb:
            return G, True
        return _solve_small(J, -(Gb - Ga))

    @njit(cache=True)
    def _track_numba(Amat, m, E, cfa, cfb, Z0, h0, hmin, max_steps):
        s = Z0.shape[0]
        Z = Z0.copy()
        ok = np.zeros(s, dtype=np.bool_)
        for a in range(s):
            z = Z[a].copy()
            t = 0.0
            h = h0
            streak = 0
            for _ in range(max_steps):
                if t >= 1.0:
                    break
                hh = min(h, 1.0 - t)
                k1, b1 = _velocity(Amat, m, E, cfa, cfb, z, t)
                k2, b2 = _velocity(Amat, m, E, cfa, cfb, z + 0.5 * hh * k1, t + 0.5 * hh)
                k3, b3 = _velocity(Amat, m, E, cfa, cfb, z + 0.5 * hh * k2, t + 0.5 * hh)
                k4, b4 = _velocity(Amat, m, E, cfa, cfb, z + hh * k3, t + hh)
                good = not (b1 or b2 or b3 or b4)
                zp = z + (hh / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
                if good:
                    good = np.all(np.isfinite(zp.real)) and np.all(np.isfinite(zp.imag))
                cft = cfa + (t + hh) * (cfb - cfa)
                size = np.inf
                if good:
                    for it in range(3):
                        G, J, scale, hit = _lagrange_system(Amat, m, E, cft, zp)
                        if hit:
                            good = False
                            break
                        dz, sing = _solve_small(J, -G)
                        if sing:
                            good = False
                            break
                        zp = zp + dz
                        size = np.sqrt(np.sum(np.abs(dz) ** 2))
                        bound = 1.0 + np.sqrt(np.sum(np.abs(zp) ** 2))
                        if it == 0 and size > 1e-3 * bound:
                            good = False
                            break
                    if good:
                        good = size <= 1e-8 * (1.0 + np.sqrt(np.sum(np.abs(zp) ** 2)))
                if good:
                    z = zp
                    t += hh
                    streak += 1
                    if streak >= 3:
                        h = min(2 * h, 0.1)
                        streak = 0
                else:
                    h /= 2
                    streak = 0
                    if h < hmin:
                        break
            ok[a] = t >= 1.0
            Z[a] = z
        return Z, ok

    @njit(cache=True)
    def _newton_chart_numba(W, c, m, U0, max_iter, tol):
        s, n = U0.shape
        U = U0.copy()
        status = np.full(s, MAXITER, dtype=np.int64)
        resid = np.full(s, np.inf)
        for a in range(s):
            u = U[a].copy()
            polish = 0
            for _ in range(max_iter + _POLISH_STEPS):
                G, J, scale, hit = _chart_system(W, c, m, u)
                r = np.sqrt(np.sum(np.abs(G) ** 2)) / max(scale, 1.0)
                resid[a] = r
                if hit or not np.isfinite(r) or np.sqrt(np.sum(np.abs(u) ** 2)) > _DIVERGE_NORM:
                    status[a] = DIVERGED
                    break
                if r <= tol:
                    polish += 1
                    if polish > _POLISH_STEPS:
                        status[a] = CONVERGED
                        break
                du, sing = _solve_small(J, -G)
                if sing:
                    status[a] = SINGULAR
                    break
                u += du
            if status[a] == MAXITER and resid[a] <= tol:
                status[a] = CONVERGED
            U[a] = u
        return U, status, resid

    @njit(cache=True)
    def _newton_lagrange_numba(Amat, m, E, cf, Z0, max_iter, tol):
        s, k1 = Z0.shape
        Z = Z0.copy()
        status = np.full(s, MAXITER, dtype=np.int64)
        resid = np.full(s, np.inf)
        for a in range(s):
            z = Z[a].copy()
            polish = 0
            for _ in range(max_iter + _POLISH_STEPS):
                G, J, scale, hit = _lagrange_system(Amat, m, E, cf, z)
                r = np.sqrt(np.sum(np.abs(G) ** 2)) / max(scale, 1.0)
                resid[a] = r
                if hit or not np.isfinite(r) or np.sqrt(np.sum(np.abs(z) ** 2)) > _DIVERGE_NORM:
                    status[a] = DIVERGED
                    break
                if r <= tol:
                    polish += 1
                    if polish > _POLISH_STEPS:
                        status[a] = CONVERGED
                        break
                dz, sing = _solve_small(J, -G)
                if sing:
                    status[a] = SINGULAR
                    break
                z += dz
            if status[a] == MAXITER and resid[a] <= tol:
                status[a] = CONVERGED
            Z[a] = z
        return Z, status, resid


# ---------------------------------------------------------------- dispatch


def _use_numba(flag) -> bool:
    return HAVE_NUMBA if flag is None else bool(flag) and HAVE_NUMBA


def count_nonvanishing(coeffs, q, chart=None, use_numba=None):
    """#{x in F_q^k : every row of coeffs is nonzero at x [and chart . x = 1]}."""
    coeffs = np.ascontiguousarray(coeffs, dtype=np.int64) % q
    use_chart = chart is not None
    ch = np.zeros(coeffs.shape[1], dtype=np.int64) if chart is None else np.asarray(chart, dtype=np.int64) % q
    if _use_numba(use_numba):
        return int(_count_numba(coeffs, q, ch, use_chart))
    return _count_numpy(coeffs, q, ch, use_chart)


def newton_chart(W, c, m, U0, max_iter, tol, use_numba=None):
    W = np.ascontiguousarray(W, dtype=np.complex128)
    c = np.ascontiguousarray(c, dtype=np.complex128)
    m = np.ascontiguousarray(m, dtype=np.float64)
    U0 = np.ascontiguousarray(U0, dtype=np.complex128)
    if _use_numba(use_numba):
        return _newton_chart_numba(W, c, m, U0, max_iter, tol)
    return _newton_chart_numpy(W, c, m, U0, max_iter, tol)


def newton_lagrange(Amat, m, E, cf, Z0, max_iter, tol, use_numba=None):
    Amat = np.ascontiguousarray(Amat, dtype=np.complex128)
    m = np.ascontiguousarray(m, dtype=np.float64)
    E = np.ascontiguousarray(E, dtype=np.int64)
    cf = np.ascontiguousarray(cf, dtype=np.complex128)
    Z0 = np.ascontiguousarray(Z0, dtype=np.complex128)
    if _use_numba(use_numba):
        return _newton_lagrange_numba(Amat, m, E, cf, Z0, max_iter, tol)
    return _newton_lagrange_numpy(Amat, m, E, cf, Z0, max_iter, tol)


def track_lagrange(Amat, m, E, cfa, cfb, Z0, h0=0.02, hmin=1e-9, max_steps=5000, use_numba=None):
    """Continue solutions of the Lagrange system from coefficients cfa to cfb."""
    Amat = np.ascontiguousarray(Amat, dtype=np.complex128)
    m = np.ascontiguousarray(m, dtype=np.float64)
    E = np.ascontiguousarray(E, dtype=np.int64)
    cfa = np.ascontiguousarray(cfa, dtype=np.complex128)
    cfb = np.ascontiguousarray(cfb, dtype=np.complex128)
    Z0 = np.ascontiguousarray(Z0, dtype=np.complex128).reshape(-1, Amat.shape[1] + 1)
    if _use_numba(use_numba):
        return _track_numba(Amat, m, E, cfa, cfb, Z0, h0, hmin, max_steps)
    return _track_numpy(Amat, m, E, cfa, cfb, Z0, h0, hmin, max_steps)
