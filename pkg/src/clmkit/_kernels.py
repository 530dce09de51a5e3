"""Compiled dense linear-algebra kernels (complex128, single-threaded).

Everything here operates on C-contiguous ``complex128`` arrays and is
called through the thin wrappers in :mod:`clmkit.linalg` and
:mod:`clmkit.spectral`.
"""

from __future__ import annotations

import numpy as np
from numba import njit

_EPS = 2.220446049250313e-16


@njit(cache=True)
def hessenberg_reduce(a):
    """Householder reduction ``A = Q H Q^H``.

    Returns ``(h, q)`` with ``h`` upper Hessenberg and ``q`` unitary.
    """
    n = a.shape[0]
    h = a.copy()
    q = np.eye(n, dtype=np.complex128)
    v = np.empty(n, dtype=np.complex128)
    s = np.empty(n, dtype=np.complex128)
    for k in range(n - 2):
        m = n - k - 1
        alpha = 0.0
        for i in range(m):
            z = h[k + 1 + i, k]
            alpha += z.real * z.real + z.imag * z.imag
        alpha = np.sqrt(alpha)
        if alpha == 0.0:
            continue
        x0 = h[k + 1, k]
        ax0 = abs(x0)
        phase = x0 / ax0 if ax0 > 0.0 else 1.0 + 0.0j
        for i in range(m):
            v[i] = h[k + 1 + i, k]
        v[0] = x0 + phase * alpha
        vn = 0.0
        for i in range(m):
            vn += v[i].real * v[i].real + v[i].imag * v[i].imag
        vn = np.sqrt(vn)
        for i in range(m):
            v[i] /= vn
        # left: h[k+1:, k:] -= 2 v (v^H h[k+1:, k:])
        for j in range(k, n):
            s[j] = 0.0
        for i in range(m):
            cv = v[i].conjugate()
            r = k + 1 + i
            for j in range(k, n):
                s[j] += cv * h[r, j]
        for i in range(m):
            tv = 2.0 * v[i]
            r = k + 1 + i
            for j in range(k, n):
                h[r, j] -= tv * s[j]
        # right: h[:, k+1:] -= 2 (h[:, k+1:] v) v^H, same for q
        for i in range(n):
            acc = 0.0j
            for l in range(m):
                acc += h[i, k + 1 + l] * v[l]
            acc *= 2.0
            for l in range(m):
                h[i, k + 1 + l] -= acc * v[l].conjugate()
            acc = 0.0j
            for l in range(m):
                acc += q[i, k + 1 + l] * v[l]
            acc *= 2.0
            for l in range(m):
                q[i, k + 1 + l] -= acc * v[l].conjugate()
        for i in range(k + 2, n):
            h[i, k] = 0.0
    return h, q


@njit(cache=True)
def _eig2(a, b, c, d):
    """Eigenvalues of [[a, b], [c, d]], the second closest to ``d``."""
    tr = 0.5 * (a + d)
    disc = np.sqrt((0.5 * (a - d)) ** 2 + b * c)
    l1 = tr + disc
    l2 = tr - disc
    if abs(l1 - d) < abs(l2 - d):
        l1, l2 = l2, l1
    return l1, l2


@njit(cache=True)
def _eig2_stable(a, b, c, d):
    tr = 0.5 * (a + d)
    disc = np.sqrt((0.5 * (a - d)) ** 2 + b * c)
    big = tr + disc if abs(tr + disc) >= abs(tr - disc) else tr - disc
    det = a * d - b * c
    small = det / big if big != 0.0 else 0.0j
    return big, small


@njit(cache=True)
def hessenberg_qr(h, tol, sweep_factor):
    """Eigenvalues of an upper Hessenberg matrix by shifted QR.

    Complex single-shift QR with Givens rotations, Wilkinson shifts and an
    exceptional shift every 10th stalled sweep.  A subdiagonal entry is
    deflated once ``|h[k, k-1]| <= tol * ||H||_F``.

    Returns
    -------
    w : ndarray
        Eigenvalues (valid for indices ``> hi`` when ``status != 0``).
    status : int
        ``0`` on success, otherwise ``hi + 1`` (number of unconverged
        eigenvalues).
    sweeps : int
    """
    n = h.shape[0]
    h = h.copy()
    w = np.zeros(n, dtype=np.complex128)
    nrm = 0.0
    for i in range(n):
        for j in range(n):
            z = h[i, j]
            nrm += z.real * z.real + z.imag * z.imag
    thr = tol * np.sqrt(nrm)
    cs = np.empty(n, dtype=np.float64)
    sn = np.empty(n, dtype=np.complex128)
    hi = n - 1
    its = 0
    total = 0
    maxit = sweep_factor * max(n, 1)
    while hi >= 0:
        lo = hi
        while lo > 0:
            if abs(h[lo, lo - 1]) <= thr:
                h[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            w[hi] = h[hi, hi]
            hi -= 1
            its = 0
            continue
        if lo == hi - 1:
            l1, l2 = _eig2_stable(h[lo, lo], h[lo, hi], h[hi, lo], h[hi, hi])
            w[lo] = l1
            w[hi] = l2
            hi -= 2
            its = 0
            continue
        if total >= maxit:
            return w, hi + 1, total
        its += 1
        total += 1
        if its % 10 == 0:
            sigma = h[hi, hi] + 0.75 * (abs(h[hi, hi - 1]) + abs(h[hi - 1, hi - 2])) * np.exp(1j * its)
        else:
            _, sigma = _eig2(h[hi - 1, hi - 1], h[hi - 1, hi], h[hi, hi - 1], h[hi, hi])
        for k in range(lo, hi + 1):
            h[k, k] -= sigma
        for k in range(lo, hi):
            a = h[k, k]
            b = h[k + 1, k]
            aa = abs(a)
            r = np.sqrt(aa * aa + abs(b) ** 2)
            if r == 0.0:
                c = 1.0
                s = 0.0j
            elif aa == 0.0:
                c = 0.0
                s = b.conjugate() / abs(b)
            else:
                c = aa / r
                s = (a / aa) * b.conjugate() / r
            cs[k] = c
            sn[k] = s
            for j in range(k, hi + 1):
                t1 = h[k, j]
                t2 = h[k + 1, j]
                h[k, j] = c * t1 + s * t2
                h[k + 1, j] = -s.conjugate() * t1 + c * t2
        for k in range(lo, hi):
            c = cs[k]
            s = sn[k]
            top = min(k + 2, hi)
            for i in range(lo, top + 1):
                t1 = h[i, k]
                t2 = h[i, k + 1]
                h[i, k] = c * t1 + s.conjugate() * t2
                h[i, k + 1] = -s * t1 + c * t2
        for k in range(lo, hi + 1):
            h[k, k] += sigma
    return w, 0, total


@njit(cache=True)
def hessenberg_inverse_iteration(h, w, start, passes, cluster_tol):
    """Right eigenvectors of an upper Hessenberg matrix.

    For each eigenvalue the shifted matrix is factored once (partial
    pivoting between adjacent rows), then ``passes`` solves are applied to
    ``start``; the iterate with the smallest true residual is kept.  Shifts closer than ``eps * ||H||`` to an earlier one are
    nudged apart; vectors inside a cluster (``|w_i - w_j| <= cluster_tol``)
    are Gram-Schmidt orthogonalised against their predecessors.
    """
    n = h.shape[0]
    nrm = 0.0
    for i in range(n):
        for j in range(n):
            z = h[i, j]
            nrm += z.real * z.real + z.imag * z.imag
    nrm = np.sqrt(nrm)
    eps3 = _EPS * nrm if nrm > 0.0 else _EPS
    vecs = np.zeros((n, n), dtype=np.complex128)
    shifts = np.empty(n, dtype=np.complex128)
    a = np.empty((n, n), dtype=np.complex128)
    mult = np.empty(max(n - 1, 1), dtype=np.complex128)
    swap = np.zeros(max(n - 1, 1), dtype=np.bool_)
    y = np.empty(n, dtype=np.complex128)
    for i in range(n):
        lam = w[i]
        moved = True
        while moved:
            moved = False
            for j in range(i):
                if abs(shifts[j] - lam) < eps3:
                    lam += eps3
                    moved = True
        shifts[i] = lam
        for r in range(n):
            c0 = r - 1 if r > 0 else 0
            for c in range(c0, n):
                a[r, c] = h[r, c]
            a[r, r] -= lam
        for k in range(n - 1):
            if abs(a[k + 1, k]) > abs(a[k, k]):
                swap[k] = True
                for c in range(k, n):
                    t = a[k, c]
                    a[k, c] = a[k + 1, c]
                    a[k + 1, c] = t
            else:
                swap[k] = False
            piv = a[k, k]
            if abs(piv) < eps3:
                piv = eps3
                a[k, k] = piv
            m = a[k + 1, k] / piv
            mult[k] = m
            if m != 0.0:
                for c in range(k + 1, n):
                    a[k + 1, c] -= m * a[k, c]
        if abs(a[n - 1, n - 1]) < eps3:
            a[n - 1, n - 1] = eps3
        x = start.copy()
        best = start.copy()
        best_res = np.inf
        # non-normal inputs: later passes can drift, so keep the best iterate
        for p in range(passes):
            for r in range(n):
                y[r] = x[r]
            for k in range(n - 1):
                if swap[k]:
                    t = y[k]
                    y[k] = y[k + 1]
                    y[k + 1] = t
                y[k + 1] -= mult[k] * y[k]
            for r in range(n - 1, -1, -1):
                acc = y[r]
                for c in range(r + 1, n):
                    acc -= a[r, c] * y[c]
                y[r] = acc / a[r, r]
                if abs(y[r]) > 1e150:
                    # rescale the whole system to keep tiny pivots from overflowing
                    g = 1.0 / abs(y[r])
                    for c in range(n):
                        y[c] *= g
            for j in range(i):
                if abs(w[j] - w[i]) <= cluster_tol:
                    dot = 0.0j
                    for r in range(n):
                        dot += vecs[r, j].conjugate() * y[r]
                    for r in range(n):
                        y[r] -= dot * vecs[r, j]
            s = 0.0
            for r in range(n):
                s += y[r].real * y[r].real + y[r].imag * y[r].imag
            s = np.sqrt(s)
            if s == 0.0 or not np.isfinite(s):
                break
            for r in range(n):
                x[r] = y[r] / s
            res = _hess_residual(h, w[i], x)
            if res < best_res:
                best_res = res
                for r in range(n):
                    best[r] = x[r]
        for r in range(n):
            vecs[r, i] = best[r]
    return vecs


@njit(cache=True)
def _hess_residual(h, lam, x):
    n = h.shape[0]
    tot = 0.0
    for r in range(n):
        acc = -lam * x[r]
        c0 = r - 1 if r > 0 else 0
        for c in range(c0, n):
            acc += h[r, c] * x[c]
        tot += acc.real * acc.real + acc.imag * acc.imag
    return np.sqrt(tot)


@njit(cache=True)
def lu_factor_inplace(a):
    """Dense LU with partial pivoting, ``P A = L U``, stored in ``a``.

    Only the nonzero extent of each pivot column and pivot row is updated,
    so banded inputs (tridiagonal chains) factor in ``O(n^2)`` rather than
    ``O(n^3)``.  Returns ``(perm, n_swaps, min_abs_pivot)``.
    """
    n = a.shape[0]
    perm = np.arange(n)
    nswap = 0
    minpiv = np.inf
    for k in range(n):
        p = k
        best = abs(a[k, k])
        last = k
        for r in range(k, n):
            v = abs(a[r, k])
            if v != 0.0:
                last = r
            if v > best:
                best = v
                p = r
        if p != k:
            for c in range(n):
                t = a[k, c]
                a[k, c] = a[p, c]
                a[p, c] = t
            t2 = perm[k]
            perm[k] = perm[p]
            perm[p] = t2
            nswap += 1
        piv = a[k, k]
        if abs(piv) < minpiv:
            minpiv = abs(piv)
        if piv == 0.0:
            continue
        lastc = k
        for c in range(n - 1, k, -1):
            if a[k, c] != 0.0:
                lastc = c
                break
        for r in range(k + 1, last + 1):
            m = a[r, k] / piv
            a[r, k] = m
            if m != 0.0:
                for c in range(k + 1, lastc + 1):
                    a[r, c] -= m * a[k, c]
    return perm, nswap, minpiv


@njit(cache=True)
def lu_solve_inplace(lu, perm, b):
    """Solve with factors from :func:`lu_factor_inplace`; ``b`` is (n, m)."""
    n, m = b.shape
    x = np.empty((n, m), dtype=np.complex128)
    for r in range(n):
        for j in range(m):
            x[r, j] = b[perm[r], j]
    for r in range(n):
        for c in range(r):
            l = lu[r, c]
            if l != 0.0:
                for j in range(m):
                    x[r, j] -= l * x[c, j]
    for r in range(n - 1, -1, -1):
        for c in range(r + 1, n):
            u = lu[r, c]
            if u != 0.0:
                for j in range(m):
                    x[r, j] -= u * x[c, j]
        d = lu[r, r]
        for j in range(m):
            x[r, j] /= d
    return x
