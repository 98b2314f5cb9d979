"""Dense eigensolvers sized for desk-scale networks (n up to a few dozen).

* :func:`jacobi_eigh` -- cyclic Jacobi rotations for real symmetric matrices.
* :func:`eigvals_general` -- balancing, Householder Hessenberg reduction and
  Francis double-shift QR for real nonsymmetric matrices.
* :func:`inverse_iteration` -- eigenvectors for a known eigenvalue.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import NoConvergence, NotSymmetric

_EPS = np.finfo(float).eps
_MAX_ITS_PER_ROOT = 80
_EXCEPTIONAL = (0.75, -0.6, 1.3, 0.45, -1.1, 0.9, -0.35)


def jacobi_eigh(a, max_sweeps: int = 60, sym_tol: float = 1e-12):
    """Eigen-decomposition of a real symmetric matrix by cyclic Jacobi.

    Parameters
    ----------
    a : array_like, shape (n, n)
        Symmetric input; left untouched.
    max_sweeps : int
        Upper bound on full sweeps over the off-diagonal.
    sym_tol : float
        Relative asymmetry tolerated before :class:`NotSymmetric` is raised.

    Returns
    -------
    w : ndarray, shape (n,)
        Eigenvalues in ascending order.
    v : ndarray, shape (n, n)
        Orthonormal eigenvectors, ``v[:, i]`` pairs with ``w[i]``.
    """
    a = np.array(a, dtype=float)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("expected a square matrix")
    scale = np.linalg.norm(a)
    if np.max(np.abs(a - a.T), initial=0.0) > sym_tol * max(scale, 1.0):
        raise NotSymmetric("matrix is not symmetric")
    a = 0.5 * (a + a.T)
    v = np.eye(n)
    if n == 1 or scale == 0.0:
        return np.diag(a).copy(), v

    target = 4.0 * n * _EPS * scale
    for _ in range(max_sweeps):
        off = math.sqrt(2.0 * np.sum(np.triu(a, 1) ** 2))
        if off <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-300:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                # A <- J^T A J with J = [[c, s], [-s, c]] acting on (p, q)
                ap, aq = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                ap, aq = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * ap - s * aq
                a[q, :] = s * ap + c * aq
                a[p, q] = a[q, p] = 0.0
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    else:
        raise NoConvergence(f"Jacobi did not converge in {max_sweeps} sweeps")

    w = np.diag(a).copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def balance(a) -> np.ndarray:
    """Diagonal similarity scaling by powers of two (Parlett-Reinsch)."""
    a = np.array(a, dtype=float)
    n = a.shape[0]
    radix = 2.0
    converged = False
    while not converged:
        converged = True
        for i in range(n):
            c = np.sum(np.abs(a[:, i])) - abs(a[i, i])
            r = np.sum(np.abs(a[i, :])) - abs(a[i, i])
            if c == 0.0 or r == 0.0:
                continue
            g = r / radix
            f = 1.0
            s = c + r
            while c < g:
                f *= radix
                c *= radix * radix
            g = r * radix
            while c > g:
                f /= radix
                c /= radix * radix
            if (c + r) / f < 0.95 * s:
                converged = False
                a[i, :] /= f
                a[:, i] *= f
    return a


def hessenberg(a) -> np.ndarray:
    """Upper Hessenberg form by Householder reflections (similarity preserved)."""
    h = np.array(a, dtype=float)
    n = h.shape[0]
    for k in range(n - 2):
        x = h[k + 1:, k].copy()
        alpha = np.linalg.norm(x)
        if alpha == 0.0:
            continue
        if x[0] > 0:
            alpha = -alpha
        x[0] -= alpha
        vnorm = np.linalg.norm(x)
        if vnorm == 0.0:
            continue
        v = x / vnorm
        h[k + 1:, k:] -= 2.0 * np.outer(v, v @ h[k + 1:, k:])
        h[:, k + 1:] -= 2.0 * np.outer(h[:, k + 1:] @ v, v)
        h[k + 2:, k] = 0.0
    return h


def _hqr(h, max_its: int) -> np.ndarray:
    """Eigenvalues of an upper Hessenberg matrix by Francis double-shift QR.

    Deflates from the bottom; an exceptional shift with a varying multiplier
    is applied after every 10 stagnant iterations.  ``h`` is overwritten.
    """
    n = h.shape[0]
    wr = np.zeros(n)
    wi = np.zeros(n)
    anorm = sum(abs(h[i, j]) for i in range(n) for j in range(max(i - 1, 0), n))
    nn = n - 1
    t = 0.0
    total = 0
    while nn >= 0:
        its = 0
        while True:
            # look for a single small subdiagonal element
            l = 0
            for m in range(nn, 0, -1):
                s = abs(h[m - 1, m - 1]) + abs(h[m, m])
                if s == 0.0:
                    s = anorm
                if abs(h[m, m - 1]) + s == s:
                    h[m, m - 1] = 0.0
                    l = m
                    break
            x = h[nn, nn]
            if l == nn:  # one root found
                wr[nn] = x + t
                wi[nn] = 0.0
                nn -= 1
                break
            y = h[nn - 1, nn - 1]
            w = h[nn, nn - 1] * h[nn - 1, nn]
            if l == nn - 1:  # two roots found
                p = 0.5 * (y - x)
                q = p * p + w
                z = math.sqrt(abs(q))
                x += t
                if q >= 0.0:
                    z = p + math.copysign(z, p)
                    wr[nn - 1] = wr[nn] = x + z
                    if z:
                        wr[nn] = x - w / z
                    wi[nn - 1] = wi[nn] = 0.0
                else:
                    wr[nn - 1] = wr[nn] = x + p
                    wi[nn - 1] = -z
                    wi[nn] = z
                nn -= 2
                break

            if its == _MAX_ITS_PER_ROOT or total >= max_its:
                raise NoConvergence("Francis QR iteration did not converge")
            if its and its % 10 == 0:  # exceptional shift, varied per attempt
                t += x
                for i in range(nn + 1):
                    h[i, i] -= x
                s = abs(h[nn, nn - 1]) + abs(h[nn - 1, nn - 2])
                x = y = _EXCEPTIONAL[(its // 10 - 1) % len(_EXCEPTIONAL)] * s
                w = -0.4375 * s * s
            its += 1
            total += 1

            # look for two consecutive small subdiagonal elements
            m = nn - 2
            while True:
                z = h[m, m]
                r = x - z
                s = y - z
                p = (r * s - w) / h[m + 1, m] + h[m, m + 1]
                q = h[m + 1, m + 1] - z - r - s
                r = h[m + 2, m + 1]
                s = abs(p) + abs(q) + abs(r)
                p /= s
                q /= s
                r /= s
                if m == l:
                    break
                u = abs(h[m, m - 1]) * (abs(q) + abs(r))
                v = abs(p) * (abs(h[m - 1, m - 1]) + abs(z) + abs(h[m + 1, m + 1]))
                if u + v == v:
                    break
                m -= 1
            for i in range(m + 2, nn + 1):
                h[i, i - 2] = 0.0
                if i != m + 2:
                    h[i, i - 3] = 0.0

            # double QR step on rows l..nn, columns m..nn
            for k in range(m, nn):
                if k != m:
                    p = h[k, k - 1]
                    q = h[k + 1, k - 1]
                    r = h[k + 2, k - 1] if k != nn - 1 else 0.0
                    x = abs(p) + abs(q) + abs(r)
                    if x != 0.0:
                        p /= x
                        q /= x
                        r /= x
                s = math.copysign(math.sqrt(p * p + q * q + r * r), p)
                if s == 0.0:
                    continue
                if k == m:
                    if l != m:
                        h[k, k - 1] = -h[k, k - 1]
                else:
                    h[k, k - 1] = -s * x
                p += s
                x = p / s
                y = q / s
                z = r / s
                q /= p
                r /= p
                # row modification
                cols = slice(k, nn + 1)
                if k != nn - 1:
                    pr = h[k, cols] + q * h[k + 1, cols] + r * h[k + 2, cols]
                    h[k + 2, cols] -= pr * z
                else:
                    pr = h[k, cols] + q * h[k + 1, cols]
                h[k + 1, cols] -= pr * y
                h[k, cols] -= pr * x
                # column modification
                rows = slice(l, min(nn, k + 3) + 1)
                if k != nn - 1:
                    pc = x * h[rows, k] + y * h[rows, k + 1] + z * h[rows, k + 2]
                    h[rows, k + 2] -= pc * r
                else:
                    pc = x * h[rows, k] + y * h[rows, k + 1]
                h[rows, k + 1] -= pc * q
                h[rows, k] -= pc
    return wr + 1j * wi


def eigvals_general(a, max_its: int | None = None) -> np.ndarray:
    """All eigenvalues of a real square matrix (complex array, unsorted)."""
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("expected a square matrix")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    if n == 1:
        return a[0:1, 0].astype(complex)
    h = hessenberg(balance(a))
    return _hqr(h, max_its if max_its is not None else _MAX_ITS_PER_ROOT * n)


def inverse_iteration(a, lam: complex, iters: int = 3) -> np.ndarray:
    """Unit-norm right eigenvector of ``a`` for the eigenvalue ``lam``.

    Real eigenvalues yield real vectors.  The largest-magnitude entry (first
    one on ties) is made real and positive.
    """
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    scale = max(np.linalg.norm(a), 1.0)
    real = abs(complex(lam).imag) <= 1e-12 * scale
    mu = complex(lam).real if real else complex(lam)
    dtype = float if real else complex
    # nudge off the exact eigenvalue so the shifted system stays solvable
    shift = mu + 1e-10 * scale
    m = a.astype(dtype) - shift * np.eye(n, dtype=dtype)
    rng = np.random.default_rng(12345)
    x = rng.standard_normal(n).astype(dtype) + 1.0
    x /= np.linalg.norm(x)
    for _ in range(iters):
        try:
            y = np.linalg.solve(m, x)
        except np.linalg.LinAlgError:
            y = np.linalg.lstsq(m, x, rcond=None)[0]
        norm = np.linalg.norm(y)
        if norm == 0.0 or not np.isfinite(norm):
            break
        x = y / norm
    return normalize_sign(x)


def normalize_sign(v: np.ndarray) -> np.ndarray:
    """Scale ``v`` so its first largest-magnitude entry is real positive."""
    v = np.asarray(v)
    mags = np.abs(v)
    k = int(np.argmax(mags >= mags.max() * (1 - 1e-9)))
    if mags[k] == 0:
        return v
    phase = v[k] / mags[k]
    out = v / phase
    if np.isrealobj(v):
        return out.real
    return out
