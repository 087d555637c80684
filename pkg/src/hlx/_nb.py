"""numba kernels for prime-field elimination and morphism enumeration.

Kept at module level so the on-disk cache is reused between processes.
"""

import os

import numba
import numpy as np
from numba import njit, prange

if "NUMBA_THREADING_LAYER" not in os.environ:
    # the bundled TBB is too old for numba; avoid the noisy probe
    numba.config.THREADING_LAYER = "workqueue"
_threads = os.environ.get("HLX_THREADS")
if _threads:
    numba.set_num_threads(max(1, min(int(_threads), numba.config.NUMBA_NUM_THREADS)))


def inverse_table(p):
    table = np.zeros(p, dtype=np.int64)
    for x in range(1, p):
        table[x] = pow(x, -1, p)
    return table


@njit(cache=True)
def rref_kernel(m, p, inv):
    rows, cols = m.shape
    pivots = np.zeros(min(rows, cols), dtype=np.int64)
    r = 0
    for c in range(cols):
        if r == rows:
            break
        piv = -1
        for i in range(r, rows):
            if m[i, c] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for j in range(cols):
                t = m[r, j]
                m[r, j] = m[piv, j]
                m[piv, j] = t
        s = inv[m[r, c]]
        for j in range(cols):
            m[r, j] = (m[r, j] * s) % p
        for i in range(rows):
            if i != r and m[i, c] != 0:
                fac = m[i, c]
                for j in range(cols):
                    m[i, j] = (m[i, j] - fac * m[r, j]) % p
        pivots[r] = c
        r += 1
    return m, r, pivots

@njit(cache=True)
def _invertible(g, p, inv):
    n = g.shape[0]
    m = g.copy()
    for c in range(n):
        piv = -1
        for i in range(c, n):
            if m[i, c] != 0:
                piv = i
                break
        if piv < 0:
            return False
        if piv != c:
            for j in range(n):
                t = m[c, j]
                m[c, j] = m[piv, j]
                m[piv, j] = t
        s = inv[m[c, c]]
        for j in range(n):
            m[c, j] = (m[c, j] * s) % p
        for i in range(c + 1, n):
            fac = m[i, c]
            if fac != 0:
                for j in range(n):
                    m[i, j] = (m[i, j] - fac * m[c, j]) % p
    return True

@njit(cache=True)
def _check(idx, n_out, n_in, p, c1, a1, c2, a2, need_invertible, inv):
    g = np.empty((n_out, n_in), dtype=np.int64)
    rem = idx
    for pos in range(n_out * n_in - 1, -1, -1):
        g[pos // n_in, pos % n_in] = rem % p
        rem //= p
    for i in range(n_out):
        for j in range(n_in):
            s = 0
            for t in range(n_in):
                s += g[i, t] * a1[t, j]
            for t in range(n_out):
                s -= a2[i, t] * g[t, j]
            if s % p != 0:
                return False
    for i in range(n_in):
        for j in range(i + 1, n_in):
            for k in range(n_out):
                s = 0
                for t in range(n_in):
                    s += g[k, t] * c1[i, j, t]
                for a in range(n_out):
                    if g[a, i] == 0:
                        continue
                    for b in range(n_out):
                        s -= g[a, i] * g[b, j] * c2[a, b, k]
                if s % p != 0:
                    return False
    if need_invertible:
        return _invertible(g, p, inv)
    return True

@njit(parallel=True, cache=True)
def candidates_kernel(n_out, n_in, p, c1, a1, c2, a2, start, stop, need_invertible, inv):
    count = stop - start
    mask = np.zeros(count, dtype=np.bool_)
    for t in prange(count):
        mask[t] = _check(start + t, n_out, n_in, p, c1, a1, c2, a2, need_invertible, inv)
    return np.nonzero(mask)[0] + start

def rref_modp(a, p):
    m = np.array(a, dtype=np.int64) % p
    return rref_kernel(m, p, inverse_table(p))

def morphism_candidates(n_out, n_in, p, c1, a1, c2, a2, start, stop, need_invertible):
    return candidates_kernel(
        n_out, n_in, p,
        np.ascontiguousarray(c1, dtype=np.int64), np.ascontiguousarray(a1, dtype=np.int64),
        np.ascontiguousarray(c2, dtype=np.int64), np.ascontiguousarray(a2, dtype=np.int64),
        start, stop, bool(need_invertible), inverse_table(p),
    ).astype(np.int64)
