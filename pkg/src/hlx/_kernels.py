"""Prime-field kernels: a numba implementation and a pure-numpy fallback.

The numba path is used unless ``HLX_DISABLE_JIT=1`` is set or numba cannot be
imported.  Both paths expose the same functions and return identical results;
``numpy_impl`` and ``numba_impl`` give direct access for testing and
benchmarking.  ``HLX_THREADS`` caps the numba thread pool.
"""

from __future__ import annotations

import os
import types

import numpy as np

__all__ = ["BACKEND", "rref_modp", "morphism_candidates", "numpy_impl", "numba_impl"]


def inverse_table(p: int) -> np.ndarray:
    table = np.zeros(p, dtype=np.int64)
    for x in range(1, p):
        table[x] = pow(x, -1, p)
    return table


# --------------------------------------------------------------------------
# pure numpy
# --------------------------------------------------------------------------


def _np_rref_modp(a: np.ndarray, p: int):
    m = np.array(a, dtype=np.int64) % p
    rows, cols = m.shape
    inv = inverse_table(p)
    pivots = np.zeros(min(rows, cols), dtype=np.int64)
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(m[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + nz[0]
        if piv != r:
            m[[r, piv]] = m[[piv, r]]
        m[r] = (m[r] * inv[m[r, c]]) % p
        fac = m[:, c].copy()
        fac[r] = 0
        m = (m - np.outer(fac, m[r])) % p
        pivots[r] = c
        r += 1
    return m, r, pivots


def _np_decode(idx: np.ndarray, p: int, n_out: int, n_in: int) -> np.ndarray:
    size = n_out * n_in
    powers = p ** np.arange(size - 1, -1, -1, dtype=np.int64)
    digits = (idx[:, None] // powers[None, :]) % p
    return digits.reshape(-1, n_out, n_in)


def _np_full_rank(g: np.ndarray, p: int) -> np.ndarray:
    """Batched invertibility test for square matrices over F_p."""
    m = g.copy() % p
    batch, n, _ = m.shape
    inv = inverse_table(p)
    ok = np.ones(batch, dtype=bool)
    ar = np.arange(batch)
    for c in range(n):
        col = m[:, c:, c]
        has = col != 0
        ok &= has.any(axis=1)
        piv = c + np.argmax(has, axis=1)
        prow = m[ar, piv].copy()
        m[ar, piv] = m[:, c]
        m[:, c] = prow
        scale = inv[m[:, c, c]]
        m[:, c] = (m[:, c] * scale[:, None]) % p
        fac = m[:, :, c].copy()
        fac[:, c] = 0
        m = (m - fac[:, :, None] * m[:, c][:, None, :]) % p
    return ok


def _np_morphism_candidates(n_out, n_in, p, c1, a1, c2, a2, start, stop, need_invertible, chunk=1 << 15):
    found = []
    iu, ju = np.triu_indices(n_in, k=1)
    for lo in range(start, stop, chunk):
        hi = min(stop, lo + chunk)
        idx = np.arange(lo, hi, dtype=np.int64)
        g = _np_decode(idx, p, n_out, n_in)
        ok = np.all(((g @ a1) - (a2 @ g)) % p == 0, axis=(1, 2))
        if iu.size:
            # g [e_i, e_j]  vs  [g e_i, g e_j]
            lhs = np.einsum("bkt,ijt->bijk", g, c1) % p
            rhs = np.einsum("bai,bcj,ack->bijk", g, g, c2) % p
            diff = (lhs - rhs)[:, iu, ju, :]
            ok &= np.all(diff == 0, axis=(1, 2))
        if need_invertible and ok.any():
            sel = np.nonzero(ok)[0]
            ok[sel] = _np_full_rank(g[sel], p)
        found.append(idx[ok])
    if not found:
        return np.zeros(0, dtype=np.int64)
    return np.concatenate(found)


numpy_impl = types.SimpleNamespace(
    rref_modp=_np_rref_modp,
    morphism_candidates=_np_morphism_candidates,
    name="numpy",
)


# --------------------------------------------------------------------------
# numba
# --------------------------------------------------------------------------


def _build_numba():
    from . import _nb

    return types.SimpleNamespace(rref_modp=_nb.rref_modp, morphism_candidates=_nb.morphism_candidates, name="numba")


try:
    numba_impl = _build_numba()
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba_impl = None

if os.environ.get("HLX_DISABLE_JIT", "") not in ("", "0") or numba_impl is None:
    _active = numpy_impl
else:
    _active = numba_impl

BACKEND = _active.name


def rref_modp(a, p):
    return _active.rref_modp(a, p)


def morphism_candidates(n_out, n_in, p, c1, a1, c2, a2, start, stop, need_invertible):
    """Indices in ``[start, stop)`` of base-p encoded matrices that are Hom-Lie morphisms.

    Index digits, most significant first, are the row-major entries of the
    ``n_out x n_in`` matrix, so increasing index is lexicographic order.
    """
    return _active.morphism_candidates(n_out, n_in, p, c1, a1, c2, a2, start, stop, need_invertible)


def decode(idx: int, p: int, n_out: int, n_in: int) -> list[list[int]]:
    digits = []
    for _ in range(n_out * n_in):
        digits.append(idx % p)
        idx //= p
    digits.reverse()
    return [digits[r * n_in:(r + 1) * n_in] for r in range(n_out)]
