import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hlx import _kernels
from hlx.exactlin import GF
from hlx.generate import h3, sl2, twisted2
from hlx.homlie import abelian, direct_sum

import oracle

IMPLS = [i for i in (_kernels.numpy_impl, _kernels.numba_impl) if i is not None]


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([2, 3, 5]), st.integers(1, 4), st.integers(1, 4), st.integers(0, 2 ** 31))
def test_rref_backends_agree_and_rank_is_right(p, r, c, seed):
    a = np.random.default_rng(seed).integers(0, p, size=(r, c))
    outs = [impl.rref_modp(a, p) for impl in IMPLS]
    m, rank, piv = outs[0]
    for m2, rank2, piv2 in outs[1:]:
        assert np.array_equal(m, m2) and rank == rank2
        assert np.array_equal(piv[:rank], piv2[:rank])
    # the row space has p**rank elements
    assert len(oracle.span(p, a.tolist(), c)) == p ** rank
    # reduced form: pivot columns are unit vectors
    for i in range(rank):
        col = m[:, piv[i]]
        assert col[i] == 1 and np.count_nonzero(col) == 1


@pytest.mark.parametrize("name,L", [
    ("h3_f2", h3(GF(2))),
    ("sl2_f2", sl2(GF(2))),
    ("tw_f3", twisted2(GF(3), 1)),
    ("ab_f3", abelian(GF(3), 2)),
    ("h3+a1_f2", direct_sum(h3(GF(2)), abelian(GF(2), 1))),
])
def test_morphism_candidates_agree_with_brute_force(name, L):
    p, n = L.field.p, L.dim
    c, a = L.mod_arrays()
    total = p ** (n * n)
    stop = min(total, 1 << 14)
    expect = []
    for idx in range(stop):
        g = np.array(_kernels.decode(idx, p, n, n), dtype=np.int64)
        if oracle._morphism(p, g, c, a, c, a) and oracle._bij(p, g):
            expect.append(idx)
    for impl in IMPLS:
        got = np.asarray(impl.morphism_candidates(n, n, p, c, a, c, a, 0, stop, True))
        assert got.tolist() == expect, impl.name


def test_candidate_windows_concatenate():
    L = h3(GF(2))
    c, a = L.mod_arrays()
    for impl in IMPLS:
        whole = impl.morphism_candidates(3, 3, 2, c, a, c, a, 0, 512, False)
        parts = np.concatenate([impl.morphism_candidates(3, 3, 2, c, a, c, a, lo, lo + 100, False)
                                for lo in range(0, 512, 100)])
        assert np.array_equal(whole, parts[parts < 512])


@given(st.sampled_from([2, 3, 5]), st.integers(1, 3), st.integers(1, 3), st.data())
def test_decode_is_lexicographic(p, r, c, data):
    idx = data.draw(st.integers(0, p ** (r * c) - 2))
    a, b = _kernels.decode(idx, p, r, c), _kernels.decode(idx + 1, p, r, c)
    flat = lambda m: [x for row in m for x in row]  # noqa: E731
    assert flat(a) < flat(b)
    assert np.array_equal(_kernels._np_decode(np.array([idx]), p, r, c)[0], np.array(a))


def test_disable_jit_selects_numpy():
    env = dict(os.environ, HLX_DISABLE_JIT="1")
    out = subprocess.run([sys.executable, "-c", "from hlx import _kernels; print(_kernels.BACKEND)"],
                         capture_output=True, text=True, env=env)
    assert out.stdout.strip() == "numpy"


def test_default_backend_is_numba():
    if os.environ.get("HLX_DISABLE_JIT", "") not in ("", "0"):
        pytest.skip("jit disabled in this run")
    assert _kernels.BACKEND == "numba"
