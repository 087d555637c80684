"""Time the numba kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat N]

Both backends are imported directly, so HLX_DISABLE_JIT does not matter here.
Results are checked for agreement before timings are printed.
"""

import argparse
import time

import numpy as np

from hlx import _kernels
from hlx.exactlin import GF
from hlx.generate import h3, sl2
from hlx.homlie import abelian, direct_sum


def _best(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def bench_candidates(name, L, repeat):
    p, n = L.field.p, L.dim
    c, a = L.mod_arrays()
    total = p ** (n * n)
    stop = min(total, 1 << 18)
    rows = []
    for impl in (_kernels.numpy_impl, _kernels.numba_impl):
        if impl is None:
            continue
        impl.morphism_candidates(n, n, p, c, a, c, a, 0, min(stop, 64), True)  # warm up / compile
        t, out = _best(lambda: impl.morphism_candidates(n, n, p, c, a, c, a, 0, stop, True), repeat)
        rows.append((impl.name, t, np.asarray(out)))
    ref = rows[0][2]
    for impl_name, _, out in rows[1:]:
        assert np.array_equal(ref, out), f"{impl_name} disagrees with numpy on {name}"
    for impl_name, t, out in rows:
        print(f"morphism_candidates {name:<14} {stop:>7} cand  {impl_name:<6} {t * 1e3:9.2f} ms  ({len(out)} hits)")


def bench_rref(p, shape, count, repeat):
    rng = np.random.default_rng(0)
    mats = [rng.integers(0, p, size=shape) for _ in range(count)]
    rows = []
    for impl in (_kernels.numpy_impl, _kernels.numba_impl):
        if impl is None:
            continue
        impl.rref_modp(mats[0], p)
        t, out = _best(lambda: [impl.rref_modp(m, p) for m in mats], repeat)
        rows.append((impl.name, t, out))
    for a, b in zip(rows[0][2], rows[-1][2]):
        assert np.array_equal(a[0], b[0]) and a[1] == b[1]
    for impl_name, t, _ in rows:
        print(f"rref_modp p={p:<3} {shape[0]}x{shape[1]:<4} x{count}    {impl_name:<6} {t * 1e3:9.2f} ms")


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    F2, F3 = GF(2), GF(3)
    print(f"default backend: {_kernels.BACKEND}")
    bench_candidates("h3/F2", h3(F2), args.repeat)
    bench_candidates("h3/F3", h3(F3), args.repeat)
    bench_candidates("h3+ab1/F2", direct_sum(h3(F2), abelian(F2, 1)), args.repeat)
    bench_candidates("sl2/F3", sl2(F3), args.repeat)
    bench_rref(2, (12, 12), 200, args.repeat)
    bench_rref(7, (20, 30), 200, args.repeat)


if __name__ == "__main__":
    main()
