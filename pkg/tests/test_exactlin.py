from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from hlx.exactlin import (
    GF,
    FieldMismatch,
    Matrix,
    NoSolution,
    NotContained,
    NotFound,
    Q,
    Subspace,
    complement,
    cyclic_closure,
    invariant_complement,
    kernel,
    partial_invariant_complement,
    rref,
    solve,
)

small = st.integers(min_value=-3, max_value=3)


@st.composite
def q_matrices(draw, max_rows=5, max_cols=5):
    r = draw(st.integers(1, max_rows))
    c = draw(st.integers(1, max_cols))
    rows = draw(st.lists(st.lists(small, min_size=c, max_size=c), min_size=r, max_size=r))
    return Matrix.from_rows(Q, rows, c)


@st.composite
def fp_matrices(draw, p, max_rows=6, max_cols=6):
    r = draw(st.integers(1, max_rows))
    c = draw(st.integers(1, max_cols))
    rows = draw(st.lists(st.lists(st.integers(0, p - 1), min_size=c, max_size=c), min_size=r, max_size=r))
    return Matrix.from_rows(GF(p), rows, c)


def to_sympy(m):
    return sympy.Matrix(m.rows, m.cols, [sympy.Rational(x.numerator, x.denominator) for row in m.data for x in row])


def test_field_basics():
    F = GF(5)
    assert F.reduce(7) == 2
    assert F.inv(2) == 3
    assert F.reduce(Fraction(1, 2)) == 3
    with pytest.raises(ZeroDivisionError):
        GF(3).reduce(Fraction(1, 3))
    assert Q.reduce(3) == Fraction(3)
    assert type(Q.zero) is Fraction
    assert Q.descriptor == "Q" and F.descriptor == "Fp:5"
    assert type(Q).from_descriptor("Fp:5") == F
    with pytest.raises(ValueError):
        GF(4)


def test_rref_and_kernel_small():
    m = Matrix.from_rows(Q, [[1, 2, 3], [2, 4, 6], [1, 0, 1]], 3)
    red, piv = rref(m)
    assert piv == [0, 1]
    assert red.data[0] == (1, 0, 1) and red.data[1] == (0, 1, 1)
    k = kernel(m)
    assert k.dim == 1 and k.basis[0] == (1, 1, -1)


@settings(max_examples=60, deadline=None)
@given(q_matrices())
def test_rank_kernel_inverse_match_sympy(m):
    sm = to_sympy(m)
    assert m.rank == sm.rank()
    k = kernel(m)
    assert k.dim == m.cols - sm.rank()
    for v in k.basis:
        assert all(x == 0 for x in m.apply(v))
    red, piv = rref(m)
    sred, spiv = sm.rref()
    assert tuple(piv) == tuple(spiv)
    assert to_sympy(red) == sred
    if m.rows == m.cols and m.is_invertible:
        assert to_sympy(m.inverse()) == sm.inv()


@settings(max_examples=60, deadline=None)
@given(q_matrices(), st.lists(small, min_size=5, max_size=5))
def test_solve_matches_sympy(m, rhs):
    b = rhs[: m.rows]
    sm = to_sympy(m)
    aug = sm.row_join(sympy.Matrix(b))
    consistent = aug.rank() == sm.rank()
    if consistent:
        x = solve(m, b)
        assert m.apply(x) == Q.vector(b)
    else:
        with pytest.raises(NoSolution):
            solve(m, b)


@pytest.mark.parametrize("p", [2, 3, 7])
def test_prime_rref_uses_same_answer_above_kernel_threshold(p):
    # 20 x 20 goes through the compiled kernel; the pure path is the reference
    import random

    from hlx.exactlin import _rref_rows

    rng = random.Random(p)
    F = GF(p)
    rows = [[rng.randrange(p) for _ in range(20)] for _ in range(20)]
    rows[5] = [(a + b) % p for a, b in zip(rows[0], rows[1])]
    m = Matrix.from_rows(F, rows, 20)
    red, piv = rref(m)
    ref, rpiv = _rref_rows(F, rows, 20)
    assert piv == rpiv
    assert [list(r) for r in red.data] == ref


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_subspace_lattice_properties(data):
    p = data.draw(st.sampled_from([0, 2, 3]))
    F = Q if p == 0 else GF(p)
    n = data.draw(st.integers(1, 5))
    entries = small if p == 0 else st.integers(0, p - 1)
    vecs = st.lists(st.lists(entries, min_size=n, max_size=n), max_size=4)
    u = Subspace.span(F, n, data.draw(vecs))
    v = Subspace.span(F, n, data.draw(vecs))
    s, i = u + v, u.intersect(v)
    assert s.dim + i.dim == u.dim + v.dim
    assert i.le(u) and i.le(v) and u.le(s) and v.le(s)
    # canonical form: span of the basis reproduces the same object
    assert Subspace.span(F, n, u.basis) == u
    w = complement(u, s)
    assert (u + w) == s and u.intersect(w).dim == 0


def test_coordinates_and_containment():
    u = Subspace.span(Q, 3, [(1, 1, 0), (0, 1, 1)])
    x = (2, 5, 3)
    assert u.contains(x)
    c = u.coordinates(x)
    assert Q.combo(c, u.basis, 3) == Q.vector(x)
    with pytest.raises(NotContained):
        u.coordinates((1, 0, 0))


def test_preimage():
    m = Matrix.from_rows(Q, [[1, 0, 0], [0, 0, 0]], 3)
    target = Subspace.zero(Q, 2)
    assert kernel(m) == target.preimage(m)
    assert Subspace.full(Q, 2).preimage(m) == Subspace.full(Q, 3)


def test_cyclic_closure_and_invariant_complements():
    a = Matrix.from_rows(Q, [[0, 1, 0], [0, 0, 1], [1, 0, 0]], 3)
    assert cyclic_closure(a, (1, 0, 0)).dim == 3
    assert cyclic_closure(a, (1, 1, 1)).dim == 1
    u = Subspace.span(Q, 3, [(1, 1, 1)])
    w = invariant_complement(u, Subspace.full(Q, 3), a)
    assert w.dim == 2 and w.is_invariant(a) and (u + w).dim == 3

    jordan = Matrix.from_rows(Q, [[1, 1], [0, 1]], 2)
    eig = Subspace.span(Q, 2, [(1, 0)])
    with pytest.raises(NotFound):
        invariant_complement(eig, Subspace.full(Q, 2), jordan)
    w, full = partial_invariant_complement(eig, Subspace.full(Q, 2), jordan)
    assert not full and w.dim == 0


def test_field_mismatch_is_rejected():
    with pytest.raises(FieldMismatch):
        Subspace.full(Q, 2) + Subspace.full(GF(2), 2)


@settings(max_examples=40, deadline=None)
@given(fp_matrices(3), fp_matrices(3))
def test_matmul_associates_with_apply(a, b):
    if a.cols != b.rows:
        return
    v = tuple(range(b.cols))
    assert (a @ b).apply(v) == a.apply(b.apply(v))


def _brute_invariant_complement_exists(a, u):
    import itertools

    n = a.rows
    need = n - u.dim
    vecs = list(itertools.product(range(2), repeat=n))
    for combo in itertools.combinations(vecs, need):
        w = Subspace.span(GF(2), n, combo)
        if w.dim == need and w.is_invariant(a) and (u + w).dim == n:
            return True
    return False


@settings(max_examples=80, deadline=None)
@given(st.data())
def test_invariant_complement_is_found_exactly_when_one_exists(data):
    F = GF(2)
    n = data.draw(st.integers(1, 4))
    rows = data.draw(st.lists(st.lists(st.integers(0, 1), min_size=n, max_size=n), min_size=n, max_size=n))
    a = Matrix.from_rows(F, rows, n)
    v0 = data.draw(st.lists(st.integers(0, 1), min_size=n, max_size=n))
    u = cyclic_closure(a, v0)
    exists = _brute_invariant_complement_exists(a, u)
    full = Subspace.full(F, n)
    if exists:
        w = invariant_complement(u, full, a)
        assert w.is_invariant(a) and (u + w) == full and u.intersect(w).dim == 0
    else:
        with pytest.raises(NotFound):
            invariant_complement(u, full, a)
