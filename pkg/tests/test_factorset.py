import itertools

import pytest

from hlx.exactlin import GF, Matrix, Q, Subspace
from hlx.extension import is_stem, morphism_validate, rce_validate, relabel
from hlx.factorset import (
    FactorSet,
    InvalidFactorSet,
    NoInvariantComplement,
    NotStem,
    extension_from_factorset,
    factorset_from_extension,
    factorset_iso,
    factorset_space,
    factorset_validate,
    kernel_algebra,
    m_coordinates,
    transport_factorset,
)
from hlx.generate import generate_extension, h3, h3_stem, sl2, twisted2, twisted_kernel_extension
from hlx.homlie import abelian, center, derived, direct_sum
from hlx.isoclinism import SearchBudget, morphism_to_witness, search_isoclinism, witness_validate
from hlx.pairact import Pair

from pools import random_invertible


def test_h3_cocycle_is_valid():
    L, K = abelian(Q, 2), abelian(Q, 1)
    fs = FactorSet.from_support_values(L, K, L.full(), [[(0,), (1,)], [(-1,), (0,)]])
    rep = factorset_validate(fs)
    assert rep.ok and rep.info["beyond_paper"] == ["equivariance"]
    e = extension_from_factorset(fs, Pair(L, L.full()))
    assert rce_validate(e).ok and is_stem(e)


@pytest.mark.parametrize("slot,values", [
    ("diagonal", [[(1,), (0,)], [(0,), (0,)]]),
    ("skew", [[(0,), (1,)], [(1,), (0,)]]),
])
def test_shape_violations(slot, values):
    L, K = abelian(Q, 2), abelian(Q, 1)
    fs = FactorSet.from_support_values(L, K, L.full(), values)
    rep = factorset_validate(fs)
    assert slot in rep.failures()
    with pytest.raises(InvalidFactorSet):
        extension_from_factorset(fs, Pair(L, L.full()))


def test_cyclic_violation():
    # [e0, e1] = e1 plus a central e2; f(e1, e2) = k breaks the cyclic sum on (e0, e1, e2)
    L, K = direct_sum(twisted2(Q, 1), abelian(Q, 1)), abelian(Q, 1)
    t = [[(0,)] * 3 for _ in range(3)]
    t[1][2], t[2][1] = (1,), (-1,)
    fs = FactorSet.from_tensor(L, K, t, L.full())
    assert factorset_validate(fs).failures() == ["cyclic"]


def test_every_skew_form_on_sl2_is_cyclic():
    L, K = sl2(GF(3)), abelian(GF(3), 1)
    assert len(factorset_space(L, K, L.full())) == 3


def test_support_violation():
    L, K = h3(Q), abelian(Q, 1)
    z = center(L)
    t = [[(0,)] * 3 for _ in range(3)]
    t[0][1], t[1][0] = (1,), (-1,)
    fs = FactorSet.from_tensor(L, K, t, z)
    assert "support" in factorset_validate(fs).failures()


def test_equivariance_violation():
    L = abelian(Q, 2, Matrix.diag(Q, [2, 3]))
    K = abelian(Q, 1)
    fs = FactorSet.from_support_values(L, K, L.full(), [[(0,), (1,)], [(-1,), (0,)]])
    assert factorset_validate(fs).failures() == ["equivariance"]
    K6 = abelian(Q, 1, Matrix.diag(Q, [6]))
    fs6 = FactorSet.from_support_values(L, K6, L.full(), [[(0,), (1,)], [(-1,), (0,)]])
    assert factorset_validate(fs6).ok


def test_m_coordinates_projects_onto_support():
    L = direct_sum(h3(Q), abelian(Q, 1))
    m = derived(L) + center(L)
    pm = m_coordinates(L, m)
    assert pm.rows == m.dim and pm.cols == L.dim
    for r, b in enumerate(m.basis):
        assert pm.apply(b) == Q.unit(m.dim, r)


def _brute_space_size(L, K, M):
    """Count factor sets over F_p by enumerating every skew form on M's basis."""
    F = L.field
    d, k = M.dim, K.dim
    pairs = [(r, s) for r in range(d) for s in range(r + 1, d)]
    count = 0
    for values in itertools.product(itertools.product(F.elements(), repeat=k), repeat=len(pairs)):
        v = [[F.zero_vector(k) for _ in range(d)] for _ in range(d)]
        for (r, s), x in zip(pairs, values):
            v[r][s] = tuple(x)
            v[s][r] = F.scale(-1, x)
        fs = FactorSet.from_support_values(L, K, M, v)
        count += factorset_validate(fs).ok
    return count


@pytest.mark.parametrize("case", ["abelian3", "h3", "h3_center", "h3+a1", "abelian2_k2"])
def test_factorset_space_dimension_matches_enumeration(case):
    F = GF(2)
    K = abelian(F, 1)
    if case == "abelian3":
        L, M = abelian(F, 3), abelian(F, 3).full()
    elif case == "h3":
        L = h3(F)
        M = L.full()
    elif case == "h3_center":
        L = h3(F)
        M = center(L)
    elif case == "h3+a1":
        L = direct_sum(h3(F), abelian(F, 1))
        M = L.full()
    else:
        L, M, K = abelian(F, 2), abelian(F, 2).full(), abelian(F, 2)
    basis = factorset_space(L, K, M)
    assert all(factorset_validate(b).ok for b in basis)
    assert 2 ** len(basis) == _brute_space_size(L, K, M)


@pytest.mark.parametrize("seed", range(10))
def test_round_trip_through_factor_set(seed):
    e = generate_extension(seed, (4, 6), Q)
    try:
        ex = factorset_from_extension(e)
    except NoInvariantComplement:
        pytest.skip("no invariant complement")
    fs, mor = ex
    assert factorset_validate(fs).ok
    rep = morphism_validate(mor)
    assert rep.ok and rep.info["kind"] == "iso"
    assert mor.dest is e
    assert ex.transversal.dim + e.kernel.dim == e.domain.dim
    assert kernel_algebra(e).dim == e.kernel.dim


def jordan_kernel_extension():
    """``abelian(2)`` with a Jordan twist onto ``abelian(1)``; the kernel is the eigenline."""
    from hlx.extension import RelCentralExt, _finish
    from hlx.homlie import LinearMap
    from hlx.pairact import HomAction

    M = abelian(Q, 2, Matrix.from_rows(Q, [[1, 1], [0, 1]], 2))
    L = abelian(Q, 1)
    sig = LinearMap(M, L, Matrix.from_rows(Q, [[0, 1]], 2))
    return _finish(RelCentralExt(M, L, sig, HomAction.zero(L, M), L.full()), "jordan")


def test_extraction_needs_invariant_complement():
    with pytest.raises(NoInvariantComplement):
        factorset_from_extension(jordan_kernel_extension())
    # here the kernel as a whole splits off, only its part in [M*, L] does not
    ex = factorset_from_extension(twisted_kernel_extension(Q))
    assert morphism_validate(ex.morphism).ok


def _isoclinic_stems(F, seed=0):
    import random

    rng = random.Random(seed)
    s1 = h3_stem(F)
    s2, iso = relabel(s1, random_invertible(rng, F, 3), random_invertible(rng, F, 2))
    return s1, s2, iso


def test_transport_along_relabel():
    F = GF(3)
    s1, s2, iso = _isoclinic_stems(F)
    w = morphism_to_witness(iso)
    ex2 = factorset_from_extension(s2)
    tr = transport_factorset(ex2.factorset, w)
    assert factorset_validate(tr.factorset).ok
    rep = morphism_validate(tr.theta)
    assert rep.ok and rep.info["kind"] == "iso"


def test_transport_along_searched_witness():
    s1, s2, _ = _isoclinic_stems(GF(3), seed=2)
    res = search_isoclinism(s1, s2, SearchBudget("exhaustive"))
    assert res.found
    ex2 = factorset_from_extension(s2)
    tr = transport_factorset(ex2.factorset, res.value)
    assert morphism_validate(tr.theta).ok


def test_transport_needs_stems():
    e = generate_extension(0, (4, 6), Q, kind="product")
    from hlx.isoclinism import identity_witness

    ex = factorset_from_extension(e)
    if is_stem(e):
        pytest.skip("generated a stem")
    with pytest.raises(NotStem):
        transport_factorset(ex.factorset, identity_witness(e))


def test_factorset_iso_between_isoclinic_stems():
    F = GF(3)
    s1, s2, iso = _isoclinic_stems(F, seed=5)
    ex1, ex2 = factorset_from_extension(s1), factorset_from_extension(s2)
    tr = transport_factorset(ex2.factorset, morphism_to_witness(iso))
    total = tr.theta.inverse() @ ex2.morphism.inverse() @ iso @ ex1.morphism
    from hlx.extension import ExtMorphism

    total = ExtMorphism(total.gamma, total.beta, ex1.morphism.source, tr.source_extension)
    w = morphism_to_witness(total)
    assert witness_validate(w).ok
    fi = factorset_iso(ex1.factorset, tr.factorset, w)
    rep = morphism_validate(fi.morphism)
    assert rep.ok and rep.info["kind"] == "iso"
    assert fi.d.rows == ex1.factorset.kernel_space.dim and fi.d.cols == s1.target.dim


def test_zero_factor_set_gives_split_extension():
    L = h3(Q)
    K = abelian(Q, 2)
    fs = FactorSet.zero(L, K, L.full())
    assert fs.is_zero()
    e = extension_from_factorset(fs, Pair(L, L.full()))
    assert rce_validate(e).ok and e.kernel.dim == 2
    assert e.kernel.intersect(e.commutator).dim == 0
    assert Subspace.full(Q, 5) == e.domain.full()
