import random

import numpy as np
import pytest

from hlx.exactlin import GF, FieldMismatch, Matrix, Q
from hlx.extension import (
    ExtMorphism,
    InvalidWitness,
    inclusion_extension,
    is_stem,
    morphism_validate,
    product_with_abelian,
    relabel,
)
from hlx.generate import generate_extension, h3_stem, twisted2, twisted_kernel_extension
from hlx.homlie import LinearMap, abelian
from hlx.isoclinism import (
    IsoclinismWitness,
    SearchBudget,
    TwistObstructed,
    compose_witnesses,
    decompose_family,
    identity_witness,
    lemma1_check,
    morphism_to_witness,
    search_isoclinism,
    search_isomorphism,
    solve_beta_prime,
    witness_validate,
)

import oracle
from pools import gf2_stem_pool, random_invertible

EXH = SearchBudget("exhaustive")


def gf3_pool():
    F = GF(3)
    t2 = twisted2(F, 1)
    a2 = abelian(F, 2, Matrix.diag(F, [1, 2]))
    pool = [
        inclusion_extension(abelian(F, 1), abelian(F, 1).full(), "a1"),
        inclusion_extension(a2, a2.full(), "a2tw"),
        inclusion_extension(t2, t2.full(), "t2"),
        inclusion_extension(t2, t2.span([(0, 1)]), "t2d"),
    ]
    rng = random.Random(1)
    e, _ = relabel(pool[2], random_invertible(rng, F, 2), random_invertible(rng, F, 2), "t2'")
    pool.append(e)
    pool.append(generate_extension(2, (2, 2), F, kind="factorset"))
    return pool


def test_gf3_pool_agrees_with_oracle():
    pool = gf3_pool()
    for a in pool:
        for b in pool:
            ic = search_isoclinism(a, b, EXH)
            im = search_isomorphism(a, b, EXH)
            assert ic.found == oracle.isoclinic(a, b), (a.name, b.name)
            assert im.found == oracle.isomorphic(a, b), (a.name, b.name)
            if ic.found:
                assert witness_validate(ic.value).ok
                assert lemma1_check(ic.value).ok


def test_beta_prime_is_forced_by_gamma():
    # the oracle lists every valid (gamma, beta') pair; each gamma admits exactly one beta'
    pool = gf2_stem_pool()
    checked = 0
    for a in pool[:8]:
        for b in pool[:8]:
            pairs = oracle.isoclinism_witnesses(a, b, first_only=False)
            by_gamma = {}
            for g, table in pairs:
                by_gamma.setdefault(g.tobytes(), []).append(table)
            for key, tables in by_gamma.items():
                assert len(tables) == 1
                g = np.frombuffer(key, dtype=np.int64).reshape(a.codomain.dim, a.codomain.dim)
                bp = solve_beta_prime(a, b, Matrix.from_rows(GF(2), g.tolist(), a.codomain.dim))
                assert bp is not None
                w = IsoclinismWitness(LinearMap(a.codomain, b.codomain, Matrix.from_rows(GF(2), g.tolist())),
                                      bp, a, b)
                for x, y in tables[0].items():
                    if any(x):
                        assert w.apply(x) == y
                checked += 1
    assert checked > 10


def test_witness_validate_slots():
    e = h3_stem(Q)
    w = identity_witness(e)
    assert witness_validate(w).ok
    bad = IsoclinismWitness(w.gamma, Matrix.zeros(Q, 1, 1), e, e)
    assert "beta_prime_iso" in witness_validate(bad).failures()
    bad = IsoclinismWitness(w.gamma, Matrix.identity(Q, 1).scaled(2), e, e)
    assert witness_validate(bad).failures() == ["compatibility"]
    bad = IsoclinismWitness(LinearMap(e.codomain, e.codomain, Matrix.zeros(Q, 2, 2)), w.beta_prime, e, e)
    assert "gamma_iso" in witness_validate(bad).failures()
    bad = IsoclinismWitness(w.gamma, Matrix.identity(Q, 2), e, e)
    assert witness_validate(bad).failures() == ["shape"]
    with pytest.raises(InvalidWitness):
        lemma1_check(IsoclinismWitness(w.gamma, Matrix.identity(Q, 1).scaled(2), e, e))


def test_gamma_scaling_changes_beta_prime():
    e = h3_stem(Q)
    g = Matrix.diag(Q, [2, 3])
    bp = solve_beta_prime(e, e, g)
    assert bp == Matrix.from_rows(Q, [[6]], 1)
    w = IsoclinismWitness(LinearMap(e.codomain, e.codomain, g), bp, e, e)
    assert witness_validate(w).ok and lemma1_check(w).ok


def test_compose_and_inverse():
    rng = random.Random(4)
    F = GF(3)
    e = h3_stem(F)
    e2, iso = relabel(e, random_invertible(rng, F, 3), random_invertible(rng, F, 2))
    e3, iso2 = relabel(e2, random_invertible(rng, F, 3), random_invertible(rng, F, 2))
    w12, w23 = morphism_to_witness(iso), morphism_to_witness(iso2)
    w13 = compose_witnesses(w23, w12)
    assert witness_validate(w13).ok and lemma1_check(w13).ok
    assert witness_validate(w13.inverse()).ok
    with pytest.raises(ValueError):
        compose_witnesses(w12, w12)


def test_verify_mode():
    e = h3_stem(Q)
    prod, _, _ = product_with_abelian(e, abelian(Q, 1))
    found = search_isoclinism(e, prod, SearchBudget("heuristic"))
    assert found.found
    again = search_isoclinism(e, prod, SearchBudget("verify"), found.value)
    assert again.found
    w = found.value
    broken = IsoclinismWitness(w.gamma, w.beta_prime.scaled(2), e, prod)
    res = search_isoclinism(e, prod, SearchBudget("verify"), broken)
    assert res.status == "not_found" and "compatibility" in res.reason
    with pytest.raises(ValueError):
        search_isoclinism(e, prod, SearchBudget("verify"))


def test_exhaustive_over_q_is_refused():
    e = h3_stem(Q)
    with pytest.raises(ValueError):
        search_isoclinism(e, e, EXH)
    with pytest.raises(ValueError):
        search_isomorphism(e, e, EXH)


def test_budget_exhaustion():
    e = h3_stem(GF(3))
    res = search_isoclinism(e, e, SearchBudget("exhaustive", max_candidates=10))
    assert res.status == "budget_exhausted"
    assert not res.found and not res


def test_invariant_filter_gives_reasoned_not_found():
    F = GF(2)
    a = inclusion_extension(abelian(F, 2), abelian(F, 2).full())
    res = search_isoclinism(a, h3_stem(F), EXH)
    assert res.status == "not_found" and res.reason.startswith("invariants differ")


def test_heuristic_inconclusive_is_budget_exhausted():
    # over Q, h3 and abelian(2) extensions with matching invariants do not exist, so compare
    # two non-isoclinic twisted algebras with equal filter dimensions
    L1 = abelian(Q, 2, Matrix.diag(Q, [2, 3]))
    L2 = abelian(Q, 2, Matrix.diag(Q, [2, 5]))
    e1, e2 = inclusion_extension(L1, L1.full()), inclusion_extension(L2, L2.full())
    res = search_isoclinism(e1, e2, SearchBudget("heuristic"))
    assert res.status == "budget_exhausted" and "inconclusive" in res.reason


def test_heuristic_finds_relabelled_isomorphism_over_q():
    e = h3_stem(Q)
    P = Matrix.from_rows(Q, [[0, 1, 0], [1, 0, 0], [0, 0, -1]], 3)
    Qm = Matrix.from_rows(Q, [[0, 1], [1, 0]], 2)
    e2, _ = relabel(e, P, Qm)
    res = search_isomorphism(e, e2, SearchBudget("heuristic"))
    assert res.found
    assert morphism_validate(res.value).ok


def test_isomorphism_verify_mode():
    e = h3_stem(Q)
    m = ExtMorphism.identity(e)
    assert search_isomorphism(e, e, SearchBudget("verify"), m).found
    z = ExtMorphism(m.gamma, LinearMap(e.domain, e.domain, Matrix.zeros(Q, 3, 3)), e, e)
    assert search_isomorphism(e, e, SearchBudget("verify"), z).status == "not_found"


def test_field_mismatch():
    with pytest.raises(FieldMismatch):
        search_isoclinism(h3_stem(Q), h3_stem(GF(2)), SearchBudget("heuristic"))


def test_decompose_product():
    e = h3_stem(Q)
    A = abelian(Q, 2, Matrix.diag(Q, [2, 3]))
    prod, _, _ = product_with_abelian(e, A)
    d = decompose_family(prod)
    stem, ab, iso = d
    assert is_stem(stem)
    k = prod.kernel
    assert ab.dim == k.dim - k.intersect(prod.commutator).dim == 2
    rep = morphism_validate(iso)
    assert rep.ok and rep.info["kind"] == "iso"
    assert all(r.ok for r in d.certificates.values())


@pytest.mark.parametrize("seed", range(8))
def test_decompose_generated(seed):
    e = generate_extension(seed, (4, 6), Q, kind="product")
    try:
        d = decompose_family(e)
    except TwistObstructed:
        pytest.skip("twist obstruction")
    k = e.kernel
    assert d.abelian.dim == k.dim - k.intersect(e.commutator).dim
    assert morphism_validate(d.iso).info["kind"] == "iso"


def test_decompose_twist_obstruction():
    with pytest.raises(TwistObstructed):
        decompose_family(twisted_kernel_extension(Q))


def test_decompose_with_derived_flag():
    e, _, _ = product_with_abelian(h3_stem(Q), abelian(Q, 1))
    d = decompose_family(e, use_derived=True)
    assert morphism_validate(d.iso).info["kind"] == "iso"
