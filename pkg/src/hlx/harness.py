"""Instance-check every constructive claim on generated extensions.

The report is plain JSON-ready data with no timings, so repeated runs with the
same arguments produce identical bytes.  Twist obstructions are listed as
findings but are not failures.
"""

from __future__ import annotations

import random

from .exactlin import Q, Field, Matrix
from .extension import (
    ExtMorphism,
    inclusion_extension,
    is_stem,
    lemma33_certificate,
    morphism_validate,
    product_with_abelian,
    prop26_embed,
    pullback,
    relabel,
    stem_reduce,
)
from .factorset import (
    NoInvariantComplement,
    factorset_from_extension,
    factorset_iso,
    transport_factorset,
)
from .generate import generate_extension
from .homlie import LinearMap, abelian
from .isoclinism import (
    IsoclinismWitness,
    SearchBudget,
    TwistObstructed,
    decompose_family,
    lemma1_check,
    morphism_to_witness,
    search_isoclinism,
    search_isomorphism,
    solve_beta_prime,
    witness_validate,
)
from .pairact import Pair, PairQuotient, forced_theta, pair_isoclinism_validate

__all__ = ["CLAIMS", "verify_suite"]

CLAIMS = (
    "lemma_2_3",
    "prop_2_4",
    "prop_2_5",
    "prop_2_6",
    "pairs_via_quotient",
    "lemma_3_3",
    "cor_3_4",
    "lemma_3_5",
    "prop_3_6",
    "cor_3_7",
    "theorem_3_8",
)

# exhaustive cross-checks only when the gamma space is this small
_SMALL = 4096


class _Claim(Exception):
    """A claim's conclusion failed on this instance."""


class _Skip(Exception):
    pass


def _need(cond, detail):
    if not cond:
        raise _Claim(detail)


def _is_kind(m: ExtMorphism, kinds) -> bool:
    rep = morphism_validate(m)
    return rep.ok and rep.info["kind"] in kinds


def _isoclinic(m: ExtMorphism, kinds, ledger) -> bool:
    if not _is_kind(m, kinds):
        return False
    w = morphism_to_witness(m)
    ledger.append(w)
    return witness_validate(w).ok


def _random_invertible(rng, f: Field, n: int) -> Matrix:
    while True:
        if f.is_prime:
            rows = [[rng.randrange(f.p) for _ in range(n)] for _ in range(n)]
        else:
            rows = [[rng.randint(-2, 2) for _ in range(n)] for _ in range(n)]
        m = Matrix.from_rows(f, rows, n)
        if m.is_invertible:
            return m


class _Run:
    def __init__(self, seed, count, field, bounds):
        self.seed, self.count, self.field, self.bounds = seed, count, field, bounds
        self.tally = {c: {"checked": 0, "passed": 0, "skipped": 0} for c in CLAIMS}
        self.findings = []
        self.witnesses = []  # every witness produced; all go through lemma1_check

    def record(self, claim, index, e, fn):
        t = self.tally[claim]
        try:
            fn()
        except _Skip as exc:
            t["skipped"] += 1
            if str(exc):
                self.findings.append(self._finding(claim, index, "skipped", str(exc), e))
            return
        except TwistObstructed as exc:
            t["skipped"] += 1
            self.findings.append(self._finding(claim, index, "twist_obstructed", str(exc), e))
            return
        except _Claim as exc:
            t["checked"] += 1
            self.findings.append(self._finding(claim, index, "failure", str(exc), e))
            return
        except Exception as exc:  # a construction blew up on a valid input: also a finding
            t["checked"] += 1
            self.findings.append(self._finding(claim, index, "failure", f"{type(exc).__name__}: {exc}", e))
            return
        t["checked"] += 1
        t["passed"] += 1

    def _finding(self, claim, index, kind, detail, e):
        from .serialize import encode

        doc = encode(e).as_json() if e is not None else None
        return {"claim": claim, "index": index, "kind": kind, "detail": detail, "extension": doc}


def _claims_for(run: _Run, i: int, e, prev_stem, rng):
    f = run.field
    ws = run.witnesses
    small = f.is_prime and f.p ** (e.codomain.dim ** 2) <= _SMALL

    # isoclinic partner e x A through the canonical monomorphism
    a_dim = rng.randint(1, 2)
    prod, pi, inc = product_with_abelian(e, abelian(f, a_dim))
    w_inc = morphism_to_witness(inc)
    ws.append(w_inc)

    def prop_2_4():
        pb = pullback(e, prod, w_inc.gamma)
        for m in (pb.to_first, pb.to_second):
            _need(_isoclinic(m, ("epi", "iso"), ws), "a pullback projection is not an isoclinic epimorphism")

    run.record("prop_2_4", i, e, prop_2_4)

    state = {}

    def prop_2_5():
        p26 = prop26_embed(e, prod, w_inc.gamma, w_inc)
        state["p26"] = p26
        for m in p26.into_products:
            _need(_isoclinic(m, ("mono", "iso"), ws), "an embedding into sigma pi is not an isoclinic monomorphism")

    run.record("prop_2_5", i, e, prop_2_5)

    def prop_2_6():
        p26 = state.get("p26") or prop26_embed(e, prod, w_inc.gamma, w_inc)
        for m in (p26.first, p26.second):
            _need(_is_kind(m, ("mono", "iso")), "delta_i is not a monomorphism")

    run.record("prop_2_6", i, e, prop_2_6)

    def pairs_via_quotient():
        p1 = Pair(e.codomain, e.target)
        q = _random_invertible(rng, f, e.codomain.dim)
        e_img, _ = relabel(e, Matrix.identity(f, e.domain.dim), q)
        p2 = Pair(e_img.codomain, e_img.target)
        q1, q2 = PairQuotient.of(p1), PairQuotient.of(p2)
        try:
            s1 = inclusion_extension(q1.quotient, q1.m_bar)
            s2 = inclusion_extension(q2.quotient, q2.m_bar)
        except Exception as exc:
            raise _Skip(f"the quotient pair has no inclusion extension: {exc}") from None
        # gamma-bar induced by q on the quotients
        gbar = q2.projection.matrix @ q @ q1.lift
        bp = solve_beta_prime(s1, s2, gbar)
        _need(bp is not None, "no beta' for the induced gamma")
        w = IsoclinismWitness(LinearMap(s1.codomain, s2.codomain, gbar), bp, s1, s2)
        _need(witness_validate(w).ok, "the induced quotient witness is not an isoclinism")
        ws.append(w)
        phi = LinearMap(q1.quotient, q2.quotient, gbar)
        theta = forced_theta(q1, q2, phi)
        _need(theta is not None, "theta is not forced by phi")
        _need(pair_isoclinism_validate(p1, p2, phi, theta, q1, q2).ok, "the induced pair map is not an isoclinism")

    run.record("pairs_via_quotient", i, e, pairs_via_quotient)

    def lemma_3_3():
        sr = stem_reduce(e)
        state["sr"] = sr
        if sr.twist_obstructed:
            raise TwistObstructed("no invariant complement of Ker cap [M*, L] in Ker")
        _need(is_stem(sr.extension), "the reduction is not stem")
        _need(lemma33_certificate(sr.extension).ok, "a kernel closure avoids [M*, L]")
        # part 2 on the stem and a relabelled copy
        stem = sr.extension
        other, _ = relabel(stem, _random_invertible(rng, f, stem.domain.dim),
                           _random_invertible(rng, f, stem.codomain.dim))
        _need(other.kernel.dim == stem.kernel.dim and other.domain.dim == stem.domain.dim,
              "isoclinic stems differ in dim Ker or dim M*")

    run.record("lemma_3_3", i, e, lemma_3_3)

    def cor_3_4():
        sr = state.get("sr") or stem_reduce(e)
        if sr.twist_obstructed:
            raise TwistObstructed("stem reduction obstructed by the twist")
        _need(is_stem(sr.extension), "the reduction is not stem")
        _need(_isoclinic(sr.morphism, ("epi", "iso"), ws), "sigma -> sigma-bar is not an isoclinic epimorphism")

    run.record("cor_3_4", i, e, cor_3_4)

    def lemma_3_5():
        try:
            ex = factorset_from_extension(e)
        except NoInvariantComplement:
            raise TwistObstructed("Ker sigma has no invariant complement") from None
        _need(_is_kind(ex.morphism, ("iso",)), "sigma_f -> sigma is not an isomorphism")
        sr = state.get("sr") or stem_reduce(e)
        if sr.twist_obstructed:
            raise TwistObstructed("no stem reduction")
        s1 = sr.extension
        s2, iso12 = relabel(s1, _random_invertible(rng, f, s1.domain.dim),
                            _random_invertible(rng, f, s1.codomain.dim))
        w12 = morphism_to_witness(iso12)
        ws.append(w12)
        try:
            ex1, ex2 = factorset_from_extension(s1), factorset_from_extension(s2)
        except NoInvariantComplement:
            raise TwistObstructed("a stem kernel has no invariant complement") from None
        tr = transport_factorset(ex2.factorset, w12)
        _need(_is_kind(tr.theta, ("iso",)), "theta: sigma_1g -> sigma_2h is not an isomorphism")
        state["chain"] = (s1, s2, iso12, ex1, ex2, tr)

    run.record("lemma_3_5", i, e, lemma_3_5)

    def prop_3_6():
        if "chain" not in state:
            raise _Skip("")
        s1, s2, iso12, ex1, ex2, tr = state["chain"]
        # sigma_f -> sigma_1 -> sigma_2 -> sigma_2h -> sigma_1g, all isomorphisms
        total = tr.theta.inverse() @ ex2.morphism.inverse() @ iso12 @ ex1.morphism
        total = ExtMorphism(total.gamma, total.beta, ex1.morphism.source, tr.source_extension)
        w = morphism_to_witness(total)
        _need(witness_validate(w).ok, "the composite is not an isoclinism")
        ws.append(w)
        fi = factorset_iso(ex1.factorset, tr.factorset, w)
        _need(_is_kind(fi.morphism, ("iso",)), "lambda is not an isomorphism")

    run.record("prop_3_6", i, e, prop_3_6)

    def cor_3_7():
        if "chain" not in state:
            raise _Skip("")
        s1, s2, iso12, *_ = state["chain"]
        # isomorphic implies isoclinic, and the isoclinism chain above produced an isomorphism
        w = morphism_to_witness(iso12)
        _need(witness_validate(w).ok, "an isomorphism of stems is not an isoclinism")
        if small and prev_stem is not None and prev_stem.field == s1.field:
            b = SearchBudget("exhaustive")
            for other in (s2, prev_stem):
                ic = search_isoclinism(s1, other, b)
                im = search_isomorphism(s1, other, b)
                _need(ic.found == im.found, "stem extensions isoclinic but not isomorphic, or the reverse")
                if ic.found:
                    ws.append(ic.value)
                    _need(s1.kernel.dim == other.kernel.dim and s1.domain.dim == other.domain.dim,
                          "isoclinic stems differ in dim Ker or dim M*")

    run.record("cor_3_7", i, e, cor_3_7)

    def theorem_3_8():
        d = decompose_family(e)
        _need(is_stem(d.stem), "the stem part is not stem")
        _need(all(all(c == 0 for c in v) for row in d.abelian.bracket for v in row), "A is not abelian")
        _need(d.abelian.dim == e.kernel.dim - e.kernel.intersect(e.commutator).dim, "dim A is wrong")
        _need(_is_kind(d.iso, ("iso",)), "the certificate is not an isomorphism")
        state["stem"] = d.stem

    run.record("theorem_3_8", i, e, theorem_3_8)
    return state.get("stem") or (state["sr"].extension if "sr" in state and not state["sr"].twist_obstructed
                                 else None)


def verify_suite(seed: int, count: int, field: Field = Q, bounds: tuple[int, int] = (4, 6)) -> dict:
    run = _Run(seed, count, field, bounds)
    rng = random.Random(f"suite:{seed}:{field.descriptor}")
    prev_stem = None
    for i in range(count):
        e = generate_extension(seed * 1_000_003 + i, bounds, field)
        prev_stem = _claims_for(run, i, e, prev_stem, rng)
        # lemma1_check on every witness built for this instance
        batch, run.witnesses = run.witnesses, []

        def lemma_2_3(batch=batch):
            for w in batch:
                rep = lemma1_check(w)
                _need(rep.ok, f"lemma parts fail: {rep.failures()}")

        run.record("lemma_2_3", i, e, lemma_2_3)
    hard = [x for x in run.findings if x["kind"] == "failure"]
    return {
        "seed": seed,
        "count": count,
        "field": field.descriptor,
        "bounds": list(bounds),
        "claims": run.tally,
        "findings": run.findings,
        "hard_failures": len(hard),
        "ok": not hard,
    }
