"""Isoclinism and isomorphism witnesses, their validation, and the searches.

A witness ``(gamma, beta')`` stores ``beta'`` in the coordinates of the
commutator subspaces ``[M1*, L1]`` and ``[M2*, L2]``.  Given ``gamma`` the map
``beta'`` is forced on the spanning set ``{^l alpha*(m)}``, so every search
enumerates ``gamma`` only and solves for the rest.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from . import _kernels
from .checks import PASS, Check, Report, fail
from .exactlin import FieldMismatch, Matrix, NoSolution, Subspace, kernel, partial_invariant_complement, solve
from .extension import (
    ConstructionError,
    ExtMorphism,
    InvalidWitness,
    RelCentralExt,
    is_stem,
    morphism_validate,
    product_with_abelian,
    quotient_ext,
    relevant_commutator,
    subalgebra_ext,
)
from .homlie import HomLieAlgebra, LinearMap, NotASubalgebra, is_morphism, subalgebra
from .pairact import DomainMismatch, Pair, PairQuotient, forced_theta, pair_isoclinism_validate

__all__ = [
    "IsoclinismWitness",
    "SearchBudget",
    "SearchResult",
    "TwistObstructed",
    "CertificationFailed",
    "witness_validate",
    "lemma1_check",
    "morphism_to_witness",
    "identity_witness",
    "compose_witnesses",
    "solve_beta_prime",
    "search_isoclinism",
    "search_isomorphism",
    "pair_search_isoclinism",
    "decompose_family",
    "ISOCLINISM_INVARIANTS",
]


class TwistObstructed(ValueError):
    pass


class CertificationFailed(RuntimeError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


# dimensions preserved by every isoclinism; Ker sigma and Z(M*, L) are not
ISOCLINISM_INVARIANTS = (
    "dim_L", "dim_M", "dim_commutator", "dim_kernel_cap_commutator", "dim_center_L", "dim_derived_L",
)


@lru_cache(maxsize=512)
def _commutator_algebra(e: RelCentralExt) -> HomLieAlgebra:
    C, _ = subalgebra(e.domain, e.commutator, name="[M*, L]")
    return C


@dataclass(frozen=True, eq=False)
class IsoclinismWitness:
    gamma: LinearMap  # L1 -> L2
    beta_prime: Matrix  # commutator coordinates, dim C2 x dim C1
    source: RelCentralExt
    dest: RelCentralExt

    def beta_map(self) -> LinearMap:
        return LinearMap(_commutator_algebra(self.source), _commutator_algebra(self.dest), self.beta_prime)

    def apply(self, x) -> tuple:
        """``beta'`` on an ambient vector of ``[M1*, L1]``."""
        c1, c2 = self.source.commutator, self.dest.commutator
        return c2.basis_matrix().apply(self.beta_prime.apply(c1.coordinates(x)))

    def inverse(self) -> "IsoclinismWitness":
        return IsoclinismWitness(self.gamma.inverse(), self.beta_prime.inverse(), self.dest, self.source)


def identity_witness(e: RelCentralExt) -> IsoclinismWitness:
    return IsoclinismWitness(LinearMap.identity(e.codomain), Matrix.identity(e.field, e.commutator.dim), e, e)


def compose_witnesses(second: IsoclinismWitness, first: IsoclinismWitness) -> IsoclinismWitness:
    """``second o first``."""
    if first.dest is not second.source:
        raise ValueError("witnesses do not compose")
    return IsoclinismWitness(second.gamma @ first.gamma, second.beta_prime @ first.beta_prime,
                             first.source, second.dest)


def morphism_to_witness(m: ExtMorphism) -> IsoclinismWitness:
    """Restrict ``beta`` to the commutators; raises InvalidWitness if it does not land in ``[M2*, L2]``."""
    c1, c2 = m.source.commutator, m.dest.commutator
    cols = []
    for x in c1.basis:
        y = m.beta(x)
        if not c2.contains(y):
            raise InvalidWitness("beta does not map [M1*, L1] into [M2*, L2]")
        cols.append(c2.coordinates(y))
    return IsoclinismWitness(LinearMap(m.source.codomain, m.dest.codomain, m.gamma.matrix),
                             Matrix.from_columns(m.source.field, cols, c2.dim), m.source, m.dest)


def _partners(e1, e2, gamma: Matrix):
    """``m2`` with ``sigma2 alpha2*(m2) = gamma sigma1 alpha1*(e_j)`` for each ``j``, or None."""
    s2 = e2.sigma.matrix @ e2.domain.alpha
    g1 = gamma @ e1.sigma.matrix @ e1.domain.alpha
    out = []
    for j in range(e1.domain.dim):
        try:
            out.append(solve(s2, g1.column(j)))
        except NoSolution:
            return None
    return out


def _well_defined(e2) -> Check:
    M2, L2 = e2.domain, e2.codomain
    amb = kernel(e2.sigma.matrix @ M2.alpha)
    z = M2.field.zero_vector(M2.dim)
    for r, k in enumerate(amb.basis):
        ak = M2.alpha.apply(k)
        for i in range(L2.dim):
            if e2.action.act(L2.e(i), ak) != z:
                return fail((i, r), "^l alpha*(k) != 0 for k in Ker(sigma2 alpha2*)")
    return PASS


def witness_validate(w: IsoclinismWitness) -> Report:
    e1, e2 = w.source, w.dest
    rep = Report()
    if e1.field != e2.field:
        raise FieldMismatch("extensions over different fields")
    L1, L2 = e1.codomain, e2.codomain
    g = w.gamma
    if g.domain != L1 or g.codomain != L2:
        rep.add("shape", fail("gamma", "gamma must map L1 to L2"))
        return rep
    c1, c2 = e1.commutator, e2.commutator
    if w.beta_prime.rows != c2.dim or w.beta_prime.cols != c1.dim:
        rep.add("shape", fail("beta_prime", f"beta' must be {c2.dim} x {c1.dim}"))
        return rep
    rep.add("shape", PASS)
    if not g.is_bijective():
        rep.add("gamma_iso", fail("gamma", "gamma is not bijective"))
    else:
        chk = is_morphism(g)
        rep.add("gamma_iso", chk if chk else fail(chk.witness, "gamma: " + chk.detail))
    rep.add("target", PASS if e1.target.image(g.matrix) == e2.target else fail(None, "gamma(M1) != M2"))
    bmap = w.beta_map()
    if not bmap.is_bijective():
        rep.add("beta_prime_iso", fail("beta_prime", "beta' is not bijective"))
    else:
        chk = is_morphism(bmap)
        rep.add("beta_prime_iso", chk if chk else fail(chk.witness, "beta': " + chk.detail))

    comp = PASS
    if rep["gamma_iso"].ok:
        m2s = _partners(e1, e2, g.matrix)
        if m2s is None:
            comp = fail(None, "some gamma sigma1 alpha1*(m1) is not a sigma2 alpha2* image")
        else:
            shift = L2.alpha_inverse @ g.matrix @ L1.alpha
            M1, M2 = e1.domain, e2.domain
            for i in range(L1.dim):
                l2 = shift.column(i)
                for j in range(M1.dim):
                    x = e1.action.act(L1.e(i), M1.alpha.column(j))
                    y = e2.action.act(l2, M2.alpha.apply(m2s[j]))
                    if w.apply(x) != y:
                        comp = fail((i, j), "beta'(^l1 alpha1*(m1)) != ^l2 alpha2*(m2)")
                        break
                if not comp:
                    break
    else:
        comp = fail(None, "gamma is not an isomorphism")
    rep.add("compatibility", comp)
    rep.add("well_defined", _well_defined(e2))
    return rep


def lemma1_check(w: IsoclinismWitness) -> Report:
    chk = witness_validate(w)
    if not chk:
        raise InvalidWitness(f"witness fails {chk.failures()}")
    e1, e2 = w.source, w.dest
    L1, L2 = e1.codomain, e2.codomain
    c1 = e1.commutator
    g = w.gamma
    rep = Report()
    p1 = PASS
    for r, x in enumerate(c1.basis):
        if g(e1.sigma(x)) != e2.sigma(w.apply(x)):
            p1 = fail(r, "gamma sigma1(x) != sigma2 beta'(x)")
            break
    rep.add("part1", p1)
    k1 = e1.kernel.intersect(c1)
    k2 = e2.kernel.intersect(e2.commutator)
    img = e2.domain.span([w.apply(x) for x in k1.basis])
    rep.add("part2", PASS if img == k2 else fail(None, "beta'(Ker1 cap C1) != Ker2 cap C2"))
    p3 = PASS
    shift = L2.alpha_inverse @ g.matrix @ L1.alpha
    for i in range(L1.dim):
        l2 = shift.column(i)
        for r, x in enumerate(c1.basis):
            if w.apply(e1.action.act(L1.e(i), x)) != e2.action.act(l2, w.apply(x)):
                p3 = fail((i, r), "beta'(^l1 x) != ^l2 beta'(x)")
                break
        if not p3:
            break
    rep.add("part3", p3)
    return rep


def solve_beta_prime(e1: RelCentralExt, e2: RelCentralExt, gamma: Matrix) -> Matrix | None:
    """The unique ``beta'`` compatible with ``gamma``, or None when the linear system is inconsistent."""
    c1, c2 = e1.commutator, e2.commutator
    if c1.dim != c2.dim:
        return None
    f = e1.field
    if c1.dim == 0:
        return Matrix.zeros(f, 0, 0)
    m2s = _partners(e1, e2, gamma)
    if m2s is None:
        return None
    L1, L2, M1, M2 = e1.codomain, e2.codomain, e1.domain, e2.domain
    shift = L2.alpha_inverse @ gamma @ L1.alpha
    xs, ys = [], []
    for i in range(L1.dim):
        l2 = shift.column(i)
        for j in range(M1.dim):
            xs.append(c1.coordinates(e1.action.act(L1.e(i), M1.alpha.column(j))))
            y = e2.action.act(l2, M2.alpha.apply(m2s[j]))
            if not c2.contains(y):
                return None
            ys.append(c2.coordinates(y))
    # beta' X = Y  <=>  X^T beta'^T = Y^T
    xt = Matrix.from_rows(f, xs, c1.dim)
    rows = []
    for r in range(c2.dim):
        try:
            rows.append(solve(xt, [y[r] for y in ys]))
        except NoSolution:
            return None
    bp = Matrix.from_rows(f, rows, c1.dim)
    return bp if bp.is_invertible else None


# ----------------------------------------------------------------------------
# search machinery
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class SearchBudget:
    mode: str = "exhaustive"  # verify | exhaustive | heuristic
    max_candidates: int = 10 ** 7
    seed: int = 0

    def __post_init__(self):
        if self.mode not in ("verify", "exhaustive", "heuristic"):
            raise ValueError(f"unknown search mode {self.mode!r}")
        if self.max_candidates < 0:
            raise ValueError("max_candidates must be non-negative")


@dataclass
class SearchResult:
    status: str  # found | not_found | budget_exhausted
    value: object = None
    reason: str = ""
    explored: int = 0

    @property
    def found(self) -> bool:
        return self.status == "found"

    def __bool__(self):
        return self.found


@dataclass
class _Tally:
    explored: int = 0
    exhausted: bool = False
    complete: bool = True
    notes: list = field(default_factory=list)


_CHUNK = 1 << 15
_HEURISTIC_SCALARS = (1, -1, 2, -2, Fraction(1, 2), Fraction(-1, 2))
_RANDOM_TRIES = 256


def _iso_candidates(A: HomLieAlgebra, B: HomLieAlgebra, sub_a: Subspace, sub_b: Subspace,
                    budget: SearchBudget, tally: _Tally):
    """Hom-Lie isomorphisms ``A -> B`` carrying ``sub_a`` onto ``sub_b``, in lexicographic order."""
    f, n = A.field, A.dim
    if n != B.dim:
        return
    if budget.mode == "exhaustive":
        if not f.is_prime:
            raise ValueError("exhaustive search needs a prime field")
        p = f.p
        total = p ** (n * n)
        if total > budget.max_candidates:
            tally.exhausted = True
            tally.notes.append(f"{p}^{n * n} candidate matrices exceed the budget")
            return
        c1, a1 = A.mod_arrays()
        c2, a2 = B.mod_arrays()
        for start in range(0, total, _CHUNK):
            stop = min(total, start + _CHUNK)
            idxs = _kernels.morphism_candidates(n, n, p, c1, a1, c2, a2, start, stop, True)
            tally.explored = stop
            for idx in idxs:
                g = Matrix.from_rows(f, _kernels.decode(int(idx), p, n, n), n)
                if sub_a.image(g) == sub_b:
                    yield g
        return

    # heuristic: scaled permutation matrices, then seeded random small matrices
    tally.complete = False
    scalars = []
    for s in _HEURISTIC_SCALARS:
        try:
            v = f.reduce(s)
        except ZeroDivisionError:
            continue
        if v != 0 and v not in scalars:
            scalars.append(v)
    seen = set()

    def _try(g):
        if g.data in seen:
            return None
        seen.add(g.data)
        tally.explored += 1
        if not g.is_invertible or sub_a.image(g) != sub_b:
            return None
        return g if is_morphism(LinearMap(A, B, g)) else None

    for perm in itertools.permutations(range(n)):
        for sc in itertools.product(scalars, repeat=n):
            if tally.explored >= budget.max_candidates:
                tally.exhausted = True
                return
            rows = [[f.zero] * n for _ in range(n)]
            for c, r in enumerate(perm):
                rows[r][c] = sc[c]
            g = _try(Matrix.from_rows(f, rows, n))
            if g is not None:
                yield g
    rng = random.Random(budget.seed)
    for _ in range(_RANDOM_TRIES):
        if tally.explored >= budget.max_candidates:
            tally.exhausted = True
            return
        g = _try(Matrix.from_rows(f, [[rng.choice((-1, 0, 1)) for _ in range(n)] for _ in range(n)], n))
        if g is not None:
            yield g


def _end(tally: _Tally, what: str) -> SearchResult:
    if tally.exhausted:
        return SearchResult("budget_exhausted", None, "; ".join(tally.notes) or "candidate budget exhausted",
                            tally.explored)
    if not tally.complete:
        return SearchResult("budget_exhausted", None, f"heuristic search found no {what}; inconclusive",
                            tally.explored)
    return SearchResult("not_found", None, f"no {what} exists", tally.explored)


def _mismatch(i1: dict, i2: dict, keys) -> list[str]:
    return [k for k in keys if i1[k] != i2[k]]


def search_isoclinism(e1: RelCentralExt, e2: RelCentralExt, budget: SearchBudget = SearchBudget(),
                      witness: IsoclinismWitness | None = None) -> SearchResult:
    if e1.field != e2.field:
        raise FieldMismatch("extensions over different fields")
    if budget.mode == "verify":
        if witness is None:
            raise ValueError("verify mode needs a witness")
        rep = witness_validate(witness)
        if rep:
            return SearchResult("found", witness, "witness validates", 1)
        return SearchResult("not_found", None, f"witness fails {rep.failures()}", 1)
    i1, i2 = e1.invariants(), e2.invariants()
    bad = _mismatch(i1, i2, ISOCLINISM_INVARIANTS)
    if bad:
        return SearchResult("not_found", None, "invariants differ: " + ", ".join(bad), 0)
    tally = _Tally()
    L1, L2 = e1.codomain, e2.codomain
    for g in _iso_candidates(L1, L2, e1.target, e2.target, budget, tally):
        bp = solve_beta_prime(e1, e2, g)
        if bp is None:
            continue
        w = IsoclinismWitness(LinearMap(L1, L2, g), bp, e1, e2)
        if witness_validate(w):
            return SearchResult("found", w, "", tally.explored)
    return _end(tally, "isoclinism")


def _affine_betas(e1: RelCentralExt, e2: RelCentralExt, gamma: Matrix):
    """Affine family ``beta0 + span(dirs)`` of linear ``beta`` meeting every isomorphism condition but bijectivity.

    Returns None when no ``beta`` exists.  Any two solutions differ by a map
    into ``Ker sigma2``, which is central, so the bracket condition is linear.
    """
    f = e1.field
    M1, M2 = e1.domain, e2.domain
    d1, d2 = M1.dim, M2.dim
    nvar = d2 * d1  # entry (r, c) of beta is unknown r * d1 + c
    s2 = e2.sigma.matrix
    rhs_sig = gamma @ e1.sigma.matrix
    rows, rhs = [], []
    for i in range(s2.rows):
        for c in range(d1):
            row = [f.zero] * nvar
            for r in range(d2):
                row[r * d1 + c] = s2.data[i][r]
            rows.append(row)
            rhs.append(rhs_sig.data[i][c])
    a1, a2 = M1.alpha.data, M2.alpha.data
    for r in range(d2):
        for c in range(d1):
            row = [f.zero] * nvar
            for u in range(d1):
                row[r * d1 + u] = row[r * d1 + u] + a1[u][c]
            for u in range(d2):
                row[u * d1 + c] = row[u * d1 + c] - a2[r][u]
            rows.append([f.reduce(x) for x in row])
            rhs.append(f.zero)
    if nvar == 0:
        return Matrix.zeros(f, d2, d1), []
    A = Matrix.from_rows(f, rows, nvar) if rows else Matrix.zeros(f, 0, nvar)
    try:
        x0 = solve(A, rhs)
    except NoSolution:
        return None
    null = kernel(A).basis

    def as_matrix(x):
        return Matrix.from_rows(f, [x[r * d1:(r + 1) * d1] for r in range(d2)], d1)

    beta0 = as_matrix(x0)
    dirs = [as_matrix(v) for v in null]
    if not dirs:
        return (beta0, []) if _brackets_ok(M1, M2, beta0) else None
    # bracket: (beta0 + sum t_i D_i)[e_a, e_b] = [beta0 e_a, beta0 e_b]
    brows, brhs = [], []
    for a in range(d1):
        for b in range(a + 1, d1):
            cab = M1.br(M1.e(a), M1.e(b))
            want = f.sub(M2.br(beta0.column(a), beta0.column(b)), beta0.apply(cab))
            imgs = [dm.apply(cab) for dm in dirs]
            for r in range(d2):
                brows.append([im[r] for im in imgs])
                brhs.append(want[r])
    if brows:
        B = Matrix.from_rows(f, brows, len(dirs))
        try:
            t0 = solve(B, brhs)
        except NoSolution:
            return None
        tnull = kernel(B).basis
    else:
        t0 = f.zero_vector(len(dirs))
        tnull = [f.unit(len(dirs), i) for i in range(len(dirs))]

    def combo(t):
        m = beta0
        for ti, dm in zip(t, dirs):
            if ti != 0:
                m = m + dm.scaled(ti)
        return m

    base = combo(t0)
    new_dirs = [combo(v) - beta0 for v in tnull]
    return base, new_dirs


def _brackets_ok(M1, M2, beta):
    return bool(is_morphism(LinearMap(M1, M2, beta)))


def search_isomorphism(e1: RelCentralExt, e2: RelCentralExt, budget: SearchBudget = SearchBudget(),
                       morphism: ExtMorphism | None = None) -> SearchResult:
    if e1.field != e2.field:
        raise FieldMismatch("extensions over different fields")
    if budget.mode == "verify":
        if morphism is None:
            raise ValueError("verify mode needs a morphism")
        rep = morphism_validate(morphism)
        if rep and rep.info["kind"] == "iso":
            return SearchResult("found", morphism, "morphism validates as an isomorphism", 1)
        return SearchResult("not_found", None, f"morphism fails {rep.failures() or ['iso']}", 1)
    i1, i2 = e1.invariants(), e2.invariants()
    bad = _mismatch(i1, i2, sorted(i1))
    if e1.domain.dim != e2.domain.dim:
        bad.insert(0, "dim_Mstar")
    if bad:
        return SearchResult("not_found", None, "invariants differ: " + ", ".join(bad), 0)
    f = e1.field
    tally = _Tally()
    L1, L2, M1, M2 = e1.codomain, e2.codomain, e1.domain, e2.domain
    rng = random.Random(budget.seed)
    for g in _iso_candidates(L1, L2, e1.target, e2.target, budget, tally):
        fam = _affine_betas(e1, e2, g)
        if fam is None:
            continue
        base, dirs = fam
        h = len(dirs)
        if f.is_prime and (budget.mode == "exhaustive" or f.p ** h <= 4096):
            if budget.mode == "exhaustive" and f.p ** h > budget.max_candidates:
                tally.exhausted = True
                tally.notes.append(f"{f.p}^{h} beta candidates exceed the budget")
                continue
            ts = itertools.product(range(f.p), repeat=h)
        else:
            # sampled shifts over the affine family
            ts = itertools.chain(
                [tuple([0] * h)],
                (tuple(1 if k == i else 0 for k in range(h)) for i in range(h)),
                (tuple(rng.choice((-1, 0, 1, 2)) for _ in range(h)) for _ in range(_RANDOM_TRIES)),
            )
            tally.complete = False
        for t in ts:
            beta = base
            for ti, dm in zip(t, dirs):
                if ti != 0:
                    beta = beta + dm.scaled(ti)
            if not beta.is_invertible:
                continue
            if e1.commutator.image(beta) != e2.commutator:
                continue
            m = ExtMorphism(LinearMap(L1, L2, g), LinearMap(M1, M2, beta), e1, e2)
            rep = morphism_validate(m)
            if rep and rep.info["kind"] == "iso":
                return SearchResult("found", m, "", tally.explored)
    return _end(tally, "isomorphism")


def pair_search_isoclinism(p1: Pair, p2: Pair, budget: SearchBudget = SearchBudget(),
                           witness: tuple | None = None) -> SearchResult:
    """Search ``(phi, theta)`` between ``L_i / Z(M_i, L_i)`` and ``[M_i, L_i]``."""
    if p1.field != p2.field:
        raise FieldMismatch("pairs over different fields")
    q1, q2 = PairQuotient.of(p1), PairQuotient.of(p2)
    if budget.mode == "verify":
        if witness is None:
            raise ValueError("verify mode needs (phi, theta)")
        try:
            chk = pair_isoclinism_validate(p1, p2, witness[0], witness[1], q1, q2)
        except DomainMismatch as exc:
            return SearchResult("not_found", None, str(exc), 1)
        return SearchResult("found" if chk else "not_found", witness if chk else None, chk.detail, 1)
    dims = {
        "dim_quotient": (q1.quotient.dim, q2.quotient.dim),
        "dim_m_bar": (q1.m_bar.dim, q2.m_bar.dim),
        "dim_commutator": (q1.commutator.dim, q2.commutator.dim),
    }
    bad = [k for k, (a, b) in dims.items() if a != b]
    if bad:
        return SearchResult("not_found", None, "invariants differ: " + ", ".join(bad), 0)
    tally = _Tally()
    for g in _iso_candidates(q1.quotient, q2.quotient, q1.m_bar, q2.m_bar, budget, tally):
        phi = LinearMap(q1.quotient, q2.quotient, g)
        theta = forced_theta(q1, q2, phi)
        if theta is None or not theta.is_bijective():
            continue
        if pair_isoclinism_validate(p1, p2, phi, theta, q1, q2):
            return SearchResult("found", (phi, theta), "", tally.explored)
    return _end(tally, "pair isoclinism")


# ----------------------------------------------------------------------------
# splitting off an abelian factor
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class Decomposition:
    stem: RelCentralExt  # sigma-bar = sigma / N
    abelian: HomLieAlgebra  # A, a copy of N
    iso: ExtMorphism  # sigma-bar x A -> sigma
    kernel_ideal: Subspace  # N
    transversal: Subspace  # T, containing D, with T + N = M* direct
    restricted: RelCentralExt  # sigma_T
    certificates: dict

    def __iter__(self):
        yield self.stem
        yield self.abelian
        yield self.iso


def decompose_family(e: RelCentralExt, use_derived: bool = False) -> Decomposition:
    """Write ``e`` as a stem extension times an abelian algebra, with a validated isomorphism."""
    M, L = e.domain, e.codomain
    k = e.kernel
    D = relevant_commutator(e, use_derived)
    kd = k.intersect(D)
    n, complete = partial_invariant_complement(kd, k, M.alpha)
    if not complete:
        raise TwistObstructed("Ker sigma cap D has no twist-invariant complement in Ker sigma")
    w, complete = partial_invariant_complement(D + n, M.full(), M.alpha)
    if not complete:
        raise TwistObstructed("D + N has no twist-invariant complement in M*")
    T = D + w
    bar, rho_m = quotient_ext(e, n)
    rho = rho_m.beta
    A, _ = subalgebra(M, n, name="A")
    certs = {}
    try:
        sig_t, incl = subalgebra_ext(e, T)
    except (NotASubalgebra, ConstructionError, ValueError) as exc:
        raise CertificationFailed(f"sigma_T does not exist: {exc}") from exc

    tb = T.basis_matrix()
    tq = rho.matrix @ tb
    if not tq.is_invertible:
        raise CertificationFailed("T does not map onto M*/N")
    # sigma_T -> sigma-bar, t -> t + N
    to_bar = ExtMorphism(LinearMap.identity(L), LinearMap(sig_t.domain, bar.domain, tq), sig_t, bar)
    certs["restricted_to_stem"] = morphism_validate(to_bar)

    lift = tb @ tq.inverse()
    prod, _, _ = product_with_abelian(bar, A)
    beta = LinearMap(prod.domain, M, lift.hstack(n.basis_matrix()))
    iso = ExtMorphism(LinearMap.identity(L), beta, prod, e)
    res = search_isomorphism(prod, e, SearchBudget("verify"), morphism=iso)
    certs["product_to_original"] = morphism_validate(iso)
    for name, rep in certs.items():
        if not rep or rep.info["kind"] != "iso":
            raise CertificationFailed(f"{name} does not validate as an isomorphism", rep)
    if not res.found:
        raise CertificationFailed(res.reason, certs["product_to_original"])
    if not is_stem(bar):
        raise CertificationFailed("the reduced extension is not stem")
    return Decomposition(bar, A, iso, n, T, sig_t, certs)
