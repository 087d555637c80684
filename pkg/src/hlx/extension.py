"""Relative central extensions of pairs and their constructions.

An extension is ``sigma: M* -> L`` together with an action of ``L`` on ``M*``
and the target ideal ``M = sigma(M*)``.  All constructions re-validate their
output and raise :class:`ConstructionError` if it is not a valid extension.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from .checks import PASS, Check, Report, fail
from .exactlin import (
    FieldMismatch,
    Matrix,
    NoSolution,
    Subspace,
    cyclic_closure,
    kernel,
    partial_invariant_complement,
    solve,
)
from .homlie import (
    HomLieAlgebra,
    LinearMap,
    NotAnIdeal,
    NotASubalgebra,
    center,
    derived,
    direct_sum,
    injection,
    is_ideal,
    is_morphism,
    is_subalgebra,
    projection,
    quotient_data,
    subalgebra,
    validate,
)
from .pairact import HomAction, Pair, action_validate, multiplication_action

__all__ = [
    "RelCentralExt",
    "ExtMorphism",
    "ConstructionError",
    "NotInKernel",
    "NotAbelian",
    "DoesNotCover",
    "NotIso",
    "TargetMismatch",
    "InvalidWitness",
    "rce_validate",
    "rce_kernel",
    "L_commutator",
    "L_center",
    "is_stem",
    "stem_reduce",
    "product_with_abelian",
    "quotient_ext",
    "subalgebra_ext",
    "pullback",
    "morphism_validate",
    "prop26_embed",
    "inclusion_extension",
    "relabel",
    "lemma33_certificate",
]


class ConstructionError(RuntimeError):
    def __init__(self, message: str, report: Report | None = None):
        super().__init__(message if report is None else f"{message}: failed {report.failures()}")
        self.report = report


class NotInKernel(ValueError):
    pass


class NotAbelian(ValueError):
    pass


class DoesNotCover(ValueError):
    pass


class NotIso(ValueError):
    pass


class TargetMismatch(ValueError):
    pass


class InvalidWitness(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class RelCentralExt:
    domain: HomLieAlgebra  # M*
    codomain: HomLieAlgebra  # L
    sigma: LinearMap
    action: HomAction
    target: Subspace  # M
    name: str = ""

    def __post_init__(self):
        if self.sigma.domain != self.domain or self.sigma.codomain != self.codomain:
            raise ValueError("sigma must map the domain to the codomain")
        if self.action.actor != self.codomain or self.action.acted != self.domain:
            raise ValueError("the action must be of the codomain on the domain")
        if self.target.ambient_dim != self.codomain.dim:
            raise ValueError("target must be a subspace of the codomain")
        if self.domain.field != self.codomain.field:
            raise FieldMismatch("domain and codomain over different fields")

    def __repr__(self):
        label = f" {self.name}" if self.name else ""
        return (f"RelCentralExt<{self.field!r}{label} dim M*={self.domain.dim} "
                f"dim L={self.codomain.dim} dim M={self.target.dim}>")

    @property
    def field(self):
        return self.domain.field

    @property
    def pair(self) -> Pair:
        return Pair(self.codomain, self.target)

    @cached_property
    def kernel(self) -> Subspace:
        return self.sigma.kernel()

    @cached_property
    def commutator(self) -> Subspace:
        """``[M*, L]``, the span of ``^l alpha*(m)``."""
        return self.domain.span(self.action_images())

    @cached_property
    def l_center(self) -> Subspace:
        M, L = self.domain, self.codomain
        f, d = M.field, M.dim
        rows = []
        ops = [self.action.operator(L.e(i)) @ M.alpha for i in range(L.dim)]
        for op in ops:
            rows.extend(op.data)
        if not rows:
            return M.full()
        return kernel(Matrix.from_rows(f, rows, d))

    def action_images(self) -> list[tuple]:
        M, L = self.domain, self.codomain
        am = [M.alpha.column(j) for j in range(M.dim)]
        return [self.action.act(L.e(i), am[j]) for i in range(L.dim) for j in range(M.dim)]

    def invariants(self) -> dict[str, int]:
        """The eight dimensions used to filter searches."""
        L = self.codomain
        return {
            "dim_L": L.dim,
            "dim_M": self.target.dim,
            "dim_commutator": self.commutator.dim,
            "dim_L_center": self.l_center.dim,
            "dim_kernel": self.kernel.dim,
            "dim_kernel_cap_commutator": self.kernel.intersect(self.commutator).dim,
            "dim_center_L": center(L).dim,
            "dim_derived_L": derived(L).dim,
        }


def rce_kernel(e: RelCentralExt) -> Subspace:
    return e.kernel


def L_commutator(e: RelCentralExt) -> Subspace:
    return e.commutator


def L_center(e: RelCentralExt) -> Subspace:
    return e.l_center


def is_stem(e: RelCentralExt) -> bool:
    return e.kernel.le(e.commutator)


def rce_validate(e: RelCentralExt) -> Report:
    M, L = e.domain, e.codomain
    rep = Report()
    dv = validate(M)
    rep.add("domain", PASS if dv.ok else fail(dv.failures(), "M* is not a regular Hom-Lie algebra"))
    cv = validate(L)
    rep.add("codomain", PASS if cv.ok else fail(cv.failures(), "L is not a regular Hom-Lie algebra"))
    chk = is_morphism(e.sigma)
    rep.add("sigma_morphism", chk)
    av = action_validate(e.action)
    rep.add("action", PASS if av.ok else fail([(n, av[n].witness) for n in av.failures()],
                                                "action axioms fail"))
    rep.add("pair", is_ideal(L, e.target))
    rep.add("condition1", PASS if e.sigma.image() == e.target else fail(None, "sigma(M*) != M"))

    am = [M.alpha.column(j) for j in range(M.dim)]
    al = [L.alpha.column(i) for i in range(L.dim)]
    c2 = PASS
    for i in range(L.dim):
        for j in range(M.dim):
            lhs = e.sigma(e.action.act(L.e(i), am[j]))
            rhs = L.br(al[i], e.sigma(am[j]))
            if lhs != rhs:
                c2 = fail((i, j), "sigma(^l alpha*(m)) != [alpha(l), sigma(alpha*(m))]")
                break
        if not c2:
            break
    rep.add("condition2", c2)

    c3 = PASS
    for a in range(M.dim):
        s = e.sigma(M.e(a))
        for b in range(M.dim):
            if e.action.act(s, am[b]) != M.br(M.e(a), M.e(b)):
                c3 = fail((a, b), "^{sigma(m')} alpha*(m) != [m', m]")
                break
        if not c3:
            break
    rep.add("condition3", c3)

    k = e.kernel
    lc = e.l_center
    bad = next((r for r, v in enumerate(k.basis) if not lc.contains(v)), None)
    rep.add("kernel_in_L_center", PASS if bad is None else fail(bad, "Ker sigma not inside Z(M*, L)"))
    zm = center(M)
    bad = next((r for r, v in enumerate(k.basis) if not zm.contains(v)), None)
    rep.add("kernel_in_center", PASS if bad is None else fail(bad, "Ker sigma not inside Z(M*)"))
    return rep


def _finish(e: RelCentralExt, what: str) -> RelCentralExt:
    rep = rce_validate(e)
    if not rep.ok:
        raise ConstructionError(f"{what} produced an invalid extension", rep)
    return e


def inclusion_extension(L: HomLieAlgebra, m: Subspace, name: str = "") -> RelCentralExt:
    """``M -> L`` for an ideal ``M`` acted on by multiplication."""
    act = multiplication_action(L, m)
    K = act.acted
    incl = LinearMap(K, L, m.basis_matrix())
    return _finish(RelCentralExt(K, L, incl, act, m, name), "inclusion_extension")


# ----------------------------------------------------------------------------
# morphisms of extensions
# ----------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ExtMorphism:
    gamma: LinearMap  # L1 -> L2
    beta: LinearMap  # M1* -> M2*
    source: RelCentralExt
    dest: RelCentralExt

    def __post_init__(self):
        s, d = self.source, self.dest
        if self.gamma.domain != s.codomain or self.gamma.codomain != d.codomain:
            raise ValueError("gamma must map the source base algebra to the destination's")
        if self.beta.domain != s.domain or self.beta.codomain != d.domain:
            raise ValueError("beta must map the source M* to the destination M*")

    @property
    def kind(self) -> str:
        g, b = self.gamma, self.beta
        if g.is_bijective() and b.is_bijective():
            return "iso"
        if g.is_surjective() and b.is_surjective():
            return "epi"
        if g.is_injective() and b.is_injective():
            return "mono"
        return "morphism"

    def __matmul__(self, other: "ExtMorphism") -> "ExtMorphism":
        """``self o other``."""
        return ExtMorphism(self.gamma @ other.gamma, self.beta @ other.beta, other.source, self.dest)

    def inverse(self) -> "ExtMorphism":
        return ExtMorphism(self.gamma.inverse(), self.beta.inverse(), self.dest, self.source)

    @classmethod
    def identity(cls, e: RelCentralExt) -> "ExtMorphism":
        return cls(LinearMap.identity(e.codomain), LinearMap.identity(e.domain), e, e)


def morphism_validate(m: ExtMorphism) -> Report:
    s, d = m.source, m.dest
    rep = Report()
    rep.add("gamma_morphism", is_morphism(m.gamma))
    rep.add("beta_morphism", is_morphism(m.beta))
    lhs = m.gamma.matrix @ s.sigma.matrix
    rhs = d.sigma.matrix @ m.beta.matrix
    if lhs == rhs:
        rep.add("commutes", PASS)
    else:
        col = next(j for j in range(lhs.cols) if lhs.column(j) != rhs.column(j))
        rep.add("commutes", fail(col, "gamma sigma1 != sigma2 beta"))
    rep.add("target", PASS if s.target.image(m.gamma.matrix) == d.target else fail(None, "gamma(M1) != M2"))
    rep.add("commutator", PASS if s.commutator.image(m.beta.matrix) == d.commutator
            else fail(None, "beta([M1*, L1]) != [M2*, L2]"))
    rep.info["kind"] = m.kind
    return rep


# ----------------------------------------------------------------------------
# constructions
# ----------------------------------------------------------------------------


def quotient_ext(e: RelCentralExt, n: Subspace, name: str = "") -> tuple[RelCentralExt, ExtMorphism]:
    """``M*/N -> L`` with the induced action, and the epimorphism ``(1_L, rho)``."""
    if not n.le(e.kernel):
        raise NotInKernel("N must lie in Ker sigma")
    M, L = e.domain, e.codomain
    chk = is_ideal(M, n)
    if not chk:
        raise NotAnIdeal(chk.detail)
    for i in range(L.dim):
        for v in n.basis:
            if not n.contains(e.action.act(L.e(i), v)):
                raise NotAnIdeal("the action does not preserve N")
    qd = quotient_data(M, n)
    Mb = qd.algebra
    rho = qd.projection
    sig = LinearMap(Mb, L, e.sigma.matrix @ qd.lift)
    reps = qd.lift.columns()
    t = [[rho(e.action.act(L.e(i), r)) for r in reps] for i in range(L.dim)]
    act = HomAction.from_tensor(L, Mb, t)
    q = _finish(RelCentralExt(Mb, L, sig, act, e.target, name), "quotient_ext")
    return q, ExtMorphism(LinearMap.identity(L), rho, e, q)


def product_with_abelian(e: RelCentralExt, a: HomLieAlgebra, name: str = ""):
    """``sigma pi: M* x A -> L`` with ``^l(m, x) = (^l m, 0)``, plus ``(1_L, pi)`` and ``(1_L, i)``."""
    if a.field != e.field:
        raise FieldMismatch("abelian factor over a different field")
    if derived(a).dim != 0:
        raise NotAbelian("the factor must be abelian")
    M, L = e.domain, e.codomain
    f = e.field
    P = direct_sum(M, a)
    d, k = M.dim, a.dim
    sig = LinearMap(P, L, e.sigma.matrix.hstack(Matrix.zeros(f, L.dim, k)))
    z = f.zero_vector(k)
    t = [[e.action.tensor[i][j] + z for j in range(d)] + [f.zero_vector(d + k)] * k for i in range(L.dim)]
    act = HomAction.from_tensor(L, P, t)
    ext = _finish(RelCentralExt(P, L, sig, act, e.target, name), "product_with_abelian")
    idl = LinearMap.identity(L)
    pi = projection(P, M, a, 0)
    inc = injection(M, a, P, 0)
    return ext, ExtMorphism(idl, pi, ext, e), ExtMorphism(idl, inc, e, ext)


def subalgebra_ext(e: RelCentralExt, t: Subspace, name: str = "") -> tuple[RelCentralExt, ExtMorphism]:
    """Restriction ``sigma_T: T -> L`` and the monomorphism ``(1_L, inclusion)``."""
    M, L = e.domain, e.codomain
    chk = is_subalgebra(M, t)
    if not chk:
        raise NotASubalgebra(chk.detail)
    for i in range(L.dim):
        for v in t.basis:
            if not t.contains(e.action.act(L.e(i), v)):
                raise NotASubalgebra("the action does not preserve T")
    if (t + e.kernel).dim != M.dim:
        raise DoesNotCover("T + Ker sigma != M*")
    if t.image(e.sigma.matrix) != e.target:
        raise DoesNotCover("sigma(T) != M")
    T, incl = subalgebra(M, t)
    sig = e.sigma @ incl
    tens = [[t.coordinates(e.action.act(L.e(i), b)) for b in t.basis] for i in range(L.dim)]
    act = HomAction.from_tensor(L, T, tens)
    ext = _finish(RelCentralExt(T, L, sig, act, e.target, name), "subalgebra_ext")
    return ext, ExtMorphism(LinearMap.identity(L), incl, ext, e)


def _check_gamma(e1: RelCentralExt, e2: RelCentralExt, gamma: LinearMap):
    if e1.field != e2.field:
        raise FieldMismatch("extensions over different fields")
    if gamma.domain != e1.codomain or gamma.codomain != e2.codomain:
        raise NotIso("gamma must map L1 to L2")
    if not gamma.is_bijective() or not is_morphism(gamma):
        raise NotIso("gamma is not a Hom-Lie isomorphism")
    if e1.target.image(gamma.matrix) != e2.target:
        raise TargetMismatch("gamma(M1) != M2")


@dataclass(frozen=True)
class PullbackResult:
    extension: RelCentralExt
    to_first: ExtMorphism  # (1_L1, beta_1)
    to_second: ExtMorphism  # (gamma, beta_2)
    inclusion: LinearMap  # M-bar* -> M1* x M2*
    product: HomLieAlgebra


def pullback(e1: RelCentralExt, e2: RelCentralExt, gamma: LinearMap, name: str = "") -> PullbackResult:
    """Pull back along ``gamma`` to ``{(m1, m2): gamma sigma1 alpha1*(m1) = sigma2 alpha2*(m2)}``."""
    _check_gamma(e1, e2, gamma)
    M1, M2, L1, L2 = e1.domain, e2.domain, e1.codomain, e2.codomain
    P = direct_sum(M1, M2)
    cond = (gamma.matrix @ e1.sigma.matrix @ M1.alpha).hstack(
        (e2.sigma.matrix @ M2.alpha).scaled(-1))
    sub = kernel(cond)
    Mb, incl = subalgebra(P, sub)
    pr1 = projection(P, M1, M2, 0)
    pr2 = projection(P, M1, M2, 1)
    b1 = pr1 @ incl
    b2 = pr2 @ incl
    sig = e1.sigma @ b1
    shift = L2.alpha_inverse @ gamma.matrix @ L1.alpha
    tens = []
    for i in range(L1.dim):
        l1 = L1.e(i)
        l2 = shift.apply(l1)
        row = []
        for v in sub.basis:
            m1, m2 = v[: M1.dim], v[M1.dim:]
            img = e1.action.act(l1, m1) + e2.action.act(l2, m2)
            if not sub.contains(img):
                raise ConstructionError("pullback action leaves the fibre product")
            row.append(sub.coordinates(img))
        tens.append(row)
    act = HomAction.from_tensor(L1, Mb, tens)
    ext = _finish(RelCentralExt(Mb, L1, sig, act, e1.target, name), "pullback")
    return PullbackResult(
        ext,
        ExtMorphism(LinearMap.identity(L1), b1, ext, e1),
        ExtMorphism(gamma, b2, ext, e2),
        incl,
        P,
    )


@dataclass(frozen=True)
class Prop26Result:
    extension: RelCentralExt  # (M1* x A)/T -> L1
    first: ExtMorphism  # (1_L1, delta1): e1 -> extension
    second: ExtMorphism  # (gamma^-1, delta2): e2 -> extension
    ideal: Subspace  # T inside M1* x A
    abelian: HomLieAlgebra  # A = M-bar*/[M-bar*, L1]
    pullback: PullbackResult
    into_products: tuple  # (beta-bar_1, beta-bar_2) monomorphisms into sigma_i pi


def prop26_embed(e1: RelCentralExt, e2: RelCentralExt, gamma: LinearMap, witness) -> Prop26Result:
    """Embed both extensions into ``(M1* x A)/T`` given an isoclinism ``(gamma, beta')``.

    Also builds the embeddings of the pullback into ``sigma_i pi`` on ``M_i* x A``.
    """
    from .isoclinism import witness_validate

    if witness.gamma.matrix != gamma.matrix:
        raise InvalidWitness("witness and gamma disagree")
    chk = witness_validate(witness)
    if not chk:
        raise InvalidWitness(f"witness fails {chk.failures()}")
    M1, M2, L1 = e1.domain, e2.domain, e1.codomain
    f = e1.field
    pb = pullback(e1, e2, gamma)
    sub = pb.inclusion.image()
    Mb = pb.extension.domain
    qa = quotient_data(Mb, pb.extension.commutator)
    A, rhoA = qa.algebra, qa.projection

    def abar(pair_vec):
        return rhoA(sub.coordinates(pair_vec))

    prod, _, _ = product_with_abelian(e1, A)
    z2 = f.zero_vector(M2.dim)
    tvecs = [x + abar(x + z2) for x in e1.kernel.basis]
    T = prod.domain.span(tvecs)
    q, rho = quotient_ext(prod, T)

    inj1 = injection(M1, A, prod.domain, 0)
    delta1 = rho.beta @ inj1
    lhs = gamma.matrix @ e1.sigma.matrix @ M1.alpha
    cols = []
    for j in range(M2.dim):
        rhs = (e2.sigma.matrix @ M2.alpha).apply(M2.e(j))
        try:
            m1 = solve(lhs, rhs)
        except NoSolution as exc:  # gamma(M1) = M2 rules this out
            raise ConstructionError("no partner for a basis vector of M2*") from exc
        cols.append(rho.beta(m1 + abar(m1 + M2.e(j))))
    delta2 = LinearMap(M2, q.domain, Matrix.from_columns(f, cols, q.domain.dim))
    first = ExtMorphism(LinearMap.identity(L1), delta1, e1, q)
    second = ExtMorphism(gamma.inverse(), delta2, e2, q)

    # beta-bar_i(x) = (beta_i(x), x + [M-bar*, L1])
    prod2, _, _ = product_with_abelian(e2, A)
    bars = []
    for pr, target, base in ((pb.to_first, prod, LinearMap.identity(L1)), (pb.to_second, prod2, gamma)):
        mat = pr.beta.matrix.vstack(rhoA.matrix)
        bars.append(ExtMorphism(base, LinearMap(Mb, target.domain, mat), pb.extension, target))
    return Prop26Result(q, first, second, T, A, pb, tuple(bars))


# ----------------------------------------------------------------------------
# stem reduction
# ----------------------------------------------------------------------------


def relevant_commutator(e: RelCentralExt, use_derived: bool = False) -> Subspace:
    return derived(e.domain) if use_derived else e.commutator


def lemma33_certificate(e: RelCentralExt) -> Check:
    """No cyclic twist-closure of a kernel basis vector avoids ``[M*, L]``."""
    comm = e.commutator
    for r, k in enumerate(e.kernel.basis):
        c = cyclic_closure(e.domain.alpha, k)
        if c.intersect(comm).dim == 0:
            return fail(r, "a kernel closure meets [M*, L] trivially")
    return PASS


@dataclass(frozen=True)
class StemReduction:
    extension: RelCentralExt
    morphism: ExtMorphism  # (1_L, rho): original -> reduced
    kernel_ideal: Subspace  # N
    twist_obstructed: bool

    def __iter__(self):
        yield self.extension
        yield self.morphism


def stem_reduce(e: RelCentralExt, use_derived: bool = False) -> StemReduction:
    """Quotient by a maximal twist-invariant ``N <= Ker sigma`` meeting ``[M*, L]`` trivially."""
    k = e.kernel
    kd = k.intersect(relevant_commutator(e, use_derived))
    n, complete = partial_invariant_complement(kd, k, e.domain.alpha)
    q, rho = quotient_ext(e, n)
    return StemReduction(q, rho, n, not complete)


def relabel(e: RelCentralExt, p_mstar: Matrix, q_l: Matrix, name: str = "") -> tuple[RelCentralExt, ExtMorphism]:
    """Change coordinates by ``y = P x`` on ``M*`` and ``z = Q w`` on ``L``; returns ``(Q, P): e -> e'``."""
    M, L = e.domain, e.codomain
    Mn = _transport(M, p_mstar)
    Ln = _transport(L, q_l)
    pinv = p_mstar.inverse()
    qinv = q_l.inverse()
    sig = LinearMap(Mn, Ln, q_l @ e.sigma.matrix @ pinv)
    tens = [[p_mstar.apply(e.action.act(qinv.column(i), pinv.column(j))) for j in range(M.dim)]
            for i in range(L.dim)]
    act = HomAction.from_tensor(Ln, Mn, tens)
    ext = _finish(RelCentralExt(Mn, Ln, sig, act, e.target.image(q_l), name), "relabel")
    return ext, ExtMorphism(LinearMap(L, Ln, q_l), LinearMap(M, Mn, p_mstar), e, ext)


def _transport(A: HomLieAlgebra, p: Matrix) -> HomLieAlgebra:
    pinv = p.inverse()
    cols = pinv.columns()
    n = A.dim
    t = [[p.apply(A.br(cols[i], cols[j])) for j in range(n)] for i in range(n)]
    return HomLieAlgebra.from_tensor(A.field, t, p @ A.alpha @ pinv, A.name)
