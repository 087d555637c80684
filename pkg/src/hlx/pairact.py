"""Pairs ``(M, L)`` of an ideal inside a Hom-Lie algebra, and Hom-actions."""

from __future__ import annotations

from dataclasses import dataclass

from .checks import PASS, Check, Report, fail
from .exactlin import FieldMismatch, Matrix, NoSolution, Subspace, kernel, solve
from .homlie import (
    DimensionMismatch,
    HomLieAlgebra,
    LinearMap,
    NotAnIdeal,
    is_ideal,
    is_morphism,
    quotient_data,
    subalgebra,
)

__all__ = [
    "Pair",
    "HomAction",
    "DomainMismatch",
    "pair_center",
    "pair_commutator",
    "action_validate",
    "multiplication_action",
    "pair_isoclinism_validate",
    "PairQuotient",
]


class DomainMismatch(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Pair:
    ambient: HomLieAlgebra
    ideal: Subspace

    def __post_init__(self):
        if self.ideal.ambient_dim != self.ambient.dim:
            raise DimensionMismatch("ideal lives in a different ambient space")

    def check(self) -> Check:
        return is_ideal(self.ambient, self.ideal)

    @property
    def field(self):
        return self.ambient.field


def pair_center(p: Pair) -> Subspace:
    """``Z(M, L) = {m in M : [m, l] = 0 for all l}``."""
    L, M = p.ambient, p.ideal
    f, n = L.field, L.dim
    if M.dim == 0:
        return M
    # coefficients t over M's basis; [sum t_r b_r, e_j] = sum t_r [b_r, e_j]
    images = [[L.br(b, L.e(j)) for j in range(n)] for b in M.basis]
    rows = [[images[r][j][k] for r in range(M.dim)] for j in range(n) for k in range(n)]
    ker = kernel(Matrix.from_rows(f, rows, M.dim))
    return L.span([f.combo(t, M.basis, n) for t in ker.basis])


def pair_commutator(p: Pair) -> Subspace:
    L, M = p.ambient, p.ideal
    return L.span([L.br(b, L.e(j)) for b in M.basis for j in range(L.dim)])


@dataclass(frozen=True, eq=False)
class HomAction:
    """``tensor[i][j]`` holds the coordinates of ``^{e_i} e_j`` in the acted-on algebra."""

    actor: HomLieAlgebra
    acted: HomLieAlgebra
    tensor: tuple

    def __post_init__(self):
        if self.actor.field != self.acted.field:
            raise FieldMismatch("action between algebras over different fields")
        n, k = self.actor.dim, self.acted.dim
        if len(self.tensor) != n or any(len(r) != k or any(len(v) != k for v in r) for r in self.tensor):
            raise DimensionMismatch(f"action tensor must be {n} x {k} x {k}")

    @classmethod
    def from_tensor(cls, actor, acted, tensor) -> "HomAction":
        f = actor.field
        return cls(actor, acted, tuple(tuple(f.vector(v) for v in row) for row in tensor))

    @classmethod
    def zero(cls, actor, acted) -> "HomAction":
        z = acted.field.zero_vector(acted.dim)
        return cls(actor, acted, tuple(tuple(z for _ in range(acted.dim)) for _ in range(actor.dim)))

    def act(self, x, k) -> tuple:
        """``^x k`` for coordinate vectors ``x`` (actor) and ``k`` (acted)."""
        f = self.acted.field
        d = self.acted.dim
        acc = [0] * d
        for i, xi in enumerate(x):
            if xi == 0:
                continue
            row = self.tensor[i]
            for j, kj in enumerate(k):
                if kj == 0:
                    continue
                c = xi * kj
                for t, v in enumerate(row[j]):
                    if v != 0:
                        acc[t] += c * v
        return tuple(f.reduce(a) for a in acc)

    def operator(self, x) -> Matrix:
        """Matrix of ``k -> ^x k``."""
        K = self.acted
        return Matrix.from_columns(K.field, [self.act(x, K.e(j)) for j in range(K.dim)], K.dim)

    def is_zero(self) -> bool:
        return all(c == 0 for row in self.tensor for v in row for c in v)


def action_validate(a: HomAction) -> Report:
    L, K = a.actor, a.acted
    f = L.field
    el = L.basis()
    ek = K.basis()
    al = [L.alpha.column(i) for i in range(L.dim)]
    ak = [K.alpha.column(i) for i in range(K.dim)]
    rep = Report()

    # ^{[x,y]} alpha(k) = ^{alpha x}(^y k) - ^{alpha y}(^x k)
    ax1 = PASS
    for i in range(L.dim):
        for j in range(L.dim):
            for r in range(K.dim):
                lhs = a.act(L.br(el[i], el[j]), ak[r])
                rhs = f.sub(a.act(al[i], a.act(el[j], ek[r])), a.act(al[j], a.act(el[i], ek[r])))
                if lhs != rhs:
                    ax1 = fail((i, j, r), "^[x,y] alpha(k) != ^{alpha x}(^y k) - ^{alpha y}(^x k)")
                    break
            if not ax1:
                break
        if not ax1:
            break
    rep.add("axiom1", ax1)

    # ^{alpha x}[k,k'] = [^x k, alpha k'] + [alpha k, ^x k']
    ax2 = PASS
    for i in range(L.dim):
        for r in range(K.dim):
            for s in range(K.dim):
                lhs = a.act(al[i], K.br(ek[r], ek[s]))
                rhs = f.add(K.br(a.act(el[i], ek[r]), ak[s]), K.br(ak[r], a.act(el[i], ek[s])))
                if lhs != rhs:
                    ax2 = fail((i, r, s), "^{alpha x}[k,k'] != [^x k, alpha k'] + [alpha k, ^x k']")
                    break
            if not ax2:
                break
        if not ax2:
            break
    rep.add("axiom2", ax2)

    # alpha(^x k) = ^{alpha x} alpha(k)
    ax3 = PASS
    for i in range(L.dim):
        for r in range(K.dim):
            if K.alpha.apply(a.act(el[i], ek[r])) != a.act(al[i], ak[r]):
                ax3 = fail((i, r), "alpha(^x k) != ^{alpha x} alpha(k)")
                break
        if not ax3:
            break
    rep.add("axiom3", ax3)
    return rep


def multiplication_action(L: HomLieAlgebra, k_sub: Subspace) -> HomAction:
    """``^x k = [x, k]`` on an ideal, in the ideal's own coordinates."""
    chk = is_ideal(L, k_sub)
    if not chk:
        raise NotAnIdeal(chk.detail)
    K, _ = subalgebra(L, k_sub)
    t = [[k_sub.coordinates(L.br(L.e(i), b)) for b in k_sub.basis] for i in range(L.dim)]
    return HomAction.from_tensor(L, K, t)


@dataclass(frozen=True)
class PairQuotient:
    """``L / Z(M, L)`` with the image of ``M`` and the commutator ``[M, L]`` as an algebra."""

    pair: Pair
    centre: Subspace
    quotient: HomLieAlgebra
    projection: LinearMap
    lift: Matrix
    m_bar: Subspace
    commutator: Subspace
    commutator_algebra: HomLieAlgebra

    @classmethod
    def of(cls, p: Pair) -> "PairQuotient":
        z = pair_center(p)
        qd = quotient_data(p.ambient, z)
        comm = pair_commutator(p)
        C, _ = subalgebra(p.ambient, comm)
        m_bar = p.ideal.image(qd.projection.matrix)
        return cls(p, z, qd.algebra, qd.projection, qd.lift, m_bar, comm, C)

    def lift_vec(self, q) -> tuple:
        return self.lift.apply(q)


def pair_isoclinism_validate(p1: Pair, p2: Pair, phi: LinearMap, theta: LinearMap,
                             q1: PairQuotient | None = None, q2: PairQuotient | None = None) -> Check:
    """Check ``(phi, theta)`` between ``L1/Z(M1,L1) -> L2/Z(M2,L2)`` and ``[M1,L1] -> [M2,L2]``.

    The square is checked on ``m`` ranging over a basis of ``M1`` and ``l`` over
    the basis of ``L1``: ``theta([m, l]) = [m2, l2]`` for lifts of ``phi(m), phi(l)``.
    """
    if p1.field != p2.field:
        raise FieldMismatch("pairs over different fields")
    q1 = q1 or PairQuotient.of(p1)
    q2 = q2 or PairQuotient.of(p2)
    if phi.domain != q1.quotient or phi.codomain != q2.quotient:
        raise DomainMismatch("phi must map L1/Z(M1,L1) to L2/Z(M2,L2)")
    if theta.domain != q1.commutator_algebra or theta.codomain != q2.commutator_algebra:
        raise DomainMismatch("theta must map [M1,L1] to [M2,L2]")
    if not phi.is_bijective():
        return fail("phi", "phi is not bijective")
    chk = is_morphism(phi)
    if not chk:
        return fail(("phi", chk.witness), "phi is not a Hom-Lie morphism")
    if not theta.is_bijective():
        return fail("theta", "theta is not bijective")
    chk = is_morphism(theta)
    if not chk:
        return fail(("theta", chk.witness), "theta is not a Hom-Lie morphism")
    if q1.m_bar.image(phi.matrix) != q2.m_bar:
        return fail("m_bar", "phi(M1 bar) != M2 bar")
    L1, L2 = p1.ambient, p2.ambient
    pr1 = q1.projection.matrix
    for r, m in enumerate(p1.ideal.basis):
        m2 = q2.lift_vec(phi(pr1.apply(m)))
        for j in range(L1.dim):
            l2 = q2.lift_vec(phi(pr1.apply(L1.e(j))))
            lhs = q2.commutator.basis_matrix().apply(theta(q1.commutator.coordinates(L1.br(m, L1.e(j)))))
            if lhs != L2.br(m2, l2):
                return fail((r, j), "theta([m, l]) != [m2, l2]")
    return PASS


def forced_theta(q1: PairQuotient, q2: PairQuotient, phi: LinearMap) -> LinearMap | None:
    """The unique linear ``theta`` making the square commute for ``phi``, or None."""
    p1 = q1.pair
    L1, L2 = p1.ambient, q2.pair.ambient
    f = L1.field
    pr1 = q1.projection.matrix
    xs, ys = [], []
    for m in p1.ideal.basis:
        m2 = q2.lift_vec(phi(pr1.apply(m)))
        for j in range(L1.dim):
            l2 = q2.lift_vec(phi(pr1.apply(L1.e(j))))
            xs.append(q1.commutator.coordinates(L1.br(m, L1.e(j))))
            y = L2.br(m2, l2)
            if not q2.commutator.contains(y):
                return None
            ys.append(q2.commutator.coordinates(y))
    c1, c2 = q1.commutator.dim, q2.commutator.dim
    if c1 != c2:
        return None
    if c1 == 0:
        return LinearMap(q1.commutator_algebra, q2.commutator_algebra, Matrix.zeros(f, 0, 0))
    # theta X = Y  <=>  X^T theta^T = Y^T
    xt = Matrix.from_rows(f, xs, c1)
    rows = []
    for r in range(c2):
        try:
            rows.append(solve(xt, [y[r] for y in ys]))
        except NoSolution:
            return None
    return LinearMap(q1.commutator_algebra, q2.commutator_algebra, Matrix.from_rows(f, rows, c1))
