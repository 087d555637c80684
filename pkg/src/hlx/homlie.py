"""Hom-Lie algebras given by structure constants and a twist matrix.

``bracket[i][j][k]`` is the coefficient of ``e_k`` in ``[e_i, e_j]``.  Linear
maps use the column-image convention: column ``j`` of a map's matrix is the
image of ``e_j``, and composition is the matrix product.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Mapping

import numpy as np

from .checks import PASS, Check, Report, fail
from .exactlin import Field, FieldMismatch, Matrix, Subspace, complement, kernel

__all__ = [
    "HomLieAlgebra",
    "LinearMap",
    "NotAnIdeal",
    "NotASubalgebra",
    "NotRegular",
    "DimensionMismatch",
    "validate",
    "bracket_vec",
    "center",
    "derived",
    "is_ideal",
    "is_subalgebra",
    "quotient",
    "subalgebra",
    "is_morphism",
    "direct_sum",
    "abelian",
]


class NotAnIdeal(ValueError):
    pass


class NotASubalgebra(ValueError):
    pass


class NotRegular(ValueError):
    pass


class DimensionMismatch(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class HomLieAlgebra:
    field: Field
    dim: int
    bracket: tuple  # n x n x n nested tuples
    alpha: Matrix
    name: str = ""

    def __post_init__(self):
        n = self.dim
        if len(self.bracket) != n or any(len(r) != n or any(len(v) != n for v in r) for r in self.bracket):
            raise DimensionMismatch("bracket tensor must be dim x dim x dim")
        if self.alpha.rows != n or self.alpha.cols != n:
            raise DimensionMismatch("alpha must be dim x dim")
        if self.alpha.field != self.field:
            raise FieldMismatch("alpha lives over a different field")

    @classmethod
    def from_tensor(cls, field: Field, tensor, alpha=None, name: str = "") -> "HomLieAlgebra":
        n = len(tensor)
        br = tuple(tuple(field.vector(v) for v in row) for row in tensor)
        if alpha is None:
            alpha = Matrix.identity(field, n)
        elif not isinstance(alpha, Matrix):
            alpha = Matrix.from_rows(field, alpha, n)
        return cls(field, n, br, alpha, name)

    @classmethod
    def from_brackets(cls, field: Field, n: int, brackets: Mapping[tuple[int, int], dict | tuple],
                      alpha=None, name: str = "") -> "HomLieAlgebra":
        """Build from ``{(i, j): image}`` with ``i < j``; the rest follows by skew-symmetry.

        ``image`` is either a coordinate tuple or a sparse ``{k: coeff}`` dict.
        """
        t = [[[0] * n for _ in range(n)] for _ in range(n)]
        for (i, j), img in brackets.items():
            v = [0] * n
            if isinstance(img, dict):
                for k, c in img.items():
                    v[k] = c
            else:
                v = list(img)
            t[i][j] = list(v)
            t[j][i] = [-c for c in v]
        return cls.from_tensor(field, t, alpha, name)

    def __eq__(self, other):
        return (isinstance(other, HomLieAlgebra) and self.field == other.field and self.dim == other.dim
                and self.bracket == other.bracket and self.alpha == other.alpha)

    def __hash__(self):
        return hash((self.field, self.dim, self.bracket, self.alpha.data))

    def __repr__(self):
        label = f" {self.name}" if self.name else ""
        return f"HomLieAlgebra<{self.field!r} dim={self.dim}{label}>"

    def e(self, i: int) -> tuple:
        return self.field.unit(self.dim, i)

    def basis(self) -> list[tuple]:
        return [self.e(i) for i in range(self.dim)]

    def br(self, x, y) -> tuple:
        return bracket_vec(self, x, y)

    def is_abelian(self) -> bool:
        return all(c == 0 for row in self.bracket for v in row for c in v)

    @cached_property
    def alpha_inverse(self) -> Matrix:
        if not self.alpha.is_invertible:
            raise NotRegular(f"twist of {self!r} is not invertible")
        return self.alpha.inverse()

    def is_regular(self) -> bool:
        return self.alpha.is_invertible

    def full(self) -> Subspace:
        return Subspace.full(self.field, self.dim)

    def zero(self) -> Subspace:
        return Subspace.zero(self.field, self.dim)

    def span(self, vectors) -> Subspace:
        return Subspace.span(self.field, self.dim, vectors)

    def mod_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Structure constants and twist as int64 arrays (prime fields only)."""
        c = np.array(self.bracket, dtype=np.int64).reshape(self.dim, self.dim, self.dim)
        a = np.array(self.alpha.data, dtype=np.int64).reshape(self.dim, self.dim)
        return c, a


def abelian(field: Field, n: int, alpha=None, name: str | None = None) -> HomLieAlgebra:
    t = [[[0] * n for _ in range(n)] for _ in range(n)]
    return HomLieAlgebra.from_tensor(field, t, alpha, name if name is not None else f"abelian({n})")


def bracket_vec(L: HomLieAlgebra, x, y) -> tuple:
    n = L.dim
    if len(x) != n or len(y) != n:
        raise DimensionMismatch(f"vectors must have length {n}")
    acc = [0] * n
    for i, xi in enumerate(x):
        if xi == 0:
            continue
        row = L.bracket[i]
        for j, yj in enumerate(y):
            if yj == 0:
                continue
            c = xi * yj
            for k, v in enumerate(row[j]):
                if v != 0:
                    acc[k] += c * v
    f = L.field
    return tuple(f.reduce(a) for a in acc)


def validate(L: HomLieAlgebra) -> Report:
    """Check skew-symmetry, Hom-Jacobi, multiplicativity and regularity on basis tuples."""
    f, n = L.field, L.dim
    rep = Report()
    skew = PASS
    for i in range(n):
        for j in range(i, n):
            if f.add(L.bracket[i][j], L.bracket[j][i]) != f.zero_vector(n) or (i == j and any(L.bracket[i][i])):
                skew = fail((i, j), f"[e{i},e{j}] + [e{j},e{i}] != 0")
                break
        if not skew:
            break
    rep.add("skew", skew)

    e = L.basis()
    ae = [L.alpha.column(i) for i in range(n)]
    jac = PASS
    for i in range(n):
        for j in range(n):
            for k in range(n):
                s = f.add(f.add(L.br(ae[i], L.br(e[j], e[k])), L.br(ae[j], L.br(e[k], e[i]))),
                          L.br(ae[k], L.br(e[i], e[j])))
                if any(s):
                    jac = fail((i, j, k), "Hom-Jacobi sum is nonzero")
                    break
            if not jac:
                break
        if not jac:
            break
    rep.add("hom_jacobi", jac)

    mult = PASS
    for i in range(n):
        for j in range(i + 1, n):
            if L.alpha.apply(L.br(e[i], e[j])) != L.br(ae[i], ae[j]):
                mult = fail((i, j), "alpha[e_i,e_j] != [alpha e_i, alpha e_j]")
                break
        if not mult:
            break
    rep.add("multiplicative", mult)
    rep.add("regular", PASS if L.is_regular() else fail(None, "alpha is singular"))
    return rep


def center(L: HomLieAlgebra) -> Subspace:
    f, n = L.field, L.dim
    # rows: coefficient of e_k in [x, e_j] as a linear form in x
    rows = []
    for j in range(n):
        for k in range(n):
            rows.append([L.bracket[i][j][k] for i in range(n)])
    if not rows:
        return Subspace.zero(f, 0)
    return kernel(Matrix.from_rows(f, rows, n))


def derived(L: HomLieAlgebra) -> Subspace:
    n = L.dim
    return L.span([L.bracket[i][j] for i in range(n) for j in range(i + 1, n)])


def is_subalgebra(L: HomLieAlgebra, u: Subspace) -> Check:
    for a, x in enumerate(u.basis):
        for b in range(a + 1, u.dim):
            if not u.contains(L.br(x, u.basis[b])):
                return fail((a, b), "bracket of basis vectors leaves the subspace")
    for a, x in enumerate(u.basis):
        if not u.contains(L.alpha.apply(x)):
            return fail(("alpha", a), "subspace is not alpha-invariant")
    return PASS


def is_ideal(L: HomLieAlgebra, u: Subspace) -> Check:
    """``[u, L] <= u`` and ``alpha(u) <= u``; the witness is (basis index of u, index in L)."""
    if u.ambient_dim != L.dim:
        raise DimensionMismatch("subspace lives in a different ambient space")
    for a, x in enumerate(u.basis):
        for j in range(L.dim):
            if not u.contains(L.br(x, L.e(j))):
                return fail((a, j), "[u, L] is not contained in u")
    for a, x in enumerate(u.basis):
        if not u.contains(L.alpha.apply(x)):
            return fail(("alpha", a), "u is not alpha-invariant")
    return PASS


@dataclass(frozen=True, eq=False)
class LinearMap:
    domain: HomLieAlgebra
    codomain: HomLieAlgebra
    matrix: Matrix

    def __post_init__(self):
        if self.matrix.rows != self.codomain.dim or self.matrix.cols != self.domain.dim:
            raise DimensionMismatch(
                f"map matrix is {self.matrix.rows}x{self.matrix.cols}, "
                f"expected {self.codomain.dim}x{self.domain.dim}")

    @classmethod
    def identity(cls, L: HomLieAlgebra) -> "LinearMap":
        return cls(L, L, Matrix.identity(L.field, L.dim))

    @classmethod
    def zero(cls, a: HomLieAlgebra, b: HomLieAlgebra) -> "LinearMap":
        return cls(a, b, Matrix.zeros(a.field, b.dim, a.dim))

    def __call__(self, v) -> tuple:
        return self.matrix.apply(v)

    def __matmul__(self, other: "LinearMap") -> "LinearMap":
        """``self o other``."""
        return LinearMap(other.domain, self.codomain, self.matrix @ other.matrix)

    def image(self, u: Subspace | None = None) -> Subspace:
        if u is None:
            return self.matrix.image()
        return u.image(self.matrix)

    def kernel(self) -> Subspace:
        return kernel(self.matrix)

    @property
    def rank(self) -> int:
        return self.matrix.rank

    def is_injective(self) -> bool:
        return self.rank == self.domain.dim

    def is_surjective(self) -> bool:
        return self.rank == self.codomain.dim

    def is_bijective(self) -> bool:
        return self.domain.dim == self.codomain.dim and self.is_injective()

    def inverse(self) -> "LinearMap":
        return LinearMap(self.codomain, self.domain, self.matrix.inverse())

    def __repr__(self):
        return f"LinearMap({self.domain!r} -> {self.codomain!r}, {self.matrix!r})"


def is_morphism(fmap: LinearMap) -> Check:
    """Bracket preservation on basis pairs and ``f alpha_1 = alpha_2 f``."""
    A, B = fmap.domain, fmap.codomain
    if A.field != B.field:
        raise FieldMismatch("morphism between algebras over different fields")
    imgs = fmap.matrix.columns()
    for i in range(A.dim):
        for j in range(i + 1, A.dim):
            if fmap(A.bracket[i][j]) != B.br(imgs[i], imgs[j]):
                return fail((i, j), "f[e_i,e_j] != [f e_i, f e_j]")
    lhs = fmap.matrix @ A.alpha
    rhs = B.alpha @ fmap.matrix
    if lhs != rhs:
        col = next(j for j in range(A.dim) if lhs.column(j) != rhs.column(j))
        return fail(("alpha", col), "f alpha_1 != alpha_2 f")
    return PASS


def subalgebra(L: HomLieAlgebra, u: Subspace, name: str = "") -> tuple[HomLieAlgebra, LinearMap]:
    """The subalgebra on ``u`` in the coordinates of its canonical basis, with the inclusion."""
    chk = is_subalgebra(L, u)
    if not chk:
        raise NotASubalgebra(chk.detail)
    d = u.dim
    t = [[u.coordinates(L.br(u.basis[a], u.basis[b])) for b in range(d)] for a in range(d)]
    alpha = u.restrict(L.alpha)
    S = HomLieAlgebra.from_tensor(L.field, t, alpha, name)
    return S, LinearMap(S, L, u.basis_matrix())


@dataclass(frozen=True)
class QuotientData:
    algebra: HomLieAlgebra
    projection: LinearMap
    lift: Matrix  # (dim L x dim L/I), columns are the chosen representatives
    ideal: Subspace


def quotient_data(L: HomLieAlgebra, ideal: Subspace, name: str = "") -> QuotientData:
    chk = is_ideal(L, ideal)
    if not chk:
        raise NotAnIdeal(chk.detail)
    f, n = L.field, L.dim
    comp = complement(ideal, L.full())
    d = comp.dim
    change = Matrix.from_columns(f, list(ideal.basis) + list(comp.basis), n)
    inv = change.inverse()
    proj = Matrix(f, d, n, inv.data[ideal.dim:])
    lift = comp.basis_matrix()
    reps = comp.basis
    t = [[proj.apply(L.br(reps[a], reps[b])) for b in range(d)] for a in range(d)]
    alpha = proj @ L.alpha @ lift
    Qa = HomLieAlgebra.from_tensor(f, t, alpha, name)
    pi = LinearMap(L, Qa, proj)
    return QuotientData(Qa, pi, lift, ideal)


def quotient(L: HomLieAlgebra, ideal: Subspace, name: str = "") -> tuple[HomLieAlgebra, LinearMap]:
    """``L / ideal`` on the pivot-greedy complement coordinates, with the projection."""
    q = quotient_data(L, ideal, name)
    assert is_morphism(q.projection), "projection must be a morphism"
    return q.algebra, q.projection


def direct_sum(L1: HomLieAlgebra, L2: HomLieAlgebra, name: str = "") -> HomLieAlgebra:
    if L1.field != L2.field:
        raise FieldMismatch("direct sum of algebras over different fields")
    f = L1.field
    n1, n2 = L1.dim, L2.dim
    n = n1 + n2
    zero = f.zero_vector(n)
    t = [[zero] * n for _ in range(n)]
    for i in range(n1):
        for j in range(n1):
            t[i][j] = L1.bracket[i][j] + f.zero_vector(n2)
    for i in range(n2):
        for j in range(n2):
            t[n1 + i][n1 + j] = f.zero_vector(n1) + L2.bracket[i][j]
    return HomLieAlgebra.from_tensor(f, t, Matrix.block_diag(L1.alpha, L2.alpha), name)


def injection(L1: HomLieAlgebra, L2: HomLieAlgebra, S: HomLieAlgebra, which: int) -> LinearMap:
    f = S.field
    n1, n2 = L1.dim, L2.dim
    if which == 0:
        cols = [f.unit(n1 + n2, i) for i in range(n1)]
        return LinearMap(L1, S, Matrix.from_columns(f, cols, n1 + n2))
    cols = [f.unit(n1 + n2, n1 + i) for i in range(n2)]
    return LinearMap(L2, S, Matrix.from_columns(f, cols, n1 + n2))


def projection(S: HomLieAlgebra, L1: HomLieAlgebra, L2: HomLieAlgebra, which: int) -> LinearMap:
    f = S.field
    n1, n2 = L1.dim, L2.dim
    if which == 0:
        rows = [f.unit(n1 + n2, i) for i in range(n1)]
        return LinearMap(S, L1, Matrix(f, n1, n1 + n2, tuple(rows)))
    rows = [f.unit(n1 + n2, n1 + i) for i in range(n2)]
    return LinearMap(S, L2, Matrix(f, n2, n1 + n2, tuple(rows)))
