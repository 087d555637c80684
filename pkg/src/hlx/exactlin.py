"""Exact scalar arithmetic and dense linear algebra over Q and F_p.

Scalars are plain Python values: ``Fraction`` for the rationals and ``int``
residues in ``[0, p)`` for prime fields.  Every arithmetic result is passed
through :meth:`Field.reduce`, which keeps both representations canonical.

Vectors are tuples of scalars.  Matrices act on column vectors.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from . import _kernels

__all__ = [
    "Field",
    "Q",
    "GF",
    "Matrix",
    "Subspace",
    "FieldMismatch",
    "NotContained",
    "NotFound",
    "NotInvariant",
    "NoSolution",
    "rref",
    "kernel",
    "complement",
    "invariant_complement",
    "cyclic_closure",
    "solve",
]


class FieldMismatch(ValueError):
    pass


class NotContained(ValueError):
    pass


class NotInvariant(ValueError):
    pass


class NotFound(LookupError):
    pass


class NoSolution(ValueError):
    pass


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


class Field:
    """Either the rationals (``p == 0``) or the prime field F_p."""

    __slots__ = ("p",)

    def __init__(self, p: int = 0):
        if p != 0:
            if not _is_prime(p):
                raise ValueError(f"{p} is not prime")
            if p >= 1 << 16:
                raise ValueError("prime fields are limited to p < 2**16")
        self.p = p

    def __eq__(self, other):
        return isinstance(other, Field) and other.p == self.p

    def __hash__(self):
        return hash(("Field", self.p))

    def __repr__(self):
        return "Q" if self.p == 0 else f"GF({self.p})"

    @property
    def is_prime(self) -> bool:
        return self.p != 0

    @property
    def descriptor(self) -> str:
        return "Q" if self.p == 0 else f"Fp:{self.p}"

    @classmethod
    def from_descriptor(cls, text: str) -> "Field":
        if text == "Q":
            return Q
        if text.startswith("Fp:"):
            return GF(int(text[3:]))
        raise ValueError(f"unknown field descriptor {text!r}")

    @property
    def zero(self):
        return Fraction(0) if self.p == 0 else 0

    @property
    def one(self):
        return Fraction(1) if self.p == 0 else 1

    def reduce(self, x):
        if self.p == 0:
            return x if type(x) is Fraction else Fraction(x)
        if type(x) is Fraction:
            if x.denominator % self.p == 0:
                raise ZeroDivisionError(f"{x} has no image in F_{self.p}")
            return x.numerator * pow(x.denominator, -1, self.p) % self.p
        return int(x) % self.p

    def inv(self, x):
        if x == 0:
            raise ZeroDivisionError("inverse of zero")
        if self.p == 0:
            return 1 / x
        return pow(x, -1, self.p)

    def div(self, a, b):
        return self.reduce(a * self.inv(b))

    def elements(self):
        """All elements of a prime field, in increasing residue order."""
        if self.p == 0:
            raise ValueError("Q is infinite")
        return range(self.p)

    def format(self, x) -> str | int:
        if self.p == 0:
            return str(x)
        return int(x)

    def parse(self, raw):
        if self.p == 0:
            if isinstance(raw, bool) or not isinstance(raw, (str, int)):
                raise ValueError(f"rational scalars must be strings, got {raw!r}")
            return Fraction(raw)
        if isinstance(raw, bool) or not isinstance(raw, int):
            raise ValueError(f"prime-field scalars must be integers, got {raw!r}")
        return raw % self.p

    def vector(self, values: Iterable) -> tuple:
        return tuple(self.reduce(v) for v in values)

    def zero_vector(self, n: int) -> tuple:
        z = self.zero
        return (z,) * n

    def unit(self, n: int, i: int) -> tuple:
        z, o = self.zero, self.one
        return tuple(o if j == i else z for j in range(n))

    def add(self, u, v):
        return tuple(self.reduce(a + b) for a, b in zip(u, v))

    def sub(self, u, v):
        return tuple(self.reduce(a - b) for a, b in zip(u, v))

    def scale(self, c, u):
        return tuple(self.reduce(c * a) for a in u)

    def combo(self, coeffs, vectors, n: int):
        """``sum(c * v)`` over paired coefficients and vectors of length n."""
        acc = [0] * n
        for c, v in zip(coeffs, vectors):
            if c == 0:
                continue
            for k in range(n):
                if v[k] != 0:
                    acc[k] += c * v[k]
        return tuple(self.reduce(a) for a in acc)


Q = Field(0)


def GF(p: int) -> Field:
    return Field(p)


def is_zero(v) -> bool:
    return all(x == 0 for x in v)


@dataclass(frozen=True)
class Matrix:
    field: Field
    rows: int
    cols: int
    data: tuple  # tuple of row tuples

    def __post_init__(self):
        if len(self.data) != self.rows or any(len(r) != self.cols for r in self.data):
            raise ValueError("matrix data does not match its shape")

    @classmethod
    def from_rows(cls, field: Field, rows: Sequence[Sequence], cols: int | None = None) -> "Matrix":
        data = tuple(field.vector(r) for r in rows)
        if cols is None:
            if not data:
                raise ValueError("cols required for an empty matrix")
            cols = len(data[0])
        return cls(field, len(data), cols, data)

    @classmethod
    def from_columns(cls, field: Field, columns: Sequence[Sequence], rows: int) -> "Matrix":
        columns = [field.vector(c) for c in columns]
        data = tuple(tuple(c[i] for c in columns) for i in range(rows))
        return cls(field, rows, len(columns), data)

    @classmethod
    def zeros(cls, field: Field, rows: int, cols: int) -> "Matrix":
        return cls(field, rows, cols, tuple(field.zero_vector(cols) for _ in range(rows)))

    @classmethod
    def identity(cls, field: Field, n: int) -> "Matrix":
        return cls(field, n, n, tuple(field.unit(n, i) for i in range(n)))

    @classmethod
    def diag(cls, field: Field, values: Sequence) -> "Matrix":
        n = len(values)
        rows = [[values[i] if i == j else 0 for j in range(n)] for i in range(n)]
        return cls.from_rows(field, rows, n)

    @classmethod
    def block_diag(cls, a: "Matrix", b: "Matrix") -> "Matrix":
        _same_field(a.field, b.field)
        f = a.field
        rows = [r + f.zero_vector(b.cols) for r in a.data]
        rows += [f.zero_vector(a.cols) + r for r in b.data]
        return cls(f, a.rows + b.rows, a.cols + b.cols, tuple(rows))

    def __getitem__(self, ij):
        i, j = ij
        return self.data[i][j]

    def column(self, j: int) -> tuple:
        return tuple(r[j] for r in self.data)

    def columns(self) -> list[tuple]:
        return [self.column(j) for j in range(self.cols)]

    @property
    def T(self) -> "Matrix":
        return Matrix(self.field, self.cols, self.rows, tuple(zip(*self.data)) if self.rows else
                      tuple(() for _ in range(self.cols)))

    def apply(self, v) -> tuple:
        if len(v) != self.cols:
            raise ValueError(f"vector of length {len(v)} applied to {self.rows}x{self.cols} matrix")
        f = self.field
        return tuple(f.reduce(sum(a * b for a, b in zip(r, v) if a != 0 and b != 0)) for r in self.data)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        _same_field(self.field, other.field)
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        f = self.field
        ocols = other.columns()
        data = tuple(
            tuple(f.reduce(sum(a * b for a, b in zip(r, c) if a != 0 and b != 0)) for c in ocols)
            for r in self.data
        )
        return Matrix(f, self.rows, other.cols, data)

    def __add__(self, other: "Matrix") -> "Matrix":
        _same_field(self.field, other.field)
        f = self.field
        return Matrix(f, self.rows, self.cols, tuple(f.add(r, s) for r, s in zip(self.data, other.data)))

    def __sub__(self, other: "Matrix") -> "Matrix":
        _same_field(self.field, other.field)
        f = self.field
        return Matrix(f, self.rows, self.cols, tuple(f.sub(r, s) for r, s in zip(self.data, other.data)))

    def scaled(self, c) -> "Matrix":
        f = self.field
        return Matrix(f, self.rows, self.cols, tuple(f.scale(c, r) for r in self.data))

    def hstack(self, other: "Matrix") -> "Matrix":
        _same_field(self.field, other.field)
        return Matrix(self.field, self.rows, self.cols + other.cols,
                      tuple(r + s for r, s in zip(self.data, other.data)))

    def vstack(self, other: "Matrix") -> "Matrix":
        _same_field(self.field, other.field)
        return Matrix(self.field, self.rows + other.rows, self.cols, self.data + other.data)

    def is_zero(self) -> bool:
        return all(is_zero(r) for r in self.data)

    @property
    def rank(self) -> int:
        return len(rref(self)[1])

    @property
    def is_invertible(self) -> bool:
        return self.rows == self.cols and self.rank == self.rows

    def inverse(self) -> "Matrix":
        if self.rows != self.cols:
            raise ValueError("only square matrices are invertible")
        n = self.rows
        aug = self.hstack(Matrix.identity(self.field, n))
        r, piv = rref(aug)
        if piv[:n] != list(range(n)):
            raise ZeroDivisionError("matrix is singular")
        return Matrix(self.field, n, n, tuple(row[n:] for row in r.data))

    def image(self) -> "Subspace":
        return Subspace.span(self.field, self.rows, self.columns())

    def __repr__(self):
        body = "; ".join(" ".join(str(x) for x in r) for r in self.data)
        return f"Matrix<{self.field!r} {self.rows}x{self.cols}>[{body}]"


def _same_field(a: Field, b: Field):
    if a != b:
        raise FieldMismatch(f"{a!r} vs {b!r}")


def _rref_rows(field: Field, data: list[list], cols: int) -> tuple[list[list], list[int]]:
    m = [list(r) for r in data]
    nrows = len(m)
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == nrows:
            break
        piv = next((i for i in range(r, nrows) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = field.inv(m[r][c])
        m[r] = [field.reduce(x * inv) for x in m[r]]
        for i in range(nrows):
            if i != r and m[i][c] != 0:
                fac = m[i][c]
                ri = m[i]
                rr = m[r]
                m[i] = [field.reduce(a - fac * b) for a, b in zip(ri, rr)]
        pivots.append(c)
        r += 1
    return m, pivots


# Above this many entries the prime-field path goes through the compiled kernel.
_KERNEL_MIN_ENTRIES = 256


def rref(m: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row-echelon form and pivot columns."""
    f = m.field
    if f.is_prime and m.rows * m.cols >= _KERNEL_MIN_ENTRIES:
        import numpy as np

        arr = np.array(m.data, dtype=np.int64).reshape(m.rows, m.cols)
        out, rank, piv = _kernels.rref_modp(arr, f.p)
        data = tuple(tuple(int(x) for x in row) for row in out)
        return Matrix(f, m.rows, m.cols, data), [int(c) for c in piv[:rank]]
    rows, piv = _rref_rows(f, list(m.data), m.cols)
    return Matrix(f, m.rows, m.cols, tuple(tuple(r) for r in rows)), piv


@dataclass(frozen=True)
class Subspace:
    """A subspace of ``field^ambient_dim`` stored by its canonical RREF basis.

    Two subspaces are equal exactly when their stored bases are equal.
    """

    field: Field
    ambient_dim: int
    basis: tuple  # RREF rows, full row rank
    pivots: tuple

    @classmethod
    def span(cls, field: Field, n: int, vectors: Iterable[Sequence]) -> "Subspace":
        rows = [field.vector(v) for v in vectors]
        for v in rows:
            if len(v) != n:
                raise ValueError(f"vector of length {len(v)} in ambient dimension {n}")
        if not rows:
            return cls.zero(field, n)
        red, piv = _rref_rows(field, rows, n)
        return cls(field, n, tuple(tuple(r) for r in red[: len(piv)]), tuple(piv))

    @classmethod
    def zero(cls, field: Field, n: int) -> "Subspace":
        return cls(field, n, (), ())

    @classmethod
    def full(cls, field: Field, n: int) -> "Subspace":
        return cls(field, n, tuple(field.unit(n, i) for i in range(n)), tuple(range(n)))

    @property
    def dim(self) -> int:
        return len(self.basis)

    def __len__(self):
        return self.dim

    def as_matrix(self) -> Matrix:
        return Matrix(self.field, self.dim, self.ambient_dim, self.basis)

    def basis_matrix(self) -> Matrix:
        """Basis vectors as columns (ambient_dim x dim)."""
        return Matrix.from_columns(self.field, self.basis, self.ambient_dim)

    def coordinates(self, v) -> tuple:
        """Coordinates of ``v`` in the stored basis; raises NotContained."""
        f = self.field
        v = f.vector(v)
        coords = tuple(v[c] for c in self.pivots)
        if f.combo(coords, self.basis, self.ambient_dim) != v:
            raise NotContained(f"vector {v} is not in the subspace")
        return coords

    def contains(self, v) -> bool:
        f = self.field
        v = f.vector(v)
        coords = [v[c] for c in self.pivots]
        return f.combo(coords, self.basis, self.ambient_dim) == v

    def __contains__(self, v) -> bool:
        return self.contains(v)

    def le(self, other: "Subspace") -> bool:
        _same_field(self.field, other.field)
        return all(other.contains(b) for b in self.basis)

    def __add__(self, other: "Subspace") -> "Subspace":
        _same_field(self.field, other.field)
        return Subspace.span(self.field, self.ambient_dim, self.basis + other.basis)

    def intersect(self, other: "Subspace") -> "Subspace":
        _same_field(self.field, other.field)
        f, n = self.field, self.ambient_dim
        if self.dim == 0 or other.dim == 0:
            return Subspace.zero(f, n)
        # x = sum a_i u_i = sum b_j v_j  <=>  [U | -V] (a, b) = 0
        cols = list(self.basis) + [f.scale(-1, v) for v in other.basis]
        k = kernel(Matrix.from_columns(f, cols, n))
        vecs = [f.combo(kv[: self.dim], self.basis, n) for kv in k.basis]
        return Subspace.span(f, n, vecs)

    def image(self, m: Matrix) -> "Subspace":
        return Subspace.span(self.field, m.rows, [m.apply(b) for b in self.basis])

    def preimage(self, m: Matrix) -> "Subspace":
        """``{x : m x in self}``."""
        f = self.field
        # m x in S  <=>  (m x) annihilated by a complement-test matrix
        ann = kernel(self.as_matrix()) if self.dim else Subspace.full(f, self.ambient_dim)
        test = ann.as_matrix() @ m if ann.dim else Matrix.zeros(f, 0, m.cols)
        return kernel(test)

    def is_invariant(self, a: Matrix) -> bool:
        return all(self.contains(a.apply(b)) for b in self.basis)

    def restrict(self, a: Matrix) -> Matrix:
        """Matrix of an invariant operator on this subspace, in basis coordinates."""
        return Matrix.from_columns(self.field, [self.coordinates(a.apply(b)) for b in self.basis], self.dim)

    def __repr__(self):
        return f"Subspace<{self.field!r} {self.dim}/{self.ambient_dim}>{list(self.basis)}"


def kernel(m: Matrix) -> Subspace:
    """Right null space of ``m``."""
    f = m.field
    red, piv = rref(m)
    pivset = set(piv)
    vecs = []
    for free in range(m.cols):
        if free in pivset:
            continue
        v = [f.zero] * m.cols
        v[free] = f.one
        for r, c in enumerate(piv):
            v[c] = f.reduce(-red.data[r][free])
        vecs.append(v)
    return Subspace.span(f, m.cols, vecs)


def complement(u: Subspace, v: Subspace) -> Subspace:
    """Complement of ``u`` inside ``v``, extending ``u`` by the earliest basis vectors of ``v``."""
    if not u.le(v):
        raise NotContained("u is not contained in v")
    f, n = u.field, u.ambient_dim
    chosen = []
    current = u
    for b in v.basis:
        if current.contains(b):
            continue
        chosen.append(b)
        current = current + Subspace.span(f, n, [b])
        if current.dim == v.dim:
            break
    return Subspace.span(f, n, chosen)


def cyclic_closure(a: Matrix, vec) -> Subspace:
    """``span{v, a v, a^2 v, ...}``."""
    f = a.field
    n = a.rows
    span = Subspace.span(f, n, [vec])
    cur = tuple(vec)
    while True:
        cur = a.apply(cur)
        if span.contains(cur):
            return span
        span = span + Subspace.span(f, n, [cur])


def _greedy_invariant_complement(u: Subspace, v: Subspace, a: Matrix) -> Subspace:
    f, n = u.field, u.ambient_dim
    w = Subspace.zero(f, n)
    for b in complement(u, v).basis:
        c = cyclic_closure(a, b)
        if (u + w + c).dim == u.dim + w.dim + c.dim:
            w = w + c
    return w


def _projection_complement(u: Subspace, v: Subspace, a: Matrix) -> Subspace | None:
    """Kernel of a projection ``P: v -> u`` with ``P a = a P`` and ``P|u = 1``, or None if none exists.

    Such a ``P`` exists exactly when ``u`` has an ``a``-invariant complement in ``v``.
    """
    f, n = u.field, u.ambient_dim
    du, dv = u.dim, v.dim
    av = v.restrict(a).data
    au = u.restrict(a).data
    uc = [v.coordinates(b) for b in u.basis]  # column s = coordinates of u_s in v
    # unknown P[r][k] at index r * dv + k
    rows, rhs = [], []
    for r in range(du):
        for c in range(dv):
            # (P av - au P)[r][c] = 0
            row = [f.zero] * (du * dv)
            for k in range(dv):
                row[r * dv + k] = f.reduce(row[r * dv + k] + av[k][c])
            for k in range(du):
                row[k * dv + c] = f.reduce(row[k * dv + c] - au[r][k])
            rows.append(row)
            rhs.append(f.zero)
        for s_ in range(du):
            row = [f.zero] * (du * dv)
            for k in range(dv):
                row[r * dv + k] = uc[s_][k]
            rows.append(row)
            rhs.append(f.one if r == s_ else f.zero)
    try:
        x = solve(Matrix.from_rows(f, rows, du * dv), rhs)
    except NoSolution:
        return None
    pm = Matrix.from_rows(f, [x[r * dv:(r + 1) * dv] for r in range(du)], dv)
    return kernel(pm).image(v.basis_matrix()) if du else v


def _invariant_complement(u: Subspace, v: Subspace, a: Matrix) -> Subspace | None:
    w = _greedy_invariant_complement(u, v, a)
    if u.dim + w.dim == v.dim:
        return w
    # the greedy pass can miss an existing complement; settle it exactly
    return _projection_complement(u, v, a)


def invariant_complement(u: Subspace, v: Subspace, a: Matrix) -> Subspace:
    """An ``a``-invariant complement of ``u`` in ``v``.

    Tries cyclic closures of the earliest basis vectors first, then solves for an
    equivariant projection.  Raises NotFound when no invariant complement exists.
    """
    if not u.le(v):
        raise NotContained("u is not contained in v")
    if not u.is_invariant(a) or not v.is_invariant(a):
        raise NotInvariant("u and v must both be invariant under a")
    w = _invariant_complement(u, v, a)
    if w is None:
        raise NotFound("no invariant complement exists")
    return w


def partial_invariant_complement(u: Subspace, v: Subspace, a: Matrix) -> tuple[Subspace, bool]:
    """Invariant ``w`` with ``u + w`` direct, plus whether it reaches all of ``v``.

    When no full complement exists, ``w`` is the greedy partial one.
    """
    if not u.le(v):
        raise NotContained("u is not contained in v")
    if u.is_invariant(a) and v.is_invariant(a):
        w = _invariant_complement(u, v, a)
        if w is not None:
            return w, True
    w = _greedy_invariant_complement(u, v, a)
    return w, u.dim + w.dim == v.dim


def solve(a: Matrix, b) -> tuple:
    """One solution of ``a x = b`` with free variables zero; raises NoSolution."""
    f = a.field
    b = f.vector(b)
    if len(b) != a.rows:
        raise ValueError("right-hand side has the wrong length")
    aug = a.hstack(Matrix.from_columns(f, [b], a.rows))
    red, piv = rref(aug)
    if piv and piv[-1] == a.cols:
        raise NoSolution("inconsistent linear system")
    x = [f.zero] * a.cols
    for r, c in enumerate(piv):
        x[c] = red.data[r][a.cols]
    return tuple(x)


def solve_matrix(a: Matrix, b: Matrix) -> Matrix:
    """Solve ``a X = b`` column by column."""
    return Matrix.from_columns(a.field, [solve(a, col) for col in b.columns()], a.cols)
