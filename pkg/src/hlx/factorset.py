"""Factor sets on relative central extensions.

A factor set is stored over the basis of ``L``: ``tensor[i][j]`` are the
coordinates of ``f(e_i, e_j)`` in the kernel algebra ``K``.  It is supported on
the ideal ``M`` and vanishes whenever an argument lies in the pivot-greedy
complement of ``M``.  The extension ``(K x M)_f`` uses coordinates ``(x, m)``
where ``m`` is written in the canonical basis of ``M``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .checks import PASS, Report, fail
from .exactlin import Matrix, NoSolution, NotFound, Subspace, complement, invariant_complement, kernel, solve
from .extension import (
    ExtMorphism,
    InvalidWitness,
    RelCentralExt,
    _finish,
    is_stem,
)
from .homlie import HomLieAlgebra, LinearMap, subalgebra
from .pairact import HomAction, Pair, pair_commutator

__all__ = [
    "FactorSet",
    "InvalidFactorSet",
    "NoInvariantComplement",
    "NotStem",
    "DimMismatch",
    "InconsistentD",
    "factorset_validate",
    "extension_from_factorset",
    "factorset_from_extension",
    "transport_factorset",
    "factorset_iso",
    "m_coordinates",
    "factorset_space",
]


class InvalidFactorSet(ValueError):
    pass


class NoInvariantComplement(ValueError):
    pass


class NotStem(ValueError):
    pass


class DimMismatch(ValueError):
    pass


class InconsistentD(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class FactorSet:
    base: HomLieAlgebra  # L
    kernel_space: HomLieAlgebra  # K, abelian
    tensor: tuple  # n x n of K-coordinate tuples
    support: Subspace  # M

    def __post_init__(self):
        n, k = self.base.dim, self.kernel_space.dim
        if len(self.tensor) != n or any(len(r) != n or any(len(v) != k for v in r) for r in self.tensor):
            raise ValueError(f"factor set tensor must be {n} x {n} x {k}")

    @classmethod
    def from_tensor(cls, base, kernel_space, tensor, support) -> "FactorSet":
        f = base.field
        return cls(base, kernel_space, tuple(tuple(f.vector(v) for v in r) for r in tensor), support)

    @classmethod
    def zero(cls, base, kernel_space, support) -> "FactorSet":
        z = base.field.zero_vector(kernel_space.dim)
        n = base.dim
        return cls(base, kernel_space, tuple(tuple(z for _ in range(n)) for _ in range(n)), support)

    @classmethod
    def from_support_values(cls, base, kernel_space, support, values) -> "FactorSet":
        """Build from ``values[r][s] = f(b_r, b_s)`` on the canonical basis of the support."""
        f, n = base.field, base.dim
        pm = m_coordinates(base, support)
        d = support.dim
        k = kernel_space.dim
        t = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = [0] * k
                for r in range(d):
                    if pm.data[r][i] == 0:
                        continue
                    for s in range(d):
                        c = pm.data[r][i] * pm.data[s][j]
                        if c != 0:
                            for q in range(k):
                                acc[q] += c * values[r][s][q]
                row.append(f.vector(acc))
            t.append(tuple(row))
        return cls(base, kernel_space, tuple(t), support)

    def __call__(self, x, y) -> tuple:
        f = self.base.field
        k = self.kernel_space.dim
        acc = [0] * k
        for i, xi in enumerate(x):
            if xi == 0:
                continue
            for j, yj in enumerate(y):
                if yj == 0:
                    continue
                c = xi * yj
                for q, v in enumerate(self.tensor[i][j]):
                    if v != 0:
                        acc[q] += c * v
        return tuple(f.reduce(a) for a in acc)

    def support_values(self) -> list[list[tuple]]:
        b = self.support.basis
        return [[self(x, y) for y in b] for x in b]

    def is_zero(self) -> bool:
        return all(c == 0 for r in self.tensor for v in r for c in v)


def m_coordinates(L: HomLieAlgebra, m: Subspace) -> Matrix:
    """``dim M x dim L`` matrix of the projection onto ``M`` along the pivot-greedy complement."""
    f, n = L.field, L.dim
    comp = complement(m, L.full())
    if n == 0:
        return Matrix.zeros(f, 0, 0)
    change = Matrix.from_columns(f, list(m.basis) + list(comp.basis), n)
    inv = change.inverse()
    return Matrix(f, m.dim, n, inv.data[: m.dim])


def factorset_validate(fs: FactorSet) -> Report:
    L, K, M = fs.base, fs.kernel_space, fs.support
    f, n = L.field, L.dim
    z = f.zero_vector(K.dim)
    rep = Report()
    rep.add("kernel_abelian", PASS if K.is_abelian() else fail(None, "K must be abelian"))
    diag = next((i for i in range(n) if fs.tensor[i][i] != z), None)
    rep.add("diagonal", PASS if diag is None else fail((diag, diag), "f(l, l) != 0"))
    skew = PASS
    for i in range(n):
        for j in range(i + 1, n):
            if f.add(fs.tensor[i][j], fs.tensor[j][i]) != z:
                skew = fail((i, j), "f(x, y) != -f(y, x)")
                break
        if not skew:
            break
    rep.add("skew", skew)

    e = L.basis()
    al = [L.alpha.column(i) for i in range(n)]
    cyc = PASS
    for i in range(n):
        for j in range(n):
            for k in range(n):
                s = f.add(f.add(fs(L.br(e[i], e[j]), al[k]), fs(L.br(e[j], e[k]), al[i])), fs(L.br(e[k], e[i]), al[j]))
                if s != z:
                    cyc = fail((i, j, k), "cyclic condition fails")
                    break
            if not cyc:
                break
        if not cyc:
            break
    rep.add("cyclic", cyc)

    comp = complement(M, L.full())
    sup = PASS
    for c in comp.basis:
        for j in range(n):
            if fs(c, e[j]) != z:
                sup = fail((c.index(f.one), j), "f does not vanish off M x M")
                break
        if not sup:
            break
    rep.add("support", sup)

    eq = PASS
    b = M.basis
    for r in range(len(b)):
        for s in range(r + 1, len(b)):
            if fs(L.alpha.apply(b[r]), L.alpha.apply(b[s])) != K.alpha.apply(fs(b[r], b[s])):
                eq = fail((r, s), "f(alpha x, alpha y) != alpha_K f(x, y)")
                break
        if not eq:
            break
    rep.add("equivariance", eq)
    rep.info["beyond_paper"] = ["equivariance"]
    return rep


def extension_from_factorset(fs: FactorSet, pair: Pair, name: str = "") -> RelCentralExt:
    """``sigma_f: (K x M)_f -> L`` with ``^l(x, m) = (f(l, m), [l, m])``."""
    rep = factorset_validate(fs)
    if not rep.ok:
        raise InvalidFactorSet(f"factor set fails {rep.failures()}")
    L, K, M = fs.base, fs.kernel_space, fs.support
    if pair.ambient != L or pair.ideal != M:
        raise InvalidFactorSet("pair does not match the factor set's base and support")
    f = L.field
    k, d, n = K.dim, M.dim, L.dim
    size = k + d
    b = M.basis
    zero = f.zero_vector(size)
    t = [[zero] * size for _ in range(size)]
    for r in range(d):
        for s in range(d):
            t[k + r][k + s] = fs(b[r], b[s]) + M.coordinates(L.br(b[r], b[s]))
    alpha = Matrix.block_diag(K.alpha, M.restrict(L.alpha))
    Mf = HomLieAlgebra.from_tensor(f, t, alpha, name)
    sig = LinearMap(Mf, L, Matrix.zeros(f, n, k).hstack(M.basis_matrix()))
    tens = []
    for i in range(n):
        row = [zero] * k
        for s in range(d):
            row.append(fs(L.e(i), b[s]) + M.coordinates(L.br(L.e(i), b[s])))
        tens.append(row)
    act = HomAction.from_tensor(L, Mf, tens)
    return _finish(RelCentralExt(Mf, L, sig, act, M, name), "extension_from_factorset")


@dataclass(frozen=True)
class Extraction:
    factorset: FactorSet
    morphism: ExtMorphism  # (1_L, beta): sigma_f -> sigma
    transversal: Subspace  # T

    def __iter__(self):
        yield self.factorset
        yield self.morphism


def kernel_algebra(e: RelCentralExt) -> HomLieAlgebra:
    K, _ = subalgebra(e.domain, e.kernel, name="Ker sigma")
    return K


def factorset_from_extension(e: RelCentralExt) -> Extraction:
    """Factor set ``f(m1, m2) = [t_m1, t_m2] - t_[m1, m2]`` from a twist-invariant transversal."""
    M, L = e.domain, e.codomain
    f = e.field
    ker = e.kernel
    try:
        T = invariant_complement(ker, M.full(), M.alpha)
    except NotFound as exc:
        raise NoInvariantComplement("Ker sigma has no twist-invariant complement") from exc
    K = kernel_algebra(e)
    tb = T.basis_matrix()
    st = e.sigma.matrix @ tb
    target = e.target
    trans = []
    for v in target.basis:
        trans.append(tb.apply(solve(st, v)))

    def t_of(m):
        return f.combo(target.coordinates(m), trans, M.dim)

    d = target.dim
    vals = []
    for r in range(d):
        row = []
        for s in range(d):
            w = f.sub(M.br(trans[r], trans[s]), t_of(L.br(target.basis[r], target.basis[s])))
            row.append(ker.coordinates(w))
        vals.append(row)
    fs = FactorSet.from_support_values(L, K, target, vals)
    ext_f = extension_from_factorset(fs, e.pair)
    beta = LinearMap(ext_f.domain, M, Matrix.from_columns(f, list(ker.basis) + trans, M.dim))
    return Extraction(fs, ExtMorphism(LinearMap.identity(L), beta, ext_f, e), T)


def _commutator_map(w, forward: bool = True):
    """Ambient action of ``beta'`` (or its inverse) on vectors of the source commutator."""
    e1, e2 = w.source, w.dest
    c1, c2 = e1.commutator, e2.commutator
    if forward:
        bp = w.beta_prime
        return lambda v: c2.basis_matrix().apply(bp.apply(c1.coordinates(v)))
    bpi = w.beta_prime.inverse()
    return lambda v: c1.basis_matrix().apply(bpi.apply(c2.coordinates(v)))


@dataclass(frozen=True)
class Transport:
    factorset: FactorSet  # g, for sigma_1
    theta: ExtMorphism  # (gamma, theta): sigma_1g -> sigma_2h
    source_extension: RelCentralExt
    dest_extension: RelCentralExt


def transport_factorset(h: FactorSet, witness) -> Transport:
    """``g(m1, m2) = beta'^-1 h(gamma m1, gamma m2)`` along an isoclinism of stem extensions.

    ``h`` must be written in the canonical basis of ``Ker sigma_2``.
    """
    from .isoclinism import witness_validate

    e1, e2 = witness.source, witness.dest
    if not is_stem(e1) or not is_stem(e2):
        raise NotStem("transport needs stem extensions")
    chk = witness_validate(witness)
    if not chk:
        raise InvalidWitness(str(chk.failures()))
    k1, k2 = e1.kernel, e2.kernel
    if h.kernel_space.dim != k2.dim or h.base != e2.codomain or h.support != e2.target:
        raise InvalidWitness("h is not a factor set for the witness target")
    L1 = e1.codomain
    f = e1.field
    back = _commutator_map(witness, forward=False)
    fwd = _commutator_map(witness, forward=True)
    g_ = witness.gamma
    M1 = e1.target
    vals = []
    for x in M1.basis:
        row = []
        for y in M1.basis:
            hk = f.combo(h(g_(x), g_(y)), k2.basis, e2.domain.dim)
            row.append(k1.coordinates(back(hk)))
        vals.append(row)
    K1 = kernel_algebra(e1)
    g = FactorSet.from_support_values(L1, K1, M1, vals)
    ext_g = extension_from_factorset(g, e1.pair)
    ext_h = extension_from_factorset(h, e2.pair)
    cols = []
    for x in k1.basis:
        cols.append(k2.coordinates(fwd(x)) + f.zero_vector(e2.target.dim))
    for m in M1.basis:
        cols.append(f.zero_vector(k2.dim) + e2.target.coordinates(g_(m)))
    theta = LinearMap(ext_g.domain, ext_h.domain, Matrix.from_columns(f, cols, ext_h.domain.dim))
    gamma = LinearMap(ext_g.codomain, ext_h.codomain, g_.matrix)
    return Transport(g, ExtMorphism(gamma, theta, ext_g, ext_h), ext_g, ext_h)


@dataclass(frozen=True)
class FactorIso:
    morphism: ExtMorphism  # (gamma, lambda): sigma_f -> sigma_g
    d: Matrix  # K-coordinates of d on the canonical basis of M


def factorset_iso(f_: FactorSet, g_: FactorSet, witness) -> FactorIso:
    """Isomorphism ``lambda(x, m) = beta'(x, 0) + (d(m), gamma(m))`` between ``sigma_f`` and ``sigma_g``."""
    from .isoclinism import witness_validate

    ef, eg = witness.source, witness.dest
    if ef.domain.dim != eg.domain.dim:
        raise DimMismatch("(K x M)_f and (K x M)_g differ in dimension")
    if f_.support != g_.support or f_.base != g_.base or f_.kernel_space.dim != g_.kernel_space.dim:
        raise DimMismatch("factor sets live on different data")
    if not is_stem(ef):
        raise NotStem("sigma_f must be stem")
    chk = witness_validate(witness)
    if not chk:
        raise InvalidWitness(str(chk.failures()))
    F = ef.field
    L = ef.codomain
    M = f_.support
    k = f_.kernel_space.dim
    size = ef.domain.dim
    cf = ef.commutator
    bp = _commutator_map(witness, forward=True)
    gamma = witness.gamma

    basis_vecs, images, dvals = [], [], {}
    for a in range(k):
        x = F.unit(size, a)
        basis_vecs.append(x)
        images.append(bp(x))
    comm = pair_commutator(Pair(L, M))
    sc = ef.sigma.matrix @ cf.basis_matrix()
    for w in comm.basis:
        try:
            u = cf.basis_matrix().apply(solve(sc, w))
        except NoSolution as exc:
            raise InconsistentD("no commutator element lies over [m, l]") from exc
        a_part = u[:k] + F.zero_vector(size - k)
        img = F.sub(bp(u), bp(a_part))
        if img[k:] != M.coordinates(gamma(w)):
            raise InconsistentD("beta' does not cover gamma on [M, L]")
        basis_vecs.append(F.zero_vector(k) + M.coordinates(w))
        images.append(img)
        dvals[w] = img[:k]
    for c in complement(comm, M).basis:
        basis_vecs.append(F.zero_vector(k) + M.coordinates(c))
        images.append(F.zero_vector(k) + M.coordinates(gamma(c)))
        dvals[c] = F.zero_vector(k)
    change = Matrix.from_columns(F, basis_vecs, size)
    lam = Matrix.from_columns(F, images, size) @ change.inverse()
    lmap = LinearMap(ef.domain, eg.domain, lam)
    # d on the canonical basis of M
    dbasis = list(comm.basis) + list(complement(comm, M).basis)
    dchange = Matrix.from_columns(F, [M.coordinates(v) for v in dbasis], M.dim)
    dmat = Matrix.from_columns(F, [dvals[v] for v in dbasis], k) @ dchange.inverse() if M.dim else \
        Matrix.zeros(F, k, 0)
    gmap = LinearMap(ef.codomain, eg.codomain, gamma.matrix)
    return FactorIso(ExtMorphism(gmap, lmap, ef, eg), dmat)


def factorset_space(base: HomLieAlgebra, kernel_space: HomLieAlgebra, support: Subspace) -> list[FactorSet]:
    """A basis of all factor sets ``L x L -> K`` supported on ``M``, equivariance included."""
    F = base.field
    d, k = support.dim, kernel_space.dim
    pairs = [(r, s) for r in range(d) for s in range(r + 1, d)]
    nvar = len(pairs) * k
    if nvar == 0:
        return []
    zero = F.zero_vector(k)

    def build(x):
        vals = [[zero] * d for _ in range(d)]
        for p_, (r, s) in enumerate(pairs):
            v = tuple(x[p_ * k:(p_ + 1) * k])
            vals[r][s] = v
            vals[s][r] = F.scale(-1, v)
        return FactorSet.from_support_values(base, kernel_space, support, vals)

    n = base.dim
    e = base.basis()
    al = [base.alpha.column(i) for i in range(n)]
    brs = {(i, j): base.br(e[i], e[j]) for i in range(n) for j in range(n)}
    b = support.basis
    columns = []
    for v in range(nvar):
        fs = build(F.unit(nvar, v))
        res = []
        for i in range(n):
            for j in range(i + 1, n):
                for l in range(j + 1, n):
                    s = F.add(F.add(fs(brs[i, j], al[l]), fs(brs[j, l], al[i])), fs(brs[l, i], al[j]))
                    res.extend(s)
        for r, s_ in pairs:
            res.extend(F.sub(fs(base.alpha.apply(b[r]), base.alpha.apply(b[s_])),
                             kernel_space.alpha.apply(fs(b[r], b[s_]))))
        columns.append(res)
    if not columns[0]:
        sol = [F.unit(nvar, v) for v in range(nvar)]
    else:
        sol = kernel(Matrix.from_columns(F, columns, len(columns[0]))).basis
    return [build(x) for x in sol]
