"""Catalog algebras and a seeded generator of valid relative central extensions."""

from __future__ import annotations

import random
from fractions import Fraction

from .exactlin import GF, Q, Field, Matrix, Subspace, cyclic_closure
from .extension import (
    ConstructionError,
    RelCentralExt,
    _finish,
    inclusion_extension,
    product_with_abelian,
    quotient_ext,
)
from .factorset import FactorSet, InvalidFactorSet, extension_from_factorset, factorset_space
from .homlie import HomLieAlgebra, abelian, center, derived, direct_sum
from .pairact import HomAction, Pair

__all__ = [
    "h3",
    "twisted2",
    "sl2",
    "algebra_catalog",
    "base_algebras",
    "h3_stem",
    "twisted_kernel_extension",
    "generate_extension",
    "GenerationFailed",
]


class GenerationFailed(RuntimeError):
    pass


def h3(field: Field, alpha=None) -> HomLieAlgebra:
    """Heisenberg algebra ``[e1, e2] = e3``."""
    return HomLieAlgebra.from_brackets(field, 3, {(0, 1): {2: 1}}, alpha, "h3")


def twisted2(field: Field, lam) -> HomLieAlgebra:
    """``[e1, e2] = e2`` with twist ``diag(1, lam)``."""
    return HomLieAlgebra.from_brackets(field, 2, {(0, 1): {1: 1}}, Matrix.diag(field, [1, lam]),
                                       f"twisted2({lam})")


def sl2(field: Field) -> HomLieAlgebra:
    # basis h, e, f
    return HomLieAlgebra.from_brackets(field, 3, {(0, 1): {1: 2}, (0, 2): {2: -2}, (1, 2): {0: 1}}, None, "sl2")


def algebra_catalog() -> dict[str, HomLieAlgebra]:
    """Named algebras over Q, F2 and F3, all multiplicative and regular."""
    F2, F3 = GF(2), GF(3)
    cat = {}
    for n in range(1, 5):
        cat[f"abelian{n}"] = abelian(Q, n)
    cat["h3"] = h3(Q)
    cat["h3+abelian1"] = direct_sum(h3(Q), abelian(Q, 1), "h3+abelian1")
    cat["twisted2(2)"] = twisted2(Q, 2)
    cat["twisted2(3)"] = twisted2(Q, 3)
    cat["h3_twisted"] = h3(Q, Matrix.diag(Q, [2, 3, 6]))
    cat["abelian2_twisted"] = abelian(Q, 2, Matrix.diag(Q, [2, Fraction(1, 2)]), "abelian2_twisted")
    cat["sl2"] = sl2(Q)
    cat["h3/F2"] = h3(F2)
    cat["abelian2/F2"] = abelian(F2, 2)
    cat["h3/F3"] = h3(F3)
    cat["twisted2(2)/F3"] = twisted2(F3, 2)
    cat["abelian2_twisted/F3"] = abelian(F3, 2, Matrix.diag(F3, [1, 2]), "abelian2_twisted")
    return cat


def base_algebras(field: Field) -> list[HomLieAlgebra]:
    """Identity-twisted algebras used as bases ``L`` by the generator."""
    out = [abelian(field, n) for n in range(1, 5)]
    out += [h3(field), direct_sum(h3(field), abelian(field, 1), "h3+abelian1"),
            twisted2(field, 1)]
    if not field.is_prime or field.p > 2:
        out.append(sl2(field))
    return out


def _ideals(L: HomLieAlgebra) -> list[Subspace]:
    cands = [L.full(), derived(L), center(L), derived(L) + center(L)]
    out = []
    for m in cands:
        if m.dim and m not in out:
            out.append(m)
    return out


def h3_stem(field: Field) -> RelCentralExt:
    """``h3 -> abelian(2)`` from the cocycle ``f(e1, e2) = k``."""
    L, K = abelian(field, 2), abelian(field, 1)
    one, z = (field.one,), (field.zero,)
    fs = FactorSet.from_support_values(L, K, L.full(), [[z, one], [field.scale(-1, one), z]])
    return extension_from_factorset(fs, Pair(L, L.full()), "h3_stem")


def twisted_kernel_extension(field: Field) -> RelCentralExt:
    """``h3_stem x abelian(1)`` with the twist shearing the new kernel vector onto the old one.

    The kernel then has no twist-invariant complement of ``Ker cap [M*, L]``.
    """
    base = h3_stem(field)
    prod, _, _ = product_with_abelian(base, abelian(field, 1))
    M = prod.domain
    k = base.kernel.basis[0] + (field.zero,)
    cols = [M.alpha.column(j) for j in range(M.dim)]
    cols[-1] = field.add(cols[-1], k)
    alpha = Matrix.from_columns(field, cols, M.dim)
    Mt = HomLieAlgebra.from_tensor(field, [[list(v) for v in row] for row in M.bracket], alpha, M.name)
    sig = type(prod.sigma)(Mt, prod.codomain, prod.sigma.matrix)
    act = HomAction(prod.codomain, Mt, prod.action.tensor)
    return _finish(RelCentralExt(Mt, prod.codomain, sig, act, prod.target, "twisted_kernel"),
                   "twisted_kernel_extension")


# ----------------------------------------------------------------------------
# random generation
# ----------------------------------------------------------------------------


def _scalar(rng: random.Random, field: Field, nonzero=False):
    while True:
        v = field.reduce(rng.randint(-2, 2)) if not field.is_prime else rng.randrange(field.p)
        if v != 0 or not nonzero:
            return v


def _invertible(rng: random.Random, field: Field, n: int, diagonal: bool) -> Matrix:
    if diagonal:
        return Matrix.diag(field, [_scalar(rng, field, True) for _ in range(n)])
    while True:
        m = Matrix.from_rows(field, [[_scalar(rng, field) for _ in range(n)] for _ in range(n)], n)
        if m.is_invertible:
            return m


def _random_factorset(rng, L, K, M) -> FactorSet:
    basis = factorset_space(L, K, M)
    fs = FactorSet.zero(L, K, M)
    if not basis:
        return fs
    F = L.field
    t = [[list(v) for v in row] for row in fs.tensor]
    for b in basis:
        c = _scalar(rng, F)
        if c == 0:
            continue
        for i in range(L.dim):
            for j in range(L.dim):
                for q in range(K.dim):
                    t[i][j][q] += c * b.tensor[i][j][q]
    return FactorSet.from_tensor(L, K, t, M)


def _draw(rng: random.Random, field: Field, max_l: int, max_m: int, kind: str, depth: int = 0):
    bases = [L for L in base_algebras(field) if L.dim <= max_l]
    if kind == "inclusion":
        L = rng.choice(bases)
        opts = [m for m in _ideals(L) if m.dim <= max_m]
        if not opts:
            raise ConstructionError("no ideal fits the bounds")
        m = rng.choice(opts)
        return inclusion_extension(L, m, f"inclusion({L.name}, dim M={m.dim})")
    if kind == "twisted":
        n = rng.randint(1, min(max_l, max_m))
        L = abelian(field, n, _invertible(rng, field, n, diagonal=rng.random() < 0.5), f"abelian{n}_tw")
        return inclusion_extension(L, L.full(), f"inclusion({L.name})")
    if kind == "factorset":
        L = rng.choice(bases)
        opts = [m for m in _ideals(L) if m.dim < max_m]
        if not opts:
            raise ConstructionError("no ideal leaves room for a kernel")
        m = rng.choice(opts)
        k = rng.randint(1, min(2, max_m - m.dim))
        K = abelian(field, k)
        fs = _random_factorset(rng, L, K, m)
        return extension_from_factorset(fs, Pair(L, m), f"factorset({L.name}, dim M={m.dim}, dim K={k})")
    if kind == "product":
        if max_m < 2:
            raise ConstructionError("no room for an abelian factor")
        inner = rng.choice(["inclusion", "factorset", "twisted"])
        a_dim = rng.randint(1, min(2, max_m - 1))
        e = _draw(rng, field, max_l, max_m - a_dim, inner, depth + 1)
        A = abelian(field, a_dim, _invertible(rng, field, a_dim, diagonal=rng.random() < 0.7))
        ext, _, _ = product_with_abelian(e, A, f"{e.name} x abelian{a_dim}")
        return ext
    if kind == "quotient":
        e = _draw(rng, field, max_l, max_m, rng.choice(["product", "factorset"]), depth + 1)
        k = e.kernel
        if k.dim == 0:
            raise ConstructionError("kernel is zero")
        F = e.field
        v = F.combo([_scalar(rng, F) for _ in range(k.dim)], k.basis, e.domain.dim)
        if all(c == 0 for c in v):
            v = k.basis[0]
        n = cyclic_closure(e.domain.alpha, v)
        q, _ = quotient_ext(e, n, f"({e.name}) / dim {n.dim}")
        return q
    raise ValueError(f"unknown generator kind {kind!r}")


KINDS = ("inclusion", "twisted", "factorset", "product", "quotient")


def generate_extension(seed: int, bounds: tuple[int, int] = (4, 6), field: Field = Q,
                       kind: str | None = None, retries: int = 50) -> RelCentralExt:
    """A valid extension with ``dim L <= bounds[0]`` and ``dim M* <= bounds[1]``, fixed by ``seed``."""
    max_l, max_m = bounds
    if max_l < 1 or max_m < 1:
        raise ValueError("bounds must be positive")
    rng = random.Random(f"{seed}:{field.descriptor}:{max_l}:{max_m}:{kind}")
    for _ in range(retries):
        choice = kind or rng.choice(KINDS)
        try:
            e = _draw(rng, field, max_l, max_m, choice)
        except (ConstructionError, InvalidFactorSet):
            continue
        if e.codomain.dim <= max_l and e.domain.dim <= max_m:
            return e
    raise GenerationFailed(f"no valid extension after {retries} draws")
