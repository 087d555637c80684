"""Small fixed extension pools shared by several test modules."""

import random
from functools import lru_cache

from hlx.exactlin import GF, Matrix
from hlx.extension import inclusion_extension, is_stem, relabel
from hlx.generate import generate_extension, h3_stem, twisted2
from hlx.homlie import abelian


def random_invertible(rng, F, n):
    while True:
        m = Matrix.from_rows(F, [[rng.randrange(F.p) for _ in range(n)] for _ in range(n)], n)
        if m.is_invertible:
            return m


@lru_cache(maxsize=None)
def gf2_stem_pool():
    """Stem extensions over F2 with dim L <= 2 and dim M* <= 3, including relabelled copies."""
    F = GF(2)
    rng = random.Random(3)
    J = Matrix.from_rows(F, [[1, 1], [0, 1]], 2)
    t2 = twisted2(F, 1)
    aJ = abelian(F, 2, J, "abelian2_jordan")
    pool = [
        inclusion_extension(abelian(F, 1), abelian(F, 1).full(), "a1"),
        inclusion_extension(abelian(F, 2), abelian(F, 2).full(), "a2"),
        inclusion_extension(t2, t2.full(), "t2"),
        inclusion_extension(t2, t2.span([(0, 1)]), "t2d"),
        h3_stem(F),
        inclusion_extension(aJ, aJ.full(), "aJ"),
        inclusion_extension(aJ, aJ.span([(1, 0)]), "aJ1"),
    ]
    for s in range(40):
        e = generate_extension(s, (2, 3), F)
        if is_stem(e) and len(pool) < 12:
            pool.append(e)
    for base in list(pool[2:5]):
        e, _ = relabel(base, random_invertible(rng, F, base.domain.dim),
                       random_invertible(rng, F, base.codomain.dim), base.name + "'")
        pool.append(e)
    assert all(is_stem(e) and e.codomain.dim <= 2 and e.domain.dim <= 3 for e in pool)
    return tuple(pool)
