"""Independent brute-force oracles used by the tests.

Nothing here calls into hlx's linear algebra or search code: extensions are
read out as raw integer arrays and every map is enumerated explicitly with
numpy, so agreement with the library is a real cross-check.
"""

import itertools
from fractions import Fraction

import numpy as np


# ---------------------------------------------------------------------------
# raw data
# ---------------------------------------------------------------------------


class Raw:
    """An extension over F_p as plain integer arrays."""

    def __init__(self, e):
        F = e.field
        assert F.is_prime
        self.p = p = F.p
        M, L = e.domain, e.codomain
        self.dm, self.dl = M.dim, L.dim
        # c[i, j, :] = [e_i, e_j]
        self.cM = np.array([[list(v) for v in row] for row in M.bracket], dtype=np.int64).reshape(self.dm, self.dm, self.dm) % p
        self.cL = np.array([[list(v) for v in row] for row in L.bracket], dtype=np.int64).reshape(self.dl, self.dl, self.dl) % p
        self.aM = np.array(M.alpha.data, dtype=np.int64).reshape(self.dm, self.dm) % p
        self.aL = np.array(L.alpha.data, dtype=np.int64).reshape(self.dl, self.dl) % p
        self.sigma = np.array(e.sigma.matrix.data, dtype=np.int64).reshape(self.dl, self.dm) % p
        # act[i, j, :] = ^{e_i} e_j
        self.act = np.array([[list(v) for v in row] for row in e.action.tensor],
                            dtype=np.int64).reshape(self.dl, self.dm, self.dm) % p
        self.target = span(p, [list(v) for v in e.target.basis], self.dl)
        # [M*, L] = span of ^{e_i} alpha*(e_j)
        gens = [self.act_on(np.eye(self.dl, dtype=np.int64)[i], self.aM[:, j]) for i in range(self.dl)
                for j in range(self.dm)]
        self.comm = span(p, gens, self.dm)
        self.kernel = {v for v in all_vectors(p, self.dm) if not (self.sigma @ np.array(v) % p).any()}

    def act_on(self, l, m):
        return np.einsum("i,j,ijk->k", l, m, self.act) % self.p


def all_vectors(p, n):
    return list(itertools.product(range(p), repeat=n))


def span(p, vectors, n):
    """The set of all vectors in the span, as tuples."""
    out = {tuple([0] * n)}
    for v in vectors:
        v = np.array(v, dtype=np.int64) % p
        out |= {tuple((np.array(w) + c * v) % p) for w in out for c in range(1, p)}
    return frozenset(out)


def basis_of(p, s, n):
    """Greedy basis of a span set, chosen from its elements in sorted order."""
    chosen, cur = [], span(p, [], n)
    for v in sorted(s):
        if v not in cur:
            chosen.append(v)
            cur = span(p, chosen, n)
    return chosen


def all_matrices(p, r, c):
    if r * c == 0:
        yield np.zeros((r, c), dtype=np.int64)
        return
    for digits in itertools.product(range(p), repeat=r * c):
        yield np.array(digits, dtype=np.int64).reshape(r, c)


def _bij(p, g):
    n = g.shape[0]
    if g.shape[0] != g.shape[1]:
        return False
    return len(span(p, [g[:, j] for j in range(n)], n)) == p ** n


def _morphism(p, g, c1, a1, c2, a2):
    """g: A1 -> A2 on bracket and twist."""
    if ((g @ a1 - a2 @ g) % p).any():
        return False
    lhs = np.einsum("kt,ijt->ijk", g, c1) % p
    rhs = np.einsum("ai,cj,ack->ijk", g, g, c2) % p
    return not ((lhs - rhs) % p).any()


def _image(p, g, s):
    return frozenset(tuple(g @ np.array(v) % p) for v in s)


# ---------------------------------------------------------------------------
# isomorphism and isoclinism
# ---------------------------------------------------------------------------


def _gammas(r1, r2):
    p = r1.p
    if r1.dl != r2.dl:
        return
    for g in all_matrices(p, r1.dl, r1.dl):
        if _bij(p, g) and _morphism(p, g, r1.cL, r1.aL, r2.cL, r2.aL) and _image(p, g, r1.target) == r2.target:
            yield g


def isomorphic(e1, e2) -> bool:
    """All (gamma, beta) with both Hom-Lie isos, gamma sigma1 = sigma2 beta,
    gamma(M1) = M2 and beta([M1*, L1]) = [M2*, L2]."""
    r1, r2 = Raw(e1), Raw(e2)
    p = r1.p
    if r1.dm != r2.dm:
        return False
    gammas = list(_gammas(r1, r2))
    if not gammas:
        return False
    for b in all_matrices(p, r1.dm, r1.dm):
        if not _bij(p, b) or not _morphism(p, b, r1.cM, r1.aM, r2.cM, r2.aM):
            continue
        if _image(p, b, r1.comm) != r2.comm:
            continue
        for g in gammas:
            if not ((g @ r1.sigma - r2.sigma @ b) % p).any():
                return True
    return False


def _commutator_maps(r1, r2):
    """Linear bijections [M1*, L1] -> [M2*, L2] respecting the restricted bracket and twist,
    each as a full lookup table."""
    p = r1.p
    b1 = basis_of(p, r1.comm, r1.dm)
    if len(b1) != len(basis_of(p, r2.comm, r2.dm)):
        return
    elems = sorted(r2.comm)
    for imgs in itertools.product(elems, repeat=len(b1)):
        if len(span(p, imgs, r2.dm)) != len(r2.comm):
            continue
        table = _linear_table(p, b1, imgs, r1.dm, r2.dm)
        ok = True
        for x in b1:
            ax = tuple(r1.aM @ np.array(x) % p)
            if tuple(r2.aM @ np.array(table[x]) % p) != table[ax]:
                ok = False
                break
            for y in b1:
                xy = tuple(np.einsum("i,j,ijk->k", np.array(x), np.array(y), r1.cM) % p)
                rhs = tuple(np.einsum("i,j,ijk->k", np.array(table[x]), np.array(table[y]), r2.cM) % p)
                if table[xy] != rhs:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            yield table


def _linear_table(p, basis, images, n_in, n_out):
    """Every vector of span(basis) mapped linearly to the matching combination of images."""
    table = {}
    for coeffs in itertools.product(range(p), repeat=len(basis)):
        v = np.zeros(n_in, dtype=np.int64)
        w = np.zeros(n_out, dtype=np.int64)
        for c, b, im in zip(coeffs, basis, images):
            v = v + c * np.array(b)
            w = w + c * np.array(im)
        table[tuple(int(x) for x in v % p)] = tuple(int(x) for x in w % p)
    return table


def isoclinism_witnesses(e1, e2, first_only=True):
    """(gamma, beta' table) pairs satisfying the isoclinism conditions, checking
    compatibility against every admissible m2, not just one."""
    r1, r2 = Raw(e1), Raw(e2)
    p = r1.p
    out = []
    gammas = list(_gammas(r1, r2))
    if not gammas:
        return out
    maps = list(_commutator_maps(r1, r2))
    if not maps:
        return out
    aL2_inv = _inverse_mod(r2.aL, p)
    m2_all = all_vectors(p, r2.dm)
    s2a = r2.sigma @ r2.aM % p
    for g in gammas:
        shift = aL2_inv @ g @ r1.aL % p
        # all m2 with sigma2 alpha2*(m2) = gamma sigma1 alpha1*(e_j)
        partners = []
        for j in range(r1.dm):
            want = g @ r1.sigma @ r1.aM[:, j] % p
            partners.append([np.array(m) for m in m2_all if not ((s2a @ np.array(m) - want) % p).any()])
        if any(not ps for ps in partners):
            continue
        for table in maps:
            good = True
            for i in range(r1.dl):
                l1 = np.eye(r1.dl, dtype=np.int64)[i]
                l2 = shift[:, i]
                for j in range(r1.dm):
                    x = tuple(r1.act_on(l1, r1.aM[:, j]))
                    bx = table[x]
                    for m2 in partners[j]:
                        if tuple(r2.act_on(l2, r2.aM @ m2 % p)) != bx:
                            good = False
                            break
                    if not good:
                        break
                if not good:
                    break
            if good:
                out.append((g, table))
                if first_only:
                    return out
    return out


def isoclinic(e1, e2) -> bool:
    return bool(isoclinism_witnesses(e1, e2))


def _inverse_mod(a, p):
    n = a.shape[0]
    for b in all_matrices(p, n, n):
        if not ((a @ b - np.eye(n, dtype=np.int64)) % p).any():
            return b
    raise ValueError("singular")


# ---------------------------------------------------------------------------
# Hom-Lie axioms over Q or F_p, straight from the definitions
# ---------------------------------------------------------------------------


def axiom_violations(tensor, alpha, p=0):
    """Every violating basis tuple per axiom class; ``tensor[i][j][k]``, ``alpha[r][c]``."""
    n = len(tensor)
    dt = np.int64 if p else object
    T = np.array([[[x if p else Fraction(x) for x in v] for v in row] for row in tensor], dtype=dt).reshape(n, n, n)
    A = np.array([[x if p else Fraction(x) for x in r] for r in alpha], dtype=dt).reshape(n, n)

    def nz(x):
        return (x % p != 0) if p else (x != 0)

    out = {"skew": set(), "hom_jacobi": set(), "multiplicative": set()}
    if n == 0:
        return out
    sym = T + T.transpose(1, 0, 2)
    for i in range(n):
        for j in range(i, n):
            if nz(sym[i, j]).any() or (i == j and nz(T[i, i]).any()):
                out["skew"].add((i, j))
    # AT[i, b, t] = [alpha e_i, e_b]_t, term[i, j, k] = [alpha e_i, [e_j, e_k]]
    AT = np.einsum("ai,abt->ibt", A, T)
    term = np.einsum("jkb,ibt->ijkt", T, AT)
    jac = term + term.transpose(1, 2, 0, 3) + term.transpose(2, 0, 1, 3)
    for i, j, k in zip(*np.nonzero(nz(jac).any(axis=3))):
        out["hom_jacobi"].add((int(i), int(j), int(k)))
    # alpha [e_i, e_j]  vs  [alpha e_i, alpha e_j]
    lhs = np.einsum("ta,ija->ijt", A, T)
    rhs = np.einsum("ai,bj,abt->ijt", A, A, T)
    bad = nz(lhs - rhs).any(axis=2)
    for i in range(n):
        for j in range(i + 1, n):
            if bad[i, j]:
                out["multiplicative"].add((i, j))
    return out
