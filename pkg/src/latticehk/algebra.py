"""Algebra presentations: the initial algebra, split tables Q^k, symbolic
free products, and the degree-two relation calculus for CCR presentations.

A CCR-style relation ``[a, b] = c * 1`` is carried as the pair
``(a wedge b, -c)`` living in the exterior square of the generator space
extended by a scalar line.  For presentations whose relations all have this
shape, membership in the two-sided ideal truncated at filtration degree two
coincides with membership in the linear span of the relation vectors; that
principle is validated against a brute-force truncated ideal closure in the
test suite and is flagged in reports as an oracle-validated assumption.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Optional, Sequence

from .rational import Mat, Q0, Q1, QQ, row_space


class AlgebraError(Exception):
    pass


@dataclass(frozen=True)
class Initial:
    """The initial unital algebra (the ground field with its unit)."""

    def __repr__(self):
        return "Initial"


INITIAL = Initial()


@dataclass(frozen=True)
class QPower:
    """The split commutative table algebra Q^k with idempotent basis."""

    k: int

    def __post_init__(self):
        if self.k < 1:
            raise AlgebraError("QPower needs k >= 1")

    def structure_constant(self, i: int, j: int, l: int) -> "QQ":
        return Q1 if i == j == l else Q0

    def unit_vector(self) -> tuple:
        return tuple(Q1 for _ in range(self.k))

    def __repr__(self):
        return f"QPower({self.k})"


@dataclass(frozen=True)
class FreeProduct:
    """Symbolic free product of ``copies`` copies of ``base``; compared by
    shape only, which is all the two-valued colimit evaluator needs."""

    base: object
    copies: int

    def __repr__(self):
        return f"FreeProduct({self.base!r}, {self.copies})"


@dataclass(frozen=True)
class CcrPresentation:
    """Generators Q^n with pairing relations [a,b] = sigma(a,b) * 1 plus an
    extra relation subspace in Lambda^2 + scalar coordinates."""

    n: int
    sigma: Mat
    extra: Optional[Mat] = None  # rows in wedge+scalar coordinates

    def __post_init__(self):
        if self.sigma.nrows != self.n or self.sigma.ncols != self.n:
            raise AlgebraError("sigma shape mismatch")
        if self.sigma.transpose() != -self.sigma:
            raise AlgebraError("sigma must be antisymmetric")

    def __repr__(self):
        return f"CcrPresentation(n={self.n})"


def table_check(alg: QPower) -> bool:
    """Associativity and unit laws for the split table (construction check)."""
    k = alg.k
    for i, j, l in product(range(k), repeat=3):
        for q in range(k):
            lhs_q = sum((alg.structure_constant(i, j, m) *
                         alg.structure_constant(m, l, q) for m in range(k)),
                        Q0)
            rhs_q = sum((alg.structure_constant(j, l, m) *
                         alg.structure_constant(i, m, q) for m in range(k)),
                        Q0)
            if lhs_q != rhs_q:
                return False
    unit = alg.unit_vector()
    for i in range(k):
        for q in range(k):
            s = sum((unit[j] * alg.structure_constant(j, i, q)
                     for j in range(k)), Q0)
            if s != (Q1 if q == i else Q0):
                return False
    return True


# ---------------------------------------------------------------------------
# hom enumeration for split tables
# ---------------------------------------------------------------------------


def _as_qpower(alg) -> QPower:
    if isinstance(alg, Initial):
        return QPower(1)
    if isinstance(alg, QPower):
        return alg
    raise AlgebraError(f"hom enumeration supports split tables Q^k only, "
                       f"got {alg!r}")


def enumerate_homs(A, B) -> list[Mat]:
    """All unital algebra maps Q^a -> Q^b.

    A map is determined by a partition of the b primitive idempotents among
    the a source idempotents; there are a^b of them.  Each candidate is
    re-verified to be unital and multiplicative on the basis.
    """
    a, b = _as_qpower(A).k, _as_qpower(B).k
    if max(a, b) > 6:
        raise AlgebraError("hom enumeration capped at dimension 6")
    out = []
    for assign in product(range(a), repeat=b):
        m = Mat([[Q1 if assign[r] == c else Q0 for c in range(a)]
                 for r in range(b)], a)
        if not _is_unital_mult(m, a, b):
            raise AlgebraError("enumerated candidate fails verification")
        out.append(m)
    return out


def _is_unital_mult(m: Mat, a: int, b: int) -> bool:
    unit = m.apply([Q1] * a)
    if any(v != Q1 for v in unit):
        return False
    for i in range(a):
        for j in range(a):
            ei = [Q1 if c == i else Q0 for c in range(a)]
            ej = [Q1 if c == j else Q0 for c in range(a)]
            prod_src = [x * y for x, y in zip(ei, ej)]
            lhs = m.apply(prod_src)
            rhs = tuple(x * y for x, y in zip(m.apply(ei), m.apply(ej)))
            if tuple(lhs) != rhs:
                return False
    return True


def count_homs(A, B) -> int:
    if isinstance(A, Initial):
        return 1
    return len(enumerate_homs(A, B))


# ---------------------------------------------------------------------------
# the two-valued diagram colimit
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ThinDiagram:
    """A finite thin diagram: objects 0..n-1 and a hom relation."""

    n: int
    homs: frozenset[tuple[int, int]]

    def hom(self, a: int, b: int) -> bool:
        return a == b or (a, b) in self.homs


def two_valued_colimit(D: ThinDiagram, values: Sequence):
    """Colimit of a diagram valued in {Initial, A} with forced transitions.

    Initial contributes nothing; the A-objects glue along identities, one
    free factor per weakly connected component of the A-subdiagram.
    """
    a_objs = [i for i in range(D.n) if not isinstance(values[i], Initial)]
    bases = {repr(values[i]) for i in a_objs}
    if len(bases) > 1:
        raise AlgebraError("two-valued colimit needs a single nontrivial "
                           "value")
    for (a, b) in D.homs:
        va, vb = values[a], values[b]
        if not isinstance(va, Initial) and isinstance(vb, Initial):
            raise AlgebraError("transition from the nontrivial value to "
                               "Initial is unsupported")
    if not a_objs:
        return INITIAL
    # weakly connected components over homs among A-objects
    parent = {i: i for i in a_objs}

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for (a, b) in D.homs:
        if a in parent and b in parent:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb
    k = len({find(i) for i in a_objs})
    A = values[a_objs[0]]
    return A if k == 1 else FreeProduct(A, k)


def count_cocones(D: ThinDiagram, values: Sequence, T) -> int:
    """Brute-force count of cocones from the diagram into the test algebra
    ``T``; used as the universal-property oracle for the colimit above."""
    legs = []
    for i in range(D.n):
        v = values[i]
        legs.append([None] if isinstance(v, Initial) else enumerate_homs(v, T))
    count = 0
    for choice in product(*[range(len(l)) for l in legs]):
        ok = True
        for (a, b) in D.homs:
            la = legs[a][choice[a]]
            lb = legs[b][choice[b]]
            if la is None:
                continue  # legs out of Initial are unique, always compatible
            if lb is None:
                ok = False  # A-object mapping through Initial target
                break
            if la != lb:
                ok = False
                break
        if ok:
            count += 1
    return count


def count_homs_from_value(value, T) -> int:
    if isinstance(value, Initial):
        return 1
    if isinstance(value, FreeProduct):
        return count_homs(value.base, T) ** value.copies
    return count_homs(value, T)


# ---------------------------------------------------------------------------
# the wedge + scalar relation calculus
# ---------------------------------------------------------------------------


class WedgeSpace:
    """Coordinates for Lambda^2(Q^n) + Q: pairs (i < j) then the scalar."""

    def __init__(self, n: int):
        self.n = n
        self.pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
        self.pair_index = {p: k for k, p in enumerate(self.pairs)}
        self.dim = len(self.pairs) + 1

    def relation_vector(self, u: Sequence, v: Sequence, c) -> tuple:
        """(u wedge v, -c) for the relation [u, v] = c * 1."""
        out = [Q0] * self.dim
        for k, (i, j) in enumerate(self.pairs):
            out[k] = QQ(u[i]) * QQ(v[j]) - QQ(u[j]) * QQ(v[i])
        out[-1] = -QQ(c)
        return tuple(out)

    def graph_of(self, sigma: Mat) -> Mat:
        """Span of all relations [e_i, e_j] = sigma(i,j) * 1."""
        rows = []
        for (i, j) in self.pairs:
            u = [Q1 if t == i else Q0 for t in range(self.n)]
            v = [Q1 if t == j else Q0 for t in range(self.n)]
            rows.append(self.relation_vector(u, v, sigma.data[i][j]))
        return row_space(rows, self.dim)


def relation_span(n: int, triples: Iterable[tuple]) -> Mat:
    """Row space of the relation vectors of ``(u, v, c)`` triples."""
    w = WedgeSpace(n)
    rows = [w.relation_vector(u, v, c) for (u, v, c) in triples]
    if not rows:
        return Mat([], w.dim)
    return row_space(rows, w.dim)


def consistency_check(span: Mat) -> bool:
    """True iff the span contains no (0, c) with c nonzero, i.e. the
    relations do not force 1 = 0."""
    if span.nrows == 0:
        return True
    wedge_part = Mat([r[:-1] for r in span.data], span.ncols - 1)
    return wedge_part.rank() == span.rank()


def perp_relation_triples(subspaces: Sequence[tuple[Mat, Mat]],
                          disjoint: Iterable[tuple[int, int]]):
    """Commutation triples (u, v, 0) spanning S_a wedge S_b for every causally
    disjoint tagged pair; subspaces are given as (basis-columns, unused)."""
    out = []
    for (a, b) in disjoint:
        Ba = subspaces[a][0]
        Bb = subspaces[b][0]
        for u in Ba.cols():
            for v in Bb.cols():
                out.append((u, v, Q0))
    return out


def ccr_relation_triples(basis: Mat, sigma_ambient: Mat):
    """CCR triples for all pairs from the columns of ``basis`` with the
    pairing evaluated through ``sigma_ambient``."""
    cols = basis.cols()
    out = []
    for i in range(len(cols)):
        for j in range(i + 1, len(cols)):
            u, v = cols[i], cols[j]
            c = _eval_sigma(sigma_ambient, u, v)
            out.append((u, v, c))
    return out


def _eval_sigma(sigma: Mat, u: Sequence, v: Sequence):
    return sum((QQ(u[i]) * sum((sigma.data[i][j] * QQ(v[j])
                                for j in range(sigma.ncols)), Q0)
                for i in range(sigma.nrows)), Q0)


# ---------------------------------------------------------------------------
# brute-force truncated ideal closure (oracle for the degree-2 principle)
# ---------------------------------------------------------------------------


class TruncatedFreeAlgebra:
    """The free algebra on n generators truncated at total degree d, as a
    plain coordinate space over words."""

    def __init__(self, n: int, d: int):
        self.n, self.d = n, d
        self.words = [()]
        frontier = [()]
        for _ in range(d):
            nxt = []
            for w in frontier:
                for g in range(n):
                    nxt.append(w + (g,))
            self.words.extend(nxt)
            frontier = nxt
        self.index = {w: i for i, w in enumerate(self.words)}
        self.dim = len(self.words)

    def zero(self):
        return [Q0] * self.dim

    def word_mul(self, w1, w2):
        w = w1 + w2
        return w if len(w) <= self.d else None

    def mul(self, v1, v2):
        out = self.zero()
        for i, a in enumerate(v1):
            if a == 0:
                continue
            for j, b in enumerate(v2):
                if b == 0:
                    continue
                w = self.word_mul(self.words[i], self.words[j])
                if w is not None:
                    out[self.index[w]] += a * b
        return out

    def gen(self, i):
        v = self.zero()
        v[self.index[(i,)]] = Q1
        return v

    def unit(self):
        v = self.zero()
        v[self.index[()]] = Q1
        return v

    def element_of_relation(self, u, v, c):
        """u v - v u - c * 1 as a coordinate vector."""
        vu = self.vec_of_linear(u)
        vv = self.vec_of_linear(v)
        out = [a - b for a, b in zip(self.mul(vu, vv), self.mul(vv, vu))]
        out[self.index[()]] -= QQ(c)
        return out

    def vec_of_linear(self, coeffs):
        v = self.zero()
        for i, c in enumerate(coeffs):
            if c != 0:
                v[self.index[(i,)]] += QQ(c)
        return v

    def ideal_span(self, triples):
        """Span of x * rho * y over monomial sandwiches within the
        truncation, for the relation elements rho of the given triples."""
        rows = []
        rhos = [self.element_of_relation(u, v, c) for (u, v, c) in triples]
        sandwiches = [w for w in self.words if len(w) <= self.d - 2]
        for rho in rhos:
            for wl in sandwiches:
                for wr in sandwiches:
                    if len(wl) + len(wr) > self.d - 2:
                        continue
                    vl = self.zero()
                    vl[self.index[wl]] = Q1
                    vr = self.zero()
                    vr[self.index[wr]] = Q1
                    rows.append(self.mul(self.mul(vl, rho), vr))
        if not rows:
            return Mat([], self.dim)
        return row_space(rows, self.dim)

    def ideal_contains(self, span: Mat, u, v, c) -> bool:
        cand = self.element_of_relation(u, v, c)
        if span.nrows == 0:
            return all(x == 0 for x in cand)
        aug = Mat(list(span.data) + [cand], self.dim)
        return aug.rank() == span.rank()
