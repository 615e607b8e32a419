import random
from itertools import product

import pytest

from latticehk.algebra import (AlgebraError, FreeProduct, INITIAL, Initial,
                               QPower, ThinDiagram, TruncatedFreeAlgebra,
                               WedgeSpace, consistency_check, count_cocones,
                               count_homs, count_homs_from_value,
                               enumerate_homs, relation_span, table_check,
                               two_valued_colimit)
from latticehk.rational import Mat, QQ, Q0, Q1


def test_table_laws():
    assert table_check(QPower(1))
    assert table_check(QPower(3))


def test_hom_counts_and_brute_force():
    assert count_homs(INITIAL, QPower(5)) == 1
    assert count_homs(QPower(1), QPower(1)) == 1
    assert count_homs(QPower(2), QPower(2)) == 4
    assert count_homs(QPower(2), QPower(1)) == 2
    # brute force: all 0/1 matrices that are unital and multiplicative
    a, b = 2, 2
    brute = 0
    for bits in product([0, 1], repeat=a * b):
        m = Mat([[bits[r * a + c] for c in range(a)] for r in range(b)])
        unit_ok = m.apply([Q1] * a) == tuple([Q1] * b)
        mult_ok = True
        for i in range(a):
            for j in range(a):
                ei = [Q1 if k == i else Q0 for k in range(a)]
                ej = [Q1 if k == j else Q0 for k in range(a)]
                lhs = m.apply([x * y for x, y in zip(ei, ej)])
                rhs = tuple(x * y for x, y in zip(m.apply(ei), m.apply(ej)))
                if tuple(lhs) != rhs:
                    mult_ok = False
        if unit_ok and mult_ok:
            brute += 1
    assert brute == 4


def test_hom_enumeration_guardrails():
    with pytest.raises(AlgebraError):
        enumerate_homs(QPower(7), QPower(2))


def test_two_valued_colimit_cases():
    A = QPower(2)
    D = ThinDiagram(3, frozenset({(0, 1), (1, 2)}))
    assert isinstance(two_valued_colimit(D, [INITIAL] * 3), Initial)
    assert two_valued_colimit(D, [INITIAL, A, A]) == A
    D2 = ThinDiagram(4, frozenset({(0, 1), (2, 3)}))
    out = two_valued_colimit(D2, [A, A, A, A])
    assert out == FreeProduct(A, 2)
    with pytest.raises(AlgebraError):
        two_valued_colimit(ThinDiagram(2, frozenset({(0, 1)})), [A, INITIAL])


def test_two_valued_colimit_universal_property():
    A = QPower(2)
    diagrams = [
        (ThinDiagram(4, frozenset({(0, 1), (2, 3)})), [A, A, A, A]),
        (ThinDiagram(5, frozenset({(0, 1), (2, 3), (4, 3)})),
         [A, A, A, A, INITIAL]),
        (ThinDiagram(3, frozenset({(0, 2), (1, 2)})), [A, A, A]),
        (ThinDiagram(2, frozenset()), [A, A]),
    ]
    for D, vals in diagrams:
        colim = two_valued_colimit(D, vals)
        for T in (QPower(1), QPower(2), QPower(3)):
            assert count_cocones(D, vals, T) == \
                count_homs_from_value(colim, T)


def test_relation_span_properties():
    w = WedgeSpace(3)
    assert relation_span(3, []).nrows == 0
    sigma = Mat([[0, 1, 0], [-1, 0, 0], [0, 0, 0]])
    graph = w.graph_of(sigma)
    assert graph.nrows == len(w.pairs)
    assert consistency_check(graph)
    # a relation forcing 1 = 0: [e1, e2] = 1 and [e1, e2] = 0 together
    bad = relation_span(3, [([1, 0, 0], [0, 1, 0], 1),
                            ([1, 0, 0], [0, 1, 0], 0)])
    assert not consistency_check(bad)
    # monotone in the input
    small = relation_span(3, [([1, 0, 0], [0, 1, 0], 1)])
    assert small.nrows <= bad.nrows


def test_relation_span_basis_independent():
    rng = random.Random(5)
    triples = [([1, 0, 0], [0, 1, 0], QQ(2)),
               ([0, 1, 0], [0, 0, 1], QQ(0))]
    base = relation_span(3, triples)
    for _ in range(4):
        # rewrite each (u, v) pair by an invertible 2x2 combination
        a, b, c, d = (rng.choice([-1, 1, 2]) for _ in range(4))
        if a * d - b * c == 0:
            continue
        changed = []
        for (u, v, s) in triples:
            u2 = [a * QQ(x) + b * QQ(y) for x, y in zip(u, v)]
            v2 = [c * QQ(x) + d * QQ(y) for x, y in zip(u, v)]
            s2 = (a * d - b * c) * QQ(s)
            changed.append((u2, v2, s2))
        got = relation_span(3, changed)
        assert got.rref()[0].data == base.rref()[0].data


def test_degree2_ideal_principle_oracle():
    rng = random.Random(11)
    for n in (2, 3):
        free = TruncatedFreeAlgebra(n, 4)
        w = WedgeSpace(n)
        for _ in range(4):
            triples = []
            for _ in range(rng.randint(1, 2)):
                u = [QQ(rng.randint(-2, 2)) for _ in range(n)]
                v = [QQ(rng.randint(-2, 2)) for _ in range(n)]
                triples.append((u, v, QQ(rng.randint(-2, 2))))
            span = relation_span(n, triples)
            ideal = free.ideal_span(triples)
            for _ in range(4):
                u = [QQ(rng.randint(-2, 2)) for _ in range(n)]
                v = [QQ(rng.randint(-2, 2)) for _ in range(n)]
                c = QQ(rng.randint(-2, 2))
                cand = w.relation_vector(u, v, c)
                if span.nrows:
                    in_span = Mat(list(span.data) + [cand],
                                  w.dim).rank() == span.rank()
                else:
                    in_span = all(x == 0 for x in cand)
                assert in_span == free.ideal_contains(ideal, u, v, c)
