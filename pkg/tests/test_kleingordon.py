import random

import pytest

from latticehk.geometry import (LatticeEmbedding, cone, region_diamond,
                                region_points, region_slab)
from latticehk.kleingordon import (KgConfig, KgContext, TimesliceSkip,
                                   apply_P, field_add, field_clean, green,
                                   pairing, propagator, pushforward_matrix)
from latticehk.rational import Mat, QQ, Q0, Q1


def test_stencil_values(plane):
    out = apply_P(KgConfig(plane, 0), {(0, 0): Q1})
    assert out[(1, 0)] == -1 and out[(-1, 0)] == -1
    assert out[(0, 1)] == 1 and out[(0, -1)] == 1
    assert (0, 0) not in out
    m = apply_P(KgConfig(plane, QQ(1, 4)), {(0, 0): Q1})
    assert m[(0, 0)] == QQ(1, 4)


def test_stencil_symmetry(kg_plane):
    rng = random.Random(2)
    for _ in range(10):
        f = field_clean({(rng.randint(0, 3), rng.randint(-3, 3)):
                         QQ(rng.randint(-3, 3)) for _ in range(3)})
        g = field_clean({(rng.randint(0, 3), rng.randint(-3, 3)):
                         QQ(rng.randint(-3, 3)) for _ in range(3)})
        lhs = sum((v * g.get(p, Q0)
                   for p, v in apply_P(kg_plane.cfg, f).items()), Q0)
        rhs = sum((v * f.get(p, Q0)
                   for p, v in apply_P(kg_plane.cfg, g).items()), Q0)
        assert lhs == rhs


def test_green_inverse_and_uniqueness(kg_plane):
    phi = {(0, 0): Q1, (1, 2): QQ(-2)}
    gp = green(kg_plane.cfg, phi, "retarded", t_stop=12)
    back = field_clean(apply_P(kg_plane.cfg, gp))
    assert {p: v for p, v in back.items() if p[0] < 12} == phi
    gm = green(kg_plane.cfg, phi, "advanced", t_stop=-12)
    back2 = field_clean(apply_P(kg_plane.cfg, gm))
    assert {p: v for p, v in back2.items() if p[0] > -12} == phi
    # G+ after P is the identity on compactly supported fields
    gpp = green(kg_plane.cfg, field_clean(apply_P(kg_plane.cfg, phi)),
                "retarded", t_stop=12)
    assert {p: v for p, v in gpp.items() if p[0] < 11} == \
        {p: v for p, v in phi.items() if p[0] < 11}


def test_green_support_in_cone(kg_plane, plane):
    gp = green(kg_plane.cfg, {(0, 0): Q1}, "retarded", t_stop=10)
    assert all(abs(x) <= t for (t, x) in gp)
    c = cone(plane, region_points(plane, [(0, 0)]), "future", False, 10)
    assert all(p in c.pts for p in gp)


def test_propagator_kills_P(kg_plane):
    phi = {(0, 0): Q1}
    g = propagator(kg_plane.cfg, phi, -6, 6)
    pg = apply_P(kg_plane.cfg,
                 {p: v for p, v in g.items() if -5 <= p[0] <= 5})
    inner = {p: v for p, v in field_clean(pg).items() if -4 <= p[0] <= 4}
    assert inner == {}


def test_pairing_properties(kg_cyl, cyl):
    rng = random.Random(4)
    for _ in range(15):
        f = field_clean({(rng.randint(0, 3), rng.randint(0, 5)):
                         QQ(rng.randint(-3, 3)) for _ in range(3)})
        g = field_clean({(rng.randint(0, 3), rng.randint(0, 5)):
                         QQ(rng.randint(-3, 3)) for _ in range(3)})
        if not f or not g:
            continue
        assert pairing(kg_cyl.cfg, f, f) == 0
        assert pairing(kg_cyl.cfg, f, g) == -pairing(kg_cyl.cfg, g, f)
        assert pairing(kg_cyl.cfg, apply_P(kg_cyl.cfg, f), g) == 0
    # spacelike separated deltas pair to zero
    assert pairing(kg_cyl.cfg, {(0, 0): Q1}, {(0, 3): Q1}) == 0


def test_generator_space_dims(kg_plane, kg_cyl, plane, cyl):
    assert kg_plane.space(region_points(plane, [(0, 0)])).dim == 1
    s2 = kg_cyl.space(region_slab(cyl, 0, 1))
    s4 = kg_cyl.space(region_slab(cyl, 0, 3))
    assert s2.dim == 12 and s4.dim == 12  # two rows of Cauchy data
    dia = kg_plane.space(region_diamond(plane, (0, 0), (6, 0)))
    assert dia.dim == 12


def test_extension_injective_and_cauchy_iso(kg_cyl, cyl):
    s01 = region_slab(cyl, 0, 1)
    s03 = region_slab(cyl, 0, 3)
    ext = kg_cyl.extension(s01.points(), s03.points())
    assert ext.rank() == 12  # injective and onto: the time-slice iso
    dia_small = region_diamond(cyl, (1, 0), (3, 0))
    dia_big = region_diamond(cyl, (0, 0), (4, 0))
    ext2 = kg_cyl.extension(dia_small.points(), dia_big.points())
    assert ext2.rank() == kg_cyl.space(dia_small.points()).dim


def test_sigma_descends(kg_cyl, cyl):
    s = kg_cyl.space(region_slab(cyl, 0, 2))
    sig = s.sigma_reduced()
    assert sig.transpose() == -sig
    assert any(v != 0 for row in sig.data for v in row)


def test_timeslice_flat_cut(kg_cyl, cyl):
    U = region_points(cyl, [(1, 0), (2, 0)])
    V = region_slab(cyl, 0, 3)
    cut = kg_cyl.timeslice_map(U.points(), V.points())
    ext = kg_cyl.extension(U.points(), V.points())
    assert cut == ext  # plain inclusions reduce to extension by zero


def test_timeslice_proper_localized_morphism(kg_cyl, cyl):
    # U inside the development of V but not inside V
    U = region_slab(cyl, 2, 3)
    V = region_slab(cyl, 0, 1)
    cut = kg_cyl.timeslice_map(U.points(), V.points())
    assert cut.nrows == cut.ncols == 12
    assert cut.rank() == 12  # Cauchy-type morphism: an isomorphism
    # composing back is the identity on classes
    back = kg_cyl.timeslice_map(V.points(), U.points())
    assert back @ cut == Mat.identity(12)


def test_timeslice_skip(kg_cyl, cyl):
    U = region_slab(cyl, 0, 1)
    V = region_points(cyl, [(3, 0), (4, 0)])  # too small for any flat cut
    with pytest.raises(TimesliceSkip):
        kg_cyl.timeslice_map(U.points(), V.points())


def test_half_cuts_cancel(kg_cyl):
    # P(chi+ G phi) + P(chi- G phi) = P(G phi) = 0 exactly
    phi = {(1, 0): Q1}
    g = propagator(kg_cyl.cfg, phi, 2, 3)
    w_plus, w_minus = {}, {}
    for ((t, x), v) in g.items():
        if t == 3:
            w_plus[(2, x)] = w_plus.get((2, x), Q0) - v
            w_minus[(2, x)] = w_minus.get((2, x), Q0) + v
        if t == 2:
            w_plus[(3, x)] = w_plus.get((3, x), Q0) + v
            w_minus[(3, x)] = w_minus.get((3, x), Q0) - v
    assert field_clean(field_add(w_plus, w_minus)) == {}


def test_pushforward_identification(kg_plane, plane):
    f = LatticeEmbedding(plane, plane, 2, -1)
    U = region_diamond(plane, (0, 0), (4, 0))
    m = pushforward_matrix(kg_plane, kg_plane, f, U)
    assert m.nrows == m.ncols and m.rank() == m.nrows
    # naturality with extensions
    V = region_diamond(plane, (0, 0), (6, 0))
    mV = pushforward_matrix(kg_plane, kg_plane, f, V)
    from latticehk.geometry import apply_embedding
    lhs = mV @ kg_plane.extension(U.points(), V.points())
    rhs = kg_plane.extension(apply_embedding(f, U).points(),
                             apply_embedding(f, V).points()) @ m
    assert lhs == rhs


def test_mass_zero_cylinder_injectivity(cyl):
    kg0 = KgContext(cyl, 0)
    s = kg0.space(region_slab(cyl, 0, 2))
    assert s.dim == 12  # the operator stays injective at zero mass


def test_cauchy_pair_cut_inverts_extension(kg_cyl, cyl):
    # for a Cauchy inclusion, the flat-cut map back inverts extension by zero
    small = region_slab(cyl, 1, 2)
    big = region_slab(cyl, 0, 3)
    ext = kg_cyl.extension(small.points(), big.points())
    back = kg_cyl.timeslice_map(big.points(), small.points())
    assert back @ ext == Mat.identity(12)
    assert ext @ back == Mat.identity(12)


def test_timeslice_cut_position_independent(kg_cyl, cyl):
    # two admissible flat cuts induce the same map on classes
    U = region_points(cyl, [(0, 0), (1, 0)])
    V = region_slab(cyl, 0, 5)
    m1 = kg_cyl.timeslice_map(U.points(), V.points())
    tall = region_slab(cyl, 2, 5)
    m2 = kg_cyl.timeslice_map(U.points(), tall.points())
    ext_back = kg_cyl.extension(tall.points(), V.points())
    assert ext_back @ m2 == m1
