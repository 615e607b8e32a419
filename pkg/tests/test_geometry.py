import pytest
from hypothesis import given, settings, strategies as st

from latticehk.geometry import (GeometryError, LatticeEmbedding,
                                LatticeSpacetime, Region,
                                WindowTooSmallError, apply_embedding,
                                are_causally_disjoint, bounded_spacetime,
                                cauchy_development, check_D_stable_image,
                                check_loc_morphism, cone,
                                contains_cauchy_surface_of,
                                double_complement,
                                find_D_stable_neighborhood, hull,
                                is_causally_convex, is_cauchy_morphism,
                                is_D_stable, preimage_region,
                                region_development, region_diamond,
                                region_full, region_points, region_slab,
                                region_strict_diamond, stabilization_check,
                                verify_development_confined,
                                verify_development_restriction)


def test_cone_plane_lightcone(plane):
    c = cone(plane, region_points(plane, [(0, 0)]), "future", False, 4)
    assert c.pts == frozenset((t, x) for t in range(5)
                              for x in range(-t, t + 1))
    ci = cone(plane, region_points(plane, [(0, 0)]), "future", True, 4)
    assert ci.pts == frozenset((t, x) for t in range(1, 5)
                               for x in range(-(t - 1), t))


def test_cone_wraps_on_cylinder(cyl):
    c = cone(cyl, region_points(cyl, [(0, 0)]), "future", False, 3)
    assert {p for p in c.pts if p[0] == 3} == {(3, x) for x in range(6)}


def test_cone_past_and_errors(plane):
    p = cone(plane, region_points(plane, [(4, 0)]), "past", False, 0)
    assert (0, 4) in p.pts and (0, 5) not in p.pts
    with pytest.raises(WindowTooSmallError):
        cone(plane, region_points(plane, [(0, 0)]), "future", False, 99)
    assert cone(plane, region_full(plane), "future", False, 4).is_full


def test_cone_monotone_idempotent(plane):
    s1 = region_points(plane, [(0, 0)])
    s2 = region_points(plane, [(0, 0), (1, 1)])
    c1 = cone(plane, s1, "future", False, 5)
    c2 = cone(plane, s2, "future", False, 5)
    assert c1.pts <= c2.pts
    again = cone(plane, c1, "future", False, 5)
    assert again.pts == c1.pts


def test_hull_and_convexity(plane, cyl):
    h = hull(plane, region_points(plane, [(0, 0), (4, 0)]))
    assert h.pts == frozenset((t, x) for t in range(5)
                              for x in range(-min(t, 4 - t),
                                             min(t, 4 - t) + 1))
    assert is_causally_convex(plane, h)
    assert not is_causally_convex(plane,
                                  region_points(plane, [(0, 0), (2, 0)]))
    # a single slice of the cylinder is achronal, hence causally convex
    assert is_causally_convex(cyl, region_points(
        cyl, [(0, x) for x in range(6)]))
    assert is_causally_convex(plane, region_full(plane))


def test_hull_single_point(plane):
    h = hull(plane, region_points(plane, [(3, 3)]))
    assert h.pts == frozenset({(3, 3)})


@settings(max_examples=25, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 5), st.integers(-4, 4)),
                min_size=1, max_size=5))
def test_hull_idempotent_monotone(pts):
    M = LatticeSpacetime("plane", (-14, 16))
    S = region_points(M, pts)
    h = hull(M, S)
    assert S.pts <= h.pts
    assert hull(M, h).pts == h.pts
    assert h.is_relatively_compact


def test_development_examples(plane, cyl):
    assert cauchy_development(
        plane, region_points(plane, [(0, 0)])).pts == frozenset({(0, 0)})
    slab = region_slab(cyl, 0, 0)
    assert cauchy_development(cyl, slab).is_full
    dia = hull(plane, region_points(plane, [(0, 0), (4, 0)]))
    assert cauchy_development(plane, dia).pts == dia.pts


def test_development_idempotent(plane):
    U = hull(plane, region_points(plane, [(0, 0), (1, 2), (3, 1)]))
    D = cauchy_development(plane, U)
    assert cauchy_development(plane, D) == D


def test_double_complement_examples(plane, cyl):
    pt = region_points(plane, [(0, 0)])
    assert double_complement(plane, pt).pts == pt.pts
    dia = hull(plane, region_points(plane, [(0, 0), (4, 0)]))
    assert double_complement(plane, dia).pts == dia.pts
    slab = region_slab(cyl, 0, 1)
    assert double_complement(cyl, slab).is_full


@settings(max_examples=20, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 4), st.integers(-3, 3)),
                min_size=1, max_size=4),
       st.booleans())
def test_development_inside_double_complement(pts, cylinder):
    M = LatticeSpacetime("cylinder", (-14, 16), 6) if cylinder \
        else LatticeSpacetime("plane", (-14, 16))
    U = hull(M, region_points(M, pts))
    D = cauchy_development(M, U)
    DC = double_complement(M, U)
    if DC.is_full:
        return
    assert not D.is_full
    assert D.pts <= DC.pts


def test_double_complement_divergence_is_genuine(cyl):
    """The staircase diamond has empty causal complement but a dodging
    path: the continuum identity with the development fails on compact
    slices, and both engines agree about each side."""
    U = region_diamond(cyl, (0, 0), (3, 2))
    D = cauchy_development(cyl, U)
    DC = double_complement(cyl, U)
    assert DC.is_full and not D.is_full
    assert D.pts == U.pts


def test_plane_diamonds_satisfy_the_complement_identity(plane):
    for h in range(0, 5):
        for dx in range(-h, h + 1):
            U = region_diamond(plane, (0, 0), (h, dx))
            assert cauchy_development(plane, U) == \
                double_complement(plane, U)


def test_predicates(plane, cyl):
    assert are_causally_disjoint(plane, region_points(plane, [(0, -3)]),
                                 region_points(plane, [(0, 3)]))
    assert not are_causally_disjoint(plane, region_points(plane, [(0, 0)]),
                                     region_points(plane, [(2, 1)]))
    s01 = region_slab(cyl, 0, 1)
    s03 = region_slab(cyl, 0, 3)
    assert is_cauchy_morphism(cyl, s01, s03)
    assert contains_cauchy_surface_of(cyl, s01, region_full(cyl))
    dia = region_diamond(cyl, (0, 0), (4, 0))
    assert not contains_cauchy_surface_of(cyl, dia, region_full(cyl))
    assert is_D_stable(cyl, region_points(cyl, [(0, 0), (1, 0)]))
    assert not is_D_stable(cyl, region_points(
        cyl, [(0, x) for x in (0, 1, 2)] + [(1, x) for x in (0, 1, 2)]))


def test_region_development(cyl):
    V = region_diamond(cyl, (0, 0), (4, 0))
    mid = region_points(cyl, [p for p in V.pts if p[0] == 2])
    dev = region_development(cyl, mid, V)
    assert dev.pts == V.pts  # the full waist meets every maximal path
    part = region_points(cyl, sorted(p for p in V.pts if p[0] == 2)[:2])
    assert region_development(cyl, part, V).pts != V.pts


def test_strict_diamonds(plane):
    sd = region_strict_diamond(plane, (0, 0), (4, 0))
    assert sd.pts == frozenset({(1, 0), (2, -1), (2, 0), (2, 1), (3, 0)})
    assert is_D_stable(plane, sd)
    assert is_causally_convex(plane, sd)
    with pytest.raises(GeometryError):
        region_strict_diamond(plane, (0, 0), (1, 0))


def test_find_d_stable_neighborhood_sweep(plane):
    U = hull(plane, region_points(plane, [(0, 0), (4, 0)]))
    V = find_D_stable_neighborhood(plane, (2, 0), U)
    assert region_strict_diamond(plane, (1, 0), (3, 0)).pts <= V.pts
    for p in sorted(U.pts):
        W = find_D_stable_neighborhood(plane, p, U)
        assert p in W.pts and U.contains(W)
        assert is_D_stable(plane, W) and is_causally_convex(plane, W)
    single = find_D_stable_neighborhood(plane, (0, 0),
                                        region_points(plane, [(0, 0)]))
    assert single.pts == frozenset({(0, 0)})


def test_embeddings_translation(cyl):
    f = LatticeEmbedding(cyl, cyl, 1, 2)
    assert check_loc_morphism(f)
    assert check_D_stable_image(f)
    U = region_diamond(cyl, (0, 0), (3, 1))
    assert verify_development_restriction(f, U)
    assert verify_development_confined(f, U)
    pre = preimage_region(f, apply_embedding(f, U))
    assert pre.pts == U.pts


def test_embeddings_bounded(plane):
    dia = region_diamond(plane, (0, 0), (4, 0))
    sub = bounded_spacetime(plane, dia.pts)
    f = LatticeEmbedding(sub, plane, 1, 3)
    assert check_loc_morphism(f)
    img = f.image()
    assert img.pts == frozenset((t + 1, x + 3) for (t, x) in dia.pts)
    U = region_points(sub, [(1, 0), (2, 0)])
    # ambient development restricted to the image stays below the intrinsic
    DU = cauchy_development(sub, U)
    DV = cauchy_development(plane, apply_embedding(f, U))
    assert DV.pts & img.pts <= apply_embedding(f, DU).pts
    assert verify_development_confined(f, U)


def test_wrap_embedding(plane, cyl):
    strip = hull(plane, region_points(
        plane, [(t, x) for t in range(3) for x in range(3)]))
    sub = bounded_spacetime(plane, strip.pts)
    f = LatticeEmbedding(sub, cyl, 0, 1)
    assert check_loc_morphism(f)
    wide = hull(plane, region_points(
        plane, [(t, x) for t in range(3) for x in range(6)]))
    with pytest.raises(GeometryError):
        LatticeEmbedding(bounded_spacetime(plane, wide.pts), cyl, 0, 0)


def test_bounded_spacetime_validation(plane):
    with pytest.raises(GeometryError):
        bounded_spacetime(plane, [(0, 0), (2, 0)])  # not causally convex


def test_stabilization(cyl):
    U = hull(cyl, region_points(cyl, [(0, 0), (2, 0)]))

    def op(mx):
        d = cauchy_development(mx, region_points(mx, U.pts))
        return "full" if d.is_full else tuple(sorted(d.pts))

    assert stabilization_check(cyl, op, regions=[U])
    wide = region_points(cyl.with_window(0, 1),
                         [(t, x) for t in (0, 1) for x in (0, 1, 2)])
    with pytest.raises(WindowTooSmallError):
        cauchy_development(cyl.with_window(0, 1), wide)


def test_disjointness_hereditary(plane):
    U1 = hull(plane, region_points(plane, [(0, -4), (2, -4)]))
    U2 = hull(plane, region_points(plane, [(0, 4), (2, 4)]))
    assert are_causally_disjoint(plane, U1, U2)
    for p in U1.pts:
        for q in U2.pts:
            assert are_causally_disjoint(plane,
                                         region_points(plane, [p]),
                                         region_points(plane, [q]))


def test_region_literals_guardrails(plane, cyl):
    with pytest.raises(GeometryError):
        region_slab(plane, 0, 1)
    with pytest.raises(GeometryError):
        region_points(plane, [])
    with pytest.raises(GeometryError):
        region_points(plane, [(99, 0)])
    full = region_full(cyl)
    assert not full.is_relatively_compact
    assert region_slab(cyl, 0, 1).is_relatively_compact
