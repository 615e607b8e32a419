import pytest

from latticehk.geometry import (LatticeEmbedding, apply_embedding,
                                cauchy_development, is_D_stable,
                                region_diamond, region_full, region_points,
                                region_slab)
from latticehk.sites import (Cover, CoverCategory, SiteCategory, SiteError,
                             check_cover_intersections,
                             check_localization_functor,
                             close_universe_for_localization,
                             compare_localization_models,
                             embedding_site_functor, enumerate_universe,
                             extend_cover, j_functor, localization_functor,
                             pullback_cover, refinement_functor,
                             saturation_hom)

GOLDEN_UNIVERSE_SIZE = 278  # cylinder c=6, rows 0..4, heights <= 3


def test_enumerate_universe_golden(cyl):
    uni = enumerate_universe(cyl, compactness="rc", t_range=(0, 4),
                             max_height=3, cap=900)
    assert len(uni) == GOLDEN_UNIVERSE_SIZE
    again = enumerate_universe(cyl, compactness="rc", t_range=(0, 4),
                               max_height=3, cap=900)
    assert uni == again  # deterministic order


def test_enumerate_universe_slabs_and_cap(cyl):
    uni = enumerate_universe(cyl, compactness="rc", t_range=(0, 3),
                             max_height=3, diamonds=False,
                             strict_diamonds=False)
    slabs = [r for r in uni if len({x for (_, x) in r.pts}) == 6]
    assert len(slabs) == 10  # all sub-slabs of a 4-row band
    with pytest.raises(SiteError):
        enumerate_universe(cyl, compactness="rc", t_range=(0, 4), cap=5)


def test_site_hom_rules(cyl):
    s01 = region_slab(cyl, 0, 1)
    s03 = region_slab(cyl, 0, 3)
    s23 = region_slab(cyl, 2, 3)
    site = SiteCategory(cyl, [s01, s03, s23], "rc", localized=False)
    assert site.hom_exists(s01, s03)
    assert not site.hom_exists(s03, s01)
    assert not site.hom_exists(s23, s01)
    loc = site.relocalized(True)
    # slabs have full developments, so every pair is connected
    for a in (s01, s03, s23):
        for b in (s01, s03, s23):
            assert loc.hom_exists(a, b)


def test_site_orthogonality(plane):
    u1 = region_points(plane, [(0, -3)])
    u2 = region_points(plane, [(0, 3)])
    big = region_diamond(plane, (-4, 0), (4, 0))
    site = SiteCategory(plane, [u1, u2, big], "rc", localized=False)
    assert site.orthogonal((u1, big), (u2, big))
    with pytest.raises(SiteError):
        site.orthogonal((u1, big), (u2, u2))


def test_full_region_homs(cyl):
    s01 = region_slab(cyl, 0, 1)
    dia = region_diamond(cyl, (0, 0), (2, 0))
    full = region_full(cyl)
    plain = SiteCategory(cyl, [s01, dia, full], "copen", localized=False)
    assert plain.hom_exists(s01, full) and not plain.hom_exists(full, s01)
    loc = plain.relocalized(True)
    assert loc.hom_exists(full, s01)  # the slab develops to everything
    assert not loc.hom_exists(full, dia)


def test_saturation_oracle_and_functor(cyl, cyl_ctx):
    zone = cyl_ctx.zone_points()
    rng = cyl_ctx.rng("test-sat")
    from latticehk.checks import seeded_hulls
    seeds = seeded_hulls(cyl, zone, rng, 14)
    closed = close_universe_for_localization(cyl, seeds)
    site = SiteCategory(cyl, closed, "rc", localized=False)
    ok, mism = compare_localization_models(site)
    assert ok, mism
    assert check_localization_functor(site)
    L = localization_functor(site)
    assert L.is_functor() and L.preserves_orthogonality()


def test_saturation_is_sound_without_closure(plane):
    # zigzag reachability never invents morphisms beyond the closed form
    u1 = region_diamond(plane, (0, 0), (2, 0))
    u2 = region_diamond(plane, (0, 0), (4, 0))
    u3 = region_points(plane, [(0, 3)])
    site = SiteCategory(plane, [u1, u2, u3], "rc", localized=False)
    sat = saturation_hom(site)
    loc = site.relocalized(True)
    for i in range(3):
        for j in range(3):
            if sat[i] >> j & 1:
                assert loc.hom_k(i, j)


def test_cover_validation(cyl):
    s03 = region_slab(cyl, 0, 3)
    p1 = region_points(cyl, [p for p in s03.pts if p[0] <= 2])
    p2 = region_points(cyl, [p for p in s03.pts if p[0] >= 1])
    cov = Cover(s03, (p1, p2))
    assert not cov.window_complete
    assert check_cover_intersections(cov)
    inters = cov.intersections()
    assert (0, 1) in inters
    with pytest.raises(SiteError):
        Cover(s03, (p1,))  # does not cover the base
    with pytest.raises(SiteError):
        Cover(region_full(cyl), (p1, p2))  # needs a zone
    with pytest.raises(SiteError):
        Cover(s03, (region_points(cyl, [(0, 0), (2, 0)]),))  # not convex


def test_d_stable_cover_intersections(cyl):
    zone = region_slab(cyl, 0, 3)
    from latticehk.checks import column_cover
    cov = column_cover(cyl, zone)
    assert cov.is_D_stable()
    assert check_cover_intersections(cov)


def test_cover_category_and_j(cyl):
    s03 = region_slab(cyl, 0, 3)
    uni = enumerate_universe(cyl, compactness="rc", t_range=(0, 3),
                             max_height=3, cap=900)
    sub = [r for r in uni if s03.contains(r)]
    site = SiteCategory(cyl, sub, "rc", localized=False)
    p1 = region_points(cyl, [p for p in s03.pts if p[0] <= 2])
    p2 = region_points(cyl, [p for p in s03.pts if p[0] >= 1])
    cc = CoverCategory(site, Cover(s03, (p1, p2)))
    jf = j_functor(cc)
    assert jf.is_functor()
    assert jf.fully_faithful()
    assert jf.reflects_orthogonality() and jf.preserves_orthogonality()
    # single-piece cover gives an equivalence onto the admitted objects
    cc1 = CoverCategory(site, Cover(s03, (s03,)))
    assert len(cc1.objects) == len(site.objects)
    assert j_functor(cc1).fully_faithful()


def test_localized_cover_requires_d_stable(cyl):
    rect = region_points(cyl, [(t, x) for t in (0, 1) for x in (0, 1, 2)])
    assert not is_D_stable(cyl, rect)
    site = SiteCategory(cyl, [rect, region_points(cyl, [(0, 0)])], "rc",
                        localized=True)
    with pytest.raises(SiteError):
        CoverCategory(site, Cover(rect, (rect,)))


def test_deliberately_broken_functor(plane):
    # collapsing two disjoint regions onto one breaks full faithfulness
    u1 = region_points(plane, [(0, -3)])
    u2 = region_points(plane, [(0, 3)])
    big = region_diamond(plane, (-4, 0), (4, 0))
    site = SiteCategory(plane, [u1, u2, big], "rc", localized=False)
    from latticehk.sites import SiteFunctor
    i1, i2, ib = (site.index[u1], site.index[u2], site.index[big])
    F = SiteFunctor(site, site, {i1: i1, i2: i1, ib: ib})
    assert not F.fully_faithful() or not F.reflects_orthogonality()


def test_refinement_and_pullback(cyl):
    s03 = region_slab(cyl, 0, 3)
    uni = enumerate_universe(cyl, compactness="rc", t_range=(0, 3),
                             max_height=3, cap=900)
    sub = [r for r in uni if s03.contains(r)]
    site = SiteCategory(cyl, sub, "rc", localized=False)
    p1 = region_points(cyl, [p for p in s03.pts if p[0] <= 2])
    p2 = region_points(cyl, [p for p in s03.pts if p[0] >= 1])
    coarse = Cover(s03, (p1, p2))
    fine_pieces = (region_points(cyl, [p for p in p1.pts if p[0] <= 1]),
                   region_points(cyl, [p for p in p1.pts if p[0] >= 1]),
                   region_points(cyl, [p for p in p2.pts if p[0] <= 2]),
                   region_points(cyl, [p for p in p2.pts if p[0] >= 2]))
    fine = Cover(s03, fine_pieces)
    F = refinement_functor(site, fine, coarse, {0: 0, 1: 0, 2: 1, 3: 1})
    assert F.is_functor() and F.fully_faithful()
    assert F.reflects_orthogonality()
    with pytest.raises(SiteError):
        refinement_functor(site, fine, coarse, {0: 1, 1: 0, 2: 1, 3: 1})
    f = LatticeEmbedding(cyl, cyl, 1, 2)
    cov_full = Cover(region_full(cyl), (p1, p2), zone=s03)
    back = pullback_cover(f, cov_full)
    assert len(back.pieces) == 2
    assert back.base.is_full


def test_embedding_site_functor_missing_images(cyl):
    s01 = region_slab(cyl, 0, 1)
    site = SiteCategory(cyl, [s01], "rc", localized=False)
    f = LatticeEmbedding(cyl, cyl, 5, 0)
    with pytest.raises(SiteError):
        embedding_site_functor(f, site, site)


def test_extend_cover_restriction_property(cyl):
    zone = region_slab(cyl, 0, 4)
    p1 = region_points(cyl, [p for p in zone.pts if p[0] <= 3])
    p2 = region_points(cyl, [p for p in zone.pts if p[0] >= 1])
    cov = Cover(region_full(cyl), (p1, p2), zone=zone)
    f = LatticeEmbedding(cyl, cyl, 1, 2)
    U = region_diamond(cyl, (0, 0), (3, 1))
    ext = extend_cover(f, cov, U, mode="plain")
    assert ext.window_complete
    # pieces meeting f(U) are exactly the pushed-forward ones
    img = apply_embedding(f, U)
    for piece in ext.pieces:
        if piece.pts & img.pts:
            pre = {p.pts for p in cov.pieces}
            back = frozenset(f.unmap_point(q) for q in piece.pts)
            assert back in pre
    from latticehk.checks import column_cover
    covD = column_cover(cyl, zone)
    U2 = region_points(cyl, [(1, 0), (2, 0)])
    extD = extend_cover(f, covD, U2, mode="D_stable")
    assert extD.is_D_stable()
    with pytest.raises(SiteError):
        extend_cover(f, cov, U2, mode="D_stable")  # cover not D-stable


def test_enumerate_universe_tiny_plane_diamonds(plane):
    uni = enumerate_universe(plane, compactness="rc", x_range=(0, 2),
                             t_range=(0, 2), max_height=2, slabs=False,
                             strict_diamonds=False, cap=200)
    singles = [r for r in uni if len(r.pts) == 1]
    assert len(singles) == 9  # every window site
    # every causally related pair contributes its hull, deduplicated
    pair_hulls = {r.pts for r in uni if len(r.pts) > 1}
    seen = set()
    for p in [(t, x) for t in range(3) for x in range(3)]:
        for q in [(t, x) for t in range(3) for x in range(3)]:
            if q[0] > p[0] and abs(q[1] - p[1]) <= q[0] - p[0]:
                h = region_diamond(plane, p, q)
                seen.add(h.pts)
    assert pair_hulls == seen


def test_localized_orthogonality_composition_stable(cyl):
    uni = enumerate_universe(cyl, compactness="rc", t_range=(0, 3),
                             max_height=3, cap=900)
    site = SiteCategory(cyl, uni, "rc", localized=True)
    from latticehk.sites import check_orthogonality_composition_stable
    assert check_orthogonality_composition_stable(site)
    assert check_orthogonality_composition_stable(site.relocalized(False))
