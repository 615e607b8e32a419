"""Discrete 1+1D causal lattices and exact causality predicates.

Points are integer pairs ``(t, x)``.  A causal step goes from ``(t, x)`` to
``(t+1, x')`` with ``|x' - x| <= 1`` (distance taken modulo the circumference
on cylinders).  Chronological reachability additionally requires the time
offset to strictly exceed the spatial offset.

Sets of points are handled internally as per-row bitmasks so that cones,
Cauchy developments and causal complements reduce to a handful of integer
operations per row.  The public API deals in :class:`Region` values.

Every window-sensitive operation is recomputed on an enlarged window and must
return an identical result before it is reported ("stabilization"); a result
that keeps changing indicates that the materialization window is too small.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterable, Optional

Point = tuple[int, int]


class GeometryError(Exception):
    """Invalid geometric input."""


class WindowTooSmallError(GeometryError):
    """The materialization window cannot contain a stable answer."""


class ModelError(GeometryError):
    """An internal lattice-model invariant failed (a bug, not bad input)."""


def _default_pad() -> int:
    return int(os.environ.get("LATTICEHK_WINDOW_MARGIN", "0"))


@dataclass(frozen=True)
class LatticeSpacetime:
    """A plane or cylinder causal lattice with a materialization window.

    ``window = (t_lo, t_hi)`` (inclusive) is a computation horizon only, never
    a physical boundary.  ``extent`` turns the spacetime into a bounded
    sub-lattice: the points of ``extent`` are the whole spacetime, inextendible
    causal paths are maximal paths inside it, and the symbolic full region
    denotes exactly this point set.
    """

    kind: str  # "plane" | "cylinder"
    window: tuple[int, int]
    circumference: Optional[int] = None
    extent: Optional[frozenset[Point]] = None

    def __post_init__(self):
        if self.kind not in ("plane", "cylinder"):
            raise GeometryError(f"unknown spacetime kind {self.kind!r}")
        if self.kind == "cylinder":
            if self.circumference is None or self.circumference < 2:
                raise GeometryError("cylinder needs circumference >= 2")
        elif self.circumference is not None:
            raise GeometryError("plane takes no circumference")
        t_lo, t_hi = self.window
        if t_lo > t_hi:
            raise GeometryError("empty window")
        if self.extent is not None:
            if not self.extent:
                raise GeometryError("extent must be nonempty")
            for (t, x) in self.extent:
                if not (t_lo <= t <= t_hi):
                    raise GeometryError("extent exceeds window")

    # -- coordinates ------------------------------------------------------

    def norm_x(self, x: int) -> int:
        return x % self.circumference if self.kind == "cylinder" else x

    def norm_point(self, p: Point) -> Point:
        return (p[0], self.norm_x(p[1]))

    def xdist(self, x1: int, x2: int) -> int:
        if self.kind == "cylinder":
            d = (x1 - x2) % self.circumference
            return min(d, self.circumference - d)
        return abs(x1 - x2)

    def in_window(self, p: Point) -> bool:
        return self.window[0] <= p[0] <= self.window[1]

    def with_window(self, t_lo: int, t_hi: int) -> "LatticeSpacetime":
        return LatticeSpacetime(self.kind, (t_lo, t_hi), self.circumference,
                                self.extent)

    def enlarged(self, margin: int) -> "LatticeSpacetime":
        t_lo, t_hi = self.window
        return self.with_window(t_lo - margin, t_hi + margin)

    @property
    def is_bounded(self) -> bool:
        return self.extent is not None

    def unbounded(self) -> "LatticeSpacetime":
        return LatticeSpacetime(self.kind, self.window, self.circumference)


@dataclass(frozen=True)
class Region:
    """A finite explicit point set, or the symbolic full spacetime.

    The full region is the only region that is not relatively compact.  On a
    bounded spacetime it denotes the extent.
    """

    ambient: LatticeSpacetime
    kind: str  # "points" | "full"
    pts: frozenset[Point] = frozenset()

    def __post_init__(self):
        if self.kind not in ("points", "full"):
            raise GeometryError(f"unknown region kind {self.kind!r}")
        if self.kind == "points" and not self.pts:
            raise GeometryError("explicit region must be nonempty")

    @property
    def is_full(self) -> bool:
        return self.kind == "full"

    @property
    def is_relatively_compact(self) -> bool:
        return self.kind == "points"

    def points(self) -> frozenset[Point]:
        if self.is_full:
            if self.ambient.extent is not None:
                return self.ambient.extent
            raise GeometryError("full region on unbounded spacetime has no "
                                "materialized point set")
        return self.pts

    def t_range(self) -> tuple[int, int]:
        ts = [t for (t, _) in self.points()]
        return min(ts), max(ts)

    def contains(self, other: "Region") -> bool:
        if self.is_full:
            return True
        if other.is_full:
            if other.ambient.extent is not None:
                return other.ambient.extent <= self.pts
            return False
        return other.pts <= self.pts

    def sort_key(self):
        if self.is_full:
            return (1, 0, 0, ())
        ts = self.t_range()
        return (0, ts[0], ts[1], tuple(sorted(self.pts)))

    def __repr__(self):
        if self.is_full:
            return "Region.full"
        ts = self.t_range()
        return f"Region({len(self.pts)} pts, t in [{ts[0]},{ts[1]}])"


def bounded_spacetime(M: LatticeSpacetime,
                      extent: Iterable[Point]) -> LatticeSpacetime:
    """A sub-lattice spacetime whose physical points are ``extent``.

    The extent must be a causally convex subset of ``M``'s window; causal
    paths between its points then never leave it, so the induced causal
    structure is the restriction of the ambient one.
    """
    if M.extent is not None:
        raise GeometryError("cannot bound an already bounded spacetime")
    pts = frozenset(M.norm_point(p) for p in extent)
    sub = LatticeSpacetime(M.kind, M.window, M.circumference, pts)
    if not is_causally_convex(M, Region(M, "points", pts)):
        raise GeometryError("extent must be causally convex")
    return sub


def region_points(M: LatticeSpacetime, pts: Iterable[Point]) -> Region:
    norm = frozenset(M.norm_point(p) for p in pts)
    for p in norm:
        if not M.in_window(p):
            raise GeometryError(f"point {p} outside window {M.window}")
        if M.extent is not None and p not in M.extent:
            raise GeometryError(f"point {p} outside bounded extent")
    return Region(M, "points", norm)


def region_full(M: LatticeSpacetime) -> Region:
    return Region(M, "full")


# ---------------------------------------------------------------------------
# row-mask grids
# ---------------------------------------------------------------------------


class _Grid:
    """Per-row bitmask workspace over rows ``t0..t1`` (inclusive).

    On the plane, bit ``i`` of a row mask is the site ``x = x0 + i``; the
    x-range is padded so that cones of the tracked seed set never reach the
    lateral boundary inside the row range.  On the cylinder each row has
    exactly ``circumference`` bits with wrap-around spreading.
    """

    def __init__(self, M: LatticeSpacetime, t0: int, t1: int,
                 seeds: Iterable[Point] = ()):
        self.M = M
        self.t0, self.t1 = t0, t1
        self.nrows = t1 - t0 + 1
        if M.kind == "cylinder":
            self.width = M.circumference
            self.x0 = 0
        else:
            xs = [x for (_, x) in seeds] or [0]
            pad = (t1 - t0) + 2
            self.x0 = min(xs) - pad
            self.width = (max(xs) - min(xs)) + 2 * pad + 1
        self.full = (1 << self.width) - 1

    def row_index(self, t: int) -> int:
        return t - self.t0

    def mask_rows(self, pts: Iterable[Point]) -> list[int]:
        rows = [0] * self.nrows
        for (t, x) in pts:
            if self.t0 <= t <= self.t1:
                x = self.M.norm_x(x)
                i = x - self.x0
                if not (0 <= i < self.width):
                    raise ModelError("grid x-range too narrow for seed")
                rows[t - self.t0] |= 1 << i
        return rows

    def pts_of(self, rows: list[int]) -> frozenset[Point]:
        out = []
        for r, m in enumerate(rows):
            t = self.t0 + r
            while m:
                low = m & -m
                i = low.bit_length() - 1
                out.append((t, self.M.norm_x(self.x0 + i)))
                m ^= low
        return frozenset(out)

    def spread(self, m: int) -> int:
        if self.M.kind == "cylinder":
            c = self.width
            left = ((m << 1) | (m >> (c - 1))) & self.full
            right = ((m >> 1) | ((m & 1) << (c - 1))) & self.full
            return m | left | right
        return (m | (m << 1) | (m >> 1)) & self.full

    # -- cones ------------------------------------------------------------

    def future(self, seed_rows: list[int], strict: bool = False) -> list[int]:
        out = [0] * self.nrows
        prev = 0
        for r in range(self.nrows):
            if strict:
                # I+(S) = J+ of the seeds shifted one step up
                shifted = seed_rows[r - 1] if r > 0 else 0
                out[r] = shifted | self.spread(prev)
            else:
                out[r] = seed_rows[r] | self.spread(prev)
            prev = out[r]
        return out

    def past(self, seed_rows: list[int], strict: bool = False) -> list[int]:
        out = [0] * self.nrows
        prev = 0
        for r in range(self.nrows - 1, -1, -1):
            if strict:
                shifted = seed_rows[r + 1] if r + 1 < self.nrows else 0
                out[r] = shifted | self.spread(prev)
            else:
                out[r] = seed_rows[r] | self.spread(prev)
            prev = out[r]
        return out

    def both(self, seed_rows: list[int]) -> list[int]:
        f = self.future(seed_rows)
        p = self.past(seed_rows)
        return [a | b for a, b in zip(f, p)]

    # -- escape dynamic programming ----------------------------------------

    def escapes_up(self, blocker: list[int],
                   inside: Optional[list[int]] = None) -> list[int]:
        """Rows of points admitting a future-maximal causal path avoiding
        ``blocker``.  With ``inside`` the path must stay in ``inside`` and is
        maximal there; otherwise paths are unbounded and escape past the top
        row (which must lie above the blocker)."""
        out = [0] * self.nrows
        above = self.full if inside is None else 0
        prev_inside = self.full if inside is None else 0
        for r in range(self.nrows - 1, -1, -1):
            here = self.full if inside is None else inside[r]
            ok = here & ~blocker[r]
            cont = self.spread(above)
            if inside is None:
                out[r] = ok & cont
            else:
                no_succ = ~self.spread(prev_inside) & self.full
                out[r] = ok & (no_succ | cont)
            above = out[r]
            if inside is not None:
                prev_inside = inside[r]
        return out

    def escapes_down(self, blocker: list[int],
                     inside: Optional[list[int]] = None) -> list[int]:
        out = [0] * self.nrows
        below = self.full if inside is None else 0
        prev_inside = self.full if inside is None else 0
        for r in range(self.nrows):
            here = self.full if inside is None else inside[r]
            ok = here & ~blocker[r]
            cont = self.spread(below)
            if inside is None:
                out[r] = ok & cont
            else:
                no_pred = ~self.spread(prev_inside) & self.full
                out[r] = ok & (no_pred | cont)
            below = out[r]
            if inside is not None:
                prev_inside = inside[r]
        return out


# ---------------------------------------------------------------------------
# cones, hulls, convexity
# ---------------------------------------------------------------------------


def cone(M: LatticeSpacetime, S: Region, direction: str, strict: bool,
         horizon: int) -> Region:
    """J+/J-/I+/I- of ``S`` up to the time bound ``horizon``."""
    if direction not in ("future", "past"):
        raise GeometryError("direction must be 'future' or 'past'")
    if S.is_full and S.ambient.extent is None:
        return region_full(M)
    pts = S.points()
    tmin = min(t for (t, _) in pts)
    tmax = max(t for (t, _) in pts)
    t_lo, t_hi = M.window
    if direction == "future":
        if horizon > t_hi:
            raise WindowTooSmallError(
                f"horizon {horizon} beyond window top {t_hi}")
        g = _Grid(M, tmin, horizon, pts)
        rows = g.future(g.mask_rows(pts), strict=strict)
    else:
        if horizon < t_lo:
            raise WindowTooSmallError(
                f"horizon {horizon} below window bottom {t_lo}")
        g = _Grid(M, horizon, tmax, pts)
        rows = g.past(g.mask_rows(pts), strict=strict)
    out = g.pts_of(rows)
    if M.extent is not None:
        out = out & M.extent
    if not out:
        raise GeometryError("empty cone (horizon excludes the seed set)")
    return region_points(M, out)


def hull(M: LatticeSpacetime, S: Region) -> Region:
    """Causally convex hull J+(S) & J-(S).

    Confined to the time band of ``S``, so no stabilization is needed.
    """
    if S.is_full:
        return S
    pts = S.points()
    tmin = min(t for (t, _) in pts)
    tmax = max(t for (t, _) in pts)
    g = _Grid(M, tmin, tmax, pts)
    seed = g.mask_rows(pts)
    fut = g.future(seed)
    pas = g.past(seed)
    out = g.pts_of([a & b for a, b in zip(fut, pas)])
    if M.extent is not None:
        out = out & M.extent  # convex extent: paths between its points stay in
    return region_points(M, out)


def is_causally_convex(M: LatticeSpacetime, U: Region) -> bool:
    if U.is_full:
        return True
    return hull(M, U).pts == U.pts


def are_causally_disjoint(M: LatticeSpacetime, U1: Region, U2: Region) -> bool:
    """True iff no point of U1 is causally related to a point of U2."""
    if U1.is_full or U2.is_full:
        if M.extent is None:
            return False
        # bounded: full = extent, still never disjoint from a nonempty region
        return False
    p1, p2 = U1.pts, U2.pts
    ts = [t for (t, _) in p1 | p2]
    g = _Grid(M, min(ts), max(ts), p1 | p2)
    j1 = g.both(g.mask_rows(p1))
    m2 = g.mask_rows(p2)
    return all((a & b) == 0 for a, b in zip(j1, m2))


# ---------------------------------------------------------------------------
# Cauchy development and the double causal complement
# ---------------------------------------------------------------------------


def _margin_for(M: LatticeSpacetime, pts: frozenset[Point]) -> int:
    ts = [t for (t, _) in pts]
    span = max(ts) - min(ts) + 1
    if M.kind == "cylinder":
        sdiam = M.circumference
    else:
        xs = [x for (_, x) in pts]
        sdiam = max(xs) - min(xs) + 1
    return span + sdiam + 2 + _default_pad()


def _blocked(M: LatticeSpacetime, g: _Grid, umask: list[int],
             tmin: int, tmax: int) -> bool:
    """True iff every inextendible causal path meets the blocker."""
    up = g.escapes_up(umask)
    r = g.row_index(tmin) - 1
    if r < 0:
        raise ModelError("grid does not pad below the blocker")
    return up[r] == 0


def _development_raw(M: LatticeSpacetime, pts: frozenset[Point],
                     t0: int, t1: int):
    """Cauchy development of an explicit set, materialized on rows t0..t1.

    Returns ('full', None) when the set blocks every inextendible path
    (possible on the cylinder only), else ('points', frozenset).
    """
    g = _Grid(M, t0, t1, pts)
    umask = g.mask_rows(pts)
    tmin = min(t for (t, _) in pts)
    tmax = max(t for (t, _) in pts)
    if _blocked(M, g, umask, tmin, tmax):
        if M.kind == "plane":
            raise ModelError("finite set cannot block the plane")
        return "full", None
    up = g.escapes_up(umask)
    down = g.escapes_down(umask)
    dev = [u | (g.full & ~(a & b)) for u, a, b in zip(umask, up, down)]
    return "points", g.pts_of(dev)


def cauchy_development(M: LatticeSpacetime, U: Region) -> Region:
    """D(U): points through which every inextendible causal path meets U."""
    if U.is_full:
        return U
    if M.extent is not None:
        return region_development(M, U, region_full(M))
    pts = U.pts
    m = _margin_for(M, pts)
    t_lo, t_hi = M.window

    def run(extra):
        # one extra row so the blocked probe below U's band is in range
        return _development_raw(M, pts, t_lo - extra - 1, t_hi + extra + 1)

    r0, r1 = run(0), run(m)
    if r0 != r1:
        raise WindowTooSmallError(
            "cauchy_development unstable under window doubling; enlarge the "
            f"window {M.window}")
    kind, dev = r0
    if kind == "full":
        return region_full(M)
    if any(not (t_lo <= t <= t_hi) for (t, _) in dev):
        raise WindowTooSmallError(
            f"development exceeds the window {M.window}; enlarge it")
    return Region(M, "points", dev)


def region_development(M: LatticeSpacetime, U: Region, V: Region) -> Region:
    """D_V(U): development of U inside the sub-lattice V.

    Inextendible paths are paths in V that cannot be extended within V.
    ``V`` full on an unbounded spacetime delegates to the global development.
    """
    if V.is_full and V.ambient.extent is None and M.extent is None:
        return cauchy_development(M, U)
    vpts = V.points()
    upts = U.points() & vpts
    if not upts:
        raise GeometryError("U must meet V")
    ts = [t for (t, _) in vpts]
    g = _Grid(M, min(ts), max(ts), vpts)
    vmask = g.mask_rows(vpts)
    umask = g.mask_rows(upts)
    up = g.escapes_up(umask, inside=vmask)
    down = g.escapes_down(umask, inside=vmask)
    dev = [(u | (v & ~(a & b))) & v
           for u, v, a, b in zip(umask, vmask, up, down)]
    return region_points(M, g.pts_of(dev))


def _double_complement_raw(M: LatticeSpacetime, pts: frozenset[Point],
                           t0: int, t1: int):
    g = _Grid(M, t0, t1, pts)
    ju = g.both(g.mask_rows(pts))
    comp = [g.full & ~m for m in ju]
    if all(m == 0 for m in comp):
        # J(U) covers the whole grid; top and bottom rows full means the
        # causal complement is globally empty, hence U'' is everything.
        return "full", None
    jcomp = g.both(comp)
    out = [g.full & ~m for m in jcomp]
    return "points", g.pts_of(out)


def double_complement(M: LatticeSpacetime, U: Region) -> Region:
    """U'': p is kept iff J(p) is contained in J(U).

    Computed via the complement identity: by symmetry of the causal relation,
    J(p) subset J(U) is equivalent to p not in J(U') where U' is the causal
    complement of U.  Lateral influence from outside the padded grid is
    dominated by the grid's own complement seeds.
    """
    if U.is_full:
        return U
    if M.extent is not None:
        raise GeometryError("double_complement is defined on unbounded "
                            "spacetimes; bounded models use developments")
    pts = U.pts
    if not is_causally_convex(M, U):
        raise GeometryError("double_complement expects a causally convex "
                            "region")
    m = _margin_for(M, pts)
    t_lo, t_hi = M.window

    def run(extra):
        return _double_complement_raw(M, pts, t_lo - extra, t_hi + extra)

    r0, r1 = run(0), run(m)
    if r0 != r1:
        raise WindowTooSmallError(
            "double_complement unstable under window doubling; enlarge the "
            f"window {M.window}")
    kind, out = r0
    if kind == "full":
        return region_full(M)
    if any(not (t_lo <= t <= t_hi) for (t, _) in out):
        raise WindowTooSmallError(
            f"double complement exceeds the window {M.window}; enlarge it")
    return Region(M, "points", out)


# ---------------------------------------------------------------------------
# predicate family
# ---------------------------------------------------------------------------


def is_D_stable(M: LatticeSpacetime, U: Region) -> bool:
    if U.is_full:
        return True
    D = cauchy_development(M, U)
    return (not D.is_full) and D.pts == U.pts


def is_cauchy_morphism(M: LatticeSpacetime, U: Region, V: Region) -> bool:
    """U <= V and D(U) = D(V)."""
    if not V.contains(U):
        return False
    DU = cauchy_development(M, U)
    DV = cauchy_development(M, V)
    return DU == DV


def contains_cauchy_surface_of(M: LatticeSpacetime, U: Region,
                               V: Region) -> bool:
    """D_V(U) = V, i.e. U meets every inextendible causal path of V."""
    if U.is_full:
        return True
    if V.is_full and V.ambient.extent is None and M.extent is None:
        # finite path segments spanning U's time band decide the full case
        pts = U.pts
        m = _margin_for(M, pts)
        t_lo, t_hi = M.window

        def run(extra):
            g = _Grid(M, t_lo - extra - 1, t_hi + extra + 1, pts)
            tmin = min(t for (t, _) in pts)
            tmax = max(t for (t, _) in pts)
            return _blocked(M, g, g.mask_rows(pts), tmin, tmax)

        r0, r1 = run(0), run(m)
        if r0 != r1:
            raise WindowTooSmallError("contains_cauchy_surface_of unstable "
                                      "under window doubling")
        return r0
    dev = region_development(M, U, V)
    return dev.pts == V.points()


# ---------------------------------------------------------------------------
# diamonds and D-stable neighborhoods
# ---------------------------------------------------------------------------


def region_diamond(M: LatticeSpacetime, bottom: Point, top: Point) -> Region:
    bottom, top = M.norm_point(bottom), M.norm_point(top)
    base = region_points(M, [bottom, top])
    h = hull(M, base)
    return h


def region_strict_diamond(M: LatticeSpacetime, bottom: Point,
                          top: Point) -> Region:
    """I+(bottom) & I-(top); empty for time separation < 2."""
    bottom, top = M.norm_point(bottom), M.norm_point(top)
    t0, t1 = bottom[0], top[0]
    if t1 - t0 < 2:
        raise GeometryError("strict diamond needs time separation >= 2")
    g = _Grid(M, t0, t1, [bottom, top])
    fut = g.future(g.mask_rows([bottom]), strict=True)
    pas = g.past(g.mask_rows([top]), strict=True)
    pts = g.pts_of([a & b for a, b in zip(fut, pas)])
    if not pts:
        raise GeometryError("empty strict diamond")
    if M.extent is not None:
        pts = pts & M.extent
        if not pts:
            raise GeometryError("strict diamond misses the bounded extent")
    return region_points(M, pts)


def region_slab(M: LatticeSpacetime, t0: int, t1: int) -> Region:
    """All sites with t0 <= t <= t1.  Finite only on the cylinder."""
    if M.kind != "cylinder":
        raise GeometryError("slabs are infinite on the plane")
    if t0 > t1:
        raise GeometryError("empty slab")
    pts = [(t, x) for t in range(t0, t1 + 1)
           for x in range(M.circumference)]
    if M.extent is not None:
        pts = [p for p in pts if p in M.extent]
        if not pts:
            raise GeometryError("slab misses the bounded extent")
    return region_points(M, pts)


def find_D_stable_neighborhood(M: LatticeSpacetime, p: Point,
                               U: Region) -> Region:
    """A D-stable causally convex relatively compact V with p in V <= U.

    Strategy: the largest symmetric strict diamond around ``p`` that fits in
    ``U`` and verifies D-stable; the singleton ``{p}`` is the fallback.
    """
    p = M.norm_point(p)
    if not U.is_full and p not in U.pts:
        raise GeometryError("p must lie in U")
    if M.extent is not None and p not in M.extent:
        raise GeometryError("p outside bounded extent")
    t_lo, t_hi = M.window
    rmax = min(p[0] - t_lo, t_hi - p[0])
    if not U.is_full:
        a, b = U.t_range()
        rmax = min(rmax, p[0] - a, b - p[0])  # largest that can fit in U
    for r in range(rmax, 0, -1):
        try:
            V = region_strict_diamond(M, (p[0] - r, p[1]), (p[0] + r, p[1]))
        except GeometryError:
            continue
        if U.contains(V) and is_D_stable(M, V):
            return V
    V = region_points(M, [p])
    if not is_D_stable(M, V):
        raise ModelError("singleton is not D-stable; degenerate backend")
    return V


# ---------------------------------------------------------------------------
# embeddings
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LatticeEmbedding:
    """An affine causal embedding: translation, or restriction of the
    identity to a causally convex sub-lattice (the source's extent), or a
    width-bounded wrap of a plane strip onto a cylinder."""

    source: LatticeSpacetime
    target: LatticeSpacetime
    dt: int = 0
    dx: int = 0

    def __post_init__(self):
        s, t = self.source, self.target
        if s.kind == t.kind:
            if s.circumference != t.circumference:
                raise GeometryError("circumference mismatch")
        elif s.kind == "plane" and t.kind == "cylinder":
            if s.extent is None:
                raise GeometryError("plane-to-cylinder embedding needs a "
                                    "bounded source")
            xs = [x for (_, x) in s.extent]
            if max(xs) - min(xs) > t.circumference - 2:
                raise GeometryError("source strip too wide to embed "
                                    "injectively with two-sided step "
                                    "preservation")
        else:
            raise GeometryError(f"no embeddings {s.kind} -> {t.kind}")
        for p in self.source_points_probe():
            q = self.map_point(p)
            if not t.in_window(q):
                raise GeometryError(f"image point {q} outside target window")
            if t.extent is not None and q not in t.extent:
                raise GeometryError(f"image point {q} outside target extent")

    def source_points_probe(self):
        # windows are computation horizons; only physical extents get checked
        return self.source.extent if self.source.extent is not None else ()

    def map_point(self, p: Point) -> Point:
        return self.target.norm_point((p[0] + self.dt, p[1] + self.dx))

    def unmap_point(self, q: Point) -> Optional[Point]:
        """Inverse on the image; None when q is not hit."""
        cand = (q[0] - self.dt, q[1] - self.dx)
        if self.source.kind == "cylinder":
            cand = self.source.norm_point(cand)
            return cand
        if self.source.kind == "plane" and self.target.kind == "cylinder":
            if self.source.extent is None:
                return None
            for (t, x) in self.source.extent:
                if t == q[0] and self.target.norm_x(x + self.dx) == q[1]:
                    return (t, x)
            return None
        return cand

    def image(self) -> Region:
        if self.source.extent is None:
            if self.source.kind == self.target.kind and \
                    self.target.extent is None:
                return region_full(self.target)
            raise GeometryError("unbounded source into bounded target")
        return region_points(self.target,
                             [self.map_point(p) for p in self.source.extent])


def apply_embedding(f: LatticeEmbedding, U: Region) -> Region:
    if U.is_full:
        out = f.image()
    else:
        if f.source.extent is not None and not (U.pts <= f.source.extent):
            raise GeometryError("region leaves the embedding's domain")
        out = region_points(f.target, [f.map_point(p) for p in U.pts])
    if f.target.extent is not None and not out.is_full and \
            out.pts == f.target.extent:
        return region_full(f.target)  # the whole bounded target
    return out


def preimage_region(f: LatticeEmbedding, V: Region) -> Optional[Region]:
    """f^{-1}(V) as a region of the source; None when empty."""
    if V.is_full:
        return region_full(f.source)
    pts = []
    if f.source.extent is not None:
        for p in f.source.extent:
            if f.map_point(p) in V.pts:
                pts.append(p)
    else:
        for q in V.pts:
            p = f.unmap_point(q)
            if p is not None and f.source.in_window(p):
                pts.append(p)
    if not pts:
        return None
    return region_points(f.source, pts)


def check_loc_morphism(f: LatticeEmbedding) -> bool:
    """Injective, two-sided causal-step preserving, causally convex image."""
    try:
        img = f.image()
    except GeometryError:
        return False
    if img.is_full:
        return True
    if len(img.pts) != len(f.source.extent or img.pts):
        return False
    return is_causally_convex(f.target, img)


def check_D_stable_image(f: LatticeEmbedding) -> bool:
    return is_D_stable(f.target, f.image())


def verify_development_restriction(f: LatticeEmbedding, U: Region) -> bool:
    """f(D_src(U)) = D_tgt(f(U)) & f(source)."""
    DU = cauchy_development(f.source, U)
    lhs = apply_embedding(f, DU)
    DV = cauchy_development(f.target, apply_embedding(f, U))
    img = f.image()
    if DV.is_full:
        rhs = img
    elif img.is_full:
        rhs = DV
    else:
        inter = DV.pts & img.pts
        rhs = region_points(f.target, inter) if inter else None
    if rhs is None:
        return False
    if lhs.is_full or rhs.is_full:
        return lhs.points() == rhs.points() if (
            lhs.ambient.extent or rhs.ambient.extent) else lhs.is_full == rhs.is_full
    return lhs.pts == rhs.pts


def verify_development_confined(f: LatticeEmbedding, U: Region) -> bool:
    """With a D-stable image and relatively compact U:
    D_tgt(f(U)) stays inside f(source).  Closure is the identity here."""
    if not U.is_relatively_compact:
        raise GeometryError("U must be relatively compact")
    if not check_D_stable_image(f):
        raise GeometryError("embedding image is not D-stable")
    DV = cauchy_development(f.target, apply_embedding(f, U))
    img = f.image()
    if DV.is_full:
        return img.is_full
    return img.contains(DV)


# ---------------------------------------------------------------------------
# stabilization probe
# ---------------------------------------------------------------------------


def stabilization_check(M: LatticeSpacetime, op, margin: Optional[int] = None,
                        regions: Iterable[Region] = ()) -> bool:
    """Recompute ``op(spacetime)`` with doubled window margins.

    Returns True iff the first enlargement leaves the result unchanged.  A
    result still changing after the second doubling indicates a modeling bug
    and raises :class:`ModelError`.
    """
    pts = frozenset().union(*[r.points() for r in regions]) or \
        frozenset([(M.window[0], 0), (M.window[1], 0)])
    m = margin if margin is not None else _margin_for(M, pts)
    r0 = op(M)
    r1 = op(M.enlarged(m))
    if r0 == r1:
        return True
    r2 = op(M.enlarged(2 * m))
    if r1 != r2:
        raise ModelError("result keeps changing after two window doublings")
    return False
