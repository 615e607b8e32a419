"""Exact rational lattice Klein-Gordon field.

The field operator is ``(P phi)(t,x) = -(phi(t+1,x) - 2 phi(t,x) +
phi(t-1,x)) + (phi(t,x+1) - 2 phi(t,x) + phi(t,x-1)) + m^2 phi(t,x)`` with
the spatial neighbors taken modulo the circumference on cylinders.  Unit
lattice spacing puts the propagation speed at exactly one, so the analytic
support statements match the combinatorial cones on the nose.

Fields are finitely supported rational-valued functions carried as plain
``{(t, x): value}`` dicts with zero entries dropped.

The generator space of a causally convex region U is ``C_c(U)`` modulo the
relations ``P chi`` that stay supported inside U; staying inside is the
lattice substitute for the locality of the continuum operator, and it is
what makes extension-by-zero maps injective (a compactly supported preimage
under P is unique and supported in the causally convex hull of its image).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .geometry import (LatticeSpacetime, Region, WindowTooSmallError)
from .rational import (Mat, Q0, Q1, QQ, QuotientSpace, induced_quotient_map)


class KgError(Exception):
    pass


class TimesliceSkip(KgError):
    """No flat two-row cut fits inside the target region."""


@dataclass(frozen=True)
class KgConfig:
    ambient: LatticeSpacetime
    mass2: object = Q0

    def __post_init__(self):
        if QQ(self.mass2) < 0:
            raise KgError("mass2 must be nonnegative")


def _norm(M: LatticeSpacetime, t, x):
    return (t, M.norm_x(x))


def field_clean(f: dict) -> dict:
    return {p: v for p, v in f.items() if v != 0}


def field_add(f: dict, g: dict, scale=Q1) -> dict:
    out = dict(f)
    for p, v in g.items():
        out[p] = out.get(p, Q0) + scale * v
    return field_clean(out)


def field_support(f: dict) -> frozenset:
    return frozenset(field_clean(f))


def apply_P(cfg: KgConfig, phi: dict) -> dict:
    """The Klein-Gordon stencil; support may grow by one step."""
    M = cfg.ambient
    m2 = QQ(cfg.mass2)
    t_lo, t_hi = M.window
    phi = field_clean(phi)
    for (t, _) in phi:
        if not (t_lo < t < t_hi):
            raise WindowTooSmallError("field touches the window margin")

    def g(t, x):
        return phi.get(_norm(M, t, x), Q0)

    carrier = set()
    for (t, x) in phi:
        for dt, dx in ((0, 0), (1, 0), (-1, 0), (0, 1), (0, -1)):
            carrier.add(_norm(M, t + dt, x + dx))
    out = {}
    for (t, x) in carrier:
        v = -(g(t + 1, x) - 2 * g(t, x) + g(t - 1, x)) \
            + (g(t, x + 1) - 2 * g(t, x) + g(t, x - 1)) + m2 * g(t, x)
        if v != 0:
            out[(t, x)] = v
    return out


def green(cfg: KgConfig, phi: dict, direction: str,
          t_stop: Optional[int] = None) -> dict:
    """Retarded or advanced solve of ``P psi = phi``.

    The leapfrog recursion marches one row at a time from the quiet side, so
    the answer is exact and supported in the corresponding causal cone of the
    source.  ``t_stop`` bounds the marched rows (the window edge by default).
    """
    M = cfg.ambient
    m2 = QQ(cfg.mass2)
    phi = field_clean(phi)
    if not phi:
        return {}
    ts = [t for (t, _) in phi]
    t_lo, t_hi = M.window
    out: dict = {}

    def psi(t, x):
        return out.get(_norm(M, t, x), Q0)

    def src(t, x):
        return phi.get(_norm(M, t, x), Q0)

    if direction == "retarded":
        stop = t_hi if t_stop is None else t_stop
        if stop > t_hi:
            raise WindowTooSmallError("green horizon beyond the window")
        for t in range(min(ts), stop):
            xs = set()
            for (tt, x) in out:
                if tt == t:
                    xs.update({x - 1, x, x + 1})
            for (tt, x) in phi:
                if tt == t:
                    xs.add(x)
            for x in xs:
                v = 2 * psi(t, x) - psi(t - 1, x) \
                    + (psi(t, x + 1) - 2 * psi(t, x) + psi(t, x - 1)) \
                    + m2 * psi(t, x) - src(t, x)
                if v != 0:
                    out[_norm(M, t + 1, x)] = v
    elif direction == "advanced":
        stop = t_lo if t_stop is None else t_stop
        if stop < t_lo:
            raise WindowTooSmallError("green horizon below the window")
        for t in range(max(ts), stop, -1):
            xs = set()
            for (tt, x) in out:
                if tt == t:
                    xs.update({x - 1, x, x + 1})
            for (tt, x) in phi:
                if tt == t:
                    xs.add(x)
            for x in xs:
                v = 2 * psi(t, x) - psi(t + 1, x) \
                    + (psi(t, x + 1) - 2 * psi(t, x) + psi(t, x - 1)) \
                    + m2 * psi(t, x) - src(t, x)
                if v != 0:
                    out[_norm(M, t - 1, x)] = v
    else:
        raise KgError("direction must be 'retarded' or 'advanced'")
    return field_clean(out)


def propagator(cfg: KgConfig, phi: dict, t_lo: int, t_hi: int) -> dict:
    """G phi = G+ phi - G- phi restricted to the rows that matter."""
    gp = green(cfg, phi, "retarded", t_stop=t_hi)
    gm = green(cfg, phi, "advanced", t_stop=t_lo)
    out = field_add(gp, gm, scale=QQ(-1))
    return {p: v for p, v in out.items() if t_lo <= p[0] <= t_hi}


def pairing(cfg: KgConfig, phi: dict, psi: dict):
    """sigma(phi, psi) = sum phi * (G psi); antisymmetric, P-degenerate, and
    zero on causally disjoint supports."""
    phi, psi = field_clean(phi), field_clean(psi)
    if not phi or not psi:
        return Q0
    ts = [t for (t, _) in phi]
    g = propagator(cfg, psi, min(ts), max(ts))
    return sum((v * g.get(p, Q0) for p, v in phi.items()), Q0)


# ---------------------------------------------------------------------------
# generator spaces
# ---------------------------------------------------------------------------


class KgSpace:
    """L(U) = C_c(U) / {P chi : chi in C_c(U), supp(P chi) in U}."""

    def __init__(self, cfg: KgConfig, pts: frozenset):
        self.cfg = cfg
        self.pts = tuple(sorted(pts))
        self.index = {p: i for i, p in enumerate(self.pts)}
        n = len(self.pts)
        images = [apply_P(cfg, {p: Q1}) for p in self.pts]
        outside = sorted({q for img in images for q in img} - set(self.pts))
        constraint = Mat([[images[j].get(q, Q0) for j in range(n)]
                          for q in outside], n)
        kernel = constraint.nullspace() if outside else \
            [tuple(Q1 if i == j else Q0 for i in range(n))
             for j in range(n)]
        rel_rows = []
        for chi in kernel:
            chi_field = {p: c for p, c in zip(self.pts, chi) if c != 0}
            img = apply_P(cfg, chi_field)
            if not set(img) <= set(self.pts):
                raise KgError("relation escapes the region (internal error)")
            rel_rows.append([img.get(p, Q0) for p in self.pts])
        self.quotient = QuotientSpace(n, rel_rows)
        self.dim = self.quotient.dim
        self._sigma = None

    def ambient_vector(self, field: dict) -> list:
        field = field_clean(field)
        if not set(field) <= set(self.pts):
            raise KgError("field leaves the region")
        return [field.get(p, Q0) for p in self.pts]

    def reduce_field(self, field: dict) -> tuple:
        return self.quotient.reduce(self.ambient_vector(field))

    def section_field(self, coords) -> dict:
        amb = self.quotient.section(coords)
        return field_clean({p: v for p, v in zip(self.pts, amb)})

    def basis_fields(self) -> list[dict]:
        return [{self.pts[c]: Q1} for c in self.quotient.free]

    def sigma_ambient(self) -> Mat:
        """Pairing on the point basis of C_c(U); the quotient relations are
        verified to be sigma-degenerate before any use."""
        if self._sigma is None:
            n = len(self.pts)
            ts = [t for (t, _) in self.pts]
            cols = []
            for q in self.pts:
                g = propagator(self.cfg, {q: Q1}, min(ts), max(ts))
                cols.append([g.get(p, Q0) for p in self.pts])
            sig = Mat.from_cols(cols, n)
            if sig.transpose() != -sig:
                raise KgError("pairing failed antisymmetry (internal error)")
            for row in self.quotient.sub_rref.data:
                if any(v != 0 for v in sig.apply(row)):
                    raise KgError("pairing does not descend to the quotient")
            self._sigma = sig
        return self._sigma

    def sigma_reduced(self) -> Mat:
        s = self.quotient.section_matrix()
        return s.transpose() @ self.sigma_ambient() @ s


class KgContext:
    """A Klein-Gordon configuration with cached generator spaces."""

    def __init__(self, ambient: LatticeSpacetime, mass2=Q0):
        self.cfg = KgConfig(ambient, QQ(mass2))
        self._spaces: dict[frozenset, KgSpace] = {}

    @property
    def ambient(self):
        return self.cfg.ambient

    def space(self, U) -> KgSpace:
        pts = U.points() if isinstance(U, Region) else frozenset(U)
        if pts not in self._spaces:
            self._spaces[pts] = KgSpace(self.cfg, pts)
        return self._spaces[pts]

    def extension(self, U, V) -> Mat:
        """Extension-by-zero on classes; injective for causally convex
        nested regions."""
        src, dst = self.space(U), self.space(V)
        if not set(src.pts) <= set(dst.pts):
            raise KgError("extension needs nested regions")
        amb = Mat([[Q1 if dst.pts[r] == src.pts[c] else Q0
                    for c in range(len(src.pts))]
                   for r in range(len(dst.pts))], len(src.pts))
        return induced_quotient_map(src.quotient, dst.quotient, amb)

    # -- time-slice maps ----------------------------------------------------

    def _band_ok(self, p, tstar: int, vpts: set) -> bool:
        M = self.ambient
        (tp, xp) = p
        for (row, reach) in ((tstar, abs(tstar + 1 - tp) + 0),
                             (tstar + 1, abs(tstar - tp) + 0)):
            xs = self._cone_row(xp, reach)
            for x in xs:
                if (row, x) not in vpts:
                    return False
        return True

    def _cone_row(self, xp: int, reach: int):
        M = self.ambient
        if M.kind == "cylinder":
            return {x for x in range(M.circumference)
                    if M.xdist(x, xp) <= reach}
        return set(range(xp - reach, xp + reach + 1))

    def timeslice_map(self, U, V) -> Mat:
        """[phi] -> [P(chi_+ G phi)] for a localized morphism U -> D(V)-side.

        chi_+ is the indicator of the rows above a flat cut t*; the image is
        then carried by the two cut rows only:
            w(t*, x)   = -(G phi)(t*+1, x)
            w(t*+1, x) =  (G phi)(t*,   x)
        The cut may vary per generator; all choices agree on classes, and the
        induced map is checked to kill the source relations.
        """
        src, dst = self.space(U), self.space(V)
        vpts = set(dst.pts)
        vrows = sorted({t for (t, _) in dst.pts})
        cols = []
        for p in src.pts:
            tstar = None
            for t in vrows:
                if self._band_ok(p, t, vpts):
                    tstar = t
                    break
            if tstar is None:
                raise TimesliceSkip(f"no flat two-row cut inside the target "
                                    f"for generator at {p}")
            g = propagator(self.cfg, {p: Q1}, tstar, tstar + 1)
            w = {}
            for ((t, x), v) in g.items():
                if t == tstar + 1:
                    w[(tstar, x)] = w.get((tstar, x), Q0) - v
                if t == tstar:
                    w[(tstar + 1, x)] = w.get((tstar + 1, x), Q0) + v
            cols.append(dst.ambient_vector(field_clean(w)))
        amb = Mat.from_cols(cols, len(dst.pts))
        return induced_quotient_map(src.quotient, dst.quotient, amb)

    def transition(self, U, V, localized: bool) -> Mat:
        upts = U.points() if isinstance(U, Region) else frozenset(U)
        vpts = V.points() if isinstance(V, Region) else frozenset(V)
        if upts <= vpts:
            return self.extension(upts, vpts)
        if not localized:
            raise KgError("plain transitions need nested regions")
        return self.timeslice_map(upts, vpts)


def pushforward_matrix(ctx_src: KgContext, ctx_tgt: KgContext, f,
                       U: Region) -> Mat:
    """Generator-space identification along an embedding: relabel points."""
    from .geometry import apply_embedding
    src = ctx_src.space(U)
    dst = ctx_tgt.space(apply_embedding(f, U))
    n = len(src.pts)
    amb = Mat([[Q1 if dst.pts[r] == f.map_point(src.pts[c]) else Q0
                for c in range(n)] for r in range(len(dst.pts))], n)
    return induced_quotient_map(src.quotient, dst.quotient, amb)
