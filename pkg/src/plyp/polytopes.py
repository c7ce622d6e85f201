"""PL polytopes: intersections of half-spaces cut out by points.

A half-space is a point together with a threshold; each chart image of an
intersection is a classical polytope obtained by expanding the points'
min-of-functionals chart expressions.  Vertices are elements whose chart
representative is a vertex of some chart image; they may have rational
coordinates even when the half-space data is integral.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .errors import NoDualRegistered, NotCompact, OriginNotInterior
from .lattice import Element, PolyptychLattice
from .linalg import rank, vsub
from .points import Point, SElem, verify_point
from .polyhedra import (
    ClassicalPolytope,
    HPolyhedron,
    UnboundedError,
    hrep_feasible,
    lattice_points,
    strict_feasible,
)


@dataclass(frozen=True)
class PLHalfSpace:
    point: Point
    threshold: int


class PLPolytope:
    """Finite intersection of PL half-spaces with cached chart data."""

    def __init__(self, lattice: PolyptychLattice, halfspaces: Sequence[PLHalfSpace]):
        if not halfspaces:
            raise ValueError("need at least one half-space")
        for h in halfspaces:
            if h.point.lattice is not lattice:
                raise ValueError("half-space point belongs to a different lattice")
        self.lattice = lattice
        self.halfspaces = tuple(halfspaces)
        self.chart_images: dict = {}
        self._vertices: Optional[tuple] = None
        self._support: Optional[SElem] = None
        for label in lattice.charts:
            hrep = self._chart_hrep(label)
            try:
                self.chart_images[label] = ClassicalPolytope.from_hrep(hrep)
            except UnboundedError:
                if hrep_feasible(hrep):
                    raise NotCompact(f"chart image {label} is unbounded") from None
                self.chart_images[label] = ClassicalPolytope(hrep, ())

    def _chart_hrep(self, label) -> HPolyhedron:
        ineqs = []
        for h in self.halfspaces:
            for f in h.point.chart_expr(label).members:
                ineqs.append((f, h.threshold))
        return HPolyhedron.make(self.lattice.rank, ineqs)

    @property
    def is_empty(self) -> bool:
        return self.chart_images[self.lattice.base].is_empty()

    def chart_image(self, label) -> ClassicalPolytope:
        return self.chart_images[label]

    def contains(self, e: Element) -> bool:
        return all(h.point.min_eval(e.coords) >= h.threshold for h in self.halfspaces)

    def vertex_elements(self) -> tuple:
        if self._vertices is None:
            seen: dict = {}
            for label in self.lattice.charts:
                for v in self.chart_images[label].vertices:
                    el = self.lattice.from_chart(label, v)
                    seen[el.coords] = el
            self._vertices = tuple(sorted(seen.values(), key=Element.sort_key))
        return self._vertices


def build_polytope(lattice: PolyptychLattice, halfspaces: Sequence[PLHalfSpace]) -> PLPolytope:
    """Assemble a PL polytope; raises ``NotCompact`` when any chart image is
    unbounded.  Emptiness is allowed and exposed as a flag."""
    return PLPolytope(lattice, halfspaces)


def vertices(p: PLPolytope) -> list[Element]:
    """Union over charts of the chart-image vertices, as elements."""
    return list(p.vertex_elements())


def scale_polytope(p: PLPolytope, k: int) -> PLPolytope:
    """Dilate by a nonnegative integer: thresholds scale."""
    if k < 0:
        raise ValueError("dilation factor must be nonnegative")
    hs = [PLHalfSpace(h.point, k * h.threshold) for h in p.halfspaces]
    return PLPolytope(p.lattice, hs)


def pl_lattice_points(p: PLPolytope) -> list[Element]:
    """Lattice elements of the polytope.

    Scans one chart image and pulls back; every chart must give the same
    element set, and this is asserted on each call.
    """
    lat = p.lattice
    reference: Optional[set] = None
    out: list[Element] = []
    for label in lat.charts:
        pts = lattice_points(p.chart_images[label])
        els = {lat.from_chart(label, x) for x in pts}
        if reference is None:
            reference = els
            out = sorted(els, key=Element.sort_key)
        else:
            assert els == reference, f"chart {label} disagrees on lattice points"
    return out


def is_integral(p: PLPolytope) -> bool:
    """True iff every chart image is an integral classical polytope."""
    return all(img.is_integral() for img in p.chart_images.values())


def is_full_dimensional(p: PLPolytope) -> bool:
    verts = p.chart_images[p.lattice.base].vertices
    if not verts:
        return False
    v0 = verts[0]
    return rank([vsub(v, v0) for v in verts[1:]]) == p.lattice.rank


def is_chart_gorenstein_fano(p: PLPolytope) -> bool:
    """Integral, full-dimensional, and cut out entirely at threshold -1.

    A half-space at threshold ``a < -1`` is accepted when its point divides
    by ``|a|`` to another valid lattice point (the representation rescales);
    any nonnegative threshold disqualifies.
    """
    if p.is_empty or not is_full_dimensional(p) or not is_integral(p):
        return False
    for h in p.halfspaces:
        if h.threshold >= 0:
            return False
        if h.threshold == -1:
            continue
        scale = Fraction(1, -h.threshold)
        scaled = h.point.scaled(scale)
        if not scaled.is_integral():
            return False
        if not verify_point(scaled).ok:
            return False
    return True


# ---------------------------------------------------------------------------
# Support functions, duals, hulls (these need a registered dual pair)
# ---------------------------------------------------------------------------


def _require_pair(lattice: PolyptychLattice):
    pair = lattice.dual_pair
    if pair is None:
        raise NoDualRegistered("operation needs a registered dual pair")
    return pair


def support_function(p: PLPolytope, pair=None):
    """The min of the pairing over the polytope, carried by the vertex set.

    Returns the vertex set as a semialgebra element together with an
    evaluator on elements of the dual side.
    """
    pair = pair or _require_pair(p.lattice)
    verts = p.vertex_elements()
    if p._support is None:
        p._support = SElem.of(p.lattice, list(verts))
    selem = p._support
    vpoints = [pair.v_point_for(p.lattice, s) for s in verts]

    def evaluator(n: Element):
        return min(q(n) for q in vpoints)

    return selem, evaluator


def dual_polytope(p: PLPolytope, pair=None) -> PLPolytope:
    """Dual PL polytope on the other side of the pairing: one half-space at
    threshold -1 per vertex.  Requires the origin interior, certified by all
    thresholds being negative."""
    pair = pair or _require_pair(p.lattice)
    if any(h.threshold >= 0 for h in p.halfspaces):
        raise OriginNotInterior("dualization needs all thresholds negative")
    other = pair.other_side(p.lattice)
    hs = [PLHalfSpace(pair.v_point_for(p.lattice, m), -1) for m in p.vertex_elements()]
    return PLPolytope(other, hs)


def p_conv(lattice: PolyptychLattice, s: Sequence[Element], pair=None):
    """Point-convex hull of a finite element set.

    Returns ``(membership, points)``: an exact membership predicate decided
    cone by cone on the dual side, and the hull's lattice elements, found by
    scanning a bounding dilate of a synthesized origin-interior polytope.
    """
    pair = pair or _require_pair(lattice)
    other = pair.other_side(lattice)
    s = list(s)
    vpoints = [pair.v_point_for(lattice, m) for m in s]
    n_fan = other.fan()

    def membership(m: Element) -> bool:
        vm = pair.v_point_for(lattice, m)
        for ci in range(len(n_fan.cones)):
            cone = n_fan.cones[ci].base_cone
            stricts = [vsub(q.cone_funcs[ci], vm.cone_funcs[ci]) for q in vpoints]
            if strict_feasible(stricts, cone) is not None:
                return False
        return True

    points = [m for m in _hull_candidates(lattice, s, pair) if membership(m)]
    points.sort(key=Element.sort_key)
    return membership, points


def _hull_candidates(lattice: PolyptychLattice, s: Sequence[Element], pair) -> list[Element]:
    """Integer elements of a dilate of a fixed origin-interior polytope that
    is large enough to contain the hull of ``s``."""
    if not s:
        return []
    other = pair.other_side(lattice)
    probes = [
        other.element(v)
        for v in itertools.product((-1, 0, 1), repeat=lattice.rank)
        if any(c != 0 for c in v)
    ]
    probe_points = [pair.v_point_for(other, n) for n in probes]
    k = 1
    for q in probe_points:
        for m in s:
            val = q(m)
            if -val > k:
                k = math.ceil(-val)
    ineqs = []
    for q in probe_points:
        for f in q.chart_expr(lattice.base).members:
            ineqs.append((f, -k))
    box = ClassicalPolytope.from_hrep(HPolyhedron.make(lattice.rank, ineqs))
    return [lattice.element(x) for x in lattice_points(box)]
