"""Built-in lattices with closed-form data.

Three constructors: the trivial lattice of any rank with its classical dual;
a rank-2 lattice with two charts glued by ``(x, y) -> (min(0, y) - x, y)``,
strictly self-dual, together with its standard polytope; and the two-vector
family with ``r`` charts carried by ``d`` linearity regions, with its dual
pairing and its distinguished reflexive-type polytope.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .duality import DualPair, register_dual_pair
from .errors import BadParams, NotAPoint
from .lattice import Element, PLMap, PolyptychLattice
from .points import Point, point_from_cone_functionals
from .polyhedra import RationalCone
from .polytopes import PLHalfSpace, PLPolytope, build_polytope


# ---------------------------------------------------------------------------
# Trivial lattice
# ---------------------------------------------------------------------------


def trivial_lattice(r: int, box_radius: Optional[int] = None):
    """One chart, identity mutation; dual is the classical dual lattice via
    the standard inner product.  Returns ``(lattice, pair)``."""
    if r < 1:
        raise BadParams("rank must be at least 1")
    m = PolyptychLattice(r, (1,), {}, name=f"trivial{r}")
    n = PolyptychLattice(r, (1,), {}, name=f"trivial{r}*")

    def mk_v(target):
        def v(e: Element) -> Point:
            return point_from_cone_functionals(target, (tuple(e.coords),))

        return v

    def mk_inv(source):
        def inv(p: Point) -> Element:
            return source.element(p.cone_funcs[0])

        return inv

    pair = DualPair(m, n, mk_v(n), mk_v(m), mk_inv(m), mk_inv(n), box_radius, name=f"trivial{r}-pair")
    register_dual_pair(pair)
    return m, pair


# ---------------------------------------------------------------------------
# The rank-2 two-chart example
# ---------------------------------------------------------------------------


@dataclass
class A1Example:
    lattice: PolyptychLattice
    pair: DualPair
    polytope: PLPolytope
    facet_params: tuple

    def point(self, a: int, b: int, bp: int) -> Point:
        return a1_point(self.lattice, a, b, bp)

    def param_of(self, p: Point):
        return a1_param_of(p)


def a1_lattice() -> PolyptychLattice:
    up = RationalCone.make(2, [(0, 1)])
    down = RationalCone.make(2, [(0, -1)])
    mu = PLMap.make(2, [(up, ((-1, 0), (0, 1))), (down, ((-1, 1), (0, 1)))])
    return PolyptychLattice(2, (1, 2), {(1, 2): mu}, name="a1")


def a1_point(lat: PolyptychLattice, a: int, b: int, bp: int) -> Point:
    """The point with values ``a, b, bp`` on the three marked elements; the
    defining constraint is ``b + bp = min(0, a)``."""
    if b + bp != min(0, a):
        raise NotAPoint(f"(a,b,b')=({a},{b},{bp}) violates b+b' = min(0,a)")
    funcs = []
    for plc in lat.fan().cones:
        if plc.base_cone.contains((0, 1)):
            funcs.append((a, b))
        else:
            funcs.append((a, -bp))
    return point_from_cone_functionals(lat, funcs)


def a1_param_of(p: Point):
    lat = p.lattice
    a = p(lat.element((1, 0)))
    b = p(lat.element((0, 1)))
    bp = p(lat.element((0, -1)))
    return a, b, bp


def a1_example(box_radius: Optional[int] = None) -> A1Example:
    lat = a1_lattice()

    def v(e: Element) -> Point:
        x, y = e.coords
        xp = min(0, y) - x
        funcs = []
        for plc in lat.fan().cones:
            if plc.base_cone.contains((0, 1)):
                funcs.append((y, x))
            else:
                funcs.append((y, -xp))
        return point_from_cone_functionals(lat, funcs)

    def v_inv(p: Point) -> Element:
        a, b, _ = a1_param_of(p)
        return lat.element((b, a))

    pair = DualPair(lat, lat, v, v, v_inv, v_inv, box_radius, name="a1-pair")
    register_dual_pair(pair)
    facet_params = ((-1, 0, -1), (0, 1, -1), (1, -1, 1))
    hs = [PLHalfSpace(a1_point(lat, *t), -1) for t in facet_params]
    poly = build_polytope(lat, hs)
    return A1Example(lat, pair, poly, facet_params)


# ---------------------------------------------------------------------------
# The (d, r) family
# ---------------------------------------------------------------------------


def _w_slots(r: int, i: int) -> list[int]:
    return [k for k in range(1, r + 1) if k != i]


def mdr_compress(d: int, r: int, i: int, u: Sequence, w: Sequence) -> tuple:
    """Chart-``i`` ambient pair (with ``w_i = 0``) to coordinates."""
    assert w[i - 1] == 0
    return tuple(u) + tuple(w[k - 1] for k in _w_slots(r, i))


def mdr_decompress(d: int, r: int, i: int, coords: Sequence):
    u = tuple(coords[:d])
    w = [0] * r
    for pos, k in enumerate(_w_slots(r, i)):
        w[k - 1] = coords[d + pos]
    return u, tuple(w)


def mdr_phi(d: int, r: int, i: int, u: Sequence, w: Sequence) -> tuple:
    """Normal form to chart-``i`` coordinates: add the total ``w`` weight to
    every ``u`` slot and zero the ``i``-th ``w`` slot."""
    tw = sum(w)
    uu = tuple(x + tw for x in u)
    ww = tuple(0 if k == i else w[k - 1] for k in range(1, r + 1))
    return mdr_compress(d, r, i, uu, ww)


def mdr_phi_inv(d: int, r: int, i: int, coords: Sequence):
    """Chart-``i`` coordinates back to the normal form ``min(u) = 0``."""
    u, w = mdr_decompress(d, r, i, coords)
    mn = min(u)
    uu = tuple(x - mn for x in u)
    ww = list(w)
    ww[i - 1] = mn - sum(w)
    return uu, tuple(ww)


def _mdr_fan_cones(d: int, rank: int) -> list[RationalCone]:
    cones = []
    for k in range(1, d + 1):
        ineqs = []
        for j in range(1, d + 1):
            if j != k:
                g = [0] * rank
                g[j - 1] = 1
                g[k - 1] += -1
                ineqs.append(tuple(g))
        cones.append(RationalCone.make(rank, ineqs))
    return cones


def mdr_lattice(d: int, r: int) -> PolyptychLattice:
    """Charts ``1..r``; the adjacent mutation rewrites one ``w`` slot using
    the minimum of the ``u`` block, so there are ``d`` linearity regions."""
    if d < 2 or r < 2:
        raise BadParams("need d >= 2 and r >= 2")
    rank = d + r - 1
    cones = _mdr_fan_cones(d, rank)
    mutations = {}
    for i in range(1, r):
        pieces = []
        src = _w_slots(r, i)
        dst = _w_slots(r, i + 1)
        for k in range(1, d + 1):
            rows = []
            for j in range(d):
                row = [0] * rank
                row[j] = 1
                rows.append(tuple(row))
            for kk in dst:
                row = [0] * rank
                if kk == i:
                    # new slot value: u_k minus the total of the source slots
                    row[k - 1] = 1
                    for pos in range(len(src)):
                        row[d + pos] = -1
                else:
                    row[d + src.index(kk)] = 1
                rows.append(tuple(row))
            pieces.append((cones[k - 1], rows))
        mutations[(i, i + 1)] = PLMap.make(rank, pieces)
    lat = PolyptychLattice(rank, tuple(range(1, r + 1)), mutations, name=f"mdr-{d}-{r}")
    lat.mdr_params = (d, r)
    return lat


def mdr_dims(lat: PolyptychLattice):
    params = getattr(lat, "mdr_params", None)
    if params is None:
        raise BadParams("lattice was not built by mdr_lattice")
    return params


def mdr_element(lat: PolyptychLattice, u: Sequence, w: Sequence) -> Element:
    d, r = mdr_dims(lat)
    if len(u) != d or len(w) != r or min(u) != 0:
        raise BadParams(f"not a normal form for ({d},{r}): {u}, {w}")
    return lat.element(mdr_phi(d, r, 1, u, w))


def mdr_key(lat: PolyptychLattice, e: Element):
    d, r = mdr_dims(lat)
    return mdr_phi_inv(d, r, 1, e.coords)


def _cone_u_index(lat: PolyptychLattice, d: int) -> list[int]:
    """For each fan cone, the index ``k`` of its minimal ``u`` slot."""
    cached = getattr(lat, "_mdr_cone_u", None)
    if cached is not None:
        return cached
    out = []
    for plc in lat.fan().cones:
        hit = None
        for k in range(1, d + 1):
            probe = [0] * lat.rank
            probe[k - 1] = -1
            if plc.base_cone.contains(tuple(probe)):
                hit = k
                break
        assert hit is not None
        out.append(hit)
    lat._mdr_cone_u = out
    return out


def mdr_point(lat: PolyptychLattice, a: Sequence, b: Sequence) -> Point:
    """The point pairing against ``(a, b)``; requires ``sum(a) = min(b)``."""
    d, r = mdr_dims(lat)
    if len(a) != d or len(b) != r:
        raise BadParams("parameter lengths do not match the family")
    if sum(a) != min(b):
        raise NotAPoint(f"(a,b)=({tuple(a)},{tuple(b)}) violates sum(a) = min(b)")
    ta = sum(a)
    funcs = []
    for k in _cone_u_index(lat, d):
        f = [0] * lat.rank
        for j in range(d):
            f[j] = a[j] + (b[0] - ta if j + 1 == k else 0)
        for pos, kk in enumerate(_w_slots(r, 1)):
            f[d + pos] = b[kk - 1] - b[0]
        funcs.append(tuple(f))
    return point_from_cone_functionals(lat, funcs)


def mdr_param_of(lat: PolyptychLattice, p: Point):
    d, r = mdr_dims(lat)
    a = tuple(
        p(mdr_element(lat, tuple(1 if j == i else 0 for j in range(d)), (0,) * r))
        for i in range(d)
    )
    b = tuple(
        p(mdr_element(lat, (0,) * d, tuple(1 if j == i else 0 for j in range(r))))
        for i in range(r)
    )
    return a, b


def mdr_dual_pair(d: int, r: int, box_radius: Optional[int] = None):
    """The strict pairing between the ``(d, r)`` and ``(r, d)`` lattices:
    ``(u, w) -> (w, u + |w| 1)`` with inverse ``(a, b) -> (b - min(b) 1, a)``.
    Returns ``(m, n, pair)`` with the pair registered on both sides."""
    m = mdr_lattice(d, r)
    n = mdr_lattice(r, d)

    def mk_v(src, dst):
        def v(e: Element) -> Point:
            u, w = mdr_key(src, e)
            tw = sum(w)
            return mdr_point(dst, tuple(w), tuple(x + tw for x in u))

        return v

    def mk_inv(src, dst):
        def inv(p: Point) -> Element:
            a, b = mdr_param_of(dst, p)
            mn = min(b)
            return mdr_element(src, tuple(x - mn for x in b), tuple(a))

        return inv

    pair = DualPair(
        m,
        n,
        mk_v(m, n),
        mk_v(n, m),
        mk_inv(m, n),
        mk_inv(n, m),
        box_radius,
        name=f"mdr-{d}-{r}-pair",
    )
    register_dual_pair(pair)
    return m, n, pair


def mdr_gf_generators(d: int, r: int) -> list[tuple]:
    """Chart-1 coordinates (on the ``(r, d)`` side) of the generator set that
    cuts the distinguished polytope."""
    gens = []
    for i in range(1, r + 1):
        u = tuple(1 if j == i else 0 for j in range(1, r + 1))
        gens.append(mdr_compress(r, d, 1, u, (0,) * d))
    ones = (1,) * r
    for s in (1, -1):
        gens.append(mdr_compress(r, d, 1, tuple(s * x for x in ones), (0,) * d))
    for j in range(2, d + 1):
        ej = tuple(1 if kk == j else 0 for kk in range(1, d + 1))
        for s in (1, -1):
            gens.append(
                mdr_compress(r, d, 1, tuple(s * x for x in ones), tuple(s * x for x in ej))
            )
    return gens


def mdr_gf_polytope(d: int, r: int, pair=None) -> PLPolytope:
    """The distinguished polytope: all thresholds ``-1``, one half-space per
    generator, integral and chart-reflexive in every chart."""
    if pair is None:
        m, n, pair = mdr_dual_pair(d, r)
    else:
        m, n = pair.m, pair.n
    hs = []
    for coords in mdr_gf_generators(d, r):
        n_el = n.from_chart(1, coords)
        hs.append(PLHalfSpace(pair.w(n_el), -1))
    return build_polytope(m, hs)


def mdr_tu_matrix(d: int, r: int, k: int = 1) -> list[tuple]:
    """Constraint matrix of the chart-1 image of the distinguished polytope
    restricted to the ``k``-th linearity region, in ambient coordinates
    ``(u_1..u_d, w_1, w_2..w_r)``; certifying it totally unimodular certifies
    integrality of the slice."""
    p = d + r
    rows = []
    for j in range(d):  # u_j >= -1
        row = [0] * p
        row[j] = 1
        rows.append(tuple(row))
    for j in range(d):  # -u_j >= -1
        row = [0] * p
        row[j] = -1
        rows.append(tuple(row))
    row = [0] * p  # u_k - w_2 - ... - w_r >= -1
    row[k - 1] = 1
    for j in range(d + 1, p):
        row[j] = -1
    rows.append(tuple(row))
    for j in range(d + 1, p):  # w_i >= -1 for i >= 2
        row = [0] * p
        row[j] = 1
        rows.append(tuple(row))
    for j in range(d):  # cone: u_j - u_k >= 0
        row = [0] * p
        row[j] = 1
        row[k - 1] += -1
        rows.append(tuple(row))
    for s in (1, -1):  # chart: w_1 = 0
        row = [0] * p
        row[d] = s
        rows.append(tuple(row))
    return rows
