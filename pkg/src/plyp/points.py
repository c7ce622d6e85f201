"""The space of points of a polyptych lattice, and its canonical semialgebra.

A point is an integer-valued function on the lattice that is linear on every
maximal cone of the lattice fan and turns chart sums into minima.  Points are
stored by their restriction to each maximal fan cone (a functional in
base-chart coordinates); chart expressions are derived on demand.

Verification of the defining min identity quantifies over an infinite set; it
is decided here on a finite certificate: all pairs of semigroup generators
drawn from all ordered pairs of maximal fan cones.  Both sides of the
identity are piecewise linear in the pair, linear on products of cones, which
is what makes generator checking meaningful; this soundness assumption is
deliberate and the certificate set is the documented contract.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .errors import NoDualRegistered, NotACone
from .linalg import as_int_vec, dot, solve, vsub
from .lattice import Element, PolyptychLattice, add_in_chart, upsilon
from .polyhedra import RationalCone, TropExpr, strict_feasible


def _row_compose(f: Sequence, m: Sequence[Sequence]) -> tuple:
    """Coefficients of ``x -> f(m @ x)``."""
    return tuple(dot(f, col) for col in zip(*m))


@dataclass(frozen=True, eq=False)
class Point:
    """A point, recorded by one functional per maximal fan cone (base coords)."""

    lattice: PolyptychLattice
    cone_funcs: tuple  # aligned with lattice.fan().cones

    def __eq__(self, other):
        return (
            isinstance(other, Point)
            and self.lattice is other.lattice
            and self.cone_funcs == other.cone_funcs
        )

    def __hash__(self):
        return hash((id(self.lattice), self.cone_funcs))

    def __repr__(self):
        return f"Point{self.cone_funcs}"

    def eval_base(self, base_coords: Sequence):
        for plc, f in zip(self.lattice.fan().cones, self.cone_funcs):
            if plc.base_cone.contains(base_coords):
                return dot(f, base_coords)
        raise ValueError(f"{base_coords} not covered by the lattice fan")

    def __call__(self, e: Element):
        return self.eval_base(e.coords)

    def min_eval(self, base_coords: Sequence):
        """Min over all cone functionals; agrees with ``eval_base`` for valid
        points (convexity) and is total on rational inputs."""
        return min(dot(f, base_coords) for f in self.cone_funcs)

    def chart_functional(self, cone_index: int, label) -> tuple:
        plc = self.lattice.fan().cones[cone_index]
        return _row_compose(self.cone_funcs[cone_index], plc.inverse_from(label))

    def chart_expr(self, label) -> TropExpr:
        funcs = [
            self.chart_functional(i, label) for i in range(len(self.cone_funcs))
        ]
        return TropExpr.make(self.lattice.rank, funcs)

    def is_integral(self) -> bool:
        return all(as_int_vec(f) is not None for f in self.cone_funcs)

    def scaled(self, c) -> "Point":
        return Point(self.lattice, tuple(tuple(c * x for x in f) for f in self.cone_funcs))


def evaluate(p: Point, e: Element):
    """Value of the point on an element (any chart gives the same answer)."""
    return p(e)


def is_linear_on_chart(p: Point, label) -> bool:
    """Whether the chart expression collapses to a single functional.  On a
    whole chart the minimal min-representation is exactly deduplication, so
    this is a set-size check."""
    funcs = {p.chart_functional(i, label) for i in range(len(p.cone_funcs))}
    return len(funcs) == 1


def restrict_to_cone(p: Point, cone: RationalCone) -> tuple:
    """The unique functional (base coords) agreeing with the point on a
    maximal fan cone."""
    for plc, f in zip(p.lattice.fan().cones, p.cone_funcs):
        if plc.base_cone.same_cone(cone):
            return f
    raise NotACone("not a maximal cone of the lattice fan")


@dataclass(frozen=True)
class PointCheck:
    ok: bool
    point: Optional[Point]
    failure: Optional[dict]


def is_point(lat: PolyptychLattice, chart_exprs: dict) -> PointCheck:
    """Decide whether per-chart min-of-functionals data defines a point.

    Checks, in order: integral coefficients; linearity on every maximal fan
    cone in every chart; chart compatibility through the mutations; and the
    chart-sum min identity on the generator certificate set.
    """
    fan = lat.fan()
    for label in lat.charts:
        if label not in chart_exprs:
            return PointCheck(False, None, {"reason": "missing-chart", "chart": str(label)})
    for label, expr in chart_exprs.items():
        for f in expr.members:
            if as_int_vec(f) is None:
                return PointCheck(
                    False, None, {"reason": "non-integral", "chart": str(label), "functional": f}
                )

    # active functional per (cone, chart), raw per-cone linearity
    cone_funcs_base = []
    for ci, plc in enumerate(fan.cones):
        actives = {}
        for label in lat.charts:
            expr = chart_exprs[label]
            image_gens = _image_generators(lat, ci, label)
            active = _active_member(expr, image_gens)
            if active is None:
                return PointCheck(
                    False,
                    None,
                    {"reason": "not-linear-on-cone", "chart": str(label), "cone": ci},
                )
            actives[label] = active
        # chart compatibility: every chart's active functional must pull back
        # to the base one through the mutation matrix on this cone
        base_f = actives[lat.base]
        for label in lat.charts:
            m = plc.matrix_to(label)
            pulled = _row_compose(actives[label], m)
            if tuple(pulled) != tuple(base_f):
                return PointCheck(
                    False,
                    None,
                    {"reason": "chart-incompatible", "chart": str(label), "cone": ci},
                )
        cone_funcs_base.append(tuple(base_f))

    candidate = Point(lat, tuple(cone_funcs_base))
    witness = _certificate_failure(lat, chart_exprs[lat.base].members)
    if witness is not None:
        return PointCheck(False, None, {"reason": "min-identity", **witness})
    return PointCheck(True, candidate, None)


def _image_generators(lat: PolyptychLattice, cone_index: int, label) -> tuple:
    """Semigroup generators of a fan cone pushed into a chart: the images of
    the base generators under the cone's mutation matrix."""
    plc = lat.fan().cones[cone_index]
    gens = lat.cone_generators(plc.base_cone)
    m = plc.matrix_to(label)
    from .linalg import mat_vec

    return tuple(tuple(mat_vec(m, g)) for g in gens)


def _active_member(expr: TropExpr, cone_gens: Sequence[tuple]) -> Optional[tuple]:
    """The member that is the minimum of the expression on the cone spanned
    by the generators (exact: generators positively span)."""
    for f in expr.members:
        if all(
            all(dot(g, x) - dot(f, x) >= 0 for x in cone_gens)
            for g in expr.members
            if g != f
        ):
            return f
    return None


def _certificate_failure(lat: PolyptychLattice, members) -> Optional[dict]:
    """Evaluate the chart-sum min identity on the lattice's certificate set,
    with the function given as a min of base-chart functionals."""
    import numpy as np

    cert = lat.point_certificate()
    funcs = [as_int_vec(f) for f in members]
    if all(f is not None for f in funcs) and _int64_safe(cert.coords, funcs):
        fmat = np.array(funcs, dtype=np.int64)
        vals = (cert.np_coords @ fmat.T).min(axis=1)
        lhs = vals[cert.np_ig] + vals[cert.np_ih]
        rhs = vals[cert.np_sums].min(axis=1)
        bad = np.nonzero(lhs != rhs)[0]
        if bad.size == 0:
            return None
        i = int(bad[0])
        gi, hi, _ = cert.triples[i]
        return {
            "pair": (cert.coords[gi], cert.coords[hi]),
            "lhs": int(lhs[i]),
            "rhs": int(rhs[i]),
        }
    table = [min(dot(f, c) for f in members) for c in cert.coords]
    for gi, hi, sums in cert.triples:
        lhs = table[gi] + table[hi]
        rhs = min(table[si] for si in sums)
        if lhs != rhs:
            return {"pair": (cert.coords[gi], cert.coords[hi]), "lhs": lhs, "rhs": rhs}
    return None


def _int64_safe(coords, funcs) -> bool:
    bound = max((abs(x) for c in coords for x in c), default=0) * max(
        (abs(x) for f in funcs for x in f), default=0
    )
    return bound < 2**40


def point_from_cone_functionals(lat: PolyptychLattice, funcs: Sequence[Sequence]) -> Point:
    """Package per-cone base-coordinate functionals as a point (no checks)."""
    return Point(lat, tuple(tuple(f) for f in funcs))


def verify_point(p: Point) -> PointCheck:
    """Full verification of an assembled point.

    Integrality; the min form (each cone's functional dominates on its cone,
    certified on positively spanning generators, which also forces agreement
    on shared faces); and the chart-sum min identity on the certificate set.
    """
    lat = p.lattice
    fan = lat.fan()
    funcs = [as_int_vec(f) for f in p.cone_funcs]
    if any(f is None for f in funcs):
        return PointCheck(False, None, {"reason": "non-integral"})
    for ci, plc in enumerate(fan.cones):
        gens = lat.cone_generators(plc.base_cone)
        f = p.cone_funcs[ci]
        for cj, g in enumerate(p.cone_funcs):
            if g == f:
                continue
            if not all(dot(g, x) - dot(f, x) >= 0 for x in gens):
                return PointCheck(
                    False, None, {"reason": "not-convex", "cone": ci, "against": cj}
                )
    witness = _certificate_failure(lat, p.cone_funcs)
    if witness is not None:
        return PointCheck(False, None, {"reason": "min-identity", **witness})
    return PointCheck(True, p, None)


def extend_from_cone(lat: PolyptychLattice, cone: RationalCone, f: Sequence) -> Optional[Point]:
    """Reconstruct the unique point restricting to ``f`` on a maximal fan
    cone, by the propagation rule: shift any element deep into the cone, read
    the value there, and subtract.  Returns None when no point extends ``f``.
    """
    fan = lat.fan()
    target = None
    for plc in fan.cones:
        if plc.base_cone.same_cone(cone):
            target = plc
            break
    if target is None:
        raise NotACone("not a maximal cone of the lattice fan")
    w0 = target.base_cone.interior_point()
    if w0 is None:
        raise NotACone("cone has empty interior")
    from .linalg import primitive

    w0 = primitive(w0)

    def prop_value(v: tuple) -> Optional[Fraction]:
        lam = 1
        while lam < 2**24:
            w = tuple(lam * c for c in w0)
            we = lat.element(w)
            ve = lat.element(v)
            sums = [add_in_chart(ve, we, a) for a in lat.charts]
            if all(target.base_cone.contains(s.coords) for s in sums):
                return min(dot(f, s.coords) for s in sums) - dot(f, w)
            lam *= 2
        return None

    cone_funcs = []
    for plc in fan.cones:
        gens = lat.cone_generators(plc.base_cone)
        vals = []
        for g in gens:
            val = prop_value(g)
            if val is None:
                return None
            vals.append(val)
        func = _solve_functional(gens, vals, lat.rank)
        if func is None:
            return None
        cone_funcs.append(func)
    p = Point(lat, tuple(cone_funcs))
    check = verify_point(p)
    return p if check.ok else None


def _solve_functional(gens, vals, dim):
    from .linalg import rank as mat_rank

    idx = []
    for i in range(len(gens)):
        if mat_rank([gens[j] for j in idx + [i]]) > len(idx):
            idx.append(i)
        if len(idx) == dim:
            break
    if len(idx) < dim:
        return None
    func = solve([gens[i] for i in idx], [vals[i] for i in idx])
    if func is None:
        return None
    if any(dot(func, g) != v for g, v in zip(gens, vals)):
        return None
    ints = as_int_vec(func)
    return ints if ints is not None else tuple(func)


def combine_points(p: Point, q: Point, lam, mu, label) -> Optional[Point]:
    """``lam*p + mu*q`` with nonnegative coefficients.

    Always a point when both inputs are linear on the chart; otherwise the
    combination is assembled and returned only if it verifies.
    """
    if lam < 0 or mu < 0:
        raise ValueError("coefficients must be nonnegative")
    funcs = tuple(
        tuple(lam * a + mu * b for a, b in zip(fp, fq))
        for fp, fq in zip(p.cone_funcs, q.cone_funcs)
    )
    out = Point(p.lattice, funcs)
    if is_linear_on_chart(p, label) and is_linear_on_chart(q, label):
        return out
    return out if verify_point(out).ok else None


# ---------------------------------------------------------------------------
# The canonical semialgebra
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SElem:
    """Element of the canonical semialgebra: infinity, or a finite set of
    lattice elements kept in hull-canonical form when a dual is registered."""

    lattice: PolyptychLattice
    members: tuple
    infinite: bool = False

    @staticmethod
    def infinity(lat: PolyptychLattice) -> "SElem":
        return SElem(lat, (), True)

    @staticmethod
    def of(lat: PolyptychLattice, elements: Sequence[Element], normalize: bool = True) -> "SElem":
        ms = sorted(set(elements), key=Element.sort_key)
        if normalize and len(ms) > 1:
            ms = _canonical_members(lat, ms)
        return SElem(lat, tuple(ms), False)

    def __eq__(self, other):
        if not isinstance(other, SElem):
            return NotImplemented
        if self.infinite or other.infinite:
            return self.infinite and other.infinite
        if self.lattice is not other.lattice:
            return False
        if len(self.members) > 1 or len(other.members) > 1:
            if self.lattice.dual_pair is None:
                raise NoDualRegistered("semialgebra equality needs a registered dual pair")
        return self.members == other.members

    def __hash__(self):
        return hash((id(self.lattice), self.members, self.infinite))

    def __repr__(self):
        return "SElem(inf)" if self.infinite else f"SElem{[m.coords for m in self.members]}"


def _canonical_members(lat: PolyptychLattice, members: list[Element]) -> list[Element]:
    """Drop members lying in the hull of the rest, in base-coordinate order."""
    if lat.dual_pair is None:
        raise NoDualRegistered("canonical form needs a registered dual pair")
    cache = getattr(lat, "_canon_cache", None)
    if cache is None:
        cache = lat._canon_cache = {}
    key = tuple(m.coords for m in members)
    hit = cache.get(key)
    if hit is not None:
        return [lat.element(c) for c in hit]
    kept = list(members)
    changed = True
    while changed:
        changed = False
        for m in list(kept):
            rest = [x for x in kept if x != m]
            if rest and member_in_hull(lat, m, rest):
                kept.remove(m)
                changed = True
                break
    cache[key] = tuple(m.coords for m in kept)
    return kept


def member_in_hull(lat: PolyptychLattice, m: Element, hull_of: Sequence[Element]) -> bool:
    """Hull membership through the dual: ``m`` escapes iff some maximal cone
    of the dual fan carries a witness where ``m``'s pairing value dips below
    every hull member's.

    A generator scan settles many escapes without a feasibility solve (any
    cone generator where ``m`` dips strictly below is itself a witness), and
    query results are memoized per lattice."""
    pair = lat.dual_pair
    if pair is None:
        raise NoDualRegistered("hull membership needs a registered dual pair")
    if any(s == m for s in hull_of):
        return True
    cache = getattr(lat, "_hull_cache", None)
    if cache is None:
        cache = lat._hull_cache = {}
    key = (m.coords, tuple(sorted(s.coords for s in hull_of)))
    hit = cache.get(key)
    if hit is not None:
        return hit
    v = pair.v_point_for(lat, m)
    vs = [pair.v_point_for(lat, s) for s in hull_of]
    n_lat = pair.other_side(lat)
    n_cones = n_lat.fan().cones
    all_gens = [n_lat.cone_generators(c.base_cone) for c in n_cones]
    # a single member dominating everywhere already certifies membership
    for s in vs:
        if all(
            all(dot(s.cone_funcs[ci], x) <= dot(v.cone_funcs[ci], x) for x in all_gens[ci])
            for ci in range(len(n_cones))
        ):
            cache[key] = True
            return True
    out = True
    for ci in range(len(n_cones)):
        fm = v.cone_funcs[ci]
        fs = [s.cone_funcs[ci] for s in vs]
        witnessed = False
        for x in all_gens[ci]:
            vmx = dot(fm, x)
            if all(dot(f, x) > vmx for f in fs):
                witnessed = True
                break
        if not witnessed:
            # one member lying below m on this whole cone rules out a witness
            # here without a feasibility solve
            gens = all_gens[ci]
            if not any(
                all(dot(f, x) <= dot(fm, x) for x in gens) for f in fs
            ):
                stricts = [vsub(f, fm) for f in fs]
                witnessed = strict_feasible(stricts, n_cones[ci].base_cone) is not None
        if witnessed:
            out = False
            break
    cache[key] = out
    return out


def semialg_oplus(a: SElem, b: SElem) -> SElem:
    """Idempotent sum: canonical form of the union; infinity is the identity."""
    if a.infinite:
        return b
    if b.infinite:
        return a
    if a.lattice is not b.lattice:
        raise ValueError("operands from different lattices")
    return SElem.of(a.lattice, list(a.members) + list(b.members))


def semialg_star(a: SElem, b: SElem) -> SElem:
    """Product: sum over all pairwise chart-sum sets; infinity absorbs."""
    if a.infinite or b.infinite:
        return SElem.infinity(a.lattice)
    out: list[Element] = []
    for m in a.members:
        for mp in b.members:
            out.extend(upsilon(m, mp))
    return SElem.of(a.lattice, out)


def selem_scale(a: SElem, lam) -> SElem:
    if a.infinite:
        return a
    from .lattice import scale as el_scale

    return SElem.of(a.lattice, [el_scale(m, lam) for m in a.members])


def point_eval_hom(p: Point, a: SElem):
    """The semialgebra morphism induced by a point: min over members, and
    None stands for infinity."""
    if a.infinite:
        return None
    return min(p(m) for m in a.members)
