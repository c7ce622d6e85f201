"""Polyptych lattices: charts glued by piecewise-linear mutations.

A mutation is stored as a complete fan together with one matrix per maximal
cone; the lattice axioms (identity, inverse, cocycle) are checked exactly on
the common refinement of all mutation fans.  The fan of the lattice collects
the maximal cones on which every mutation is simultaneously linear.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .errors import DimensionMismatch, NegativeScalar, UnknownChart
from .linalg import as_int_vec, identity, inverse, mat, mat_mul, mat_vec, vadd
from .polyhedra import ClassicalFan, RationalCone, common_refinement, strict_feasible


@dataclass(frozen=True)
class PLMap:
    """Piecewise-linear map: one matrix per maximal cone of a complete fan."""

    dim: int
    pieces: tuple  # ((RationalCone, matrix), ...)

    @staticmethod
    def make(dim: int, pieces: Sequence) -> "PLMap":
        ps = tuple((cone, mat(m)) for cone, m in pieces)
        for cone, m in ps:
            if cone.dim != dim or len(m) != dim or any(len(r) != dim for r in m):
                raise DimensionMismatch("piece dimension mismatch")
        return PLMap(dim, ps)

    @staticmethod
    def linear(matrix: Sequence[Sequence]) -> "PLMap":
        dim = len(matrix)
        return PLMap.make(dim, [(RationalCone.whole_space(dim), matrix)])

    @staticmethod
    def identity_map(dim: int) -> "PLMap":
        return PLMap.linear(identity(dim))

    def fan(self) -> ClassicalFan:
        return ClassicalFan.make(self.dim, [c for c, _ in self.pieces])

    def apply(self, x: Sequence):
        for cone, m in self.pieces:
            if cone.contains(x):
                return mat_vec(m, x)
        raise ValueError(f"point {x} not covered by the map's fan")

    def matrix_at(self, x: Sequence):
        for cone, m in self.pieces:
            if cone.contains(x):
                return m
        raise ValueError(f"point {x} not covered by the map's fan")

    def matrix_on(self, cone: RationalCone):
        """Matrix of the map on a cone contained in a single linearity region."""
        x = cone.interior_point()
        if x is None:
            raise ValueError("cone has empty interior")
        return self.matrix_at(x)

    def compose(self, other: "PLMap") -> "PLMap":
        """``self o other`` (apply ``other`` first)."""
        pieces = []
        for c_in, m_in in other.pieces:
            for c_out, m_out in self.pieces:
                # preimage of c_out under m_in: inequalities g o m_in
                cell = c_in.intersect(c_out.transform(m_in))
                if cell.is_full_dim():
                    pieces.append((cell.without_redundant(), mat_mul(m_out, m_in)))
        return PLMap.make(self.dim, _dedup_pieces(pieces))

    def inverse_map(self) -> "PLMap":
        pieces = []
        for cone, m in self.pieces:
            minv = inverse(m)
            assert minv is not None, "mutation matrix is singular"
            pieces.append((cone.transform(minv), minv))
        return PLMap.make(self.dim, _dedup_pieces(pieces))

    def validate_continuity(self) -> bool:
        """Adjacent pieces must agree on their common face."""
        for (c1, m1), (c2, m2) in itertools.combinations(self.pieces, 2):
            if m1 == m2:
                continue
            inter = c1.intersect(c2)
            for r1, r2 in zip(m1, m2):
                diff = tuple(a - b for a, b in zip(r1, r2))
                if strict_feasible([diff], inter) is not None:
                    return False
                if strict_feasible([tuple(-d for d in diff)], inter) is not None:
                    return False
        return True

    def mismatch_against(self, other: "PLMap") -> Optional[RationalCone]:
        """First full-dimensional cone on which the two maps differ, if any."""
        for c1, m1 in self.pieces:
            for c2, m2 in other.pieces:
                if m1 == m2:
                    continue
                cell = c1.intersect(c2)
                if cell.is_full_dim():
                    return cell.without_redundant()
        return None

    def equals(self, other: "PLMap") -> bool:
        return self.mismatch_against(other) is None


def _dedup_pieces(pieces):
    out = []
    for cone, m in pieces:
        if not any(cone.same_cone(c) and m == mm for c, mm in out):
            out.append((cone, m))
    out.sort(key=lambda cm: cm[0].ineqs)
    return out


@dataclass(frozen=True)
class PLCone:
    """Maximal cone of the lattice fan: base-chart shape plus, per chart, the
    matrix of the base-to-chart mutation on it, its inverse, and the image."""

    base_cone: RationalCone
    chart_matrices: tuple  # ((label, matrix), ...) in chart order
    chart_inverses: tuple  # ((label, inverse matrix), ...)
    chart_images: tuple  # ((label, RationalCone), ...)

    def matrix_to(self, label):
        for lab, m in self.chart_matrices:
            if lab == label:
                return m
        raise UnknownChart(str(label))

    def inverse_from(self, label):
        for lab, m in self.chart_inverses:
            if lab == label:
                return m
        raise UnknownChart(str(label))

    def image_in(self, label) -> RationalCone:
        for lab, c in self.chart_images:
            if lab == label:
                return c
        raise UnknownChart(str(label))


@dataclass(frozen=True)
class PLFan:
    cones: tuple  # of PLCone

    def base_fan(self) -> ClassicalFan:
        cones = [c.base_cone for c in self.cones]
        return ClassicalFan.make(cones[0].dim, cones)


@dataclass(frozen=True)
class PointCertificate:
    """Shared evaluation table for the finite point-identity certificate."""

    coords: tuple  # distinct coordinate tuples
    triples: tuple  # (i, j, (sum index per chart, ...))
    cone_gen_indices: tuple  # per fan cone, indices of its generators


class PolyptychLattice:
    """A finite family of rank-``r`` lattices glued by mutations.

    ``mutations`` maps ordered chart-label pairs to PLMaps; missing pairs are
    filled in by composition through the base chart.  Charts are identified
    with ``Z^rank`` by the supplied coordinates; the first label is the base
    chart in which elements store their coordinates.
    """

    def __init__(self, rank: int, charts: Sequence, mutations: dict, name: str = ""):
        self.rank = rank
        self.charts = tuple(charts)
        self.name = name or f"lattice-{rank}-{len(self.charts)}"
        self.base = self.charts[0]
        self.mutations = dict(mutations)
        self._fill_mutations()
        self._chart_cache: dict = {}
        self._fan: Optional[PLFan] = None
        self._gens_cache: dict = {}
        self.dual_pair = None  # set by duality.register_dual_pair

    # -- construction ------------------------------------------------------

    def _fill_mutations(self):
        for a in self.charts:
            self.mutations.setdefault((a, a), PLMap.identity_map(self.rank))
        for a, b in itertools.permutations(self.charts, 2):
            if (a, b) in self.mutations and (b, a) not in self.mutations:
                self.mutations[(b, a)] = self.mutations[(a, b)].inverse_map()
        # transitive closure over composition for the remaining pairs
        changed = True
        while changed:
            changed = False
            for a, b in itertools.permutations(self.charts, 2):
                if (a, b) in self.mutations:
                    continue
                for mid in self.charts:
                    first = self.mutations.get((a, mid))
                    second = self.mutations.get((mid, b))
                    if first is not None and second is not None:
                        self.mutations[(a, b)] = second.compose(first)
                        self.mutations.setdefault(
                            (b, a), self.mutations[(a, b)].inverse_map()
                        )
                        changed = True
                        break
        for a, b in itertools.permutations(self.charts, 2):
            if (a, b) not in self.mutations:
                raise UnknownChart(f"no mutation path from {a} to {b}")

    def mutation(self, a, b) -> PLMap:
        try:
            return self.mutations[(a, b)]
        except KeyError:
            raise UnknownChart(f"({a}, {b})") from None

    def chart_index(self, label) -> int:
        try:
            return self.charts.index(label)
        except ValueError:
            raise UnknownChart(str(label)) from None

    # -- elements ----------------------------------------------------------

    def element(self, base_coords: Sequence) -> "Element":
        coords = tuple(base_coords)
        ints = as_int_vec(coords)
        return Element(self, ints if ints is not None else tuple(Fraction(c) for c in coords))

    def zero(self) -> "Element":
        return self.element((0,) * self.rank)

    def chart_coords(self, e: "Element", label):
        key = (e.coords, label)
        hit = self._chart_cache.get(key)
        if hit is None:
            out = self.mutation(self.base, label).apply(e.coords)
            ints = as_int_vec(out)
            hit = ints if ints is not None else tuple(Fraction(c) for c in out)
            self._chart_cache[key] = hit
        return hit

    def from_chart(self, label, coords: Sequence) -> "Element":
        base = self.mutation(label, self.base).apply(tuple(coords))
        return self.element(base)

    def box_elements(self, radius: int):
        """All elements with base-chart coordinates in ``[-radius, radius]``."""
        rng = range(-radius, radius + 1)
        return [self.element(v) for v in itertools.product(rng, repeat=self.rank)]

    # -- the lattice fan ---------------------------------------------------

    def fan(self) -> PLFan:
        if self._fan is None:
            self._fan = self._compute_fan()
        return self._fan

    def _compute_fan(self) -> PLFan:
        fans = [self.mutation(self.base, b).fan() for b in self.charts]
        cells = common_refinement(fans).maximal
        groups: dict = {}
        for cell in cells:
            x = cell.interior_point()
            pattern = tuple(
                (b, self.mutation(self.base, b).matrix_at(x)) for b in self.charts
            )
            groups.setdefault(pattern, []).append(cell)
        merged = []
        for pattern, members in groups.items():
            foreign = [c for c in cells if c not in members]
            for cone in _merge_cells(self.rank, members, foreign):
                merged.append((cone, pattern))
        merged.sort(key=lambda cp: cp[0].ineqs)
        plcones = []
        for cone, pattern in merged:
            images = []
            inverses = []
            for b, m in pattern:
                minv = inverse(m)
                inverses.append((b, minv))
                images.append((b, cone.transform(minv)))
            plcones.append(PLCone(cone, tuple(pattern), tuple(inverses), tuple(images)))
        return PLFan(tuple(plcones))

    def cone_generators(self, cone: RationalCone) -> tuple:
        key = (cone.ineqs, cone.eqs)
        if key not in self._gens_cache:
            self._gens_cache[key] = cone.semigroup_generators()
        return self._gens_cache[key]

    def point_certificate(self) -> "PointCertificate":
        """Finite verification data for the point identity: all generator
        pairs over ordered pairs of maximal fan cones, with their chart sums,
        indexed into one coordinate table."""
        if getattr(self, "_point_cert", None) is None:
            fan = self.fan()
            index: dict = {}
            coords: list = []

            def idx(v: tuple) -> int:
                if v not in index:
                    index[v] = len(coords)
                    coords.append(v)
                return index[v]

            triples = []
            gens = [self.cone_generators(plc.base_cone) for plc in fan.cones]
            for gi, gj in itertools.product(range(len(fan.cones)), repeat=2):
                for g in gens[gi]:
                    for h in gens[gj]:
                        ge, he = self.element(g), self.element(h)
                        sums = tuple(
                            idx(tuple(add_in_chart(ge, he, a).coords)) for a in self.charts
                        )
                        triples.append((idx(g), idx(h), sums))
            gen_indices = [tuple(idx(g) for g in gg) for gg in gens]
            import numpy as np

            cert = PointCertificate(tuple(coords), tuple(triples), tuple(gen_indices))
            object.__setattr__(cert, "np_coords", np.array(coords, dtype=np.int64))
            object.__setattr__(cert, "np_ig", np.array([t[0] for t in triples], dtype=np.intp))
            object.__setattr__(cert, "np_ih", np.array([t[1] for t in triples], dtype=np.intp))
            object.__setattr__(cert, "np_sums", np.array([t[2] for t in triples], dtype=np.intp))
            self._point_cert = cert
        return self._point_cert

    def __repr__(self):
        return f"<PolyptychLattice {self.name} rank={self.rank} charts={list(self.charts)}>"


def _merge_cells(dim, members, others):
    """Merge refinement cells carrying the same linearity pattern into one
    cone when their union is one.  The candidate keeps the inequalities valid
    on every member and is accepted iff it does not leak into foreign cells;
    if the union is not convex the cells are kept separate."""
    if len(members) == 1:
        return [members[0]]
    all_ineqs = {g for c in members for g in c.ineqs}
    kept = []
    for g in all_ineqs:
        neg = tuple(-x for x in g)
        if all(strict_feasible([neg], c) is None for c in members):
            kept.append(g)
    candidate = RationalCone.make(dim, kept).without_redundant()
    for other in others:
        if candidate.intersect(other).is_full_dim():
            return list(members)
    return [candidate]


@dataclass(frozen=True, eq=False)
class Element:
    """Lattice element stored by its base-chart coordinates.

    Integer coordinates are the lattice points proper; rational coordinates
    appear as vertices of polytopes and in hull computations.
    """

    lattice: PolyptychLattice
    coords: tuple

    def __eq__(self, other):
        return (
            isinstance(other, Element)
            and self.lattice is other.lattice
            and self.coords == other.coords
        )

    def __hash__(self):
        return hash((id(self.lattice), self.coords))

    def __repr__(self):
        return f"El{self.coords}"

    def chart(self, label):
        return self.lattice.chart_coords(self, label)

    def is_integral(self) -> bool:
        return as_int_vec(self.coords) is not None

    def sort_key(self):
        return tuple(Fraction(c) for c in self.coords)


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------


def chart(e: Element, label):
    """Coordinates of an element in the requested chart."""
    return e.chart(label)


def add_in_chart(e: Element, f: Element, label) -> Element:
    """Chart-``label`` sum: transport both to the chart, add, come back."""
    if e.lattice is not f.lattice:
        raise DimensionMismatch("elements from different lattices")
    lat = e.lattice
    s = vadd(e.chart(label), f.chart(label))
    return lat.from_chart(label, s)


def upsilon(e: Element, f: Element) -> list[Element]:
    """All chart sums of a pair, deduplicated, in base-coordinate order."""
    lat = e.lattice
    out = {add_in_chart(e, f, a) for a in lat.charts}
    return sorted(out, key=Element.sort_key)


def scale(e: Element, lam, check: bool = False) -> Element:
    """Dilation by a nonnegative scalar (chart-independent)."""
    if lam < 0:
        raise NegativeScalar(f"scale by {lam}")
    lat = e.lattice
    out = lat.element(tuple(lam * c for c in e.coords))
    if check:
        for a in lat.charts:
            assert out.chart(a) == tuple(lam * c for c in e.chart(a))
    return out


def validate_lattice(lat: PolyptychLattice) -> "LatticeReport":
    """Exact check of the identity, inverse, and cocycle axioms, cone by cone
    on the common refinement of the mutation fans."""
    failures = []
    for a in lat.charts:
        bad = lat.mutation(a, a).mismatch_against(PLMap.identity_map(lat.rank))
        if bad is not None:
            failures.append(("identity", (a,), bad))
    for a, b in itertools.permutations(lat.charts, 2):
        comp = lat.mutation(b, a).compose(lat.mutation(a, b))
        bad = comp.mismatch_against(PLMap.identity_map(lat.rank))
        if bad is not None:
            failures.append(("inverse", (a, b), bad))
    for a, b, c in itertools.product(lat.charts, repeat=3):
        comp = lat.mutation(b, c).compose(lat.mutation(a, b))
        bad = comp.mismatch_against(lat.mutation(a, c))
        if bad is not None:
            failures.append(("cocycle", (a, b, c), bad))
    for (a, b), m in sorted(lat.mutations.items(), key=lambda kv: str(kv[0])):
        if not m.validate_continuity():
            failures.append(("continuity", (a, b), None))
        if not m.fan().is_complete():
            failures.append(("completeness", (a, b), None))
        for cone, mm in m.pieces:
            if inverse(mm) is None:
                failures.append(("invertibility", (a, b), cone))
    return LatticeReport(tuple(failures))


@dataclass(frozen=True)
class LatticeReport:
    failures: tuple

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self):
        return {
            "ok": self.ok,
            "failures": [
                {
                    "axiom": kind,
                    "charts": [str(c) for c in charts],
                    "cone": list(map(list, cone.ineqs)) if cone is not None else None,
                }
                for kind, charts, cone in self.failures
            ],
        }


def pl_fan(lat: PolyptychLattice) -> PLFan:
    """The minimal complete fan on which every mutation is linear."""
    return lat.fan()


def product_lattice(l1: PolyptychLattice, l2: PolyptychLattice) -> PolyptychLattice:
    """Direct product: charts are pairs, mutations act blockwise."""
    rank = l1.rank + l2.rank
    charts = [(a, b) for a in l1.charts for b in l2.charts]
    mutations = {}
    for (a1, b1) in charts:
        for (a2, b2) in charts:
            m1 = l1.mutation(a1, a2)
            m2 = l2.mutation(b1, b2)
            pieces = []
            for c1, mm1 in m1.pieces:
                for c2, mm2 in m2.pieces:
                    ineqs = [tuple(g) + (0,) * l2.rank for g in c1.ineqs]
                    ineqs += [(0,) * l1.rank + tuple(g) for g in c2.ineqs]
                    cone = RationalCone.make(rank, ineqs)
                    block = [tuple(r) + (0,) * l2.rank for r in mm1]
                    block += [(0,) * l1.rank + tuple(r) for r in mm2]
                    pieces.append((cone, block))
            mutations[((a1, b1), (a2, b2))] = PLMap.make(rank, pieces)
    return PolyptychLattice(rank, charts, mutations, name=f"{l1.name}x{l2.name}")
