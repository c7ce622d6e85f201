"""Exact rational polyhedral primitives.

H-polyhedra, classical polytopes, rational cones and fans, strict linear
feasibility by exact simplex, min-of-linear expressions with their unique
minimal representations, lattice-point scans, and total unimodularity.

All computations are over the rationals; no tolerances appear anywhere.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .errors import DimensionMismatch, IncompatibleFans, TieError, UnboundedError
from .linalg import (
    Vec,
    as_int_vec,
    det,
    dot,
    inverse,
    is_zero_vec,
    mat,
    primitive,
    rank,
    solve,
    vadd,
    vneg,
    vsub,
)

LinFunctional = tuple  # coefficient vector; evaluation is the inner product


# ---------------------------------------------------------------------------
# Exact simplex
# ---------------------------------------------------------------------------


def _simplex_max(tableau: list[list[Fraction]], basis: list[int], ncols: int) -> bool:
    """Maximize over a standard tableau in place, Bland's rule.

    ``tableau`` holds constraint rows ``[a_1 ... a_n | b]`` with the
    objective last, kept in reduced form with positive coefficients meaning
    "entering improves".  Returns False when the objective is unbounded.
    """
    m = len(tableau) - 1
    while True:
        obj = tableau[m]
        enter = next((j for j in range(ncols) if obj[j] > 0), None)
        if enter is None:
            return True
        row = None
        best_ratio = None
        for i in range(m):
            a = tableau[i][enter]
            if a > 0:
                ratio = tableau[i][ncols] / a
                if (
                    best_ratio is None
                    or ratio < best_ratio
                    or (ratio == best_ratio and basis[i] < basis[row])
                ):
                    best_ratio = ratio
                    row = i
        if row is None:
            return False
        piv = tableau[row][enter]
        tableau[row] = [x / piv for x in tableau[row]]
        for i in range(m + 1):
            if i != row and tableau[i][enter] != 0:
                f = tableau[i][enter]
                tableau[i] = [x - f * y for x, y in zip(tableau[i], tableau[row])]
        basis[row] = enter


def strict_feasible(
    stricts: Sequence[Sequence],
    domain: "RationalCone",
    weaks: Sequence[Sequence] = (),
) -> Optional[Vec]:
    """Search for ``x`` in ``domain`` with ``g(x) > 0`` for every strict
    functional and ``h(x) >= 0`` for every weak one.

    All constraints are homogeneous, so strictness reduces to maximizing a
    slack ``d`` subject to ``g(x) >= d`` and the cap ``d <= 1``; a positive
    optimum certifies a witness, which is returned.  None when infeasible.
    """
    dim = domain.dim
    strict_rows = []
    for g in stricts:
        if len(g) != dim:
            raise DimensionMismatch(f"functional of length {len(g)} in dimension {dim}")
        strict_rows.append(tuple(Fraction(c) for c in g))
    weak_rows = []
    for h in list(weaks) + list(domain.ineqs):
        if len(h) != dim:
            raise DimensionMismatch(f"functional of length {len(h)} in dimension {dim}")
        weak_rows.append(tuple(Fraction(c) for c in h))
    for e in domain.eqs:
        weak_rows.append(tuple(Fraction(c) for c in e))
        weak_rows.append(tuple(-Fraction(c) for c in e))
    if not strict_rows:
        return tuple(Fraction(0) for _ in range(dim))

    # variables: x+ (dim), x- (dim), delta, one slack per constraint row
    nstruct = 2 * dim + 1
    nrows = len(strict_rows) + len(weak_rows) + 1
    ncols = nstruct + nrows
    rows: list[list[Fraction]] = []

    def constraint(g, with_delta: bool):
        # -g.x + [delta] + slack = 0, i.e. slack = g.x - [delta] >= 0
        row = [Fraction(0)] * (ncols + 1)
        for j, c in enumerate(g):
            row[j] = -c
            row[dim + j] = c
        if with_delta:
            row[2 * dim] = Fraction(1)
        row[nstruct + len(rows)] = Fraction(1)
        return row

    for g in strict_rows:
        rows.append(constraint(g, True))
    for h in weak_rows:
        rows.append(constraint(h, False))
    cap = [Fraction(0)] * (ncols + 1)
    cap[2 * dim] = Fraction(1)
    cap[nstruct + len(rows)] = Fraction(1)
    cap[ncols] = Fraction(1)
    rows.append(cap)

    obj = [Fraction(0)] * (ncols + 1)
    obj[2 * dim] = Fraction(1)
    tableau = rows + [obj]
    basis = [nstruct + i for i in range(nrows)]
    _simplex_max(tableau, basis, ncols)

    xplus = [Fraction(0)] * dim
    xminus = [Fraction(0)] * dim
    dval = Fraction(0)
    for i, bi in enumerate(basis):
        val = tableau[i][ncols]
        if bi < dim:
            xplus[bi] = val
        elif bi < 2 * dim:
            xminus[bi - dim] = val
        elif bi == 2 * dim:
            dval = val
    if dval <= 0:
        return None
    return tuple(p - m for p, m in zip(xplus, xminus))


# ---------------------------------------------------------------------------
# Cones and fans
# ---------------------------------------------------------------------------


class ConeGeneratorError(Exception):
    """The box certificate for semigroup generators failed."""


@dataclass(frozen=True)
class RationalCone:
    """Polyhedral cone ``{x : g.x >= 0 for g in ineqs, e.x = 0 for e in eqs}``.

    Normals are primitive integer vectors; an empty inequality list denotes
    the whole space.
    """

    dim: int
    ineqs: tuple = ()
    eqs: tuple = ()

    @staticmethod
    def make(dim: int, ineqs: Sequence[Sequence] = (), eqs: Sequence[Sequence] = ()) -> "RationalCone":
        ii = sorted({primitive(g) for g in ineqs if not is_zero_vec(g)})
        ee = sorted({primitive(e) for e in eqs if not is_zero_vec(e)})
        return RationalCone(dim, tuple(ii), tuple(ee))

    @staticmethod
    def whole_space(dim: int) -> "RationalCone":
        return RationalCone(dim, (), ())

    def contains(self, x: Sequence) -> bool:
        return all(dot(g, x) >= 0 for g in self.ineqs) and all(dot(e, x) == 0 for e in self.eqs)

    def contains_interior_limit(self, x0: Sequence, d: Sequence) -> bool:
        """Whether ``x0 - eps*d`` lies in the cone for all small ``eps > 0``."""
        for g in self.ineqs:
            v = dot(g, x0)
            if v < 0 or (v == 0 and dot(g, d) > 0):
                return False
        for e in self.eqs:
            v = dot(e, x0)
            if v != 0 or dot(e, d) != 0:
                return False
        return True

    def is_full_dim(self) -> bool:
        if self.eqs:
            return False
        return self.interior_point() is not None

    def interior_point(self) -> Optional[Vec]:
        if self.eqs:
            return None
        if not self.ineqs:
            if self.dim == 0:
                return ()
            return tuple([1] + [0] * (self.dim - 1))
        return strict_feasible(self.ineqs, RationalCone.whole_space(self.dim))

    def intersect(self, other: "RationalCone") -> "RationalCone":
        if self.dim != other.dim:
            raise DimensionMismatch("cone dimensions differ")
        return RationalCone.make(self.dim, self.ineqs + other.ineqs, self.eqs + other.eqs)

    def transform(self, minv: Sequence[Sequence]) -> "RationalCone":
        """Image of the cone under the invertible map whose inverse matrix is
        ``minv``: inequality ``g`` becomes ``g o minv``."""
        cols = list(zip(*minv))
        new_ineqs = [tuple(dot(g, col) for col in cols) for g in self.ineqs]
        new_eqs = [tuple(dot(e, col) for col in cols) for e in self.eqs]
        return RationalCone.make(self.dim, new_ineqs, new_eqs)

    def is_subset_of(self, other: "RationalCone") -> bool:
        for g in other.ineqs:
            if strict_feasible([vneg(g)], self) is not None:
                return False
        for e in other.eqs:
            if strict_feasible([e], self) is not None:
                return False
            if strict_feasible([vneg(e)], self) is not None:
                return False
        return True

    def same_cone(self, other: "RationalCone") -> bool:
        return self.is_subset_of(other) and other.is_subset_of(self)

    def without_redundant(self) -> "RationalCone":
        kept = list(self.ineqs)
        changed = True
        while changed:
            changed = False
            for g in list(kept):
                rest = [h for h in kept if h != g]
                sub = RationalCone(self.dim, tuple(rest), self.eqs)
                if strict_feasible([vneg(g)], sub) is None:
                    kept = rest
                    changed = True
                    break
        return RationalCone(self.dim, tuple(sorted(kept)), self.eqs)

    def lineality_basis(self) -> list:
        from .linalg import nullspace

        rows = list(self.ineqs) + list(self.eqs)
        return nullspace(rows, self.dim)

    def rays(self) -> list:
        """Primitive generators of the one-dimensional faces (modulo the
        lineality space), by brute force over inequality subsets."""
        from .linalg import nullspace

        lin = self.lineality_basis()
        lin_set = set(lin) | {vneg(v) for v in lin}
        out = []
        base = list(self.eqs)
        max_pick = self.dim - 1 - len(base)
        for k in range(0, max(0, max_pick) + 1):
            for subset in itertools.combinations(self.ineqs, k):
                rows = base + list(subset)
                kern = nullspace(rows, self.dim)
                if len(kern) != 1 + len(lin):
                    continue
                for cand in kern:
                    for v in (cand, vneg(cand)):
                        if v in lin_set or is_zero_vec(v):
                            continue
                        if self.contains(v) and v not in out:
                            # must be an actual face direction: all active
                            # inequalities at v already hold with equality
                            out.append(v)
        return sorted(set(out))

    def semigroup_generators(self, validate_radius: int = 2) -> tuple:
        """Integer generators of the cone's lattice points.

        Takes all nonzero ``{-1,0,1}`` vectors in the cone and certifies that
        (a) they positively span the cone (every ray and lineality direction
        is a nonnegative combination) and (b) by breadth-first search, that
        they generate every cone lattice point in the validation box.  The
        cones used throughout have unimodular-type normals, for which these
        short vectors contain the Hilbert basis.
        """
        gens = tuple(
            v
            for v in itertools.product((-1, 0, 1), repeat=self.dim)
            if not is_zero_vec(v) and self.contains(v)
        )
        directions = list(self.rays())
        for l in self.lineality_basis():
            directions.extend((l, vneg(l)))
        for dvec in directions:
            if not nonneg_combination(gens, dvec):
                raise ConeGeneratorError(f"short vectors do not span direction {dvec}")
        r = validate_radius
        reach = {tuple([0] * self.dim)}
        frontier = list(reach)
        while frontier:
            nxt = []
            for p in frontier:
                for g in gens:
                    q = vadd(p, g)
                    if q not in reach and all(abs(c) <= r for c in q) and self.contains(q):
                        reach.add(q)
                        nxt.append(q)
            frontier = nxt
        for v in itertools.product(range(-r, r + 1), repeat=self.dim):
            if self.contains(v) and v not in reach:
                raise ConeGeneratorError(f"short vectors do not generate {v}")
        return gens

    def dominates_on(self, f: Sequence, g: Sequence, gens: Sequence) -> bool:
        """Whether ``f <= g`` everywhere on the cone, certified on positive
        spanning generators."""
        return all(dot(g, x) - dot(f, x) >= 0 for x in gens)


@dataclass(frozen=True)
class ClassicalFan:
    """Complete fan recorded by its maximal (full-dimensional) cones."""

    dim: int
    maximal: tuple

    @staticmethod
    def make(dim: int, cones: Sequence[RationalCone]) -> "ClassicalFan":
        return ClassicalFan(dim, tuple(cones))

    def find(self, x: Sequence) -> Optional[RationalCone]:
        for c in self.maximal:
            if c.contains(x):
                return c
        return None

    def is_complete(self) -> bool:
        """Every facet of every maximal cone must be locally covered from the
        outside by another maximal cone."""
        for c in self.maximal:
            pruned = c.without_redundant()
            for g in pruned.ineqs:
                others = [h for h in pruned.ineqs if h != g]
                facet = RationalCone.make(self.dim, (), list(pruned.eqs) + [g])
                if others:
                    x0 = strict_feasible(others, facet)
                else:
                    x0 = _nonzero_on_hyperplane(g, self.dim)
                if x0 is None:
                    continue  # empty facet
                if not any(
                    other is not c and other.contains_interior_limit(x0, g)
                    for other in self.maximal
                ):
                    return False
        return True


def _nonzero_on_hyperplane(g: Sequence, dim: int) -> Optional[Vec]:
    j = next((i for i, c in enumerate(g) if c != 0), None)
    if j is None:
        return None
    for i in range(dim):
        if i != j:
            x = [0] * dim
            x[i] = g[j]
            x[j] = -g[i]
            if not is_zero_vec(x):
                return tuple(x)
    return None


def common_refinement(fans: Sequence[ClassicalFan]) -> ClassicalFan:
    """Common refinement of complete fans: the full-dimensional intersections
    of one maximal cone from each."""
    if not fans:
        raise IncompatibleFans("no fans given")
    dim = fans[0].dim
    if any(f.dim != dim for f in fans):
        raise IncompatibleFans("ambient dimensions differ")
    cells = [RationalCone.whole_space(dim)]
    for f in fans:
        nxt = []
        for cell in cells:
            for c in f.maximal:
                inter = cell.intersect(c)
                if inter.is_full_dim():
                    nxt.append(inter)
        cells = nxt
    out: list[RationalCone] = []
    for c in cells:
        c = c.without_redundant()
        if not any(c.same_cone(o) for o in out):
            out.append(c)
    out.sort(key=lambda c: c.ineqs)
    return ClassicalFan.make(dim, out)


# ---------------------------------------------------------------------------
# H-polyhedra and classical polytopes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HPolyhedron:
    """``{x : n.x >= a for (n, a) in ineqs, e.x = b for (e, b) in eqs}``."""

    dim: int
    ineqs: tuple = ()
    eqs: tuple = ()

    @staticmethod
    def make(dim: int, ineqs: Sequence = (), eqs: Sequence = ()) -> "HPolyhedron":
        def norm(pairs):
            out = []
            for n, a in pairs:
                if len(n) != dim:
                    raise DimensionMismatch(f"normal of length {len(n)} in dimension {dim}")
                out.append((tuple(n), a))
            return tuple(sorted(set(out)))

        return HPolyhedron(dim, norm(ineqs), norm(eqs))

    def contains(self, x: Sequence) -> bool:
        return all(dot(n, x) >= a for n, a in self.ineqs) and all(
            dot(e, x) == b for e, b in self.eqs
        )

    def recession_cone(self) -> RationalCone:
        return RationalCone.make(self.dim, [n for n, _ in self.ineqs], [e for e, _ in self.eqs])


def hrep_feasible(p: HPolyhedron) -> bool:
    """Whether the polyhedron is nonempty (exact phase-1 feasibility)."""
    dim = p.dim
    nslack = len(p.ineqs)
    rows = []
    for k, (n, a) in enumerate(p.ineqs):
        row = [Fraction(c) for c in n] + [-Fraction(c) for c in n]
        row += [Fraction(-1) if i == k else Fraction(0) for i in range(nslack)]
        row.append(Fraction(a))
        rows.append(row)
    for e, b in p.eqs:
        row = [Fraction(c) for c in e] + [-Fraction(c) for c in e]
        row += [Fraction(0)] * nslack
        row.append(Fraction(b))
        rows.append(row)
    return _eq_feasible(rows, 2 * dim + nslack)


def is_bounded(p: HPolyhedron) -> bool:
    """Bounded iff the recession cone is the origin; thresholds play no role."""
    rc = p.recession_cone()
    for i in range(p.dim):
        for sign in (1, -1):
            probe = [0] * p.dim
            probe[i] = sign
            if strict_feasible([tuple(probe)], rc) is not None:
                return False
    return True


def solve_vertices(p: HPolyhedron) -> list[Vec]:
    """Exact extreme points of a bounded H-polyhedron.

    Brute force over dimension-sized subsets of active constraints; fine at
    the instance sizes used here (<= ~16 facets, dimension <= ~6).
    """
    if not is_bounded(p):
        raise UnboundedError("polyhedron is unbounded")
    eq_norms = [e for e, _ in p.eqs]
    eq_rhs = [b for _, b in p.eqs]
    base_rank = rank(eq_norms) if eq_norms else 0
    need = p.dim - base_rank
    candidates: set[Vec] = set()
    for subset in itertools.combinations(p.ineqs, need):
        rows = eq_norms + [n for n, _ in subset]
        rhs = eq_rhs + [a for _, a in subset]
        if rank(rows) < p.dim:
            continue
        x = _solve_affine(rows, rhs, p.dim)
        if x is not None and p.contains(x):
            candidates.add(x)
    verts = []
    for x in candidates:
        active = [n for n, a in p.ineqs if dot(n, x) == a] + eq_norms
        if rank(active) == p.dim:
            verts.append(x)
    verts.sort()
    return verts


def _solve_affine(rows, rhs, dim) -> Optional[Vec]:
    # rows may be overdetermined of full column rank; take a row basis
    idx = []
    for i in range(len(rows)):
        if rank([rows[j] for j in idx + [i]]) > len(idx):
            idx.append(i)
        if len(idx) == dim:
            break
    if len(idx) < dim:
        return None
    x = solve([rows[i] for i in idx], [rhs[i] for i in idx])
    if x is None:
        return None
    if all(dot(rows[i], x) == rhs[i] for i in range(len(rows))):
        return x
    return None


@dataclass(frozen=True)
class ClassicalPolytope:
    """Bounded polyhedron carrying both representations.

    Vertices are computed from the H-representation on construction and
    cross-checked for feasibility; ``contains`` uses the H-rep.
    """

    hrep: HPolyhedron
    vertices: tuple

    @staticmethod
    def from_hrep(p: HPolyhedron) -> "ClassicalPolytope":
        verts = solve_vertices(p)
        assert all(p.contains(v) for v in verts)
        return ClassicalPolytope(p, tuple(verts))

    @property
    def dim(self) -> int:
        return self.hrep.dim

    def is_empty(self) -> bool:
        return not self.vertices

    def contains(self, x: Sequence) -> bool:
        return self.hrep.contains(x)

    def is_integral(self) -> bool:
        return all(as_int_vec(v) is not None for v in self.vertices)

    def bounding_box(self):
        if not self.vertices:
            return None
        lo = [min(Fraction(v[i]) for v in self.vertices) for i in range(self.dim)]
        hi = [max(Fraction(v[i]) for v in self.vertices) for i in range(self.dim)]
        return lo, hi


def lattice_points(p: ClassicalPolytope) -> list[tuple[int, ...]]:
    """All integer points, by bounding-box scan with exact membership, in
    lexicographic order."""
    box = p.bounding_box()
    if box is None:
        return []
    lo, hi = box
    ranges = [range(math.ceil(l), math.floor(h) + 1) for l, h in zip(lo, hi)]
    return [pt for pt in itertools.product(*ranges) if p.contains(pt)]


def conv_contains(vertices: Sequence[Sequence], x: Sequence) -> bool:
    """Exact membership of ``x`` in the convex hull of ``vertices``."""
    if not vertices:
        return False
    dim = len(x)
    n = len(vertices)
    rows = []
    for i in range(dim):
        rows.append([Fraction(v[i]) for v in vertices] + [Fraction(x[i])])
    rows.append([Fraction(1)] * n + [Fraction(1)])
    return _eq_feasible(rows, n)


def nonneg_combination(generators: Sequence[Sequence], x: Sequence) -> bool:
    """Whether ``x`` is a nonnegative combination of the generators."""
    if not generators:
        return is_zero_vec(x)
    dim = len(x)
    rows = []
    for i in range(dim):
        rows.append([Fraction(g[i]) for g in generators] + [Fraction(x[i])])
    return _eq_feasible(rows, len(generators))


def _eq_feasible(rows: list[list[Fraction]], nvars: int) -> bool:
    """Feasibility of ``A z = b, z >= 0`` given rows ``[A | b]`` (phase 1)."""
    m = len(rows)
    work = []
    for r in rows:
        if r[nvars] < 0:
            r = [-x for x in r]
        work.append(list(r[:nvars]) + [Fraction(0)] * m + [r[nvars]])
    for i in range(m):
        work[i][nvars + i] = Fraction(1)
    # maximize minus the sum of artificials, written in reduced form
    obj = [Fraction(0)] * (nvars + m + 1)
    for i in range(m):
        for j in range(nvars + m + 1):
            obj[j] += work[i][j]
    for i in range(m):
        obj[nvars + i] = Fraction(0)
    tableau = work + [obj]
    basis = [nvars + i for i in range(m)]
    _simplex_max(tableau, basis, nvars + m)
    artificial_total = sum(tableau[i][nvars + m] for i in range(m) if basis[i] >= nvars)
    return artificial_total == 0


# ---------------------------------------------------------------------------
# Min-of-linear expressions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TropExpr:
    """Pointwise minimum of finitely many linear functionals."""

    dim: int
    members: tuple

    @staticmethod
    def make(dim: int, members: Sequence[Sequence]) -> "TropExpr":
        ms = sorted({tuple(m) for m in members})
        if not ms:
            raise ValueError("TropExpr needs at least one functional")
        for m in ms:
            if len(m) != dim:
                raise DimensionMismatch("functional dimension mismatch")
        return TropExpr(dim, tuple(ms))

    def __call__(self, x: Sequence):
        return min(dot(m, x) for m in self.members)


def minimal_min_representation(e: TropExpr, domain: RationalCone) -> TropExpr:
    """Unique essential subset on a full-dimensional domain: a functional is
    kept iff it is the strict minimum somewhere in the domain."""
    members = list(dict.fromkeys(e.members))
    if len(members) == 1:
        return TropExpr.make(e.dim, members)
    kept = []
    for f in members:
        others = [vsub(g, f) for g in members if g != f]
        if strict_feasible(others, domain) is not None:
            kept.append(f)
    if not kept:
        # possible only on non-full-dimensional domains, which callers exclude
        kept = members
    return TropExpr.make(e.dim, kept)


def lex_min_member(
    e: TropExpr, basis: Sequence[Sequence], check_minimal: bool = False
) -> LinFunctional:
    """Member whose evaluation tuple against ``basis`` is lexicographically
    minimal.  Ties between distinct members are an error (deduplicate first)."""
    if rank(basis) < e.dim:
        raise DimensionMismatch("basis does not span the ambient space")
    members = list(e.members)
    keyed = sorted(((tuple(dot(m, b) for b in basis), i) for i, m in enumerate(members)))
    if len(keyed) > 1 and keyed[0][0] == keyed[1][0]:
        raise TieError(f"two members share the lex-min tuple {keyed[0][0]}")
    keyed = [(k, members[i]) for k, i in keyed]
    best = keyed[0][1]
    if check_minimal:
        cone = RationalCone.make(e.dim, simplicial_cone_ineqs(basis))
        mm = minimal_min_representation(e, cone)
        assert best in mm.members, "lex-min member missing from the minimal representation"
    return best


def simplicial_cone_ineqs(basis: Sequence[Sequence]) -> list[Vec]:
    """H-representation of the cone of nonnegative combinations of a basis."""
    inv = inverse(mat(basis))
    assert inv is not None, "basis is singular"
    return [tuple(col) for col in zip(*inv)]


# ---------------------------------------------------------------------------
# Total unimodularity
# ---------------------------------------------------------------------------


def is_totally_unimodular(a: Sequence[Sequence]) -> bool:
    """Every square minor in {-1, 0, 1}, by exhaustive minor enumeration."""
    rows = [tuple(r) for r in a]
    if not rows:
        return True
    ncols = len(rows[0])
    for r in rows:
        for x in r:
            if x not in (-1, 0, 1):
                return False
    for k in range(2, min(len(rows), ncols) + 1):
        for ri in itertools.combinations(range(len(rows)), k):
            sub = [rows[i] for i in ri]
            for ci in itertools.combinations(range(ncols), k):
                minor = [[sub[i][j] for j in ci] for i in range(k)]
                if det(minor) not in (-1, 0, 1):
                    return False
    return True
