import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from plyp.errors import TieError, UnboundedError
from plyp.polyhedra import (
    ClassicalPolytope,
    ClassicalFan,
    HPolyhedron,
    RationalCone,
    TropExpr,
    common_refinement,
    conv_contains,
    is_bounded,
    is_totally_unimodular,
    lattice_points,
    lex_min_member,
    minimal_min_representation,
    solve_vertices,
    strict_feasible,
)
from plyp.families import mdr_tu_matrix


def box_hrep(lo, hi):
    dim = len(lo)
    ineqs = []
    for i in range(dim):
        e = [0] * dim
        e[i] = 1
        ineqs.append((tuple(e), lo[i]))
        ineqs.append((tuple(-x for x in e), -hi[i]))
    return HPolyhedron.make(dim, ineqs)


# a1 chart-1 image facets of the running polytope, written out directly
A1_CHART1 = HPolyhedron.make(
    2, [((-1, 0), -1), ((-1, 1), -1), ((0, 1), -1), ((1, -1), -1)]
)
A1_CHART2 = HPolyhedron.make(
    2, [((1, 0), -1), ((0, 1), -1), ((-1, -1), -1), ((-1, 0), -1)]
)


class TestSolveVertices:
    def test_unit_square(self):
        p = box_hrep((0, 0), (1, 1))
        assert solve_vertices(p) == [(0, 0), (0, 1), (1, 0), (1, 1)]

    def test_chart1_image(self):
        assert set(solve_vertices(A1_CHART1)) == {(-2, -1), (0, -1), (1, 0), (1, 2)}

    def test_chart2_image(self):
        assert set(solve_vertices(A1_CHART2)) == {(-1, -1), (1, -1), (1, 0), (-1, 2)}

    def test_unbounded_raises(self):
        p = HPolyhedron.make(1, [((1,), 0)])
        with pytest.raises(UnboundedError):
            solve_vertices(p)


class TestIsBounded:
    def test_segment(self):
        assert is_bounded(HPolyhedron.make(1, [((1,), -1), ((-1,), -1)]))

    def test_ray(self):
        assert not is_bounded(HPolyhedron.make(1, [((1,), 0)]))

    def test_same_normals_other_thresholds(self):
        assert is_bounded(HPolyhedron.make(1, [((1,), -7), ((-1,), -7)]))

    @settings(max_examples=120, deadline=None)
    @given(st.data())
    def test_threshold_invariance(self, data):
        dim = data.draw(st.integers(1, 3))
        lo = [data.draw(st.integers(-3, 0)) for _ in range(dim)]
        hi = [l + data.draw(st.integers(0, 4)) for l in lo]
        extra = [
            tuple(data.draw(st.integers(-2, 2)) for _ in range(dim))
            for _ in range(data.draw(st.integers(0, 3)))
        ]
        p = box_hrep(lo, hi)
        ineqs = list(p.ineqs) + [(g, data.draw(st.integers(-3, 3))) for g in extra if any(g)]
        p = HPolyhedron.make(dim, ineqs)
        assert is_bounded(p)
        shifted = HPolyhedron.make(
            dim, [(n, data.draw(st.integers(-5, 5))) for n, _ in p.ineqs]
        )
        assert is_bounded(shifted)

    def test_vertex_hull_roundtrip(self):
        rng = random.Random(5)
        for _ in range(25):
            dim = rng.choice((2, 3))
            lo = [rng.randint(-2, 0) for _ in range(dim)]
            hi = [l + rng.randint(0, 3) for l in lo]
            ineqs = list(box_hrep(lo, hi).ineqs)
            for _ in range(rng.randint(0, 2)):
                g = tuple(rng.randint(-2, 2) for _ in range(dim))
                if any(g):
                    ineqs.append((g, rng.randint(-4, 0)))
            p = HPolyhedron.make(dim, ineqs)
            poly = ClassicalPolytope.from_hrep(p)
            for pt in lattice_points(ClassicalPolytope.from_hrep(box_hrep(lo, hi))):
                assert p.contains(pt) == conv_contains(poly.vertices, pt)


class TestStrictFeasible:
    def test_positive_axis(self):
        dom = RationalCone.make(1, [(1,)])
        x = strict_feasible([(1,)], dom)
        assert x is not None and x[0] > 0

    def test_contradictory(self):
        dom = RationalCone.whole_space(1)
        assert strict_feasible([(1,), (-1,)], dom) is None

    def test_min_dips_below_sum_on_orthant(self):
        dom = RationalCone.make(2, [(1, 0), (0, 1)])
        # x+y > x and x+y > y, i.e. y > 0 and x > 0
        x = strict_feasible([(0, 1), (1, 0)], dom)
        assert x is not None
        assert x[0] > 0 and x[1] > 0


class TestMinimalMinRepresentation:
    def test_drops_dominated(self):
        dom = RationalCone.make(2, [(1, 0), (0, 1)])
        e = TropExpr.make(2, [(1, 0), (0, 1), (1, 1)])
        assert minimal_min_representation(e, dom).members == ((0, 1), (1, 0))

    def test_singleton(self):
        dom = RationalCone.make(2, [(1, 0), (0, 1)])
        e = TropExpr.make(2, [(1, 0)])
        assert minimal_min_representation(e, dom).members == ((1, 0),)

    def test_duplicates_collapse(self):
        dom = RationalCone.whole_space(1)
        e = TropExpr.make(1, [(1,), (1,)])
        assert minimal_min_representation(e, dom).members == ((1,),)

    def test_idempotent_and_order_independent(self):
        rng = random.Random(11)
        dom = RationalCone.make(2, [(1, 0), (0, 1)])
        for _ in range(40):
            members = [
                (rng.randint(-2, 2), rng.randint(-2, 2)) for _ in range(rng.randint(1, 5))
            ]
            e1 = TropExpr.make(2, members)
            rng.shuffle(members)
            e2 = TropExpr.make(2, members)
            m1 = minimal_min_representation(e1, dom)
            assert minimal_min_representation(m1, dom) == m1
            assert minimal_min_representation(e2, dom) == m1


class TestLexMinMember:
    BASIS2 = ((1, 0), (0, 1))

    def test_prefers_second_axis(self):
        e = TropExpr.make(2, [(1, 0), (0, 1)])
        assert lex_min_member(e, self.BASIS2) == (0, 1)

    def test_singleton(self):
        e = TropExpr.make(2, [(1, 0)])
        assert lex_min_member(e, self.BASIS2) == (1, 0)

    def test_member_of_minimal_representation(self):
        e = TropExpr.make(2, [(1, 0), (0, 1), (1, 1)])
        assert lex_min_member(e, self.BASIS2, check_minimal=True) == (0, 1)

    def test_random_members_survive(self):
        rng = random.Random(7)
        for dim in (2, 3):
            basis = tuple(
                tuple(1 if i == j else 0 for j in range(dim)) for i in range(dim)
            )
            for _ in range(60):
                members = {
                    tuple(rng.randint(-3, 3) for _ in range(dim))
                    for _ in range(rng.randint(1, 6))
                }
                e = TropExpr.make(dim, sorted(members))
                best = lex_min_member(e, basis, check_minimal=True)
                assert best in e.members

    def test_tie_error(self):
        e = TropExpr(2, ((1, 0), (1, 0)))  # bypass dedup deliberately
        with pytest.raises(TieError):
            lex_min_member(TropExpr(2, ((0, 1), (0, 1))), self.BASIS2)


class TestLatticePoints:
    def test_segment(self):
        p = ClassicalPolytope.from_hrep(box_hrep((0,), (2,)))
        assert lattice_points(p) == [(0,), (1,), (2,)]

    def test_chart1_count_is_nine(self):
        # brute-force oracle over the stated box, then the implementation
        oracle = [
            (x, y)
            for x in range(-2, 2)
            for y in range(-1, 3)
            if x <= 1 and y >= x - 1 and y >= -1 and y <= x + 1
        ]
        assert len(oracle) == 9
        p = ClassicalPolytope.from_hrep(A1_CHART1)
        assert lattice_points(p) == sorted(oracle)

    def test_empty(self):
        p = ClassicalPolytope.from_hrep(
            HPolyhedron.make(1, [((1,), 1), ((-1,), 0)])
        )
        assert p.is_empty() and lattice_points(p) == []

    def test_unimodular_invariance(self):
        rng = random.Random(3)
        for _ in range(30):
            dim = 2
            lo = [rng.randint(-2, 0) for _ in range(dim)]
            hi = [l + rng.randint(1, 3) for l in lo]
            p = ClassicalPolytope.from_hrep(box_hrep(lo, hi))
            n = len(lattice_points(p))
            # random small unimodular map: shear compositions
            a = rng.randint(-2, 2)
            b = rng.randint(-2, 2)
            m = ((1, a), (0, 1)) if rng.random() < 0.5 else ((1, 0), (b, 1))
            minv = ((1, -a), (0, 1)) if m[0][1] == a and m[1][0] == 0 else ((1, 0), (-b, 1))
            # transform image: ineq g, threshold stays with g o m^-1
            ineqs = [
                (tuple(sum(g[i] * minv[i][j] for i in range(2)) for j in range(2)), t)
                for g, t in p.hrep.ineqs
            ]
            q = ClassicalPolytope.from_hrep(HPolyhedron.make(2, ineqs))
            assert len(lattice_points(q)) == n


class TestTotallyUnimodular:
    def test_identity(self):
        assert is_totally_unimodular(((1, 0, 0), (0, 1, 0), (0, 0, 1)))

    def test_det_two(self):
        assert not is_totally_unimodular(((1, 1), (-1, 1)))

    def test_entry_out_of_range(self):
        assert not is_totally_unimodular(((2, 0), (0, 1)))

    def test_gf_constraint_matrix(self):
        assert is_totally_unimodular(mdr_tu_matrix(2, 2, 1))
        assert is_totally_unimodular(mdr_tu_matrix(2, 2, 2))


class TestCommonRefinement:
    def test_whole_plane_with_halves(self):
        whole = ClassicalFan.make(2, [RationalCone.whole_space(2)])
        halves = ClassicalFan.make(
            2, [RationalCone.make(2, [(0, 1)]), RationalCone.make(2, [(0, -1)])]
        )
        ref = common_refinement([whole, halves])
        assert sorted(c.ineqs for c in ref.maximal) == [((0, -1),), ((0, 1),)]

    def test_quadrants(self):
        xsplit = ClassicalFan.make(
            2, [RationalCone.make(2, [(1, 0)]), RationalCone.make(2, [(-1, 0)])]
        )
        ysplit = ClassicalFan.make(
            2, [RationalCone.make(2, [(0, 1)]), RationalCone.make(2, [(0, -1)])]
        )
        ref = common_refinement([xsplit, ysplit])
        assert len(ref.maximal) == 4
        assert ref.is_complete()

    def test_self_refinement(self):
        halves = ClassicalFan.make(
            2, [RationalCone.make(2, [(0, 1)]), RationalCone.make(2, [(0, -1)])]
        )
        ref = common_refinement([halves, halves])
        assert sorted(c.ineqs for c in ref.maximal) == sorted(
            c.ineqs for c in halves.maximal
        )
