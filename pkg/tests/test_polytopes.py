import random
from fractions import Fraction

import pytest

from plyp.errors import NotCompact, OriginNotInterior
from plyp.families import mdr_gf_polytope
from plyp.polyhedra import lattice_points
from plyp.polytopes import (
    PLHalfSpace,
    build_polytope,
    dual_polytope,
    is_chart_gorenstein_fano,
    is_integral,
    p_conv,
    pl_lattice_points,
    scale_polytope,
    support_function,
    vertices,
)


class TestBuild:
    def test_running_polytope_images(self, a1):
        P = a1.polytope
        assert set(P.chart_image(1).vertices) == {(-2, -1), (0, -1), (1, 0), (1, 2)}
        assert set(P.chart_image(2).vertices) == {(-1, -1), (1, -1), (1, 0), (-1, 2)}

    def test_single_halfspace_not_compact(self, a1):
        h = PLHalfSpace(a1.point(-1, 0, -1), -1)
        with pytest.raises(NotCompact):
            build_polytope(a1.lattice, [h])

    def test_gf_polytope_compact(self, gf22):
        _, P = gf22
        assert not P.is_empty

    def test_empty_allowed(self, a1):
        # opposite half-spaces with incompatible thresholds
        p = a1.point(0, 1, -1)
        q = a1.point(0, -1, 1)
        poly = build_polytope(a1.lattice, [PLHalfSpace(p, 1), PLHalfSpace(q, 1)])
        assert poly.is_empty


class TestVertices:
    def test_running_vertex_set(self, a1):
        V = vertices(a1.polytope)
        assert [v.coords for v in V] == [(-2, -1), (-1, 0), (0, -1), (1, 0), (1, 2)]

    def test_point_polytope(self, a1):
        zero = scale_polytope(a1.polytope, 0)
        V = vertices(zero)
        assert [v.coords for v in V] == [(0, 0)]

    def test_hull_of_vertices_recovers_polytope(self, a1):
        P = a1.polytope
        _, hull_points = p_conv(a1.lattice, vertices(P))
        assert hull_points == pl_lattice_points(P)


class TestSupportFunction:
    def test_value_at_example(self, a1):
        _, psi = support_function(a1.polytope)
        n = a1.lattice.element((0, 1))
        assert psi(n) == -2

    def test_zero_when_origin_inside(self, a1):
        _, psi = support_function(a1.polytope)
        assert psi(a1.lattice.zero()) == 0

    def test_dilation_scales_evaluator(self, a1):
        rng = random.Random(12)
        _, psi = support_function(a1.polytope)
        for k in (2, 3):
            _, psik = support_function(scale_polytope(a1.polytope, k))
            for _ in range(20):
                n = a1.lattice.element((rng.randint(-3, 3), rng.randint(-3, 3)))
                assert psik(n) == k * psi(n)


class TestDualPolytope:
    # chart-wise half-space functional sets for each vertex of the running
    # polytope, together with threshold -1
    TABLE = {
        (1, 0): {1: {(0, 1)}, 2: {(0, 1)}},
        (1, 2): {1: {(2, 1)}, 2: {(-2, 1), (-2, 3)}},
        (-2, -1): {1: {(-1, -1), (-1, -2)}, 2: {(1, -2)}},
        (-1, 0): {1: {(0, -1)}, 2: {(0, -1)}},
        (0, -1): {1: {(-1, 0), (-1, 1)}, 2: {(1, 0)}},
    }

    def test_halfspace_table_matches(self, a1):
        P = a1.polytope
        for m in vertices(P):
            expected = self.TABLE[m.coords]
            pt = a1.pair.v(m)
            for label in (1, 2):
                assert set(pt.chart_expr(label).members) == expected[label]

    def test_chart_images(self, a1):
        D = dual_polytope(a1.polytope)
        assert set(D.chart_image(1).vertices) == {(0, -1), (1, 0), (-1, 1)}
        assert (Fraction(1, 2), Fraction(0)) in set(D.chart_image(2).vertices)

    def test_integrality_verdicts(self, a1):
        assert is_integral(a1.polytope)
        assert not is_integral(dual_polytope(a1.polytope))

    def test_halfspace_count_and_threshold(self, a1):
        D = dual_polytope(a1.polytope)
        assert len(D.halfspaces) == len(vertices(a1.polytope))
        assert all(h.threshold == -1 for h in D.halfspaces)

    def test_requires_negative_thresholds(self, a1):
        grown = scale_polytope(a1.polytope, 0)
        with pytest.raises(OriginNotInterior):
            dual_polytope(grown)


class TestPConv:
    def test_singleton(self, a1):
        lat = a1.lattice
        m = lat.element((2, -1))
        member, pts = p_conv(lat, [m])
        assert pts == [m]
        assert member(m)
        assert not member(lat.zero())

    def test_vertex_hull_equals_polytope_points(self, a1):
        P = a1.polytope
        _, pts = p_conv(a1.lattice, vertices(P))
        assert pts == pl_lattice_points(P)

    def test_monotone_under_inclusion(self, a1):
        rng = random.Random(21)
        lat = a1.lattice
        for _ in range(10):
            t = [lat.element((rng.randint(-2, 2), rng.randint(-2, 2))) for _ in range(4)]
            s = t[: rng.randint(1, 3)]
            _, ps = p_conv(lat, s)
            _, pt = p_conv(lat, t)
            assert set(ps) <= set(pt)

    def test_dual_vertices_hull(self, a1):
        # the three half-space points of the running polytope pull back to
        # elements whose hull is the dual polytope
        lat = a1.lattice
        S = [a1.pair.v_inv(h.point) for h in a1.polytope.halfspaces]
        assert sorted(m.coords for m in S) == [(-1, 1), (0, -1), (1, 0)]
        _, pts = p_conv(lat, S)
        assert pts == pl_lattice_points(dual_polytope(a1.polytope))


class TestScaleAndCounts:
    def test_scale_one_identity(self, a1):
        P = scale_polytope(a1.polytope, 1)
        assert [h.threshold for h in P.halfspaces] == [-1, -1, -1]

    def test_scale_zero_contains_origin_only(self, a1):
        P = scale_polytope(a1.polytope, 0)
        assert [e.coords for e in pl_lattice_points(P)] == [(0, 0)]

    def test_counts_nondecreasing(self, a1):
        counts = [len(pl_lattice_points(scale_polytope(a1.polytope, k))) for k in range(4)]
        assert counts == sorted(counts)

    def test_cross_chart_counts(self, a1):
        for k in range(4):
            s = scale_polytope(a1.polytope, k)
            per_chart = {
                len(lattice_points(s.chart_image(c))) for c in a1.lattice.charts
            }
            assert len(per_chart) == 1

    def test_chart1_count_oracle(self, a1):
        pts = pl_lattice_points(a1.polytope)
        assert len(pts) == len(lattice_points(a1.polytope.chart_image(1))) == 9


class TestIntegralityAndGF:
    def test_running_polytope(self, a1):
        assert is_integral(a1.polytope)
        assert is_chart_gorenstein_fano(a1.polytope)

    def test_dual_is_not(self, a1):
        assert not is_chart_gorenstein_fano(dual_polytope(a1.polytope))

    @pytest.mark.parametrize("d,r", [(2, 2), (2, 3), (3, 2)])
    def test_gf_family(self, d, r):
        P = mdr_gf_polytope(d, r)
        assert is_integral(P)
        assert is_chart_gorenstein_fano(P)

    def test_rescaled_representation_accepted(self, a1):
        # double all thresholds and double the points: still reflexive-type
        hs = [
            PLHalfSpace(h.point.scaled(2), 2 * h.threshold) for h in a1.polytope.halfspaces
        ]
        doubled = build_polytope(a1.lattice, hs)
        assert is_chart_gorenstein_fano(doubled)


class TestMutationCompatibility:
    @staticmethod
    def _piecewise_image_inside(lat, alpha, beta, source, target):
        """Exact containment of the mutation image of one chart image inside
        the other: each linearity piece of the source maps linearly, so its
        vertices landing in the (convex) target decide the piece."""
        from plyp.polyhedra import ClassicalPolytope, HPolyhedron

        mu = lat.mutation(alpha, beta)
        for cone, matrix in mu.pieces:
            ineqs = list(source.hrep.ineqs) + [(g, 0) for g in cone.ineqs]
            piece = ClassicalPolytope.from_hrep(HPolyhedron.make(lat.rank, ineqs))
            for v in piece.vertices:
                image = tuple(sum(matrix[i][j] * v[j] for j in range(lat.rank)) for i in range(lat.rank))
                if not target.contains(image):
                    return False
        return True

    def test_images_related_by_mutations(self, a1):
        P = a1.polytope
        lat = a1.lattice
        for alpha in lat.charts:
            for beta in lat.charts:
                assert self._piecewise_image_inside(
                    lat, alpha, beta, P.chart_image(alpha), P.chart_image(beta)
                )
                pts_a = {
                    tuple(lat.mutation(alpha, beta).apply(x))
                    for x in lattice_points(P.chart_image(alpha))
                }
                assert pts_a == set(lattice_points(P.chart_image(beta)))

    def test_support_recovers_membership(self, a1):
        P = a1.polytope
        lat = a1.lattice
        _, psi = support_function(P)
        pts = {e.coords for e in pl_lattice_points(P)}
        dual_box = [
            lat.element((nx, ny)) for nx in range(-3, 4) for ny in range(-3, 4)
        ]
        for x in range(-3, 3):
            for y in range(-3, 3):
                m = lat.element((x, y))
                inside = all(
                    h.point.min_eval(m.coords) >= h.threshold for h in P.halfspaces
                )
                assert inside == ((x, y) in pts)
                # dual route both ways: inside dominates the support function
                # everywhere; outside dips below it somewhere
                dominated = all(a1.pair.v(m)(n) >= psi(n) for n in dual_box)
                assert dominated == inside
