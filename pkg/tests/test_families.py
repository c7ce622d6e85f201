import itertools
import random

import pytest

from plyp.errors import BadParams, NotAPoint
from plyp.families import (
    mdr_element,
    mdr_gf_generators,
    mdr_gf_polytope,
    mdr_lattice,
    mdr_param_of,
    mdr_phi,
    mdr_phi_inv,
    mdr_point,
    trivial_lattice,
)
from plyp.lattice import validate_lattice
from plyp.points import (
    SElem,
    extend_from_cone,
    is_linear_on_chart,
    restrict_to_cone,
    semialg_star,
    verify_point,
)
from plyp.polyhedra import conv_contains
from plyp.polytopes import is_chart_gorenstein_fano


def t_box(d, r, radius):
    """All (a, b) tuples with the sum-min constraint inside a box."""
    out = []
    for a in itertools.product(range(-radius, radius + 1), repeat=d):
        s = sum(a)
        for b in itertools.product(range(-radius, radius + 1), repeat=r):
            if min(b) == s:
                out.append((a, b))
    return out


def mm_box(d, r, radius):
    """All normal forms (u, w) inside a box."""
    out = []
    for u in itertools.product(range(0, radius + 1), repeat=d):
        if min(u) != 0:
            continue
        for w in itertools.product(range(-radius, radius + 1), repeat=r):
            out.append((u, w))
    return out


class TestTrivial:
    def test_identity_mutation(self):
        lat, pair = trivial_lattice(2)
        assert validate_lattice(lat).ok
        assert verify_point(pair.v(lat.element((1, -2)))).ok

    def test_star_is_minkowski_sum(self):
        lat, _ = trivial_lattice(2)
        seg_x = SElem.of(lat, [lat.zero(), lat.element((1, 0))])
        seg_y = SElem.of(lat, [lat.zero(), lat.element((0, 1))])
        square = semialg_star(seg_x, seg_y)
        assert [m.coords for m in square.members] == [(0, 0), (0, 1), (1, 0), (1, 1)]

    def test_hull_normalization_matches_classical_hull(self):
        lat, _ = trivial_lattice(2)
        rng = random.Random(17)
        for _ in range(20):
            pts = [
                (rng.randint(-3, 3), rng.randint(-3, 3)) for _ in range(rng.randint(2, 5))
            ]
            s = SElem.of(lat, [lat.element(p) for p in pts])
            kept = {m.coords for m in s.members}
            for p in set(pts):
                others = [q for q in set(pts) if q != p]
                inside = bool(others) and conv_contains(others, p)
                assert (p not in kept) == inside


class TestA1:
    def test_fan(self, a1):
        cones = sorted(c.base_cone.ineqs for c in a1.lattice.fan().cones)
        assert cones == [((0, -1),), ((0, 1),)]

    def test_point_constraint(self, a1):
        with pytest.raises(NotAPoint):
            a1.point(2, 1, 0)
        p = a1.point(2, 1, -1)
        assert a1.param_of(p) == (2, 1, -1)

    def test_vertex_list(self, a1):
        from plyp.polytopes import vertices

        assert [v.coords for v in vertices(a1.polytope)] == [
            (-2, -1),
            (-1, 0),
            (0, -1),
            (1, 0),
            (1, 2),
        ]


class TestMdrLattice:
    def test_adjacent_mutation_formula(self):
        lat = mdr_lattice(2, 2)
        e = lat.element((2, 1, 1))  # chart 1: u=(2,1), w2=1
        assert e.chart(2) == (2, 1, 0)  # w1 = min(2,1) - 1 = 0

    @pytest.mark.parametrize("d,r", [(2, 2), (2, 3), (3, 2)])
    def test_axioms(self, d, r):
        assert validate_lattice(mdr_lattice(d, r)).ok

    def test_sigma_m22(self, mdr22):
        m, _, _ = mdr22
        cones = sorted(c.base_cone.ineqs for c in m.fan().cones)
        assert cones == [((-1, 1, 0),), ((1, -1, 0),)]

    def test_bad_params(self):
        with pytest.raises(BadParams):
            mdr_lattice(1, 2)


class TestPhi:
    def test_example(self):
        assert mdr_phi(2, 2, 1, (1, 0), (0, 1)) == (2, 1, 1)

    def test_zero(self):
        assert mdr_phi(2, 2, 1, (0, 0), (0, 0)) == (0, 0, 0)

    def test_inverse_example(self):
        assert mdr_phi_inv(2, 2, 1, (2, 1, 1)) == ((1, 0), (0, 1))

    @pytest.mark.parametrize("d,r", [(2, 2), (2, 3), (3, 2)])
    def test_chart_transport(self, d, r):
        lat = mdr_lattice(d, r)
        for (u, w) in mm_box(d, r, 2):
            coords = mdr_phi(d, r, 1, u, w)
            e = lat.element(coords)
            for i in range(1, r + 1):
                assert tuple(e.chart(i)) == mdr_phi(d, r, i, u, w)
                assert mdr_phi_inv(d, r, i, mdr_phi(d, r, i, u, w)) == (tuple(u), tuple(w))


class TestMdrPoints:
    def test_basis_values(self, mdr22):
        m, _, _ = mdr22
        p = mdr_point(m, (2, -1), (1, 3))
        assert p(mdr_element(m, (1, 0), (0, 0))) == 2
        assert p(mdr_element(m, (0, 0), (0, 1))) == 3

    def test_constraint_rejected(self, mdr22):
        m, _, _ = mdr22
        with pytest.raises(NotAPoint):
            mdr_point(m, (1, 1), (0, 5))

    @pytest.mark.parametrize("d,r", [(2, 2), (2, 3), (3, 2)])
    def test_box_points_verify(self, d, r):
        lat = mdr_lattice(d, r) if (d, r) != (2, 2) else mdr_lattice(2, 2)
        for (a, b) in t_box(d, r, 1):
            p = mdr_point(lat, a, b)
            assert verify_point(p).ok

    def test_linearity_classification(self, mdr23):
        m, _, _ = mdr23
        for (a, b) in t_box(2, 3, 1):
            p = mdr_point(m, a, b)
            for i in range(1, 4):
                assert is_linear_on_chart(p, i) == (sum(a) == b[i - 1])

    def test_psi_injective_on_box(self, mdr22):
        m, _, _ = mdr22
        seen = {}
        for (a, b) in t_box(2, 2, 2):
            p = mdr_point(m, a, b)
            assert p not in seen, f"{(a, b)} collides with {seen.get(p)}"
            seen[p] = (a, b)

    def test_extension_lands_in_param_family(self, mdr22):
        m, _, _ = mdr22
        for plc in m.fan().cones:
            for (a, b) in t_box(2, 2, 1):
                p = mdr_point(m, a, b)
                f = restrict_to_cone(p, plc.base_cone)
                q = extend_from_cone(m, plc.base_cone, f)
                assert q is not None
                qa, qb = mdr_param_of(m, q)
                assert sum(qa) == min(qb)
                assert mdr_point(m, qa, qb) == q

    def test_fullness_on_box(self, mdr22):
        m, _, _ = mdr22
        for (a, b) in t_box(2, 2, 2):
            p = mdr_point(m, a, b)
            assert any(is_linear_on_chart(p, i) for i in m.charts)


class TestMdrDual:
    def test_v22_example(self, mdr22):
        m, n, pair = mdr22
        e = mdr_element(m, (1, 0), (0, 1))
        a, b = mdr_param_of(n, pair.v(e))
        assert (a, b) == ((0, 1), (2, 1))

    def test_zero_maps_to_zero(self, mdr23):
        m, n, pair = mdr23
        p = pair.v(m.zero())
        assert all(all(x == 0 for x in f) for f in p.cone_funcs)

    @pytest.mark.parametrize("d,r", [(2, 2), (2, 3), (3, 2)])
    def test_matched_cones_are_uk_zero(self, d, r):
        from plyp.duality import verify_dual_pair
        from plyp.detrop import get_context

        ctx = get_context(d, r)
        report = verify_dual_pair(ctx.pair)
        assert report.ok
        # the dual-side fan cone matched to chart k of the source is, in
        # normal-form coordinates, exactly { y_k = 0 }
        n = ctx.n
        for ci, alpha in report.cone_chart_n.items():
            cone = n.fan().cones[ci].base_cone
            for (y, z) in mm_box(r, d, 2):
                inside = cone.contains(mdr_phi(r, d, 1, y, z))
                assert inside == (y[alpha - 1] == 0)


class TestGFPolytope:
    def test_generator_images(self, mdr22):
        m, n, pair = mdr22
        gens = mdr_gf_generators(2, 2)
        params = []
        for coords in gens:
            n_el = n.from_chart(1, coords)
            params.append(mdr_param_of(m, pair.w(n_el)))
        expected = [
            ((0, 0), (1, 0)),
            ((0, 0), (0, 1)),
            ((1, 0), (1, 1)),
            ((-1, 0), (-1, -1)),
            ((0, 1), (1, 1)),
            ((0, -1), (-1, -1)),
        ]
        assert sorted(params) == sorted(expected)

    def test_chart1_cone_slice_inequalities(self, gf22):
        _, P = gf22
        # on the region u_k <= u_j the half-space data reduces to
        # w_i >= -1 (i >= 2), u_k - sum(w) >= -1, +-u_j >= -1
        img = P.chart_image(1)
        norms = {n for n, a in img.hrep.ineqs}
        expected = {
            (0, 0, 1),
            (1, 0, -1),
            (0, 1, -1),
            (1, 0, 0),
            (-1, 0, 0),
            (0, 1, 0),
            (0, -1, 0),
        }
        assert norms == expected
        assert all(a == -1 for _, a in img.hrep.ineqs)

    @pytest.mark.parametrize("d,r", [(2, 2), (2, 3), (3, 2)])
    def test_reflexive_type(self, d, r):
        P = mdr_gf_polytope(d, r)
        assert is_chart_gorenstein_fano(P)
