"""Acceptance suite: one check per criterion, one printed line each.

Run with ``pytest tests/test_acceptance.py -s`` to see the line per
criterion.  Expected values tagged as derived were computed with independent
bounding-box / enumeration oracles before being frozen here; the level-space
dimensions 1, 23, 105, 287 for the (2, 2) polytope are the recorded golden
values of the standalone scan oracle.
"""

import itertools
import random
import time
from fractions import Fraction

import pytest

from plyp.detrop import (
    AlgebraElement,
    alg_mul,
    boxplus,
    circledast,
    coordinate_valuations,
    full_rank_valuation,
    get_context,
    level_space,
    no_body_check,
    parse_expression,
    valuate,
)
from plyp.duality import verify_dual_pair
from plyp.families import (
    a1_example,
    mdr_gf_polytope,
    mdr_phi,
    mdr_point,
    mdr_tu_matrix,
)
from plyp.lattice import validate_lattice
from plyp.points import (
    SElem,
    is_linear_on_chart,
    point_eval_hom,
    semialg_oplus,
    semialg_star,
    verify_point,
)
from plyp.polyhedra import (
    HPolyhedron,
    RationalCone,
    TropExpr,
    is_bounded,
    is_totally_unimodular,
    lattice_points,
    lex_min_member,
)
from plyp.polytopes import (
    dual_polytope,
    is_chart_gorenstein_fano,
    is_integral,
    scale_polytope,
    vertices,
)

GOLDEN_LEVEL_DIMS = [1, 23, 105, 287]  # independent scan oracle, k = 0..3


def report(number: int, label: str, t0: float):
    print(f"acceptance {number} ({label}): PASS in {time.time() - t0:.2f} s")


def test_criterion_1_running_example_fidelity():
    t0 = time.time()
    ex = a1_example()
    cones = sorted(c.base_cone.ineqs for c in ex.lattice.fan().cones)
    assert cones == [((0, -1),), ((0, 1),)]
    p = ex.point(-1, 0, -1)
    assert p.chart_expr(2).members == ((1, 0),)  # the half-space {u >= -1}
    P = ex.polytope
    assert set(P.chart_image(1).vertices) == {(-2, -1), (0, -1), (1, 0), (1, 2)}
    assert set(P.chart_image(2).vertices) == {(-1, -1), (1, -1), (1, 0), (-1, 2)}
    assert [v.coords for v in vertices(P)] == [
        (-2, -1),
        (-1, 0),
        (0, -1),
        (1, 0),
        (1, 2),
    ]
    report(1, "running example fidelity", t0)


# chart-wise functional sets of the ten dual half-space conditions
DUAL_TABLE = {
    (1, 0): {1: {(0, 1)}, 2: {(0, 1)}},
    (1, 2): {1: {(2, 1)}, 2: {(-2, 1), (-2, 3)}},
    (-2, -1): {1: {(-1, -1), (-1, -2)}, 2: {(1, -2)}},
    (-1, 0): {1: {(0, -1)}, 2: {(0, -1)}},
    (0, -1): {1: {(-1, 0), (-1, 1)}, 2: {(1, 0)}},
}


def test_criterion_2_dual_polytope_fidelity():
    t0 = time.time()
    ex = a1_example()
    D = dual_polytope(ex.polytope)
    assert set(D.chart_image(1).vertices) == {(0, -1), (1, 0), (-1, 1)}
    assert (Fraction(1, 2), Fraction(0)) in set(D.chart_image(2).vertices)
    assert not is_integral(D)
    assert is_integral(ex.polytope)
    for h in D.halfspaces:
        m = ex.pair.v_inv(h.point)
        expected = DUAL_TABLE[m.coords]
        assert h.threshold == -1
        for label in (1, 2):
            assert set(h.point.chart_expr(label).members) == expected[label]
    report(2, "dual polytope fidelity", t0)


def test_criterion_3_self_duality():
    t0 = time.time()
    ex = a1_example(box_radius=3)
    rep = verify_dual_pair(ex.pair)
    assert rep.ok, rep.failures
    fan = ex.lattice.fan()
    matched = {chart: fan.cones[ci].base_cone for ci, chart in rep.cone_chart_m.items()}
    assert matched[1].same_cone(RationalCone.make(2, [(0, 1)]))
    assert matched[2].same_cone(RationalCone.make(2, [(0, -1)]))
    report(3, "self-duality", t0)


def _t_box(d, r, radius):
    out = []
    for a in itertools.product(range(-radius, radius + 1), repeat=d):
        s = sum(a)
        for b in itertools.product(range(-radius, radius + 1), repeat=r):
            if min(b) == s:
                out.append((a, b))
    return out


def _mm_box(d, r, radius):
    out = []
    for u in itertools.product(range(0, radius + 1), repeat=d):
        if min(u) == 0:
            for w in itertools.product(range(-radius, radius + 1), repeat=r):
                out.append((u, w))
    return out


@pytest.mark.parametrize("d,r", [(2, 2), (2, 3), (3, 2)])
def test_criterion_4_mdr_structure(d, r):
    t0 = time.time()
    ctx = get_context(d, r)
    m, n, pair = ctx.m, ctx.n, ctx.pair
    assert validate_lattice(m).ok

    # chart identification respects adjacent mutations on the radius-3 box
    for (u, w) in _mm_box(d, r, 3):
        coords_i = {i: mdr_phi(d, r, i, u, w) for i in range(1, r + 1)}
        for i in range(1, r):
            assert tuple(m.mutation(i, i + 1).apply(coords_i[i])) == coords_i[i + 1]

    # parametrized points all verify, and chart linearity matches the slices
    for (a, b) in _t_box(d, r, 1):
        p = mdr_point(m, a, b)
        assert verify_point(p).ok
        for i in range(1, r + 1):
            assert is_linear_on_chart(p, i) == (sum(a) == b[i - 1])

    rep = verify_dual_pair(pair)
    assert rep.ok, rep.failures

    # matched fan cones are exactly the u_k-minimal cones
    for ci, k in rep.cone_chart_m.items():
        expected = _uk_min_cone(m.rank, d, k)
        assert m.fan().cones[ci].base_cone.same_cone(expected)
    report(4, f"structure of the ({d},{r}) family", t0)


def _uk_min_cone(rank, d, k):
    ineqs = []
    for j in range(1, d + 1):
        if j != k:
            g = [0] * rank
            g[j - 1] = 1
            g[k - 1] = -1
            ineqs.append(tuple(g))
    return RationalCone.make(rank, ineqs)


@pytest.mark.parametrize("d,r", [(2, 2), (2, 3), (3, 2)])
def test_criterion_5_gorenstein_fano(d, r):
    t0 = time.time()
    P = mdr_gf_polytope(d, r)
    assert not P.is_empty
    assert is_integral(P)
    assert is_chart_gorenstein_fano(P)
    for k in range(1, d + 1):
        assert is_totally_unimodular(mdr_tu_matrix(d, r, k))
    report(5, f"reflexive-type polytope ({d},{r})", t0)


def _random_element(rng, d, r, radius=2, max_terms=3):
    keys = _mm_box(d, r, radius)
    coeffs = {}
    for _ in range(rng.randint(1, max_terms)):
        coeffs[keys[rng.randrange(len(keys))]] = Fraction(rng.randint(1, 5))
    return AlgebraElement.make(d, r, coeffs)


def test_criterion_6_detropicalization():
    t0 = time.time()
    ctx = get_context(2, 2)
    assert alg_mul(
        AlgebraElement.monomial(2, 2, (1, 0), (0, 0)),
        AlgebraElement.monomial(2, 2, (0, 1), (0, 0)),
    ) == parse_expression("t1 + t2", 2, 2)

    rng = random.Random(2026)
    for _ in range(200):
        f = _random_element(rng, 2, 2)
        g = _random_element(rng, 2, 2)
        vf, vg = valuate(f, ctx), valuate(g, ctx)
        assert valuate(alg_mul(f, g), ctx) == vf.star(vg)
        assert valuate(f + g, ctx) >= vf.oplus(vg)

    for key in _mm_box(2, 2, 2):
        b = AlgebraElement.monomial(2, 2, *key)
        el = ctx.element_of(key)
        for alpha in (1, 2):
            assert full_rank_valuation(b, alpha, ctx=ctx).chart_coords == tuple(
                el.chart(alpha)
            )
    report(6, "detropicalization", t0)


def test_criterion_7_level_spaces():
    t0 = time.time()
    ctx = get_context(2, 2)
    P = mdr_gf_polytope(2, 2, pair=ctx.pair)
    dims = []
    for k in range(4):
        _, dim = level_space(P, k, ctx)
        dims.append(dim)
        for label in (1, 2):
            assert dim == len(lattice_points(scale_polytope(P, k).chart_image(label)))
    assert dims == GOLDEN_LEVEL_DIMS
    assert dims[0] == 1
    for label in (1, 2):
        rep = no_body_check(P, label, 3, ctx)
        assert rep["ok"]
        assert all(e["values_match"] for e in rep["levels"])
    report(7, "level spaces and value semigroups", t0)


def test_criterion_8_semialgebra_laws():
    t0 = time.time()
    ex = a1_example()
    lat = ex.lattice
    rng = random.Random(77)

    def rand_selem():
        els = [
            lat.element((rng.randint(-2, 2), rng.randint(-2, 2)))
            for _ in range(rng.randint(1, 2))
        ]
        return SElem.of(lat, els)

    for _ in range(100):
        a, b, c = rand_selem(), rand_selem(), rand_selem()
        assert semialg_star(a, b) == semialg_star(b, a)
        assert semialg_star(semialg_star(a, b), c) == semialg_star(a, semialg_star(b, c))
        assert semialg_oplus(a, a) == a

    zero = SElem.of(lat, [lat.zero()])
    for _ in range(20):
        a = rand_selem()
        assert semialg_star(a, zero) == a

    for _ in range(100):
        a_, b_ = rng.randint(-3, 3), rng.randint(-3, 3)
        p = ex.point(a_, b_, min(0, a_) - b_)
        s1, s2 = rand_selem(), rand_selem()
        assert point_eval_hom(p, semialg_oplus(s1, s2)) == min(
            point_eval_hom(p, s1), point_eval_hom(p, s2)
        )
        assert point_eval_hom(p, semialg_star(s1, s2)) == point_eval_hom(
            p, s1
        ) + point_eval_hom(p, s2)
    report(8, "semialgebra laws", t0)


def test_criterion_9_appendix_machinery():
    t0 = time.time()
    rng = random.Random(55)

    # lex-minimal members survive minimal representations
    for dim in (2, 3):
        basis = tuple(tuple(1 if i == j else 0 for j in range(dim)) for i in range(dim))
        for _ in range(50):
            members = {
                tuple(rng.randint(-3, 3) for _ in range(dim))
                for _ in range(rng.randint(1, 6))
            }
            e = TropExpr.make(dim, sorted(members))
            lex_min_member(e, basis, check_minimal=True)

    # boundedness depends only on the normals
    for _ in range(100):
        dim = rng.choice((1, 2, 3))
        ineqs = []
        for i in range(dim):
            e = [0] * dim
            e[i] = 1
            ineqs.append((tuple(e), rng.randint(-3, 3)))
            ineqs.append((tuple(-x for x in e), rng.randint(-3, 0)))
        for _ in range(rng.randint(0, 2)):
            g = tuple(rng.randint(-2, 2) for _ in range(dim))
            if any(g):
                ineqs.append((g, rng.randint(-3, 3)))
        p = HPolyhedron.make(dim, ineqs)
        assert is_bounded(p)
        q = HPolyhedron.make(dim, [(n, rng.randint(-5, 5)) for n, _ in p.ineqs])
        assert is_bounded(q)

    # the lex combinator agrees with the full-rank valuation on the box
    ctx = get_context(2, 2)
    vals = coordinate_valuations(ctx, 1)
    ca, bp = circledast(vals), boxplus(vals)
    by_total: dict = {}
    by_tuple: dict = {}
    for key in _mm_box(2, 2, 1):
        b = AlgebraElement.monomial(2, 2, *key)
        assert ca(b) == full_rank_valuation(b, 1, ctx=ctx).tuple_value
        s = bp(b)
        by_total[s] = by_total.get(s, 0) + 1
        by_tuple[ca(b)] = by_tuple.get(ca(b), 0) + 1
    for s, count in by_total.items():
        assert count == sum(c for t, c in by_tuple.items() if sum(t) == s)
    report(9, "appendix machinery", t0)
