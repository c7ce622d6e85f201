"""Strict dual pairs of polyptych lattices.

A pair carries mutually inverse bijections between each lattice and the space
of points of the other.  Verification is exact where piecewise linearity
permits (the chart/cone correspondence) and exhaustive on a configurable
integer box for the quantified identities (the pairing symmetry and the
round-trips); the box radius defaults to 3 and can be overridden with the
``PLYP_BOX_RADIUS`` environment variable.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import VerificationFailure
from .lattice import Element, PLMap, PolyptychLattice, add_in_chart
from .linalg import dot, inverse, mat, mat_mul, transpose
from .points import Point, is_linear_on_chart, verify_point
from .polyhedra import RationalCone, strict_feasible


def default_box_radius() -> int:
    try:
        return max(1, int(os.environ.get("PLYP_BOX_RADIUS", "3")))
    except ValueError:
        return 3


class DualPair:
    """Pairing data between lattices ``m`` and ``n``.

    ``v``/``w`` send elements to points of the other side; ``v_inv``/``w_inv``
    are their explicit inverses (supplied, then certified by round-trips).
    """

    def __init__(
        self,
        m: PolyptychLattice,
        n: PolyptychLattice,
        v: Callable[[Element], Point],
        w: Callable[[Element], Point],
        v_inv: Callable[[Point], Element],
        w_inv: Callable[[Point], Element],
        box_radius: Optional[int] = None,
        name: str = "",
    ):
        self.m = m
        self.n = n
        self._v = v
        self._w = w
        self._v_inv = v_inv
        self._w_inv = w_inv
        self.box_radius = box_radius if box_radius is not None else default_box_radius()
        self.name = name or f"pair({m.name},{n.name})"
        self._v_cache: dict = {}
        self._w_cache: dict = {}
        self.cone_chart: dict = {}  # id(lattice) -> {cone_index: other-side chart label}

    def v(self, e: Element) -> Point:
        hit = self._v_cache.get(e.coords)
        if hit is None:
            hit = self._v(e)
            self._v_cache[e.coords] = hit
        return hit

    def w(self, e: Element) -> Point:
        hit = self._w_cache.get(e.coords)
        if hit is None:
            hit = self._w(e)
            self._w_cache[e.coords] = hit
        return hit

    def v_inv(self, p: Point) -> Element:
        return self._v_inv(p)

    def w_inv(self, p: Point) -> Element:
        return self._w_inv(p)

    def v_point_for(self, lat: PolyptychLattice, e: Element) -> Point:
        """The pairing map out of whichever side ``lat`` is."""
        if lat is self.m:
            return self.v(e)
        if lat is self.n:
            return self.w(e)
        raise ValueError("lattice does not belong to this pair")

    def other_side(self, lat: PolyptychLattice) -> PolyptychLattice:
        if lat is self.m:
            return self.n
        if lat is self.n:
            return self.m
        raise ValueError("lattice does not belong to this pair")

    def chart_of_cone(self, lat: PolyptychLattice, cone_index: int):
        """Other-side chart matched to a maximal fan cone (axiom 4)."""
        table = self.cone_chart.get(id(lat))
        if table is None:
            table = _match_cones_to_charts(self, lat)
            self.cone_chart[id(lat)] = table
        return table[cone_index]


def register_dual_pair(pair: DualPair) -> DualPair:
    """Attach the pair to both lattices so hull membership and semialgebra
    normalization can find it."""
    pair.m.dual_pair = pair
    pair.n.dual_pair = pair
    return pair


def pair_eval(pair: DualPair, em: Element, en: Element):
    """Pairing value; both evaluation orders are computed and must agree."""
    a = pair.v(em)(en)
    b = pair.w(en)(em)
    assert a == b, f"pairing asymmetry at {em.coords}, {en.coords}: {a} != {b}"
    return a


# ---------------------------------------------------------------------------
# Verification
# ---------------------------------------------------------------------------


@dataclass
class DualReport:
    failures: list = field(default_factory=list)
    cone_chart_m: dict = field(default_factory=dict)
    cone_chart_n: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self):
        return {
            "ok": self.ok,
            "failures": self.failures,
            "cone_chart_m": {str(k): str(v) for k, v in self.cone_chart_m.items()},
            "cone_chart_n": {str(k): str(v) for k, v in self.cone_chart_n.items()},
        }


def _pairing_matrix(pair: DualPair, side: PolyptychLattice, elements, arguments):
    """Integer matrix of pairing values val[i, j] = map(e_i)(a_j), computed
    with the convex min-of-functionals form of each image point."""
    arg_coords = np.array([a.coords for a in arguments], dtype=np.int64)
    out = np.empty((len(elements), len(arguments)), dtype=np.int64)
    for i, e in enumerate(elements):
        p = pair.v_point_for(side, e)
        funcs = np.array(p.cone_funcs, dtype=np.int64)
        out[i] = (arg_coords @ funcs.T).min(axis=1)
    return out


def verify_dual_pair(pair: DualPair) -> DualReport:
    """Per-axiom verification with witnesses.

    The pairing identity and the inverse round-trips are exhaustive on the
    box; point validity is spot-checked on a radius-1 box; the chart/cone
    correspondence is decided exactly through per-cone linearity.
    """
    report = DualReport()
    r = pair.box_radius
    box_m = pair.m.box_elements(r)
    box_n = pair.n.box_elements(r)

    # axiom 1 and point validity, small box
    for lat, box in ((pair.m, pair.m.box_elements(1)), (pair.n, pair.n.box_elements(1))):
        for e in box:
            p = pair.v_point_for(lat, e)
            if not p.is_integral():
                report.failures.append(
                    {"axiom": 1, "side": lat.name, "element": e.coords, "reason": "non-integral"}
                )
                continue
            chk = verify_point(p)
            if not chk.ok:
                report.failures.append(
                    {"axiom": 1, "side": lat.name, "element": e.coords, "reason": chk.failure}
                )

    # axiom 2: pairing symmetry on the box
    vm = _pairing_matrix(pair, pair.m, box_m, box_n)
    wn = _pairing_matrix(pair, pair.n, box_n, box_m)
    if not np.array_equal(vm, wn.T):
        idx = np.argwhere(vm != wn.T)[0]
        report.failures.append(
            {
                "axiom": 2,
                "m": box_m[idx[0]].coords,
                "n": box_n[idx[1]].coords,
                "v": int(vm[idx[0], idx[1]]),
                "w": int(wn[idx[1], idx[0]]),
            }
        )

    # axiom 3: explicit inverses round-trip on the box
    for e in box_m:
        back = pair.v_inv(pair.v(e))
        if back != e:
            report.failures.append({"axiom": 3, "side": pair.m.name, "element": e.coords})
            break
    for e in box_n:
        back = pair.w_inv(pair.w(e))
        if back != e:
            report.failures.append({"axiom": 3, "side": pair.n.name, "element": e.coords})
            break

    # axiom 4: cones of each fan matched bijectively to the other's charts
    for lat, out in ((pair.m, report.cone_chart_m), (pair.n, report.cone_chart_n)):
        try:
            table = _match_cones_to_charts(pair, lat)
        except VerificationFailure as err:
            report.failures.append({"axiom": 4, "side": lat.name, "reason": str(err)})
            continue
        out.update(table)
        pair.cone_chart[id(lat)] = table
    return report


def _match_cones_to_charts(pair: DualPair, lat: PolyptychLattice) -> dict:
    """Assign to each maximal fan cone of ``lat`` the unique other-side chart
    whose points its pairing images are linear on; exact by per-cone
    linearity of the pairing map."""
    other = pair.other_side(lat)
    fan = lat.fan()
    table: dict = {}
    used = set()
    for ci, plc in enumerate(fan.cones):
        gens = lat.cone_generators(plc.base_cone)
        gen_els = [lat.element(g) for g in gens]
        # pairing map must be additive on the cone (self-pairs cover doubling)
        for g, h in itertools.combinations_with_replacement(gen_els, 2):
            s = add_in_chart(g, h, lat.base)
            if not plc.base_cone.contains(s.coords):
                continue
            ps = pair.v_point_for(lat, s)
            gsum = tuple(
                tuple(a + b for a, b in zip(fa, fb))
                for fa, fb in zip(
                    pair.v_point_for(lat, g).cone_funcs, pair.v_point_for(lat, h).cone_funcs
                )
            )
            if ps.cone_funcs != gsum:
                raise VerificationFailure(
                    f"pairing map not additive on cone {ci} at {g.coords}+{h.coords}"
                )
        charts = [
            gamma
            for gamma in other.charts
            if all(is_linear_on_chart(pair.v_point_for(lat, g), gamma) for g in gen_els)
        ]
        if len(charts) != 1:
            raise VerificationFailure(f"cone {ci} matches charts {charts}, need exactly one")
        gamma = charts[0]
        if gamma in used:
            raise VerificationFailure(f"chart {gamma} matched by two cones")
        used.add(gamma)
        _check_preimage_inside_cone(pair, lat, ci, gamma)
        table[ci] = gamma
    if len(used) != len(other.charts):
        raise VerificationFailure("cone/chart correspondence is not onto")
    return table


def _check_preimage_inside_cone(pair: DualPair, lat: PolyptychLattice, ci: int, gamma):
    """No other cone may contain interior points whose image is linear on the
    matched chart: on each foreign cone the linearity locus is the kernel of
    explicit linear defect forms, so this is an exact emptiness check."""
    other = pair.other_side(lat)
    fan = lat.fan()
    target = fan.cones[ci].base_cone
    n_cones = len(other.fan().cones)
    for cj, plc in enumerate(fan.cones):
        if cj == ci:
            continue
        gens = lat.cone_generators(plc.base_cone)
        # linear map on this cone: generator images determine it
        basis_idx = _independent_subset(gens, lat.rank)
        gmat = mat([gens[i] for i in basis_idx])
        ginv = inverse(gmat)
        assert ginv is not None
        defect_rows = []
        for di in range(1, n_cones):
            for k in range(lat.rank):
                # row of (chart functional on gamma from cone di) - (from cone 0),
                # expressed as a linear function of the source element
                vals = []
                for i in basis_idx:
                    pt = pair.v_point_for(lat, lat.element(gens[i]))
                    f_di = pt.chart_functional(di, gamma)
                    f_0 = pt.chart_functional(0, gamma)
                    vals.append(f_di[k] - f_0[k])
                # express the defect against the generator basis: with G the
                # matrix of basis rows, the row vector is vals . (G^-1)^T
                row = tuple(dot(vals, ginv_row) for ginv_row in ginv)
                defect_rows.append(row)
        defect_rows = [r for r in defect_rows if any(c != 0 for c in r)]
        if not defect_rows:
            raise VerificationFailure(
                f"cone {cj} is also linear on chart {gamma}; correspondence not bijective"
            )
        locus = RationalCone.make(lat.rank, plc.base_cone.ineqs, defect_rows)
        for g in target.ineqs:
            neg = tuple(-c for c in g)
            if strict_feasible([neg], locus) is not None:
                raise VerificationFailure(
                    f"linearity locus of chart {gamma} escapes cone {ci} inside cone {cj}"
                )


def _independent_subset(vectors, dim):
    from .linalg import rank as mat_rank

    idx: list[int] = []
    for i in range(len(vectors)):
        if mat_rank([vectors[j] for j in idx + [i]]) > len(idx):
            idx.append(i)
        if len(idx) == dim:
            break
    assert len(idx) == dim, "generators do not span"
    return idx


# ---------------------------------------------------------------------------
# Induced PL structure on the space of points
# ---------------------------------------------------------------------------


def induced_pl_on_points(pair: DualPair):
    """The polyptych-lattice structure on the points of ``m``.

    Charts are indexed by the charts of ``n``; the chart map of a point is
    its restriction (a functional) to the matched fan cone of ``m``.  Returns
    the induced lattice together with a strong-isomorphism report against
    ``n``; raises on a failed commuting square.
    """
    m, n = pair.m, pair.n
    fan = m.fan()
    # cone index for each chart label of n
    cone_of_chart = {}
    for ci in range(len(fan.cones)):
        cone_of_chart[pair.chart_of_cone(m, ci)] = ci

    # region of alpha-linear restrictions inside each chart, and the linear
    # identification W_gamma: chart coords of n -> restriction coefficients
    w_mats = {}
    for gamma in n.charts:
        ci = cone_of_chart[gamma]
        cols = []
        for k in range(n.rank):
            unit = tuple(1 if i == k else 0 for i in range(n.rank))
            n_el = n.from_chart(gamma, unit)
            cols.append(pair.w(n_el).cone_funcs[ci])
        w_mats[gamma] = transpose(mat(cols))

    mutations = {}
    for gamma, delta in itertools.product(n.charts, repeat=2):
        ci, cj = cone_of_chart[gamma], cone_of_chart[delta]
        pieces = []
        for alpha in m.charts:
            mg = fan.cones[ci].matrix_to(alpha)
            md = fan.cones[cj].matrix_to(alpha)
            b = mat_mul(inverse(mg), md)
            # region: image under W_gamma of the n-side cone matched to alpha
            n_ci = _n_cone_for_chart(pair, alpha)
            region = n.fan().cones[n_ci].base_cone
            wg = w_mats[gamma]
            winv = inverse(wg)
            assert winv is not None
            # chart coords of n -> restriction coefficients, then H-rep transforms
            region_rows = region.transform(_chartback(n, gamma, n_ci))
            pieces.append((region_rows.transform(winv), transpose(b)))
        mutations[(gamma, delta)] = PLMap.make(m.rank, pieces)
    induced = PolyptychLattice(m.rank, n.charts, mutations, name=f"Sp({m.name})")

    # commuting squares on the verification box, and the strong isomorphism
    report = {"squares_checked": 0, "ok": True}
    box = n.box_elements(min(pair.box_radius, 2))
    for gamma, delta in itertools.permutations(n.charts, 2):
        ci, cj = cone_of_chart[gamma], cone_of_chart[delta]
        mut = induced.mutation(gamma, delta)
        for n_el in box:
            lhs = pair.w(n_el).cone_funcs[cj]
            rhs = mut.apply(pair.w(n_el).cone_funcs[ci])
            if tuple(lhs) != tuple(rhs):
                raise VerificationFailure(
                    f"square ({gamma},{delta}) fails at n={n_el.coords}: {lhs} vs {rhs}"
                )
            report["squares_checked"] += 1
    iso_ok = _strong_iso_check(n, induced, w_mats)
    report["strong_iso_with_dual"] = iso_ok
    if not iso_ok:
        raise VerificationFailure("induced structure is not strongly isomorphic to the dual")
    return induced, report


def _n_cone_for_chart(pair: DualPair, alpha) -> int:
    n = pair.n
    for ci in range(len(n.fan().cones)):
        if pair.chart_of_cone(n, ci) == alpha:
            return ci
    raise VerificationFailure(f"no dual fan cone matched to chart {alpha}")


def _chartback(n: PolyptychLattice, gamma, cone_index: int):
    """Matrix of the base-to-gamma mutation on the given fan cone, used to
    move an H-representation from base coordinates to chart coordinates."""
    return inverse(n.fan().cones[cone_index].matrix_to(gamma))


def _strong_iso_check(n: PolyptychLattice, induced: PolyptychLattice, w_mats: dict) -> bool:
    """Diagrams Phi_delta o mu^n = mu' o Phi_gamma, as piecewise maps."""
    for gamma, delta in itertools.permutations(n.charts, 2):
        lhs = PLMap.linear(w_mats[delta]).compose(n.mutation(gamma, delta))
        rhs = induced.mutation(gamma, delta).compose(PLMap.linear(w_mats[gamma]))
        if not lhs.equals(rhs):
            return False
    return True
