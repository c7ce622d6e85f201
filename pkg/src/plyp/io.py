"""Manifest serialization: lattices, points, polytopes, pairs, algebra
elements as versioned JSON payloads.

One canonical schema, version field mandatory.  Rationals serialize as ints
when integral and as ``"p/q"`` strings otherwise; emit-then-parse is the
identity on canonical forms.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Optional

from .detrop import AlgebraElement
from .errors import ManifestError
from .families import a1_example, a1_point, mdr_point, trivial_lattice
from .lattice import PLMap, PolyptychLattice
from .points import Point, is_point
from .polyhedra import RationalCone, TropExpr
from .polytopes import PLHalfSpace, PLPolytope, build_polytope

FORMAT_VERSION = 1


def encode_scalar(x):
    f = Fraction(x)
    if f.denominator == 1:
        return int(f)
    return f"{f.numerator}/{f.denominator}"


def decode_scalar(x):
    if isinstance(x, int):
        return x
    if isinstance(x, str):
        try:
            f = Fraction(x)
        except (ValueError, ZeroDivisionError) as err:
            raise ManifestError(f"bad rational {x!r}") from err
        return int(f) if f.denominator == 1 else f
    raise ManifestError(f"bad scalar {x!r}")


def encode_vec(v):
    return [encode_scalar(x) for x in v]


def decode_vec(v):
    if not isinstance(v, list):
        raise ManifestError("expected a list of scalars")
    return tuple(decode_scalar(x) for x in v)


# ---------------------------------------------------------------------------
# Families
# ---------------------------------------------------------------------------


class FamilyHandle:
    def __init__(self, spec: str):
        self.spec = spec
        parts = spec.split(":")
        kind = parts[0]
        if kind == "a1":
            ex = a1_example()
            self.lattice = ex.lattice
            self.pair = ex.pair
            self.polytope = ex.polytope
            self.a1 = ex
        elif kind == "mdr":
            try:
                d, r = (int(x) for x in parts[1].split(","))
            except (IndexError, ValueError) as err:
                raise ManifestError("mdr family needs d,r as in mdr:2,3") from err
            from .detrop import gf_context_polytope

            ctx, polytope = gf_context_polytope(d, r)
            self.lattice = ctx.m
            self.pair = ctx.pair
            self.polytope = polytope
            self.mdr = (d, r)
        elif kind == "trivial":
            try:
                rank = int(parts[1])
            except (IndexError, ValueError) as err:
                raise ManifestError("trivial family needs a rank as in trivial:3") from err
            lat, pair = trivial_lattice(rank)
            self.lattice = lat
            self.pair = pair
            self.polytope = None
        else:
            raise ManifestError(f"unknown family {spec!r}")


_FAMILIES: dict = {}


def get_family(spec: str) -> FamilyHandle:
    if spec not in _FAMILIES:
        _FAMILIES[spec] = FamilyHandle(spec)
    return _FAMILIES[spec]


# ---------------------------------------------------------------------------
# Lattices
# ---------------------------------------------------------------------------


def _label(c):
    return c if isinstance(c, (int, str)) else str(c)


def emit_lattice(lat: PolyptychLattice) -> dict:
    mutations = []
    for (a, b) in sorted(lat.mutations, key=lambda ab: (str(ab[0]), str(ab[1]))):
        if a == b:
            continue
        m = lat.mutations[(a, b)]
        mutations.append(
            {
                "from": _label(a),
                "to": _label(b),
                "cones": [{"ineqs": [encode_vec(g) for g in c.ineqs]} for c, _ in m.pieces],
                "matrices": [[encode_vec(row) for row in mm] for _, mm in m.pieces],
            }
        )
    return {
        "version": FORMAT_VERSION,
        "kind": "lattice",
        "name": lat.name,
        "rank": lat.rank,
        "charts": [_label(c) for c in lat.charts],
        "mutations": mutations,
    }


def parse_lattice(payload: dict) -> PolyptychLattice:
    _expect_kind(payload, "lattice")
    rank = payload.get("rank")
    charts = payload.get("charts")
    if not isinstance(rank, int) or not isinstance(charts, list) or not charts:
        raise ManifestError("lattice needs integer rank and a chart list")
    mutations = {}
    for mu in payload.get("mutations", []):
        a, b = mu.get("from"), mu.get("to")
        if a not in charts or b not in charts:
            raise ManifestError(f"mutation references unknown charts {a!r}->{b!r}")
        cones = mu.get("cones", [])
        matrices = mu.get("matrices", [])
        if len(cones) != len(matrices) or not cones:
            raise ManifestError("mutation needs matching cones and matrices")
        pieces = []
        for cone, matrix in zip(cones, matrices):
            rc = RationalCone.make(rank, [decode_vec(g) for g in cone.get("ineqs", [])])
            rows = [decode_vec(row) for row in matrix]
            if len(rows) != rank or any(len(r) != rank for r in rows):
                raise ManifestError("mutation matrix has wrong shape")
            pieces.append((rc, rows))
        mutations[(a, b)] = PLMap.make(rank, pieces)
    return PolyptychLattice(rank, charts, mutations, name=payload.get("name", ""))


# ---------------------------------------------------------------------------
# Points and polytopes
# ---------------------------------------------------------------------------


def emit_point(p: Point, family: Optional[str] = None, standalone: bool = False) -> dict:
    functionals = {
        str(label): [encode_vec(f) for f in p.chart_expr(label).members]
        for label in p.lattice.charts
    }
    out = {"version": FORMAT_VERSION, "kind": "point", "functionals": functionals}
    if standalone:
        out["lattice"] = {"family": family} if family else emit_lattice(p.lattice)
    return out


def parse_point(payload: dict, lat: PolyptychLattice, family: Optional[FamilyHandle] = None) -> Point:
    if "param" in payload:
        if family is None:
            raise ManifestError("family-specific point parameters need a family")
        param = payload["param"]
        if hasattr(family, "a1"):
            a, b, bp = (decode_scalar(x) for x in param)
            return a1_point(lat, a, b, bp)
        if hasattr(family, "mdr"):
            a, b = (decode_vec(x) for x in param)
            return mdr_point(lat, a, b)
        raise ManifestError("this family has no point parametrization")
    functionals = payload.get("functionals")
    if not isinstance(functionals, dict):
        raise ManifestError("point needs 'functionals' or 'param'")
    exprs = {}
    for label in lat.charts:
        data = functionals.get(str(label))
        if data is None:
            raise ManifestError(f"point is missing chart {label!r}")
        exprs[label] = TropExpr.make(lat.rank, [decode_vec(f) for f in data])
    check = is_point(lat, exprs)
    if not check.ok:
        raise ManifestError(f"functionals do not define a point: {check.failure}")
    return check.point


def emit_polytope(p: PLPolytope, family: Optional[str] = None) -> dict:
    out = {
        "version": FORMAT_VERSION,
        "kind": "polytope",
        "halfspaces": [
            {"point": emit_point(h.point), "threshold": encode_scalar(h.threshold)}
            for h in p.halfspaces
        ],
    }
    if family is not None:
        out["lattice"] = {"family": family}
    else:
        out["lattice"] = emit_lattice(p.lattice)
    return out


def resolve_lattice(payload: dict):
    """Lattice reference inside another payload: inline data or a family.

    Returns ``(lattice, family_handle_or_None)``."""
    if not isinstance(payload, dict):
        raise ManifestError("expected a lattice object or family reference")
    if "family" in payload:
        fam = get_family(payload["family"])
        return fam.lattice, fam
    return parse_lattice(payload), None


def parse_polytope(payload: dict) -> PLPolytope:
    _expect_kind(payload, "polytope")
    lat, fam = resolve_lattice(payload.get("lattice", {}))
    if payload.get("polytope") == "builtin":
        if fam is None or fam.polytope is None:
            raise ManifestError("no builtin polytope for this lattice")
        return fam.polytope
    hs = []
    for item in payload.get("halfspaces", []):
        pt = parse_point(item.get("point", {}), lat, fam)
        hs.append(PLHalfSpace(pt, decode_scalar(item.get("threshold"))))
    if not hs:
        raise ManifestError("polytope needs half-spaces")
    return build_polytope(lat, hs)


# ---------------------------------------------------------------------------
# Algebra elements and dual pairs
# ---------------------------------------------------------------------------


def emit_algebra_element(f: AlgebraElement) -> dict:
    return {
        "version": FORMAT_VERSION,
        "kind": "algebra-element",
        "d": f.d,
        "r": f.r,
        "terms": [
            {"key": [encode_vec(u), encode_vec(w)], "coeff": encode_scalar(c)}
            for (u, w), c in f.terms
        ],
    }


def parse_algebra_element(payload: dict) -> AlgebraElement:
    _expect_kind(payload, "algebra-element")
    d, r = payload.get("d"), payload.get("r")
    if not isinstance(d, int) or not isinstance(r, int):
        raise ManifestError("algebra element needs integer d and r")
    coeffs = {}
    for term in payload.get("terms", []):
        u, w = (decode_vec(x) for x in term.get("key", [[], []]))
        coeffs[(u, w)] = Fraction(decode_scalar(term.get("coeff", 0)))
    return AlgebraElement.make(d, r, coeffs)


def emit_dual_pair(family: str) -> dict:
    return {"version": FORMAT_VERSION, "kind": "dual-pair", "family": family}


def parse_dual_pair(payload: dict):
    _expect_kind(payload, "dual-pair")
    fam = get_family(payload.get("family", ""))
    return fam.pair


# ---------------------------------------------------------------------------
# Shared helpers
# ---------------------------------------------------------------------------


def _expect_kind(payload: dict, kind: str):
    if not isinstance(payload, dict):
        raise ManifestError("manifest must be a JSON object")
    if payload.get("version") != FORMAT_VERSION:
        raise ManifestError(f"unsupported or missing format version {payload.get('version')!r}")
    if payload.get("kind") != kind:
        raise ManifestError(f"expected kind {kind!r}, got {payload.get('kind')!r}")


def parse_any(payload: dict):
    kind = payload.get("kind") if isinstance(payload, dict) else None
    if kind == "lattice":
        return parse_lattice(payload)
    if kind == "point":
        _expect_kind(payload, "point")
        lat, fam = resolve_lattice(payload.get("lattice", {}))
        return parse_point(payload, lat, fam)
    if kind == "polytope":
        return parse_polytope(payload)
    if kind == "algebra-element":
        return parse_algebra_element(payload)
    if kind == "dual-pair":
        return parse_dual_pair(payload)
    raise ManifestError(f"unsupported manifest kind {kind!r}")


def dumps(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def load_path(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as err:
        raise ManifestError(f"parse error at line {err.lineno}, column {err.colno}: {err.msg}") from err
    except OSError as err:
        raise ManifestError(str(err)) from err
