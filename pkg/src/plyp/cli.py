"""Command-line front end.

Every command prints one JSON document to standard output.  Exit codes:
0 on success/pass, 2 when a verification-style command fails its check,
1 on usage or input errors.  Inputs are manifest files or built-in families
(``--family a1``, ``--family mdr:2,3``, ``--family trivial:3``).
"""

from __future__ import annotations

import argparse
import sys

from . import io as manifest
from .detrop import (
    get_context,
    gf_context_polytope,
    level_space,
    no_body_check,
    parse_expression,
    format_element,
    valuate,
)
from .errors import PlypError
from .families import mdr_param_of, mdr_tu_matrix
from .lattice import validate_lattice
from .polyhedra import is_totally_unimodular, lattice_points
from .polytopes import (
    dual_polytope,
    is_chart_gorenstein_fano,
    is_integral,
    pl_lattice_points,
    scale_polytope,
    vertices,
)
from .render import render_chart

PASS, USAGE_ERROR, CHECK_FAILED = 0, 1, 2


def _emit(payload) -> None:
    sys.stdout.write(manifest.dumps(payload))


def _enc(x):
    return manifest.encode_scalar(x)


def _vec(v):
    return [manifest.encode_scalar(x) for x in v]


def _load_lattice(args):
    if args.family:
        fam = manifest.get_family(args.family)
        return fam.lattice, fam
    if not args.file:
        raise PlypError("give a manifest file or --family")
    payload = manifest.load_path(args.file)
    return manifest.resolve_lattice(payload if "kind" not in payload else payload)


def _load_polytope(args):
    if args.family:
        fam = manifest.get_family(args.family)
        if args.polytope not in (None, "builtin"):
            raise PlypError("families only provide --polytope builtin")
        if fam.polytope is None:
            raise PlypError(f"family {args.family} has no builtin polytope")
        return fam.polytope, fam
    if not args.file:
        raise PlypError("give a manifest file or --family")
    payload = manifest.load_path(args.file)
    poly = manifest.parse_polytope(payload)
    fam = None
    lattice_ref = payload.get("lattice", {})
    if isinstance(lattice_ref, dict) and "family" in lattice_ref:
        fam = manifest.get_family(lattice_ref["family"])
    return poly, fam


def _chart_label(lat, raw):
    for label in lat.charts:
        if str(label) == str(raw):
            return label
    raise PlypError(f"unknown chart {raw!r}; have {[str(c) for c in lat.charts]}")


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_validate(args) -> int:
    lat, _ = _load_lattice(args)
    report = validate_lattice(lat)
    _emit({"command": "validate", "lattice": lat.name, **report.to_json()})
    return PASS if report.ok else CHECK_FAILED


def cmd_fan(args) -> int:
    lat, _ = _load_lattice(args)
    fan = lat.fan()
    cones = []
    for plc in fan.cones:
        cones.append(
            {
                "base_ineqs": [_vec(g) for g in plc.base_cone.ineqs],
                "chart_images": {
                    str(lab): [_vec(g) for g in cone.ineqs] for lab, cone in plc.chart_images
                },
            }
        )
    _emit({"command": "fan", "lattice": lat.name, "maximal_cones": cones})
    return PASS


def cmd_vertices(args) -> int:
    poly, _ = _load_polytope(args)
    lat = poly.lattice
    out = []
    for el in vertices(poly):
        out.append(
            {
                "base": _vec(el.coords),
                "charts": {str(label): _vec(el.chart(label)) for label in lat.charts},
            }
        )
    payload = {"command": "vertices", "lattice": lat.name, "count": len(out), "vertices": out}
    payload.update(_maybe_figures(args, poly))
    _emit(payload)
    return PASS


def cmd_dual(args) -> int:
    poly, _ = _load_polytope(args)
    dual = dual_polytope(poly)
    out = {
        "command": "dual",
        "lattice": dual.lattice.name,
        "halfspace_count": len(dual.halfspaces),
        "integral": is_integral(dual),
        "charts": {},
    }
    for label in dual.lattice.charts:
        img = dual.chart_image(label)
        # already in deterministic (sorted exact) order
        out["charts"][str(label)] = {"vertices": [_vec(v) for v in img.vertices]}
    out.update(_maybe_figures(args, dual, prefix="dual-"))
    _emit(out)
    return PASS


def _maybe_figures(args, poly, prefix: str = "") -> dict:
    """Render every rank-2 chart image into the requested directory and list
    the files in the report."""
    outdir = getattr(args, "figures", None)
    if not outdir:
        return {}
    if poly.lattice.rank != 2:
        raise PlypError("figure rendering is for rank-2 lattices")
    import os

    os.makedirs(outdir, exist_ok=True)
    ext = getattr(args, "figure_format", "svg")
    files = []
    for label in poly.lattice.charts:
        path = os.path.join(outdir, f"{prefix}chart-{label}.{ext}")
        render_chart(poly, label, path)
        files.append(path)
    return {"figures": files}


def cmd_points_count(args) -> int:
    poly, _ = _load_polytope(args)
    lat = poly.lattice
    scaled = scale_polytope(poly, args.k)
    per_chart = {
        str(label): len(lattice_points(scaled.chart_image(label))) for label in lat.charts
    }
    counts = set(per_chart.values())
    payload = {
        "command": "points-count",
        "k": args.k,
        "count": len(pl_lattice_points(scaled)),
        "per_chart": per_chart,
        "cross_chart_equal": len(counts) == 1,
    }
    _emit(payload)
    return PASS if payload["cross_chart_equal"] else CHECK_FAILED


def cmd_gf_check(args) -> int:
    poly, fam = _load_polytope(args)
    gf = is_chart_gorenstein_fano(poly)
    tu = None
    if fam is not None and hasattr(fam, "mdr"):
        d, r = fam.mdr
        tu = all(is_totally_unimodular(mdr_tu_matrix(d, r, k)) for k in range(1, d + 1))
    payload = {
        "command": "gf-check",
        "chart_gorenstein_fano": gf,
        "integral": is_integral(poly),
        "tu_matrix": tu,
    }
    _emit(payload)
    ok = gf and (tu is None or tu)
    return PASS if ok else CHECK_FAILED


def cmd_valuate(args) -> int:
    f = parse_expression(args.expr, args.d, args.r)
    ctx = get_context(args.d, args.r)
    value = valuate(f, ctx)
    if value.infinite:
        val_payload = "infinity"
    else:
        val_payload = [
            [_vec(t) for t in mdr_param_of(ctx.n, ctx.pair.v(m))] for m in value.members()
        ]
    payload = {
        "command": "valuate",
        "d": args.d,
        "r": args.r,
        "input": args.expr,
        "expansion": format_element(f),
        "valuation_min_set": val_payload,
        "support": [
            {"key": [_vec(u), _vec(w)], "coeff": _enc(c)} for (u, w), c in f.terms
        ],
    }
    _emit(payload)
    return PASS


def cmd_level_dim(args) -> int:
    poly, fam = _load_polytope(args)
    ctx = _detrop_context(fam)
    basis, dim = level_space(poly, args.k, ctx)
    payload = {
        "command": "level-dim",
        "k": args.k,
        "dim": dim,
        "per_chart_lattice_points": {
            str(label): len(lattice_points(scale_polytope(poly, args.k).chart_image(label)))
            for label in poly.lattice.charts
        },
    }
    _emit(payload)
    return PASS


def cmd_no_body(args) -> int:
    poly, fam = _load_polytope(args)
    ctx = _detrop_context(fam)
    label = _chart_label(poly.lattice, args.chart)
    report = no_body_check(poly, label, args.kmax, ctx)
    report["command"] = "no-body"
    _emit(report)
    return PASS if report["ok"] else CHECK_FAILED


def _detrop_context(fam):
    if fam is None or not hasattr(fam, "mdr"):
        raise PlypError("this command needs an mdr family polytope (--family mdr:d,r)")
    d, r = fam.mdr
    ctx, _ = gf_context_polytope(d, r)
    return ctx


def cmd_render(args) -> int:
    poly, _ = _load_polytope(args)
    label = _chart_label(poly.lattice, args.chart)
    render_chart(poly, label, args.out)
    _emit({"command": "render", "chart": str(label), "out": args.out})
    return PASS


def cmd_export(args) -> int:
    fam = manifest.get_family(args.family)
    if args.kind == "lattice":
        _emit(manifest.emit_lattice(fam.lattice))
    elif args.kind == "polytope":
        if fam.polytope is None:
            raise PlypError(f"family {args.family} has no builtin polytope")
        _emit(manifest.emit_polytope(fam.polytope, family=args.family))
    elif args.kind == "dual-pair":
        _emit(manifest.emit_dual_pair(args.family))
    else:
        raise PlypError(f"cannot export kind {args.kind!r}")
    return PASS


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


def _add_object_args(sub, polytope: bool = False):
    sub.add_argument("file", nargs="?", help="manifest file")
    sub.add_argument("--family", help="built-in family: a1 | mdr:d,r | trivial:r")
    if polytope:
        sub.add_argument("--polytope", help="'builtin' to select the family polytope")


def _add_figure_args(sub):
    sub.add_argument("--figures", help="also render every chart image into this directory")
    sub.add_argument(
        "--figure-format", default="svg", choices=["svg", "png", "pdf"], dest="figure_format"
    )


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="plyp", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", help="check the lattice axioms")
    _add_object_args(s)
    s.set_defaults(fn=cmd_validate)

    s = sub.add_parser("fan", help="maximal cones of the lattice fan")
    _add_object_args(s)
    s.set_defaults(fn=cmd_fan)

    s = sub.add_parser("vertices", help="vertices of a polytope, all charts")
    _add_object_args(s, polytope=True)
    _add_figure_args(s)
    s.set_defaults(fn=cmd_vertices)

    s = sub.add_parser("dual", help="dual polytope data")
    _add_object_args(s, polytope=True)
    _add_figure_args(s)
    s.set_defaults(fn=cmd_dual)

    s = sub.add_parser("points-count", help="lattice points of a dilate")
    _add_object_args(s, polytope=True)
    s.add_argument("--k", type=int, default=1)
    s.set_defaults(fn=cmd_points_count)

    s = sub.add_parser("gf-check", help="integrality / reflexivity checks")
    _add_object_args(s, polytope=True)
    s.set_defaults(fn=cmd_gf_check)

    s = sub.add_parser("valuate", help="expand and valuate an expression")
    s.add_argument("expr")
    s.add_argument("d", type=int)
    s.add_argument("r", type=int)
    s.set_defaults(fn=cmd_valuate)

    s = sub.add_parser("level-dim", help="dimension of a level subspace")
    _add_object_args(s, polytope=True)
    s.add_argument("--k", type=int, default=1)
    s.set_defaults(fn=cmd_level_dim)

    s = sub.add_parser("no-body", help="value semigroup vs dilate lattice points")
    _add_object_args(s, polytope=True)
    s.add_argument("--chart", required=True)
    s.add_argument("--kmax", type=int, default=3)
    s.set_defaults(fn=cmd_no_body)

    s = sub.add_parser("render", help="draw one chart image (svg is exact)")
    _add_object_args(s, polytope=True)
    s.add_argument("--chart", required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(fn=cmd_render)

    s = sub.add_parser("export", help="emit a manifest for a built-in object")
    s.add_argument("--family", required=True)
    s.add_argument("--kind", required=True, choices=["lattice", "polytope", "dual-pair"])
    s.set_defaults(fn=cmd_export)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as err:
        return USAGE_ERROR if err.code not in (0, None) else 0
    try:
        return args.fn(args)
    except PlypError as err:
        _emit({"error": err.code, "message": str(err)})
        return USAGE_ERROR
    except ValueError as err:
        _emit({"error": "bad-input", "message": str(err)})
        return USAGE_ERROR
    except AssertionError as err:
        _emit({"error": "verification-failure", "message": str(err)})
        return CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())
