"""The detropicalization algebra of the (d, r) family.

Elements are rational-coefficient combinations of the monomial basis indexed
by normal forms ``min(u) = 0``; the single relation ``x_1 ... x_d = t_1 +
... + t_r`` is rewritten eagerly, so products of basis elements expand by one
multinomial.  The valuation sends a basis element to the corresponding
lattice element (seen as a point of the dual side) and a sum to the min of
its support; full-rank lex valuations, their rank-1 factors, the level
subspaces cut by a polytope, and the value-semigroup comparison live here
too.

A small twin fixture mirrors the same operations for the rank-2 two-chart
example (relation ``x_1 x_2 = 1 + t``); it exists for cross-checking only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .errors import BadBasis, BadParams, OriginNotInterior, ParamMismatch, TieError
from .families import (
    A1Example,
    mdr_dual_pair,
    mdr_element,
    mdr_gf_polytope,
    mdr_key,
)
from .lattice import Element, PolyptychLattice
from .linalg import rank as mat_rank
from .points import SElem, semialg_oplus, semialg_star
from .polyhedra import lattice_points
from .polytopes import PLPolytope, pl_lattice_points, scale_polytope


# ---------------------------------------------------------------------------
# Contexts
# ---------------------------------------------------------------------------


class DetropContext:
    """Lattice pair and caches for one ``(d, r)``."""

    def __init__(self, d: int, r: int):
        if d < 2 or r < 2:
            raise BadParams("need d >= 2 and r >= 2")
        self.d = d
        self.r = r
        self.m, self.n, self.pair = mdr_dual_pair(d, r)
        self._el_cache: dict = {}

    def element_of(self, key) -> Element:
        hit = self._el_cache.get(key)
        if hit is None:
            u, w = key
            hit = mdr_element(self.m, u, w)
            self._el_cache[key] = hit
        return hit

    def key_of(self, e: Element):
        return mdr_key(self.m, e)


_CONTEXTS: dict = {}


def get_context(d: int, r: int) -> DetropContext:
    if (d, r) not in _CONTEXTS:
        _CONTEXTS[(d, r)] = DetropContext(d, r)
    return _CONTEXTS[(d, r)]


# ---------------------------------------------------------------------------
# Algebra elements
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AlgebraElement:
    """Sparse coefficient map from normal-form keys to nonzero rationals."""

    d: int
    r: int
    terms: tuple  # ((key, Fraction), ...) sorted by key

    @staticmethod
    def make(d: int, r: int, coeffs: dict) -> "AlgebraElement":
        terms = []
        for key, c in coeffs.items():
            c = Fraction(c)
            if c == 0:
                continue
            u, w = key
            if len(u) != d or len(w) != r or min(u) != 0 or any(x < 0 for x in u):
                raise BadParams(f"key {key} is not a normal form for ({d},{r})")
            terms.append(((tuple(u), tuple(w)), c))
        terms.sort(key=lambda kv: kv[0])
        return AlgebraElement(d, r, tuple(terms))

    @staticmethod
    def zero(d: int, r: int) -> "AlgebraElement":
        return AlgebraElement(d, r, ())

    @staticmethod
    def one(d: int, r: int) -> "AlgebraElement":
        return AlgebraElement.make(d, r, {((0,) * d, (0,) * r): 1})

    @staticmethod
    def monomial(d: int, r: int, u: Sequence, w: Sequence, c=1) -> "AlgebraElement":
        return AlgebraElement.make(d, r, {(tuple(u), tuple(w)): c})

    def is_zero(self) -> bool:
        return not self.terms

    def coeff(self, key) -> Fraction:
        for k, c in self.terms:
            if k == key:
                return c
        return Fraction(0)

    def keys(self):
        return [k for k, _ in self.terms]

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        _check_params(self, other)
        acc = {k: c for k, c in self.terms}
        for k, c in other.terms:
            acc[k] = acc.get(k, Fraction(0)) + c
        return AlgebraElement.make(self.d, self.r, acc)

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        return self + other.scaled(-1)

    def scaled(self, c) -> "AlgebraElement":
        return AlgebraElement.make(self.d, self.r, {k: cc * Fraction(c) for k, cc in self.terms})


def _check_params(f: AlgebraElement, g: AlgebraElement):
    if (f.d, f.r) != (g.d, g.r):
        raise ParamMismatch(f"({f.d},{f.r}) vs ({g.d},{g.r})")


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _multinomial(total: int, parts: Sequence[int]) -> int:
    out = math.factorial(total)
    for p in parts:
        out //= math.factorial(p)
    return out


def alg_mul(f: AlgebraElement, g: AlgebraElement) -> AlgebraElement:
    """Bilinear product with eager rewriting of the defining relation.

    For basis keys, exponents add; the shared positive part of the ``x``
    block converts to one multinomial in the ``t`` variables, landing back in
    the basis."""
    _check_params(f, g)
    d, r = f.d, f.r
    acc: dict = {}
    for (u1, w1), c1 in f.terms:
        for (u2, w2), c2 in g.terms:
            u3 = tuple(a + b for a, b in zip(u1, u2))
            w3 = tuple(a + b for a, b in zip(w1, w2))
            ut = min(u3)
            base_u = tuple(x - ut for x in u3)
            c = c1 * c2
            if ut == 0:
                key = (base_u, w3)
                acc[key] = acc.get(key, Fraction(0)) + c
            else:
                for comp in _compositions(ut, r):
                    key = (base_u, tuple(a + b for a, b in zip(w3, comp)))
                    acc[key] = acc.get(key, Fraction(0)) + c * _multinomial(ut, comp)
    return AlgebraElement.make(d, r, acc)


def alg_pow(f: AlgebraElement, k: int) -> AlgebraElement:
    if k < 0:
        raise BadParams("negative powers only for single Laurent monomials")
    out = AlgebraElement.one(f.d, f.r)
    for _ in range(k):
        out = alg_mul(out, f)
    return out


# ---------------------------------------------------------------------------
# Valuation
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ValuationValue:
    """Min of the points attached to the support; infinity for zero."""

    selem: SElem

    @property
    def infinite(self) -> bool:
        return self.selem.infinite

    def members(self):
        return self.selem.members

    def eval_at(self, n: Element):
        if self.selem.infinite:
            return None
        pair = self.selem.lattice.dual_pair
        return min(pair.v_point_for(self.selem.lattice, m)(n) for m in self.selem.members)

    def star(self, other: "ValuationValue") -> "ValuationValue":
        return ValuationValue(semialg_star(self.selem, other.selem))

    def oplus(self, other: "ValuationValue") -> "ValuationValue":
        return ValuationValue(semialg_oplus(self.selem, other.selem))

    def __eq__(self, other):
        return isinstance(other, ValuationValue) and self.selem == other.selem

    def __hash__(self):
        return hash(self.selem)

    def __ge__(self, other: "ValuationValue") -> bool:
        """Order of the idempotent semialgebra: ``a >= b`` iff ``a + b = b``."""
        return self.oplus(other) == other


def valuate(f: AlgebraElement, ctx: Optional[DetropContext] = None) -> ValuationValue:
    ctx = ctx or get_context(f.d, f.r)
    if f.is_zero():
        return ValuationValue(SElem.infinity(ctx.m))
    members = [ctx.element_of(k) for k in f.keys()]
    return ValuationValue(SElem.of(ctx.m, members))


def support(f: AlgebraElement, ctx: Optional[DetropContext] = None):
    """Support keys as lattice elements, with the hull membership predicate."""
    from .polytopes import p_conv

    ctx = ctx or get_context(f.d, f.r)
    elements = [ctx.element_of(k) for k in f.keys()]
    if not elements:
        return [], (lambda m: False)
    membership, _ = p_conv(ctx.m, elements, ctx.pair)
    return elements, membership


# ---------------------------------------------------------------------------
# Full-rank lex valuations and their rank-1 factors
# ---------------------------------------------------------------------------


def dual_cone_for_chart(ctx: DetropContext, alpha):
    """Index of the dual-side fan cone matched to a chart of the source."""
    n = ctx.n
    for ci in range(len(n.fan().cones)):
        if ctx.pair.chart_of_cone(n, ci) == alpha:
            return ci
    raise BadParams(f"no dual cone matched to chart {alpha}")


def default_rho(ctx: DetropContext, alpha) -> list[tuple]:
    """A standard ordered basis inside the dual cone of a chart."""
    r, d = ctx.r, ctx.d
    rank = ctx.n.rank
    rho = [tuple([1] * r + [0] * (d - 1))]
    for j in range(1, r + 1):
        if j == alpha:
            continue
        rho.append(tuple(1 if i == j - 1 else 0 for i in range(rank)))
    for z in range(d - 1):
        rho.append(tuple(1 if i == r + z else 0 for i in range(rank)))
    return rho


def check_rho(ctx: DetropContext, alpha, rho: Sequence[Sequence]):
    rank = ctx.n.rank
    if len(rho) != rank or mat_rank(rho) != rank:
        raise BadBasis("need a linearly independent basis of full size")
    ci = dual_cone_for_chart(ctx, alpha)
    cone = ctx.n.fan().cones[ci].base_cone
    for v in rho:
        if not cone.contains(v):
            raise BadBasis(f"{v} is outside the dual cone of chart {alpha}")
    return ci


@dataclass(frozen=True)
class FullRankValue:
    element: Element
    tuple_value: tuple
    chart_coords: tuple


def value_tuple(ctx: DetropContext, m: Element, rho_elements: Sequence[Element]) -> tuple:
    p = ctx.pair.v(m)
    return tuple(p(n) for n in rho_elements)


def full_rank_valuation(
    f: AlgebraElement, alpha, rho: Optional[Sequence[Sequence]] = None, ctx=None
) -> Optional[FullRankValue]:
    """Lex-min of the support's evaluation tuples against the basis.

    Basis elements valuate to their own chart representative; ``None`` stands
    for the infinite value of zero."""
    ctx = ctx or get_context(f.d, f.r)
    rho = list(rho) if rho is not None else default_rho(ctx, alpha)
    check_rho(ctx, alpha, rho)
    if f.is_zero():
        return None
    rho_elements = [ctx.n.element(v) for v in rho]
    keyed = sorted(
        (value_tuple(ctx, ctx.element_of(k), rho_elements), k) for k in f.keys()
    )
    if len(keyed) > 1 and keyed[0][0] == keyed[1][0]:
        raise TieError("two support elements share the lex-min tuple")
    best_key = keyed[0][1]
    el = ctx.element_of(best_key)
    return FullRankValue(el, keyed[0][0], tuple(el.chart(alpha)))


class Rank1Valuation:
    """Evaluation of the pairing against one fixed dual vector."""

    def __init__(self, ctx: DetropContext, rho_coords: tuple):
        self.ctx = ctx
        self.rho_el = ctx.n.element(rho_coords)

    def on_element(self, m: Element):
        return self.ctx.pair.v(m)(self.rho_el)

    def __call__(self, f: AlgebraElement):
        if f.is_zero():
            return None
        return min(self.on_element(self.ctx.element_of(k)) for k in f.keys())


def coordinate_valuations(ctx: DetropContext, alpha, rho=None) -> list[Rank1Valuation]:
    rho = list(rho) if rho is not None else default_rho(ctx, alpha)
    check_rho(ctx, alpha, rho)
    return [Rank1Valuation(ctx, tuple(v)) for v in rho]


def circledast(vals: Sequence[Rank1Valuation]) -> Callable:
    """Lex-min over the support of the component tuples."""

    def v(f: AlgebraElement):
        if f.is_zero():
            return None
        ctx = vals[0].ctx
        return min(
            tuple(val.on_element(ctx.element_of(k)) for val in vals) for k in f.keys()
        )

    return v


def boxplus(vals: Sequence[Rank1Valuation]) -> Callable:
    """Min over the support of the component sums."""

    def v(f: AlgebraElement):
        if f.is_zero():
            return None
        ctx = vals[0].ctx
        return min(
            sum(val.on_element(ctx.element_of(k)) for val in vals) for k in f.keys()
        )

    return v


# ---------------------------------------------------------------------------
# Level subspaces and the value-semigroup comparison
# ---------------------------------------------------------------------------


def level_space(p: PLPolytope, k: int, ctx: Optional[DetropContext] = None):
    """Basis elements whose key lies in the ``k``-dilate; returns the list
    and its cardinality.  The polytope lives on the source side."""
    if any(h.threshold >= 0 for h in p.halfspaces):
        raise OriginNotInterior("level spaces need all thresholds negative")
    lat = p.lattice
    ctx = ctx or _context_for_lattice(lat)
    pk = scale_polytope(p, k)
    basis = []
    for e in pl_lattice_points(pk):
        u, w = ctx.key_of(e)
        basis.append(AlgebraElement.monomial(ctx.d, ctx.r, u, w))
    return basis, len(basis)


def _context_for_lattice(lat: PolyptychLattice) -> DetropContext:
    for ctx in _CONTEXTS.values():
        if ctx.m is lat:
            return ctx
    raise BadParams("polytope does not belong to a known detropicalization context")


def gf_context_polytope(d: int, r: int):
    """The distinguished polytope built inside the shared context."""
    ctx = get_context(d, r)
    return ctx, mdr_gf_polytope(d, r, pair=ctx.pair)


def no_body_check(p: PLPolytope, alpha, k_max: int, ctx: Optional[DetropContext] = None) -> dict:
    """Compare, level by level, the full-rank valuation values of the level
    basis with the lattice points of the dilated chart image, and record the
    degree-one generation shadow."""
    lat = p.lattice
    ctx = ctx or _context_for_lattice(lat)
    report = {"chart": alpha, "levels": [], "ok": True}
    level_values = []
    for k in range(k_max + 1):
        basis, dim = level_space(p, k, ctx)
        values = set()
        for b in basis:
            fr = full_rank_valuation(b, alpha, ctx=ctx)
            values.add(tuple(fr.chart_coords))
        pk_img = scale_polytope(p, k).chart_image(alpha)
        expected = {tuple(x) for x in lattice_points(pk_img)}
        ok = values == expected
        level_values.append(values)
        entry = {
            "k": k,
            "dim": dim,
            "lattice_points": len(expected),
            "values_match": ok,
        }
        if k >= 1:
            sums = level_values[1]
            for _ in range(k - 1):
                sums = {tuple(a + b for a, b in zip(s, v)) for s in sums for v in level_values[1]}
            entry["degree_one_generated"] = values == sums
        report["levels"].append(entry)
        report["ok"] = report["ok"] and ok
    return report


# ---------------------------------------------------------------------------
# Expression parsing (CLI input)
# ---------------------------------------------------------------------------


class _Parser:
    def __init__(self, text: str, d: int, r: int):
        self.text = text
        self.pos = 0
        self.d = d
        self.r = r

    def error(self, msg: str):
        raise BadParams(f"parse error at {self.pos}: {msg}")

    def peek(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expr(self) -> AlgebraElement:
        out = self.term()
        while True:
            ch = self.peek()
            if ch == "+":
                self.pos += 1
                out = out + self.term()
            elif ch == "-":
                self.pos += 1
                out = out - self.term()
            else:
                return out

    def term(self) -> AlgebraElement:
        out = self.factor()
        while self.peek() == "*":
            self.pos += 1
            out = alg_mul(out, self.factor())
        return out

    def factor(self) -> AlgebraElement:
        base = self.atom()
        if self.peek() == "^":
            self.pos += 1
            k = self.integer()
            if k < 0:
                if len(base.terms) != 1 or any(base.terms[0][0][0]):
                    self.error("negative powers need a single t-monomial")
                (u, w), c = base.terms[0]
                if c != 1:
                    self.error("negative powers need coefficient 1")
                return AlgebraElement.monomial(
                    self.d, self.r, u, tuple(k * x for x in w)
                )
            return alg_pow(base, k)
        return base

    def atom(self) -> AlgebraElement:
        ch = self.peek()
        if ch == "(":
            self.pos += 1
            out = self.expr()
            if self.peek() != ")":
                self.error("expected )")
            self.pos += 1
            return out
        if ch.isdigit() or ch == "-":
            return AlgebraElement.one(self.d, self.r).scaled(self.integer())
        if ch in ("x", "t"):
            self.pos += 1
            idx = self.integer()
            if ch == "x":
                if not 1 <= idx <= self.d:
                    self.error(f"x index out of range 1..{self.d}")
                u = tuple(1 if i == idx - 1 else 0 for i in range(self.d))
                return AlgebraElement.monomial(self.d, self.r, u, (0,) * self.r)
            if not 1 <= idx <= self.r:
                self.error(f"t index out of range 1..{self.r}")
            w = tuple(1 if i == idx - 1 else 0 for i in range(self.r))
            return AlgebraElement.monomial(self.d, self.r, (0,) * self.d, w)
        self.error(f"unexpected character {ch!r}")

    def integer(self) -> int:
        self.peek()
        start = self.pos
        if self.pos < len(self.text) and self.text[self.pos] == "-":
            self.pos += 1
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos == start or self.text[start:self.pos] == "-":
            self.error("expected an integer")
        return int(self.text[start : self.pos])


def parse_expression(text: str, d: int, r: int) -> AlgebraElement:
    parser = _Parser(text, d, r)
    out = parser.expr()
    if parser.peek():
        parser.error("trailing input")
    return out


def format_element(f: AlgebraElement) -> str:
    if f.is_zero():
        return "0"
    parts = []
    for (u, w), c in f.terms:
        vars_ = []
        for i, e in enumerate(u):
            if e:
                vars_.append(f"x{i + 1}" + (f"^{e}" if e != 1 else ""))
        for i, e in enumerate(w):
            if e:
                vars_.append(f"t{i + 1}" + (f"^{e}" if e != 1 else ""))
        body = "*".join(vars_) if vars_ else "1"
        if c == 1 and vars_:
            parts.append(body)
        elif c == -1 and vars_:
            parts.append(f"-{body}")
        else:
            cs = str(c)
            parts.append(f"{cs}*{body}" if vars_ else cs)
    out = parts[0]
    for p in parts[1:]:
        out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
    return out


# ---------------------------------------------------------------------------
# Secondary fixture: the rank-2 cluster-type algebra
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class A1AlgebraElement:
    """Coefficient map on keys ``(u1, u2, w)`` with ``min(u1, u2) = 0``;
    the relation is ``x1 x2 = 1 + t``."""

    terms: tuple

    @staticmethod
    def make(coeffs: dict) -> "A1AlgebraElement":
        terms = []
        for (u1, u2, w), c in coeffs.items():
            c = Fraction(c)
            if c == 0:
                continue
            if min(u1, u2) != 0 or u1 < 0 or u2 < 0:
                raise BadParams(f"key {(u1, u2, w)} is not a normal form")
            terms.append(((u1, u2, w), c))
        terms.sort(key=lambda kv: kv[0])
        return A1AlgebraElement(tuple(terms))

    def keys(self):
        return [k for k, _ in self.terms]

    def __add__(self, other):
        acc = {k: c for k, c in self.terms}
        for k, c in other.terms:
            acc[k] = acc.get(k, Fraction(0)) + c
        return A1AlgebraElement.make(acc)


def a1_alg_mul(f: A1AlgebraElement, g: A1AlgebraElement) -> A1AlgebraElement:
    acc: dict = {}
    for (u1, u2, w), c1 in f.terms:
        for (v1, v2, z), c2 in g.terms:
            a, b, ww = u1 + v1, u2 + v2, w + z
            ut = min(a, b)
            c = c1 * c2
            for k in range(ut + 1):
                key = (a - ut, b - ut, ww + k)
                acc[key] = acc.get(key, Fraction(0)) + c * math.comb(ut, k)
    return A1AlgebraElement.make(acc)


def a1_valuate(f: A1AlgebraElement, ex: A1Example) -> ValuationValue:
    if not f.terms:
        return ValuationValue(SElem.infinity(ex.lattice))
    members = [ex.lattice.element((w, u2 - u1)) for (u1, u2, w) in f.keys()]
    return ValuationValue(SElem.of(ex.lattice, members))
