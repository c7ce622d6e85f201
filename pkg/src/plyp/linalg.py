"""Exact rational linear algebra on plain tuples.

Vectors are tuples of ``int`` or ``fractions.Fraction``; matrices are tuples
of row vectors.  Everything here is exact: no floats, no rounding.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Optional, Sequence

Vec = tuple
Mat = tuple


def vec(xs: Iterable) -> Vec:
    return tuple(xs)


def dot(a: Sequence, b: Sequence):
    if len(a) != len(b):
        raise ValueError(f"dot: length {len(a)} vs {len(b)}")
    return sum(x * y for x, y in zip(a, b))


def vadd(a: Sequence, b: Sequence) -> Vec:
    return tuple(x + y for x, y in zip(a, b))


def vsub(a: Sequence, b: Sequence) -> Vec:
    return tuple(x - y for x, y in zip(a, b))


def vscale(c, a: Sequence) -> Vec:
    return tuple(c * x for x in a)


def vneg(a: Sequence) -> Vec:
    return tuple(-x for x in a)


def is_zero_vec(a: Sequence) -> bool:
    return all(x == 0 for x in a)


def mat(rows: Iterable[Iterable]) -> Mat:
    return tuple(tuple(r) for r in rows)


def identity(n: int) -> Mat:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def mat_vec(m: Mat, v: Sequence) -> Vec:
    return tuple(dot(row, v) for row in m)


def mat_mul(a: Mat, b: Mat) -> Mat:
    bt = transpose(b)
    return tuple(tuple(dot(row, col) for col in bt) for row in a)


def transpose(m: Mat) -> Mat:
    return tuple(zip(*m)) if m else ()


def _as_fraction_rows(rows: Sequence[Sequence]) -> list[list[Fraction]]:
    return [[Fraction(x) for x in row] for row in rows]


def rank(m: Sequence[Sequence]) -> int:
    rows = _as_fraction_rows(m)
    if not rows:
        return 0
    ncols = len(rows[0])
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        r += 1
        if r == len(rows):
            break
    return r


def solve(a: Sequence[Sequence], b: Sequence) -> Optional[Vec]:
    """Solve ``a @ x = b`` exactly.

    Returns the unique solution, or None when the system is inconsistent or
    underdetermined (the callers here always want a unique answer).
    """
    rows = _as_fraction_rows(a)
    rhs = [Fraction(x) for x in b]
    if len(rows) != len(rhs):
        raise ValueError("solve: shape mismatch")
    if not rows:
        return ()
    ncols = len(rows[0])
    aug = [row + [r] for row, r in zip(rows, rhs)]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(aug)) if aug[i][c] != 0), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        inv = 1 / aug[r][c]
        aug[r] = [x * inv for x in aug[r]]
        for i in range(len(aug)):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
    for i in range(r, len(aug)):
        if aug[i][ncols] != 0:
            return None  # inconsistent
    if r < ncols:
        return None  # not unique
    x = [Fraction(0)] * ncols
    for i, c in enumerate(pivots):
        x[c] = aug[i][ncols]
    return tuple(x)


def inverse(m: Sequence[Sequence]) -> Optional[Mat]:
    n = len(m)
    if n == 0:
        return ()
    if any(len(row) != n for row in m):
        raise ValueError("inverse: not square")
    cols = []
    for j in range(n):
        e = [1 if i == j else 0 for i in range(n)]
        x = solve(m, e)
        if x is None:
            return None
        cols.append(x)
    return transpose(mat(cols))


def det(m: Sequence[Sequence]) -> Fraction:
    """Determinant by fraction-free elimination (Bareiss)."""
    n = len(m)
    if n == 0:
        return Fraction(1)
    a = _as_fraction_rows(m)
    sign = 1
    prev = Fraction(1)
    for k in range(n - 1):
        if a[k][k] == 0:
            piv = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if piv is None:
                return Fraction(0)
            a[k], a[piv] = a[piv], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev
            a[i][k] = Fraction(0)
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def primitive(v: Sequence) -> Vec:
    """Scale a rational vector to a primitive integer vector (gcd 1, first
    nonzero entry keeps its sign)."""
    fr = [Fraction(x) for x in v]
    if all(x == 0 for x in fr):
        return tuple(0 for _ in fr)
    from math import lcm

    den = 1
    for x in fr:
        den = lcm(den, x.denominator)
    ints = [int(x * den) for x in fr]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    return tuple(x // g for x in ints)


def nullspace(rows: Sequence[Sequence], dim: int) -> list[Vec]:
    """Primitive integer basis of the kernel of the row system."""
    work = _as_fraction_rows(rows) if rows else []
    pivots: list[int] = []
    r = 0
    for c in range(dim):
        piv = next((i for i in range(r, len(work)) if work[i][c] != 0), None)
        if piv is None:
            continue
        work[r], work[piv] = work[piv], work[r]
        inv = 1 / work[r][c]
        work[r] = [x * inv for x in work[r]]
        for i in range(len(work)):
            if i != r and work[i][c] != 0:
                f = work[i][c]
                work[i] = [x - f * y for x, y in zip(work[i], work[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(dim) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * dim
        v[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -work[i][fc]
        basis.append(primitive(v))
    return basis


def as_int_vec(v: Sequence) -> Optional[tuple[int, ...]]:
    """Cast to an integer tuple if every entry is integral, else None."""
    if all(type(x) is int for x in v):
        return tuple(v)
    out = []
    for x in v:
        f = Fraction(x)
        if f.denominator != 1:
            return None
        out.append(int(f))
    return tuple(out)
