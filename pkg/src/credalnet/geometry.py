"""Exact polytope helpers for local credal sets.

Vertex-to-facet conversion is brute force over d-subsets of extrema, which
is ample for the small state spaces local credal sets live on.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Sequence

from .model import CredalSpec, Facet
from .ratlp import LinearProgram, solve_lp

MAX_FACET_CARD = 5


def rref(rows: Sequence[Sequence[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form and pivot columns."""
    m = [list(map(Fraction, r)) for r in rows]
    pivots = []
    ncols = len(m[0]) if m else 0
    r = 0
    for c in range(ncols):
        p = next((k for k in range(r, len(m)) if m[k][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for k in range(len(m)):
            if k != r and m[k][c] != 0:
                f = m[k][c]
                m[k] = [a - f * b for a, b in zip(m[k], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def nullspace(rows: Sequence[Sequence[Fraction]], ncols: int) -> list[list[Fraction]]:
    """Basis of ``{a : row . a = 0 for every row}``."""
    if not rows:
        return [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    red, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for row, pc in zip(red, pivots):
            v[pc] = -row[fc]
        basis.append(v)
    return basis


def in_hull(point: Sequence, points: Sequence[Sequence]) -> bool:
    """LP feasibility: is ``point`` a convex combination of ``points``?"""
    if not points:
        return False
    k = len(points)
    lp = LinearProgram(k, [0] * k)
    lp.add([1] * k, "=", 1)
    for z in range(len(point)):
        lp.add([p[z] for p in points], "=", point[z])
    return solve_lp(lp).optimal


def non_extreme_indices(extrema: Sequence[Sequence]) -> list[int]:
    """Indices of listed points that are convex combinations of the others.

    Of a group of identical points every copy but the first is reported.
    """
    out = []
    for k, e in enumerate(extrema):
        others = [p for j, p in enumerate(extrema) if j != k and not (j > k and p == e)]
        if in_hull(e, others):
            out.append(k)
    return out


def _affine_frame(points):
    """Origin, independent direction basis and local coordinates of ``points``."""
    origin = points[0]
    dirs = [[a - b for a, b in zip(p, origin)] for p in points[1:]]
    basis = []
    for d in dirs:
        if any(d) and (not basis or len(rref(basis + [d])[1]) > len(basis)):
            basis.append(d)
    coords = [_coordinates([a - b for a, b in zip(p, origin)], basis) for p in points]
    return origin, basis, coords


def _coordinates(vec, basis):
    """Solve ``sum_k y_k basis[k] = vec`` exactly (vec lies in the span)."""
    if not basis:
        return []
    d = len(basis)
    aug = [[basis[k][z] for k in range(d)] + [vec[z]] for z in range(len(vec))]
    red, pivots = rref(aug)
    y = [Fraction(0)] * d
    for row, pc in zip(red, pivots):
        y[pc] = row[-1]
    return y


def _solve_square(mat, rhs):
    aug = [list(r) + [b] for r, b in zip(mat, rhs)]
    red, _ = rref(aug)
    return [row[-1] for row in red]


def _canonical(coeffs, bound):
    """Normalize ``a . q <= b`` modulo adding multiples of ``sum q = 1``.

    Prefers the representative with most zero coefficients (then the
    earliest nonzero), scaled so the largest magnitude is one.
    """
    best = None
    for t in [Fraction(0)] + [-a for a in coeffs]:
        a = [x + t for x in coeffs]
        nz = [k for k, x in enumerate(a) if x != 0]
        if not nz:
            continue
        key = (-(len(a) - len(nz)), nz[0], t != 0)
        if best is None or key < best[0]:
            best = (key, a, bound + t)
    _, a, b = best
    scale = max(abs(x) for x in a)
    return tuple(x / scale for x in a), b / scale


def v_to_h(spec: CredalSpec | Sequence[Sequence], cardinality: int) -> list[Facet]:
    """Complete facet description of the convex hull of the extrema.

    The affine hull is returned as equality facets (the trivial ``sum q = 1``
    is omitted); proper faces as ``<=`` facets.  Every extreme satisfies
    every facet and each inequality is tight at one or more extrema.
    """
    if cardinality > MAX_FACET_CARD:
        raise ValueError("facet enumeration unsupported at this cardinality")
    points = [tuple(map(Fraction, e)) for e in (spec.extrema if isinstance(spec, CredalSpec) else spec)]
    points = list(dict.fromkeys(points))
    origin, basis, coords = _affine_frame(points)
    d = len(basis)
    facets = []
    for a in nullspace(basis, cardinality):
        if all(x == a[0] for x in a):
            continue
        b = sum(x * o for x, o in zip(a, origin))
        facets.append(Facet(tuple(a), b, equality=True))
    if d == 0:
        return facets
    # lift local coordinates back: a = U (U^T U)^-1 w satisfies a . (q - origin) = w . y
    gram = [[sum(u * v for u, v in zip(bi, bj)) for bj in basis] for bi in basis]
    seen = set()
    for subset in itertools.combinations(range(len(points)), d):
        ys = [coords[k] for k in subset]
        mat = [list(y) + [Fraction(-1)] for y in ys]
        ns = nullspace(mat, d + 1)
        if len(ns) != 1:
            continue
        w, c = ns[0][:d], ns[0][d]
        vals = [sum(wk * yk for wk, yk in zip(w, y)) for y in coords]
        if all(v <= c for v in vals):
            pass
        elif all(v >= c for v in vals):
            w, c = [-x for x in w], -c
        else:
            continue
        g = _solve_square(gram, w)
        a = [sum(basis[k][z] * g[k] for k in range(d)) for z in range(cardinality)]
        b = c + sum(x * o for x, o in zip(a, origin))
        key = _canonical(a, b)
        if key not in seen:
            seen.add(key)
            facets.append(Facet(key[0], key[1]))
    return facets
