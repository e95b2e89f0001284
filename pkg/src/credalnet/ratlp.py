"""Exact rational linear programming.

A dense-tableau two-phase simplex over ``gmpy2.mpq``.  Entering columns are
picked by Dantzig's rule; after a run of degenerate pivots the solver falls
back to Bland's least-index rule until the objective moves again, which
rules out cycling.  Everything is exact, so a returned optimum satisfies its
constraints with equality where claimed, not to a tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from gmpy2 import mpq

from .model import rational

RELATIONS = ("<=", "=", ">=")
_ZERO = mpq(0)
_MPQ = type(_ZERO)
_DEGENERATE_STREAK = 25


def _q(x):
    if isinstance(x, _MPQ):
        return x
    if isinstance(x, int):
        return mpq(x)
    x = rational(x)
    return mpq(x.numerator, x.denominator)


@dataclass(frozen=True)
class Constraint:
    """``coeffs . x  rel  rhs``.  ``coeffs`` is dense or a ``{index: value}`` map."""

    coeffs: Sequence | Mapping
    rel: str
    rhs: Fraction = Fraction(0)

    def __post_init__(self):
        if self.rel not in RELATIONS:
            raise ValueError(f"unknown relation {self.rel!r}")

    def items(self):
        if isinstance(self.coeffs, Mapping):
            return self.coeffs.items()
        return enumerate(self.coeffs)

    def lhs(self, x: Sequence) -> Fraction:
        return sum((rational(a) * x[j] for j, a in self.items()), Fraction(0))

    def satisfied(self, x: Sequence) -> bool:
        lhs, rhs = self.lhs(x), rational(self.rhs)
        return {"<=": lhs <= rhs, "=": lhs == rhs, ">=": lhs >= rhs}[self.rel]


@dataclass
class LinearProgram:
    n_vars: int
    objective: Sequence
    constraints: list[Constraint] = field(default_factory=list)
    direction: str = "min"
    nonneg: Sequence[bool] | None = None

    def __post_init__(self):
        if self.direction not in ("min", "max"):
            raise ValueError("direction must be 'min' or 'max'")
        if len(self.objective) != self.n_vars:
            raise ValueError("objective length does not match variable count")
        for c in self.constraints:
            if not isinstance(c.coeffs, Mapping) and len(c.coeffs) != self.n_vars:
                raise ValueError("constraint length does not match variable count")
            if isinstance(c.coeffs, Mapping) and any(not 0 <= j < self.n_vars for j in c.coeffs):
                raise ValueError("constraint refers to a missing variable")

    def add(self, coeffs, rel, rhs=0) -> None:
        self.constraints.append(Constraint(coeffs, rel, rational(rhs)))

    def is_nonneg(self, j: int) -> bool:
        return True if self.nonneg is None else bool(self.nonneg[j])


@dataclass(frozen=True)
class LpSolution:
    status: str  # optimal | infeasible | unbounded
    value: Fraction | None = None
    point: tuple[Fraction, ...] | None = None

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


class _Tableau:
    """Sparse rows ``{column: a}`` with the right-hand side under key ``RHS``.

    Cost rows use the same layout and hold reduced costs, with ``-z`` under
    ``RHS``.  The equality-constrained tableaux built from credal sets stay
    a few percent dense, so dict rows are much cheaper than dense lists.
    """

    def __init__(self, rows, basis, costs):
        self.rows = rows
        self.basis = basis
        self.costs = costs
        # initial basis columns in row order; they define the lexicographic ratio test
        self.lexpos = {b: k for k, b in enumerate(basis)}

    def pivot(self, r: int, c: int) -> None:
        prow = self.rows[r]
        piv = prow[c]
        if piv != 1:
            inv = 1 / piv
            prow = {j: x * inv for j, x in prow.items()}
            self.rows[r] = prow
        items = list(prow.items())
        for k, row in enumerate(self.rows):
            if k != r:
                f = row.get(c)
                if f:
                    _axpy(row, f, items)
        for row in self.costs:
            f = row.get(c)
            if f:
                _axpy(row, f, items)
        self.basis[r] = c

    def _lex_less(self, k: int, m: int, c) -> bool:
        """Is row ``k`` / a_kc lexicographically below row ``m`` / a_mc on the initial basis?"""
        rk, rm = self.rows[k], self.rows[m]
        ak, am = rk[c], rm[c]
        pos = self.lexpos
        cols = sorted({j for j in rk if j in pos} | {j for j in rm if j in pos}, key=pos.__getitem__)
        for j in cols:
            u, v = rk.get(j, _ZERO) / ak, rm.get(j, _ZERO) / am
            if u != v:
                return u < v
        return self.basis[k] < self.basis[m]

    def optimize(self, cost: dict, allowed: int) -> str:
        """Minimize using cost row ``cost`` over columns ``< allowed``."""
        streak = 0
        limit = _DEGENERATE_STREAK * (len(self.rows) + 1)
        while True:
            if streak >= limit:
                neg = [j for j, v in cost.items() if j != RHS and j < allowed and v < 0]
                c = min(neg) if neg else None
            else:
                c, best = None, _ZERO
                for j, v in cost.items():
                    if j != RHS and j < allowed and (v < best or (v == best and c is not None and j < c)):
                        c, best = j, v
            if c is None:
                return "optimal"
            r, ratio = None, None
            for k, row in enumerate(self.rows):
                a = row.get(c)
                if a is not None and a > 0:
                    t = row.get(RHS, _ZERO) / a
                    if r is None or t < ratio:
                        r, ratio = k, t
                    elif t == ratio and (self.basis[k] < self.basis[r] if streak >= limit
                                         else self._lex_less(k, r, c)):
                        r = k
            if r is None:
                return "unbounded"
            streak = streak + 1 if ratio == 0 else 0
            self.pivot(r, c)


RHS = -1


def _axpy(row: dict, f, items) -> None:
    """``row -= f * prow`` in place, dropping exact zeros."""
    for j, x in items:
        v = row.get(j)
        if v is None:
            row[j] = -f * x
        else:
            v -= f * x
            if v:
                row[j] = v
            else:
                del row[j]


def _frac(x) -> Fraction:
    if isinstance(x, _MPQ):
        return Fraction(int(x.numerator), int(x.denominator))
    return rational(x)


def solve_lp(lp: LinearProgram) -> LpSolution:
    """Solve ``lp`` exactly; the optimum returned is a basic feasible solution."""
    sign = 1 if lp.direction == "min" else -1
    # columns: structural (x or x+), negative parts of free vars, slacks/surplus, artificials
    free = [j for j in range(lp.n_vars) if not lp.is_nonneg(j)]
    neg_col = {j: lp.n_vars + k for k, j in enumerate(free)}
    n_struct = lp.n_vars + len(free)
    n_slack = sum(1 for c in lp.constraints if c.rel != "=")
    rows, basis, needs_art = [], [], []
    slack_at = n_struct
    for con in lp.constraints:
        row = {}
        for j, a in con.items():
            if a:
                a = _q(a)
                row[j] = row.get(j, _ZERO) + a
                if j in neg_col:
                    row[neg_col[j]] = row.get(neg_col[j], _ZERO) - a
        row = {j: a for j, a in row.items() if a}
        rhs = _q(con.rhs)
        rel = con.rel
        if rhs < 0:
            row = {j: -a for j, a in row.items()}
            rhs = -rhs
            rel = {"<=": ">=", ">=": "<=", "=": "="}[rel]
        if rhs:
            row[RHS] = rhs
        if rel == "<=":
            row[slack_at] = mpq(1)
            basis.append(slack_at)
            slack_at += 1
            needs_art.append(False)
        else:
            if rel == ">=":
                row[slack_at] = mpq(-1)
                slack_at += 1
            basis.append(None)
            needs_art.append(True)
        rows.append(row)
    art0 = n_struct + n_slack
    art_at = art0
    for r, need in enumerate(needs_art):
        if need:
            rows[r][art_at] = mpq(1)
            basis[r] = art_at
            art_at += 1
    width = art_at

    cost2 = {}
    for j, c in enumerate(lp.objective):
        c = _q(c) * sign
        if c:
            cost2[j] = c
            if j in neg_col:
                cost2[neg_col[j]] = -c
    cost1 = {j: mpq(1) for j in range(art0, width)}
    tab = _Tableau(rows, basis, [cost1, cost2])
    # price out the initial basis
    for r, b in enumerate(basis):
        for cost in (cost1, cost2):
            f = cost.get(b)
            if f:
                _axpy(cost, f, list(rows[r].items()))

    if width > art0:
        tab.optimize(cost1, width)
        if cost1.get(RHS, _ZERO) != 0:
            return LpSolution("infeasible")
        # drive zero-level artificials out of the basis, dropping redundant rows
        r = 0
        while r < len(tab.rows):
            if tab.basis[r] >= art0:
                row = tab.rows[r]
                cands = [j for j in row if j != RHS and j < art0]
                if not cands:
                    del tab.rows[r]
                    del tab.basis[r]
                    continue
                tab.pivot(r, min(cands))
            r += 1
    tab.costs = [cost2]
    status = tab.optimize(cost2, art0)
    if status == "unbounded":
        return LpSolution("unbounded")
    values = {}
    for r, b in enumerate(tab.basis):
        values[b] = tab.rows[r].get(RHS, _ZERO)
    point = []
    for j in range(lp.n_vars):
        v = values.get(j, _ZERO)
        if j in neg_col:
            v -= values.get(neg_col[j], _ZERO)
        point.append(Fraction(int(v.numerator), int(v.denominator)))
    value = sum((_frac(c) * x for c, x in zip(lp.objective, point)), Fraction(0))
    return LpSolution("optimal", value, tuple(point))


def fractional_min(numerator: Sequence, denominator: Sequence, cone_constraints: Sequence,
                   nonneg: Sequence[bool] | None = None, extra: Sequence[Constraint] = ()) -> Fraction:
    """Minimize ``(c . p) / (d . p)`` over a homogeneous cone intersected with the simplex.

    ``cone_constraints`` are ``(coeffs, rel)`` pairs with ``rel`` in
    ``{"<=", "="}`` and right-hand side zero.  The ratio is scale invariant,
    so substituting ``y = p / (d . p)`` turns the problem into the LP
    ``min c . y`` subject to the cone, ``d . y = 1`` and ``y >= 0``.  The
    caller must make sure ``d . p > 0`` on every feasible ``p``.
    """
    n = len(numerator)
    lp = LinearProgram(n, list(numerator), nonneg=nonneg)
    for coeffs, rel in cone_constraints:
        lp.add(coeffs, rel, 0)
    for con in extra:
        lp.constraints.append(con)
    lp.add(list(denominator), "=", 1)
    sol = solve_lp(lp)
    if not sol.optimal:
        raise ValueError(f"transformed linear-fractional program is {sol.status}; "
                         "the denominator is not bounded away from zero")
    return sol.value
