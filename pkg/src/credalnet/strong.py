"""Generalized Bayes rule under strong independence.

A conditional expectation is a ratio of two linear functions of the joint
pmf, so its minimum over the strong extension is attained at an extreme
point, i.e. at a product of local extrema.  ``gbr_strong`` therefore
enumerates extrema selections exhaustively.  Nodes that are not ancestors
of the query or the evidence are barren: their choice cannot change the
value, so they are pinned to extreme 0 (the lexicographic tie-break would
pick that anyway) and not enumerated.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from gmpy2 import mpq

from .errors import EngineMismatchError, GbrUndefinedError, SizeCapError
from .model import (CredalNetwork, GbrTask, absorb, check_task, degenerate, masses_from_table,
                    start_table)

DEFAULT_MAX_COMBOS = 2 ** 24
DEFAULT_MAX_ROOT_ASSIGNMENTS = 2 ** 20


@dataclass(frozen=True, order=True)
class ExtremaSelection:
    """``indices[i][k]``: extreme chosen for node ``i`` under configuration ``k``."""

    indices: tuple[tuple[int, ...], ...]

    def pmf(self, net: CredalNetwork, i: int, k: int):
        return net.local_specs[i][k].extrema[self.indices[i][k]]

    def joint(self, net: CredalNetwork) -> dict:
        from .model import joint_pmf

        return joint_pmf(net, lambda i, k: self.pmf(net, i, k))


def count_selections(net: CredalNetwork, nodes: Sequence[int] | None = None) -> int:
    total = 1
    for i in (range(net.n) if nodes is None else nodes):
        for spec in net.local_specs[i]:
            total *= len(spec.extrema)
    return total


def _node_options(net: CredalNetwork, i: int):
    return list(itertools.product(*(range(len(s.extrema)) for s in net.local_specs[i])))


def joint_extrema(net: CredalNetwork, cap: int = DEFAULT_MAX_COMBOS) -> Iterator[ExtremaSelection]:
    """Every extrema selection once, in lexicographic order of the indices."""
    total = count_selections(net)
    if total > cap:
        raise SizeCapError(f"strong enumeration too large: {total} selections (cap {cap})")
    per_node = [_node_options(net, i) for i in range(net.n)]
    for combo in itertools.product(*per_node):
        yield ExtremaSelection(tuple(combo))


@dataclass(frozen=True)
class StrongResult:
    mu: Fraction
    selection: ExtremaSelection
    min_evidence_probability: Fraction
    n_selections: int


def _to_mpq(pmf):
    return tuple(mpq(x.numerator, x.denominator) for x in pmf)


def strong_search(net: CredalNetwork, task: GbrTask, cap: int = DEFAULT_MAX_COMBOS) -> StrongResult:
    """Exhaustive strong-extension GBR, reporting the optimizing selection."""
    check_task(net, task)
    lower, sign = task.lower_form()
    evidence = lower.evidence_map
    query = lower.query
    relevant = net.ancestral_set([query, *evidence])
    order, table0, kept0, remaining0 = start_table(net, relevant, mpq(1))
    n_sel = count_selections(net, order)
    if n_sel > cap:
        raise SizeCapError(f"strong enumeration too large: {n_sel} selections (cap {cap})")
    options = {i: _node_options(net, i) for i in order}
    pmfs = {i: [[_to_mpq(e) for e in spec.extrema] for spec in net.local_specs[i]] for i in order}
    f = [mpq(x.numerator, x.denominator) for x in lower.f]
    best = {"ratio": None, "sel": None, "min_den": None}
    chosen = {}

    def leaf(table, kept):
        masses = masses_from_table(net, table, kept, query, mpq(0))
        den = sum(masses)
        if best["min_den"] is None or den < best["min_den"]:
            best["min_den"] = den
        if den == 0:
            return
        ratio = sum(fv * m for fv, m in zip(f, masses)) / den
        if best["ratio"] is None or ratio <= best["ratio"]:
            sel = tuple(chosen.get(i, (0,) * net.n_configs(i)) for i in range(net.n))
            if best["ratio"] is None or ratio < best["ratio"] or sel < best["sel"]:
                best["ratio"], best["sel"] = ratio, sel

    def descend(level, table, kept, remaining):
        if level == len(order):
            leaf(table, kept)
            return
        i = order[level]
        rows = pmfs[i]
        for opt in options[i]:
            chosen[i] = opt
            nxt = absorb(net, table, kept, remaining, i,
                         lambda k: rows[k][opt[k]], evidence, query)
            descend(level + 1, *nxt)
        del chosen[i]

    descend(0, table0, kept0, remaining0)
    min_den = Fraction(int(best["min_den"].numerator), int(best["min_den"].denominator))
    if min_den == 0:
        raise GbrUndefinedError("GBR undefined: min p(evidence) = 0")
    mu = Fraction(int(best["ratio"].numerator), int(best["ratio"].denominator))
    return StrongResult(sign * mu, ExtremaSelection(best["sel"]), min_den, n_sel)


def gbr_strong(net: CredalNetwork, task: GbrTask, cap: int = DEFAULT_MAX_COMBOS) -> Fraction:
    """Lower (or upper) posterior expectation under strong independence."""
    return strong_search(net, task, cap).mu


# --- vacuous roots, precise elsewhere ------------------------------------

def vacuous_root_violation(net: CredalNetwork, task: GbrTask) -> str | None:
    """Why ``net``/``task`` is not in vacuous-root form, or ``None`` if it is."""
    if task.evidence:
        return "evidence must be empty"
    if not net.parents(task.query):
        return "query node is a root"
    for i in range(net.n):
        for spec in net.local_specs[i]:
            if spec.is_singleton:
                continue
            if net.parents(i):
                return f"node {i} is imprecise but not a root"
            if not spec.is_vacuous:
                return f"root node {i} is imprecise but not vacuous"
    return None


@dataclass(frozen=True)
class VacuousRootResult:
    mu: Fraction
    roots: tuple[int, ...]
    assignment: tuple[int, ...]
    n_assignments: int


def vacuous_root_search(net: CredalNetwork, task: GbrTask,
                  cap: int = DEFAULT_MAX_ROOT_ASSIGNMENTS) -> VacuousRootResult:
    """Minimize the precise expectation over joint states of the vacuous roots."""
    check_task(net, task)
    reason = vacuous_root_violation(net, task)
    if reason is not None:
        raise EngineMismatchError(f"network not in vacuous-root form: {reason}")
    lower, sign = task.lower_form()
    query = lower.query
    relevant = net.ancestral_set([query])
    roots = tuple(i for i in sorted(relevant) if not net.local_specs[i][0].is_singleton)
    n_assign = 1
    for r in roots:
        n_assign *= net.cards[r]
    if n_assign > cap:
        raise SizeCapError(f"too many vacuous-root assignments: {n_assign} (cap {cap})")
    pmfs = {i: [_to_mpq(s.extrema[0]) for s in net.local_specs[i]] for i in relevant if i not in roots}
    f = [mpq(x.numerator, x.denominator) for x in lower.f]
    order, table0, kept0, remaining0 = start_table(net, relevant, mpq(1))
    best, best_x = None, None
    for x_r in itertools.product(*(range(net.cards[r]) for r in roots)):
        clamp = dict(zip(roots, x_r))
        table, kept, remaining = table0, kept0, remaining0
        for i in order:
            if i in clamp:
                row = [_to_mpq(degenerate(net.cards[i], clamp[i]))]
            else:
                row = pmfs[i]
            table, kept, remaining = absorb(net, table, kept, remaining, i,
                                            lambda k, row=row: row[k], {}, query)
        masses = masses_from_table(net, table, kept, query, mpq(0))
        g = sum(fv * m for fv, m in zip(f, masses))
        if best is None or g < best:
            best, best_x = g, x_r
    full = tuple(best_x[roots.index(i)] if i in roots else 0
                 for i in range(net.n) if not net.parents(i) and not net.local_specs[i][0].is_singleton)
    all_roots = tuple(i for i in range(net.n) if not net.parents(i) and not net.local_specs[i][0].is_singleton)
    mu = Fraction(int(best.numerator), int(best.denominator))
    return VacuousRootResult(sign * mu, all_roots, full, n_assign)


def vacuous_root_inference(net: CredalNetwork, task: GbrTask,
                     cap: int = DEFAULT_MAX_ROOT_ASSIGNMENTS) -> Fraction:
    """GBR without evidence on a network whose only imprecision is vacuous roots.

    Equal to both the strong and the epistemic value on such networks.
    """
    return vacuous_root_search(net, task, cap).mu
