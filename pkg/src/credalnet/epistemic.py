"""Generalized Bayes rule under epistemic irrelevance.

The epistemic extension is written out as a polytope over joint pmfs: for
every node ``i``, every assignment to its non-descendants and every facet
``a . q <= b`` of the local set, the homogeneous constraint

    sum_{x_i} a(x_i) p(x_i, x_nd) - b p(x_nd) <= 0

must hold.  Requiring only containment ``C(X_i | x_nd) in Q(X_i | x_pa)``
is enough because the extension is the largest such set.  Atoms where
``p(x_nd) = 0`` make the constraint vacuous, matching conditional sets that
are only defined on positive-probability events.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from gmpy2 import mpq

from .errors import GbrUndefinedError, SizeCapError
from .geometry import MAX_FACET_CARD, v_to_h
from .model import CredalNetwork, GbrTask, check_task
from .ratlp import Constraint, LinearProgram, fractional_min, solve_lp

DEFAULT_MAX_ATOMS = 2 ** 16
DEFAULT_HALVINGS = 60


@dataclass(frozen=True)
class PolytopeRow:
    coeffs: dict  # atom index -> mpq
    rel: str      # "<=" or "="
    node: int
    nd_assignment: tuple[tuple[int, int], ...]
    facet: int


@dataclass(frozen=True)
class EpistemicPolytope:
    cards: tuple[int, ...]
    rows: tuple[PolytopeRow, ...]

    @property
    def n_atoms(self) -> int:
        k = 1
        for c in self.cards:
            k *= c
        return k

    def atoms(self):
        return itertools.product(*(range(c) for c in self.cards))

    def atom_index(self, x) -> int:
        idx = 0
        for c, v in zip(self.cards, x):
            idx = idx * c + v
        return idx

    def cone(self) -> list[tuple[dict, str]]:
        return [(r.coeffs, r.rel) for r in self.rows]

    def contains(self, p) -> bool:
        """``p``: sequence of atom masses in lexicographic atom order."""
        if any(x < 0 for x in p) or sum(p) != 1:
            return False
        for r in self.rows:
            lhs = sum(c * p[j] for j, c in r.coeffs.items())
            if (lhs != 0) if r.rel == "=" else (lhs > 0):
                return False
        return True


@lru_cache(maxsize=64)
def _facets(spec, card):
    if spec.facets is not None:
        return tuple(spec.facets)
    return tuple(v_to_h(spec, card))


def epistemic_polytope(net: CredalNetwork, max_atoms: int = DEFAULT_MAX_ATOMS) -> EpistemicPolytope:
    n_atoms = net.n_atoms()
    if n_atoms > max_atoms:
        raise SizeCapError(f"epistemic extension too large: {n_atoms} atoms (cap {max_atoms})")
    if max(net.cards) > MAX_FACET_CARD:
        raise SizeCapError(f"facet enumeration unsupported above cardinality {MAX_FACET_CARD}")
    return _build_polytope(net)


@lru_cache(maxsize=32)
def _build_polytope(net: CredalNetwork) -> EpistemicPolytope:
    atoms = list(itertools.product(*(range(c) for c in net.cards)))
    rows = []
    for i in range(net.n):
        nd = net.nondescendants(i)
        pa = net.parents(i)
        groups = {}
        for idx, x in enumerate(atoms):
            groups.setdefault(tuple(x[j] for j in nd), []).append((idx, x[i]))
        for key, members in groups.items():
            assign = dict(zip(nd, key))
            spec = net.spec(i, [assign[p] for p in pa])
            for k, facet in enumerate(_facets(spec, net.cards[i])):
                a = [mpq(x.numerator, x.denominator) for x in facet.coeffs]
                b = mpq(facet.bound.numerator, facet.bound.denominator)
                coeffs = {}
                for idx, xi in members:
                    c = a[xi] - b
                    if c:
                        coeffs[idx] = c
                if coeffs:
                    rows.append(PolytopeRow(coeffs, "=" if facet.equality else "<=",
                                            i, tuple(zip(nd, key)), k))
    return EpistemicPolytope(net.cards, tuple(rows))


@dataclass(frozen=True)
class EpistemicResult:
    mu: Fraction
    min_evidence_probability: Fraction
    n_atoms: int
    n_constraints: int


def _prepare(net, task, max_atoms, prune):
    check_task(net, task)
    if prune:
        sub, index = net.restrict(net.ancestral_set([task.query, *task.evidence_map]))
        task = GbrTask(index[task.query], task.f, {index[k]: v for k, v in task.evidence}, task.bound)
        net = sub
    return net, task, epistemic_polytope(net, max_atoms)


def _consistent(poly, evidence):
    return [int(all(x[j] == s for j, s in evidence.items())) for x in poly.atoms()]


def _lp(poly, objective):
    lp = LinearProgram(poly.n_atoms, objective)
    lp.constraints.extend(Constraint(c, rel, 0) for c, rel in poly.cone())
    lp.add([1] * poly.n_atoms, "=", 1)
    return lp


def _min_evidence(poly, evidence):
    if not evidence:
        return Fraction(1)
    sol = solve_lp(_lp(poly, _consistent(poly, evidence)))
    return sol.value


def _objective(poly, task, mu=Fraction(0)):
    ev = task.evidence_map
    mask = _consistent(poly, ev)
    return [(task.f[x[task.query]] - mu) * m for x, m in zip(poly.atoms(), mask)]


def phi_epistemic(net: CredalNetwork, task: GbrTask, mu, max_atoms: int = DEFAULT_MAX_ATOMS,
                  prune: bool = True) -> Fraction:
    """``min_p sum_{x ~ evidence} (f(x_q) - mu) p(x)`` over the epistemic extension."""
    net, task, poly = _prepare(net, task, max_atoms, prune)
    return solve_lp(_lp(poly, _objective(poly, task, Fraction(mu)))).value


def epistemic_search(net: CredalNetwork, task: GbrTask, method: str = "fractional",
                     max_atoms: int = DEFAULT_MAX_ATOMS, prune: bool = True,
                     halvings: int = DEFAULT_HALVINGS) -> EpistemicResult:
    lower, sign = task.lower_form()
    net, lower, poly = _prepare(net, lower, max_atoms, prune)
    ev = lower.evidence_map
    min_ev = _min_evidence(poly, ev)
    if min_ev == 0:
        raise GbrUndefinedError("GBR undefined: min p(evidence) = 0")
    if method == "fractional":
        if ev:
            mu = fractional_min(_objective(poly, lower), _consistent(poly, ev), poly.cone())
        else:
            mu = solve_lp(_lp(poly, _objective(poly, lower))).value
    elif method == "bisection":
        lo, hi = min(lower.f), max(lower.f)
        for _ in range(halvings):
            mid = (lo + hi) / 2
            if solve_lp(_lp(poly, _objective(poly, lower, mid))).value >= 0:
                lo = mid
            else:
                hi = mid
        mu = (lo + hi) / 2
    else:
        raise ValueError(f"unknown method {method!r}")
    return EpistemicResult(sign * mu, min_ev, poly.n_atoms, len(poly.rows))


def gbr_epistemic(net: CredalNetwork, task: GbrTask, method: str = "fractional",
                  max_atoms: int = DEFAULT_MAX_ATOMS, prune: bool = True,
                  halvings: int = DEFAULT_HALVINGS) -> Fraction:
    """Lower (or upper) posterior expectation under epistemic irrelevance.

    ``method="fractional"`` is exact.  ``method="bisection"`` halves the
    bracket ``[min f, max f]`` on the sign of the GBR function and returns
    the midpoint, so it is only accurate to ``(max f - min f) / 2**halvings``.
    With ``prune`` (default) nodes that are not ancestors of the query or
    evidence are dropped first; they cannot affect the value under either
    semantics.
    """
    return epistemic_search(net, task, method, max_atoms, prune, halvings).mu
