"""Credal network data model, validation and precise-network evaluation.

All numeric parameters are :class:`fractions.Fraction`.  Parent
configurations of a node are keyed by its parents sorted by node index and
enumerated lexicographically, so ``local_specs[i][k]`` is the credal set of
node ``i`` under its ``k``-th parent configuration.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import cached_property
from typing import Callable, Iterable, Mapping, Sequence

from .errors import GbrUndefinedError, ValidationError

Rational = Fraction


def rational(value) -> Fraction:
    """Coerce ``value`` to an exact rational.

    Integers, fractions and strings such as ``"3/8"`` or ``"0.25"`` are
    accepted.  Floats are rejected: they would smuggle rounding in.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, float):
        raise TypeError(f"floating-point value {value!r} not accepted; write it as 'num/den'")
    # gmpy2.mpq and friends
    return Fraction(value)


def _pmf(values: Iterable) -> tuple[Fraction, ...]:
    return tuple(rational(v) for v in values)


@dataclass(frozen=True)
class Variable:
    name: str
    card: int
    labels: tuple[str, ...] | None = None

    def label(self, state: int) -> str:
        return self.labels[state] if self.labels else str(state)


@dataclass(frozen=True)
class Facet:
    """Linear inequality ``coeffs . q <= bound`` (or ``==`` when ``equality``)."""

    coeffs: tuple[Fraction, ...]
    bound: Fraction
    equality: bool = False

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _pmf(self.coeffs))
        object.__setattr__(self, "bound", rational(self.bound))

    def value(self, q: Sequence) -> Fraction:
        return sum((a * x for a, x in zip(self.coeffs, q)), Fraction(0))

    def holds(self, q: Sequence) -> bool:
        lhs = self.value(q)
        return lhs == self.bound if self.equality else lhs <= self.bound


@dataclass(frozen=True)
class CredalSpec:
    """A local credal set given by its extreme points (and optionally facets)."""

    extrema: tuple[tuple[Fraction, ...], ...]
    facets: tuple[Facet, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "extrema", tuple(_pmf(e) for e in self.extrema))
        if self.facets is not None:
            object.__setattr__(self, "facets", tuple(self.facets))

    @classmethod
    def singleton(cls, pmf: Iterable) -> "CredalSpec":
        return cls((tuple(pmf),))

    @classmethod
    def vacuous(cls, card: int) -> "CredalSpec":
        return cls(tuple(degenerate(card, z) for z in range(card)))

    @property
    def card(self) -> int:
        return len(self.extrema[0])

    @property
    def is_singleton(self) -> bool:
        return len(self.extrema) == 1

    @property
    def is_vacuous(self) -> bool:
        return set(self.extrema) == {degenerate(self.card, z) for z in range(self.card)}


def degenerate(card: int, state: int) -> tuple[Fraction, ...]:
    return tuple(Fraction(int(z == state)) for z in range(card))


@dataclass(frozen=True)
class CredalNetwork:
    variables: tuple[Variable, ...]
    arcs: tuple[tuple[int, int], ...]
    local_specs: tuple[tuple[CredalSpec, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "arcs", tuple(sorted({(int(a), int(b)) for a, b in self.arcs})))
        object.__setattr__(self, "local_specs", tuple(tuple(s) for s in self.local_specs))

    @classmethod
    def build(cls, variables, arcs, specs) -> "CredalNetwork":
        """Convenience constructor.

        ``variables`` may be ``Variable`` objects or ``(name, card)`` pairs.
        Each entry of ``specs`` is a :class:`CredalSpec` (parentless node), a
        mapping from parent configuration tuples to specs, or a sequence of
        specs indexed by configuration.  Inside mappings and sequences a spec
        may also be given as a plain list of extrema.
        """
        variables = tuple(v if isinstance(v, Variable) else Variable(*v) for v in variables)
        shell = cls(variables, arcs, tuple(() for _ in variables))
        local = []
        for i, entry in enumerate(specs):
            if isinstance(entry, CredalSpec):
                row = [entry]
            elif isinstance(entry, Mapping):
                row = [entry[c] for c in shell.configs(i)]
            else:
                row = list(entry)
            local.append(tuple(s if isinstance(s, CredalSpec) else CredalSpec(tuple(s)) for s in row))
        return cls(variables, arcs, tuple(local))

    # --- graph structure -------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.variables)

    @cached_property
    def cards(self) -> tuple[int, ...]:
        return tuple(v.card for v in self.variables)

    @cached_property
    def _parents(self) -> tuple[tuple[int, ...], ...]:
        pa = [[] for _ in self.variables]
        for a, b in self.arcs:
            if 0 <= b < self.n:
                pa[b].append(a)
        return tuple(tuple(sorted(p)) for p in pa)

    @cached_property
    def _children(self) -> tuple[tuple[int, ...], ...]:
        ch = [[] for _ in self.variables]
        for a, b in self.arcs:
            if 0 <= a < self.n:
                ch[a].append(b)
        return tuple(tuple(sorted(c)) for c in ch)

    def parents(self, i: int) -> tuple[int, ...]:
        return self._parents[i]

    def children(self, i: int) -> tuple[int, ...]:
        return self._children[i]

    def roots(self) -> list[int]:
        return [i for i in range(self.n) if not self._parents[i]]

    @cached_property
    def topological_order(self) -> tuple[int, ...]:
        """Kahn's algorithm, smallest index first.  Raises on cycles."""
        indeg = [len(p) for p in self._parents]
        ready = sorted(i for i in range(self.n) if indeg[i] == 0)
        order = []
        while ready:
            i = ready.pop(0)
            order.append(i)
            for c in self._children[i]:
                indeg[c] -= 1
                if indeg[c] == 0:
                    ready.append(c)
                    ready.sort()
        if len(order) != self.n:
            raise ValueError("cycle detected")
        return tuple(order)

    @cached_property
    def _descendants(self) -> tuple[frozenset, ...]:
        out = [set() for _ in range(self.n)]
        for i in reversed(self.topological_order):
            for c in self._children[i]:
                out[i].add(c)
                out[i] |= out[c]
        return tuple(frozenset(d) for d in out)

    def descendants(self, i: int) -> frozenset:
        return self._descendants[i]

    def nondescendants(self, i: int) -> tuple[int, ...]:
        """Nodes not reachable from ``i``, excluding ``i`` itself."""
        d = self._descendants[i]
        return tuple(j for j in range(self.n) if j != i and j not in d)

    def ancestral_set(self, nodes: Iterable[int]) -> frozenset:
        seen = set()
        stack = list(nodes)
        while stack:
            j = stack.pop()
            if j not in seen:
                seen.add(j)
                stack.extend(self._parents[j])
        return frozenset(seen)

    # --- parent configurations -------------------------------------------

    def configs(self, i: int) -> list[tuple[int, ...]]:
        return list(itertools.product(*(range(self.cards[p]) for p in self.parents(i))))

    def n_configs(self, i: int) -> int:
        k = 1
        for p in self.parents(i):
            k *= self.cards[p]
        return k

    @cached_property
    def _strides(self) -> tuple[tuple[int, ...], ...]:
        out = []
        for i in range(self.n):
            pa = self.parents(i)
            s, acc = [0] * len(pa), 1
            for k in range(len(pa) - 1, -1, -1):
                s[k] = acc
                acc *= self.cards[pa[k]]
            out.append(tuple(s))
        return tuple(out)

    def config_index(self, i: int, config: Sequence[int]) -> int:
        return sum(s * x for s, x in zip(self._strides[i], config))

    def spec(self, i: int, config: Sequence[int] = ()) -> CredalSpec:
        return self.local_specs[i][self.config_index(i, config)]

    def spec_map(self, i: int) -> dict[tuple[int, ...], CredalSpec]:
        return dict(zip(self.configs(i), self.local_specs[i]))

    # --- derived networks -------------------------------------------------

    @property
    def is_precise(self) -> bool:
        return all(s.is_singleton for row in self.local_specs for s in row)

    def n_atoms(self) -> int:
        k = 1
        for c in self.cards:
            k *= c
        return k

    def with_spec(self, i: int, specs: Sequence[CredalSpec]) -> "CredalNetwork":
        local = list(self.local_specs)
        local[i] = tuple(specs)
        return replace(self, local_specs=tuple(local))

    def restrict(self, nodes: Iterable[int]) -> tuple["CredalNetwork", dict[int, int]]:
        """Sub-network on an ancestral node set, plus the old -> new index map."""
        keep = sorted(set(nodes))
        index = {old: new for new, old in enumerate(keep)}
        for i in keep:
            if any(p not in index for p in self.parents(i)):
                raise ValueError("node set is not ancestral")
        arcs = [(index[a], index[b]) for a, b in self.arcs if a in index and b in index]
        sub = CredalNetwork(tuple(self.variables[i] for i in keep), tuple(arcs),
                            tuple(self.local_specs[i] for i in keep))
        return sub, index

    def clamp(self, assignment: Mapping[int, int]) -> "CredalNetwork":
        """Replace the sets of root nodes in ``assignment`` by degenerate pmfs."""
        net = self
        for i, s in assignment.items():
            if self.parents(i):
                raise ValueError(f"node {i} is not a root")
            net = net.with_spec(i, [CredalSpec.singleton(degenerate(self.cards[i], s))])
        return net


@dataclass(frozen=True)
class GbrTask:
    """Lower (or upper) posterior expectation of ``f`` on ``query`` given evidence."""

    query: int
    f: tuple[Fraction, ...]
    evidence: tuple[tuple[int, int], ...] = ()
    bound: str = "lower"

    def __post_init__(self):
        object.__setattr__(self, "f", _pmf(self.f))
        ev = self.evidence.items() if isinstance(self.evidence, Mapping) else self.evidence
        object.__setattr__(self, "evidence", tuple(sorted((int(k), int(v)) for k, v in ev)))
        if self.bound not in ("lower", "upper"):
            raise ValueError(f"bound must be 'lower' or 'upper', not {self.bound!r}")

    @property
    def evidence_map(self) -> dict[int, int]:
        return dict(self.evidence)

    def negated(self) -> "GbrTask":
        """Same task on ``-f`` with the opposite bound."""
        return replace(self, f=tuple(-v for v in self.f),
                       bound="upper" if self.bound == "lower" else "lower")

    def lower_form(self) -> tuple["GbrTask", int]:
        """Return an equivalent lower task and the sign to apply to its result."""
        if self.bound == "lower":
            return self, 1
        return self.negated(), -1


def indicator(card: int, state: int) -> tuple[Fraction, ...]:
    return degenerate(card, state)


# --- validation -----------------------------------------------------------

def validate_network(net: CredalNetwork, check_minimality: bool = True) -> list[str]:
    """Return a list of findings; empty iff the network is well formed."""
    findings = []
    names = [v.name for v in net.variables]
    if len(set(names)) != len(names):
        findings.append("duplicate variable names")
    for i, v in enumerate(net.variables):
        if v.card < 2:
            findings.append(f"variable {i} ({v.name}): cardinality {v.card} < 2")
        if v.labels is not None and len(v.labels) != v.card:
            findings.append(f"variable {i} ({v.name}): {len(v.labels)} labels for cardinality {v.card}")
    for a, b in net.arcs:
        if not (0 <= a < net.n and 0 <= b < net.n):
            findings.append(f"arc ({a}, {b}) refers to a missing node")
        elif a == b:
            findings.append(f"self-loop at node {a}")
    if findings:
        return findings
    try:
        net.topological_order
    except ValueError:
        findings.append("cycle detected")
        return findings
    if len(net.local_specs) != net.n:
        findings.append(f"{len(net.local_specs)} local specifications for {net.n} nodes")
        return findings
    for i in range(net.n):
        configs = net.configs(i)
        if len(net.local_specs[i]) != len(configs):
            findings.append(f"node {i}: {len(net.local_specs[i])} credal sets for {len(configs)} parent configurations")
            continue
        for cfg, spec in zip(configs, net.local_specs[i]):
            where = f"node {i} config {list(cfg)}"
            findings.extend(f"{where}: {m}" for m in validate_spec(spec, net.cards[i], check_minimality))
    return findings


def validate_spec(spec: CredalSpec, card: int, check_minimality: bool = True) -> list[str]:
    findings = []
    if not spec.extrema:
        return ["empty credal set"]
    for k, e in enumerate(spec.extrema):
        if len(e) != card:
            findings.append(f"extreme {k} has {len(e)} entries, expected {card}")
            continue
        if any(x < 0 or x > 1 for x in e):
            findings.append(f"extreme {k}: probability outside [0, 1]")
        if sum(e) != 1:
            findings.append(f"extreme {k}: pmf not normalized (sums to {sum(e)})")
    if findings:
        return findings
    for j, facet in enumerate(spec.facets or ()):
        if len(facet.coeffs) != card:
            findings.append(f"facet {j} has {len(facet.coeffs)} coefficients, expected {card}")
            continue
        for k, e in enumerate(spec.extrema):
            if not facet.holds(e):
                findings.append(f"extreme {k} violates facet {j}")
    if check_minimality and len(spec.extrema) > 1:
        from .geometry import non_extreme_indices

        findings.extend(f"non-extreme point at index {k}" for k in non_extreme_indices(spec.extrema))
    return findings


def check_network(net: CredalNetwork) -> CredalNetwork:
    findings = validate_network(net)
    if findings:
        raise ValidationError(findings)
    return net


def validate_task(net: CredalNetwork, task: GbrTask) -> list[str]:
    findings = []
    if not 0 <= task.query < net.n:
        return [f"query node {task.query} out of range"]
    if len(task.f) != net.cards[task.query]:
        findings.append(f"f has {len(task.f)} values, query variable has {net.cards[task.query]} states")
    for node, state in task.evidence:
        if not 0 <= node < net.n:
            findings.append(f"evidence node {node} out of range")
        elif not 0 <= state < net.cards[node]:
            findings.append(f"evidence state {state} out of range for node {node}")
        elif node == task.query:
            findings.append("query node is part of the evidence")
    return findings


def check_task(net: CredalNetwork, task: GbrTask) -> GbrTask:
    findings = validate_task(net, task)
    if findings:
        raise ValidationError(findings)
    return task


# --- precise evaluation ---------------------------------------------------

PmfLookup = Callable[[int, int], Sequence]


def absorb(net: CredalNetwork, table: dict, kept: list, remaining: dict, i: int,
           pmf_of_config: Callable[[int], Sequence], evidence: Mapping[int, int], query: int):
    """Multiply node ``i`` into a partial joint table, then sum out finished nodes.

    ``table`` maps assignments of the ``kept`` nodes to masses; ``remaining``
    counts unprocessed children per node.  Returns the new triple without
    mutating the inputs.
    """
    pos = [kept.index(p) for p in net.parents(i)]
    strides = net._strides[i]
    states = (evidence[i],) if i in evidence else range(net.cards[i])
    new = {}
    for key, w in table.items():
        q = pmf_of_config(sum(s * key[p] for s, p in zip(strides, pos)))
        for x in states:
            qx = q[x]
            if qx:
                new[key + (x,)] = w * qx
    kept = kept + [i]
    remaining = dict(remaining)
    for p in net.parents(i):
        remaining[p] -= 1
    keep = [k for k, j in enumerate(kept) if remaining[j] > 0 or j == query]
    if len(keep) < len(kept):
        kept = [kept[k] for k in keep]
        merged = {}
        for key, w in new.items():
            sub = tuple(key[k] for k in keep)
            merged[sub] = merged[sub] + w if sub in merged else w
        new = merged
    return new, kept, remaining


def start_table(net: CredalNetwork, nodes, one=Fraction(1)):
    """Initial ``(order, table, kept, remaining)`` for :func:`absorb` over ``nodes``."""
    nodes = set(nodes)
    order = [i for i in net.topological_order if i in nodes]
    remaining = {i: sum(1 for c in net.children(i) if c in nodes) for i in order}
    return order, {(): one}, [], remaining


def masses_from_table(net: CredalNetwork, table: dict, kept: list, query: int, zero=Fraction(0)) -> list:
    masses = [zero for _ in range(net.cards[query])]
    qpos = kept.index(query)
    for key, w in table.items():
        masses[key[qpos]] += w
    return masses


def query_masses(net: CredalNetwork, pmf: PmfLookup, query: int,
                 evidence: Mapping[int, int], nodes: Iterable[int] | None = None,
                 one=Fraction(1)) -> list:
    """Return ``[sum_{x ~ evidence, x_q = s} prod_i pmf(i, cfg)(x_i) for s in states(q)]``.

    Variables are multiplied in topological order and summed out as soon as
    none of their children remain, so the working table stays small on
    sparse graphs.  ``nodes`` restricts the product to an ancestral subset
    (the complement must be barren, i.e. sum to one).  ``pmf(i, k)`` returns
    the pmf of node ``i`` under configuration index ``k``.
    """
    if nodes is None:
        nodes = net.ancestral_set([query, *evidence])
    order, table, kept, remaining = start_table(net, nodes, one)
    for i in order:
        table, kept, remaining = absorb(net, table, kept, remaining, i,
                                        lambda k, i=i: pmf(i, k), evidence, query)
    return masses_from_table(net, table, kept, query, one * 0)


def bn_expectation(net: CredalNetwork, task: GbrTask) -> Fraction:
    """Exact conditional expectation of ``task.f`` in a precise network.

    Sums the joint over all atoms consistent with the evidence (nodes that
    are not ancestors of the query or evidence are barren and skipped).
    """
    check_task(net, task)
    if not net.is_precise:
        raise ValueError("bn_expectation requires every local credal set to be a singleton")
    masses = query_masses(net, lambda i, k: net.local_specs[i][k].extrema[0],
                          task.query, task.evidence_map)
    total = sum(masses)
    if total == 0:
        raise GbrUndefinedError("evidence has probability zero")
    # bound is irrelevant for a precise network
    return sum((fv * m for fv, m in zip(task.f, masses)), Fraction(0)) / total


def joint_pmf(net: CredalNetwork, pmf: PmfLookup | None = None) -> dict[tuple[int, ...], Fraction]:
    """Full joint over all atoms by brute force (atoms in lexicographic order)."""
    if pmf is None:
        pmf = lambda i, k: net.local_specs[i][k].extrema[0]  # noqa: E731
    out = {}
    for x in itertools.product(*(range(c) for c in net.cards)):
        p = Fraction(1)
        for i in range(net.n):
            p *= pmf(i, net.config_index(i, [x[j] for j in net.parents(i)]))[x[i]]
            if not p:
                break
        out[x] = p
    return out
