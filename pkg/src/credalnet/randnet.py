"""Seeded random networks for property tests and benchmark corpora."""

from __future__ import annotations

import random
from fractions import Fraction

from .geometry import non_extreme_indices
from .model import CredalNetwork, CredalSpec, GbrTask


def random_pmf(rng: random.Random, card: int, grain: int = 8, zeros: bool = False) -> tuple:
    lo = 0 if zeros else 1
    while True:
        w = [rng.randint(lo, grain) for _ in range(card)]
        if sum(w):
            s = sum(w)
            return tuple(Fraction(x, s) for x in w)


def random_spec(rng: random.Random, card: int, max_extrema: int = 3, grain: int = 8) -> CredalSpec:
    """A credal set with between 1 and ``max_extrema`` genuine extreme points."""
    k = rng.randint(1, max_extrema)
    pts = []
    for _ in range(k):
        p = random_pmf(rng, card, grain)
        if p not in pts:
            pts.append(p)
    bad = set(non_extreme_indices(pts))
    return CredalSpec(tuple(p for j, p in enumerate(pts) if j not in bad))


def random_dag(rng: random.Random, n: int, max_parents: int = 2) -> list[tuple[int, int]]:
    arcs = []
    for i in range(1, n):
        k = rng.randint(0, min(max_parents, i))
        for p in rng.sample(range(i), k):
            arcs.append((p, i))
    return arcs


def random_network(rng: random.Random, n: int, cards=(2, 3), max_parents: int = 2,
                   max_extrema: int = 3, arcs=None) -> CredalNetwork:
    arcs = random_dag(rng, n, max_parents) if arcs is None else arcs
    card = [rng.choice(cards) for _ in range(n)]
    parents = {i: sorted(p for p, c in arcs if c == i) for i in range(n)}
    specs = []
    for i in range(n):
        n_cfg = 1
        for p in parents[i]:
            n_cfg *= card[p]
        specs.append([random_spec(rng, card[i], max_extrema) for _ in range(n_cfg)])
    return CredalNetwork.build([(f"X{i}", c) for i, c in enumerate(card)], arcs, specs)


def random_task(rng: random.Random, net: CredalNetwork, max_evidence: int = 2,
                query: int | None = None, candidates=None) -> GbrTask:
    q = rng.randrange(net.n) if query is None else query
    pool = [i for i in (range(net.n) if candidates is None else candidates) if i != q]
    k = rng.randint(0, min(max_evidence, len(pool)))
    ev = {i: rng.randrange(net.cards[i]) for i in rng.sample(pool, k)}
    f = tuple(Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(net.cards[q]))
    return GbrTask(q, f, ev)


def random_hmm(rng: random.Random, length: int, cards=(2, 3), max_extrema: int = 3,
               manifest_prob: float = 0.8):
    """A tree HMM shaped for predictive queries and a predictive task on it.

    States are nodes ``0..length-1`` in chain order, each followed by an
    optional manifest leaf.  The last state has no manifest and is the
    query.
    """
    names, arcs, kinds = [], [], []
    prev = None
    for k in range(length):
        s = len(names)
        names.append((f"S{k}", rng.choice(cards)))
        kinds.append("state")
        if prev is not None:
            arcs.append((prev, s))
        prev = s
        if k < length - 1 and rng.random() < manifest_prob:
            m = len(names)
            names.append((f"M{k}", rng.choice(cards)))
            kinds.append("manifest")
            arcs.append((s, m))
    card = [c for _, c in names]
    parents = {c: p for p, c in arcs}
    specs = []
    for i in range(len(names)):
        n_cfg = card[parents[i]] if i in parents else 1
        specs.append([random_spec(rng, card[i], max_extrema) for _ in range(n_cfg)])
    net = CredalNetwork.build(names, arcs, specs)
    query = prev
    manifests = [i for i, k in enumerate(kinds) if k == "manifest"]
    ev = {m: rng.randrange(card[m]) for m in manifests if rng.random() < 0.7}
    f = tuple(Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(card[query]))
    return net, GbrTask(query, f, ev)


def random_vacuous_root_network(rng: random.Random, n: int, n_roots: int, cards=(2, 3),
                                max_parents: int = 2) -> CredalNetwork:
    """Vacuous roots ``0..n_roots-1``; every other node precise with at least one parent."""
    card = [rng.choice(cards) for _ in range(n)]
    arcs = []
    for i in range(n_roots, n):
        k = rng.randint(1, min(max_parents, i))
        arcs.extend((p, i) for p in rng.sample(range(i), k))
    parents = {i: sorted(p for p, c in arcs if c == i) for i in range(n)}
    specs = []
    for i in range(n):
        if i < n_roots:
            specs.append([CredalSpec.vacuous(card[i])])
            continue
        n_cfg = 1
        for p in parents[i]:
            n_cfg *= card[p]
        specs.append([CredalSpec.singleton(random_pmf(rng, card[i], zeros=True)) for _ in range(n_cfg)])
    return CredalNetwork.build([(f"X{i}", c) for i, c in enumerate(card)], arcs, specs)


def random_computable_network(rng: random.Random, n: int, cards=(2, 3), max_parents: int = 1,
                              max_extrema: int = 2):
    """Small network whose pmfs are ``pow2_simplex`` points with fractional exponents."""
    from .gadgets.numerics import pow2_simplex
    from .gadgets.rationalize import ComputableNetwork

    arcs = random_dag(rng, n, max_parents)
    card = [rng.choice(cards) for _ in range(n)]
    parents = {i: sorted(p for p, c in arcs if c == i) for i in range(n)}
    specs = []
    for i in range(n):
        n_cfg = 1
        for p in parents[i]:
            n_cfg *= card[p]
        rows = []
        for _ in range(n_cfg):
            exps = []
            for _ in range(rng.randint(1, max_extrema)):
                # pinning t_0 = 0 makes distinct exponent vectors distinct pmfs
                t = (Fraction(0),) + tuple(Fraction(rng.randint(-8, 8), rng.randint(2, 5))
                                           for _ in range(card[i] - 1))
                if t not in exps:
                    exps.append(t)
            rows.append([pow2_simplex(t) for t in exps])
        specs.append(rows)
    return ComputableNetwork(tuple((f"X{i}", c) for i, c in enumerate(card)), tuple(arcs), tuple(specs))
