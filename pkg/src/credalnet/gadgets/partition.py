"""Partition-problem gadgets: a credal tree decided by strong GBR, and a
polytree with vacuous roots decided by the vacuous-root shortcut.

Instances ``z_1..z_n`` are normalised to ``v_i = z_i / z`` with
``z = sum(z) / 2``; a subset ``S`` balances iff ``v_S = 1``.  The bump
``h(v) = (2^-(v-1) + 2^(v-1)) / 2`` equals one exactly at balance and
exceeds ``1 + 1/(32 z^4)`` on every subset of a no-instance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from ..model import CredalNetwork, GbrTask, bn_expectation
from ..strong import DEFAULT_MAX_COMBOS, DEFAULT_MAX_ROOT_ASSIGNMENTS, gbr_strong, vacuous_root_inference
from .certificate import GadgetCertificate
from .numerics import Computable, h_enclosure, pow2, pow2_enclosure, pow2_ratio
from .rationalize import ComputableNetwork, precision_bits, rationalize_network

MAX_BRUTE_N = 24


@dataclass(frozen=True)
class PartitionInstance:
    z: tuple[int, ...]

    def __post_init__(self):
        z = tuple(self.z)
        object.__setattr__(self, "z", z)
        if len(z) < 2:
            raise ValueError("a partition instance needs at least two integers")
        if any(not isinstance(x, int) or isinstance(x, bool) or x < 1 for x in z):
            raise ValueError("partition integers must be positive")

    @classmethod
    def parse(cls, text: str) -> "PartitionInstance":
        try:
            return cls(tuple(int(t) for t in text.split(",")))
        except ValueError as exc:
            raise ValueError(f"malformed partition instance {text!r}: {exc}") from None

    @property
    def n(self) -> int:
        return len(self.z)


def partition_normalize(inst: PartitionInstance) -> tuple[tuple[Fraction, ...], Fraction]:
    z = Fraction(sum(inst.z), 2)
    return tuple(Fraction(x) / z for x in inst.z), z


def dichotomy_gap(z: Fraction) -> Fraction:
    """No-instances have ``min_S h(v_S) > 1 + gap``."""
    return 1 / (32 * z ** 4)


def _bits_below(x: Fraction) -> int:
    """Smallest ``b`` with ``2**-b < x``."""
    b = max(1, math.floor(-math.log2(x)))
    while Fraction(1, 1 << b) >= x:
        b += 1
    while b > 1 and Fraction(1, 1 << (b - 1)) < x:
        b -= 1
    return b


def _subset(mask: int, n: int) -> tuple[int, ...]:
    return tuple(i + 1 for i in range(n) if mask >> i & 1)


@dataclass(frozen=True)
class PartitionReport:
    decision: bool
    subset: tuple[int, ...]         # 1-based indices of an h-minimising subset
    v_s: Fraction
    min_h: Fraction                 # within 2**-bits of min_S h(v_S); exact on yes-instances
    min_h_enclosure: tuple[Fraction, Fraction]
    gap: Fraction
    bits: int
    dichotomy_holds: bool


def partition_brute(inst: PartitionInstance, bits: int | None = None) -> PartitionReport:
    """Exhaustive subset-sum decision plus a certified check of the ``h`` gap."""
    n = inst.n
    if n > MAX_BRUTE_N:
        raise ValueError(f"partition_brute supports n <= {MAX_BRUTE_N}")
    total = sum(inst.z)
    best_mask, best_dev = 0, None
    for mask in range(1 << n):
        s = sum(inst.z[i] for i in range(n) if mask >> i & 1)
        dev = abs(2 * s - total)
        if best_dev is None or dev < best_dev:
            best_mask, best_dev = mask, dev
    decision = best_dev == 0
    v, z = partition_normalize(inst)
    # h is symmetric and convex around 1, so the most balanced subset minimises it
    v_s = sum((v[i] for i in range(n) if best_mask >> i & 1), Fraction(0))
    gap = dichotomy_gap(z)
    bits = _bits_below(gap / 4) if bits is None else bits
    while True:
        lo, hi = h_enclosure(v_s, bits)
        if decision:
            holds = lo == hi == 1
            break
        if lo > 1 + gap or hi <= 1 + gap or bits > 4096:
            holds = lo > 1 + gap
            break
        bits += 16
    return PartitionReport(decision, _subset(best_mask, n), v_s, (lo + hi) / 2, (lo, hi), gap, bits, holds)


# --- credal tree, strong extension ------------------------------------------

def _complement(c: Computable) -> Computable:
    return Computable(lambda bits: tuple(1 - x for x in reversed(c.enclose(bits))), f"1-{c.label}")


def tree_epsilons(inst: PartitionInstance) -> tuple[Fraction, Fraction]:
    """``(eps_int, eps_rat)``: leaf-interval lower endpoint and rationalization budget."""
    n = inst.n
    _, z = partition_normalize(inst)
    eps_int = Fraction(1, 2 ** (n + 3)) / (64 * z ** 4)
    eps_rat = Fraction(1, 2) * Fraction(1, 2 ** n) / (4 * 64 * z ** 4)
    return eps_int, eps_rat


def tree_template(inst: PartitionInstance) -> ComputableNetwork:
    n = inst.n
    v, _ = partition_normalize(inst)
    eps_int, _ = tree_epsilons(inst)
    variables = [("X0", 3)] + [(f"X{i}", 2) for i in range(1, 2 * n + 1)]
    arcs = [(0, i) for i in range(1, n + 1)] + [(i, n + i) for i in range(1, n + 1)]
    third = Fraction(1, 3)
    specs = [[[(third, third, third)]]]
    for i in range(1, n + 1):
        rows = []
        for p in (pow2_ratio(-v[i - 1], -v[i - 1]), pow2_ratio(0, -v[i - 1])):
            rows.append([(_complement(p), p)])
        rows.append([(Fraction(1, 2), Fraction(1, 2))])
        specs.append(rows)
    leaf = [(1 - eps_int, eps_int), (Fraction(0), Fraction(1))]
    for _ in range(n):
        specs.append([leaf, leaf])
    return ComputableNetwork(tuple(variables), tuple(arcs), tuple(specs))


def tree_threshold(inst: PartitionInstance, net: CredalNetwork) -> Fraction:
    """``-1/g(alpha)`` using the network's own rationalized ``q(x_i = 1 | x_0 = 2)``."""
    n = inst.n
    _, z = partition_normalize(inst)
    eps_int, _ = tree_epsilons(inst)
    alpha = Fraction(3) / (128 * z ** 4)
    prod = Fraction(1)
    for i in range(1, n + 1):
        prod *= net.spec(i, (1,)).extrema[0][1]
    g = 1 + (1 + alpha) * (2 / (1 + eps_int)) ** n * prod
    return -1 / g


def gen_tree_partition(inst: PartitionInstance, bits: int | None = None) -> GadgetCertificate:
    """Credal tree whose strong lower expectation is ``<= threshold`` iff ``inst`` is a yes-instance.

    Root ``X0`` is ternary and uniform; ``X1..Xn`` hang off it with
    singleton sets; each ``X{n+i}`` is observed at 1 under an interval
    ``q(x = 1 | x_i) in [eps_int, 1]``.  The query is ``f(x0) = -I(x0 = 3)``.
    """
    n = inst.n
    _, z = partition_normalize(inst)
    eps_int, eps_rat = tree_epsilons(inst)
    gap = Fraction(1, 2 ** n) / (4 * 64 * z ** 4)
    default_bits = _bits_below(gap / 4)
    template = tree_template(inst)
    net = rationalize_network(template, eps_rat, default_bits if bits is None else bits)
    task = GbrTask(0, (Fraction(0), Fraction(0), Fraction(-1)), {n + i: 1 for i in range(1, n + 1)})
    need = precision_bits(template.n, template.max_card, eps_rat)
    return GadgetCertificate(
        kind="tree-partition",
        network=net,
        task=task,
        threshold=tree_threshold(inst, net),
        comparison="<=",
        engine="strong",
        budgets={"eps_int": eps_int, "eps_rat": eps_rat, "alpha": Fraction(3) / (128 * z ** 4),
                 "mu_gap": gap},
        notes=(f"parameter precision 2^-{max(need, default_bits if bits is None else bits)}",
               "threshold uses the rationalized q(x_i=1|x_0=2)"),
        instance={"z": list(inst.z)},
    )


@dataclass(frozen=True)
class TreeDiagnostics:
    subset: tuple[int, ...]
    b_s: Fraction
    b_complement: Fraction
    a_s: Fraction
    h_minus_one: Fraction
    upper: Fraction                      # h(v_S) + 2^(n+3) eps - 1
    a_s_enclosure: tuple[Fraction, Fraction]
    h_enclosure: tuple[Fraction, Fraction]
    sandwich_holds: bool


def tree_gadget_analysis(inst: PartitionInstance, subset: Iterable[int], eps_int,
                         bits: int = 64) -> TreeDiagnostics:
    """Check ``h(v_S) - 1 <= a_S <= h(v_S) + 2^(n+3) eps - 1`` for one subset.

    ``b_S = prod_{i in S}(2^-v_i + eps) prod_{i not in S}(1 + 2^-v_i eps)``
    and ``a_S = b_S + b_{N-S} - 1``.  Both sides are functions of
    ``x_i = 2^-v_i``; they are evaluated exactly at a rational point
    within ``2**-bits`` of the true ``x``, and the enclosure of the true
    ``a_S`` (monotone in every ``x_i``) must overlap the sandwich.
    """
    n = inst.n
    S = frozenset(subset)
    if not S <= set(range(1, n + 1)):
        raise ValueError("subset indices must lie in 1..n")
    eps = Fraction(eps_int)
    v, _ = partition_normalize(inst)
    enc = [pow2_enclosure(-v[i], bits + n + 2) for i in range(n)]
    mid = [(lo + hi) / 2 for lo, hi in enc]

    def b(xs, members):
        out = Fraction(1)
        for i in range(n):
            out *= xs[i] + eps if i + 1 in members else 1 + xs[i] * eps
        return out

    def prod(xs, members):
        out = Fraction(1)
        for i in members:
            out *= xs[i - 1]
        return out

    comp = frozenset(range(1, n + 1)) - S
    b_s, b_c = b(mid, S), b(mid, comp)
    a_s = b_s + b_c - 1
    h1 = prod(mid, S) + prod(mid, comp) - 1
    upper = h1 + 2 ** (n + 3) * eps
    lo_x, hi_x = [e[0] for e in enc], [e[1] for e in enc]
    a_enc = (b(lo_x, S) + b(lo_x, comp) - 1, b(hi_x, S) + b(hi_x, comp) - 1)
    v_s = sum((v[i - 1] for i in S), Fraction(0))
    h_enc = h_enclosure(v_s, bits)
    at_point = h1 <= a_s <= upper
    consistent = a_enc[1] >= h_enc[0] - 1 and a_enc[0] <= h_enc[1] + 2 ** (n + 3) * eps - 1
    return TreeDiagnostics(tuple(sorted(S)), b_s, b_c, a_s, h1, upper, a_enc, h_enc,
                           at_point and consistent)


# --- credal polytree, vacuous roots ----------------------------------------

def polytree_budget(inst: PartitionInstance) -> Fraction:
    _, z = partition_normalize(inst)
    return 1 / (3 * 64 * z ** 4)


def polytree_template(inst: PartitionInstance) -> ComputableNetwork:
    n = inst.n
    v, _ = partition_normalize(inst)
    variables = [(f"X{i}", 2) for i in range(1, n + 1)] + [(f"X{i}", 3) for i in range(n + 1, 2 * n + 2)]
    arcs = []
    specs = [[[(Fraction(1), Fraction(0)), (Fraction(0), Fraction(1))]] for _ in range(n)]
    third = Fraction(1, 3)
    specs.append([[(third, third, third)]])
    zero, one = Fraction(0), Fraction(1)
    for j in range(1, n + 1):
        node = n + j
        arcs += [(j - 1, node), (node - 1, node)]
        t = pow2(-v[j - 1])
        rest = _complement(t)
        # configurations: (root, previous chain state), root slower
        rows = [
            (one, zero, zero), (zero, t, rest), (zero, zero, one),       # root = 0
            (t, zero, rest), (zero, one, zero), (zero, zero, one),       # root = 1
        ]
        specs.append([[r] for r in rows])
    return ComputableNetwork(tuple(variables), tuple(arcs), tuple(specs))


def gen_polytree_partition(inst: PartitionInstance, bits: int | None = None) -> GadgetCertificate:
    """Polytree with vacuous Boolean roots over a ternary chain.

    For the roots fixed to a subset ``S``, the chain ends in state 1 with
    probability ``2^-v_S / 3`` and in state 2 with ``2^(v_S-2) / 3``, so
    the minimum of ``E[I(x=1) + I(x=2)]`` is ``min_S h(v_S) / 3``.
    """
    n = inst.n
    _, z = partition_normalize(inst)
    eps = polytree_budget(inst)
    alpha = (1 + Fraction(1) / (64 * z ** 4)) / 3
    gap = Fraction(1) / (3 * 32 * z ** 4)
    default_bits = _bits_below(gap / 4)
    template = polytree_template(inst)
    use = default_bits if bits is None else bits
    net = rationalize_network(template, eps, use)
    task = GbrTask(2 * n, (Fraction(1), Fraction(1), Fraction(0)))
    need = precision_bits(template.n, template.max_card, eps)
    return GadgetCertificate(
        kind="polytree-partition",
        network=net,
        task=task,
        threshold=alpha,
        comparison="<=",
        engine="lemma2",
        budgets={"eps": eps, "alpha": alpha, "value_gap": gap},
        notes=(f"parameter precision 2^-{max(need, use)}",),
        instance={"z": list(inst.z)},
    )


@dataclass(frozen=True)
class PolytreeIdentity:
    subset: tuple[int, ...]
    p_one: Fraction
    p_two: Fraction
    target_one: tuple[Fraction, Fraction]
    target_two: tuple[Fraction, Fraction]
    budget: Fraction

    @property
    def holds(self) -> bool:
        ok1 = self.target_one[0] - self.budget <= self.p_one <= self.target_one[1] + self.budget
        ok2 = self.target_two[0] - self.budget <= self.p_two <= self.target_two[1] + self.budget
        return ok1 and ok2


def polytree_identity(inst: PartitionInstance, net: CredalNetwork, subset: Iterable[int],
                      bits: int = 64) -> PolytreeIdentity:
    """Clamp the roots to ``subset`` and compare the chain's end marginals with ``2^-v_S/3``, ``2^(v_S-2)/3``."""
    n = inst.n
    S = frozenset(subset)
    clamped = net.clamp({j: int(j + 1 in S) for j in range(n)})
    last = 2 * n
    p1 = bn_expectation(clamped, GbrTask(last, (1, 0, 0)))
    p2 = bn_expectation(clamped, GbrTask(last, (0, 1, 0)))
    v, _ = partition_normalize(inst)
    v_s = sum((v[i - 1] for i in S), Fraction(0))
    lo1, hi1 = pow2_enclosure(-v_s, bits)
    lo2, hi2 = pow2_enclosure(v_s - 2, bits)
    return PolytreeIdentity(tuple(sorted(S)), p1, p2, (lo1 / 3, hi1 / 3), (lo2 / 3, hi2 / 3),
                            polytree_budget(inst))


# --- decisions ---------------------------------------------------------------

@dataclass(frozen=True)
class PartitionDecision:
    answer: bool
    via: str
    value: Fraction | None
    threshold: Fraction | None
    oracle: bool | None

    @property
    def agrees(self) -> bool | None:
        return None if self.oracle is None else self.answer == self.oracle


def decide_partition(inst: PartitionInstance, via: str = "polytree",
                     max_combos: int = DEFAULT_MAX_COMBOS,
                     max_roots: int = DEFAULT_MAX_ROOT_ASSIGNMENTS,
                     check_oracle: bool = True) -> PartitionDecision:
    oracle = partition_brute(inst).decision if check_oracle and inst.n <= MAX_BRUTE_N else None
    if via == "brute":
        ans = partition_brute(inst).decision
        return PartitionDecision(ans, via, None, None, oracle)
    if via == "tree":
        cert = gen_tree_partition(inst)
        value = gbr_strong(cert.network, cert.task, max_combos)
    elif via == "polytree":
        cert = gen_polytree_partition(inst)
        value = vacuous_root_inference(cert.network, cert.task, max_roots)
    else:
        raise ValueError(f"unknown route {via!r}; use tree, polytree or brute")
    return PartitionDecision(cert.decide(value), via, value, cert.threshold, oracle)
