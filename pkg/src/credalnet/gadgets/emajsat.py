"""E-MAJSAT circuits as credal networks with vacuous selector roots.

Grammar (loosest binding last)::

    expr   := or
    or     := and ("|" and)*
    and    := unary ("&" unary)*
    unary  := "~" unary | atom
    atom   := "z" INT | "(" expr ")"

Binary chains associate to the left.  Each operator becomes one
deterministic gate node, created in left-to-right post-order.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction

from ..model import CredalNetwork, CredalSpec, GbrTask, bn_expectation
from ..strong import vacuous_root_inference
from .certificate import GadgetCertificate

MAX_BRUTE_VARS = 20


class FormulaError(ValueError):
    pass


@dataclass(frozen=True)
class Var:
    index: int   # 1-based


@dataclass(frozen=True)
class Not:
    arg: object


@dataclass(frozen=True)
class BinOp:
    op: str      # "&" or "|"
    left: object
    right: object


_TOKEN = re.compile(r"\s*(?:(z\d+)|([~&|()]))")


def _tokens(text: str):
    pos, out = 0, []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise FormulaError(f"unexpected character {text[pos:].lstrip()[:1]!r} at offset {pos}")
        out.append(m.group(1) or m.group(2))
        pos = m.end()
    return out


def parse_formula(text: str):
    toks = _tokens(text)
    pos = 0

    def peek():
        return toks[pos] if pos < len(toks) else None

    def take(expected=None):
        nonlocal pos
        tok = peek()
        if tok is None or (expected is not None and tok != expected):
            raise FormulaError(f"expected {expected or 'a term'} at token {pos}, got {tok!r}")
        pos += 1
        return tok

    def binary(op, sub):
        node = sub()
        while peek() == op:
            take(op)
            node = BinOp(op, node, sub())
        return node

    def unary():
        if peek() == "~":
            take("~")
            return Not(unary())
        tok = take()
        if tok == "(":
            node = expr()
            take(")")
            return node
        if tok.startswith("z"):
            idx = int(tok[1:])
            if idx < 1:
                raise FormulaError("variables are numbered from z1")
            return Var(idx)
        raise FormulaError(f"unexpected token {tok!r}")

    def expr():
        return binary("|", lambda: binary("&", unary))

    if not toks:
        raise FormulaError("empty formula")
    tree = expr()
    if pos != len(toks):
        raise FormulaError(f"trailing input at token {pos}: {toks[pos]!r}")
    return tree


def max_var(tree) -> int:
    if isinstance(tree, Var):
        return tree.index
    if isinstance(tree, Not):
        return max_var(tree.arg)
    return max(max_var(tree.left), max_var(tree.right))


def evaluate(tree, z) -> bool:
    """``z[i - 1]`` is the value of ``z_i``."""
    if isinstance(tree, Var):
        return bool(z[tree.index - 1])
    if isinstance(tree, Not):
        return not evaluate(tree.arg, z)
    a, b = evaluate(tree.left, z), evaluate(tree.right, z)
    return (a and b) if tree.op == "&" else (a or b)


def count_gates(tree) -> int:
    if isinstance(tree, Var):
        return 0
    if isinstance(tree, Not):
        return 1 + count_gates(tree.arg)
    return 1 + count_gates(tree.left) + count_gates(tree.right)


@dataclass(frozen=True)
class EMajsatInstance:
    formula: str
    k: int
    n: int | None = None   # number of variables; defaults to the largest index used

    def __post_init__(self):
        tree = parse_formula(self.formula)
        n = max_var(tree) if self.n is None else self.n
        if n < max_var(tree):
            raise FormulaError("formula uses a variable beyond n")
        object.__setattr__(self, "n", n)
        if not 1 <= self.k < n:
            raise FormulaError(f"k must satisfy 1 <= k < n = {n}")

    @property
    def tree(self):
        return parse_formula(self.formula)


def emajsat_brute(inst: EMajsatInstance) -> bool:
    """Is there a selector assignment under which strictly more than half the rest satisfy?"""
    if inst.n > MAX_BRUTE_VARS:
        raise ValueError(f"emajsat_brute supports n <= {MAX_BRUTE_VARS}")
    tree = inst.tree
    free = inst.n - inst.k
    for sel in itertools.product((0, 1), repeat=inst.k):
        sat = sum(evaluate(tree, sel + rest) for rest in itertools.product((0, 1), repeat=free))
        if 2 * sat > 2 ** free:
            return True
    return False


def sat_count(inst: EMajsatInstance, selectors) -> int:
    tree = inst.tree
    sel = tuple(selectors)
    return sum(evaluate(tree, sel + rest)
               for rest in itertools.product((0, 1), repeat=inst.n - inst.k))


_ONE, _ZERO = (Fraction(0), Fraction(1)), (Fraction(1), Fraction(0))


def _det(bit: bool):
    return CredalSpec.singleton(_ONE if bit else _ZERO)


def gen_emajsat(inst: EMajsatInstance) -> GadgetCertificate:
    """Circuit network: ``min p(x_t = 0) < 1/2`` iff ``inst`` is a yes-instance."""
    n, k = inst.n, inst.k
    variables = [(f"Z{i}", 2) for i in range(1, n + 1)]
    arcs = []
    half = (Fraction(1, 2), Fraction(1, 2))
    specs = [[CredalSpec.vacuous(2)] if i < k else [CredalSpec.singleton(half)] for i in range(n)]

    def gate(name, parents, fn):
        node = len(variables)
        variables.append((name, 2))
        parents = sorted(set(parents))
        arcs.extend((p, node) for p in parents)
        specs.append([_det(fn(dict(zip(parents, cfg))))
                      for cfg in itertools.product((0, 1), repeat=len(parents))])
        return node

    def build(tree):
        if isinstance(tree, Var):
            return tree.index - 1
        if isinstance(tree, Not):
            a = build(tree.arg)
            return gate(f"G{len(variables) - n + 1}", [a], lambda x: not x[a])
        a = build(tree.left)
        b = build(tree.right)
        if tree.op == "&":
            return gate(f"G{len(variables) - n + 1}", [a, b], lambda x: x[a] and x[b])
        return gate(f"G{len(variables) - n + 1}", [a, b], lambda x: x[a] or x[b])

    tree = inst.tree
    top = build(tree)
    notes = ["gates in left-to-right post-order"]
    if isinstance(tree, Var):
        top = gate("G1", [top], lambda x: x[top])
        notes.append("identity gate added above a bare variable")
    net = CredalNetwork.build(variables, arcs, specs)
    return GadgetCertificate(
        kind="emajsat",
        network=net,
        task=GbrTask(top, (Fraction(1), Fraction(0))),
        threshold=Fraction(1, 2),
        comparison="<",
        engine="lemma2",
        notes=tuple(notes),
        instance={"formula": inst.formula, "k": k, "n": n},
    )


def selector_identity(inst: EMajsatInstance, cert: GadgetCertificate, selectors) -> tuple[Fraction, Fraction]:
    """``(p(x_t = 1), #SAT / 2^(n-k))`` with the selectors clamped."""
    net = cert.network.clamp(dict(enumerate(selectors)))
    p1 = bn_expectation(net, GbrTask(cert.task.query, (0, 1)))
    return p1, Fraction(sat_count(inst, selectors), 2 ** (inst.n - inst.k))


def decide_emajsat(inst: EMajsatInstance) -> tuple[bool, Fraction]:
    cert = gen_emajsat(inst)
    value = vacuous_root_inference(cert.network, cert.task)
    return cert.decide(value), value
