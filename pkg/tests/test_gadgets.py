import itertools
import random
from fractions import Fraction as F

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from credalnet.gadgets import (Computable, EMajsatInstance, FormulaError, PartitionInstance, approx_pow2,
                               decide_emajsat, decide_partition, emajsat_brute, gen_emajsat,
                               gen_polytree_partition, gen_tree_partition, h_bump, parse_formula,
                               partition_brute, polytree_identity, pow2, pow2_enclosure, pow2_ratio,
                               rationalize_network, selector_identity, tree_gadget_analysis)
from credalnet.gadgets.numerics import h_enclosure, pow2_simplex
from credalnet.gadgets.partition import polytree_budget, tree_epsilons
from credalnet.gadgets.rationalize import precision_bits
from credalnet.model import validate_network
from credalnet.randnet import random_computable_network
from credalnet.strong import joint_extrema

mpmath.mp.prec = 400
exponents = st.fractions(min_value=-6, max_value=6, max_denominator=50)


def mp(x: F):
    return mpmath.mpf(x.numerator) / x.denominator


# --- numerics ---------------------------------------------------------------

@settings(max_examples=100, deadline=None)
@given(exponents, st.integers(8, 200))
def test_pow2_enclosure_contains_true_value(t, bits):
    lo, hi = pow2_enclosure(t, bits)
    assert hi - lo < F(1, 2 ** bits)
    true = mpmath.power(2, mp(t))
    assert mp(lo) <= true <= mp(hi)


def test_integer_exponents_are_exact():
    assert pow2_enclosure(5, 10) == (32, 32)
    assert pow2_enclosure(-3, 10) == (F(1, 8), F(1, 8))
    assert approx_pow2(F(1, 2), 60) ** 2 - 2 < F(1, 2 ** 58)


@settings(max_examples=60, deadline=None)
@given(st.fractions(min_value=0, max_value=2, max_denominator=40))
def test_h_symmetry(v):
    assert abs(h_bump(v, 80) - h_bump(2 - v, 80)) < F(1, 2 ** 78)
    lo, hi = h_enclosure(v, 80)
    assert lo >= 1 or hi >= 1


@settings(max_examples=60, deadline=None)
@given(st.fractions(min_value=0, max_value=2, max_denominator=40),
       st.fractions(min_value=0, max_value=2, max_denominator=40))
def test_h_midpoint_convexity(u, w):
    mid = h_bump((u + w) / 2, 90)
    avg = (h_bump(u, 90) + h_bump(w, 90)) / 2
    if u == w:
        assert abs(mid - avg) < F(1, 2 ** 88)
    else:
        assert mid < avg


def test_pow2_ratio_and_simplex():
    c = pow2_ratio(F(1, 3), F(-1, 2))
    true = mpmath.power(2, mpmath.mpf(1) / 3) / (1 + mpmath.power(2, mpmath.mpf(-1) / 2))
    assert abs(mp(c.approx(100)) - true) < mpmath.mpf(2) ** -100
    entries = pow2_simplex((0, F(1, 3), F(-2, 5)))
    total = sum(mp(e.approx(120)) for e in entries)
    assert abs(total - 1) < mpmath.mpf(2) ** -115
    assert pow2(3).approx(10) == 8


def test_uncertifiable_parameter():
    sloppy = Computable(lambda bits: (F(0), F(1)), "sloppy")
    with pytest.raises(ValueError, match="cannot certify"):
        sloppy.approx(4)


# --- rationalization --------------------------------------------------------

def test_rationalized_pmfs_stay_normalized():
    rng = random.Random(2)
    for _ in range(5):
        tpl = random_computable_network(rng, 3)
        net = rationalize_network(tpl, F(1, 100))
        assert validate_network(net) == []


def test_precision_bits_rule():
    assert precision_bits(2, 2, 1) == 9
    assert precision_bits(2, 2, F(1, 8)) == 12
    with pytest.raises(ValueError):
        precision_bits(2, 2, 0)


def test_rationalization_error_within_budget():
    rng = random.Random(9)
    eps = F(1, 64)
    tpl = random_computable_network(rng, 3, max_extrema=2)
    a = rationalize_network(tpl, eps)
    ref = rationalize_network(tpl, eps, bits=4 * precision_bits(tpl.n, tpl.max_card, eps))
    for sel in joint_extrema(a):
        ja, jr = sel.joint(a), sel.joint(ref)
        assert max(abs(ja[x] - jr[x]) for x in ja) <= eps


# --- partition --------------------------------------------------------------

@pytest.mark.parametrize("z, yes", [((3, 5, 8), True), ((1, 2), False), ((1, 1), True), ((2, 3, 4), False),
                                    ((1, 1, 3), False), ((2, 2, 2, 2), True)])
def test_partition_brute(z, yes):
    r = partition_brute(PartitionInstance(z))
    assert r.decision == yes and r.dichotomy_holds
    if yes:
        assert r.min_h == 1
    else:
        assert r.min_h_enclosure[0] > 1 + r.gap


def test_partition_instance_parsing():
    assert PartitionInstance.parse("1, 2,3").z == (1, 2, 3)
    for bad in ("1", "1,0", "a,b"):
        with pytest.raises(ValueError):
            PartitionInstance.parse(bad)


def test_polytree_gadget_shape():
    cert = gen_polytree_partition(PartitionInstance((1, 1)))
    assert cert.network.n == 5 and cert.threshold == (1 + F(1, 64)) / 3
    assert validate_network(cert.network) == []
    assert cert.engine == "lemma2" and cert.comparison == "<="


def test_tree_gadget_shape():
    cert = gen_tree_partition(PartitionInstance((1, 1)))
    net = cert.network
    assert net.n == 5 and all(len(net.parents(i)) <= 1 for i in range(net.n))
    assert sorted(net.children(0)) == [1, 2] and net.roots() == [0]
    assert validate_network(net) == []


@pytest.mark.parametrize("z", [(1, 1), (1, 2), (2, 3, 5), (1, 2, 4)])
def test_polytree_identity_every_subset(z):
    inst = PartitionInstance(z)
    cert = gen_polytree_partition(inst)
    for r in range(inst.n + 1):
        for S in itertools.combinations(range(1, inst.n + 1), r):
            ident = polytree_identity(inst, cert.network, S)
            assert ident.holds and ident.budget == polytree_budget(inst)


@pytest.mark.parametrize("z", [(1, 1), (1, 2), (1, 2, 3)])
def test_tree_sandwich_every_subset(z):
    inst = PartitionInstance(z)
    eps_int, _ = tree_epsilons(inst)
    for r in range(inst.n + 1):
        for S in itertools.combinations(range(1, inst.n + 1), r):
            assert tree_gadget_analysis(inst, S, eps_int).sandwich_holds


@pytest.mark.parametrize("via", ["tree", "polytree", "brute"])
@pytest.mark.parametrize("z", [(1, 1), (1, 2), (2, 3, 5), (1, 1, 3)])
def test_decide_partition_agrees(via, z):
    assert decide_partition(PartitionInstance(z), via).agrees


# --- E-MAJSAT ---------------------------------------------------------------

def test_formula_parser():
    tree = parse_formula("~z1 & (z2 | z3) | z4")
    assert tree.op == "|"
    for bad in ("", "z0", "z1 &", "(z1", "z1 z2", "z1 + z2"):
        with pytest.raises(FormulaError):
            parse_formula(bad)
    with pytest.raises(FormulaError):
        EMajsatInstance("z1|z2", k=2)


def test_or_gadget_shape():
    cert = gen_emajsat(EMajsatInstance("z1|z2", 1))
    net = cert.network
    assert net.n == 3 and net.spec(0).is_vacuous and net.spec(1).extrema == ((F(1, 2), F(1, 2)),)
    assert cert.task.query == 2 and cert.threshold == F(1, 2) and cert.comparison == "<"


def test_bare_variable_gets_identity_gate():
    cert = gen_emajsat(EMajsatInstance("z2", 1))
    assert cert.network.n == 3 and cert.task.query == 2


@pytest.mark.parametrize("formula, k, yes", [("z1&z2", 1, False), ("z1|z2", 1, True), ("~z1|z2&z3", 1, True),
                                             ("z1&(z2|z3)", 1, True), ("z1&z2&z3", 2, False)])
def test_emajsat_decisions(formula, k, yes):
    inst = EMajsatInstance(formula, k)
    assert emajsat_brute(inst) == yes
    assert decide_emajsat(inst)[0] == yes
    cert = gen_emajsat(inst)
    for sel in itertools.product((0, 1), repeat=k):
        p1, frac = selector_identity(inst, cert, sel)
        assert p1 == frac
