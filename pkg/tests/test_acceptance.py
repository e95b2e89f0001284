"""Acceptance criteria 1-11, one test each.

Every test records a ``PASS``/``FAIL`` line with its measured runtime; the
lines are printed in the pytest terminal summary, or directly when this
file is run as a script.
"""

import functools
import itertools
import random
import time
from fractions import Fraction as F

import pytest

from credalnet.catalog import four_node_hmm, four_node_hmm_task, parity_network, parity_task
from credalnet.epistemic import gbr_epistemic
from credalnet.gadgets import (EMajsatInstance, PartitionInstance, decide_partition, emajsat_brute,
                               gen_emajsat, gen_polytree_partition, partition_brute, polytree_identity,
                               rationalize_network, selector_identity, tree_gadget_analysis)
from credalnet.gadgets.partition import polytree_budget, tree_epsilons
from credalnet.gadgets.rationalize import precision_bits
from credalnet.hmm import classify_predictive_hmm, gbr_hmm
from credalnet.randnet import random_computable_network
from credalnet.strong import gbr_strong, joint_extrema, vacuous_root_inference

from corpora import emajsat_corpus, general_corpus, hmm_corpus, partition_instances, vacuous_root_corpus

pytestmark = pytest.mark.acceptance

RESULTS: dict[int, str] = {}


def record(number, ok, seconds, limit, detail):
    within = seconds < limit
    status = "PASS" if ok and within else "FAIL"
    timing = f"{seconds:.2f}s (limit {limit:g}s)" + ("" if within else " OVER TIME LIMIT")
    RESULTS[number] = f"criterion {number:>2}: {status}  {timing}  {detail}"
    return ok and within


def timed(fn, *args):
    t = time.perf_counter()
    out = fn(*args)
    return out, time.perf_counter() - t


# --- 1, 2, 11: worked examples ----------------------------------------------

def criterion_1():
    (s, ts), (e, te) = timed(gbr_strong, parity_network(), parity_task()), \
        timed(gbr_epistemic, parity_network(), parity_task())
    ok = s == F(1, 2) and e == F(5, 11) and ts < 1 and te < 1
    return record(1, ok, ts + te, 2, f"strong {s} (want 1/2, {ts:.3f}s); epistemic {e} (want 5/11, {te:.3f}s)")


def criterion_2():
    (s, ts), (e, te) = timed(gbr_strong, four_node_hmm(), four_node_hmm_task()), \
        timed(gbr_epistemic, four_node_hmm(), four_node_hmm_task())
    ok = s == F(4, 7) and e == F(13, 28) and ts < 1 and te < 1
    return record(2, ok, ts + te, 2, f"strong {s} (want 4/7, {ts:.3f}s); epistemic {e} (want 13/28, {te:.3f}s)")


def criterion_11():
    t = time.perf_counter()
    c = classify_predictive_hmm(four_node_hmm(), four_node_hmm_task())
    s = gbr_strong(four_node_hmm(), four_node_hmm_task())
    e = gbr_epistemic(four_node_hmm(), four_node_hmm_task())
    ok = not c.accepted and s != e
    return record(11, ok, time.perf_counter() - t, 5,
                  f"classifier accepted={c.accepted} ({c.reason}); strong {s} vs epistemic {e}")


# --- 3, 4, 5: equivalence and dominance corpora -------------------------------

@functools.lru_cache(maxsize=None)
def hmm_values():
    t = time.perf_counter()
    rows = []
    for net, task in hmm_corpus():
        rows.append((classify_predictive_hmm(net, task).accepted, gbr_hmm(net, task),
                     gbr_strong(net, task), gbr_epistemic(net, task)))
    return rows, time.perf_counter() - t


@functools.lru_cache(maxsize=None)
def vacuous_root_values():
    t = time.perf_counter()
    rows = [(vacuous_root_inference(net, task), gbr_strong(net, task), gbr_epistemic(net, task))
            for net, task in vacuous_root_corpus()]
    return rows, time.perf_counter() - t


def criterion_3():
    rows, secs = hmm_values()
    bad = sum(not (acc and h == s == e) for acc, h, s, e in rows)
    return record(3, bad == 0, secs, 300, f"{len(rows)} predictive HMMs, {bad} mismatches")


def criterion_4():
    rows, secs = vacuous_root_values()
    bad = sum(not (a == s == e) for a, s, e in rows)
    return record(4, bad == 0, secs, 300, f"{len(rows)} vacuous-root networks, {bad} mismatches")


def criterion_5():
    t = time.perf_counter()
    pairs = [(s, e) for _, _, s, e in hmm_values()[0]] + [(s, e) for _, s, e in vacuous_root_values()[0]]
    pairs += [(gbr_strong(net, task), gbr_epistemic(net, task)) for net, task in general_corpus()]
    pairs.append((gbr_strong(four_node_hmm(), four_node_hmm_task()),
                  gbr_epistemic(four_node_hmm(), four_node_hmm_task())))
    violations = sum(s < e for s, e in pairs)
    strict = sum(s > e for s, e in pairs)
    ok = violations == 0 and strict >= 1
    # reuses the criterion 3/4 values; the limit covers the extra general corpus
    return record(5, ok, time.perf_counter() - t, 300,
                  f"{len(pairs)} tasks, {violations} dominance violations, {strict} strict")


# --- 6-9: gadgets -----------------------------------------------------------

def criterion_6():
    t = time.perf_counter()
    bad, count = [], 0
    for z in partition_instances(4, 6):
        r = partition_brute(PartitionInstance(z))
        count += 1
        fine = F(1, 2 ** r.bits) < r.gap / 2
        if r.decision:
            good = r.min_h == 1
        else:
            good = r.min_h_enclosure[0] > 1 + r.gap
        if not (good and fine and r.dichotomy_holds):
            bad.append(z)
    return record(6, not bad, time.perf_counter() - t, 60,
                  f"{count} instances (n<=4, z_i<=6), {len(bad)} dichotomy failures {bad[:3]}")


def criterion_7():
    t = time.perf_counter()
    bad, count, subsets = [], 0, 0
    for z in partition_instances(4, 6):
        inst = PartitionInstance(z)
        count += 1
        ok = decide_partition(inst, "polytree").agrees
        cert = gen_polytree_partition(inst)
        budget = polytree_budget(inst)
        for mask in range(1 << inst.n):
            S = [i + 1 for i in range(inst.n) if mask >> i & 1]
            ident = polytree_identity(inst, cert.network, S)
            ok = ok and ident.holds and ident.budget == budget
            subsets += 1
        if not ok:
            bad.append(z)
    return record(7, not bad, time.perf_counter() - t, 600,
                  f"{count} instances, {subsets} clamped subsets, {len(bad)} failures {bad[:3]}")


def criterion_8():
    t = time.perf_counter()
    bad, count = [], 0
    for z in partition_instances(3, 5):
        inst = PartitionInstance(z)
        count += 1
        eps_int, _ = tree_epsilons(inst)
        ok = decide_partition(inst, "tree").agrees
        for mask in range(1 << inst.n):
            S = [i + 1 for i in range(inst.n) if mask >> i & 1]
            ok = ok and tree_gadget_analysis(inst, S, eps_int).sandwich_holds
        if not ok:
            bad.append(z)
    return record(8, not bad, time.perf_counter() - t, 600,
                  f"{count} instances (n<=3, z_i<=5), {len(bad)} failures {bad[:3]}")


def criterion_9():
    t = time.perf_counter()
    corpus = emajsat_corpus(exhaustive_gates=3, sampled=400)
    bad, identities = [], 0
    for formula, n, k in corpus:
        inst = EMajsatInstance(formula, k, n)
        cert = gen_emajsat(inst)
        value = vacuous_root_inference(cert.network, cert.task)
        ok = cert.decide(value) == emajsat_brute(inst)
        for sel in itertools.product((0, 1), repeat=k):
            p1, frac = selector_identity(inst, cert, sel)
            ok = ok and p1 == frac
            identities += 1
        if not ok:
            bad.append((formula, k))
    return record(9, not bad, time.perf_counter() - t, 300,
                  f"{len(corpus)} (formula, k) pairs, {identities} selector identities, {len(bad)} failures {bad[:3]}")


# --- 10: rationalization budget ---------------------------------------------

def criterion_10():
    t = time.perf_counter()
    rng = random.Random(10)
    worst_ratio, bad, count = F(0), 0, 0
    while count < 50:
        tpl = random_computable_network(rng, rng.randint(2, 5))
        eps = rng.choice([F(1, 4), F(1, 16), F(1, 100), F(1, 1000)])
        approx = rationalize_network(tpl, eps)
        if sum(1 for _ in joint_extrema(approx)) > 256:
            continue
        ref = rationalize_network(tpl, eps, bits=4 * precision_bits(tpl.n, tpl.max_card, eps))
        dev = F(0)
        for sel in joint_extrema(approx):
            ja, jr = sel.joint(approx), sel.joint(ref)
            dev = max(dev, max(abs(ja[x] - jr[x]) for x in ja))
        bad += dev > eps
        worst_ratio = max(worst_ratio, dev / eps)
        count += 1
    return record(10, bad == 0, time.perf_counter() - t, 300,
                  f"{count} networks, {bad} over budget, worst deviation/eps = {float(worst_ratio):.3e}")


CRITERIA = {1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5,
            6: criterion_6, 7: criterion_7, 8: criterion_8, 9: criterion_9, 10: criterion_10,
            11: criterion_11}


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number):
    assert CRITERIA[number](), RESULTS[number]


if __name__ == "__main__":
    for number in sorted(CRITERIA):
        CRITERIA[number]()
        print(RESULTS[number], flush=True)
