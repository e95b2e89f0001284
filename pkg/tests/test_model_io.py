import itertools
import json
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from credalnet.catalog import four_node_hmm, four_node_hmm_task, parity_network, parity_task
from credalnet.errors import NetworkFormatError, ValidationError
from credalnet.geometry import in_hull, non_extreme_indices, v_to_h
from credalnet.model import CredalNetwork, CredalSpec, GbrTask, bn_expectation, joint_pmf, validate_network
from credalnet.netio import (format_rational, network_to_dict, parse_network, parse_task, serialize_network,
                             serialize_task)
from credalnet.randnet import random_network, random_task

# --- geometry ---------------------------------------------------------------

pmf3 = st.lists(st.integers(0, 6), min_size=3, max_size=3).filter(sum).map(
    lambda w: tuple(F(x, sum(w)) for x in w))


@settings(max_examples=60, deadline=None)
@given(st.lists(pmf3, min_size=1, max_size=5, unique=True), pmf3)
def test_facets_agree_with_hull_membership(points, probe):
    keep = [p for k, p in enumerate(points) if k not in set(non_extreme_indices(points))]
    facets = v_to_h(keep, 3)
    assert all(f.holds(p) for f in facets for p in keep)
    assert in_hull(probe, keep) == all(f.holds(probe) for f in facets)


def test_interval_facets():
    facets = v_to_h([(F(1, 4), F(3, 4)), (F(1, 2), F(1, 2))], 2)
    inside = (F(1, 3), F(2, 3))
    assert all(f.holds(inside) for f in facets)
    assert not all(f.holds((F(3, 5), F(2, 5))) for f in facets)


def test_non_extreme_detection():
    pts = [(1, 0), (0, 1), (F(1, 2), F(1, 2)), (1, 0)]
    assert non_extreme_indices(pts) == [2, 3]


# --- model ------------------------------------------------------------------

def test_parity_network_is_valid():
    net = parity_network()
    assert validate_network(net) == []
    assert net.topological_order == (0, 1, 2)


def test_validation_findings():
    bad_sum = CredalNetwork.build([("A", 2)], [], [[CredalSpec.singleton((F(1, 2), F(1, 3)))]])
    assert any("not normalized" in m for m in validate_network(bad_sum))
    cyclic = CredalNetwork.build([("A", 2), ("B", 2)], [(0, 1), (1, 0)],
                                 [[CredalSpec.vacuous(2)] * 2, [CredalSpec.vacuous(2)] * 2])
    assert validate_network(cyclic) == ["cycle detected"]
    interior = CredalNetwork.build([("A", 2)], [], [[CredalSpec(((1, 0), (0, 1), (F(1, 2), F(1, 2))))]])
    assert validate_network(interior) == ["node 0 config []: non-extreme point at index 2"]


def test_precise_expectation_matches_joint_sum():
    rng = random.Random(3)
    for _ in range(20):
        net = random_network(rng, 4, max_extrema=1)
        task = random_task(rng, net)
        joint = joint_pmf(net)
        ev = task.evidence_map
        num = sum(task.f[x[task.query]] * p for x, p in joint.items() if all(x[k] == v for k, v in ev.items()))
        den = sum(p for x, p in joint.items() if all(x[k] == v for k, v in ev.items()))
        assert bn_expectation(net, task) == num / den


def test_joint_sums_to_one():
    joint = joint_pmf(four_node_hmm())
    assert sum(joint.values()) == 1


def test_upper_task_negation():
    task = GbrTask(0, (1, 2), {1: 0}, "upper")
    low, sign = task.lower_form()
    assert sign == -1 and low.f == (-1, -2) and low.bound == "lower"


def test_restrict_and_ancestors():
    net = four_node_hmm()
    anc = net.ancestral_set([2])
    sub, index = net.restrict(anc)
    assert sub.n == len(anc) and set(index) == set(anc)


def test_clamp_makes_roots_degenerate():
    net = parity_network().clamp({0: 1})
    assert net.spec(0).extrema == ((0, 1),)


# --- file formats -----------------------------------------------------------

def test_round_trip_catalog():
    for net, task in ((parity_network(), parity_task()), (four_node_hmm(), four_node_hmm_task())):
        back = parse_network(serialize_network(net))
        assert network_to_dict(back) == network_to_dict(net)
        assert parse_task(serialize_task(task), back) == task


def test_round_trip_random():
    rng = random.Random(8)
    for _ in range(15):
        net = random_network(rng, rng.randint(2, 5))
        assert network_to_dict(parse_network(serialize_network(net))) == network_to_dict(net)


def test_rational_strings():
    assert format_rational(F(4, 7)) == "4/7"
    assert format_rational(F(3)) == "3"
    doc = network_to_dict(parity_network())
    assert all(isinstance(x, str) for e in doc["cpts"][0][0]["extrema"] for x in e)


@pytest.mark.parametrize("text, error", [
    ("not json", NetworkFormatError),
    ("[]", NetworkFormatError),
    ('{"variables": [{"name": "A", "card": 2}], "cpts": [[{"extrema": [["1/2", "x"]]}]]}', NetworkFormatError),
    ('{"variables": [{"name": "A", "card": 2}], "cpts": [[{"extrema": [["1/2", "1/3"]]}]]}', ValidationError),
    ('{"variables": [{"name": "A", "card": 2}], "cpts": []}', ValidationError),
])
def test_malformed_networks(text, error):
    with pytest.raises(error):
        parse_network(text)


def test_task_checked_against_network():
    net = parity_network()
    with pytest.raises(ValidationError):
        parse_task(json.dumps({"query": 2, "f": ["1"], "evidence": {}}), net)
    with pytest.raises(ValidationError):
        parse_task(json.dumps({"query": 2, "f": ["1", "0"], "evidence": {"2": 0}}), net)


def test_configs_first_parent_slowest():
    net = parity_network()
    assert net.configs(2) == list(itertools.product(range(2), range(2)))
