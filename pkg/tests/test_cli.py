import json
import subprocess
import sys
from fractions import Fraction as F

import pytest

from credalnet.catalog import four_node_hmm, four_node_hmm_task, parity_network, parity_task
from credalnet.cli import decimal, main
from credalnet.model import CredalNetwork, CredalSpec, GbrTask
from credalnet.netio import serialize_network, serialize_task
from credalnet.randnet import random_hmm


def write_pair(tmp_path, name, net, task):
    n, q = tmp_path / f"{name}.network.json", tmp_path / f"{name}.query.json"
    n.write_text(serialize_network(net))
    q.write_text(serialize_task(task))
    return str(n), str(q)


@pytest.fixture
def parity(tmp_path):
    return write_pair(tmp_path, "parity", parity_network(), parity_task())


@pytest.fixture
def hmm4(tmp_path):
    return write_pair(tmp_path, "hmm4", four_node_hmm(), four_node_hmm_task())


def run(capsys, *argv):
    code = main(list(argv))
    lines = [json.loads(x) for x in capsys.readouterr().out.splitlines() if x.strip()]
    return code, lines[-1] if lines else None


def test_decimal_rendering_is_correctly_rounded():
    assert decimal(F(2, 3)) == "0." + "6" * 39 + "7"
    assert decimal(F(-1, 8), 2) == "-0.12"      # half to even
    assert decimal(F(5, 1)) == "5." + "0" * 40
    assert decimal(F(-1, 3), 3) == "-0.333"


def test_infer_parity_both_semantics(capsys, parity):
    code, out = run(capsys, "infer", *parity)
    assert code == 0 and out["mu"]["exact"] == "1/2" and out["engine"] == "enum"
    code, out = run(capsys, "infer", "--semantics", "epistemic", *parity)
    assert code == 0 and out["mu"]["exact"] == "5/11" and out["engine"] == "lp"
    assert out["mu"]["decimal"].startswith("0.454545")


def test_hmm_engine_rejects_manifest_query(capsys, hmm4):
    code, out = run(capsys, "infer", "--semantics", "epistemic", "--engine", "hmm", *hmm4)
    assert code == 5
    assert "query node is not the terminal state node" in out["error"]["message"]


def test_compare_reports_strict_dominance(capsys, hmm4):
    code, out = run(capsys, "compare", *hmm4)
    assert code == 0
    assert out["strong"]["mu"]["exact"] == "4/7"
    assert out["dominance_holds"] and out["strict"] and not out["equal"]


def test_compare_flags_equality_on_predictive_hmm(capsys, tmp_path):
    import random

    net, task = random_hmm(random.Random(3), 3, cards=(2,))
    files = write_pair(tmp_path, "hmm", net, task)
    code, out = run(capsys, "compare", *files)
    assert code == 0 and out["equal"] and out["epistemic"]["engine"] == "hmm"


def test_compare_on_precise_network(capsys, tmp_path):
    net = CredalNetwork.build([("A", 2), ("B", 2)], [(0, 1)],
                              [[CredalSpec.singleton((F(1, 3), F(2, 3)))],
                               [CredalSpec.singleton((F(1, 2), F(1, 2))), CredalSpec.singleton((F(1, 4), F(3, 4)))]])
    files = write_pair(tmp_path, "bn", net, GbrTask(0, (1, 0), {1: 0}))
    code, out = run(capsys, "compare", *files)
    # p(a=0 | b=0) = (1/3 * 1/2) / (1/3 * 1/2 + 2/3 * 1/4)
    assert out["equal"] and out["strong"]["mu"]["exact"] == "1/2"


def test_exit_codes(capsys, tmp_path, parity):
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert run(capsys, "infer", str(bad), parity[1])[0] == 2
    assert run(capsys, "infer", str(tmp_path / "missing.json"), parity[1])[0] == 2
    assert run(capsys, "infer", "--max-extrema-combos", "2", *parity)[0] == 4
    assert run(capsys, "infer", "--semantics", "epistemic", "--max-atoms", "4", *parity)[0] == 4
    assert run(capsys, "infer", "--semantics", "epistemic", "--engine", "enum", *parity)[0] == 5
    net = CredalNetwork.build([("A", 2), ("B", 2)], [(0, 1)],
                              [[CredalSpec.vacuous(2)], [CredalSpec.singleton((1, 0)), CredalSpec.singleton((0, 1))]])
    zero = write_pair(tmp_path, "zero", net, GbrTask(0, (1, 0), {1: 1}))
    code, out = run(capsys, "infer", *zero)
    assert code == 3 and out["error"]["type"] == "GbrUndefinedError"


def test_validate(capsys, tmp_path, parity):
    code, out = run(capsys, "validate", parity[0], "--query", parity[1])
    assert code == 0 and out["valid"]
    doc = json.loads(open(parity[0]).read())
    doc["cpts"][0][0]["extrema"].append(["9/20", "11/20"])   # inside the interval
    bad = tmp_path / "interior.json"
    bad.write_text(json.dumps(doc))
    code, out = run(capsys, "validate", str(bad))
    assert code == 2 and not out["valid"] and "non-extreme" in out["findings"][0]


def test_generate_polytree(capsys, tmp_path):
    code, out = run(capsys, "generate", "polytree-partition", "--z", "1,1", "--out", str(tmp_path))
    assert code == 0 and out["nodes"] == 5
    assert F(out["threshold"]["exact"]) == (1 + F(1, 64)) / 3
    cert = json.loads(open(out["files"]["certificate"]).read())
    assert cert["comparison"] == "<="
    code, inferred = run(capsys, "infer", out["files"]["network"], out["files"]["query"])
    assert code == 0 and inferred["engine"] == "lemma2"
    assert F(inferred["mu"]["exact"]) <= F(out["threshold"]["exact"])


def test_generate_tree_and_emajsat(capsys, tmp_path):
    code, out = run(capsys, "generate", "tree-partition", "--z", "1,1", "--out", str(tmp_path))
    assert code == 0 and out["nodes"] == 5
    code, out = run(capsys, "generate", "emajsat", "--formula", "z1|z2", "--k", "1", "--out", str(tmp_path))
    assert code == 0 and out["nodes"] == 3 and out["comparison"] == "<"


@pytest.mark.parametrize("argv", [
    ("generate", "tree-partition", "--z", "1,x"),
    ("generate", "polytree-partition", "--z", "4"),
    ("generate", "emajsat", "--formula", "z1&&", "--k", "1"),
    ("generate", "emajsat", "--formula", "z1|z2", "--k", "2"),
    ("generate", "emajsat", "--formula", "z1|z2"),
])
def test_generate_malformed(capsys, tmp_path, argv):
    assert run(capsys, *argv, "--out", str(tmp_path))[0] == 2


@pytest.mark.parametrize("argv, answer", [
    (("partition", "--z", "3,5,8", "--via", "brute"), "yes"),
    (("partition", "--z", "1,2", "--via", "polytree"), "no"),
    (("partition", "--z", "1,1", "--via", "tree"), "yes"),
    (("emajsat", "--formula", "z1&z2", "--k", "1", "--via", "network"), "no"),
    (("emajsat", "--formula", "z1|z2", "--k", "1", "--via", "brute"), "yes"),
])
def test_decide(capsys, argv, answer):
    code, out = run(capsys, "decide", *argv)
    assert code == 0 and out["answer"] == answer and out["oracle_agrees"] is True


def test_output_is_deterministic(tmp_path, parity):
    cmd = [sys.executable, "-m", "credalnet.cli", "infer", "--semantics", "epistemic", *parity]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b and a.count(b"\n") == 1


def test_pretty_and_timing(capsys, parity):
    main(["--pretty", "--timing", "infer", *parity])
    out = json.loads(capsys.readouterr().out)
    assert out["seconds"] >= 0
