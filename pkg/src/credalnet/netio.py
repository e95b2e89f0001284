"""JSON network and query files.

Network file::

    {
      "variables": [{"name": "X1", "card": 2}, ...],
      "arcs": [[0, 2], [1, 2]],
      "cpts": [
        [{"parent_config": [], "extrema": [["2/5", "3/5"], ["1/2", "1/2"]]}],
        ...
      ]
    }

``cpts[i]`` lists one entry per parent configuration of node ``i``;
``parent_config`` holds the parents' states with parents sorted by node
index.  An entry may also carry ``"facets": [{"coeffs": [...], "bound":
"1/2", "equality": false}]``.  Rationals are ``"num/den"`` strings or
integers, in any terms; they are written back in lowest terms.

Query file::

    {"query": 2, "f": [1, 0], "evidence": {"0": 1}, "bound": "lower"}
"""

from __future__ import annotations

import json
from fractions import Fraction

from .errors import NetworkFormatError, ValidationError
from .model import CredalNetwork, CredalSpec, Facet, GbrTask, Variable, rational, validate_network, validate_task


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _load(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise NetworkFormatError(f"syntax error: {exc.msg}", exc.lineno, exc.colno) from None


def _rat(value, where: str) -> Fraction:
    if isinstance(value, float):
        raise NetworkFormatError(f"{where}: floating-point number {value!r}; write rationals as \"num/den\"")
    try:
        return rational(value)
    except (TypeError, ValueError, ZeroDivisionError):
        raise NetworkFormatError(f"{where}: invalid rational {value!r}") from None


def _get(obj, key, kind, where):
    if not isinstance(obj, dict) or key not in obj:
        raise NetworkFormatError(f"{where}: missing key {key!r}")
    value = obj[key]
    if not isinstance(value, kind):
        raise NetworkFormatError(f"{where}.{key}: expected {kind.__name__}")
    return value


def parse_network(text: str, validate: bool = True) -> CredalNetwork:
    """Parse and (by default) validate a network file."""
    doc = _load(text)
    if not isinstance(doc, dict):
        raise NetworkFormatError("top level must be an object")
    variables = []
    for k, v in enumerate(_get(doc, "variables", list, "network")):
        name = _get(v, "name", str, f"variables[{k}]")
        card = _get(v, "card", int, f"variables[{k}]")
        labels = v.get("labels")
        variables.append(Variable(name, card, tuple(labels) if labels is not None else None))
    arcs = []
    for k, a in enumerate(doc.get("arcs", [])):
        if not (isinstance(a, list) and len(a) == 2 and all(isinstance(x, int) for x in a)):
            raise NetworkFormatError(f"arcs[{k}]: expected [parent, child]")
        arcs.append(tuple(a))
    cpts = _get(doc, "cpts", list, "network")
    if len(cpts) != len(variables):
        raise ValidationError([f"{len(cpts)} cpt entries for {len(variables)} variables"])
    shell = CredalNetwork(tuple(variables), tuple(arcs), tuple(() for _ in variables))
    findings = validate_network(shell)
    findings = [f for f in findings if "credal sets for" not in f]
    if findings:
        raise ValidationError(findings)
    local = []
    for i, entries in enumerate(cpts):
        if not isinstance(entries, list):
            raise NetworkFormatError(f"cpts[{i}]: expected a list of entries")
        by_config = {}
        for k, entry in enumerate(entries):
            where = f"cpts[{i}][{k}]"
            cfg = entry.get("parent_config", []) if isinstance(entry, dict) else None
            if not isinstance(cfg, list) or not all(isinstance(x, int) for x in cfg):
                raise NetworkFormatError(f"{where}: parent_config must be a list of state indices")
            extrema = [[_rat(x, f"{where}.extrema[{j}]") for x in _as_list(e, f"{where}.extrema[{j}]")]
                       for j, e in enumerate(_get(entry, "extrema", list, where))]
            facets = None
            if "facets" in entry:
                facets = tuple(
                    Facet(tuple(_rat(x, f"{where}.facets[{j}]") for x in _get(fc, "coeffs", list, where)),
                          _rat(fc.get("bound", 0), f"{where}.facets[{j}].bound"),
                          bool(fc.get("equality", False)))
                    for j, fc in enumerate(entry["facets"]))
            if tuple(cfg) in by_config:
                raise ValidationError([f"node {i}: duplicate parent configuration {cfg}"])
            by_config[tuple(cfg)] = CredalSpec(tuple(map(tuple, extrema)), facets)
        expected = shell.configs(i)
        missing = [list(c) for c in expected if c not in by_config]
        extra = [list(c) for c in by_config if c not in set(expected)]
        if missing or extra:
            raise ValidationError([f"node {i}: parent configurations missing {missing} / unexpected {extra}"])
        local.append(tuple(by_config[c] for c in expected))
    net = CredalNetwork(tuple(variables), tuple(arcs), tuple(local))
    if validate:
        findings = validate_network(net)
        if findings:
            raise ValidationError(findings)
    return net


def _as_list(value, where):
    if not isinstance(value, list):
        raise NetworkFormatError(f"{where}: expected a list of probabilities")
    return value


def network_to_dict(net: CredalNetwork) -> dict:
    cpts = []
    for i in range(net.n):
        entries = []
        for cfg, spec in zip(net.configs(i), net.local_specs[i]):
            entry = {"parent_config": list(cfg),
                     "extrema": [[format_rational(x) for x in e] for e in spec.extrema]}
            if spec.facets is not None:
                entry["facets"] = [{"coeffs": [format_rational(x) for x in f.coeffs],
                                    "bound": format_rational(f.bound), "equality": f.equality}
                                   for f in spec.facets]
            entries.append(entry)
        cpts.append(entries)
    variables = []
    for v in net.variables:
        d = {"name": v.name, "card": v.card}
        if v.labels is not None:
            d["labels"] = list(v.labels)
        variables.append(d)
    return {"variables": variables, "arcs": [list(a) for a in net.arcs], "cpts": cpts}


def serialize_network(net: CredalNetwork) -> str:
    return json.dumps(network_to_dict(net), indent=1) + "\n"


def parse_task(text: str, net: CredalNetwork | None = None) -> GbrTask:
    doc = _load(text)
    if not isinstance(doc, dict):
        raise NetworkFormatError("query file: top level must be an object")
    query = _get(doc, "query", int, "query file")
    f = [_rat(x, f"f[{k}]") for k, x in enumerate(_get(doc, "f", list, "query file"))]
    evidence = {}
    raw = doc.get("evidence", {})
    if not isinstance(raw, dict):
        raise NetworkFormatError("evidence must be an object mapping node index to state")
    for key, state in raw.items():
        try:
            node = int(key)
        except ValueError:
            raise NetworkFormatError(f"evidence key {key!r} is not a node index") from None
        if not isinstance(state, int):
            raise NetworkFormatError(f"evidence[{key}]: state must be an integer")
        evidence[node] = state
    bound = doc.get("bound", "lower")
    if bound not in ("lower", "upper"):
        raise NetworkFormatError(f"bound must be 'lower' or 'upper', not {bound!r}")
    task = GbrTask(query, tuple(f), evidence, bound)
    if net is not None:
        findings = validate_task(net, task)
        if findings:
            raise ValidationError(findings)
    return task


def task_to_dict(task: GbrTask) -> dict:
    return {"query": task.query, "f": [format_rational(x) for x in task.f],
            "evidence": {str(k): v for k, v in task.evidence}, "bound": task.bound}


def serialize_task(task: GbrTask) -> str:
    return json.dumps(task_to_dict(task), indent=1) + "\n"
