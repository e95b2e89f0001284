"""``credalnet`` command line: validate, infer, compare, generate, decide.

Every command prints one JSON object per line on stdout.  Rationals are
``"num/den"`` strings, each accompanied by a 40-digit decimal rendering.
Exit codes: 0 ok, 2 parse/validation, 3 GBR undefined, 4 size cap,
5 engine/semantics mismatch.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

from .epistemic import DEFAULT_MAX_ATOMS
from .errors import CredalError, NetworkFormatError, ValidationError
from .gadgets.emajsat import MAX_BRUTE_VARS, EMajsatInstance, decide_emajsat, emajsat_brute, gen_emajsat
from .gadgets.partition import (MAX_BRUTE_N, PartitionInstance, decide_partition, gen_polytree_partition,
                                gen_tree_partition, partition_brute)
from .inference import ENGINES, Caps, infer
from .model import validate_network
from .netio import format_rational, parse_network, parse_task, serialize_network, serialize_task
from .strong import DEFAULT_MAX_COMBOS, DEFAULT_MAX_ROOT_ASSIGNMENTS

DIGITS = 40


def decimal(x: Fraction, digits: int = DIGITS) -> str:
    """``x`` correctly rounded (half to even) to ``digits`` places after the point."""
    x = Fraction(x)
    scaled = round(x * 10 ** digits)
    sign = "-" if scaled < 0 else ""
    s = str(abs(scaled)).rjust(digits + 1, "0")
    return f"{sign}{s[:-digits]}.{s[-digits:]}"


def _num(x) -> dict:
    return {"exact": format_rational(x), "decimal": decimal(x)}


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return format_rational(obj)
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


class _Out:
    def __init__(self, pretty: bool):
        self.pretty = pretty

    def emit(self, obj: dict) -> None:
        obj = _jsonable(obj)
        if self.pretty:
            print(json.dumps(obj, indent=2))
        else:
            print(json.dumps(obj, separators=(",", ":")))


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise NetworkFormatError(f"cannot read {path}: {exc.strerror}") from None


def _load(args):
    net = parse_network(_read(args.network))
    task = parse_task(_read(args.query), net)
    return net, task


def _caps(args) -> Caps:
    return Caps(args.max_extrema_combos, args.max_atoms, args.max_root_assignments)


def cmd_validate(args, out: _Out) -> int:
    net = parse_network(_read(args.network), validate=False)
    findings = validate_network(net)
    record = {"command": "validate", "network": args.network, "nodes": net.n, "valid": not findings}
    if findings:
        record["findings"] = findings
        out.emit(record)
        return ValidationError.exit_code
    if args.query:
        parse_task(_read(args.query), net)
        record["query"] = args.query
    out.emit(record)
    return 0


def _result_record(res, start, timing) -> dict:
    rec = {"mu": _num(res.mu), "semantics": res.semantics, "engine": res.engine,
           "details": res.details}
    if timing:
        rec["seconds"] = round(time.perf_counter() - start, 6)
    return rec


def cmd_infer(args, out: _Out) -> int:
    net, task = _load(args)
    start = time.perf_counter()
    res = infer(net, task, args.semantics, args.engine, _caps(args))
    out.emit({"command": "infer", "bound": task.bound, **_result_record(res, start, args.timing)})
    return 0


def cmd_compare(args, out: _Out) -> int:
    net, task = _load(args)
    caps = _caps(args)
    start = time.perf_counter()
    strong = infer(net, task, "strong", "auto", caps)
    epist = infer(net, task, "epistemic", "auto", caps)
    # the strong extension is inside the epistemic one, so a lower bound can only drop
    if task.bound == "lower":
        dominance = strong.mu >= epist.mu
    else:
        dominance = strong.mu <= epist.mu
    rec = {"command": "compare", "bound": task.bound,
           "strong": {"mu": _num(strong.mu), "engine": strong.engine},
           "epistemic": {"mu": _num(epist.mu), "engine": epist.engine},
           "equal": strong.mu == epist.mu, "dominance_holds": dominance,
           "strict": strong.mu != epist.mu}
    if args.timing:
        rec["seconds"] = round(time.perf_counter() - start, 6)
    out.emit(rec)
    return 0 if dominance else 1


def _partition(args) -> PartitionInstance:
    try:
        return PartitionInstance.parse(args.z)
    except ValueError as exc:
        raise NetworkFormatError(str(exc)) from None


def _emajsat(args) -> EMajsatInstance:
    try:
        return EMajsatInstance(args.formula, args.k, args.n)
    except ValueError as exc:
        raise NetworkFormatError(f"malformed E-MAJSAT instance: {exc}") from None


def cmd_generate(args, out: _Out) -> int:
    if args.kind == "tree-partition":
        cert = gen_tree_partition(_partition(args), args.bits)
    elif args.kind == "polytree-partition":
        cert = gen_polytree_partition(_partition(args), args.bits)
    else:
        cert = gen_emajsat(_emajsat(args))
    findings = validate_network(cert.network)
    if findings:
        raise ValidationError(findings)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    stem = args.kind
    files = {"network": outdir / f"{stem}.network.json", "query": outdir / f"{stem}.query.json",
             "certificate": outdir / f"{stem}.certificate.json"}
    files["network"].write_text(serialize_network(cert.network))
    files["query"].write_text(serialize_task(cert.task))
    files["certificate"].write_text(cert.to_json())
    out.emit({"command": "generate", "kind": args.kind, "nodes": cert.network.n,
              "cards": list(cert.network.cards), "threshold": _num(cert.threshold),
              "comparison": cert.comparison, "engine": cert.engine,
              "budgets": {k: format_rational(v) for k, v in cert.budgets.items()},
              "files": {k: str(v) for k, v in files.items()}})
    return 0


def cmd_decide(args, out: _Out) -> int:
    if args.problem == "partition":
        inst = _partition(args)
        via = args.via or "polytree"
        if via not in ("tree", "polytree", "brute"):
            raise NetworkFormatError(f"--via for partition must be tree, polytree or brute, not {via!r}")
        d = decide_partition(inst, via, args.max_extrema_combos, args.max_root_assignments)
        rec = {"command": "decide", "problem": "partition", "via": via, "z": list(inst.z),
               "answer": "yes" if d.answer else "no"}
        if d.value is not None:
            rec["value"] = _num(d.value)
            rec["threshold"] = _num(d.threshold)
        if via == "brute":
            rep = partition_brute(inst)
            rec["subset"] = list(rep.subset)
            rec["min_h"] = _num(rep.min_h)
            rec["dichotomy_holds"] = rep.dichotomy_holds
        oracle = d.oracle if inst.n <= MAX_BRUTE_N else None
    else:
        inst = _emajsat(args)
        via = args.via or "network"
        if via not in ("network", "brute"):
            raise NetworkFormatError(f"--via for emajsat must be network or brute, not {via!r}")
        oracle = emajsat_brute(inst) if inst.n <= MAX_BRUTE_VARS else None
        rec = {"command": "decide", "problem": "emajsat", "via": via, "formula": inst.formula,
               "k": inst.k, "n": inst.n}
        if via == "network":
            answer, value = decide_emajsat(inst)
            rec["value"] = _num(value)
            rec["threshold"] = _num(Fraction(1, 2))
        else:
            answer = oracle
        rec["answer"] = "yes" if answer else "no"
        d = None
    answer = rec["answer"] == "yes"
    rec["oracle"] = None if oracle is None else ("yes" if oracle else "no")
    rec["oracle_agrees"] = None if oracle is None else answer == oracle
    out.emit(rec)
    return 0 if rec["oracle_agrees"] in (True, None) else 1


def _add_caps(p):
    p.add_argument("--max-extrema-combos", type=int, default=DEFAULT_MAX_COMBOS,
                   help="cap on strong-extension extrema selections (default %(default)s)")
    p.add_argument("--max-atoms", type=int, default=DEFAULT_MAX_ATOMS,
                   help="cap on joint atoms for the epistemic LP (default %(default)s)")
    p.add_argument("--max-root-assignments", type=int, default=DEFAULT_MAX_ROOT_ASSIGNMENTS,
                   help="cap on vacuous-root assignments (default %(default)s)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="credalnet",
                                     description="Exact inference in credal networks.")
    parser.add_argument("--pretty", action="store_true", help="indent JSON output")
    parser.add_argument("--timing", action="store_true", help="include wall-clock seconds")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a network (and optionally a query) file")
    p.add_argument("network")
    p.add_argument("--query")

    for name, helptext in (("infer", "lower/upper posterior expectation"),
                           ("compare", "run both semantics and check dominance")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("network")
        p.add_argument("query")
        if name == "infer":
            p.add_argument("--semantics", choices=("strong", "epistemic"), default="strong")
            p.add_argument("--engine", choices=ENGINES, default="auto")
        _add_caps(p)

    p = sub.add_parser("generate", help="write a hardness gadget")
    p.add_argument("kind", choices=("tree-partition", "polytree-partition", "emajsat"))
    p.add_argument("--z", help="partition integers, comma separated")
    p.add_argument("--formula", help="formula over z1..zN with ~ & | and parentheses")
    p.add_argument("--k", type=int, help="number of selector variables")
    p.add_argument("--n", type=int, help="number of variables (default: largest index used)")
    p.add_argument("--bits", type=int, help="minimum parameter precision in bits")
    p.add_argument("--out", default=".", help="output directory")

    p = sub.add_parser("decide", help="decide a source instance through its gadget")
    p.add_argument("problem", choices=("partition", "emajsat"))
    p.add_argument("--z")
    p.add_argument("--formula")
    p.add_argument("--k", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--via", help="partition: tree|polytree|brute; emajsat: network|brute")
    _add_caps(p)
    return parser


def _check_instance_args(args) -> None:
    needs_z = getattr(args, "kind", None) in ("tree-partition", "polytree-partition") or \
        getattr(args, "problem", None) == "partition"
    if needs_z and not args.z:
        raise NetworkFormatError("--z is required")
    if not needs_z and args.command in ("generate", "decide") and (not args.formula or args.k is None):
        raise NetworkFormatError("--formula and --k are required")


COMMANDS = {"validate": cmd_validate, "infer": cmd_infer, "compare": cmd_compare,
            "generate": cmd_generate, "decide": cmd_decide}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    out = _Out(args.pretty)
    args.timing = getattr(args, "timing", False)
    try:
        if args.command in ("generate", "decide"):
            _check_instance_args(args)
        return COMMANDS[args.command](args, out)
    except CredalError as exc:
        out.emit({"command": args.command, "error": {"type": type(exc).__name__, "message": str(exc)},
                  "exit_code": exc.exit_code})
        print(f"credalnet: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
