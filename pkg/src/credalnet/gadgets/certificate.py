"""Gadget certificates: a generated network, its query and the decision threshold."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from ..model import CredalNetwork, GbrTask
from ..netio import format_rational, task_to_dict


@dataclass(frozen=True)
class GadgetCertificate:
    """``network``/``task`` decide the source instance by ``value <cmp> threshold``.

    ``comparison`` is ``"<="`` or ``"<"``; ``engine`` names the inference
    routine the decision rule is stated for.  ``budgets`` records the
    tolerances used to rationalize the network (name -> rational).
    """

    kind: str
    network: CredalNetwork
    task: GbrTask
    threshold: Fraction
    comparison: str
    engine: str
    budgets: dict = field(default_factory=dict)
    notes: tuple[str, ...] = ()
    instance: dict = field(default_factory=dict)

    def decide(self, value) -> bool:
        value = Fraction(value)
        return value <= self.threshold if self.comparison == "<=" else value < self.threshold

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "instance": self.instance,
            "threshold": format_rational(self.threshold),
            "comparison": self.comparison,
            "engine": self.engine,
            "budgets": {k: format_rational(v) for k, v in self.budgets.items()},
            "notes": list(self.notes),
            "query": task_to_dict(self.task),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"
