"""Engine selection for lower/upper posterior expectations."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .epistemic import DEFAULT_MAX_ATOMS, epistemic_search
from .errors import EngineMismatchError
from .hmm import classify_predictive_hmm, hmm_search
from .model import CredalNetwork, GbrTask, check_task
from .strong import (DEFAULT_MAX_COMBOS, DEFAULT_MAX_ROOT_ASSIGNMENTS, vacuous_root_violation,
                     vacuous_root_search, strong_search)

SEMANTICS = ("strong", "epistemic")
ENGINES = ("auto", "enum", "lp", "hmm", "lemma2")


@dataclass(frozen=True)
class InferenceResult:
    mu: Fraction
    semantics: str
    engine: str
    details: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Caps:
    max_combos: int = DEFAULT_MAX_COMBOS
    max_atoms: int = DEFAULT_MAX_ATOMS
    max_roots: int = DEFAULT_MAX_ROOT_ASSIGNMENTS


def choose_engine(net: CredalNetwork, task: GbrTask, semantics: str) -> str:
    """``hmm`` for predictive HMM tasks, ``lemma2`` for vacuous-root marginals, else the generic engine."""
    if classify_predictive_hmm(net, task).accepted:
        return "hmm"
    if vacuous_root_violation(net, task) is None:
        return "lemma2"
    return "enum" if semantics == "strong" else "lp"


def infer(net: CredalNetwork, task: GbrTask, semantics: str = "strong", engine: str = "auto",
          caps: Caps = Caps()) -> InferenceResult:
    if semantics not in SEMANTICS:
        raise ValueError(f"unknown semantics {semantics!r}")
    if engine not in ENGINES:
        raise ValueError(f"unknown engine {engine!r}")
    check_task(net, task)
    if engine == "auto":
        engine = choose_engine(net, task, semantics)
    if engine == "enum":
        if semantics != "strong":
            raise EngineMismatchError("engine enum enumerates the strong extension; use lp for epistemic")
        r = strong_search(net, task, caps.max_combos)
        details = {"selection": [list(x) for x in r.selection.indices],
                   "selections": r.n_selections,
                   "min_evidence_probability": r.min_evidence_probability}
        return InferenceResult(r.mu, semantics, engine, details)
    if engine == "lp":
        if semantics != "epistemic":
            raise EngineMismatchError("engine lp solves the epistemic extension; use enum for strong")
        r = epistemic_search(net, task, max_atoms=caps.max_atoms)
        details = {"atoms": r.n_atoms, "constraints": r.n_constraints,
                   "min_evidence_probability": r.min_evidence_probability}
        return InferenceResult(r.mu, semantics, engine, details)
    if engine == "hmm":
        # both semantics agree on predictive HMM queries
        c = classify_predictive_hmm(net, task)
        if not c.accepted:
            raise EngineMismatchError(f"engine hmm rejected the task: {c.reason}")
        r = hmm_search(net, task)
        details = {"chain": list(c.hmm.chain), "markov_chain": c.hmm.markov_chain,
                   "bisection_steps": r.bisection_steps, "root_steps": r.root_steps,
                   "min_evidence_probability": r.min_evidence_probability}
        return InferenceResult(r.mu, semantics, engine, details)
    reason = vacuous_root_violation(net, task)
    if reason is not None:
        raise EngineMismatchError(f"engine lemma2 rejected the task: {reason}")
    r = vacuous_root_search(net, task, caps.max_roots)
    details = {"roots": list(r.roots), "assignment": list(r.assignment), "assignments": r.n_assignments}
    return InferenceResult(r.mu, semantics, engine, details)
