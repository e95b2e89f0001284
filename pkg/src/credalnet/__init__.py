"""Exact-rational GBR inference in credal networks under strong independence and epistemic irrelevance."""

from .epistemic import epistemic_polytope, epistemic_search, gbr_epistemic, phi_epistemic
from .errors import (CredalError, EngineMismatchError, GbrUndefinedError, NetworkFormatError, SizeCapError,
                     ValidationError)
from .hmm import classify_predictive_hmm, gbr_hmm, hmm_search
from .inference import Caps, InferenceResult, choose_engine, infer
from .model import CredalNetwork, CredalSpec, GbrTask, bn_expectation, joint_pmf, validate_network
from .netio import parse_network, parse_task, serialize_network, serialize_task
from .ratlp import Constraint, LinearProgram, fractional_min, solve_lp
from .strong import gbr_strong, strong_search, vacuous_root_inference

__version__ = "0.1.0"

__all__ = [
    "Caps", "Constraint", "CredalError", "CredalNetwork", "CredalSpec", "EngineMismatchError",
    "GbrTask", "GbrUndefinedError", "InferenceResult", "LinearProgram", "NetworkFormatError",
    "SizeCapError", "ValidationError", "bn_expectation", "choose_engine", "classify_predictive_hmm",
    "epistemic_polytope", "epistemic_search", "fractional_min", "gbr_epistemic", "gbr_hmm",
    "gbr_strong", "hmm_search", "infer", "joint_pmf", "parse_network", "parse_task",
    "phi_epistemic", "serialize_network", "serialize_task", "solve_lp", "strong_search",
    "vacuous_root_inference", "validate_network",
]
