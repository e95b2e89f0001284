"""Hardness-reduction gadgets and their brute-force oracles."""

from .certificate import GadgetCertificate
from .emajsat import (EMajsatInstance, FormulaError, decide_emajsat, emajsat_brute, gen_emajsat,
                      parse_formula, selector_identity)
from .numerics import Computable, approx_pow2, h_bump, pow2, pow2_enclosure, pow2_ratio
from .partition import (PartitionInstance, decide_partition, gen_polytree_partition, gen_tree_partition,
                        partition_brute, partition_normalize, polytree_identity, tree_gadget_analysis)
from .rationalize import ComputableNetwork, rationalize_network

__all__ = [
    "Computable", "ComputableNetwork", "EMajsatInstance", "FormulaError", "GadgetCertificate",
    "PartitionInstance", "approx_pow2", "decide_emajsat", "decide_partition", "emajsat_brute",
    "gen_emajsat", "gen_polytree_partition", "gen_tree_partition", "h_bump", "parse_formula",
    "partition_brute", "partition_normalize", "polytree_identity", "pow2", "pow2_enclosure",
    "pow2_ratio", "rationalize_network", "selector_identity", "tree_gadget_analysis",
]
