"""Replace computable (possibly irrational) parameters by nearby rationals.

Each entry is approximated to within ``2**-((n+1)(v+1)) * eps`` (``n``
variables, ``v`` the largest cardinality) and, in every pmf, the largest
entry is recomputed as one minus the others so masses stay exactly one.
This keeps every joint marginal of every extreme within ``eps`` of the
original, and extremes stay in index-preserving correspondence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from ..model import CredalNetwork, CredalSpec, rational
from .numerics import Computable


@dataclass(frozen=True)
class ComputableNetwork:
    """Same layout as :meth:`CredalNetwork.build`, but pmf entries may be :class:`Computable`.

    ``specs[i][k]`` is the list of extrema of node ``i`` under parent
    configuration ``k``.
    """

    variables: tuple
    arcs: tuple
    specs: tuple

    @property
    def n(self) -> int:
        return len(self.variables)

    @property
    def max_card(self) -> int:
        return max(c for _, c in self.variables)


def precision_bits(n_vars: int, max_card: int, eps) -> int:
    """Smallest ``b`` with ``2**-b <= 2**-((n+1)(v+1)) * eps``."""
    eps = rational(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    extra = math.ceil(math.log2(1 / eps)) if eps < 1 else 0
    b = (n_vars + 1) * (max_card + 1) + max(extra, 0)
    # math.log2 may round; settle the bound exactly
    while Fraction(1, 1 << b) > Fraction(1, 1 << ((n_vars + 1) * (max_card + 1))) * eps:
        b += 1
    return b


def _entry(value, bits):
    if isinstance(value, Computable):
        return value.approx(bits)
    return rational(value)


def _rationalize_pmf(pmf: Sequence, bits: int) -> tuple[Fraction, ...]:
    if all(not isinstance(x, Computable) for x in pmf):
        return tuple(rational(x) for x in pmf)
    vals = [_entry(x, bits) for x in pmf]
    top = max(range(len(vals)), key=lambda j: (vals[j], -j))
    vals[top] = 1 - sum(v for j, v in enumerate(vals) if j != top)
    if any(v < 0 for v in vals):
        raise ValueError("rationalized pmf has a negative entry; request a smaller eps")
    return tuple(vals)


def rationalize_network(template: ComputableNetwork, eps, bits: int | None = None) -> CredalNetwork:
    """Rational network whose extreme joints are within ``eps`` of ``template``'s.

    ``bits`` can raise the per-parameter precision above what ``eps``
    requires; it never lowers it.
    """
    need = precision_bits(template.n, template.max_card, eps)
    bits = need if bits is None else max(bits, need)
    specs = []
    for node_specs in template.specs:
        row = []
        for extrema in node_specs:
            row.append(CredalSpec(tuple(_rationalize_pmf(e, bits) for e in extrema)))
        specs.append(row)
    return CredalNetwork.build(list(template.variables), list(template.arcs), specs)
