"""Small reference networks with known lower expectations."""

from fractions import Fraction as F

from .model import CredalNetwork, CredalSpec, GbrTask

ROOT_SET = CredalSpec(((F(2, 5), F(3, 5)), (F(1, 2), F(1, 2))))


def parity_network() -> CredalNetwork:
    """Two imprecise Boolean roots and a child equal to ``[x1 == x2, x1 != x2]``.

    Lower ``p(x3 = 0)`` is 1/2 under strong independence and 5/11 under
    epistemic irrelevance.
    """
    same, diff = ((1, 0),), ((0, 1),)
    return CredalNetwork.build(
        [("X1", 2), ("X2", 2), ("X3", 2)],
        [(0, 2), (1, 2)],
        [ROOT_SET, ROOT_SET, {(0, 0): same, (0, 1): diff, (1, 0): diff, (1, 1): same}],
    )


def parity_task() -> GbrTask:
    return GbrTask(2, (1, 0))


def four_node_hmm() -> CredalNetwork:
    """States X1 -> X2, manifests X3 (child of X2) and X4 (child of X1).

    Querying ``x4 = 0`` given ``x3 = 0`` gives 4/7 under strong independence
    and 7/13 under epistemic irrelevance: the query sits on a manifest node,
    so the semantics differ.
    """
    hi, lo = ((F(3, 4), F(1, 4)),), ((F(1, 4), F(3, 4)),)
    return CredalNetwork.build(
        [("X1", 2), ("X2", 2), ("X3", 2), ("X4", 2)],
        [(0, 1), (1, 2), (0, 3)],
        [
            CredalSpec(hi),
            [hi, lo],
            [((F(1, 4), F(3, 4)), (F(1, 2), F(1, 2))), ((F(3, 4), F(1, 4)), (F(1, 2), F(1, 2)))],
            [hi, lo],
        ],
    )


def four_node_hmm_task() -> GbrTask:
    return GbrTask(3, (1, 0), {2: 0})
