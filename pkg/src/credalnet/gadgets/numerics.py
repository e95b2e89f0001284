"""Certified rational enclosures of powers of two.

Everything is done in fixed point: an integer ``m`` at scale ``P`` stands
for ``m / 2**P``.  Lower bounds are accumulated with floors and upper
bounds with ceilings, so every enclosure is rigorous.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from ..model import rational

Enclosure = tuple[Fraction, Fraction]


def _floor_mul(m: int, y: Fraction, j: int) -> int:
    return (m * y.numerator) // (y.denominator * j)


def _ceil_mul(m: int, y: Fraction, j: int) -> int:
    return -((-m * y.numerator) // (y.denominator * j))


def _ln2_fixed(P: int) -> tuple[int, int]:
    """``(lo, hi)`` with ``lo / 2**P <= ln 2 <= hi / 2**P`` via ``sum 1/(j 2^j)``."""
    lo = hi = 0
    j = 1
    while True:
        lo += (1 << P) // (j << j)
        hi += -(-(1 << P) // (j << j))
        # tail after term j is at most 1/((j+1) 2^j)
        tail = -(-(1 << P) // ((j + 1) << j))
        if tail <= 1:
            return lo, hi + tail
        j += 1


def _exp_fixed(y_lo: Fraction, y_hi: Fraction, P: int) -> tuple[int, int]:
    """Enclose ``exp(y)`` for ``y`` in ``[y_lo, y_hi]``, ``0 <= y_lo <= y_hi <= 1``."""
    one = 1 << P
    lo_sum = lo_term = one
    hi_sum = hi_term = one
    j = 1
    while True:
        lo_term = _floor_mul(lo_term, y_lo, j)
        hi_term = _ceil_mul(hi_term, y_hi, j)
        lo_sum += lo_term
        hi_sum += hi_term
        # once y/(j+1) <= 1/2 the remaining tail is bounded by the current term
        if hi_term <= 2 and 2 * y_hi <= j + 1:
            return lo_sum, hi_sum + hi_term
        j += 1


def pow2_enclosure(t, bits: int) -> Enclosure:
    """Rational ``(lo, hi)`` containing ``2**t`` with ``hi - lo < 2**-bits``.

    Exact (``lo == hi``) when ``t`` is an integer.
    """
    t = rational(t)
    if t.denominator == 1:
        v = Fraction(2) ** int(t)
        return v, v
    k = math.floor(t)
    r = t - k
    scale = Fraction(2) ** k
    P = bits + 12 + max(k, 0)
    while True:
        l_lo, l_hi = _ln2_fixed(P)
        y_lo = r * Fraction(l_lo, 1 << P)
        y_hi = r * Fraction(l_hi, 1 << P)
        e_lo, e_hi = _exp_fixed(y_lo, y_hi, P)
        lo = scale * Fraction(e_lo, 1 << P)
        hi = scale * Fraction(e_hi, 1 << P)
        if hi - lo < Fraction(1, 1 << bits):
            return lo, hi
        P += 8


def approx_pow2(t, bits: int) -> Fraction:
    """A rational within ``2**-bits`` of ``2**t``; exact for integer ``t``."""
    if bits < 1:
        raise ValueError("bits must be positive")
    lo, hi = pow2_enclosure(t, bits)
    return (lo + hi) / 2


def h_enclosure(v_s, bits: int) -> Enclosure:
    """Enclose ``(2**-(v-1) + 2**(v-1)) / 2`` with width below ``2**-bits``."""
    v_s = rational(v_s)
    a_lo, a_hi = pow2_enclosure(1 - v_s, bits + 1)
    b_lo, b_hi = pow2_enclosure(v_s - 1, bits + 1)
    return (a_lo + b_lo) / 2, (a_hi + b_hi) / 2


def h_bump(v_s, bits: int) -> Fraction:
    """The symmetric convex bump ``(2**-(v-1) + 2**(v-1)) / 2``, minimal (=1) at ``v = 1``."""
    lo, hi = h_enclosure(v_s, bits)
    return (lo + hi) / 2


@dataclass(frozen=True)
class Computable:
    """A real number given by an enclosure procedure ``bits -> (lo, hi)``.

    The procedure must return an interval of width below ``2**-bits``
    containing the number.
    """

    enclose: Callable[[int], Enclosure]
    label: str = ""

    @classmethod
    def exact(cls, value) -> "Computable":
        v = rational(value)
        return cls(lambda bits: (v, v), str(v))

    def approx(self, bits: int) -> Fraction:
        lo, hi = self.enclose(bits + 1)
        if not hi - lo < Fraction(1, 1 << (bits + 1)):
            raise ValueError(f"cannot certify {self.label or 'parameter'} to {bits} bits")
        return (lo + hi) / 2


def pow2(t) -> Computable:
    t = rational(t)
    return Computable(lambda bits: pow2_enclosure(t, bits), f"2^({t})")


def pow2_ratio(t1, t2) -> Computable:
    """``2**t1 / (1 + 2**t2)``, the shape of every irrational gadget parameter."""
    t1, t2 = rational(t1), rational(t2)

    def enclose(bits):
        # |d/dx 2^t1/(1+x)| <= 2^t1 and the numerator enters linearly; 2^(bits+4) covers |t1| <= 2
        n_lo, n_hi = pow2_enclosure(t1, bits + 4)
        d_lo, d_hi = pow2_enclosure(t2, bits + 4)
        return n_lo / (1 + d_hi), n_hi / (1 + d_lo)

    return Computable(enclose, f"2^({t1})/(1+2^({t2}))")


def pow2_simplex(ts) -> tuple[Computable, ...]:
    """The pmf ``2**t_j / sum_l 2**t_l``: irrational entries that sum to exactly one."""
    ts = tuple(rational(t) for t in ts)
    k = len(ts)

    def entry(j):
        def enclose(bits):
            # the denominator is >= 1, so its width bounds the entry's width
            lo = hi = Fraction(0)
            for l, t in enumerate(ts):
                a, b = pow2_enclosure(t - ts[j], bits + k + 1)
                lo, hi = lo + a, hi + b
            return 1 / hi, 1 / lo

        return Computable(enclose, f"2^({ts[j]})/sum")

    return tuple(entry(j) for j in range(k))
