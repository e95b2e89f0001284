"""Predictive inference on imprecise hidden Markov models.

A predictive task asks for the terminal state of a chain of hidden states,
given observations on manifest leaves hanging off earlier states.  For such
tasks the strong and epistemic extensions give the same lower expectation,
and a backward sweep computes it in time linear in the chain length.

Any node numbering is accepted: the chain is recovered as the path from the
single root to the query.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from gmpy2 import mpq

from .errors import EngineMismatchError, GbrUndefinedError
from .model import CredalNetwork, GbrTask, check_task


@dataclass(frozen=True)
class PredictiveHmm:
    net: CredalNetwork
    chain: tuple[int, ...]                   # root first, query last
    manifests: tuple[tuple[int, ...], ...]   # leaves hanging off chain[k]
    markov_chain: bool                       # every manifest copies its state


@dataclass(frozen=True)
class HmmClassification:
    hmm: PredictiveHmm | None
    reason: str | None

    @property
    def accepted(self) -> bool:
        return self.hmm is not None


def _identity_manifest(net: CredalNetwork, m: int) -> bool:
    (p,) = net.parents(m)
    if net.cards[m] != net.cards[p]:
        return False
    for x in range(net.cards[p]):
        spec = net.spec(m, (x,))
        if not spec.is_singleton or spec.extrema[0][x] != 1:
            return False
    return True


def classify_predictive_hmm(net: CredalNetwork, task: GbrTask) -> HmmClassification:
    """Accept ``task`` iff it is a predictive query on a tree-shaped HMM."""
    def reject(reason):
        return HmmClassification(None, reason)

    if any(len(net.parents(i)) > 1 for i in range(net.n)):
        return reject("network is not a tree (a node has several parents)")
    roots = net.roots()
    if len(roots) != 1:
        return reject("network must have exactly one root")
    inner = [i for i in range(net.n) if net.children(i)]
    for i in inner:
        if sum(1 for c in net.children(i) if net.children(c)) > 1:
            return reject("state nodes do not form a chain")
    q = task.query
    if net.children(q):
        return reject("query node has descendants")
    parent = net.parents(q)
    last = [i for i in inner if not any(net.children(c) for c in net.children(i))]
    if parent and (not last or parent[0] != last[0]):
        return reject("query node is not the terminal state node")
    if not parent and net.n > 1:
        return reject("query node is not the terminal state node")
    chain = [q]
    while net.parents(chain[-1]):
        chain.append(net.parents(chain[-1])[0])
    chain.reverse()
    on_chain = set(chain)
    for i in task.evidence_map:
        if i in on_chain:
            return reject(f"evidence on state node {i}")
    manifests = tuple(tuple(c for c in net.children(s) if c not in on_chain) for s in chain)
    flat = [m for ms in manifests for m in ms]
    markov = all(_identity_manifest(net, m) for m in flat)
    return HmmClassification(PredictiveHmm(net, tuple(chain), manifests, markov), None)


def _require(net, task) -> PredictiveHmm:
    check_task(net, task)
    c = classify_predictive_hmm(net, task)
    if not c.accepted:
        raise EngineMismatchError(f"not a predictive HMM task: {c.reason}")
    return c.hmm


def _rows(net, i):
    return [[tuple(mpq(v.numerator, v.denominator) for v in e) for e in spec.extrema]
            for spec in net.local_specs[i]]


def _sweep(hmm: PredictiveHmm, f, evidence, mu):
    """Backward recursion.  Returns ``(phi, N, D)`` with ``phi = N - mu * D``.

    ``N`` and ``D`` are the numerator and denominator of the GBR ratio at
    the extrema selection that minimises ``phi``, so fixing that selection
    makes ``phi`` linear in ``mu``.
    """
    net = hmm.net
    h = [fv - mu for fv in f]
    hn = list(f)
    hd = [mpq(1)] * len(f)
    for k in range(len(hmm.chain) - 1, -1, -1):
        s = hmm.chain[k]
        if k + 1 < len(hmm.chain):
            child = hmm.chain[k + 1]
            rows = _rows(net, child)
            nh, nn, nd = [], [], []
            for x in range(net.cards[s]):
                best = None
                for q in rows[x]:
                    v = sum(a * b for a, b in zip(q, h))
                    if best is None or v < best[0]:
                        best = (v, q)
                q = best[1]
                nh.append(best[0])
                nn.append(sum(a * b for a, b in zip(q, hn)))
                nd.append(sum(a * b for a, b in zip(q, hd)))
            h, hn, hd = nh, nn, nd
        for m in hmm.manifests[k]:
            if m not in evidence:
                continue
            e = evidence[m]
            rows = _rows(net, m)
            for x in range(net.cards[s]):
                vals = [q[e] for q in rows[x]]
                w = min(vals) if h[x] >= 0 else max(vals)
                h[x] *= w
                hn[x] *= w
                hd[x] *= w
    best = None
    for q in _rows(net, hmm.chain[0])[0]:
        v = sum(a * b for a, b in zip(q, h))
        if best is None or v < best[0]:
            best = (v, sum(a * b for a, b in zip(q, hn)), sum(a * b for a, b in zip(q, hd)))
    return best


def _mpq(x):
    x = Fraction(x)
    return mpq(x.numerator, x.denominator)


def _frac(x):
    return Fraction(int(x.numerator), int(x.denominator))


def phi_hmm(hmm: PredictiveHmm, task: GbrTask, mu) -> Fraction:
    """``min_p sum_{x ~ evidence} (f(x_q) - mu) p(x)`` by the backward sweep."""
    f = [_mpq(v) for v in task.f]
    return _frac(_sweep(hmm, f, task.evidence_map, _mpq(mu))[0])


def min_evidence_probability(hmm: PredictiveHmm, task: GbrTask) -> Fraction:
    zeros = [mpq(0)] * len(task.f)
    return _frac(_sweep(hmm, zeros, task.evidence_map, mpq(-1))[0])


@dataclass(frozen=True)
class HmmResult:
    mu: Fraction
    min_evidence_probability: Fraction
    bisection_steps: int
    root_steps: int


def hmm_search(net: CredalNetwork, task: GbrTask, halvings: int = 8) -> HmmResult:
    hmm = _require(net, task)
    lower, sign = task.lower_form()
    ev = lower.evidence_map
    min_ev = min_evidence_probability(hmm, lower)
    if min_ev == 0:
        raise GbrUndefinedError("GBR undefined: min p(evidence) = 0")
    f = [_mpq(v) for v in lower.f]
    lo, hi = min(f), max(f)
    steps = 0
    # coarse bracketing, then Newton (Dinkelbach) steps on the piecewise-linear phi
    while steps < halvings and lo < hi:
        mid = (lo + hi) / 2
        if _sweep(hmm, f, ev, mid)[0] >= 0:
            lo = mid
        else:
            hi = mid
        steps += 1
    mu = hi
    rounds = 0
    while True:
        phi, num, den = _sweep(hmm, f, ev, mu)
        rounds += 1
        if phi == 0:
            break
        mu = num / den
    return HmmResult(sign * _frac(mu), _frac(min_ev), steps, rounds)


def gbr_hmm(net: CredalNetwork, task: GbrTask) -> Fraction:
    """Lower (or upper) expectation of a predictive HMM query.

    ``phi`` is concave and piecewise linear in ``mu``.  Starting at or above
    its root, each step jumps to the root of the active linear piece, so the
    iterates decrease monotonically and stop on the exact root after finitely
    many steps; the final ``phi(mu) == 0`` check is the certificate.
    """
    return hmm_search(net, task).mu
