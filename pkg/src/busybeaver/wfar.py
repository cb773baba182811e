"""Weighted FAR certificates.

Two deterministic weighted automata summarise the tape: the left one reads
the cells left of the head left-to-right, the right one reads the cells
right of the head right-to-left.  A configuration then abstracts to
``[p] f r [q]`` plus the total weight W.  The verifier closes the initial
class ``[p0] A0 [q0]; W=0`` under machine steps, tracking an interval of
weights per class, and succeeds when no reachable class is halting.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Dict, NamedTuple, Optional, Tuple

from .machine import STATE_LETTERS, Configuration, as_machine

INF = math.inf


@dataclass(frozen=True)
class WeightedAutomaton:
    """Total deterministic automaton with integer weights; state 0 is initial."""

    delta: tuple  # delta[state][symbol] -> state
    weight: tuple  # weight[state][symbol] -> int

    def __post_init__(self):
        n = len(self.delta)
        if n == 0 or len(self.weight) != n:
            raise ValueError("delta and weight must have one row per state")
        width = len(self.delta[0])
        for row, wrow in zip(self.delta, self.weight):
            if len(row) != width or len(wrow) != width:
                raise ValueError("automaton is not total over the alphabet")
            if any(not (0 <= t < n) for t in row):
                raise ValueError("transition target out of range")
            if any(not isinstance(w, int) for w in wrow):
                raise ValueError("weights must be integers")

    @classmethod
    def of(cls, delta, weight):
        return cls(tuple(map(tuple, delta)), tuple(map(tuple, weight)))

    @property
    def n_states(self):
        return len(self.delta)

    @property
    def n_symbols(self):
        return len(self.delta[0])

    def run(self, word) -> Tuple[int, int]:
        """(end state, total weight) after reading ``word`` from state 0."""
        q, w = 0, 0
        for a in word:
            w += self.weight[q][a]
            q = self.delta[q][a]
        return q, w

    def predecessors(self, q):
        """(state, symbol) pairs whose transition leads to ``q``."""
        return [(p, a) for p in range(self.n_states) for a in range(self.n_symbols)
                if self.delta[p][a] == q]

    def to_dict(self):
        return {"delta": [list(r) for r in self.delta], "weight": [list(r) for r in self.weight]}


def _shortest(wa: WeightedAutomaton, sign: int):
    """Bellman-Ford from state 0 over weights ``sign * w``; None if unreachable."""
    n = wa.n_states
    dist = [INF] * n
    dist[0] = 0
    edges = [(p, wa.delta[p][a], sign * wa.weight[p][a])
             for p in range(n) for a in range(wa.n_symbols)]
    for _ in range(n - 1):
        changed = False
        for p, q, w in edges:
            if dist[p] + w < dist[q]:
                dist[q] = dist[p] + w
                changed = True
        if not changed:
            break
    # anything still improvable sits downstream of a negative cycle
    bad = [q for p, q, w in edges if dist[p] < INF and dist[p] + w < dist[q]]
    while bad:
        q = bad.pop()
        if dist[q] == -INF:
            continue
        dist[q] = -INF
        bad.extend(wa.delta[q][a] for a in range(wa.n_symbols))
    return [None if d == INF else d for d in dist]


def feasible_bounds(wa: WeightedAutomaton):
    """Per state, (min, max) weight over words ending there, or None if no
    word does.  Infinite ends are ``-inf`` / ``inf``."""
    lo = _shortest(wa, 1)
    hi = _shortest(wa, -1)
    return [None if a is None else (a, -b) for a, b in zip(lo, hi)]


class WeightedConfigClass(NamedTuple):
    left: int
    state: int
    middle: int
    right: int
    lower: float = 0
    upper: float = 0

    @property
    def key(self):
        return self[:4]

    def show(self):
        core = f"[p{self.left}] {STATE_LETTERS[self.state]}{self.middle} [q{self.right}]"
        if self.lower == self.upper:
            return f"{core}; W={self.lower}"
        parts = []
        if self.lower > -INF:
            parts.append(f"W>={self.lower}")
        if self.upper < INF:
            parts.append(f"W<={self.upper}")
        return f"{core}; {'; '.join(parts) or 'any W'}"


@dataclass(frozen=True)
class WfarCertificate:
    left: WeightedAutomaton
    right: WeightedAutomaton
    P: int

    def to_json(self, machine=None) -> str:
        doc = {}
        if machine is not None:
            doc["machine"] = str(machine)
        doc.update(P=self.P, left=self.left.to_dict(), right=self.right.to_dict())
        return json.dumps(doc, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "WfarCertificate":
        doc = json.loads(text)
        return cls(WeightedAutomaton.of(**doc["left"]), WeightedAutomaton.of(**doc["right"]),
                   int(doc["P"]))


class Closed(NamedTuple):
    classes: Dict[tuple, Tuple[float, float]]

    def members(self):
        return [WeightedConfigClass(*k, lo, hi) for k, (lo, hi) in sorted(self.classes.items())]


class HaltReached(NamedTuple):
    cls: WeightedConfigClass
    all_halting: tuple = ()


class LimitReached(NamedTuple):
    reason: str


def close_accept_set(tm, cert: WfarCertificate, prune: bool = True,
                     max_classes: int = 10**6, max_updates: Optional[int] = None,
                     stop_at_halt: bool = True):
    """Least weighted-forward-closed class set containing the initial class.

    Bounds are widened (upper set to +inf) once the lower bound reaches P.
    With ``prune`` the bounds are intersected with the weights actually
    attainable at the automaton states and empty classes are dropped.
    Without ``stop_at_halt`` the closure is completed and every halting
    class is reported.
    """
    tm = as_machine(tm)
    L, R, P = cert.left, cert.right, cert.P
    fl, fr = feasible_bounds(L), feasible_bounds(R)
    preds_L = [L.predecessors(p) for p in range(L.n_states)]
    preds_R = [R.predecessors(q) for q in range(R.n_states)]
    if max_updates is None:
        max_updates = 20 * max_classes

    def tighten(p, q, lo, hi):
        if lo >= P:
            hi = INF
        if prune:
            if fl[p] is None or fr[q] is None:
                return None
            lo = max(lo, fl[p][0] + fr[q][0])
            hi = min(hi, fl[p][1] + fr[q][1])
            if lo > hi:
                return None
        return lo, hi

    store: Dict[tuple, Tuple[float, float]] = {}
    todo = []

    def add(key, lo, hi):
        b = tighten(key[0], key[3], lo, hi)
        if b is None:
            return
        old = store.get(key)
        if old is not None:
            if old[0] <= b[0] and old[1] >= b[1]:
                return
            b = tighten(key[0], key[3], min(old[0], b[0]), max(old[1], b[1]))
        store[key] = b
        todo.append(key)

    add((0, 0, 0, 0), 0, 0)
    halting = {}
    updates = 0
    while todo:
        updates += 1
        if len(store) > max_classes or updates > max_updates:
            return LimitReached("class limit reached")
        key = todo.pop()
        p, f, r, q = key
        lo, hi = store[key]
        tr = tm[f, r]
        if tr is None:
            halting[key] = None
            if stop_at_halt:
                break
            continue
        b, t = tr.write, tr.next
        if tr.move > 0:
            p2 = L.delta[p][b]
            for q1, r1 in preds_R[q]:
                c = L.weight[p][b] - R.weight[q1][r1]
                add((p2, t, r1, q1), lo + c, hi + c)
        else:
            q2 = R.delta[q][b]
            for p1, r1 in preds_L[p]:
                c = R.weight[q][b] - L.weight[p1][r1]
                add((p1, t, r1, q2), lo + c, hi + c)
    if halting:
        found = tuple(WeightedConfigClass(*k, *store[k]) for k in halting)
        return HaltReached(found[0], found)
    return Closed(store)


class WfarResult(NamedTuple):
    verified: bool
    reason: str = ""
    closure: object = None

    def __str__(self):
        return "Verified" if self.verified else f"Failed({self.reason})"


def check_wfar(tm, cert: WfarCertificate, prune: bool = True, max_classes: int = 10**6) -> WfarResult:
    tm = as_machine(tm)
    if cert.left.n_symbols != tm.n_symbols or cert.right.n_symbols != tm.n_symbols:
        raise ValueError("certificate alphabet does not match the machine")
    if (cert.left.delta[0][0] != 0 or cert.right.delta[0][0] != 0
            or cert.left.weight[0][0] != 0 or cert.right.weight[0][0] != 0):
        return WfarResult(False, "zeros not ignored")
    out = close_accept_set(tm, cert, prune, max_classes)
    if isinstance(out, HaltReached):
        return WfarResult(False, f"halting class {out.cls.show()}", out)
    if isinstance(out, LimitReached):
        return WfarResult(False, out.reason, out)
    return WfarResult(True, "", out)


def weighted_class(cert: WfarCertificate, cfg: Configuration) -> Tuple[tuple, int]:
    """(class key, total weight) of a concrete configuration."""
    span = cfg.nonzero_span()
    lo, hi = (cfg.head, cfg.head) if span is None else (min(span[0], cfg.head),
                                                       max(span[1], cfg.head))
    p, wl = cert.left.run(cfg.cells(lo, cfg.head - 1))
    q, wr = cert.right.run(reversed(cfg.cells(cfg.head + 1, hi)))
    return (p, cfg.state, cfg.read(), q), wl + wr


def accepts_configuration(tm, cert: WfarCertificate, closed: Closed, cfg: Configuration) -> bool:
    key, w = weighted_class(cert, cfg)
    b = closed.classes.get(key)
    return b is not None and b[0] <= w <= b[1]
