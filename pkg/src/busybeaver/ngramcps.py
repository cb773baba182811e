"""n-gram Closed Position Set decider, with history-augmented alphabets.

A local configuration is (left n-gram, state, middle symbol, right n-gram).
Starting from the blank local configuration, every reachable local
configuration is generated; left and right n-grams pushed off by head moves
are collected in sets L and R, and a move pulls in any compatible n-gram
from the opposite set.  If the closure saturates without meeting an
undefined transition, the machine never halts.
"""
from __future__ import annotations

from collections import defaultdict
from typing import NamedTuple, Optional

from .machine import STATE_LETTERS, as_machine
from .verdict import NONHALT, UNKNOWN, Verdict


class LocalConfiguration(NamedTuple):
    left: tuple  # left[-1] is adjacent to the head
    state: int
    middle: int
    right: tuple  # right[0] is adjacent to the head


class AugmentedMachine:
    """A machine over an augmented alphabet, with symbols interned to ints.

    variant is "plain", "fixed" (history length ``h``) or "lru".  Symbols are
    (base, history) pairs, history being a tuple of (state, base) pairs with
    the most recent first.  Code 0 is always the blank symbol.
    """

    def __init__(self, tm, variant="plain", h=0):
        self.tm = as_machine(tm)
        if variant == "fixed" and h == 0:
            variant = "plain"
        if variant not in ("plain", "fixed", "lru"):
            raise ValueError(f"unknown variant {variant!r}")
        self.variant = variant
        self.h = h
        self.symbols = []
        self._code = {}
        self._delta = {}
        self.intern((0, ()))

    def intern(self, sym) -> int:
        c = self._code.get(sym)
        if c is None:
            c = len(self.symbols)
            self._code[sym] = c
            self.symbols.append(sym)
        return c

    def base(self, code) -> int:
        return self.symbols[code][0]

    def updated(self, state, sym, write):
        """Symbol left behind after ``state`` reads ``sym`` and writes ``write``."""
        b, hist = sym
        if self.variant == "plain":
            return (write, ())
        if self.variant == "fixed":
            return (write, (((state, b),) + hist)[:self.h])
        return (write, ((state, b),) + tuple(x for x in hist if x != (state, b)))

    def delta(self, state, code):
        """(write code, move, next state) or None when undefined."""
        key = (state, code)
        try:
            return self._delta[key]
        except KeyError:
            pass
        sym = self.symbols[code]
        tr = self.tm[state, sym[0]]
        out = None if tr is None else (self.intern(self.updated(state, sym, tr.write)),
                                       tr.move, tr.next)
        self._delta[key] = out
        return out

    def show(self, code):
        b, hist = self.symbols[code]
        if self.variant == "plain":
            return str(b)
        return f"{b},[{','.join(f'({STATE_LETTERS[q]},{a})' for q, a in hist)}]"


def augment_fixed_history(tm, h: int) -> AugmentedMachine:
    return AugmentedMachine(tm, "fixed", h)


def augment_lru(tm) -> AugmentedMachine:
    return AugmentedMachine(tm, "lru")


class CpsResult(NamedTuple):
    verdict: Verdict
    configs: set
    left_grams: set
    right_grams: set
    machine: AugmentedMachine


def ngram_closure(am: AugmentedMachine, n_l: int, n_r: int, max_configs: int) -> CpsResult:
    """Least closed set of local configurations, or UNKNOWN.

    Worklist version of the fixpoint: each configuration is expanded once
    against the n-grams known so far and is re-joined with n-grams
    discovered later through waiting lists keyed on the overlap.
    """
    g0l = (0,) * n_l
    g0r = (0,) * n_r
    L = {g0l}
    R = {g0r}
    # n-grams indexed by the part that must overlap the current window
    L_by_suffix = defaultdict(set)  # l[1:] -> {l[0]}
    R_by_prefix = defaultdict(set)  # r[:-1] -> {r[-1]}
    L_by_suffix[g0l[1:]].add(0)
    R_by_prefix[g0r[:-1]].add(0)
    # moves waiting for a compatible n-gram
    wait_right = defaultdict(list)  # right[1:] -> [(new left, next state, middle)]
    wait_left = defaultdict(list)  # left[:-1] -> [(new right, next state, middle)]
    start = LocalConfiguration(g0l, 0, 0, g0r)
    C = {start}
    todo = [start]
    delta = am.delta

    def add(c):
        if c not in C:
            C.add(c)
            todo.append(c)

    def unknown():
        return CpsResult(Verdict(UNKNOWN), C, L, R, am)

    while todo:
        if len(C) > max_configs:
            return unknown()
        c = todo.pop()
        tr = delta(c.state, c.middle)
        if tr is None:
            return unknown()
        w, move, t = tr
        if move > 0:
            g = c.left
            if g not in L:
                L.add(g)
                L_by_suffix[g[1:]].add(g[0])
                for right, t2, mid in wait_left.get(g[1:], ()):
                    add(LocalConfiguration(g, t2, mid, right))
            new_left = c.left[1:] + (w,)
            key = c.right[1:]
            entry = (new_left, t, c.right[0])
            wait_right[key].append(entry)
            for last in tuple(R_by_prefix.get(key, ())):
                add(LocalConfiguration(new_left, t, c.right[0], key + (last,)))
        else:
            g = c.right
            if g not in R:
                R.add(g)
                R_by_prefix[g[:-1]].add(g[-1])
                for left, t2, mid in wait_right.get(g[:-1], ()):
                    add(LocalConfiguration(left, t2, mid, g))
            new_right = (w,) + c.right[:-1]
            key = c.left[:-1]
            entry = (new_right, t, c.left[-1])
            wait_left[key].append(entry)
            for first in tuple(L_by_suffix.get(key, ())):
                add(LocalConfiguration((first,) + key, t, c.left[-1], new_right))
    return CpsResult(Verdict(NONHALT, "closed n-gram set"), C, L, R, am)


def decide_ngram_cps(tm, variant="plain", n_l=2, n_r=2, max_configs=10_000, h=0) -> Verdict:
    """variant: "plain", ("fixed", h) / "fixed" with ``h``, or "lru"."""
    if isinstance(variant, tuple):
        variant, h = variant
    am = AugmentedMachine(tm, variant, h)
    return ngram_closure(am, n_l, n_r, max_configs).verdict


def step_local(am: AugmentedMachine, c: LocalConfiguration, R=None, L=None) -> Optional[list]:
    """Successors of one local configuration against n-gram sets R and L."""
    tr = am.delta(c.state, c.middle)
    if tr is None:
        return None
    w, move, t = tr
    if move > 0:
        new_left = c.left[1:] + (w,)
        return [LocalConfiguration(new_left, t, c.right[0], r) for r in sorted(R)
                if r[:-1] == c.right[1:]]
    new_right = (w,) + c.right[:-1]
    return [LocalConfiguration(l, t, c.left[-1], new_right) for l in sorted(L)
            if l[1:] == c.left[:-1]]
