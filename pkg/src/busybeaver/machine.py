"""Turing machines: text format, simulation, normal forms."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple, Optional, Sequence, Union

import numpy as np

from . import _kernels

MAX_STATES = 8
MAX_SYMBOLS = 6
STATE_LETTERS = "ABCDEFGH"

_TRIPLE = re.compile(r"^([0-9])([LR])([A-Z])$")


class MachineFormatError(ValueError):
    pass


class Transition(NamedTuple):
    write: int
    move: int  # +1 right, -1 left
    next: int

    def __str__(self):
        return f"{self.write}{'R' if self.move > 0 else 'L'}{STATE_LETTERS[self.next]}"


@dataclass(frozen=True)
class TransitionTable:
    """Partial transition function; ``entries[state * n_symbols + symbol]``."""

    n_states: int
    n_symbols: int
    entries: tuple

    def __post_init__(self):
        if not 1 <= self.n_states <= MAX_STATES:
            raise ValueError(f"n_states out of range: {self.n_states}")
        if not 2 <= self.n_symbols <= MAX_SYMBOLS:
            raise ValueError(f"n_symbols out of range: {self.n_symbols}")
        if len(self.entries) != self.n_states * self.n_symbols:
            raise ValueError("entries length does not match dimensions")
        for tr in self.entries:
            if tr is None:
                continue
            if not (0 <= tr.write < self.n_symbols and 0 <= tr.next < self.n_states
                    and tr.move in (-1, 1)):
                raise ValueError(f"invalid transition {tr!r}")

    @classmethod
    def empty(cls, n_states, n_symbols):
        return cls(n_states, n_symbols, (None,) * (n_states * n_symbols))

    def __getitem__(self, key):
        state, symbol = key
        return self.entries[state * self.n_symbols + symbol]

    def with_entry(self, state, symbol, tr: Optional[Transition]) -> "TransitionTable":
        e = list(self.entries)
        e[state * self.n_symbols + symbol] = tr
        return TransitionTable(self.n_states, self.n_symbols, tuple(e))

    def __str__(self):
        return emit_machine(self)

    @cached_property
    def code(self) -> np.ndarray:
        """Packed table for the compiled kernels."""
        return pack(self.entries)

    def mirrored(self) -> "TransitionTable":
        return TransitionTable(self.n_states, self.n_symbols, tuple(
            None if t is None else Transition(t.write, -t.move, t.next) for t in self.entries))

    def undefined(self):
        """(state, symbol) slots with no transition."""
        s = self.n_symbols
        return [(i // s, i % s) for i, t in enumerate(self.entries) if t is None]


def pack(entries) -> np.ndarray:
    return np.array([-1 if t is None else t.write * 32 + (16 if t.move > 0 else 0) + t.next
                     for t in entries], dtype=np.int64)


def parse_machine(text: str) -> TransitionTable:
    text = text.strip()
    groups = text.split("_")
    n = len(groups)
    width = len(groups[0])
    if width % 3 or any(len(g) != width for g in groups):
        raise MachineFormatError(f"inconsistent group lengths in {text!r}")
    s = width // 3
    if not 2 <= s <= MAX_SYMBOLS:
        raise MachineFormatError(f"group length mismatch for s=2: {text!r}" if s < 2
                                 else f"too many symbols: {text!r}")
    if n > MAX_STATES:
        raise MachineFormatError(f"too many states: {text!r}")
    entries = []
    for g in groups:
        for k in range(s):
            tri = g[3 * k:3 * k + 3]
            if tri == "---":
                entries.append(None)
                continue
            m = _TRIPLE.match(tri)
            if not m:
                raise MachineFormatError(f"malformed triple {tri!r}")
            w = int(m.group(1))
            if w >= s:
                raise MachineFormatError(f"symbol {w} >= {s} in {tri!r}")
            nxt = ord(m.group(3)) - ord("A")
            if nxt >= n:
                entries.append(None)  # halting triple such as 1RZ
                continue
            entries.append(Transition(w, 1 if m.group(2) == "R" else -1, nxt))
    return TransitionTable(n, s, tuple(entries))


def emit_machine(tm: TransitionTable) -> str:
    s = tm.n_symbols
    return "_".join(
        "".join("---" if t is None else str(t) for t in tm.entries[q * s:(q + 1) * s])
        for q in range(tm.n_states))


def as_machine(m: Union[str, TransitionTable]) -> TransitionTable:
    return parse_machine(m) if isinstance(m, str) else m


@dataclass
class Configuration:
    """Mutable machine configuration over a growable tape."""

    tape: bytearray = field(default_factory=lambda: bytearray(16))
    origin: int = 8
    head: int = 0
    state: int = 0
    steps: int = 0
    min_pos: int = 0
    max_pos: int = 0
    halted: bool = False

    def read(self, pos=None):
        i = (self.head if pos is None else pos) + self.origin
        return self.tape[i] if 0 <= i < len(self.tape) else 0

    def write(self, sym):
        self._ensure(self.head)
        self.tape[self.head + self.origin] = sym

    def _ensure(self, pos):
        i = pos + self.origin
        if i < 0:
            grow = max(len(self.tape), -i)
            self.tape[0:0] = bytes(grow)
            self.origin += grow
        elif i >= len(self.tape):
            self.tape.extend(bytes(max(len(self.tape), i - len(self.tape) + 1)))

    def cells(self, lo, hi):
        """Symbols at positions lo..hi inclusive."""
        return [self.read(p) for p in range(lo, hi + 1)]

    def nonzero_span(self):
        """(first, last) positions of non-zero cells, or None on a blank tape."""
        nz = [i for i, c in enumerate(self.tape) if c]
        if not nz:
            return None
        return nz[0] - self.origin, nz[-1] - self.origin

    def sigma(self):
        return sum(1 for c in self.tape if c)

    @classmethod
    def from_cells(cls, cells: Sequence[int], head: int, state: int):
        """Configuration whose tape holds ``cells`` at positions 0..len-1."""
        c = cls(tape=bytearray(cells) or bytearray(1), origin=0, head=head, state=state,
                min_pos=min(0, head), max_pos=max(0, head))
        c._ensure(head)
        return c


class Stepped(NamedTuple):
    cfg: Configuration


class HaltedOnUndefined(NamedTuple):
    cfg: Configuration
    state: int
    symbol: int


def step(tm: TransitionTable, cfg: Configuration):
    """Apply one transition in place."""
    sym = cfg.read()
    tr = tm[cfg.state, sym]
    cfg.steps += 1
    if tr is None:
        cfg.halted = True
        return HaltedOnUndefined(cfg, cfg.state, sym)
    cfg.write(tr.write)
    cfg.head += tr.move
    cfg.state = tr.next
    if cfg.head < cfg.min_pos:
        cfg.min_pos = cfg.head
    if cfg.head > cfg.max_pos:
        cfg.max_pos = cfg.head
    cfg._ensure(cfg.head)
    return Stepped(cfg)


@dataclass(frozen=True)
class Halted:
    """``sigma`` includes the cell written by the halting transition."""

    steps: int
    sigma: int
    space: int
    state: int = 0
    symbol: int = 0


@dataclass(frozen=True)
class StillRunning:
    steps: int


def simulate(tm, max_steps: int):
    """Run from the blank tape; Halted or StillRunning."""
    tm = as_machine(tm)
    halted, steps, state, head, lo, hi, tape, origin = _kernels.run(tm.code, tm.n_symbols, max_steps)
    if not halted:
        return StillRunning(int(steps))
    return halted_metrics(int(steps), tape, origin, int(head), int(lo), int(hi), int(state))


def halted_metrics(steps, tape, origin, head, lo, hi, state) -> Halted:
    # the halting transition counts as writing a 1 (the ``1RZ`` convention)
    sym = int(tape[head + origin])
    sigma = int(np.count_nonzero(tape)) + (sym == 0)
    return Halted(steps, sigma, hi - lo + 1, state, sym)


def run_tape(tm, max_steps: int):
    """Final (halted, steps, Configuration) after at most ``max_steps`` steps."""
    tm = as_machine(tm)
    halted, steps, state, head, lo, hi, tape, origin = _kernels.run(tm.code, tm.n_symbols, max_steps)
    cfg = Configuration(tape=bytearray(tape.tobytes()), origin=int(origin), head=int(head),
                        state=int(state), steps=int(steps), min_pos=int(lo), max_pos=int(hi),
                        halted=bool(halted))
    return bool(halted), int(steps), cfg


# --- normal forms -----------------------------------------------------------

class Normalization(NamedTuple):
    machine: TransitionTable
    complete: bool  # every state was visited within the budget


def _first_visit_order(tm, budget):
    """Visit order of states/written symbols plus used slots, by direct simulation."""
    cfg = Configuration()
    states = [0]
    symbols = [0]
    used = set()
    first_move = None
    halted = False
    for _ in range(budget):
        sym = cfg.read()
        tr = tm[cfg.state, sym]
        if tr is None:
            halted = True
            break
        used.add((cfg.state, sym))
        if first_move is None:
            first_move = tr.move
        if tr.write not in symbols:
            symbols.append(tr.write)
        if tr.next not in states:
            states.append(tr.next)
        step(tm, cfg)
    return states, symbols, used, first_move, halted


def relabel(tm: TransitionTable, state_perm, symbol_perm=None, mirror=False) -> TransitionTable:
    """Rename states by ``state_perm[old] = new`` (and symbols likewise)."""
    s = tm.n_symbols
    sym = symbol_perm or list(range(s))
    e = [None] * len(tm.entries)
    for i, t in enumerate(tm.entries):
        if t is None:
            continue
        q, a = divmod(i, s)
        e[state_perm[q] * s + sym[a]] = Transition(sym[t.write], -t.move if mirror else t.move,
                                                    state_perm[t.next])
    return TransitionTable(tm.n_states, s, tuple(e))


def tnf_normalize_ex(tm, step_budget: int = 10_000, symbol_order: str = "strict") -> Normalization:
    tm = as_machine(tm)
    states, symbols, used, first_move, halted = _first_visit_order(tm, step_budget)
    complete = halted or len(states) == tm.n_states
    if halted:
        tm = TransitionTable(tm.n_states, tm.n_symbols, tuple(
            t if (i // tm.n_symbols, i % tm.n_symbols) in used else None
            for i, t in enumerate(tm.entries)))
    order = states + [q for q in range(tm.n_states) if q not in states]
    sperm = [0] * tm.n_states
    for new, old in enumerate(order):
        sperm[old] = new
    yperm = None
    if symbol_order == "strict":
        ysyms = symbols + [a for a in range(tm.n_symbols) if a not in symbols]
        yperm = [0] * tm.n_symbols
        for new, old in enumerate(ysyms):
            yperm[old] = new
    return Normalization(relabel(tm, sperm, yperm, mirror=first_move == -1), complete)


def tnf_normalize(tm, step_budget: int = 10_000, symbol_order: str = "strict") -> TransitionTable:
    """Rename states (and non-zero symbols under ``strict``) by first visit,
    mirror if the first move is L, and drop unused transitions of machines
    that halt within the budget.  See ``tnf_normalize_ex`` for the
    partial-normalization flag."""
    return tnf_normalize_ex(tm, step_budget, symbol_order).machine


def tm_to_1rb(tm, step_budget: int = 10_000) -> Optional[TransitionTable]:
    """Skip the blank-tape prefix of a machine whose first transition writes 0.

    While the machine only writes 0 the tape stays blank, so the run from the
    first state that writes a non-zero symbol is the run of the same machine
    started in that state.  Returns None when the first transition already
    writes non-zero, or the prefix halts or never writes.
    """
    tm = as_machine(tm)
    q = 0
    seen = set()
    while True:
        tr = tm[q, 0]
        if tr is None or q in seen:
            return None
        if tr.write != 0:
            break
        seen.add(q)
        q = tr.next
    if q == 0:
        return None
    perm = list(range(tm.n_states))
    perm[0], perm[q] = q, 0
    swapped = relabel(tm, perm)
    return tnf_normalize_ex(swapped, step_budget, symbol_order="quasi").machine
