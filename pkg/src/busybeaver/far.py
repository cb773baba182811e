"""Finite Automata Reduction certificates.

An NFA over tape symbols and state letters that accepts every eventually
halting word-representation but rejects the initial configuration proves
that the machine runs forever.  NFAs are Boolean matrices; a row is a
Python int used as a bitset (bit j is column j).
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Dict, List, NamedTuple, Optional, Sequence

from .machine import STATE_LETTERS, Configuration, as_machine


def _bits(x):
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


@dataclass(frozen=True)
class BooleanMatrix:
    n_rows: int
    n_cols: int
    rows: tuple

    @classmethod
    def zeros(cls, n_rows, n_cols):
        return cls(n_rows, n_cols, (0,) * n_rows)

    @classmethod
    def identity(cls, n):
        return cls(n, n, tuple(1 << i for i in range(n)))

    @classmethod
    def from_lists(cls, entries: Sequence[Sequence[int]]):
        n_cols = len(entries[0]) if entries else 0
        return cls(len(entries), n_cols,
                   tuple(sum(1 << j for j, v in enumerate(r) if v) for r in entries))

    def to_lists(self):
        return [[(r >> j) & 1 for j in range(self.n_cols)] for r in self.rows]

    def __getitem__(self, ij):
        i, j = ij
        return (self.rows[i] >> j) & 1

    def __matmul__(self, other: "BooleanMatrix") -> "BooleanMatrix":
        if self.n_cols != other.n_rows:
            raise ValueError("dimension mismatch")
        orows = other.rows
        out = []
        for r in self.rows:
            acc = 0
            for j in _bits(r):
                acc |= orows[j]
            out.append(acc)
        return BooleanMatrix(self.n_rows, other.n_cols, tuple(out))

    def __le__(self, other: "BooleanMatrix"):
        """Elementwise order: every 1 of self is a 1 of other."""
        return all(a & ~b == 0 for a, b in zip(self.rows, other.rows))

    def __ge__(self, other):
        return other <= self


def row_times(v: int, M: BooleanMatrix) -> int:
    acc = 0
    for j in _bits(v):
        acc |= M.rows[j]
    return acc


@dataclass(frozen=True)
class NfaCertificate:
    n: int
    q0: int
    a: int
    s: int
    T_sym: tuple  # one BooleanMatrix per tape symbol
    T_state: tuple  # one BooleanMatrix per machine state
    labels: Optional[tuple] = None

    def __post_init__(self):
        for M in self.T_sym + self.T_state:
            if M.n_rows != self.n or M.n_cols != self.n:
                raise ValueError("transition matrix has wrong dimensions")
        for v in (self.q0, self.a, self.s):
            if v >> self.n:
                raise ValueError("vector longer than n")

    def run(self, word) -> int:
        """Set of NFA states after reading ``word`` (ints are tape symbols,
        letters are machine states)."""
        v = self.q0
        for tok in word:
            M = self.T_state[STATE_LETTERS.index(tok)] if isinstance(tok, str) else self.T_sym[tok]
            v = row_times(v, M)
        return v

    def accepts(self, word) -> bool:
        return bool(self.run(word) & self.a)

    # --- JSON ---
    def to_json(self, machine=None) -> str:
        def vec(v):
            return "".join(str((v >> j) & 1) for j in range(self.n))

        def mat(M):
            return [vec(r) for r in M.rows]
        doc = {"n": self.n}
        if machine is not None:
            doc["machine"] = str(machine)
        if self.labels:
            doc["labels"] = list(self.labels)
        doc.update(q0=vec(self.q0), a=vec(self.a), s=vec(self.s),
                   T={**{str(g): mat(M) for g, M in enumerate(self.T_sym)},
                      **{STATE_LETTERS[q]: mat(M) for q, M in enumerate(self.T_state)}})
        return json.dumps(doc, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "NfaCertificate":
        doc = json.loads(text)
        n = doc["n"]

        def vec(s):
            if len(s) != n:
                raise ValueError("vector length differs from n")
            return sum(1 << j for j, c in enumerate(s) if c == "1")

        def mat(rows):
            if len(rows) != n:
                raise ValueError("matrix row count differs from n")
            return BooleanMatrix(n, n, tuple(vec(r) for r in rows))
        T = doc["T"]
        syms = [mat(T[str(g)]) for g in range(10) if str(g) in T]
        states = [mat(T[c]) for c in STATE_LETTERS if c in T]
        return cls(n, vec(doc["q0"]), vec(doc["a"]), vec(doc["s"]), tuple(syms), tuple(states),
                   tuple(doc["labels"]) if "labels" in doc else None)


class FarResult(NamedTuple):
    verified: bool
    condition: str = ""

    def __str__(self):
        return "Verified" if self.verified else f"Failed({self.condition})"


def reachable_rows(cert: NfaCertificate) -> set:
    """Every q0·T_u for words u over the tape alphabet."""
    seen = {cert.q0}
    todo = [cert.q0]
    while todo:
        v = todo.pop()
        for M in cert.T_sym:
            w = row_times(v, M)
            if w not in seen:
                seen.add(w)
                todo.append(w)
    return seen


def check_far(tm, cert: NfaCertificate) -> FarResult:
    tm = as_machine(tm)
    if len(cert.T_sym) != tm.n_symbols or len(cert.T_state) != tm.n_states:
        raise ValueError("certificate alphabet does not match the machine")
    T0 = cert.T_sym[0]
    a, s = cert.a, cert.s
    if row_times(cert.q0, cert.T_state[0]) & a:
        return FarResult(False, "initial configuration rejected")
    if row_times(cert.q0, T0) != cert.q0:
        return FarResult(False, "leading zeros ignored")
    for i in range(cert.n):
        if bool(T0.rows[i] & a) != bool((a >> i) & 1):
            return FarResult(False, "trailing zeros ignored")
    if not s & a:
        return FarResult(False, "s is accepted")
    for M in cert.T_sym:
        if row_times(s, M) & s != s:
            return FarResult(False, "s is a steady state")
    rows = None
    for f in range(tm.n_states):
        Tf = cert.T_state[f]
        for r in range(tm.n_symbols):
            tr = tm[f, r]
            Tr = cert.T_sym[r]
            if tr is None:
                if rows is None:
                    rows = reachable_rows(cert)
                TfTr = Tf @ Tr
                if any(row_times(u, TfTr) & s != s for u in rows):
                    return FarResult(False, "halting transition")
            elif tr.move < 0:
                Tt, Tw = cert.T_state[tr.next], cert.T_sym[tr.write]
                for Tb in cert.T_sym:
                    if not (Tt @ Tb @ Tw) <= (Tb @ Tf @ Tr):
                        return FarResult(False, "left transition")
            else:
                Tt, Tw = cert.T_state[tr.next], cert.T_sym[tr.write]
                if not (Tw @ Tt) <= (Tf @ Tr):
                    return FarResult(False, "right transition")
    return FarResult(True)


def word_representation(cfg: Configuration, pad_left=0, pad_right=0) -> list:
    """Tape symbols spanning every non-zero cell and the head, with the state
    letter inserted before the head cell."""
    span = cfg.nonzero_span()
    lo, hi = (cfg.head, cfg.head) if span is None else (min(span[0], cfg.head), max(span[1], cfg.head))
    lo -= pad_left
    hi += pad_right
    word = []
    for p in range(lo, hi + 1):
        if p == cfg.head:
            word.append(STATE_LETTERS[cfg.state])
        word.append(cfg.read(p))
    return word


# --- construction from a DFA -------------------------------------------------

def _check_dfa(dfa, n_symbols):
    if not dfa:
        raise ValueError("empty DFA")
    m = len(dfa)
    for row in dfa:
        if len(row) != n_symbols or any(not (0 <= q < m) for q in row):
            raise ValueError("DFA transition missing or out of range")


def dfa_to_nfa(tm, dfa: Sequence[Sequence[int]]) -> NfaCertificate:
    """NFA built around a DFA that reads the tape left of the head.

    States: the m DFA states, then a pair (q, f) for each DFA state q and
    machine state f, then an absorbing accepting state.  Reading a state
    letter f from q goes to (q, f).  Tape-symbol transitions out of the pair
    states are the least ones satisfying the halting and transition
    conditions, found by fixpoint iteration.
    """
    tm = as_machine(tm)
    S, n_st = tm.n_symbols, tm.n_states
    _check_dfa(dfa, S)
    m = len(dfa)
    n = m + m * n_st + 1
    bot = n - 1

    def pair(q, f):
        return m + q * n_st + f

    # reachable DFA states from the start state
    reach = {0}
    todo = [0]
    while todo:
        q = todo.pop()
        for g in range(S):
            if dfa[q][g] not in reach:
                reach.add(dfa[q][g])
                todo.append(dfa[q][g])

    R = [[0] * n for _ in range(S)]  # R[g][i]: successors of pair/bottom state i on g
    for g in range(S):
        R[g][bot] = 1 << bot
    for f in range(n_st):
        for r in range(S):
            tr = tm[f, r]
            if tr is None:
                for q in reach:
                    R[r][pair(q, f)] |= 1 << bot
            elif tr.move > 0:
                for q in range(m):
                    R[r][pair(q, f)] |= 1 << pair(dfa[q][tr.write], tr.next)

    def apply(g, v):
        acc = 0
        for j in _bits(v):
            acc |= R[g][j]
        return acc

    lefts = [(f, r, tm[f, r]) for f in range(n_st) for r in range(S)
             if tm[f, r] is not None and tm[f, r].move < 0]
    changed = True
    while changed:
        changed = False
        for f, r, tr in lefts:
            for q in range(m):
                for b in range(S):
                    need = apply(tr.write, R[b][pair(q, tr.next)])
                    i = pair(dfa[q][b], f)
                    if need & ~R[r][i]:
                        R[r][i] |= need
                        changed = True

    T_sym = []
    for g in range(S):
        rows = [1 << dfa[q][g] for q in range(m)] + R[g][m:]
        T_sym.append(BooleanMatrix(n, n, tuple(rows)))
    T_state = []
    for f in range(n_st):
        rows = [1 << pair(q, f) for q in range(m)] + [0] * (n - m)
        T_state.append(BooleanMatrix(n, n, tuple(rows)))
    # accepting: states from which zeros lead to the absorbing state
    a = 1 << bot
    grew = True
    while grew:
        grew = False
        for i in range(n):
            if not (a >> i) & 1 and T_sym[0].rows[i] & a:
                a |= 1 << i
                grew = True
    labels = tuple([str(q) for q in range(m)]
                   + [f"{q}{STATE_LETTERS[f]}" for q in range(m) for f in range(n_st)] + ["⊥"])
    return NfaCertificate(n, 1, a, 1 << bot, tuple(T_sym), tuple(T_state), labels)


def iter_dfas(n: int, S: int = 2):
    """DFAs with exactly n states, start 0, 0 --0--> 0, all states reachable
    and numbered in breadth-first order; as lists of rows."""
    # fill transition slots in order; a slot may point to any used state or
    # the next fresh one, and every state must be introduced in order
    slots = n * S

    def rec(t, used):
        if t == slots:
            if used == n:
                yield [list(t_[q * S:(q + 1) * S]) for q in range(n)]
            return
        q = t // S
        if q >= used:
            return  # state q unreachable in BFS order
        # enough slots left to introduce the remaining states?
        if n - used > slots - t:
            return
        if t == 0:
            choices = [0]
        else:
            choices = range(min(used + 1, n))
        for c in choices:
            t_[t] = c
            yield from rec(t + 1, max(used, c + 1))
    t_ = [0] * slots
    yield from rec(0, 1)


def search_far(tm, max_dfa_states: int = 6, budget: int = 100_000) -> Optional[NfaCertificate]:
    """First DFA (by size, then enumeration order) whose NFA verifies."""
    tm = as_machine(tm)
    tried = 0
    for k in range(1, max_dfa_states + 1):
        for dfa in iter_dfas(k, tm.n_symbols):
            if tried >= budget:
                return None
            tried += 1
            cert = dfa_to_nfa(tm, dfa)
            if check_far(tm, cert).verified:
                return cert
    return None
