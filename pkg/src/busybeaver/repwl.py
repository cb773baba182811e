"""Repeated Word List decider.

Tape sides are stacks of (word, count) items, nearest the head first.
Words have length ``l`` and are stored in tape order; a count equal to T
stands for "T or more".  The head is directional: facing right it reads the
first cell of the right side, facing left the last cell of the left side.
"""
from __future__ import annotations

from typing import Dict, List, NamedTuple, Tuple

from .machine import STATE_LETTERS, as_machine
from .verdict import NONHALT, UNKNOWN, Verdict

Item = Tuple[tuple, int]


class RegexConfig(NamedTuple):
    state: int
    facing_right: bool
    left: tuple  # items, nearest the head first
    right: tuple

    def show(self, T):
        def item(it):
            w, k = it
            return f"({''.join(map(str, w))})^{f'{T}+' if k >= T else k}"
        left = " ".join(item(it) for it in reversed(self.left))
        right = " ".join(item(it) for it in self.right)
        q = STATE_LETTERS[self.state]
        head = f"{q}>" if self.facing_right else f"<{q}"
        return " ".join(x for x in ("0^inf", left, head, right, "0^inf") if x)


def initial():
    return RegexConfig(0, True, (), ())


def push(stack: tuple, word: tuple, count: int, T: int) -> tuple:
    """Put ``word^count`` on top of ``stack``, merging with an equal top."""
    if stack and stack[0][0] == word:
        return ((word, min(T, stack[0][1] + count)),) + stack[1:]
    return ((word, min(T, count)),) + stack


def merge_run(items, T) -> tuple:
    out: List[Item] = []
    for w, k in items:
        if out and out[-1][0] == w:
            out[-1] = (w, min(T, out[-1][1] + k))
        else:
            out.append((w, min(T, k)))
    return tuple(out)


def normalize(cfg: RegexConfig, T: int) -> RegexConfig:
    """Merge equal neighbours and cap counts, keeping the faced item apart."""
    def side(items, faced):
        if faced and items:
            return (items[0],) + merge_run(items[1:], T)
        return merge_run(items, T)
    return RegexConfig(cfg.state, cfg.facing_right,
                       side(cfg.left, not cfg.facing_right), side(cfg.right, cfg.facing_right))


def _faced(cfg):
    return cfg.right if cfg.facing_right else cfg.left


class BlockLeft(NamedTuple):
    cfg: RegexConfig
    steps: int


class BlockHalted(NamedTuple):
    steps: int


class BudgetExceeded(NamedTuple):
    steps: int


def block_simulate(tm, cfg: RegexConfig, l: int, T: int, B: int):
    """Simulate the machine inside the faced constant block until it leaves."""
    tm = as_machine(tm)
    stack = _faced(cfg)
    if stack:
        (word, k), rest = stack[0], stack[1:]
        if k >= T:
            raise ValueError("block_simulate needs a constant block; use regex_branch")
    else:
        word, k, rest = (0,) * l, 1, ()
    cells = list(word) * k
    n = len(cells)
    pos = 0 if cfg.facing_right else n - 1
    state = cfg.state
    steps = 0
    while 0 <= pos < n:
        if steps >= B:
            return BudgetExceeded(steps)
        tr = tm[state, cells[pos]]
        steps += 1
        if tr is None:
            return BlockHalted(steps)
        cells[pos] = tr.write
        pos += tr.move
        state = tr.next
    words = [tuple(cells[i:i + l]) for i in range(0, n, l)]
    left = cfg.left if cfg.facing_right else rest
    right = rest if cfg.facing_right else cfg.right
    exit_right = pos >= n
    if exit_right:
        for w in words:  # last word ends up nearest the head
            left = push(left, w, 1, T)
    else:
        for w in reversed(words):
            right = push(right, w, 1, T)
    return BlockLeft(RegexConfig(state, exit_right, left, right), steps)


def regex_branch(cfg: RegexConfig, T: int) -> Tuple[RegexConfig, RegexConfig]:
    stack = _faced(cfg)
    if not stack or stack[0][1] < T:
        raise ValueError("regex_branch needs the head to face a T+ block")
    w = stack[0][0]
    rest = stack[1:]
    one = ((w, 1), (w, T - 1)) + rest if T > 1 else ((w, 1),) + rest
    two = ((w, 1), (w, T)) + rest

    def put(s):
        if cfg.facing_right:
            return RegexConfig(cfg.state, True, cfg.left, s)
        return RegexConfig(cfg.state, False, s, cfg.right)
    return put(one), put(two)


class RepwlResult(NamedTuple):
    verdict: Verdict
    nodes: set
    # node -> [(label, successor, machine steps)]; labels block-sim, branch-1, branch-2
    edges: Dict[RegexConfig, List[Tuple[str, RegexConfig, int]]]


def repwl_graph(tm, l: int, T: int, B: int = 320, N: int = 150_001,
                keep_edges: bool = False) -> RepwlResult:
    tm = as_machine(tm)
    start = initial()
    todo = [start]
    V = set()
    edges: Dict[RegexConfig, list] = {}

    def fail(why):
        return RepwlResult(Verdict(UNKNOWN, why), V, edges)

    while len(V) < N and todo:
        cfg = todo.pop()
        if cfg in V:
            continue
        V.add(cfg)
        stack = _faced(cfg)
        if stack and stack[0][1] >= T:
            a, b = regex_branch(cfg, T)
            todo.append(a)
            todo.append(b)
            if keep_edges:
                edges[cfg] = [("branch-1", a, 0), ("branch-2", b, 0)]
            continue
        out = block_simulate(tm, cfg, l, T, B)
        if isinstance(out, BlockHalted):
            return fail("halted in block simulation")
        if isinstance(out, BudgetExceeded):
            return fail("block simulation budget exceeded")
        todo.append(out.cfg)
        if keep_edges:
            edges[cfg] = [("block-sim", out.cfg, out.steps)]
    if len(V) < N:
        return RepwlResult(Verdict(NONHALT, f"closed graph, {len(V)} nodes"), V, edges)
    return fail("node limit reached")


def decide_repwl(tm, l: int, T: int, B: int = 320, N: int = 150_001) -> Verdict:
    return repwl_graph(tm, l, T, B, N).verdict
