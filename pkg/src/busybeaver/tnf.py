"""Tree Normal Form enumeration.

Machines are built lazily: a node is decided, and if it halts on an
undefined slot, its children are the ways of filling that slot.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterator, List, Optional, Tuple

from .machine import MAX_STATES, MAX_SYMBOLS, Transition, TransitionTable, emit_machine
from .verdict import HALT, MachineRecord, Verdict


@dataclass(frozen=True)
class TnfNode:
    machine: TransitionTable
    seen_states: int = 1
    seen_symbols: int = 1
    halt_context: Optional[Tuple[int, int]] = None

    @property
    def is_root(self):
        return all(t is None for t in self.machine.entries)


def root(n_states: int, n_symbols: int) -> TnfNode:
    if not (1 <= n_states <= MAX_STATES and 2 <= n_symbols <= MAX_SYMBOLS):
        raise ValueError(f"unsupported dimensions ({n_states}, {n_symbols})")
    return TnfNode(TransitionTable.empty(n_states, n_symbols), 1, 1, (0, 0))


def children(node: TnfNode, symbol_order: str = "strict") -> List[TnfNode]:
    if node.halt_context is None:
        raise ValueError("children() needs a halting node")
    tm = node.machine
    q, a = node.halt_context
    n, s = tm.n_states, tm.n_symbols
    if symbol_order == "strict":
        writes = range(min(node.seen_symbols + 1, s))
    elif symbol_order == "quasi":
        writes = range(s)
    else:
        raise ValueError(f"unknown symbol order {symbol_order!r}")
    moves = (1,) if node.is_root else (1, -1)
    nexts = range(min(node.seen_states + 1, n))
    idx = q * s + a
    base = list(tm.entries)
    out = []
    full = sum(t is None for t in base) == 1
    if full:
        return out  # every child would be a complete, hence non-halting, table
    for w in writes:
        for d in moves:
            for t in nexts:
                e = base[:]
                e[idx] = Transition(w, d, t)
                out.append(TnfNode(TransitionTable(n, s, tuple(e)),
                                   max(node.seen_states, t + 1),
                                   max(node.seen_symbols, w + 1)))
    return out


Decide = Callable[[TransitionTable], Tuple[Verdict, str]]


def _record(tm, verdict: Verdict, decider_id: str) -> MachineRecord:
    if verdict.kind == HALT:
        return MachineRecord(emit_machine(tm), verdict.kind, decider_id,
                             verdict.steps, verdict.sigma, verdict.space)
    return MachineRecord(emit_machine(tm), verdict.kind, decider_id)


def walk(start: TnfNode, decide: Decide, symbol_order="strict") -> Iterator[MachineRecord]:
    """Depth-first records for the subtree rooted at ``start``."""
    stack = [start]
    while stack:
        node = stack.pop()
        verdict, decider_id = decide(node.machine)
        yield _record(node.machine, verdict, decider_id)
        if verdict.kind == HALT:
            hn = TnfNode(node.machine, node.seen_states, node.seen_symbols, verdict.halt_context)
            stack.extend(reversed(children(hn, symbol_order)))


def _subtree(args):
    node, decide, symbol_order = args
    return list(walk(node, decide, symbol_order))


def enumerate_machines(n_states: int, n_symbols: int, decide: Decide, symbol_order="strict",
                       jobs: int = 1, split_depth: int = 2) -> Iterator[MachineRecord]:
    """Records for every TNF node in depth-first order.

    With ``jobs > 1`` subtrees below ``split_depth`` run in worker processes;
    their outputs are spliced back in depth-first order, so the stream does
    not depend on ``jobs``.
    """
    r = root(n_states, n_symbols)
    if jobs <= 1:
        yield from walk(r, decide, symbol_order)
        return
    # walk the top of the tree here, leave the rest to workers
    plan: list = []  # MachineRecord or subtree index
    tasks = []
    stack = [(r, 0)]
    while stack:
        node, depth = stack.pop()
        if depth >= split_depth:
            plan.append(len(tasks))
            tasks.append((node, decide, symbol_order))
            continue
        verdict, decider_id = decide(node.machine)
        plan.append(_record(node.machine, verdict, decider_id))
        if verdict.kind == HALT:
            hn = TnfNode(node.machine, node.seen_states, node.seen_symbols, verdict.halt_context)
            stack.extend((c, depth + 1) for c in reversed(children(hn, symbol_order)))
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        results = ex.map(_subtree, tasks)
        pending = {}
        it = iter(results)
        done = 0
        for item in plan:
            if isinstance(item, MachineRecord):
                yield item
                continue
            while done <= item:
                pending[done] = next(it)
                done += 1
            yield from pending.pop(item)
