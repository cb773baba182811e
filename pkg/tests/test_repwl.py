import re

import pytest

from busybeaver.repwl import (BlockHalted, BlockLeft, BudgetExceeded, RegexConfig, block_simulate,
                              decide_repwl, initial, normalize, regex_branch, repwl_graph)
from busybeaver.verdict import NONHALT, UNKNOWN
from conftest import oracle_parse, random_machine_text

EX1 = "0RB0LC_1LA1RB_1RD0RE_1LC1LA_---0LD"
REPWL_PAIR = ["1RB1LA_1LA0RC_1LD1RC_---0LA", "1RB0RB_1LC1RB_---0LD_1RA1LD"]
A, B, C, D = range(4)


def test_example_first_edge():
    out = block_simulate(EX1, initial(), 2, 3, 320)
    assert isinstance(out, BlockLeft)
    assert out.cfg.show(3) == "0^inf (01)^1 B> 0^inf"


def test_example_graph():
    res = repwl_graph(EX1, 2, 3, keep_edges=True)
    assert res.verdict.kind == NONHALT and len(res.nodes) == 11
    branching = [c for c, e in res.edges.items() if e[0][0] == "branch-1"]
    assert [c.show(3) for c in branching] == ["0^inf (01)^1 D> (10)^3+ 0^inf"]


@pytest.mark.parametrize("tm,nodes", list(zip(REPWL_PAIR, (3130, 3076))))
def test_published_graph_sizes(tm, nodes):
    res = repwl_graph(tm, 4, 3, 320, 10_000)
    assert res.verdict.kind == NONHALT and len(res.nodes) == nodes


def test_node_limit_is_strict():
    assert decide_repwl(REPWL_PAIR[0], 4, 3, 320, 3131).kind == NONHALT
    assert decide_repwl(REPWL_PAIR[0], 4, 3, 320, 3130).kind == UNKNOWN


def test_undefined_start_halts_in_block():
    assert isinstance(block_simulate("---1RB_1LA1LA", initial(), 2, 3, 320), BlockHalted)


def test_in_block_cycle_hits_budget():
    out = block_simulate("0RB---_0LA---", initial(), 2, 3, 320)
    assert out == BudgetExceeded(320)
    v = decide_repwl("0RB---_0LA---", 2, 3)
    assert v.kind == UNKNOWN and "budget" in v.reason


def test_halting_machine_unknown():
    v = decide_repwl("1RB1LB_1LA1RZ", 2, 3)
    assert v.kind == UNKNOWN


def test_branch_rule():
    w = (0, 1)
    cfg = RegexConfig(D, True, (), ((w, 3),))
    one, two = regex_branch(cfg, 3)
    assert one.right == ((w, 1), (w, 2)) and two.right == ((w, 1), (w, 3))
    one, two = regex_branch(RegexConfig(D, False, ((w, 2),), ()), 2)
    assert one.left == ((w, 1), (w, 1)) and two.left == ((w, 1), (w, 2))


def test_branch_needs_plus_block():
    with pytest.raises(ValueError):
        regex_branch(RegexConfig(A, True, (), (((0, 1), 2),)), 3)
    with pytest.raises(ValueError):
        block_simulate(EX1, RegexConfig(A, True, (), (((0, 1), 3),)), 2, 3, 320)


def _random_side(rng, l, T):
    return tuple((tuple(rng.randrange(2) for _ in range(l)), rng.randint(1, T))
                 for _ in range(rng.randint(0, 5)))


def test_normalize_idempotent(rng):
    for _ in range(500):
        l, T = rng.randint(1, 2), rng.randint(2, 3)
        cfg = RegexConfig(rng.randrange(3), rng.random() < 0.5, _random_side(rng, l, T),
                          _random_side(rng, l, T))
        n1 = normalize(cfg, T)
        assert normalize(n1, T) == n1
        for side in (n1.left, n1.right):
            assert all(1 <= k <= T for _, k in side)


def test_branch_two_remerges():
    w = (1, 0)
    cfg = RegexConfig(A, True, (), ((w, 2), (w, 1)))
    norm = normalize(cfg, 2)
    assert norm.right == ((w, 2), (w, 1))  # faced item stays apart
    assert normalize(RegexConfig(A, False, (), ((w, 2), (w, 1))), 2).right == ((w, 2),)


# --- soundness against concrete runs -----------------------------------------

def _side_matches(items, word_at, limit, T):
    """Does the infinite word sequence word_at(0), word_at(1), ... match
    items followed by zero words?  limit bounds the non-zero region."""
    def rec(i, pos):
        if i == len(items):
            return all(not any(word_at(p)) for p in range(pos, limit + 1))
        w, k = items[i]
        if k < T:
            if all(word_at(pos + j) == w for j in range(k)):
                return rec(i + 1, pos + k)
            return False
        j = 0
        while pos + j <= limit + T + 1 and word_at(pos + j) == w:
            j += 1
            if j >= T and rec(i + 1, pos + j):
                return True
        return False
    return rec(0, 0)


def _matches(cfg, tape, head, state, l, T):
    if cfg.state != state:
        return False
    extent = max([abs(p - head) for p, v in tape.items() if v] + [0]) // l + 2

    def cells(lo):
        return tuple(tape.get(lo + i, 0) for i in range(l))
    if cfg.facing_right:
        right = lambda k: cells(head + k * l)
        left = lambda k: cells(head - (k + 1) * l)
    else:
        left = lambda k: cells(head - l + 1 - k * l)
        right = lambda k: cells(head + 1 + k * l)
    return (_side_matches(cfg.left, left, extent, T)
            and _side_matches(cfg.right, right, extent, T))


def _follow(text, l, T, budget, N=5000):
    """Walk the graph alongside a concrete run; assert each node matches."""
    res = repwl_graph(text, l, T, 320, N, keep_edges=True)
    if res.verdict.kind != NONHALT:
        return False
    table, _, _ = oracle_parse(text)
    tape, head, state, t = {}, 0, 0, 0
    node = initial()
    assert _matches(node, tape, head, state, l, T)
    while t < budget:
        out = res.edges[node]
        if out[0][0].startswith("branch"):
            ok = [succ for _, succ, _ in out if _matches(succ, tape, head, state, l, T)]
            assert ok, (text, node)
            node = ok[0]
            continue
        _, succ, k = out[0]
        for _ in range(k):
            tr = table[state, tape.get(head, 0)]
            assert tr is not None
            tape[head], head, state = tr[0], head + tr[1], tr[2]
        t += k
        node = succ
        assert _matches(node, tape, head, state, l, T), (text, node)
    return True


class FastMatcher:
    """Same membership test as _matches, compiled to byte regexes over a
    flat tape so long probes stay linear per check."""

    def __init__(self, l, T):
        self.l, self.T = l, T
        self.cache = {}

    def _side(self, items, reverse):
        parts = []
        for w, k in items:
            word = bytes(reversed(w) if reverse else w)
            rep = f"{{{k}}}" if k < self.T else f"{{{self.T},}}"
            parts.append(b"(?:" + re.escape(word) + b")" + rep.encode())
        return re.compile(b"".join(parts) + b"\x00*")

    def compiled(self, node):
        if node not in self.cache:
            self.cache[node] = (self._side(node.left, True), self._side(node.right, False))
        return self.cache[node]

    def matches(self, node, tape, base, head, state, reach):
        if node.state != state:
            return False
        l = self.l
        need = sum(k for _, k in node.left + node.right) * l + self.T * l
        span = reach + need + l
        span -= span % l
        left_re, right_re = self.compiled(node)
        h = base + head
        lo = h if node.facing_right else h + 1  # first right-side cell
        right = bytes(tape[lo:lo + span])
        left = bytes(tape[lo - span:lo][::-1])
        return bool(right_re.fullmatch(right)) and bool(left_re.fullmatch(left))


def fast_follow(text, l, T, budget, N=5000, B=320):
    """Like _follow but linear per check; returns None when the graph does
    not close, else the number of concrete steps checked."""
    res = repwl_graph(text, l, T, B, N, keep_edges=True)
    if res.verdict.kind != NONHALT:
        return None
    table, _, _ = oracle_parse(text)
    fm = FastMatcher(l, T)
    pad = budget + 4 * N * l + 64
    tape = bytearray(2 * pad)
    base, head, state, t = pad, 0, 0, 0
    lo_w = hi_w = 0
    node = initial()
    while True:
        reach = max(abs(lo_w - head), abs(hi_w - head)) + 1
        if not fm.matches(node, tape, base, head, state, reach):
            return False
        if t >= budget:
            return t
        out = res.edges[node]
        if out[0][0].startswith("branch"):
            ok = [succ for _, succ, _ in out if fm.matches(succ, tape, base, head, state, reach)]
            assert ok, (text, node)
            node = ok[0]
            continue
        _, node, k = out[0]
        for _ in range(k):
            tr = table[state, tape[base + head]]
            assert tr is not None
            tape[base + head] = tr[0]
            lo_w, hi_w = min(lo_w, head), max(hi_w, head)
            head, state = head + tr[1], tr[2]
        t += k


def test_fast_matcher_agrees_with_literal(rng):
    checked = 0
    while checked < 15:
        text = random_machine_text(rng, 4, 2, 0.1)
        l = rng.choice([1, 2, 3])
        res = repwl_graph(text, l, 2, 320, 2000, keep_edges=True)
        if res.verdict.kind != NONHALT:
            continue
        checked += 1
        nodes = list(res.nodes)
        table, _, _ = oracle_parse(text)
        tape, head, state = {}, 0, 0
        flat = bytearray(4000)
        for _ in range(300):
            tr = table[state, tape.get(head, 0)]
            if tr is None:
                break
            tape[head] = flat[2000 + head] = tr[0]
            head, state = head + tr[1], tr[2]
            reach = max([abs(p - head) for p in tape] + [0]) + 1
            for node in rng.sample(nodes, min(5, len(nodes))):
                assert FastMatcher(l, 2).matches(node, flat, 2000, head, state, reach) \
                    == _matches(node, tape, head, state, l, 2)


def test_soundness_probe(rng):
    checked = 0
    while checked < 12:
        text = random_machine_text(rng, 4, 2, 0.1)
        if _follow(text, rng.choice([1, 2, 3]), 2, 3000):
            checked += 1


def test_soundness_on_published_machines():
    assert _follow(EX1, 2, 3, 10_000)
    assert _follow(REPWL_PAIR[1], 4, 3, 10_000)


def test_closed_graph_reverified(rng):
    for text in [EX1] + REPWL_PAIR:
        l = 2 if text == EX1 else 4
        res = repwl_graph(text, l, 3, keep_edges=True)
        for node in res.nodes:
            assert node in res.edges
            for _, succ, _ in res.edges[node]:
                assert succ in res.nodes
            stack = node.right if node.facing_right else node.left
            if stack and stack[0][1] >= 3:
                assert [s for _, s, _ in res.edges[node]] == list(regex_branch(node, 3))
            else:
                assert res.edges[node][0][1] == block_simulate(text, node, l, 3, 320).cfg
