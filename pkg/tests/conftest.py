"""Shared oracles: a tiny dict-tape simulator written independently of the
package (its own parser, no kernels)."""
import random
import sys

import pytest


def oracle_parse(text):
    """{(state, symbol): (write, move, next) or None} plus dimensions."""
    groups = text.split("_")
    s = len(groups[0]) // 3
    table = {}
    for q, g in enumerate(groups):
        for a in range(s):
            tri = g[3 * a:3 * a + 3]
            nxt = ord(tri[2]) - 65 if tri != "---" else None
            if tri == "---" or nxt >= len(groups):
                table[q, a] = None
            else:
                table[q, a] = (int(tri[0]), 1 if tri[1] == "R" else -1, nxt)
    return table, len(groups), s


def oracle_run(text, max_steps, trace=False):
    """Returns dict(halted, steps, sigma, space, trace, tape, head, state)."""
    table, _, _ = oracle_parse(text)
    tape = {}
    head = state = 0
    lo = hi = 0
    log = []
    steps = 0
    halted = False
    while steps < max_steps:
        sym = tape.get(head, 0)
        if trace:
            log.append((state, sym, head))
        steps += 1
        tr = table[state, sym]
        if tr is None:
            halted = True
            break
        tape[head] = tr[0]
        head += tr[1]
        state = tr[2]
        lo, hi = min(lo, head), max(hi, head)
    sigma = sum(1 for v in tape.values() if v)
    if halted and tape.get(head, 0) == 0:
        sigma += 1  # the halting transition writes a 1
    return dict(halted=halted, steps=steps, sigma=sigma, space=hi - lo + 1, trace=log,
                tape=tape, head=head, state=state)


def random_machine_text(rng, n, s, p_undef=0.1):
    groups = []
    for _ in range(n):
        g = ""
        for _ in range(s):
            if rng.random() < p_undef:
                g += "---"
            else:
                g += f"{rng.randrange(s)}{rng.choice('LR')}{chr(65 + rng.randrange(n))}"
        groups.append(g)
    return "_".join(groups)


@pytest.fixture
def rng():
    return random.Random(20240702)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    report = getattr(mod, "REPORT", None)
    if not report:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(report):
        terminalreporter.write_line(report[num])
