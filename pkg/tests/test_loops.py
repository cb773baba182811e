from busybeaver import _kernels
from busybeaver.loops import decide_loops, transcript
from busybeaver.machine import parse_machine
from busybeaver.verdict import HALT, NONHALT, UNKNOWN
from conftest import oracle_parse, oracle_run, random_machine_text

CYCLER = "1RB---_0RC0LE_1LD0LA_1LB1RB_1LC1RC"
TRANSLATED = "1RB---_1LB1LC_0RD0RC_1LE1RE_1LA0LE"


def test_cycler():
    v = decide_loops(CYCLER, 130)
    assert v.kind == NONHALT and v.reason.startswith("cycler")


def test_translated_cycler():
    v = decide_loops(TRANSLATED, 130)
    assert v.kind == NONHALT and v.reason.startswith("translated cycler")


def test_halting():
    v = decide_loops("1RB1LB_1LA1RZ", 130)
    assert v.kind == HALT and (v.steps, v.sigma) == (6, 4)
    assert v.halt_context == (1, 1)


def test_limit_one_is_unknown():
    assert decide_loops(CYCLER, 1).kind == UNKNOWN


def test_halt_exactly_at_limit_is_found():
    assert decide_loops("1RB1LB_1LA1RZ", 6).kind == HALT
    assert decide_loops("1RB1LB_1LA1RZ", 5).kind != HALT


def test_transcript_prefix():
    got = " ".join(str(e) for e in transcript(CYCLER, 10))
    assert got == "A0 B0 C0 D0 B1 E0 C0 D0 B0 C1 A0"


def test_transcript_matches_oracle(rng):
    for _ in range(50):
        text = random_machine_text(rng, 4, 2, 0.05)
        ref = oracle_run(text, 201, trace=True)["trace"]
        got = [tuple(e) for e in transcript(text, 200)]
        assert got == ref[:len(got)]


def _first_repeat(text, L):
    """(first time, period) of an exact full-configuration repeat, by brute force."""
    table, _, _ = oracle_parse(text)
    tape, head, state = {}, 0, 0
    seen = {}
    for t in range(L + 1):
        key = (state, head, frozenset((k, v) for k, v in tape.items() if v))
        if key in seen:
            return seen[key], t - seen[key]
        seen[key] = t
        tr = table[state, tape.get(head, 0)]
        if tr is None:
            return None
        tape[head], head, state = tr[0], head + tr[1], tr[2]
    return None


def test_early_cyclers_are_detected(rng):
    L, found = 130, 0
    while found < 40:
        text = random_machine_text(rng, 4, 2, 0.05)
        rep = _first_repeat(text, L)
        if rep and rep[0] + 3 * rep[1] <= L:
            found += 1
            v = decide_loops(text, L)
            assert v.kind == NONHALT and v.reason.startswith("cycler"), text


def test_monotone_in_limit(rng):
    for _ in range(150):
        text = random_machine_text(rng, 4, 2, 0.05)
        if decide_loops(text, 60).kind == NONHALT:
            for L in (61, 80, 130, 300):
                assert decide_loops(text, L).kind == NONHALT


def test_nonhalt_survives_long_simulation(rng):
    for _ in range(400):
        text = random_machine_text(rng, 4, 2, 0.1)
        L = 107
        v = decide_loops(text, L)
        if v.kind == NONHALT:
            assert not oracle_run(text, 20 * L)["halted"]
        elif v.kind == HALT:
            assert oracle_run(text, L + 1)["steps"] == v.steps


def test_kernel_codes():
    tm = parse_machine(CYCLER)
    code, _, period = _kernels.loop_scan(tm.code, 2, 130)
    assert code == _kernels.SCAN_CYCLER and period > 0
