"""Compiled inner loops.

A machine is passed to the kernels as a flat int64 array ``tbl`` of length
``n_states * n_symbols`` indexed by ``state * n_symbols + symbol``.  Entry -1
means undefined, otherwise ``write * 32 + right * 16 + next``.
"""
import numpy as np
from numba import njit

UNDEF = -1

# loop scan verdict codes
SCAN_UNKNOWN = 0
SCAN_HALT = 1
SCAN_CYCLER = 2
SCAN_TC_RIGHT = 3
SCAN_TC_LEFT = 4


@njit(cache=True)
def _grow(tape, origin):
    n = tape.shape[0]
    new = np.zeros(2 * n, dtype=tape.dtype)
    shift = n // 2
    new[shift:shift + n] = tape
    return new, origin + shift


@njit(cache=True)
def run(tbl, n_symbols, max_steps):
    """Simulate from the blank tape for at most ``max_steps`` steps.

    Returns (halted, steps, state, head, min_pos, max_pos, tape, origin).
    The halting step is counted in ``steps``.
    """
    tape = np.zeros(1024, dtype=np.uint8)
    origin = 512
    state = 0
    head = 0
    lo = 0
    hi = 0
    steps = 0
    while steps < max_steps:
        idx = head + origin
        sym = tape[idx]
        code = tbl[state * n_symbols + sym]
        steps += 1
        if code < 0:
            return True, steps, state, head, lo, hi, tape, origin
        tape[idx] = code >> 5
        state = code & 15
        if (code >> 4) & 1:
            head += 1
            if head > hi:
                hi = head
            if head + origin >= tape.shape[0]:
                tape, origin = _grow(tape, origin)
        else:
            head -= 1
            if head < lo:
                lo = head
            if head + origin < 0:
                tape, origin = _grow(tape, origin)
    return False, steps, state, head, lo, hi, tape, origin


@njit(cache=True)
def transcript(tbl, n_symbols, L):
    """Record (state, read symbol, position) at times 0..L.

    Returns (halt_time, states, symbols, positions); ``halt_time`` is the time
    at which an undefined transition was met, or -1.  Arrays are filled up to
    ``halt_time`` inclusive when the machine halts.
    """
    ss = np.zeros(L + 1, dtype=np.int64)
    ms = np.zeros(L + 1, dtype=np.int64)
    ds = np.zeros(L + 1, dtype=np.int64)
    size = 64
    while size < 2 * L + 8:
        size *= 2
    tape = np.zeros(size, dtype=np.uint8)
    origin = size // 2
    state = 0
    head = 0
    for t in range(L + 1):
        sym = tape[head + origin]
        ss[t] = state
        ms[t] = sym
        ds[t] = head
        if t == L:
            break
        code = tbl[state * n_symbols + sym]
        if code < 0:
            return t, ss, ms, ds
        tape[head + origin] = code >> 5
        state = code & 15
        if (code >> 4) & 1:
            head += 1
        else:
            head -= 1
    return -1, ss, ms, ds


@njit(cache=True)
def loop_scan(tbl, n_symbols, L):
    """Back-to-back repetition search over the first L transcript entries.

    Halting is detected for runs of at most L steps (halting step
    included); the scan then looks at times 0..L-1.  Returns
    (verdict, halt_time, period).  A position counts as a running maximum
    (minimum) when it is >= (<=) every earlier position.
    """
    halt_time, ss, ms, ds = transcript(tbl, n_symbols, L)
    if halt_time >= 0:
        return SCAN_HALT, halt_time, 0
    N = L - 1
    is_max = np.zeros(N + 1, dtype=np.bool_)
    is_min = np.zeros(N + 1, dtype=np.bool_)
    hi = ds[0]
    lo = ds[0]
    for t in range(N + 1):
        d = ds[t]
        is_max[t] = d >= hi
        is_min[t] = d <= lo
        if d > hi:
            hi = d
        if d < lo:
            lo = d
    for l in range(1, N // 2 + 1):
        K = N - l
        offset = 0
        i = 0
        while i < l + offset:
            if K - i < 0:
                break
            a = N - i
            b = K - i
            if ss[a] != ss[b] or ms[a] != ms[b]:
                break
            if i == l + offset - 1:
                if ds[a] == ds[b]:
                    return SCAN_CYCLER, -1, l
                if is_max[a] and is_max[b]:
                    return SCAN_TC_RIGHT, -1, l
                if is_min[a] and is_min[b]:
                    return SCAN_TC_LEFT, -1, l
                offset += 1
            i += 1
    return SCAN_UNKNOWN, -1, 0
