"""Space-time diagrams as binary PGM/PPM images.

Row i shows the tape after i steps; column ``width // 2 + offset`` is the
starting cell.  Symbols are grey levels from black (0) to white (largest
symbol).  In colored mode the head cell of each row is painted with the
color of the current state.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .machine import as_machine

# RGB per state A..H
STATE_COLORS = (
    (230, 25, 75),    # A red
    (60, 180, 75),    # B green
    (0, 130, 200),    # C blue
    (245, 130, 48),   # D orange
    (145, 30, 180),   # E purple
    (70, 240, 240),   # F cyan
    (240, 50, 230),   # G magenta
    (210, 245, 60),   # H lime
)


class DiagramSpec(NamedTuple):
    steps: int
    width: int = 400
    offset: int = 0
    colored: bool = False


def spacetime(tm, spec: DiagramSpec):
    """(symbol rows, head columns, states) as arrays; rows stop early if the
    machine halts (the configuration meeting the undefined transition is the
    last row)."""
    tm = as_machine(tm)
    if spec.width < 1:
        raise ValueError("width must be at least 1")
    if spec.steps < 0:
        raise ValueError("steps must be non-negative")
    origin = spec.width // 2 + spec.offset
    # flat tape wide enough for the window and for any head excursion
    pad = spec.steps + 1
    lo = min(-origin, -pad)
    hi = max(spec.width - origin, pad + 1)
    tape = bytearray(hi - lo)
    base = -lo
    win = slice(base - origin, base - origin + spec.width)
    head, state = 0, 0
    rows, heads, states = [], [], []
    for i in range(spec.steps + 1):
        rows.append(tape[win])
        heads.append(head + origin)
        states.append(state)
        if i == spec.steps:
            break
        tr = tm[state, tape[base + head]]
        if tr is None:
            break
        tape[base + head] = tr.write
        head += tr.move
        state = tr.next
    rows = [np.frombuffer(bytes(r), dtype=np.uint8) for r in rows]
    return np.array(rows, dtype=np.uint8), np.array(heads), np.array(states)


def _header(magic, w, h):
    return f"{magic}\n{w} {h}\n255\n".encode()


def render_spacetime(tm, spec: DiagramSpec) -> bytes:
    tm = as_machine(tm)
    rows, heads, states = spacetime(tm, spec)
    grey = (rows.astype(np.uint32) * 255 // (tm.n_symbols - 1)).astype(np.uint8)
    h, w = grey.shape
    if not spec.colored:
        return _header("P5", w, h) + grey.tobytes()
    rgb = np.repeat(grey[:, :, None], 3, axis=2)
    for i, (c, q) in enumerate(zip(heads, states)):
        if 0 <= c < w:
            rgb[i, c] = STATE_COLORS[q]
    return _header("P6", w, h) + rgb.tobytes()


def read_pnm(data: bytes):
    """Decode our own P5/P6 output into a numpy array (for checks)."""
    parts = data.split(b"\n", 3)
    magic = parts[0].decode()
    w, h = map(int, parts[1].split())
    body = np.frombuffer(parts[3], dtype=np.uint8)
    return body.reshape((h, w, 3) if magic == "P6" else (h, w))
