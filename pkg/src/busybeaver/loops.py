"""Cycler and Translated Cycler detection from a run transcript."""
from __future__ import annotations

from typing import List, NamedTuple

from . import _kernels
from .machine import as_machine, simulate
from .verdict import NONHALT, UNKNOWN_VERDICT, Verdict

REASONS = {
    _kernels.SCAN_CYCLER: "cycler",
    _kernels.SCAN_TC_RIGHT: "translated cycler (right)",
    _kernels.SCAN_TC_LEFT: "translated cycler (left)",
}


class TranscriptEntry(NamedTuple):
    state: int
    read_symbol: int
    position: int

    def __str__(self):
        return f"{'ABCDEFGH'[self.state]}{self.read_symbol}"


def transcript(tm, L: int) -> List[TranscriptEntry]:
    """Entries for times 0..L (fewer if the machine halts first)."""
    tm = as_machine(tm)
    halt_time, ss, ms, ds = _kernels.transcript(tm.code, tm.n_symbols, L)
    end = L if halt_time < 0 else halt_time
    return [TranscriptEntry(int(ss[t]), int(ms[t]), int(ds[t])) for t in range(end + 1)]


def decide_loops(tm, L: int) -> Verdict:
    tm = as_machine(tm)
    verdict, halt_time, period = _kernels.loop_scan(tm.code, tm.n_symbols, L)
    if verdict == _kernels.SCAN_HALT:
        return Verdict.halt(simulate(tm, halt_time + 1))
    if verdict == _kernels.SCAN_UNKNOWN:
        return UNKNOWN_VERDICT
    return Verdict(NONHALT, f"{REASONS[verdict]}, period {period}")
