"""Decider outcomes and per-machine output records."""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional, Tuple

HALT = "halt"
NONHALT = "nonhalt"
UNKNOWN = "unknown"
ASSUMED = "assumed-nonhalt"


@dataclass(frozen=True)
class Verdict:
    kind: str
    reason: str = ""
    steps: Optional[int] = None
    sigma: Optional[int] = None
    space: Optional[int] = None
    halt_context: Optional[Tuple[int, int]] = None  # (state, symbol) of the undefined slot

    @classmethod
    def halt(cls, h, reason=""):
        """From a machine.Halted outcome."""
        return cls(HALT, reason, h.steps, h.sigma, h.space, (h.state, h.symbol))

    def __bool__(self):
        return self.kind != UNKNOWN


UNKNOWN_VERDICT = Verdict(UNKNOWN)


class MachineRecord(NamedTuple):
    machine: str
    status: str
    decider_id: str
    steps: Optional[int] = None
    sigma: Optional[int] = None
    space: Optional[int] = None

    def line(self):
        base = f"{self.machine},{self.status},{self.decider_id}"
        if self.steps is None:
            return base
        return f"{base},{self.steps},{self.sigma},{self.space}"

    @classmethod
    def from_line(cls, line):
        parts = line.strip().split(",")
        if len(parts) == 6:
            return cls(parts[0], parts[1], parts[2], int(parts[3]), int(parts[4]), int(parts[5]))
        return cls(parts[0], parts[1], parts[2])
