"""Tree Normal Form enumeration and halting deciders for small Turing machines."""
from .machine import (
    Configuration, Halted, MachineFormatError, StillRunning, Transition, TransitionTable,
    emit_machine, parse_machine, simulate, step, tm_to_1rb, tnf_normalize,
)

__all__ = [
    "Configuration", "Halted", "MachineFormatError", "StillRunning", "Transition",
    "TransitionTable", "emit_machine", "parse_machine", "simulate", "step", "tm_to_1rb",
    "tnf_normalize",
]
