"""Write space-time diagrams of the 5-state champion and the 2x4 winner
into the current directory."""
from pathlib import Path

from busybeaver.diagram import DiagramSpec, render_spacetime

BB5 = "1RB1LC_1RC1RB_1RD0LE_1LA1LD_---0LA"
BB2x4 = "1RB2LA1RA1RA_1LB1LA3RB---"

jobs = {
    "bb5_45.ppm": (BB5, DiagramSpec(45, width=41, colored=True)),
    "bb5_20000.pgm": (BB5, DiagramSpec(20_000, width=400)),
    "bb2x4_45.ppm": (BB2x4, DiagramSpec(45, width=41, colored=True)),
    "bb2x4_20000.pgm": (BB2x4, DiagramSpec(20_000, width=400)),
}
for name, (tm, spec) in jobs.items():
    Path(name).write_bytes(render_spacetime(tm, spec))
    print("wrote", name)
