"""Enumerate and decide every TNF machine for the small cases, printing the
summary of each run (S, sigma, space, per-stage counts)."""
import time

from busybeaver.pipeline import run_value

for n, s, name in ((2, 2, "s2"), (3, 2, "s3"), (2, 3, "s2x3"), (4, 2, "s4")):
    t0 = time.perf_counter()
    summary = run_value(n, s, name)
    print(summary.to_text())
    print(f"({time.perf_counter() - t0:.1f}s)\n")
