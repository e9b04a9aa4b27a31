"""Collects one summary line per acceptance criterion for the terminal report."""

import time
from contextlib import contextmanager

LINES = []


@contextmanager
def timed():
    """Yields a one-element list that holds the elapsed seconds on exit."""
    box = [0.0]
    start = time.perf_counter()
    try:
        yield box
    finally:
        box[0] = time.perf_counter() - start


def record(number, ok, detail, elapsed, limit):
    status = "PASS" if ok and elapsed < limit else "FAIL"
    line = f"criterion {number:>2}: {status}  {detail}  [{elapsed:.2f} s, limit {limit} s]"
    LINES.append(line)
    print(line)
    return line
