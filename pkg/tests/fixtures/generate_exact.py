"""Regenerate exact_values.json with the unpruned enumeration oracle.

Run from the repository root:  python3 tests/fixtures/generate_exact.py
"""
import json
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1]))
from oracles import unpruned_min_colors  # noqa: E402

CASES = [(2, 2, 3), (2, 2, 4), (3, 2, 3), (3, 3, 3), (3, 3, 4), (3, 3, 5)]

if __name__ == "__main__":
    out = []
    for n, k, q in CASES:
        t0 = time.perf_counter()
        g = unpruned_min_colors(n, k, q)
        out.append({"n": n, "k": k, "q": q, "gMin": g})
        print(out[-1], f"{time.perf_counter() - t0:.2f}s")
    path = Path(__file__).with_name("exact_values.json")
    path.write_text(json.dumps(out, indent=2) + "\n")
