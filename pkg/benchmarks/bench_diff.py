#!/usr/bin/env python3
"""Benchmark the compiled diff kernel against the pure-Python fallback.

Usage: python3 benchmarks/bench_diff.py [--pairs N]

Times ``match_blocks`` on the same interned token sequences for both kernels
and reports per-workload totals plus the speedup. Workloads mirror the
preview's reality: light edits of one text (the common case), shuffles of the
same vocabulary (the adversarial case), and unrelated texts (where the
unique-token reduction in the wrapper does most of the work before the kernel
ever runs; the kernel here sees the post-reduction sequences).
"""

from __future__ import annotations

import argparse
import random
import time

from promptkey.diffing import _myers_py, tokenize

try:
    from promptkey.diffing import _myers as compiled
except ImportError:
    compiled = None

WORDS = ["the", "cat", "sat", "dog", "ran", "on", "mats", "fast", "red", "blue"]


def intern_pair(a_tokens, b_tokens):
    ids: dict[str, int] = {}
    return (
        [ids.setdefault(t, len(ids)) for t in a_tokens],
        [ids.setdefault(t, len(ids)) for t in b_tokens],
    )


def make_workloads(pairs: int, rng: random.Random):
    def text(n):
        return " ".join(rng.choice(WORDS) for _ in range(n))

    workloads: dict[str, list[tuple[list[int], list[int]]]] = {
        "mutation": [],
        "shuffle": [],
        "unrelated": [],
    }
    for _ in range(pairs):
        a = text(rng.randrange(100, 900))
        tokens = tokenize(a)
        mutated = list(tokens)
        for _ in range(rng.randrange(1, 10)):
            pos = rng.randrange(len(mutated))
            mutated[pos] = rng.choice(WORDS)
        workloads["mutation"].append(intern_pair(tokens, mutated))

        shuffled = list(tokens)
        rng.shuffle(shuffled)
        workloads["shuffle"].append(intern_pair(tokens, shuffled))

        b = text(rng.randrange(100, 900))
        workloads["unrelated"].append(intern_pair(tokens, tokenize(b)))
    return workloads


def run(kernel, workloads) -> dict[str, float]:
    times = {}
    for name, pairs in workloads.items():
        start = time.perf_counter()
        for a, b in pairs:
            kernel.match_blocks(a, b)
        times[name] = time.perf_counter() - start
    return times


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--pairs", type=int, default=60, help="pairs per workload")
    parser.add_argument("--seed", type=int, default=1)
    args = parser.parse_args()

    workloads = make_workloads(args.pairs, random.Random(args.seed))

    print(f"{args.pairs} pairs per workload, token counts 100-900\n")
    print(f"{'workload':<12}{'pure (s)':>12}{'compiled (s)':>14}{'speedup':>10}")
    pure_times = run(_myers_py, workloads)
    if compiled is None:
        for name, pure_t in pure_times.items():
            print(f"{name:<12}{pure_t:>12.3f}{'n/a':>14}{'n/a':>10}")
        print("\ncompiled kernel not built (pip install -e . rebuilds it)")
        return 0
    compiled_times = run(compiled, workloads)
    for name in workloads:
        pure_t, comp_t = pure_times[name], compiled_times[name]
        print(f"{name:<12}{pure_t:>12.3f}{comp_t:>14.3f}{pure_t / comp_t:>9.1f}x")

    # Sanity: identical outputs on a sample from each workload.
    for name, pairs in workloads.items():
        a, b = pairs[0]
        assert compiled.match_blocks(a, b) == _myers_py.match_blocks(a, b), name
    print("\nkernel parity on sampled pairs: ok")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
