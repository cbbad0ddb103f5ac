"""Compare the FLINT and pure-Python kernels on the hot paths.

    python3 benchmarks/bench_kernel.py [--repeat N]
"""
import argparse
import random
import time
from fractions import Fraction

from birdyn import _kernel
from birdyn.birmap import compose
from birdyn.catalog import df_maps
from birdyn.exact import product_formula_check


def bench(label, fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return label, best


def iterate_df(n):
    f, _ = df_maps(Fraction(1, 4))
    g = f
    for _ in range(n - 1):
        g = compose(f, g)
    return g


def product_formula(count, seed=0):
    rng = random.Random(seed)
    for _ in range(count):
        product_formula_check(Fraction(rng.randint(1, 10**12), rng.randint(1, 10**12)))


def contents(count, seed=0):
    rng = random.Random(seed)
    g = 3**2000
    vecs = [[g * rng.randint(-10**6, 10**6) for _ in range(3)] for _ in range(count)]
    for v in vecs:
        _kernel.backend.primitive(v)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    cases = [
        ("compose DF iterate n=8", lambda: iterate_df(8)),
        ("product formula x2000", lambda: product_formula(2000)),
        ("primitive, 6000-bit entries x2000", lambda: contents(2000)),
    ]
    rows = []
    for name in ("pure", "flint"):
        _kernel.use(name)
        for label, fn in cases:
            rows.append((name, *bench(label, fn, args.repeat)))
    width = max(len(r[1]) for r in rows)
    for name, label, t in rows:
        print(f"{name:6s} {label:{width}s} {t * 1000:10.1f} ms")


if __name__ == "__main__":
    main()
