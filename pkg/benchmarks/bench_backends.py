"""Time the compiled kernels against the numpy fallback.

Usage::

    python3 benchmarks/bench_backends.py [--repeat 9] [--dims 64,512,4096]
"""
import argparse
import statistics
import time

import numpy as np

from greedyprune import PruneConfig, _backend, exact_solve, greedy_prune, pairwise_similarities


def median_ms(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return 1000 * statistics.median(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=9)
    ap.add_argument("--dims", default="64,512,4096")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    backends = _backend.available()
    rng = np.random.default_rng(args.seed)
    print(f"{'case':<40}" + "".join(f"{b:>12}" for b in backends))

    for d in (int(v) for v in args.dims.split(",")):
        centres = rng.standard_normal((48, d))
        x = centres[rng.integers(0, 48, 576)] + 0.3 * rng.standard_normal((576, d))
        w = rng.random(576)
        for tau in (0.9, 0.5):
            row = [median_ms(lambda b=b: greedy_prune(x, w, PruneConfig(64, tau), backend=b), args.repeat)
                   for b in backends]
            print(f"{f'greedy n=576 d={d} M=64 tau={tau}':<40}" + "".join(f"{t:>10.2f}ms" for t in row))

    for n in (16, 20, 24):
        x = rng.standard_normal((n, 8))
        w = rng.random(n)
        sim = pairwise_similarities(x)
        row = [median_ms(lambda b=b: exact_solve(w, sim, 0.3, n // 3, backend=b), max(1, args.repeat // 3))
               for b in backends]
        print(f"{f'exact n={n} M={n // 3} tau=0.3':<40}" + "".join(f"{t:>10.2f}ms" for t in row))

    blob = rng.integers(0, 256, 576 * 4096 * 4, dtype=np.uint8).tobytes()
    row = [median_ms(lambda k=_backend.load(b): k.fnv1a64(blob), 3) for b in backends]
    print(f"{'fnv1a64 over 9.4 MB':<40}" + "".join(f"{t:>10.2f}ms" for t in row))


if __name__ == "__main__":
    main()
