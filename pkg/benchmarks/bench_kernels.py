"""Compare the compiled and numpy kernel backends.

    python benchmarks/bench_kernels.py [--n 100000] [--repeat 5]

Times batch evaluation of every law on a mixed corpus and one closed-loop
run of the builtin example, then checks that both backends agree.
"""

import argparse
import time

import numpy as np

from safestab import corpus, kernels

LAWS = ("kl", "km", "kl_star", "km_star", "kl_sharp", "km_sharp")
PARAMS = {"k1": 1.0, "k2": 2.0, "q": 8.0, "d1": 0.5, "d2": 1.1}


def best_of(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=100_000)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    backends = {"python": kernels.python_backend}
    if kernels.compiled_backend is not None:
        backends["compiled"] = kernels.compiled_backend
    else:
        print("compiled extension not built; timing the numpy backend only")

    rng = np.random.default_rng(args.seed)
    n = args.n
    batch = corpus.uniform(rng, n // 2).concat(corpus.mixed_compatible(rng, n - n // 2))
    sq = rng.uniform(0.0, 1.0, len(batch))

    print(f"batch evaluate, {len(batch)} samples, best of {args.repeat}")
    print(f"{'law':<10}" + "".join(f"{b:>14}" for b in backends) + f"{'speedup':>10}{'max |diff|':>14}")
    for law in LAWS:
        times, outs = {}, {}
        for name, impl in backends.items():
            times[name], outs[name] = best_of(lambda: impl.evaluate(*batch, law=law, sq_norm=sq), args.repeat)
        row = f"{law:<10}" + "".join(f"{times[b] * 1e3:>12.2f}ms" for b in backends)
        if len(backends) == 2:
            diff = np.nanmax(np.abs(outs["compiled"] - outs["python"]))
            row += f"{times['python'] / times['compiled']:>9.1f}x{diff:>14.2e}"
        print(row)

    print("\nclosed-loop example, 10000 RK4 steps from (1, -3), kl_sharp")
    sims = {}
    for name, impl in backends.items():
        t, sims[name] = best_of(lambda: impl.simulate_example(PARAMS, 1.0, -3.0, law="kl_sharp", steps=10000),
                                max(1, args.repeat // 2))
        print(f"{name:<10}{t * 1e3:>12.2f}ms  stop={sims[name][1]}")
    if len(sims) == 2:
        diff = np.max(np.abs(sims["compiled"][0] - sims["python"][0]))
        print(f"max |diff| over all trajectory columns: {diff:.2e}")


if __name__ == "__main__":
    main()
