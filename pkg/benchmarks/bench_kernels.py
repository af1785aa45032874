"""Compare the compiled and numpy kernel backends.

Run with ``python benchmarks/bench_kernels.py [--repeat R]``.  Both backends
are imported directly, so ``WEAKLP_BACKEND`` has no effect here.  Outputs
are checked for agreement before timing.
"""
import argparse
import importlib
import timeit

import numpy as np

from weaklp._backend import available


def _profile(rng, size):
    values = np.sort(rng.uniform(0.0, 10.0, size))[::-1].copy()
    masses = rng.uniform(0.1, 2.0, size)
    return values, masses


def _cases(rng):
    for size in (100, 10_000, 1_000_000):
        v, m = _profile(rng, size)
        yield f"weak_norm_profile n={size}", "weak_norm_profile", (v, m, 2.0)
        yield f"quasi_norm_profile n={size}", "quasi_norm_profile", (v, m, 2.0)
        yield f"lq1_norm_profile n={size}", "lq1_norm_profile", (v, m, 2.0)
    for n in (12, 16, 20):
        a = np.abs(rng.uniform(-1.0, 1.0, n))
        yield f"subset_oracle n={n}", "subset_oracle", (a, 2.0)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    names = available()
    mods = {n: importlib.import_module(f"weaklp._{'c' if n == 'cython' else 'py'}kernels") for n in names}
    rng = np.random.default_rng(args.seed)
    header = f"{'case':32s}" + "".join(f"{n:>14s}" for n in names)
    if len(names) > 1:
        header += f"{'speedup':>10s}"
    print(header)
    for label, fn, fargs in _cases(rng):
        results = [getattr(mods[n], fn)(*fargs) for n in names]
        for r in results[1:]:
            assert np.isclose(r, results[0], rtol=1e-12), (label, results)
        times = []
        for n in names:
            call = getattr(mods[n], fn)
            number = max(1, int(0.2 / max(timeit.timeit(lambda: call(*fargs), number=1), 1e-6)))
            best = min(timeit.repeat(lambda: call(*fargs), number=number, repeat=args.repeat)) / number
            times.append(best)
        row = f"{label:32s}" + "".join(f"{t * 1e6:12.1f}us" for t in times)
        if len(times) > 1:
            row += f"{times[-1] / times[0]:9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
