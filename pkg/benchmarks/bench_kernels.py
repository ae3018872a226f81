"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--trees 100]

Each timing is the best of ``--repeat`` runs.  Results are also checked for
equality, since the two backends must agree exactly.
"""

import argparse
import sys
import time

import numpy as np

from rareclass import kernels
from rareclass.data import SynthSpec, default_coefficients, synth_generate
from rareclass.forest import ForestConfig, dumps, fit_forest


def best_of(repeat, fn):
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--trees", type=int, default=100)
    args = ap.parse_args(argv)

    names = kernels.available()
    if "native" not in names:
        print("native kernels are not built; only the numpy backend is available", file=sys.stderr)

    rng = np.random.default_rng(0)
    X = rng.standard_normal((20_000, 10))
    y = (X[:, 0] + rng.standard_normal(20_000) > 0).astype(np.int8)
    rows = np.arange(20_000, dtype=np.intp)
    order = np.arange(10, dtype=np.intp)
    a = rng.standard_normal(3000)
    b = a + rng.standard_normal(3000)
    data = synth_generate(SynthSpec(2000, 10, default_coefficients(10, 3.0), 0.3, 0.05, seed=1))
    cfg = ForestConfig(n_trees=args.trees, master_seed=0)

    cases = [
        ("best_split n=20000 p=10", lambda k: k.best_split(X, y, rows, order, 10), None),
        ("kendall_counts n=3000", lambda k: k.kendall_counts(a, b), None),
        (f"fit_forest n=2000 p=10 trees={args.trees}",
         None, lambda name: dumps(fit_forest(data, cfg, backend=name))),
    ]
    print(f"{'case':<36s}" + "".join(f"{n:>12s}" for n in names) + ("     speedup" if len(names) > 1 else ""))
    for label, kernel_fn, model_fn in cases:
        times, outs = [], []
        for name in names:
            if kernel_fn is not None:
                mod = kernels.get(name)
                t, out = best_of(args.repeat, lambda: kernel_fn(mod))
            else:
                t, out = best_of(1 if args.repeat < 2 else 2, lambda: model_fn(name))
            times.append(t)
            outs.append(out)
        line = f"{label:<36s}" + "".join(f"{t:11.4f}s" for t in times)
        if len(names) > 1:
            line += f"{times[0] / times[1]:11.1f}x"
            assert outs[0] == outs[1], f"backends disagree on {label}"
        print(line)


if __name__ == "__main__":
    main()
