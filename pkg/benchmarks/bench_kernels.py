"""Compare the numba kernels with the pure-numpy fallback.

Kernel timings import both backends side by side.  The end-to-end timings
run a child interpreter per backend, because the backend is fixed when
``pseudologit`` is first imported (``PSEUDOLOGIT_DISABLE_NUMBA=1`` selects
numpy).

    python benchmarks/bench_kernels.py [--sizes 30,500,100000] [--repeat 7]
"""

import argparse
import json
import os
import subprocess
import sys
import timeit

import numpy as np

from pseudologit.kernels import _numba, _numpy
from pseudologit.model import PAPER_PARAMS
from pseudologit.rng import RandomStream

END_TO_END = r"""
import json, timeit
from pseudologit import kernels
from pseudologit.estimation import fit_mle
from pseudologit.model import PAPER_PARAMS
from pseudologit.rng import RandomStream
from pseudologit.simulation import sample_dataset
data = [sample_dataset(PAPER_PARAMS, {n}, RandomStream(1, (i,))) for i in range(20)]
fit_mle(data[0])  # compile / warm caches
t = min(timeit.repeat(lambda: [fit_mle(s) for s in data], number=1, repeat={repeat})) / len(data)
print(json.dumps({{"backend": kernels.BACKEND, "seconds": t}}))
"""


def best_of(fn, repeat: int) -> float:
    number, _ = timeit.Timer(fn).autorange()
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def kernel_rows(sizes, repeat):
    theta = tuple(PAPER_PARAMS.to_array())
    for n in sizes:
        u = RandomStream(0).uniforms(2 * n)
        xs, ys = _numpy.pairs_from_uniforms(u, *theta)
        cases = {
            "loglik_grad": lambda m: m.loglik_grad(xs, ys, *theta),
            "loglik": lambda m: m.loglik(xs, ys, *theta),
            "pairs_from_uniforms": lambda m: m.pairs_from_uniforms(u, *theta),
        }
        for name, call in cases.items():
            np.testing.assert_allclose(np.asarray(call(_numba)[0] if name != "loglik" else call(_numba)),
                                       np.asarray(call(_numpy)[0] if name != "loglik" else call(_numpy)),
                                       rtol=1e-12)
            t_nb = best_of(lambda: call(_numba), repeat)
            t_np = best_of(lambda: call(_numpy), repeat)
            yield name, n, t_nb, t_np


def end_to_end(n, repeat):
    out = {}
    for disable in ("0", "1"):
        env = dict(os.environ, PSEUDOLOGIT_DISABLE_NUMBA=disable)
        proc = subprocess.run([sys.executable, "-c", END_TO_END.format(n=n, repeat=repeat)],
                              env=env, capture_output=True, text=True, check=True)
        res = json.loads(proc.stdout)
        out[res["backend"]] = res["seconds"]
    return out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="30,500,100000")
    ap.add_argument("--repeat", type=int, default=7)
    ap.add_argument("--fit-n", type=int, default=500, help="sample size for the end-to-end fit timing")
    args = ap.parse_args(argv)
    sizes = [int(v) for v in args.sizes.split(",")]

    print(f"{'kernel':<20} {'n':>8} {'numba':>12} {'numpy':>12} {'speedup':>8}")
    for name, n, t_nb, t_np in kernel_rows(sizes, args.repeat):
        print(f"{name:<20} {n:>8} {t_nb * 1e6:>10.1f}us {t_np * 1e6:>10.1f}us {t_np / t_nb:>7.1f}x")

    fit = end_to_end(args.fit_n, max(3, args.repeat // 2))
    print(f"\nfit_mle at n={args.fit_n}: numba {fit['numba'] * 1e3:.2f} ms, "
          f"numpy {fit['numpy'] * 1e3:.2f} ms, speedup {fit['numpy'] / fit['numba']:.1f}x")


if __name__ == "__main__":
    main()
