"""Compare the compiled and pure-Python kernel backends.

    python benchmarks/bench_kernels.py [--repeat 5]

Prints the best-of-N wall time per kernel and backend, the speedup, and
whether both backends returned identical results.
"""
import argparse
import time

import numpy as np

from bbplace import generate_synthetic, kernels
from bbplace.mgo import MgoDecoder


def best_time(fn, repeat):
    best, out = np.inf, None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def cases(rng):
    nl = generate_synthetic(100, 20000, 24000, n_terminals=64, seed=0)
    px, py = nl.initial_placement(seed=0).pin_xy()
    yield "net_hpwl 24k nets", lambda k: k.net_hpwl(nl.net_ptr, nl.net_pins, px, py)
    yield "total_hpwl 24k nets", lambda k: k.total_hpwl(nl.net_ptr, nl.net_pins, px, py)

    a, b, w = rng.permutation(2000), rng.permutation(2000), rng.uniform(0.1, 5, 2000)
    yield "weighted_lcs k=2000", lambda k: k.weighted_lcs(a, b, w)

    for n_mac, grid in ((64, 64), (512, 224)):
        big = generate_synthetic(n_mac, 1000, 1200, n_terminals=16, seed=0)
        c = big.canvas
        g = np.column_stack([rng.uniform(c.x, c.x + c.width, n_mac),
                             rng.uniform(c.y, c.y + c.height, n_mac)]).ravel()
        decs = {name: MgoDecoder(big, grid, name) for name in kernels.available()}
        yield f"mgo_decode {n_mac} macros grid {grid}", lambda k, d=decs, g=g: d[k.NAME].decode_grid(g)


def same(a, b):
    if isinstance(a, tuple):
        return all(np.array_equal(x, y) for x, y in zip(a, b))
    return np.array_equal(a, b)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    names = kernels.available()
    if "cython" not in names:
        print("compiled kernels not built; only the python backend is available")
    print(f"default backend: {kernels.BACKEND}")
    print(f"{'kernel':<32}{'python s':>12}{'cython s':>12}{'speedup':>10}  identical")
    for label, fn in cases(np.random.default_rng(0)):
        res = {name: best_time(lambda: fn(kernels.get_backend(name)), args.repeat) for name in names}
        t_py = res["python"][0]
        if "cython" in res:
            t_cy = res["cython"][0]
            print(f"{label:<32}{t_py:>12.5f}{t_cy:>12.5f}{t_py / t_cy:>9.1f}x  "
                  f"{same(res['python'][1], res['cython'][1])}")
        else:
            print(f"{label:<32}{t_py:>12.5f}{'-':>12}{'-':>10}")


if __name__ == "__main__":
    main()
