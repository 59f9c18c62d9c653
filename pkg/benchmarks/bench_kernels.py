"""numba vs numpy: per-kernel timings, then one end-to-end order-finding run per backend.

    python benchmarks/bench_kernels.py [--size N] [--repeat R] [--group fp:503 --element 5 --multiple 502]
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from exactorder import kernels


def make_inputs(n: int, rng: np.random.Generator) -> dict:
    size = 4 * n
    ia = np.sort(rng.choice(size, n, replace=False)).astype(np.int64)
    ib = np.sort(rng.choice(size, n, replace=False)).astype(np.int64)
    aa = rng.normal(size=n) + 1j * rng.normal(size=n)
    ab = rng.normal(size=n) + 1j * rng.normal(size=n)
    k = rng.integers(0, 997, size=n)
    b = rng.integers(0, 2, size=n)
    xpow = kernels.power_table_numpy(7, 997, 997)
    return {
        "sparse_inner": (ia, aa, ib, ab),
        "sparse_axpy": (ia, aa, ib, ab, 0.3 - 0.1j),
        "chi_j_mask": (k, b, np.int64(4), np.int64(996), np.int64(5)),
        "modmul_index": (k, k % 997, xpow, np.int64(997)),
        "power_table": (7, 997, 997),
        "marginal": (k, aa, 997),
        "register_digits": (ia, np.int64(4), np.int64(997)),
        "sum_abs2": (aa,),
        "keep_mask": (aa, 1e-14),
    }


def bench_kernels(n: int, repeat: int):
    inputs = make_inputs(n, np.random.default_rng(0))
    print(f"{'kernel':<18}{'numba (ms)':>12}{'numpy (ms)':>12}{'speedup':>10}")
    for name in kernels.KERNELS:
        args = inputs[name]
        row = []
        for suffix in ("numba", "numpy"):
            fn = getattr(kernels, f"{name}_{suffix}")
            fn(*args)  # compile / warm up
            row.append(min(timeit.repeat(lambda: fn(*args), number=5, repeat=repeat)) / 5 * 1e3)
        print(f"{name:<18}{row[0]:>12.3f}{row[1]:>12.3f}{row[1] / row[0]:>9.1f}x")


END_TO_END = """
import time
from exactorder.groups import parse_group
from exactorder.order_finding import OrderInstance, find_order
g = parse_group({group!r})
inst = OrderInstance(g, g.parse_element({element!r}), {multiple})
find_order(OrderInstance(g, inst.x, {multiple}), 0)  # compile and fill caches once
from exactorder.sim import STATE_CACHE
STATE_CACHE.clear()
t = time.perf_counter()
r, trace = find_order(inst, 1)
print(r, trace.rounds, time.perf_counter() - t)
"""


def bench_end_to_end(group: str, element: str, multiple: int):
    code = END_TO_END.format(group=group, element=element, multiple=multiple)
    print(f"\nend to end: find_order on {group}, x={element}, m={multiple} (cold state cache)")
    for label, flag in (("numba", "0"), ("numpy", "1")):
        env = dict(os.environ, EXACTORDER_DISABLE_NUMBA=flag)
        out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
        r, rounds, secs = out.stdout.split()
        print(f"  {label:<6} r={r} rounds={rounds} {float(secs):.2f}s")


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--size", type=int, default=200_000, help="sparse vector length")
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--group", default="fp:503")
    ap.add_argument("--element", default="5")
    ap.add_argument("--multiple", type=int, default=502)
    args = ap.parse_args()
    bench_kernels(args.size, args.repeat)
    bench_end_to_end(args.group, args.element, args.multiple)


if __name__ == "__main__":
    main()
