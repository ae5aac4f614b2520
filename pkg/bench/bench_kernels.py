"""Compare the Cython and pure-Python multiplication kernels.

    python bench/bench_kernels.py [--repeat 3]

Each workload runs under both kernels; outputs are checked for equality
and the best wall time per kernel is printed.
"""

import argparse
import time

from hnrel import exactalg
from hnrel.relgen import BundleData, build_ring, grr_minus_pi, recurrence_residual
from hnrel.respair import SplitHatRing, torus_restrict_hat
from hnrel.exactalg import TSeries


def grr_2_2_3():
    main, hat = BundleData(2, 1, 3), BundleData(2, 3, 3, "h")
    ring = build_ring([main, hat], 14)
    return grr_minus_pi(main, hat, 7, ring)


def restrict_1_2_3():
    main, hat = BundleData(1, 1, 3), BundleData(2, 3, 3, "h")
    ring = build_ring([main, hat], 16)
    c = grr_minus_pi(main, hat, 8, ring)
    split = SplitHatRing.make(main, 2, (1, 2), 16)
    return TSeries(split.ring, [torus_restrict_hat(x, split) for x in c.coeffs], 8)


def recurrence_2_2_2():
    res = recurrence_residual(BundleData(2, 1, 2), BundleData(2, 2, 2, "h"), 12)
    return tuple(sorted(res.items()))


def exp_dense():
    r = exactalg.Ring([(f"b{i}", 1) for i in range(10)] + [("a", 2), ("c", 4)], 16)
    x = r.gen("a") + r.gen("c")
    for i in range(10):
        for j in range(i + 1, 10):
            x = x + r.gen(f"b{i}") * r.gen(f"b{j}").scale(i + j)
    return x.exp()


WORKLOADS = [
    ("grr n=2 nhat=2 g=3", grr_2_2_3),
    ("restrict n=1 nhat=2 g=3", restrict_1_2_3),
    ("recurrence n=2 nhat=2 g=2", recurrence_2_2_2),
    ("exp dense 10 odd + 2 even", exp_dense),
]


def timed(fn, repeat):
    best, out = None, None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        dt = time.perf_counter() - t
        best = dt if best is None else min(best, dt)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if not exactalg.kernel_available("cython"):
        print("compiled kernel not built; only the Python kernel is timed")
    print(f"{'workload':28s} {'python s':>10s} {'cython s':>10s} {'speedup':>8s}")
    for name, fn in WORKLOADS:
        exactalg.use_kernel("python")
        tp, op = timed(fn, args.repeat)
        if exactalg.kernel_available("cython"):
            exactalg.use_kernel("cython")
            tc, oc = timed(fn, args.repeat)
            if oc != op:
                raise SystemExit(f"kernels disagree on {name}")
            print(f"{name:28s} {tp:10.3f} {tc:10.3f} {tp / tc:8.1f}")
        else:
            print(f"{name:28s} {tp:10.3f} {'-':>10s} {'-':>8s}")


if __name__ == "__main__":
    main()
