"""Compare the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]

Workloads mirror the simulator: blockage tests for one UE against the
scatterer field, and a K=3 neighbour query against a 984-entry map.
"""
import argparse
import timeit

import numpy as np

from irs_beamsim import _fallback
from irs_beamsim.harness.config import default_layout

try:
    from irs_beamsim import _kernels
except ImportError:
    _kernels = None


def workloads(rng):
    layout = default_layout()
    bmin, bmax = layout.box_arrays
    ue = np.array([8.0, 1.0, 1.5])
    scat = rng.uniform([2, -10, 0.5], [18, 10, 4], size=(40, 3))
    p1 = np.ascontiguousarray(np.vstack([scat, [layout.irs_position]]))
    p2 = np.ascontiguousarray(np.broadcast_to(ue, p1.shape))
    pts = np.ascontiguousarray(rng.uniform([3, -5, 1.5], [13, 5, 1.5], size=(984, 3)))
    q = np.array([7.3, -0.4, 1.5])
    return {
        "segments_blocked (41 segs x 23 boxes)": lambda m: m.segments_blocked(p1, p2, bmin, bmax),
        "knn_select (984 pts, K=3)": lambda m: m.knn_select(pts, q, 3),
        "segments_blocked (2000 segs x 23 boxes)": (
            lambda m, a=np.ascontiguousarray(rng.uniform(-5, 15, (2000, 3))),
            b=np.ascontiguousarray(rng.uniform(-5, 15, (2000, 3))): m.segments_blocked(a, b, bmin, bmax)),
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=2000)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    backends = {"python": _fallback}
    if _kernels is not None:
        backends["cython"] = _kernels
    else:
        print("compiled extension not built; timing the fallback only")
    print(f"{'kernel':42s}" + "".join(f"{b:>14s}" for b in backends) + "   speedup")
    for name, fn in workloads(rng).items():
        n = max(1, args.repeat // 20) if "2000 segs" in name else args.repeat
        times = {}
        for b, mod in backends.items():
            fn(mod)
            times[b] = min(timeit.repeat(lambda: fn(mod), number=n, repeat=3)) / n
        ref = fn(backends["python"])
        if "cython" in backends:
            out = fn(backends["cython"])
            same = all(np.array_equal(x, y) for x, y in zip(ref, out)) if isinstance(ref, tuple) \
                else np.array_equal(ref, out)
            assert same, f"backends disagree on {name}"
        cells = "".join(f"{times[b] * 1e6:11.1f} us" for b in backends)
        speed = f"{times['python'] / times['cython']:8.1f}x" if "cython" in times else ""
        print(f"{name:42s}{cells}{speed}")


if __name__ == "__main__":
    main()
