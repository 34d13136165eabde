"""Compiled vs numpy timing of the pointwise B-field kernel.

    python3 benchmarks/bench_core.py [--points 65536] [--repeat 5]
"""
from __future__ import annotations

import argparse
import timeit

import numpy as np

from gcdeform import _kernels_py

try:
    from gcdeform import _core
except ImportError:
    _core = None


def inputs(points, n, seed=0, scale=0.05):
    rng = np.random.default_rng(seed)

    def mat():
        return scale * (rng.standard_normal((points, n, n)) + 1j * rng.standard_normal((points, n, n)))

    S = rng.standard_normal((n, n)) + 0j
    S = S - S.T
    B20 = mat()
    B20 = B20 - np.swapaxes(B20, 1, 2)
    B02 = mat()
    B02 = B02 - np.swapaxes(B02, 1, 2)
    return S, mat(), mat(), mat(), B20, mat(), mat(), B02


def bench(points, repeat, n):
    args = inputs(points, n)
    rows = []
    ref = _kernels_py.bfield_apply(*args)
    for name, fn in (("python", _kernels_py.bfield_apply),
                     ("compiled", None if _core is None else _core.bfield_apply)):
        if fn is None:
            rows.append((name, float("nan"), float("nan")))
            continue
        out = fn(*args)
        err = max(float(np.max(np.abs(a - b))) for a, b in zip(out[:3], ref[:3]))
        best = min(timeit.repeat(lambda: fn(*args), number=1, repeat=repeat))
        rows.append((name, best, err))
    return rows


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=65536)
    ap.add_argument("--repeat", type=int, default=5)
    a = ap.parse_args(argv)
    for n in (1, 2):
        rows = bench(a.points, a.repeat, n)
        base = rows[0][1]
        print(f"n={n} points={a.points}")
        for name, t, err in rows:
            print(f"  {name:9s} {t * 1e3:9.2f} ms  speedup {base / t:6.2f}x  max|diff| {err:.1e}")


if __name__ == "__main__":
    main()
