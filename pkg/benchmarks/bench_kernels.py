"""Compiled kernels against the numpy fallback.

Run ``python benchmarks/bench_kernels.py`` after an editable install.  Each
row is the best of several ``timeit`` repeats; the last column is the
speedup of the compiled backend.  Both backends are checked for agreement
before timing.
"""

from __future__ import annotations

import argparse
import json
import timeit

import numpy as np

from digishear import dsst, kernels


def _best(fn, repeat: int) -> float:
    number, _ = timeit.Timer(fn).autorange()
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def _dsst_forward(backend, img, plan):
    saved = kernels.active
    kernels.active = backend
    try:
        return dsst.dsst_forward(img, plan)
    finally:
        kernels.active = saved


def cases(n: int):
    rng = np.random.default_rng(0)
    fine = rng.standard_normal((4 * n, n))
    img = rng.standard_normal((n, n))
    plan = dsst.DsstPlan(n, 4 if n >= 64 else 2)
    return [
        (f"shear_rows {4 * n}x{n}", lambda b: b.shear_rows(fine, 3, n // 2)),
        (f"holder_exponents {n}x{n} r=4", lambda b: b.holder_exponents(img, 4)),
        (f"dsst_forward N={n} J={plan.scales}", lambda b: _dsst_forward(b, img, plan).low),
    ]


def run(sizes, repeat: int) -> list[dict]:
    if kernels.BACKEND != "cython":
        raise SystemExit("compiled kernels are not built; reinstall with Cython available")
    fast, slow = kernels.active, kernels.numpy_kernels
    rows = []
    for n in sizes:
        for name, fn in cases(n):
            a, b = np.asarray(fn(fast)), np.asarray(fn(slow))
            if not np.allclose(a, b, rtol=1e-12, atol=1e-12, equal_nan=True):
                raise SystemExit(f"{name}: backends disagree")
            t_fast = _best(lambda: fn(fast), repeat)
            t_slow = _best(lambda: fn(slow), repeat)
            rows.append({"case": name, "cython_s": t_fast, "numpy_s": t_slow,
                         "speedup": t_slow / t_fast})
    return rows


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[64, 256])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--json", help="also write the rows to this file")
    args = ap.parse_args()
    rows = run(args.sizes, args.repeat)
    width = max(len(r["case"]) for r in rows)
    print(f"{'case':<{width}}  {'cython [s]':>11}  {'numpy [s]':>11}  {'speedup':>7}")
    for r in rows:
        print(f"{r['case']:<{width}}  {r['cython_s']:11.3e}  {r['numpy_s']:11.3e}  {r['speedup']:7.2f}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)


if __name__ == "__main__":
    main()
