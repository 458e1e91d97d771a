"""Backend benchmark: numba kernels vs the numpy/pure-Python fallbacks.

Run as ``python -m quantacode.bench`` (add ``--quick`` for smaller sizes).
Times the three hot loops -- the per-denominator min-max scan, the brute
force composition search, and the range coder -- on each available backend
and prints the speedups.  The exact big-integer path is also timed for the
scan since it is the fallback for high-precision surrogate sources.
"""

from __future__ import annotations

import argparse
import time

from . import _kernels
from .coder import sample_symbols
from .prob_model import parse_probability_vector


def _timeit(fn, repeat: int = 3) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def _fmt_row(name, results):
    base = results.get("python") or results.get("numpy")
    cells = [f"{name:<26}"]
    for key in ("numba", "numpy", "python"):
        if key in results:
            sp = f" ({base / results[key]:5.1f}x)" if base else ""
            cells.append(f"{key}: {results[key] * 1e3:9.2f} ms{sp}")
    return "  ".join(cells)


def run(quick: bool = False) -> None:
    t_max = 5_000 if quick else 20_000
    n_syms = 100_000 if quick else 1_000_000

    p = parse_probability_vector(["0.412345", "0.300001", "0.199999", "0.087655"])
    nums, d = p.numerators, p.common_denominator

    rows = []

    # --- min-max scan over a denominator range
    res = {}
    if _kernels.HAVE_NUMBA:
        _kernels.minmax_scan(nums, d, 4, 64)  # compile outside the clock
        res["numba"] = _timeit(lambda: _kernels.minmax_scan(nums, d, 4, t_max))
    res["numpy"] = _timeit(lambda: _kernels._minmax_scan_np(nums, d, 4, t_max, False))

    def scan_py():
        for t in range(4, t_max + 1):
            _kernels.minmax_freqs_exact(nums, d, t)

    res["python"] = _timeit(scan_py, repeat=1)
    rows.append(_fmt_row(f"minmax scan t<={t_max}", res))

    # --- exhaustive composition search
    res = {}
    if _kernels.HAVE_NUMBA:
        _kernels.exhaustive_min(nums, d, 16)
        res["numba"] = _timeit(lambda: _kernels.exhaustive_min(nums, d, 64))
    res["numpy"] = _timeit(lambda: _kernels._exhaustive_np(nums, d, 64))
    res["python"] = _timeit(lambda: _kernels.exhaustive_min_exact(nums, d, 64),
                            repeat=1)
    rows.append(_fmt_row("exhaustive m=4 t=64", res))

    # --- range coder
    from .approx import round_min_max

    table = round_min_max(p, 4096)
    syms = sample_symbols(p, n_syms, seed=1)
    fpos = [table.freqs[s] for s in table.order]
    pos, starts, t = table.position_of_symbol, table.cum, table.t

    res = {}
    if _kernels.HAVE_NUMBA:
        _kernels.rc_encode(syms[:64], pos, starts, fpos, t, table.width_bits)
        res["numba"] = _timeit(
            lambda: _kernels.rc_encode(syms, pos, starts, fpos, t, table.width_bits))
    res["python"] = _timeit(
        lambda: _kernels.rc_encode_py(syms[: n_syms // 10], pos, starts, fpos, t),
        repeat=1) * 10
    rows.append(_fmt_row(f"rc encode n={n_syms}", res))

    blob = _kernels.rc_encode(syms, pos, starts, fpos, t, table.width_bits)
    res = {}
    if _kernels.HAVE_NUMBA:
        _kernels.rc_decode(blob, 64, table.order, starts, fpos, t)
        res["numba"] = _timeit(
            lambda: _kernels.rc_decode(blob, n_syms, table.order, starts, fpos, t))
    blob10 = _kernels.rc_encode_py(syms[: n_syms // 10], pos, starts, fpos, t)
    res["python"] = _timeit(
        lambda: _kernels.rc_decode_py(blob10, n_syms // 10, table.order,
                                      starts, fpos, t), repeat=1) * 10
    rows.append(_fmt_row(f"rc decode n={n_syms}", res))

    print(f"active backend: {_kernels.backend()}"
          f"  (QUANTACODE_JIT=0 disables numba)")
    for row in rows:
        print(row)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--quick", action="store_true", help="smaller sizes")
    args = ap.parse_args(argv)
    run(quick=args.quick)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
