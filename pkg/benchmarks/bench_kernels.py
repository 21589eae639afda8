"""Time the numba kernels against their numpy references.

    python benchmarks/bench_kernels.py [--repeat N] [--p 3 --s 7]

Prints one row per kernel: best-of-N wall time for each backend, the speedup,
and the max abs difference between the two outputs.
"""

import argparse
import time

import numpy as np
import numba

from ppsent import _accel
from ppsent.galois import PpsParams, build_pps_set
from ppsent.protocols import prepare_ghz
from ppsent.correlation import _cross_terms
from ppsent.states import tensor_product

JITTED = {
    "lfsr_run": numba.njit(_accel._lfsr_run_py),
    "lfsr_period": numba.njit(_accel._lfsr_period_py),
    "closure_violations": numba.njit(_accel._closure_violations_loop),
    "slot_products": numba.njit(_accel._slot_products_loop),
    "mean_outer": numba.njit(_accel._mean_outer_loop),
}


def best_time(fn, args, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def workloads(p, s, n_angles, seed):
    params = PpsParams.default(p, s)
    pps = build_pps_set(params)
    taps = np.asarray(params.taps, dtype=np.int64)
    start = np.zeros(s, dtype=np.int64)
    start[-1] = 1
    small = build_pps_set(PpsParams.default(p, min(s, 5)))
    rng = np.random.default_rng(seed)
    fields = prepare_ghz(4, pps, pps.nonzero_labels()[:4])
    cross = _cross_terms(fields)
    angles = rng.uniform(0, 2 * np.pi, size=(n_angles, 4))
    vecs = np.ascontiguousarray(tensor_product(fields).slot_vectors())
    return {
        "lfsr_run": (taps, p, start, params.L - 1),
        "lfsr_period": (taps, p, start, params.L),
        # closure is cubic in L, so it runs on a smaller field
        "closure_violations": (np.ascontiguousarray(small.symbols), np.ascontiguousarray(small.sum_index), p),
        "slot_products": (np.ascontiguousarray(cross.real), np.ascontiguousarray(cross.imag), angles),
        "mean_outer": (vecs,),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--p", type=int, default=3)
    ap.add_argument("--s", type=int, default=7)
    ap.add_argument("--angles", type=int, default=2000, help="angle tuples for slot_products")
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    loads = workloads(args.p, args.s, args.angles, args.seed)
    print(f"GF({args.p}^{args.s}), L={args.p ** args.s}, best of {args.repeat}")
    print(f"{'kernel':<20}{'numpy [s]':>12}{'numba [s]':>12}{'speedup':>10}{'max|diff|':>12}")
    for name, kargs in loads.items():
        JITTED[name](*kargs)  # compile outside the timed region
        t_np, out_np = best_time(_accel.numpy_kernels[name], kargs, args.repeat)
        t_nb, out_nb = best_time(JITTED[name], kargs, args.repeat)
        diff = float(np.max(np.abs(np.asarray(out_np) - np.asarray(out_nb))))
        print(f"{name:<20}{t_np:>12.4g}{t_nb:>12.4g}{t_np / t_nb:>10.1f}{diff:>12.2e}")


if __name__ == "__main__":
    main()
