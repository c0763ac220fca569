"""Compare the numba and numpy table-kernel backends on real workloads.

Workloads come from the bundled catalogues (every group of order 16, 27,
32 and 81) plus one order-1024 wreath product, exercising the two hot
kernels: subgroup closure from random seeds and index-l extension
candidate masks. Both backends receive identical inputs and their outputs
are compared before any timing is reported.

Run:  python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import time

import numpy as np

from pgf.datasets import load_all_fixtures
from pgf.family import eval_cert, parse_cert
from pgf.kernels import available, get_kernels
from pgf.pc import pc_to_perm
from pgf.table import CayleyTable


def build_tables():
    out = []
    for pres in load_all_fixtures():
        if pres.order >= 16:
            ct = CayleyTable.from_perm_group(pc_to_perm(pres))
            out.append((pres.prime, ct))
    big = eval_cert(parse_cert("W(C(2,2),C(2,2))"))
    out.append((2, CayleyTable.from_perm_group(big)))
    return out


def build_workloads(tables, rng):
    closure_inputs = []
    extension_inputs = []
    for prime, ct in tables:
        table = ct.table
        conj = ct.conj()
        powl = ct.pow_map(prime)
        for _ in range(6):
            seed = rng.choice(ct.n, size=2, replace=False).astype(np.int64)
            closure_inputs.append((table, seed))
        member = get_kernels("numpy").closure(
            table, rng.choice(ct.n, size=2, replace=False).astype(np.int64)
        )
        extension_inputs.append((table, conj, powl, member))
    return closure_inputs, extension_inputs


def time_backend(kern, closure_inputs, extension_inputs, repeat):
    best_closure = best_extension = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        for table, seed in closure_inputs:
            kern.closure(table, seed)
        best_closure = min(best_closure, time.perf_counter() - t0)
        t0 = time.perf_counter()
        for args in extension_inputs:
            kern.extension_candidates(*args)
        best_extension = min(best_extension, time.perf_counter() - t0)
    return best_closure, best_extension


def check_agreement(backends, closure_inputs, extension_inputs):
    for table, seed in closure_inputs:
        reference = backends[0].closure(table, seed)
        for kern in backends[1:]:
            assert (kern.closure(table, seed) == reference).all(), kern.name
    for args in extension_inputs:
        reference = backends[0].extension_candidates(*args)
        for kern in backends[1:]:
            assert (kern.extension_candidates(*args) == reference).all(), kern.name


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5, metavar="N")
    args = parser.parse_args()

    names = available()
    backends = [get_kernels(n) for n in names]
    if "numba" not in names:
        print("numba backend unavailable; timing numpy only")

    rng = np.random.default_rng(7)
    tables = build_tables()
    closure_inputs, extension_inputs = build_workloads(tables, rng)
    print(
        f"{len(tables)} tables (orders {min(ct.n for _, ct in tables)}.."
        f"{max(ct.n for _, ct in tables)}), "
        f"{len(closure_inputs)} closures, {len(extension_inputs)} extension "
        f"scans, best of {args.repeat}"
    )

    check_agreement(backends, closure_inputs, extension_inputs)
    print("backends agree on every workload output")

    timings = {}
    for kern in backends:
        # first pass lets numba finish JIT compilation outside the timing
        time_backend(kern, closure_inputs, extension_inputs, 1)
        timings[kern.name] = time_backend(
            kern, closure_inputs, extension_inputs, args.repeat
        )

    print(f"{'backend':<10} {'closure_s':>10} {'extension_s':>12}")
    for name, (c, e) in timings.items():
        print(f"{name:<10} {c:>10.4f} {e:>12.4f}")
    if "numba" in timings and "numpy" in timings:
        c_ratio = timings["numpy"][0] / timings["numba"][0]
        e_ratio = timings["numpy"][1] / timings["numba"][1]
        print(f"numba speedup: closure {c_ratio:.1f}x, extension {e_ratio:.1f}x")


if __name__ == "__main__":
    main()
