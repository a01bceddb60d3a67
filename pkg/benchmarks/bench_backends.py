#!/usr/bin/env python3
"""Benchmark the compiled kernel core against the pure-numpy fallback.

Measures the hot operation (one sparse binary query against many packed
rows, i.e. one kernel row) at SMO-training-like sizes, plus an end-to-end
binary SVM training run. Run after ``python setup.py build_ext --inplace``
to see both backends; without the extension only the python row is shown.

    python benchmarks/bench_backends.py [--rows 4000] [--cols 3000] [--nnz 18]
"""

import argparse
import random
import time

import numpy as np

from modtag import kernels
from modtag.features import SparseVector
from modtag.kernels import CsrRows, KernelParams
from modtag.svm import TrainParams, train_binary


def make_rows(n_rows: int, n_cols: int, nnz: int, seed: int = 42) -> CsrRows:
    rng = random.Random(seed)
    vectors = [
        SparseVector.from_indices(rng.sample(range(n_cols), nnz)) for _ in range(n_rows)
    ]
    return CsrRows.from_vectors(vectors, n_cols=n_cols)


def bench_rows(impl, rows: CsrRows, repeats: int) -> float:
    mask = np.zeros(rows.n_cols, dtype=np.uint8)
    out = np.empty(rows.n_rows)
    rng = random.Random(7)
    queries = [
        np.asarray(rng.sample(range(rows.n_cols), 18), dtype=np.int64)
        for _ in range(repeats)
    ]
    start = time.perf_counter()
    for q in queries:
        mask[q] = 1
        impl.csr_mask_dots(rows.indices, rows.indptr, mask, out)
        mask[q] = 0
    return time.perf_counter() - start


def bench_training(n: int = 1500, n_cols: int = 400, seed: int = 3) -> float:
    # overlapping index pools plus 10% label noise keep SMO iterating
    rng = random.Random(seed)
    examples = []
    for _ in range(n):
        label = rng.choice((-1, 1))
        lo = 0 if label > 0 else n_cols // 3
        pool = range(lo, lo + 2 * n_cols // 3)
        if rng.random() < 0.1:
            label = -label
        noise = rng.sample(range(n_cols), 2)
        examples.append((SparseVector.from_indices(list(rng.sample(pool, 5)) + noise), label))
    params = TrainParams(kernel=KernelParams(), kkt_tolerance=1e-3)
    start = time.perf_counter()
    train_binary(examples, params)
    return time.perf_counter() - start


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--rows", type=int, default=4000)
    parser.add_argument("--cols", type=int, default=3000)
    parser.add_argument("--nnz", type=int, default=18)
    parser.add_argument("--repeats", type=int, default=300)
    args = parser.parse_args()

    rows = make_rows(args.rows, args.cols, args.nnz)
    impls = kernels.backend_impls()
    print(f"active backend: {kernels.BACKEND}")
    print(f"kernel rows: {args.rows} rows x {args.nnz} nnz, {args.repeats} queries")
    baseline = None
    for name in ("python", "cython"):
        impl = impls.get(name)
        if impl is None:
            print(f"  {name:>7}: not built")
            continue
        # warm up once, then time
        bench_rows(impl, rows, 10)
        elapsed = bench_rows(impl, rows, args.repeats)
        per_row = elapsed / args.repeats * 1e6
        rate = args.rows * args.repeats / elapsed / 1e6
        note = ""
        if name == "python":
            baseline = elapsed
        elif baseline is not None:
            note = f"  ({baseline / elapsed:.1f}x vs python)"
        print(f"  {name:>7}: {per_row:8.1f} us/row-batch  {rate:7.1f} M dots/s{note}")

    print(f"end-to-end binary SVM training (active backend = {kernels.BACKEND}):")
    print(f"  {bench_training():.2f} s")


if __name__ == "__main__":
    main()
