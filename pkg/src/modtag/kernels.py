"""Kernel functions over binary indicator vectors, with a compiled core.

The hot operation everywhere (SMO training, decoding) is "one sparse binary
vector against many": a kernel row. Rows are packed CSR-style and the dot
counts are computed either by the compiled extension (``modtag._dotcore``,
built from _dotcore.pyx) or by a pure-numpy fallback, selected at import.
``benchmarks/bench_backends.py`` compares the two.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .features import SparseVector

try:  # compiled extension is optional
    from . import _dotcore as _impl

    BACKEND = "cython"
except ImportError:  # pragma: no cover - depends on build environment
    from . import _dotcore_py as _impl

    BACKEND = "python"

from . import _dotcore_py as _fallback_impl

LINEAR = "linear"
POLYNOMIAL = "polynomial"


@dataclass(frozen=True)
class KernelParams:
    """K(x,y) = <x,y> for linear, (scale*<x,y> + offset)**degree otherwise."""

    kind: str = POLYNOMIAL
    degree: int = 2
    scale: float = 1.0
    offset: float = 1.0

    def __post_init__(self):
        if self.kind not in (LINEAR, POLYNOMIAL):
            raise ValueError(f"unknown kernel kind {self.kind!r}")
        if self.kind == POLYNOMIAL and self.degree < 1:
            raise ValueError("polynomial degree must be >= 1")

    def of_dot(self, dot):
        """Apply the kernel transform to a dot product (scalar or array)."""
        if self.kind == LINEAR:
            return dot
        return (self.scale * dot + self.offset) ** self.degree


QUADRATIC = KernelParams()


class CsrRows:
    """Packed binary rows: concatenated sorted indices plus row offsets."""

    __slots__ = ("indices", "indptr", "n_rows", "n_cols")

    def __init__(self, indices, indptr, n_cols):
        self.indices = np.ascontiguousarray(indices, dtype=np.int32)
        self.indptr = np.ascontiguousarray(indptr, dtype=np.int64)
        self.n_rows = self.indptr.size - 1
        self.n_cols = int(n_cols)

    @classmethod
    def from_vectors(cls, vectors, n_cols: int | None = None) -> "CsrRows":
        indptr = np.zeros(len(vectors) + 1, dtype=np.int64)
        chunks = []
        widest = 0
        for r, vec in enumerate(vectors):
            chunks.extend(vec.indices)
            indptr[r + 1] = indptr[r] + len(vec.indices)
            if vec.indices:
                widest = max(widest, vec.indices[-1] + 1)
        if n_cols is None:
            n_cols = widest
        elif n_cols < widest:
            raise ValueError(f"n_cols {n_cols} smaller than max index {widest - 1}")
        return cls(np.asarray(chunks, dtype=np.int32), indptr, n_cols)

    def row_nnz(self) -> np.ndarray:
        return (self.indptr[1:] - self.indptr[:-1]).astype(np.float64)

    def vector(self, r: int) -> SparseVector:
        lo, hi = self.indptr[r], self.indptr[r + 1]
        return SparseVector(tuple(int(i) for i in self.indices[lo:hi]))


class RowKernel:
    """Kernel rows of a query vector against a fixed set of packed rows."""

    __slots__ = ("rows", "params", "_mask", "_dots")

    def __init__(self, rows: CsrRows, params: KernelParams):
        self.rows = rows
        self.params = params
        self._mask = np.zeros(max(rows.n_cols, 1), dtype=np.uint8)
        self._dots = np.empty(rows.n_rows, dtype=np.float64)

    def dots(self, query_indices) -> np.ndarray:
        """Raw intersection counts against every row (fresh array)."""
        q = np.asarray(query_indices, dtype=np.int64)
        q = q[q < self._mask.size]  # columns beyond the rows' space cannot hit
        self._mask[q] = 1
        _impl.csr_mask_dots(self.rows.indices, self.rows.indptr, self._mask, self._dots)
        self._mask[q] = 0
        return self._dots.copy()

    def row(self, query_indices) -> np.ndarray:
        """Kernel values of the query against every row."""
        return self.params.of_dot(self.dots(query_indices))


def dot_product(x: SparseVector, y: SparseVector) -> float:
    """Intersection size of two binary indicator vectors."""
    if not x.indices or not y.indices:
        return 0.0
    shorter, longer = (x.indices, y.indices) if x.nnz <= y.nnz else (y.indices, x.indices)
    other = set(longer)
    return float(sum(1 for i in shorter if i in other))


def kernel_eval(x: SparseVector, y: SparseVector, params: KernelParams) -> float:
    """Single-pair kernel value."""
    return float(params.of_dot(dot_product(x, y)))


def kernel_diag(rows: CsrRows, params: KernelParams) -> np.ndarray:
    """K(x_i, x_i) for every packed row (self-dot of a binary row = nnz)."""
    return np.asarray(params.of_dot(rows.row_nnz()), dtype=np.float64)


def backend_impls() -> dict[str, object]:
    """Available backends by name (at least the pure-python one)."""
    impls = {"python": _fallback_impl}
    if BACKEND == "cython":
        impls["cython"] = _impl
    return impls
