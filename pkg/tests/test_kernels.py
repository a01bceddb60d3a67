import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from modtag import kernels
from modtag.features import SparseVector
from modtag.kernels import (
    BACKEND,
    CsrRows,
    KernelParams,
    RowKernel,
    backend_impls,
    dot_product,
    kernel_diag,
    kernel_eval,
)
from modtag.oracle import explicit_feature_map

QUAD = KernelParams()
LIN = KernelParams(kind="linear")


def rand_vec(rng, n_cols=15, max_nnz=6):
    nnz = rng.randint(0, max_nnz)
    return SparseVector.from_indices(rng.sample(range(n_cols), nnz))


class TestKernelEval:
    def test_disjoint_quadratic(self):
        assert kernel_eval(SparseVector((0, 1)), SparseVector((2, 3)), QUAD) == 1.0

    def test_self_two_indicators(self):
        v = SparseVector((4, 9))
        assert kernel_eval(v, v, QUAD) == 9.0

    def test_linear_dot(self):
        assert kernel_eval(SparseVector((0, 1, 5)), SparseVector((1, 5, 7)), LIN) == 2.0

    def test_matches_explicit_map_on_random_pairs(self):
        # independent route: dense degree-2 map inner product
        rng = random.Random(13)
        for _ in range(20):
            x, y = rand_vec(rng), rand_vec(rng)
            phi = explicit_feature_map([x, y], 15, QUAD)
            expected = float(phi[0] @ phi[1])
            assert abs(kernel_eval(x, y, QUAD) - expected) < 1e-9

    def test_explicit_map_with_nonunit_params(self):
        params = KernelParams(scale=0.5, offset=2.0)
        rng = random.Random(3)
        for _ in range(10):
            x, y = rand_vec(rng), rand_vec(rng)
            phi = explicit_feature_map([x, y], 15, params)
            assert abs(kernel_eval(x, y, params) - float(phi[0] @ phi[1])) < 1e-9

    @settings(max_examples=60, deadline=None)
    @given(st.data())
    def test_symmetry_and_floor(self, data):
        idx = st.lists(st.integers(0, 30), max_size=8)
        x = SparseVector.from_indices(data.draw(idx))
        y = SparseVector.from_indices(data.draw(idx))
        assert kernel_eval(x, y, QUAD) == kernel_eval(y, x, QUAD)
        assert kernel_eval(x, x, QUAD) >= QUAD.offset ** QUAD.degree

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError):
            KernelParams(kind="rbf")


class TestCsrRows:
    def test_pack_and_unpack(self):
        vectors = [SparseVector((0, 3)), SparseVector(()), SparseVector((2,))]
        rows = CsrRows.from_vectors(vectors)
        assert rows.n_rows == 3
        assert rows.n_cols == 4
        assert [rows.vector(i) for i in range(3)] == vectors
        assert list(rows.row_nnz()) == [2.0, 0.0, 1.0]

    def test_n_cols_override_validated(self):
        with pytest.raises(ValueError):
            CsrRows.from_vectors([SparseVector((5,))], n_cols=3)

    def test_diag(self):
        rows = CsrRows.from_vectors([SparseVector((0, 1)), SparseVector(())])
        assert list(kernel_diag(rows, QUAD)) == [9.0, 1.0]


class TestRowKernel:
    def test_row_matches_pairwise_eval(self):
        rng = random.Random(5)
        vectors = [rand_vec(rng) for _ in range(40)]
        rows = CsrRows.from_vectors(vectors, n_cols=15)
        row_kernel = RowKernel(rows, QUAD)
        query = rand_vec(rng)
        got = row_kernel.row(query.indices)
        want = [kernel_eval(v, query, QUAD) for v in vectors]
        assert np.allclose(got, want)

    def test_query_indices_beyond_columns_ignored(self):
        rows = CsrRows.from_vectors([SparseVector((0, 1))])
        row_kernel = RowKernel(rows, LIN)
        assert row_kernel.row((0, 99))[0] == 1.0

    def test_mask_reset_between_calls(self):
        rows = CsrRows.from_vectors([SparseVector((0, 1, 2))])
        row_kernel = RowKernel(rows, LIN)
        assert row_kernel.row((0, 1))[0] == 2.0
        assert row_kernel.row((2,))[0] == 1.0


class TestBackends:
    def test_python_backend_always_available(self):
        assert "python" in backend_impls()

    @pytest.mark.skipif(BACKEND != "cython", reason="compiled extension not built")
    def test_backend_parity(self):
        impls = backend_impls()
        rng = random.Random(11)
        vectors = [rand_vec(rng, n_cols=50, max_nnz=12) for _ in range(200)]
        rows = CsrRows.from_vectors(vectors, n_cols=50)
        mask = np.zeros(50, dtype=np.uint8)
        for trial in range(20):
            query = np.asarray(rng.sample(range(50), rng.randint(0, 12)), dtype=np.int64)
            outs = {}
            for name, impl in impls.items():
                mask[query] = 1
                out = np.empty(rows.n_rows)
                impl.csr_mask_dots(rows.indices, rows.indptr, mask, out)
                mask[query] = 0
                outs[name] = out
            assert np.array_equal(outs["python"], outs["cython"])

    def test_empty_rows_zero_dots(self):
        rows = CsrRows.from_vectors([SparseVector(()), SparseVector(())], n_cols=4)
        mask = np.zeros(4, dtype=np.uint8)
        mask[1] = 1
        for impl in backend_impls().values():
            out = np.empty(2)
            impl.csr_mask_dots(rows.indices, rows.indptr, mask, out)
            assert list(out) == [0.0, 0.0]

    def test_dot_product_symmetric_and_counts(self):
        assert dot_product(SparseVector((1, 2, 3)), SparseVector((2, 3, 9))) == 2.0
        assert dot_product(SparseVector(()), SparseVector((1,))) == 0.0

    def test_active_backend_reported(self):
        assert kernels.BACKEND in ("cython", "python")
