# cython: boundscheck=False, wraparound=False, nonecheck=False, cdivision=True
"""Compiled inner loop for the sparse binary dot-product kernel core."""


def csr_mask_dots(const int[::1] indices, const long long[::1] indptr,
                  const unsigned char[::1] mask, double[::1] out):
    """out[r] = number of row-r column indices with mask[index] set."""
    cdef Py_ssize_t n_rows = out.shape[0]
    cdef Py_ssize_t r
    cdef long long p, start, stop
    cdef double acc
    for r in range(n_rows):
        acc = 0.0
        start = indptr[r]
        stop = indptr[r + 1]
        for p in range(start, stop):
            acc += mask[indices[p]]
        out[r] = acc
