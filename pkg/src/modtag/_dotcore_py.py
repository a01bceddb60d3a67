"""Pure-numpy fallback for the sparse binary dot-product kernel core."""

import numpy as np


def csr_mask_dots(indices, indptr, mask, out):
    """out[r] = number of row-r column indices with mask[index] set.

    ``indices``/``indptr`` describe packed binary rows; ``mask`` is a uint8
    indicator over columns. Counts are exact (integers in float64).
    """
    if indices.size == 0:
        out[:] = 0.0
        return
    hits = mask[indices].astype(np.float64)
    cumulative = np.empty(hits.size + 1, dtype=np.float64)
    cumulative[0] = 0.0
    np.cumsum(hits, out=cumulative[1:])
    np.subtract(cumulative[indptr[1:]], cumulative[indptr[:-1]], out=out)
