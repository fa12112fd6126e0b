"""Numpy implementations of the batch kernels.

Same signatures and results as the compiled ``_kernels`` module; used when the
extension is not built or when a caller asks for it explicitly.
"""
import numpy as np

U64 = np.uint64
ONE = U64(1)


def ripple_add(a, b, a_offset, b_offset, width):
    x = np.asarray(a, dtype=U64) << U64(a_offset)
    y = np.asarray(b, dtype=U64) << U64(b_offset)
    if x.shape != y.shape:
        raise ValueError("operand arrays differ in length")
    sums = np.zeros_like(x)
    carries = np.zeros_like(x)
    c = np.zeros_like(x)
    for i in range(width):
        sh = U64(i)
        t = ((x >> sh) & ONE) + ((y >> sh) & ONE) + c
        sums |= (t & ONE) << sh
        c = t >> ONE
        carries |= c << sh
    over = c != 0
    if width < 64:
        over |= ((x >> U64(width)) | (y >> U64(width))) != 0
    return sums, carries, int(over.sum())


def gather(entries, selectors):
    entries = np.asarray(entries, dtype=U64)
    sel = np.asarray(selectors, dtype=U64)
    if sel.size and int(sel.max()) >= entries.shape[0]:
        raise IndexError("selector outside table")
    return entries[sel.astype(np.intp)]


def popcount_xor_sum(z, values):
    x = np.asarray(values, dtype=U64) ^ U64(z)
    return int(np.bitwise_count(x).sum())
