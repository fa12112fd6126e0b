# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled batch kernels; see ``lutcim._fallback`` for the reference twin."""
import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t

cnp.import_array()


def ripple_add(a, b, int a_offset, int b_offset, int width):
    """Bit-serial ripple add of ``a << a_offset`` and ``b << b_offset``.

    Returns ``(sums, carries, overflow)``; bit ``i`` of ``carries[k]`` is the
    carry-out of position ``i`` for sample ``k`` and ``overflow`` counts
    samples whose sum did not fit in ``width`` bits.
    """
    cdef const uint64_t[::1] av = np.ascontiguousarray(a, dtype=np.uint64)
    cdef const uint64_t[::1] bv = np.ascontiguousarray(b, dtype=np.uint64)
    cdef Py_ssize_t n = av.shape[0]
    if bv.shape[0] != n:
        raise ValueError("operand arrays differ in length")
    sums = np.empty(n, dtype=np.uint64)
    carries = np.empty(n, dtype=np.uint64)
    cdef uint64_t[::1] sv = sums
    cdef uint64_t[::1] cv = carries
    cdef Py_ssize_t k
    cdef int i
    cdef uint64_t x, y, s, c, cmask, t
    cdef Py_ssize_t overflow = 0
    for k in range(n):
        x = av[k] << a_offset
        y = bv[k] << b_offset
        s = 0
        c = 0
        cmask = 0
        for i in range(width):
            t = ((x >> i) & 1) + ((y >> i) & 1) + c
            s |= (t & 1) << i
            c = t >> 1
            cmask |= c << i
        if c or (width < 64 and ((x >> width) or (y >> width))):
            overflow += 1
        sv[k] = s
        cv[k] = cmask
    return sums, carries, overflow


def gather(entries, selectors):
    """Mux read: ``entries[selectors[k]]`` for every sample."""
    cdef const uint64_t[::1] ev = np.ascontiguousarray(entries, dtype=np.uint64)
    cdef const uint64_t[::1] sel = np.ascontiguousarray(selectors, dtype=np.uint64)
    cdef Py_ssize_t n = sel.shape[0]
    cdef Py_ssize_t m = ev.shape[0]
    out = np.empty(n, dtype=np.uint64)
    cdef uint64_t[::1] ov = out
    cdef Py_ssize_t k
    for k in range(n):
        if <Py_ssize_t>sel[k] >= m:
            raise IndexError("selector outside table")
        ov[k] = ev[sel[k]]
    return out


def popcount_xor_sum(uint64_t z, values):
    """Sum over samples of popcount(z ^ values[k])."""
    cdef const uint64_t[::1] vv = np.ascontiguousarray(values, dtype=np.uint64)
    cdef Py_ssize_t k
    cdef uint64_t x
    cdef long long total = 0
    for k in range(vv.shape[0]):
        x = z ^ vv[k]
        while x:
            x &= x - 1
            total += 1
    return total
