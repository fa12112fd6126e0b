import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lutcim import _fallback, kernels
from lutcim.bitcore import UWord, add_traced

compiled = pytest.importorskip("lutcim._kernels")

arrays = st.lists(st.integers(0, (1 << 20) - 1), min_size=1, max_size=40)


@given(arrays, st.data(), st.integers(0, 8), st.integers(0, 8))
def test_ripple_add_backends_agree(a, data, sa, sb):
    b = data.draw(st.lists(st.integers(0, (1 << 20) - 1), min_size=len(a), max_size=len(a)))
    width = 30
    got_c = compiled.ripple_add(a, b, sa, sb, width)
    got_p = _fallback.ripple_add(a, b, sa, sb, width)
    np.testing.assert_array_equal(got_c[0], got_p[0])
    np.testing.assert_array_equal(got_c[1], got_p[1])
    assert got_c[2] == got_p[2] == 0
    np.testing.assert_array_equal(got_c[0], (np.array(a, dtype=np.uint64) << np.uint64(sa)) + (np.array(b, dtype=np.uint64) << np.uint64(sb)))


def test_ripple_carries_match_scalar_trace(each_backend):
    his = np.arange(46, dtype=np.uint64).repeat(46)
    los = np.tile(np.arange(46, dtype=np.uint64), 46)
    sums, carries, over = kernels.ripple_add(his, los, 2, 0, 8)
    assert over == 0
    for k in range(0, his.size, 97):
        total, trace = add_traced(UWord(6, int(his[k])), UWord(6, int(los[k])), 8, a_offset=2)
        assert int(sums[k]) == total.value
        mask = sum(s.carry << s.bit for s in trace.per_position)
        assert int(carries[k]) == mask


def test_ripple_add_counts_overflow(each_backend):
    _, _, over = kernels.ripple_add([15, 1, 8], [1, 1, 8], 0, 0, 4)
    assert over == 2


def test_gather_and_popcount(each_backend):
    entries = np.array([0, 6, 12, 18], dtype=np.uint64)
    np.testing.assert_array_equal(kernels.gather(entries, [3, 0, 2]), [18, 0, 12])
    with pytest.raises(IndexError):
        kernels.gather(entries, [4])
    assert kernels.popcount_xor_sum(0, [1, 3, 7]) == 6
    assert kernels.popcount_xor_sum(63, [0]) == 6


def test_use_backend_rejects_unknown():
    with pytest.raises(ValueError):
        kernels.use_backend("fortran")
