import numpy as np
import pytest

from lutcim.bitcore import FULL, HALF, PASSTHROUGH, UWord, parse_bits
from lutcim.lutmul import (
    DC2_WIRED_BIT,
    ConfigMismatch,
    MultiplierConfig,
    MultiplierKind,
    NoAdders,
    WidthMismatch,
    adder_plan,
    approx_dc2_wired_output,
    full_bank,
    lut_select,
    optimized_bank,
    product_table,
    program,
)

K = MultiplierKind


def model(kind, w, n=4, **kw):
    return program(MultiplierConfig(kind, n, n, **kw), UWord(n, w))


def test_program_optimized_bank_layout():
    m = model(K.OPTIMIZED_DC, 6)
    (bank,) = m.banks
    assert bank.cells[("zero", 0)] == 0
    assert [bank.cells[("w", i)] for i in reversed(range(4))] == [0, 1, 1, 0]
    # five MSBs of 3*6 = 010010
    assert "".join(str(bank.cells[("w3", i)]) for i in reversed(range(1, 6))) == "01001"
    assert bank.stored_cells == 10
    assert bank.inventory() == {"zero": 1, "w": 4, "w3": 5}


def test_program_traditional_table():
    m = model(K.TRADITIONAL, 6)
    assert m.table == tuple(6 * y for y in range(16))
    assert m.table[-1] == 90


def test_program_zero_weight():
    (bank,) = model(K.OPTIMIZED_DC, 0).banks
    assert set(bank.cells.values()) == {0}


def test_program_rejects_width():
    with pytest.raises(ConfigMismatch):
        program(MultiplierConfig(K.DC), UWord(5, 3))


@pytest.mark.parametrize("make", [optimized_bank, full_bank])
@pytest.mark.parametrize("n", [2, 4, 8])
def test_bank_reconstruction(make, n):
    for w in range(1 << n):
        bank = make(UWord(n, w))
        for c in range(4):
            assert lut_select(bank, UWord(2, c)) == UWord(n + 2, w * c)


def test_lut_select_examples():
    assert lut_select(optimized_bank(UWord(4, 6)), parse_bits("10")).bits() == "001100"
    assert lut_select(optimized_bank(UWord(4, 11)), parse_bits("00")).value == 0
    assert lut_select(optimized_bank(UWord(4, 15)), parse_bits("11")).bits() == "101101"
    with pytest.raises(WidthMismatch):
        lut_select(optimized_bank(UWord(4, 1)), UWord(3, 1))


def test_zmsb_maximum_is_45():
    best = max(lut_select(optimized_bank(UWord(4, w)), UWord(2, c)).value for w in range(16) for c in range(4))
    assert best == 45


def test_evaluate_examples():
    out, trace = model(K.OPTIMIZED_DC, 6).evaluate(parse_bits("1010"))
    assert out.bits() == "00111100"
    assert (trace.ha_count, trace.fa_count) == (3, 3)
    assert model(K.APPROX_DC, 15).evaluate(0b0111)[0].value == 60
    assert model(K.APPROX_DC2, 15).evaluate(0b1111)[0].value == 195
    for kind in (K.TRADITIONAL, K.DC, K.OPTIMIZED_DC, K.APPROX_DC):
        assert model(kind, 9).evaluate(0)[0].value == 0
    assert model(K.APPROX_DC2, 9).evaluate(0)[0].value == 9


def test_approx_dc_default_has_empty_trace():
    _, trace = model(K.APPROX_DC, 7).evaluate(13)
    assert trace.per_position == ()


def test_evaluate_width_mismatch():
    with pytest.raises(WidthMismatch):
        model(K.DC, 3).evaluate(UWord(6, 1))


@pytest.mark.parametrize("kind", [K.TRADITIONAL, K.DC, K.OPTIMIZED_DC])
def test_exact_kinds_exhaustive_4b(kind):
    for w in range(16):
        m = model(kind, w)
        for y in range(16):
            assert m.evaluate(y)[0].value == w * y


@pytest.mark.parametrize("kind", [K.DC, K.OPTIMIZED_DC])
def test_scalar_path_spot_checks_8b(kind):
    rng = np.random.default_rng(3)
    for w, y in rng.integers(0, 256, size=(200, 2)):
        out, trace = model(kind, int(w), 8).evaluate(int(y))
        assert out.value == w * y
        assert (trace.ha_count, trace.fa_count) == (11, 21)


@pytest.mark.parametrize("n", [6, 10, 12, 16])
def test_other_widths_sampled(n):
    rng = np.random.default_rng(n)
    ys = rng.integers(0, 1 << n, size=300, dtype=np.uint64)
    for w in rng.integers(0, 1 << n, size=5):
        for kind in (K.DC, K.OPTIMIZED_DC):
            got = model(kind, int(w), n).evaluate_many(ys).values
            np.testing.assert_array_equal(got, ys * np.uint64(w))


def test_batch_matches_scalar(each_backend):
    for kind in K:
        for w in (0, 5, 15):
            m = model(kind, w)
            batch = m.evaluate_many(np.arange(16))
            for y in range(16):
                out, trace = m.evaluate(y)
                assert int(batch.values[y]) == out.value
                for stage, masks in batch.carries.items():
                    scalar = sum(s.carry << s.bit for s in trace.stage(stage).per_position)
                    assert int(masks[y]) == scalar


def test_approx_identities():
    w = np.arange(16)[:, None]
    y = np.arange(16)[None, :]
    np.testing.assert_array_equal(product_table(K.APPROX_DC), (w * (y >> 2)) << 2)
    np.testing.assert_array_equal(product_table(K.APPROX_DC2), ((w * (y >> 2)) << 2) + w)


def test_approx_dc_fixed_zlsb():
    m = model(K.APPROX_DC, 9, fixed_zlsb=UWord(6, 5))
    out, trace = m.evaluate(0b1110)
    assert out.value == (9 * 3 << 2) + 5
    assert (trace.ha_count, trace.fa_count) == (3, 3)


def test_opt_dc_matches_dc_everywhere_8b():
    np.testing.assert_array_equal(product_table(K.DC, 8, 8), product_table(K.OPTIMIZED_DC, 8, 8))


@pytest.mark.parametrize(
    "kind,n,expected",
    [(K.OPTIMIZED_DC, 4, (3, 3)), (K.OPTIMIZED_DC, 8, (11, 21)), (K.OPTIMIZED_DC, 16, (31, 105)), (K.DC, 8, (11, 21))],
)
def test_adder_plan_counts(kind, n, expected):
    plan = adder_plan(MultiplierConfig(kind, n, n))
    assert (plan.ha_count, plan.fa_count) == expected
    assert all(s.carry is None for s in plan.per_position)


def test_adder_plan_approx_dc2():
    plan = adder_plan(MultiplierConfig(K.APPROX_DC2))
    assert (plan.ha_count, plan.fa_count) == (4, 1)
    kinds = {s.bit: s.kind for s in plan.per_position}
    assert kinds == {0: PASSTHROUGH, 1: PASSTHROUGH, 2: HALF, 3: FULL, 4: HALF, 5: HALF, 6: HALF, 7: PASSTHROUGH}


@pytest.mark.parametrize("kind", [K.TRADITIONAL, K.APPROX_DC])
def test_adder_plan_no_adders(kind):
    with pytest.raises(NoAdders):
        adder_plan(MultiplierConfig(kind))


def test_approx_dc2_wired_output_differs_only_on_carry():
    for w in range(16):
        m = model(K.APPROX_DC2, w)
        for y in range(16):
            out, trace = m.evaluate(y)
            wired = approx_dc2_wired_output(m, y).value
            carry = trace.slot(DC2_WIRED_BIT - 1).carry
            assert (wired != out.value) == bool(carry)


def test_config_validation():
    with pytest.raises(ConfigMismatch):
        MultiplierConfig(K.DC, 4, 5)
    with pytest.raises(ConfigMismatch):
        MultiplierConfig(K.APPROX_DC, 8, 8)
    with pytest.raises(ConfigMismatch):
        MultiplierConfig(K.DC, chunk_width=3)
    with pytest.raises(ConfigMismatch):
        MultiplierConfig(K.DC, fanout_sharing=0)
    with pytest.raises(ConfigMismatch):
        MultiplierConfig(K.DC, fixed_zlsb=UWord(6, 1))
    assert MultiplierConfig(K.TRADITIONAL, 3, 3).y_width == 3


def test_bank_sharing():
    assert len(model(K.OPTIMIZED_DC, 3, 8).banks) == 2
    assert len(model(K.OPTIMIZED_DC, 3, 8, fanout_sharing=1).banks) == 4
    assert len(model(K.OPTIMIZED_DC, 3, 16, fanout_sharing=3).banks) == 3


def test_kind_parse():
    assert K.parse("OPT-DC") is K.OPTIMIZED_DC
    with pytest.raises(ValueError):
        K.parse("booth")
