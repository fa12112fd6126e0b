"""Fixed-width unsigned words and the exact-arithmetic reference.

Bit 0 is the LSB everywhere. Every word carries its width explicitly so that
slicing, shifting and adder allocation can be audited against hardware counts.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

MAX_WIDTH = 64

PASSTHROUGH = "passthrough"
HALF = "half"
FULL = "full"


class BitcoreError(ValueError):
    pass


class OverflowValue(BitcoreError):
    pass


class BadRange(BitcoreError):
    pass


class SumOverflow(BitcoreError):
    pass


def bitmask(n):
    return (1 << n) - 1


@dataclass(frozen=True)
class UWord:
    width: int
    value: int

    def __post_init__(self):
        if not isinstance(self.width, int) or not 1 <= self.width <= MAX_WIDTH:
            raise BadRange(f"width must be in 1..{MAX_WIDTH}, got {self.width!r}")
        if self.value < 0 or self.value >> self.width:
            raise OverflowValue(f"{self.value} does not fit in {self.width} bits")

    def bit(self, i):
        return (self.value >> i) & 1

    def bits(self):
        """MSB-first binary string, zero padded to the word width."""
        return format(self.value, f"0{self.width}b")

    def __int__(self):
        return self.value

    def __index__(self):
        return self.value

    def __str__(self):
        return self.bits()


def make_uword(width, value):
    return UWord(width, value)


def parse_bits(text):
    """Build a word from an MSB-first binary string such as ``"0110"``."""
    if not text or set(text) - {"0", "1"}:
        raise BadRange(f"not a binary string: {text!r}")
    return UWord(len(text), int(text, 2))


def slice(x, lo, hi):  # noqa: A001 - mirrors the hardware term
    if not 0 <= lo <= hi < x.width:
        raise BadRange(f"slice [{lo}, {hi}] outside word of width {x.width}")
    return UWord(hi - lo + 1, (x.value >> lo) & bitmask(hi - lo + 1))


def shl(x, k):
    if k < 0:
        raise BadRange("shift amount must be nonnegative")
    return UWord(x.width + k, x.value << k)


def concat(hi, lo):
    return UWord(hi.width + lo.width, (hi.value << lo.width) | lo.value)


def exact_mul(w, y):
    return UWord(w.width + y.width, w.value * y.value)


def popcount(x):
    return int(x).bit_count()


def hamming(x, y):
    if x.width != y.width:
        raise BadRange("hamming distance needs equal widths")
    return popcount(UWord(x.width, x.value ^ y.value))


class BitSlot(NamedTuple):
    bit: int
    kind: str
    carry: int | None = None  # observed carry-out; None for static plans
    stage: int = 0  # which adder in a multi-adder structure


@dataclass(frozen=True)
class AdderTrace:
    per_position: tuple = ()

    @property
    def ha_count(self):
        return sum(1 for s in self.per_position if s.kind == HALF)

    @property
    def fa_count(self):
        return sum(1 for s in self.per_position if s.kind == FULL)

    def stage(self, k):
        return AdderTrace(tuple(s for s in self.per_position if s.stage == k))

    def slot(self, bit, stage=0):
        for s in self.per_position:
            if s.bit == bit and s.stage == stage:
                return s
        raise KeyError((bit, stage))

    def static(self):
        return AdderTrace(tuple(s._replace(carry=None) for s in self.per_position))

    def __add__(self, other):
        return AdderTrace(self.per_position + other.per_position)


def plan_adder(a_width, b_width, result_width, a_offset=0, b_offset=0, stage=0):
    """Static HA/FA allocation for adding two words placed at bit offsets.

    A position gets a half adder when two of {a bit, b bit, incoming carry}
    can be nonzero and a full adder when all three can; anything else is a
    plain wire. The incoming carry is possible only above a half/full cell.
    """
    slots = []
    carry_possible = False
    for i in range(result_width):
        live = (a_offset <= i < a_offset + a_width) + (b_offset <= i < b_offset + b_width)
        live += carry_possible
        kind = FULL if live == 3 else HALF if live == 2 else PASSTHROUGH
        slots.append(BitSlot(i, kind, None, stage))
        carry_possible = live >= 2
    return AdderTrace(tuple(slots))


def add_traced(a, b, result_width, a_offset=0, b_offset=0, stage=0):
    """Ripple-add ``a << a_offset`` and ``b << b_offset`` one bit at a time.

    Returns the sum as a ``result_width`` word and the trace of which cell
    type sits at each position together with the carry each cell produced.
    """
    top = max(a.width + a_offset, b.width + b_offset)
    if top > result_width:
        # operand bits above the result width are fine only while they are zero
        hi_a = a.value << a_offset >> result_width
        hi_b = b.value << b_offset >> result_width
        if hi_a or hi_b:
            raise SumOverflow("operand does not fit the result width")
    if (a.value << a_offset) + (b.value << b_offset) >> result_width:
        raise SumOverflow(
            f"{a.value << a_offset} + {b.value << b_offset} needs more than {result_width} bits"
        )
    plan = plan_adder(a.width, b.width, result_width, a_offset, b_offset, stage)
    av = a.value << a_offset
    bv = b.value << b_offset
    total = 0
    carry = 0
    slots = []
    for slot in plan.per_position:
        i = slot.bit
        s = ((av >> i) & 1) + ((bv >> i) & 1) + carry
        total |= (s & 1) << i
        carry = s >> 1
        slots.append(slot._replace(carry=carry))
    return UWord(result_width, total), AdderTrace(tuple(slots))
