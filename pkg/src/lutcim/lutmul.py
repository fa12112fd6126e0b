"""Structural models of the LUT multipliers.

Five variants share one skeleton: the weight is programmed into lookup banks,
each 2-bit chunk of the input drives a 4:1 mux over a bank, and the chunk
products are summed by an adder tree. Evaluation goes through the bank wiring
and the traced ripple adders, never through ``w * y`` directly.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import kernels
from .bitcore import (
    FULL,
    HALF,
    PASSTHROUGH,
    AdderTrace,
    BitSlot,
    UWord,
    add_traced,
    bitmask,
    plan_adder,
)

CHUNK = 2


class ModelError(ValueError):
    pass


class ConfigMismatch(ModelError):
    pass


class WidthMismatch(ModelError):
    pass


class NoAdders(ModelError):
    pass


class MultiplierKind(enum.Enum):
    TRADITIONAL = "traditional"
    DC = "dc"
    OPTIMIZED_DC = "opt-dc"
    APPROX_DC = "approx-dc"
    APPROX_DC2 = "approx-dc2"

    @classmethod
    def parse(cls, text):
        if isinstance(text, cls):
            return text
        try:
            return cls(text.lower())
        except ValueError:
            names = ", ".join(k.value for k in cls)
            raise ValueError(f"unknown multiplier kind {text!r} (choose from {names})") from None

    @property
    def exact(self):
        return self not in (MultiplierKind.APPROX_DC, MultiplierKind.APPROX_DC2)

    @property
    def chunked(self):
        return self is not MultiplierKind.TRADITIONAL


EXACT_KINDS = tuple(k for k in MultiplierKind if k.exact)
APPROX_KINDS = (MultiplierKind.APPROX_DC, MultiplierKind.APPROX_DC2)


@dataclass(frozen=True)
class MultiplierConfig:
    kind: MultiplierKind
    w_width: int = 4
    y_width: int = 4
    chunk_width: int = CHUNK
    fanout_sharing: int = 2
    fixed_zlsb: UWord | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", MultiplierKind.parse(self.kind))
        if self.chunk_width != CHUNK:
            raise ConfigMismatch("only 2-bit chunks are supported")
        if self.w_width < 1 or self.y_width < 1:
            raise ConfigMismatch("operand widths must be positive")
        if self.w_width + self.y_width > 64:
            raise ConfigMismatch("product wider than 64 bits")
        if self.fanout_sharing < 1:
            raise ConfigMismatch("fanout_sharing must be a positive integer")
        if self.kind.chunked and self.y_width % self.chunk_width:
            raise ConfigMismatch(f"y_width {self.y_width} not divisible by {self.chunk_width}")
        if not self.kind.exact and (self.w_width, self.y_width) != (4, 4):
            raise ConfigMismatch(f"{self.kind.value} is defined for 4x4 only")
        if self.fixed_zlsb is not None:
            if self.kind is not MultiplierKind.APPROX_DC:
                raise ConfigMismatch("fixed_zlsb applies to approx-dc only")
            if self.fixed_zlsb.width != self.w_width + CHUNK:
                raise ConfigMismatch("fixed_zlsb must be as wide as a chunk product")

    @property
    def chunks(self):
        return self.y_width // self.chunk_width

    @property
    def entry_width(self):
        return self.w_width + self.chunk_width

    @property
    def out_width(self):
        return self.w_width + self.y_width

    @property
    def zlsb(self):
        """Fixed LSB-side product for approx-dc (zero when unset)."""
        if self.fixed_zlsb is None:
            return UWord(self.entry_width, 0)
        return self.fixed_zlsb

    @property
    def banks_needed(self):
        if self.kind is MultiplierKind.TRADITIONAL:
            return 1
        if not self.kind.exact:
            return 1  # only the MSB-side chunk reads a bank
        return math.ceil(self.chunks / self.fanout_sharing)


# Cell names inside a bank: "zero" holds the shared 0, "w" the weight bits,
# "w3" the upper bits of 3*w, "e<c>" full entries in the unoptimized layout.
Cell = tuple  # (group, index)


@dataclass(frozen=True)
class LutBank:
    w: UWord
    cells: dict = field(repr=False)
    entry_wiring: tuple = field(repr=False)  # entry_wiring[c][bit] -> Cell
    optimized: bool = True

    @property
    def stored_cells(self):
        return len(self.cells)

    def inventory(self):
        groups = {}
        for group, _ in self.cells:
            groups[group] = groups.get(group, 0) + 1
        return groups

    def read(self, c):
        value = 0
        for bit, cell in enumerate(self.entry_wiring[c]):
            value |= self.cells[cell] << bit
        return value

    @cached_property
    def entries(self):
        return tuple(self.read(c) for c in range(4))


def optimized_bank(w):
    """Bank storing 2*n + 2 cells: a zero, the weight, and the n+1 MSBs of 3w."""
    n = w.width
    w3 = 3 * w.value
    cells = {("zero", 0): 0}
    for i in range(n):
        cells[("w", i)] = w.bit(i)
    for i in range(1, n + 2):
        cells[("w3", i)] = (w3 >> i) & 1
    z = ("zero", 0)
    width = n + 2
    e0 = tuple(z for _ in range(width))
    e1 = tuple(("w", i) if i < n else z for i in range(width))
    e2 = tuple(("w", i - 1) if 1 <= i <= n else z for i in range(width))
    # 3w and w share their LSB
    e3 = tuple(("w", 0) if i == 0 else ("w3", i) for i in range(width))
    return LutBank(w, cells, (e0, e1, e2, e3), optimized=True)


def full_bank(w):
    """Unoptimized bank: all four (n+2)-bit products stored cell by cell."""
    width = w.width + 2
    cells = {}
    wiring = []
    for c in range(4):
        prod = w.value * c
        for i in range(width):
            cells[(f"e{c}", i)] = (prod >> i) & 1
        wiring.append(tuple((f"e{c}", i) for i in range(width)))
    return LutBank(w, cells, tuple(wiring), optimized=False)


def lut_select(bank, selector):
    if selector.width != CHUNK:
        raise WidthMismatch("bank selector must be 2 bits")
    return UWord(bank.w.width + CHUNK, bank.read(selector.value))


@dataclass(frozen=True)
class TreeNode:
    """One adder of the reduction tree: left + (right << shift)."""
    lo: int  # first chunk covered
    hi: int  # one past the last chunk covered
    shift: int
    width: int
    left: object
    right: object
    stage: int


def node_width(w_width, n_chunks):
    max_value = bitmask(w_width) * bitmask(CHUNK * n_chunks)
    return max(1, max_value.bit_length())


def build_tree(w_width, chunks):
    """Balanced pairwise reduction of chunk products, LSB chunk first.

    Leaves are chunk indices; each level pairs neighbours and an odd leftover
    moves up unchanged. Node widths fit the largest reachable partial sum.
    """
    level = [(i, i + 1, i) for i in range(chunks)]  # (lo, hi, subtree)
    stage = 0
    while len(level) > 1:
        nxt = []
        for j in range(0, len(level) - 1, 2):
            (lo, mid, left), (_, hi, right) = level[j], level[j + 1]
            node = TreeNode(lo, hi, CHUNK * (mid - lo), node_width(w_width, hi - lo), left, right, stage)
            stage += 1
            nxt.append((lo, hi, node))
        if len(level) % 2:
            nxt.append(level[-1])
        level = nxt
    return level[0][2] if level else None


def _subtree_width(sub, w_width):
    return sub.width if isinstance(sub, TreeNode) else w_width + CHUNK


def _walk(node):
    if isinstance(node, TreeNode):
        yield from _walk(node.left)
        yield from _walk(node.right)
        yield node


def tree_plan(w_width, chunks):
    root = build_tree(w_width, chunks)
    trace = AdderTrace()
    for node in _walk(root):
        trace = trace + plan_adder(
            _subtree_width(node.left, w_width),
            _subtree_width(node.right, w_width),
            node.width,
            0,
            node.shift,
            node.stage,
        )
    return trace


# approx-dc2 adder: Z_MSB << 2 plus W, with output bit 7 wired from Z_MSB bit 5.
DC2_WIRED_BIT = 7


def approx_dc2_plan():
    """The 4 HA / 1 FA allocation with the top output taken straight from Z_MSB.

    Dropping the top half adder is sound only if the carry out of bit 6 is
    always zero; ``approx_dc2_carry_violations`` checks that premise.
    """
    full = plan_adder(4, 6, 8, 0, CHUNK)
    slots = tuple(
        s._replace(kind=PASSTHROUGH) if s.bit == DC2_WIRED_BIT else s for s in full.per_position
    )
    return AdderTrace(slots)


def approx_dc_plan(config):
    if config.zlsb.value == 0:
        raise NoAdders("approx-dc with a zero Z_LSB needs no adders")
    return plan_adder(config.entry_width, config.entry_width, config.out_width, 0, CHUNK)


def adder_plan(config):
    if config.kind is MultiplierKind.TRADITIONAL:
        raise NoAdders("the traditional LUT multiplier has no adders")
    if config.kind is MultiplierKind.APPROX_DC:
        return approx_dc_plan(config)
    if config.kind is MultiplierKind.APPROX_DC2:
        return approx_dc2_plan()
    return tree_plan(config.w_width, config.chunks)


@dataclass(frozen=True)
class MultiplierModel:
    config: MultiplierConfig
    programmed_w: UWord
    banks: tuple = ()
    table: tuple | None = field(default=None, repr=False)
    fixed_cells: dict = field(default_factory=dict, repr=False)

    @property
    def kind(self):
        return self.config.kind

    def bank_for_chunk(self, i):
        return self.banks[i // self.config.fanout_sharing]

    @cached_property
    def tree(self):
        return build_tree(self.config.w_width, self.config.chunks)

    def evaluate(self, y):
        return evaluate(self, y)

    def evaluate_many(self, ys):
        return evaluate_many(self, ys)


def program(config, w):
    if isinstance(w, int):
        w = UWord(config.w_width, w)
    if w.width != config.w_width:
        raise ConfigMismatch(f"weight is {w.width} bits, config expects {config.w_width}")
    kind = config.kind
    if kind is MultiplierKind.TRADITIONAL:
        table = tuple(w.value * y for y in range(1 << config.y_width))
        return MultiplierModel(config, w, table=table)
    make = full_bank if kind is MultiplierKind.DC else optimized_bank
    banks = tuple(make(w) for _ in range(config.banks_needed))
    fixed = {}
    if kind is MultiplierKind.APPROX_DC and config.zlsb.value:
        # a 0 cell and a 1 cell drive the constant Z_LSB wires
        fixed = {("const", 0): 0, ("const", 1): 1}
    elif kind is MultiplierKind.APPROX_DC2:
        fixed = {("const", 0): 0, ("const", 1): 1}
    return MultiplierModel(config, w, banks, fixed_cells=fixed)


def _check_y(model, y):
    if isinstance(y, int):
        y = UWord(model.config.y_width, y)
    if y.width != model.config.y_width:
        raise WidthMismatch(f"input is {y.width} bits, model expects {model.config.y_width}")
    return y


def _chunk_selector(y, i):
    return UWord(CHUNK, (y.value >> (CHUNK * i)) & 3)


def _reduce(model, node, products):
    """Evaluate a tree node; returns (UWord, AdderTrace)."""
    if not isinstance(node, TreeNode):
        return products[node], AdderTrace()
    left, lt = _reduce(model, node.left, products)
    right, rt = _reduce(model, node.right, products)
    total, trace = add_traced(left, right, node.width, 0, node.shift, node.stage)
    return total, lt + rt + trace


def evaluate(model, y):
    """Route one input through the model; returns ``(product, trace)``."""
    y = _check_y(model, y)
    cfg = model.config
    kind = cfg.kind
    if kind is MultiplierKind.TRADITIONAL:
        return UWord(cfg.out_width, model.table[y.value]), AdderTrace()
    if kind in (MultiplierKind.DC, MultiplierKind.OPTIMIZED_DC):
        products = [lut_select(model.bank_for_chunk(i), _chunk_selector(y, i)) for i in range(cfg.chunks)]
        total, trace = _reduce(model, model.tree, products)
        return UWord(cfg.out_width, total.value), trace
    z_msb = lut_select(model.banks[0], _chunk_selector(y, 1))
    if kind is MultiplierKind.APPROX_DC:
        if cfg.zlsb.value == 0:
            return UWord(cfg.out_width, z_msb.value << CHUNK), AdderTrace()
        return add_traced(cfg.zlsb, z_msb, cfg.out_width, 0, CHUNK)
    # approx-dc2: Z_LSB is W on its four low wires, zeros above
    return add_traced(model.programmed_w, z_msb, cfg.out_width, 0, CHUNK)


def approx_dc2_wired_output(model, y):
    """Output of the simplified approx-dc2 circuit with bit 7 wired from Z_MSB bit 5.

    Differs from ``evaluate`` exactly when the carry out of bit 6 is set.
    """
    if model.kind is not MultiplierKind.APPROX_DC2:
        raise ConfigMismatch("wired output is defined for approx-dc2 only")
    y = _check_y(model, y)
    z_msb = lut_select(model.banks[0], _chunk_selector(y, 1))
    total, _ = add_traced(model.programmed_w, z_msb, model.config.out_width, 0, CHUNK)
    low = total.value & bitmask(DC2_WIRED_BIT)
    return UWord(model.config.out_width, low | (z_msb.bit(5) << DC2_WIRED_BIT))


@dataclass(frozen=True)
class BatchResult:
    values: np.ndarray
    carries: dict  # stage -> uint64 array of per-position carry-out masks


def evaluate_many(model, ys):
    """Vectorized ``evaluate`` over an array of inputs using the batch kernels."""
    ys = np.asarray(ys, dtype=np.uint64)
    cfg = model.config
    if ys.size and int(ys.max()) >> cfg.y_width:
        raise WidthMismatch(f"inputs exceed {cfg.y_width} bits")
    kind = cfg.kind
    if kind is MultiplierKind.TRADITIONAL:
        return BatchResult(kernels.gather(np.array(model.table, dtype=np.uint64), ys), {})

    def select(i):
        bank = model.bank_for_chunk(i)
        sel = (ys >> np.uint64(CHUNK * i)) & np.uint64(3)
        return kernels.gather(np.array(bank.entries, dtype=np.uint64), sel)

    carries = {}

    def add(a, b, b_shift, width, stage):
        s, c, over = kernels.ripple_add(a, b, 0, b_shift, width)
        if over:
            raise AssertionError(f"adder stage {stage} overflowed {width} bits")
        carries[stage] = c
        return s

    if kind in (MultiplierKind.DC, MultiplierKind.OPTIMIZED_DC):
        products = [select(i) for i in range(cfg.chunks)]

        def reduce(node):
            if not isinstance(node, TreeNode):
                return products[node]
            return add(reduce(node.left), reduce(node.right), node.shift, node.width, node.stage)

        return BatchResult(reduce(model.tree), carries)
    z_msb = select(1)
    if kind is MultiplierKind.APPROX_DC:
        if cfg.zlsb.value == 0:
            return BatchResult(z_msb << np.uint64(CHUNK), {})
        zl = np.full_like(z_msb, cfg.zlsb.value)
        return BatchResult(add(zl, z_msb, CHUNK, cfg.out_width, 0), carries)
    wv = np.full_like(z_msb, model.programmed_w.value)
    return BatchResult(add(wv, z_msb, CHUNK, cfg.out_width, 0), carries)


def product_table(kind, w_width=4, y_width=4, **config_kw):
    """Structural product for every (w, y) pair as a 2-D uint64 array."""
    cfg = MultiplierConfig(MultiplierKind.parse(kind), w_width, y_width, **config_kw)
    ys = np.arange(1 << y_width, dtype=np.uint64)
    rows = [program(cfg, UWord(w_width, w)).evaluate_many(ys).values for w in range(1 << w_width)]
    return np.stack(rows)


__all__ = [
    "FULL",
    "HALF",
    "PASSTHROUGH",
    "BitSlot",
    "MultiplierKind",
    "MultiplierConfig",
    "LutBank",
    "MultiplierModel",
    "program",
    "lut_select",
    "evaluate",
    "evaluate_many",
    "adder_plan",
    "product_table",
]
