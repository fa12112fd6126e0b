"""Component counts and a weighted relative-area estimate.

Closed forms live next to ``structural_audit``, which recounts the same
quantities by walking a programmed model; the two must agree.
"""
from __future__ import annotations

import math
from dataclasses import astuple, dataclass, fields
from fractions import Fraction

from .bitcore import UWord
from .lutmul import (
    CHUNK,
    MultiplierConfig,
    MultiplierKind,
    NoAdders,
    adder_plan,
    program,
    tree_plan,
)


class UnsupportedWidth(ValueError):
    pass


@dataclass(frozen=True)
class ComponentCount:
    sram_cells: int = 0
    mux2to1_1b: int = 0
    half_adders: int = 0
    full_adders: int = 0

    def __post_init__(self):
        if min(astuple(self)) < 0:
            raise ValueError("component counts must be nonnegative")

    def dominates(self, other):
        """True if every count is >= the other's."""
        return all(a >= b for a, b in zip(astuple(self), astuple(other)))

    def as_dict(self):
        return {"sram": self.sram_cells, "mux": self.mux2to1_1b, "ha": self.half_adders, "fa": self.full_adders}


@dataclass(frozen=True)
class AreaWeights:
    """Relative cost per component, in transistor-equivalents.

    The defaults are an approximation (6T cell, 6T mux, 14T HA, 28T FA);
    override them with ``load_weights`` when a library is available.
    """

    sram_cell: Fraction = Fraction(6)
    mux2to1_1b: Fraction = Fraction(6)
    half_adder: Fraction = Fraction(14)
    full_adder: Fraction = Fraction(28)

    def __post_init__(self):
        for f in fields(self):
            v = Fraction(getattr(self, f.name))
            if v <= 0:
                raise ValueError(f"weight {f.name} must be positive, got {v}")
            object.__setattr__(self, f.name, v)


DEFAULT_WEIGHTS = AreaWeights()

_WEIGHT_KEYS = {
    "sram": "sram_cell",
    "sram_cell": "sram_cell",
    "mux": "mux2to1_1b",
    "mux2to1_1b": "mux2to1_1b",
    "ha": "half_adder",
    "half_adder": "half_adder",
    "fa": "full_adder",
    "full_adder": "full_adder",
}


def parse_weights(text):
    """Parse flat ``name=value`` lines; blank lines and ``#`` comments are skipped."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        name, sep, value = line.partition("=")
        name = name.strip().lower()
        if not sep or name not in _WEIGHT_KEYS:
            raise ValueError(f"line {lineno}: expected <component>=<number>, got {raw!r}")
        try:
            values[_WEIGHT_KEYS[name]] = Fraction(value.strip())
        except ValueError:
            raise ValueError(f"line {lineno}: bad number {value.strip()!r}") from None
    return AreaWeights(**values)


def load_weights(path):
    with open(path) as fh:
        return parse_weights(fh.read())


def weighted_area(c, w=DEFAULT_WEIGHTS):
    return (
        c.sram_cells * w.sram_cell
        + c.mux2to1_1b * w.mux2to1_1b
        + c.half_adders * w.half_adder
        + c.full_adders * w.full_adder
    )


def count_traditional(n):
    if not 2 <= n <= 16:
        raise UnsupportedWidth(f"traditional LUT counts cover 2..16 bits, got {n}")
    return ComponentCount((2**n) * 2 * n, (2**n - 1) * 2 * n)


def _check_chunked(n):
    if n < 4 or n % CHUNK or n > 32:
        raise UnsupportedWidth(f"D&C needs an even width >= 4, got {n}")


def _dc_adders(n):
    plan = tree_plan(n, n // CHUNK)
    return plan.ha_count, plan.fa_count


def count_optimized_dc(n, fanout_sharing=2):
    _check_chunked(n)
    chunks = n // CHUNK
    banks = math.ceil(chunks / fanout_sharing)
    ha, fa = _dc_adders(n)
    return ComponentCount((2 * n + 2) * banks, chunks * 3 * (n + 2), ha, fa)


def count_dc(n, fanout_sharing=2):
    """Unoptimized D&C; tabulated only at 4 bits, wider rows are extrapolated."""
    _check_chunked(n)
    chunks = n // CHUNK
    banks = math.ceil(chunks / fanout_sharing)
    opt = count_optimized_dc(n, fanout_sharing)
    return ComponentCount(4 * (n + 2) * banks, opt.mux2to1_1b, opt.half_adders, opt.full_adders)


def count_approx_dc(fixed_zlsb=None):
    if fixed_zlsb is not None and fixed_zlsb.width != 6:
        raise UnsupportedWidth("approx-dc is defined for the 4x4 configuration only")
    if fixed_zlsb is None or fixed_zlsb.value == 0:
        return ComponentCount(10, 18, 0, 0)
    return ComponentCount(12, 18, 3, 3)


def count_approx_dc2():
    return ComponentCount(12, 18, 4, 1)


def closed_form(config):
    kind = config.kind
    if kind is MultiplierKind.TRADITIONAL:
        if config.w_width != config.y_width:
            raise UnsupportedWidth("closed forms assume square multipliers")
        return count_traditional(config.y_width)
    if kind is MultiplierKind.APPROX_DC:
        return count_approx_dc(config.zlsb)
    if kind is MultiplierKind.APPROX_DC2:
        return count_approx_dc2()
    if config.w_width != config.y_width:
        raise UnsupportedWidth("closed forms assume square multipliers")
    count = count_optimized_dc if kind is MultiplierKind.OPTIMIZED_DC else count_dc
    return count(config.y_width, config.fanout_sharing)


def count(kind, n=4, fanout_sharing=2, fixed_zlsb=None):
    kind = MultiplierKind.parse(kind)
    if not kind.exact and n != 4:
        raise UnsupportedWidth(f"{kind.value} is defined for 4 bits only")
    return closed_form(MultiplierConfig(kind, n, n, fanout_sharing=fanout_sharing, fixed_zlsb=fixed_zlsb))


def structural_audit(model):
    """Count components by walking a programmed model."""
    cfg = model.config
    if cfg.kind is MultiplierKind.TRADITIONAL:
        entries = len(model.table)
        return ComponentCount(entries * cfg.out_width, (entries - 1) * cfg.out_width)
    cells = sum(b.stored_cells for b in model.banks) + len(model.fixed_cells)
    # one 4:1 mux (three 2:1 stages) per bank-reading chunk
    reading_chunks = cfg.chunks if cfg.kind.exact else 1
    mux = reading_chunks * 3 * cfg.entry_width
    try:
        plan = adder_plan(cfg)
    except NoAdders:
        ha = fa = 0
    else:
        ha, fa = plan.ha_count, plan.fa_count
    return ComponentCount(cells, mux, ha, fa)


def audit_config(config, w=0):
    return structural_audit(program(config, UWord(config.w_width, w)))


ALL_KINDS_4B = (
    MultiplierKind.TRADITIONAL,
    MultiplierKind.DC,
    MultiplierKind.OPTIMIZED_DC,
    MultiplierKind.APPROX_DC2,
    MultiplierKind.APPROX_DC,
)
