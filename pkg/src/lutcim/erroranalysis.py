"""Exhaustive error characterization of the approximate 4x4 multipliers.

Everything here is a full enumeration over the 64 (w, c) chunk pairs or the
256 (w, y) operand pairs; probabilities stay exact as ``Fraction``.
"""
from __future__ import annotations

import csv
import io
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import kernels
from .bitcore import UWord
from .lutmul import (
    APPROX_KINDS,
    DC2_WIRED_BIT,
    MultiplierConfig,
    MultiplierKind,
    approx_dc2_wired_output,
    program,
    product_table,
)

W_VALUES = 16
C_VALUES = 4
CHUNK_PRODUCT_BITS = 6
SUPPORT = 64

# reported in the source figure for candidate 0; the exact value is 106/384
PUBLISHED_MIN_HAMMING = 0.275


class UnsupportedKind(ValueError):
    pass


def chunk_products():
    """All 64 equiprobable 4b x 2b products, in (w, c) order."""
    return [w * c for w in range(W_VALUES) for c in range(C_VALUES)]


@dataclass(frozen=True)
class ProbDist:
    probabilities: tuple  # index = product value, Fraction each

    def __getitem__(self, v):
        return self.probabilities[v]

    @property
    def support(self):
        return tuple(range(len(self.probabilities)))


def product_distribution():
    counts = Counter(chunk_products())
    total = W_VALUES * C_VALUES
    return ProbDist(tuple(Fraction(counts.get(v, 0), total) for v in range(SUPPORT)))


def impossible_values():
    reachable = set(chunk_products())
    return [v for v in range(SUPPORT) if v not in reachable]


@dataclass(frozen=True)
class HammingRow:
    candidate: int
    total_bits: int  # summed popcount(candidate ^ p) over the 64 products
    pairs: int = W_VALUES * C_VALUES
    bits: int = CHUNK_PRODUCT_BITS

    @property
    def mean_bits(self):
        return Fraction(self.total_bits, self.pairs)

    @property
    def per_bit(self):
        return Fraction(self.total_bits, self.pairs * self.bits)


def hamming_sweep():
    products = np.array(chunk_products(), dtype=np.uint64)
    return [HammingRow(z, kernels.popcount_xor_sum(z, products)) for z in range(SUPPORT)]


def best_fixed_approximant(rows=None):
    rows = rows if rows is not None else hamming_sweep()
    return min(rows, key=lambda r: (r.per_bit, r.candidate)).candidate


@dataclass(frozen=True)
class ErrorStats:
    mean: Fraction
    mean_abs: Fraction
    max: int
    min: int
    zero_fraction: Fraction


@dataclass(frozen=True)
class ErrorReport:
    kind: MultiplierKind
    matrix: np.ndarray = field(repr=False)  # [w, y] -> exact - approximate
    histogram: dict = field(repr=False)  # error -> count
    stats: ErrorStats
    exact: bool = False


def error_matrix(kind):
    ws = np.arange(W_VALUES, dtype=np.int64)[:, None]
    ys = np.arange(W_VALUES, dtype=np.int64)[None, :]
    approx = product_table(kind).astype(np.int64)
    return ws * ys - approx


def _stats(matrix):
    flat = [int(v) for v in matrix.ravel()]
    n = len(flat)
    return ErrorStats(
        mean=Fraction(sum(flat), n),
        mean_abs=Fraction(sum(abs(v) for v in flat), n),
        max=max(flat),
        min=min(flat),
        zero_fraction=Fraction(flat.count(0), n),
    )


def error_report(kind, allow_exact=False):
    """Error matrix, histogram and summary statistics for one 4x4 variant.

    Exact variants raise ``UnsupportedKind`` unless ``allow_exact`` is set,
    in which case the all-zero report comes back with ``exact=True``.
    """
    kind = MultiplierKind.parse(kind)
    if kind not in APPROX_KINDS and not allow_exact:
        raise UnsupportedKind(f"{kind.value} is exact; pass allow_exact=True for its zero report")
    matrix = error_matrix(kind)
    hist = dict(sorted(Counter(int(v) for v in matrix.ravel()).items()))
    return ErrorReport(kind, matrix, hist, _stats(matrix), exact=kind.exact)


def approx_dc2_carry_violations():
    """(w, y) pairs where the approx-dc2 bit-6 half adder produces a carry.

    The simplified circuit wires output bit 7 straight from Z_MSB bit 5, which
    is only correct when this list is empty.
    """
    cfg = MultiplierConfig(MultiplierKind.APPROX_DC2)
    bad = []
    for w in range(W_VALUES):
        model = program(cfg, UWord(4, w))
        for y in range(W_VALUES):
            out, trace = model.evaluate(y)
            if trace.slot(DC2_WIRED_BIT - 1).carry:
                wired = approx_dc2_wired_output(model, y)
                bad.append((w, y, out.value, wired.value))
    return bad


def _fmt_fraction(f):
    return f"{f.numerator}/{f.denominator}"


def distribution_csv(dist=None):
    dist = dist or product_distribution()
    out = io.StringIO()
    wr = csv.writer(out, lineterminator="\n")
    wr.writerow(["value", "probability", "fraction"])
    for v, p in enumerate(dist.probabilities):
        wr.writerow([v, f"{float(p):.6f}", _fmt_fraction(p)])
    return out.getvalue()


def hamming_csv(rows=None):
    rows = rows if rows is not None else hamming_sweep()
    out = io.StringIO()
    wr = csv.writer(out, lineterminator="\n")
    wr.writerow(["candidate", "avg_distance", "fraction", "avg_bits_unnormalized"])
    for r in rows:
        wr.writerow([r.candidate, f"{float(r.per_bit):.6f}", _fmt_fraction(r.per_bit), f"{float(r.mean_bits):.6f}"])
    return out.getvalue()


def heatmap_csv(report):
    out = io.StringIO()
    wr = csv.writer(out, lineterminator="\n")
    for row in report.matrix:
        wr.writerow([int(v) for v in row])
    return out.getvalue()


def histogram_csv(report):
    out = io.StringIO()
    wr = csv.writer(out, lineterminator="\n")
    wr.writerow(["error", "count"])
    for err, n in report.histogram.items():
        wr.writerow([err, n])
    return out.getvalue()
