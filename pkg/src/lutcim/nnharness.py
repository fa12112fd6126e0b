"""Integer-only MLP inference with a pluggable 4x4 multiplier.

Every weight-activation product goes through the chosen multiplier model;
accumulation, rectification and requantization are exact integer ops.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .lutmul import MultiplierKind, product_table

LEVELS = 16
MAX_Q = LEVELS - 1
DEFAULT_DIMS = (4, 8, 2)
DEFAULT_TRIALS = 100


class DimMismatch(ValueError):
    pass


def quantize(x, levels=LEVELS):
    """Map a real vector onto 0..levels-1 over its own [min, max] range.

    Rounds half up; a constant vector maps to all zeros.
    """
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("quantize needs finite inputs")
    lo, hi = float(x.min()), float(x.max())
    if hi == lo:
        return np.zeros(x.shape, dtype=np.int64)
    scaled = (x - lo) / (hi - lo) * (levels - 1)
    return np.floor(scaled + 0.5).astype(np.int64)


@lru_cache(maxsize=None)
def _products(kind):
    # structural evaluation of all 256 pairs, indexed [w, y]
    table = product_table(kind).astype(np.int64)
    table.flags.writeable = False
    return table


@dataclass(frozen=True)
class QuantizedMLP:
    weights: tuple  # per layer, int64 array of shape (out, in), entries 0..15
    biases: tuple  # per layer, int64 vector
    shifts: tuple  # per hidden layer, right shift applied before clamping to 4 bits

    def __post_init__(self):
        if len(self.weights) != len(self.biases) or len(self.shifts) != len(self.weights) - 1:
            raise DimMismatch("need one bias per layer and one shift per hidden layer")
        prev = None
        for w, b in zip(self.weights, self.biases):
            if w.min() < 0 or w.max() > MAX_Q:
                raise ValueError("weights must be 4-bit unsigned")
            if b.shape != (w.shape[0],):
                raise DimMismatch("bias length must match layer outputs")
            if prev is not None and w.shape[1] != prev:
                raise DimMismatch("layer input width does not match previous output")
            prev = w.shape[0]

    @property
    def dims(self):
        return (self.weights[0].shape[1],) + tuple(w.shape[0] for w in self.weights)

    @classmethod
    def random(cls, dims=DEFAULT_DIMS, seed=0):
        if len(dims) < 2 or min(dims) < 1:
            raise DimMismatch(f"bad topology {dims!r}")
        rng = np.random.default_rng(seed)
        weights, biases, shifts = [], [], []
        for i, (n_in, n_out) in enumerate(zip(dims, dims[1:])):
            weights.append(rng.integers(0, LEVELS, size=(n_out, n_in), dtype=np.int64))
            # negative biases give the rectifier something to cut
            reach = n_in * MAX_Q * MAX_Q
            biases.append(rng.integers(-reach // 4, reach // 8 + 1, size=n_out, dtype=np.int64))
            if i < len(dims) - 2:
                shifts.append(max(0, (reach + reach // 8).bit_length() - 4))
        return cls(tuple(weights), tuple(biases), tuple(shifts))


def parse_topology(text):
    try:
        dims = tuple(int(p) for p in text.replace("x", "-").split("-"))
    except ValueError:
        raise DimMismatch(f"malformed topology {text!r}; expected e.g. 4-8-2") from None
    if len(dims) < 2 or min(dims) < 1:
        raise DimMismatch(f"malformed topology {text!r}; expected e.g. 4-8-2")
    return dims


def _requant(acc, shift):
    return np.minimum(np.maximum(acc, 0) >> shift, MAX_Q)


def _forward(net, x, mul):
    """Batched forward pass; ``x`` has shape (batch, in). ``mul(w, x)`` multiplies elementwise."""
    h = x
    last = len(net.weights) - 1
    for i, (w, b) in enumerate(zip(net.weights, net.biases)):
        acc = mul(w[None, :, :], h[:, None, :]).sum(axis=2) + b
        h = acc if i == last else _requant(acc, net.shifts[i])
    return h


def _check_input(net, x):
    x = np.asarray(x, dtype=np.int64)
    squeeze = x.ndim == 1
    x = np.atleast_2d(x)
    if x.shape[1] != net.dims[0]:
        raise DimMismatch(f"input has {x.shape[1]} features, network expects {net.dims[0]}")
    if x.min() < 0 or x.max() > MAX_Q:
        raise ValueError("inputs must be 4-bit unsigned")
    return x, squeeze


def forward(net, x, mul=MultiplierKind.TRADITIONAL):
    kind = MultiplierKind.parse(mul)
    table = _products(kind)
    x, squeeze = _check_input(net, x)
    out = _forward(net, x, lambda w, a: table[w, a])
    return out[0] if squeeze else out


def forward_reference(net, x):
    """Same network with plain integer multiplication."""
    x, squeeze = _check_input(net, x)
    out = _forward(net, x, lambda w, a: w * a)
    return out[0] if squeeze else out


@dataclass(frozen=True)
class MaeResult:
    variant: MultiplierKind
    trials: int
    seed: int
    mae: Fraction

    def record(self):
        return {
            "variant": self.variant.value,
            "trials": self.trials,
            "seed": self.seed,
            "mae_numerator": self.mae.numerator,
            "mae_denominator": self.mae.denominator,
            "mae_decimal": round(float(self.mae), 6),
        }

    def to_json(self):
        return json.dumps(self.record(), sort_keys=False)


def mae_eval(net, trials=DEFAULT_TRIALS, seed=0, kinds=tuple(MultiplierKind)):
    """Mean absolute output error of each variant against the ideal multiplier.

    Inputs are ``trials`` uniform 4-bit vectors from ``default_rng(seed)``; the
    error sum is kept as an integer so the result does not depend on order.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    inputs = rng.integers(0, LEVELS, size=(trials, net.dims[0]), dtype=np.int64)
    ideal = forward(net, inputs, MultiplierKind.TRADITIONAL)
    results = []
    for kind in kinds:
        kind = MultiplierKind.parse(kind)
        out = forward(net, inputs, kind)
        total = int(np.abs(out - ideal).sum())
        results.append(MaeResult(kind, trials, seed, Fraction(total, ideal.size)))
    return results


def deviation_bound(net):
    """Largest possible first-layer accumulator deviation under approx-dc (45 per product)."""
    return 45 * net.dims[0]
