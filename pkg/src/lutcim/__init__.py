"""Functional simulator, cost model and error analysis for LUT-based CiM multipliers."""
from .bitcore import AdderTrace, UWord, add_traced, exact_mul, make_uword, popcount, shl, slice
from .costmodel import AreaWeights, ComponentCount, structural_audit, weighted_area
from .lutmul import MultiplierConfig, MultiplierKind, adder_plan, evaluate, lut_select, program

__version__ = "0.1.0"
