"""Description-length costs, in bits, for integers, reals and sequences.

A nonnegative integer costs log2(c0) plus the iterated logarithm
log2(n) + log2(log2(n)) + ..., summed while the current term is positive
(the standard universal-code length; 0 and 1 both cost just the constant).
A signed quantity adds one sign bit. A real is encoded as its integer part
plus log2(1/delta) bits for the fraction at precision delta. Vectors and
sequence differences encode component by component.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ShapeError

C0 = 2.865


@dataclass(frozen=True)
class EncodingConfig:
    """Precision threshold and the universal-code constant."""

    delta: float = 0.01
    c0: float = C0

    def __post_init__(self):
        if self.delta <= 0:
            raise ValueError("delta must be positive")
        if self.c0 <= 1:
            raise ValueError("c0 must exceed 1")


def log_star(n) -> float:
    """Iterated base-2 logarithm sum; 0 for n in {0, 1}."""
    if n < 0:
        raise ValueError("log_star is defined for nonnegative integers")
    x = float(n)
    if not math.isfinite(x):
        return math.inf
    total = 0.0
    while x > 1.0:
        x = math.log2(x)
        total += x
    return total


def cost_uint(n, cfg: EncodingConfig = EncodingConfig()) -> float:
    """Bits to encode a nonnegative integer."""
    return math.log2(cfg.c0) + log_star(n)


def cost_int(n, cfg: EncodingConfig = EncodingConfig()) -> float:
    """Bits to encode a signed integer (one extra sign bit)."""
    return cost_uint(abs(n), cfg) + 1.0


def cost_real(x, cfg: EncodingConfig = EncodingConfig()) -> float:
    """Bits to encode a signed real at precision delta."""
    if not math.isfinite(x):
        return math.inf
    return cost_uint(math.floor(abs(x)), cfg) + math.log2(1.0 / cfg.delta) + 1.0


def _log_star_array(n: np.ndarray) -> np.ndarray:
    out = np.zeros_like(n, dtype=float)
    x = n.astype(float)
    active = x > 1.0
    while active.any():
        x = np.where(active, np.log2(x, where=active, out=np.ones_like(x)), 1.0)
        out += np.where(active, x, 0.0)
        active = x > 1.0
    return out


def cost_real_array(values: np.ndarray, cfg: EncodingConfig) -> np.ndarray:
    """Vectorized cost_real; non-finite entries cost infinity."""
    values = np.asarray(values, dtype=float)
    base = math.log2(cfg.c0) + math.log2(1.0 / cfg.delta) + 1.0
    finite = np.isfinite(values)
    mags = np.floor(np.abs(np.where(finite, values, 0.0)))
    out = base + _log_star_array(mags)
    return np.where(finite, out, np.inf)


def cost_vector(v, cfg: EncodingConfig = EncodingConfig()) -> float:
    """Bits to encode a vector of reals, component by component."""
    v = np.asarray(v, dtype=float)
    if v.size == 0:
        return 0.0
    return float(cost_real_array(v, cfg).sum())


def cost_seq_diff(a, b, cfg: EncodingConfig = EncodingConfig()) -> float:
    """Bits to encode the elementwise difference of two aligned sequences."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ShapeError(f"sequence shapes differ: {a.shape} vs {b.shape}")
    if a.size == 0:
        return 0.0
    return float(cost_real_array(a - b, cfg).sum())
