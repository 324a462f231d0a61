"""Bounded two-sided sequences and the averaging primitives built on them.

A sequence is an evaluator n -> complex valid on a declared integer range
(possibly unbounded for closed-form generators), together with a declared
bound on |a_n|.  Two averaging modes are supported everywhere downstream:

  interval  -- plain finite truncation: sums run over an interval [lo, lo+len),
               reading past its edges only up to a declared margin;
  cyclic(N) -- every index is reduced mod N before evaluation, which makes
               the finite box-norm identities exact and is the testing
               backbone of the whole package.

Summation is deterministic: numpy's pairwise reduction over a fixed memory
layout, indices enumerated left to right, h-grids lexicographically.  Results
are therefore bit-stable from run to run and independent of worker counts.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from .errors import IncompatibleRangeError, SequenceRangeError

Range = Optional[Tuple[int, int]]  # half-open [lo, hi); None = unbounded


@dataclass(frozen=True)
class IntervalSpec:
    """Integer interval [lo, lo + length)."""

    lo: int
    length: int

    def __post_init__(self) -> None:
        if self.length < 1:
            raise ValueError(f"interval length must be >= 1, got {self.length}")

    @property
    def hi(self) -> int:
        return self.lo + self.length

    def indices(self) -> np.ndarray:
        return np.arange(self.lo, self.hi, dtype=np.int64)


@dataclass(frozen=True)
class DomainMode:
    """Averaging domain: plain interval or wraparound on Z/NZ."""

    kind: str  # "interval" or "cyclic"
    modulus: Optional[int] = None

    def __post_init__(self) -> None:
        if self.kind not in ("interval", "cyclic"):
            raise ValueError(f"unknown domain mode {self.kind!r}")
        if self.kind == "cyclic" and (self.modulus is None or self.modulus < 1):
            raise ValueError("cyclic mode needs a modulus N >= 1")

    @property
    def is_cyclic(self) -> bool:
        return self.kind == "cyclic"

    def describe(self) -> str:
        return "interval" if not self.is_cyclic else f"cyclic({self.modulus})"


INTERVAL = DomainMode("interval")


def cyclic(n: int) -> DomainMode:
    return DomainMode("cyclic", n)


@dataclass(frozen=True)
class ComplexSeq:
    """A bounded sequence a: Z -> C given by a vectorized evaluator.

    ``eval_fn`` maps an int64 numpy array of indices to a complex128 array
    and must be pure: the same index always yields the bit-identical value.
    """

    eval_fn: Callable[[np.ndarray], np.ndarray]
    valid_range: Range
    sup_bound: float
    label: str = ""

    def eval(self, ns: np.ndarray) -> np.ndarray:
        return np.asarray(self.eval_fn(np.asarray(ns, dtype=np.int64)),
                          dtype=np.complex128)

    def at(self, n: int) -> complex:
        return complex(self.eval(np.array([n], dtype=np.int64))[0])

    def contains(self, lo: int, hi: int) -> bool:
        """Whether [lo, hi) lies inside the valid range."""
        if self.valid_range is None:
            return True
        return self.valid_range[0] <= lo and hi <= self.valid_range[1]

    def require_range(self, lo: int, hi: int, what: str = "operation") -> None:
        if not self.contains(lo, hi):
            raise SequenceRangeError(
                f"{what} needs indices [{lo}, {hi}) but valid range is "
                f"{self.valid_range}")

    def sample(self, lo: int, hi: int) -> np.ndarray:
        """Values on [lo, hi) after a range check."""
        self.require_range(lo, hi, "sample")
        return self.eval(np.arange(lo, hi, dtype=np.int64))


def from_samples(values: np.ndarray, lo: int = 0, label: str = "") -> ComplexSeq:
    """Wrap a finite array as a sequence valid on [lo, lo + len(values))."""
    arr = np.ascontiguousarray(np.asarray(values, dtype=np.complex128))
    bound = float(np.max(np.abs(arr))) if arr.size else 0.0

    def _eval(ns: np.ndarray) -> np.ndarray:
        return arr[ns - lo]

    return ComplexSeq(_eval, (lo, lo + arr.size), bound, label=label)


def constant_seq(c: complex) -> ComplexSeq:
    cval = complex(c)

    def _eval(ns: np.ndarray) -> np.ndarray:
        return np.full(ns.shape, cval, dtype=np.complex128)

    return ComplexSeq(_eval, None, abs(cval), label=f"const:{cval}")


def wrap_cyclic(a: ComplexSeq, n: int) -> ComplexSeq:
    """The N-periodic extension n -> a(n mod N), valid everywhere.

    Shifts and products of wrapped sequences compose the way cyclic mode
    expects: shift(wrap_cyclic(a, N), h) evaluates a((n + h) mod N).
    """
    a.require_range(0, n, "cyclic wrap")

    def _eval(ns: np.ndarray) -> np.ndarray:
        return a.eval(ns % n)

    return ComplexSeq(_eval, None, a.sup_bound, label=f"wrap({n},{a.label})")


def sample_mode(a: ComplexSeq, lo: int, hi: int, mode: DomainMode) -> np.ndarray:
    """Values on [lo, hi), with indices reduced mod N first in cyclic mode."""
    if mode.is_cyclic:
        n = mode.modulus
        a.require_range(0, n, "cyclic evaluation")
        return a.eval(np.arange(lo, hi, dtype=np.int64) % n)
    return a.sample(lo, hi)


def require_margin(a: ComplexSeq, interval: IntervalSpec, k: int, h: int,
                   mode: DomainMode) -> None:
    """Check the margin contract: reads reach [lo, lo + len + k*(H-1)]."""
    if mode.is_cyclic:
        a.require_range(0, mode.modulus, "cyclic evaluation")
        return
    a.require_range(interval.lo, interval.hi + k * (h - 1),
                    f"k={k}, H={h} box average on {interval}")


# ---------------------------------------------------------------------------
# Averaging primitives
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AvgReport:
    value: complex
    count: int
    mode: DomainMode


def interval_average(a: ComplexSeq, interval: IntervalSpec,
                     mode: DomainMode = INTERVAL) -> AvgReport:
    """(1/|I|) sum_{n in I} a_n, summed left to right over n."""
    vals = sample_mode(a, interval.lo, interval.hi, mode)
    return AvgReport(complex(vals.mean()), interval.length, mode)


def sup_window_average(a: ComplexSeq, search_range: IntervalSpec,
                       n: int) -> float:
    """max over starts M in search_range of |(1/n) sum_{m=M}^{M+n-1} a_m|.

    Uses a mean-centered prefix sum so the scan is O(range) with rounding
    that stays bounded even when partial sums would otherwise grow.
    """
    if n < 1:
        raise ValueError("window length must be >= 1")
    lo, hi = search_range.lo, search_range.hi
    vals = a.sample(lo, hi + n - 1)
    mu = vals.mean()
    prefix = np.concatenate(([0.0 + 0.0j], np.cumsum(vals - mu)))
    window_sums = prefix[n:n + search_range.length] - prefix[:search_range.length]
    window_sums = window_sums + n * mu
    return float(np.max(np.abs(window_sums)) / n)


# ---------------------------------------------------------------------------
# Pointwise algebra
# ---------------------------------------------------------------------------

def _intersect(r1: Range, r2: Range) -> Range:
    if r1 is None:
        return r2
    if r2 is None:
        return r1
    lo, hi = max(r1[0], r2[0]), min(r1[1], r2[1])
    if lo >= hi:
        raise IncompatibleRangeError(f"ranges {r1} and {r2} do not overlap")
    return (lo, hi)


def shift(a: ComplexSeq, h: int) -> ComplexSeq:
    """(sigma^h a)(n) = a(n + h)."""
    rng = None if a.valid_range is None else (a.valid_range[0] - h,
                                              a.valid_range[1] - h)
    return ComplexSeq(lambda ns: a.eval(ns + h), rng, a.sup_bound,
                      label=f"shift({h},{a.label})")


def conjugate(a: ComplexSeq) -> ComplexSeq:
    return ComplexSeq(lambda ns: np.conj(a.eval(ns)), a.valid_range,
                      a.sup_bound, label=f"conj({a.label})")


def product(a: ComplexSeq, b: ComplexSeq) -> ComplexSeq:
    rng = _intersect(a.valid_range, b.valid_range)
    return ComplexSeq(lambda ns: a.eval(ns) * b.eval(ns), rng,
                      a.sup_bound * b.sup_bound,
                      label=f"prod({a.label},{b.label})")


def add(a: ComplexSeq, b: ComplexSeq) -> ComplexSeq:
    rng = _intersect(a.valid_range, b.valid_range)
    return ComplexSeq(lambda ns: a.eval(ns) + b.eval(ns), rng,
                      a.sup_bound + b.sup_bound,
                      label=f"sum({a.label},{b.label})")


def scale(a: ComplexSeq, c: complex) -> ComplexSeq:
    cval = complex(c)
    return ComplexSeq(lambda ns: cval * a.eval(ns), a.valid_range,
                      abs(cval) * a.sup_bound, label=f"scale({cval},{a.label})")


def seq_algebra(op: str, a: ComplexSeq, b: Optional[ComplexSeq] = None,
                h: int = 0, c: complex = 1.0) -> ComplexSeq:
    """Dispatcher over {shift(h), conjugate, product, sum, scale(c)}."""
    if op == "shift":
        return shift(a, h)
    if op == "conjugate":
        return conjugate(a)
    if op == "product":
        if b is None:
            raise ValueError("product needs a second operand")
        return product(a, b)
    if op == "sum":
        if b is None:
            raise ValueError("sum needs a second operand")
        return add(a, b)
    if op == "scale":
        return scale(a, c)
    raise ValueError(f"unknown sequence operation {op!r}")
