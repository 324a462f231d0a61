"""Dual-norm calculus: DFT analysis, the explicit k = 2 norms, dual
functions, and the correlation-bound harness.

For a trigonometric polynomial b_n = sum_m lambda_m e(n t_m):

  hk_norm_k2(b)   = (sum_m |lambda_m|^4)^(1/4)      -- the k = 2 box norm
  dual_norm_k2(b) = (sum_m |lambda_m|^(4/3))^(3/4)  -- its dual norm

and the correlation bound |avg_n a_n b_n| <= ||a||_2 * ||b||_2* is an exact
Hoelder chain on Z/NZ when every t_m sits on the N-point grid.

The dual function averages the cube products missing the base vertex:

  (D_k a)(n) = (1/H^k) sum_{h in [0,H)^k} prod_{eps != 0} C^{|eps|} a_{n+eps.h}

so that pairing it against a regroups exactly into the powered box norm:
avg_n a_n (D_k a)(n) = S_H.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import FrequencyGridMismatch
from .generators import TrigPoly, quad_phase_seq, trig_poly_seq
from .nilmanifold import HeisElem, IDENTITY_POINT, character_ez, nilsequence
from .seq_core import ComplexSeq, IntervalSpec, cyclic, from_samples
from .uniformity import (BoxParams, SuiteReport, _operand_array,
                         _sliding_sums, _suite_samples, box_norm)

GRID_TOL = 1e-12


@dataclass(frozen=True)
class SpectrumReport:
    coefficients: TrigPoly  # frequencies j/N in bin order
    hk2: float
    dual2: float


def dft_coefficients(a: ComplexSeq, n: int) -> SpectrumReport:
    """lambda_j = (1/N) sum_{m<N} a_m e(-mj/N) for every bin j."""
    samples = a.sample(0, n)
    coefs = np.fft.fft(samples) / n
    terms = tuple((j / n, complex(coefs[j])) for j in range(n))
    mags = np.abs(coefs)
    hk2 = float(np.sum(mags ** 4) ** 0.25)
    dual2 = float(np.sum(mags ** (4.0 / 3.0)) ** 0.75)
    return SpectrumReport(TrigPoly(terms), hk2, dual2)


def spectrum_probe(a: ComplexSeq, n: int,
                   freqs: Sequence[float]) -> np.ndarray:
    """(1/N) sum_{m<N} a_m e(-m t) at arbitrary frequencies t (off-grid ok)."""
    samples = a.sample(0, n)
    ms = np.arange(n, dtype=np.float64)
    out = np.empty(len(freqs), dtype=np.complex128)
    for i, t in enumerate(freqs):
        out[i] = np.mean(samples * np.exp(-2j * np.pi * ((ms * t) % 1.0)))
    return out


def hk_norm_k2(p: TrigPoly) -> float:
    """(sum |lambda|^4)^(1/4)."""
    return float(np.sum(np.abs(p.coefs) ** 4) ** 0.25)


def dual_norm_k2(p: TrigPoly) -> float:
    """(sum |lambda|^(4/3))^(3/4)."""
    return float(np.sum(np.abs(p.coefs) ** (4.0 / 3.0)) ** 0.75)


# ---------------------------------------------------------------------------
# Dual functions
# ---------------------------------------------------------------------------

def _dual_rec(x: np.ndarray, k: int, h: int, out_len: int) -> np.ndarray:
    """d[n] = (1/H^k) sum_h prod_{eps != 0} C^{|eps|} x[n + eps.h].

    Recursion on the last cube coordinate:
    d_k(x)[n] = avg_{h'} conj(x[n+h']) * d_{k-1}(x * conj(shift_{h'} x))[n],
    which keeps the cost at O(H^(k-1) * len).
    """
    if k == 1:
        return np.conj(_sliding_sums(x, h, out_len)) / h
    acc = np.zeros(out_len, dtype=np.complex128)
    m = out_len + (k - 1) * (h - 1)
    for hh in range(h):
        delta = x[:m] * np.conj(x[hh:hh + m])
        acc += np.conj(x[hh:hh + out_len]) * _dual_rec(delta, k - 1, h, out_len)
    return acc / h


def dual_function(a: ComplexSeq, p: BoxParams) -> ComplexSeq:
    """The dual function D_k a on p.interval.

    In interval mode the evaluation reads k*(H-1) points past the interval,
    so the output's valid range is the interval itself (shrunk by the
    margin relative to the input).  In cyclic mode the result is the
    N-periodic dual function of the wrapped sequence.
    """
    x = _operand_array(a, p)
    d = _dual_rec(x, p.k, p.H, p.interval.length)
    label = f"dual[k={p.k},H={p.H}]({a.label})"
    return from_samples(d, lo=p.interval.lo, label=label)


def dual_pairing(a: ComplexSeq, p: BoxParams) -> complex:
    """avg_{n in I} a_n * (D_k a)(n); its real part is the powered box norm."""
    d = dual_function(a, p)
    base = a.eval(p.interval.indices() % p.mode.modulus) \
        if p.mode.is_cyclic else a.sample(p.interval.lo, p.interval.hi)
    vals = d.sample(p.interval.lo, p.interval.hi)
    return complex(np.mean(base * vals))


# ---------------------------------------------------------------------------
# Direct correlation bound (k = 2)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DirectBoundReport:
    corr: float
    bound: float
    box_value: float
    dual_value: float

    @property
    def holds(self) -> bool:
        return self.corr <= self.bound + 1e-9


def _require_on_grid(p: TrigPoly, n: int) -> None:
    for t, _ in p.terms:
        j = round(t * n)
        if abs(t - (j % n) / n) > GRID_TOL:
            raise FrequencyGridMismatch(
                f"frequency {t} is not a multiple of 1/{n}")


def direct_bound_check(a: ComplexSeq, b: TrigPoly,
                       n: int) -> DirectBoundReport:
    """corr = |avg_{m<N} a_m b_m| against bound = ||a||_2,cyclic * ||b||_2*.

    Exact Hoelder on Z/NZ: requires every frequency of b on the N-grid.
    """
    _require_on_grid(b, n)
    a_vals = a.sample(0, n)
    b_vals = trig_poly_seq(b).sample(0, n)
    corr = abs(complex(np.mean(a_vals * b_vals)))
    box = box_norm(from_samples(a_vals),
                   BoxParams(2, n, IntervalSpec(0, n), cyclic(n)))
    dual = dual_norm_k2(b)
    return DirectBoundReport(corr, box.value * dual, box.value, dual)


# ---------------------------------------------------------------------------
# Empirical correlation search (no optimality guarantee)
# ---------------------------------------------------------------------------

def inverse_search(a: ComplexSeq, n: int, kind: str = "fourier",
                   grid: Optional[Sequence[float]] = None,
                   top: int = 10) -> List[Tuple[str, float]]:
    """Rank dictionary elements b by |avg_{m<N} a_m conj(b_m)|, descending.

    Dictionaries: "fourier" (all N grid exponentials), "quad" (quadratic
    phases e(alpha m^2) over `grid`), "heis" (nilsequences tau=(alpha,1,0),
    f = e(z) over `grid`).  Purely empirical: reports the best correlators
    found in the finite dictionary, nothing more.
    """
    samples = a.sample(0, n)
    hits: List[Tuple[str, float]] = []
    if kind == "fourier":
        coefs = np.fft.fft(samples) / n  # bin j <-> |avg a_m conj(e(mj/N))|
        for j in range(n):
            hits.append((f"exp:{j / n!r}", float(abs(coefs[j]))))
    elif kind == "quad":
        if grid is None:
            raise ValueError("quad dictionary needs a grid of coefficients")
        for alpha in grid:
            b = quad_phase_seq(alpha).sample(0, n)
            corr = abs(complex(np.mean(samples * np.conj(b))))
            hits.append((f"quad:{float(alpha)!r}", corr))
    elif kind == "heis":
        if grid is None:
            raise ValueError("heis dictionary needs a grid of coefficients")
        for alpha in grid:
            seq = nilsequence(HeisElem(float(alpha), 1.0, 0.0),
                              IDENTITY_POINT, character_ez(1))
            b = seq.sample(0, n)
            corr = abs(complex(np.mean(samples * np.conj(b))))
            hits.append((f"heis:tau=({float(alpha)!r},1,0);f=ez", corr))
    else:
        raise ValueError(f"unknown dictionary {kind!r}")
    hits.sort(key=lambda item: (-item[1], item[0]))
    return hits[:top]


# ---------------------------------------------------------------------------
# Seeded suites
# ---------------------------------------------------------------------------

def run_direct_bound_suite(trials: int, n: int = 4096,
                           seed: int = 0) -> SuiteReport:
    worst = -np.inf
    violations = 0
    rng_master = np.random.default_rng(seed)
    for t in range(trials):
        a = from_samples(_suite_samples(seed + t, n))
        rng = np.random.default_rng(rng_master.integers(1 << 62))
        bins = rng.choice(n, size=5, replace=False)
        coefs = rng.standard_normal(5) + 1j * rng.standard_normal(5)
        b = TrigPoly(tuple((int(j) / n, complex(c))
                           for j, c in zip(bins, coefs)))
        rep = direct_bound_check(a, b, n)
        slack = rep.corr - rep.bound - 1e-9
        worst = max(worst, slack)
        if slack > 0:
            violations += 1
    return SuiteReport("direct-bound", trials, violations, float(worst))


def run_pairing_suite(trials: int, n: int = 1024, h: int = 32, k: int = 2,
                      seed: int = 0) -> SuiteReport:
    worst = -np.inf
    violations = 0
    p = BoxParams(k, h, IntervalSpec(0, n), cyclic(n))
    for t in range(trials):
        a = from_samples(_suite_samples(seed + t, n))
        pairing = dual_pairing(a, p).real
        powered = box_norm(a, p, with_tail=False).powered
        slack = abs(pairing - powered) - 1e-9
        worst = max(worst, slack)
        if slack > 0:
            violations += 1
    return SuiteReport("dual-pairing", trials, violations, float(worst))
