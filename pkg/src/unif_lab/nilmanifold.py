"""Concrete 2-step nilsystem on the Heisenberg group.

Group elements are upper unitriangular 3x3 matrices [[1,x,z],[0,1,y],[0,0,1]],
stored as coordinate triples with the law

    (x, y, z) * (x', y', z') = (x + x', y + y', z + z' + x*y').

The integer lattice acts on the right; reduction to the fundamental domain
[0,1)^3 is performed in the fixed order y, then x, then z, so the x-step
(whose lattice element has q = 0) cannot perturb z.  Orbit sequences
f(tau^n . x0) are evaluated through the closed form for tau^n, never by
iterated multiplication, to keep rounding at the 1e-6 scale for |n| <= 1e4
and coordinates O(1).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from .errors import GeneratorSpecError
from .seq_core import ComplexSeq, IntervalSpec

TWO_PI_I = 2j * np.pi


@dataclass(frozen=True)
class HeisElem:
    """Free-coordinate group element."""

    x: float
    y: float
    z: float


@dataclass(frozen=True)
class HeisPoint:
    """Canonical fundamental-domain representative of a coset, in [0,1)^3."""

    x: float
    y: float
    z: float

    def __post_init__(self) -> None:
        for c in (self.x, self.y, self.z):
            if not (0.0 <= c < 1.0):
                raise ValueError(f"point coordinate {c} outside [0,1)")

    def lift(self) -> HeisElem:
        return HeisElem(self.x, self.y, self.z)


IDENTITY_POINT = HeisPoint(0.0, 0.0, 0.0)


@dataclass(frozen=True)
class CubeIndex:
    """Vertex (epsilon) and edge-length (h) data for a k-dimensional cube."""

    k: int
    h: Tuple[int, ...]
    eps: Tuple[int, ...]

    def offset(self) -> int:
        """epsilon . h = sum_i eps_i h_i."""
        return sum(e * hi for e, hi in zip(self.eps, self.h))

    @property
    def weight(self) -> int:
        """|epsilon| = number of set bits."""
        return sum(self.eps)


def eps_tuple(index: int, k: int) -> Tuple[int, ...]:
    """Little-endian bit decomposition: bit i of `index` is eps_{i+1}."""
    return tuple((index >> i) & 1 for i in range(k))


def heis_mul(g: HeisElem, h: HeisElem) -> HeisElem:
    return HeisElem(g.x + h.x, g.y + h.y, g.z + h.z + g.x * h.y)


def heis_inv(g: HeisElem) -> HeisElem:
    return HeisElem(-g.x, -g.y, g.x * g.y - g.z)


def heis_pow(tau: HeisElem, n: int) -> HeisElem:
    """tau^n = (n x, n y, n z + C(n,2) x y), valid for every integer n."""
    n = int(n)
    binom = n * (n - 1) // 2
    return HeisElem(n * tau.x, n * tau.y, n * tau.z + binom * tau.x * tau.y)


def heis_reduce(g: HeisElem) -> Tuple[HeisPoint, Tuple[int, int, int]]:
    """Reduce to [0,1)^3 by right multiplication with a lattice element.

    Order fixed as q = -floor(y) (updates z by x*q and y), then p = -floor(x),
    then r = -floor(z).  Returns the point and the (p, q, r) used, so that
    g * (p, q, r) is the canonical representative.
    """
    q = -int(np.floor(g.y))
    y = g.y + q
    z = g.z + g.x * q
    p = -int(np.floor(g.x))
    x = g.x + p
    r = -int(np.floor(z))
    z = z + r
    # floor can land exactly on 1.0 after rounding; fold it back
    x, y, z = x % 1.0, y % 1.0, z % 1.0
    return HeisPoint(x, y, z), (p, q, r)


def _reduce_arrays(x: np.ndarray, y: np.ndarray, z: np.ndarray):
    """Vectorized heis_reduce, y-then-x-then-z order."""
    q = -np.floor(y)
    z = z + x * q
    y = (y + q) % 1.0
    x = (x - np.floor(x)) % 1.0
    z = (z - np.floor(z)) % 1.0
    return x, y, z


# ---------------------------------------------------------------------------
# Nilsequences
# ---------------------------------------------------------------------------

PointFunction = Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]


def character_ez(j: int = 1) -> PointFunction:
    def f(x: np.ndarray, y: np.ndarray, z: np.ndarray) -> np.ndarray:
        return np.exp(TWO_PI_I * j * z)
    return f


def character_ex(x: np.ndarray, y: np.ndarray, z: np.ndarray) -> np.ndarray:
    return np.exp(TWO_PI_I * x)


def character_ey(x: np.ndarray, y: np.ndarray, z: np.ndarray) -> np.ndarray:
    return np.exp(TWO_PI_I * y)


def named_character(name: str) -> PointFunction:
    """Registry used by the CLI: ez, ex, ey, ejz with e.g. 'e3z'."""
    if name == "ez":
        return character_ez(1)
    if name == "ex":
        return character_ex
    if name == "ey":
        return character_ey
    if name.startswith("e") and name.endswith("z") and name[1:-1].isdigit():
        return character_ez(int(name[1:-1]))
    raise GeneratorSpecError(f"unknown nilmanifold character {name!r}")


def nilsequence(tau: HeisElem, x0: HeisPoint, f: PointFunction,
                rng: Optional[IntervalSpec] = None, sup_bound: float = 1.0,
                label: str = "heis") -> ComplexSeq:
    """a_n = f(canonical representative of tau^n * lift(x0)).

    Uses the closed form for tau^n: the z coordinate is n*tau.z plus
    C(n,2)*tau.x*tau.y, exact in float64 while n*(n-1)/2 stays below 2^53.
    """
    a, b, c = x0.x, x0.y, x0.z

    def _eval(ns: np.ndarray) -> np.ndarray:
        nf = ns.astype(np.float64)
        binom = (ns * (ns - 1) // 2).astype(np.float64)
        gx = nf * tau.x
        gy = nf * tau.y
        gz = nf * tau.z + binom * (tau.x * tau.y)
        # right-multiply by lift(x0)
        px = gx + a
        py = gy + b
        pz = gz + c + gx * b
        x, y, z = _reduce_arrays(px, py, pz)
        return np.asarray(f(x, y, z), dtype=np.complex128)

    valid = None if rng is None else (rng.lo, rng.hi)
    return ComplexSeq(_eval, valid, sup_bound, label=label)


def orbit_points(tau: HeisElem, x0: HeisPoint, ns: np.ndarray):
    """Canonical representatives of tau^n * lift(x0) for an index array."""
    ns = np.asarray(ns, dtype=np.int64)
    nf = ns.astype(np.float64)
    binom = (ns * (ns - 1) // 2).astype(np.float64)
    gx, gy = nf * tau.x, nf * tau.y
    gz = nf * tau.z + binom * (tau.x * tau.y)
    px = gx + x0.x
    py = gy + x0.y
    pz = gz + x0.z + gx * x0.y
    return _reduce_arrays(px, py, pz)


def cube_orbit(x: HeisPoint, tau: HeisElem, h: Tuple[int, ...],
               k: int) -> Tuple[HeisPoint, ...]:
    """The 2^k points T^{eps . h} x in little-endian vertex order.

    Entry m corresponds to eps with eps_{i+1} = bit i of m, so for k = 2 the
    order is eps = 00, 10, 01, 11 with offsets 0, h1, h2, h1+h2.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if len(h) != k:
        raise ValueError(f"h must have {k} entries")
    offsets = np.array([CubeIndex(k, tuple(h), eps_tuple(m, k)).offset()
                        for m in range(1 << k)], dtype=np.int64)
    xs, ys, zs = orbit_points(tau, x, offsets)
    return tuple(HeisPoint(float(a), float(b), float(c))
                 for a, b, c in zip(xs, ys, zs))


# ---------------------------------------------------------------------------
# CLI spec strings: heis:tau=(a,b,c);x0=(x,y,z);f=ez
# ---------------------------------------------------------------------------

def _parse_triple(text: str, what: str) -> Tuple[float, float, float]:
    body = text.strip()
    if body.startswith("(") and body.endswith(")"):
        body = body[1:-1]
    parts = body.split(",")
    if len(parts) != 3:
        raise GeneratorSpecError(f"{what} needs three comma-separated numbers")
    try:
        vals = tuple(float(p) for p in parts)
    except ValueError:
        raise GeneratorSpecError(f"bad {what}: {text!r}") from None
    return vals  # type: ignore[return-value]


def parse_heis_spec(arg: str) -> ComplexSeq:
    fields: Dict[str, str] = {}
    for piece in arg.split(";"):
        piece = piece.strip()
        if not piece:
            continue
        if "=" not in piece:
            raise GeneratorSpecError(f"bad heis field {piece!r}")
        key, val = piece.split("=", 1)
        fields[key.strip()] = val.strip()
    if "tau" not in fields:
        raise GeneratorSpecError("heis spec needs tau=(a,b,c)")
    tau = HeisElem(*_parse_triple(fields["tau"], "tau"))
    if "x0" in fields:
        xv = _parse_triple(fields["x0"], "x0")
        x0 = HeisPoint(xv[0] % 1.0, xv[1] % 1.0, xv[2] % 1.0)
    else:
        x0 = IDENTITY_POINT
    f = named_character(fields.get("f", "ez"))
    return nilsequence(tau, x0, f, label=f"heis:{arg}")
