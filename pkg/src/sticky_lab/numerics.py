"""Exact arithmetic substrate.

Probabilities are carried as :class:`fractions.Fraction`; roots of unity are
ordinary double-precision complex numbers, checked against integer targets at
an absolute tolerance of ``1e-10``.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

ROOT_TOL = 1e-10


def binomial(n: int, k: int) -> int:
    """``C(n, k)``, zero outside ``0 <= k <= n``."""
    if n < 0:
        raise ValueError(f"binomial requires n >= 0, got n={n}")
    if k < 0 or k > n:
        return 0
    return math.comb(n, k)


def binomial_or_zero(n: int, k: int) -> int:
    # Degenerate counting binomials (negative top) count nothing.
    if n < 0:
        return 0
    return binomial(n, k)


def binomial_ratio_bound(n: int, k: int, p: int) -> tuple[Fraction, float, bool]:
    """Compare ``C(n,k)^2 / C(n,pk)`` with ``(ne/k)^(2k) (pk/n)^(pk)``.

    Returns ``(lhs, rhs_bound, holds)`` where ``lhs`` is exact.
    """
    if p < 2:
        raise ValueError(f"p must be >= 2, got {p}")
    if k < 1 or p * k > n:
        raise ValueError(f"need 1 <= k <= n/p, got n={n}, k={k}, p={p}")
    lhs = Fraction(binomial(n, k) ** 2, binomial(n, p * k))
    # log-space keeps the bound finite for the larger grids
    log_rhs = 2 * k * (math.log(n) + 1 - math.log(k)) + p * k * (math.log(p * k) - math.log(n))
    rhs = math.exp(log_rhs)
    holds = math.log(lhs.numerator) - math.log(lhs.denominator) <= log_rhs + 1e-12
    return lhs, rhs, holds


def root_of_unity(p: int, j: int) -> complex:
    """``exp(2*pi*i*j/p)`` with ``j`` reduced mod ``p``.

    Quarter turns are returned exactly so that small identities do not pick
    up rounding noise.
    """
    if p < 2:
        raise ValueError(f"p must be >= 2, got {p}")
    j %= p
    if j == 0:
        return complex(1.0, 0.0)
    if 2 * j == p:
        return complex(-1.0, 0.0)
    if 4 * j == p:
        return complex(0.0, 1.0)
    if 4 * j == 3 * p:
        return complex(0.0, -1.0)
    return cmath.exp(2j * math.pi * j / p)


def root_power_sum(p: int, k: int) -> complex:
    """``sum_{j<p} w_p^(k j)``: ``p`` when ``k == 0``, else ~0."""
    if p < 2:
        raise ValueError(f"p must be >= 2, got {p}")
    if not 0 <= k < p:
        raise ValueError(f"k must lie in [0, {p}), got {k}")
    return sum((root_of_unity(p, k * j) for j in range(p)), complex(0.0, 0.0))


def round_to_integer(z: complex, tol: float = ROOT_TOL) -> int:
    """Round a complex value known to be an integer, checking the residue."""
    r = round(z.real)
    if abs(z.real - r) > tol or abs(z.imag) > tol:
        raise ArithmeticError(f"{z!r} is not within {tol} of an integer")
    return int(r)


def as_fraction(value: object) -> Fraction:
    """Parse ``"3/10"``, ``"0.02"``, ints, or Fractions exactly.

    Floats are converted through their shortest repr so ``0.1`` becomes
    ``1/10`` rather than the binary expansion.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite value {value!r}")
        return Fraction(repr(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as a rational")


def fraction_sqrt(x: Fraction) -> float:
    if x < 0:
        raise ValueError("square root of a negative rational")
    # integer sqrt on a scaled value avoids overflow for huge denominators
    num, den = x.numerator, x.denominator
    scale = 10 ** 40
    return math.isqrt(num * scale * scale // den) / scale


class Poly:
    """Univariate polynomial with exact rational coefficients.

    Coefficients are stored low degree first with trailing zeros trimmed.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[object] = ()):
        cs = [as_fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(cs)

    @classmethod
    def constant(cls, c: object) -> "Poly":
        return cls([c])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, x: object) -> Fraction:
        x = as_fraction(x)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __add__(self, other: "Poly | int | Fraction") -> "Poly":
        other = _lift(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return Poly(x + y for x, y in zip(a, b))

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly(-c for c in self.coeffs)

    def __sub__(self, other: "Poly | int | Fraction") -> "Poly":
        return self + (-_lift(other))

    def __rsub__(self, other: "Poly | int | Fraction") -> "Poly":
        return _lift(other) - self

    def __mul__(self, other: "Poly | int | Fraction") -> "Poly":
        other = _lift(other)
        if self.is_zero() or other.is_zero():
            return Poly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Poly(out)

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Poly.constant(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        if not self.coeffs:
            return "Poly(0)"
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            terms.append(str(c) if i == 0 else f"{c}*x^{i}")
        return "Poly(" + " + ".join(terms) + ")"


def _lift(value: "Poly | int | Fraction") -> Poly:
    if isinstance(value, Poly):
        return value
    return Poly.constant(value)


def dot(weights: Sequence[Fraction], values: Sequence[object]) -> Fraction:
    return sum((w * v for w, v in zip(weights, values)), Fraction(0))


@lru_cache(maxsize=None)
def zero_distribution(n: int, p: int) -> tuple[Fraction, ...]:
    """Law of the number of zeros among ``n`` uniform symbols of ``Z_p``."""
    if n < 0 or p < 2:
        raise ValueError(f"invalid (n, p) = ({n}, {p})")
    total = p ** n
    return tuple(Fraction(binomial(n, l) * (p - 1) ** (n - l), total) for l in range(n + 1))


def is_prime(m: int) -> bool:
    if m < 2:
        return False
    return all(m % d for d in range(2, math.isqrt(m) + 1))
