"""Binary and generalized Krawtchouk functions.

Binary: ``K_k(l) = sum_{|y|=k} (-1)^(a.y)`` over ``y in {0,1}^n`` for any
``a`` of Hamming weight ``l``.

Generalized: ``K_k(l) = sum_{y in Z_p^n, |y|_0 = k} w_p^(a.y)`` for any
``a in {0,1}^n`` with exactly ``l`` zeros.  Coordinate by coordinate, a zero
of ``a`` contributes ``1`` (``y_i = 0``) or ``p - 1`` (``y_i != 0``), and a one
contributes ``1`` or ``-1``, so the table holds exact integers.  The
character sums themselves are kept as small-instance oracles.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Literal, Sequence

from .numerics import (
    binomial,
    dot,
    is_prime,
    root_of_unity,
    zero_distribution,
)

Variant = Literal["binary", "generalized"]


def _check_index(n: int, *idx: int) -> None:
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    for i in idx:
        if not 0 <= i <= n:
            raise IndexError(f"index {i} outside [0, {n}]")


def binary_krawtchouk(n: int, k: int, ell: int) -> int:
    _check_index(n, k, ell)
    return sum((-1) ** t * binomial(ell, t) * binomial(n - ell, k - t) for t in range(k + 1))


def generalized_krawtchouk(n: int, p: int, k: int, ell: int) -> int:
    _check_index(n, k, ell)
    if p < 2:
        raise ValueError(f"p must be >= 2, got {p}")
    total = 0
    # a = zeros of y placed on zeros of alpha
    for a in range(max(0, k - (n - ell)), min(k, ell) + 1):
        sign = -1 if (n - ell - k + a) % 2 else 1
        total += sign * binomial(ell, a) * binomial(n - ell, k - a) * (p - 1) ** (ell - a)
    return total


def binary_krawtchouk_bruteforce(n: int, k: int, alpha: Sequence[int]) -> int:
    """Literal character sum over every ``y`` of weight ``k``."""
    total = 0
    for ones in itertools.combinations(range(n), k):
        total += (-1) ** sum(alpha[i] for i in ones)
    return total


def generalized_krawtchouk_bruteforce(n: int, p: int, k: int, alpha: Sequence[int]) -> complex:
    """Literal sum of ``w_p^(alpha.y)`` over ``y in Z_p^n`` with ``k`` zeros."""
    total = complex(0.0, 0.0)
    for zeros in itertools.combinations(range(n), k):
        free = [i for i in range(n) if i not in zeros]
        for values in itertools.product(range(1, p), repeat=len(free)):
            exponent = sum(alpha[i] * v for i, v in zip(free, values))
            total += root_of_unity(p, exponent)
    return total


def alpha_with_zeros(n: int, ell: int) -> tuple[int, ...]:
    return (0,) * ell + (1,) * (n - ell)


@dataclass(frozen=True)
class KrawtchoukTable:
    variant: Variant
    n: int
    p: int
    values: tuple[tuple[int, ...], ...] = field(repr=False)

    def __call__(self, k: int, ell: int) -> int:
        return self.values[k][ell]

    def row(self, k: int) -> tuple[int, ...]:
        return self.values[k]

    def norm(self, k: int) -> int:
        """Squared norm of row ``k`` under the matching reference law."""
        if self.variant == "binary":
            return binomial(self.n, k)
        return binomial(self.n, k) * (self.p - 1) ** (self.n - k)

    def weights(self) -> tuple[Fraction, ...]:
        """Reference law the rows are orthogonal under."""
        if self.variant == "binary":
            return zero_distribution(self.n, 2)
        return zero_distribution(self.n, self.p)


@lru_cache(maxsize=512)
def krawtchouk_table(n: int, p: int = 2, variant: Variant = "generalized") -> KrawtchoukTable:
    if variant == "binary":
        vals = tuple(tuple(binary_krawtchouk(n, k, l) for l in range(n + 1)) for k in range(n + 1))
        return KrawtchoukTable("binary", n, 2, vals)
    if variant == "generalized":
        vals = tuple(tuple(generalized_krawtchouk(n, p, k, l) for l in range(n + 1)) for k in range(n + 1))
        return KrawtchoukTable("generalized", n, p, vals)
    raise ValueError(f"unknown variant {variant!r}")


def binary_inner_product(n: int, r: int, s: int) -> Fraction:
    """``E_{b ~ Bin(n,1/2)}[K_r(b) K_s(b)]``."""
    _check_index(n, r, s)
    table = krawtchouk_table(n, 2, "binary")
    return dot(table.weights(), [a * b for a, b in zip(table.row(r), table.row(s))])


def generalized_inner_product(n: int, p: int, r: int, s: int, *, require_prime: bool = True) -> Fraction:
    """Inner product of rows ``r`` and ``s`` under the zero distribution."""
    _check_index(n, r, s)
    if require_prime and not is_prime(p):
        raise ValueError(f"p = {p} is not prime (pass require_prime=False to probe composites)")
    table = krawtchouk_table(n, p, "generalized")
    return dot(table.weights(), [a * b for a, b in zip(table.row(r), table.row(s))])


@dataclass(frozen=True)
class InvarianceReport:
    n: int
    p: int
    k: int
    ell: int
    values: tuple[complex, ...]
    max_deviation: float

    @property
    def invariant(self) -> bool:
        return self.max_deviation < 1e-9


def invariance_check(n: int, p: int, k: int, ell: int) -> InvarianceReport:
    """Evaluate the character sum at every ``alpha`` with ``ell`` zeros."""
    _check_index(n, k, ell)
    if n > 8:
        raise ValueError("invariance_check is exhaustive; keep n <= 8")
    values = []
    for zeros in itertools.combinations(range(n), ell):
        alpha = tuple(0 if i in zeros else 1 for i in range(n))
        values.append(generalized_krawtchouk_bruteforce(n, p, k, alpha))
    dev = max((abs(a - b) for a in values for b in values), default=0.0)
    return InvarianceReport(n, p, k, ell, tuple(values), dev)


@dataclass(frozen=True)
class ExpansionCoefficients:
    coeffs: tuple[Fraction, ...]
    n: int
    p: int


def expansion_coefficients(f: Sequence[object], n: int, p: int) -> ExpansionCoefficients:
    """Coefficients of ``f`` in the generalized Krawtchouk basis."""
    if len(f) != n + 1:
        raise ValueError(f"f must have {n + 1} entries, got {len(f)}")
    f = [Fraction(x) if not isinstance(x, Fraction) else x for x in f]
    table = krawtchouk_table(n, p, "generalized")
    w = table.weights()
    coeffs = tuple(
        dot(w, [fl * kl for fl, kl in zip(f, table.row(k))]) / table.norm(k) for k in range(n + 1)
    )
    return ExpansionCoefficients(coeffs, n, p)


def reconstruct_ratio(coeffs: ExpansionCoefficients, n: int | None = None, p: int | None = None) -> tuple[Fraction, ...]:
    n = coeffs.n if n is None else n
    p = coeffs.p if p is None else p
    table = krawtchouk_table(n, p, "generalized")
    return tuple(
        sum((c * table(k, l) for k, c in enumerate(coeffs.coeffs)), Fraction(0)) for l in range(n + 1)
    )


@dataclass(frozen=True)
class ReciprocityReport:
    n: int
    p: int
    variant: Variant
    violations: tuple[tuple[int, int, Fraction, Fraction], ...]
    checked: int

    @property
    def holds(self) -> bool:
        return not self.violations


def reciprocity_check(n: int, p: int, variant: Variant = "generalized") -> ReciprocityReport:
    """Compare ``K_k(l)/(C(n,k)(p-1)^(n-k))`` with ``K_l(k)/(C(n,l)(p-1)^(n-l))``.

    With ``variant="binary"`` the binary table is weighted by powers of
    ``p - 1`` as if it were the generalized one.
    """
    if n > 10:
        raise ValueError("reciprocity_check is exhaustive; keep n <= 10")
    table = krawtchouk_table(n, p, variant)

    def scale(j: int) -> int:
        return binomial(n, j) * (p - 1) ** (n - j)

    violations = []
    for k in range(n + 1):
        for l in range(n + 1):
            lhs = Fraction(table(k, l), scale(k))
            rhs = Fraction(table(l, k), scale(l))
            if lhs != rhs:
                violations.append((k, l, lhs, rhs))
    return ReciprocityReport(n, p, variant, tuple(violations), (n + 1) ** 2)
