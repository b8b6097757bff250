"""Expected Krawtchouk values under the sticky walk, and the shift statistic.

The exact route composes the zero-count law with the generalized table.
The printed closed forms (two normalizations, two bias substitutions) are
treated as hypotheses and compared against that route.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .chain import (
    CapExceededError,
    WalkParams,
    params_from_mixture,
    zero_count_distribution,
    zero_count_polynomial,
)
from .krawtchouk import krawtchouk_table
from .numerics import Poly, as_fraction, binomial, binomial_or_zero, dot, root_of_unity, round_to_integer

MAX_SUBSETS = 1_000_000


def shift(T: Iterable[int], c: int, p: int) -> int:
    """Sum of gaps ``a_{c+ip} - a_{c+ip-1}`` for ``i = 0 .. floor(|k-c|/p)``.

    ``T`` is a subset of ``{1..n}``; ``a_t = 0`` for ``t <= 0``.  Terms whose
    upper index exceeds ``k = |T|`` are skipped.
    """
    a = sorted(T)
    k = len(a)
    if len(set(a)) != k:
        raise ValueError("T must not repeat elements")

    def at(t: int) -> int:
        return 0 if t <= 0 else a[t - 1]

    total = 0
    for i in range(abs(k - c) // p + 1):
        idx = c + i * p
        if idx > k:
            continue
        total += at(idx) - at(idx - 1)
    return total


@dataclass(frozen=True)
class ShiftProfile:
    n: int
    k: int
    p: int
    c: int
    counts: dict[int, int]

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def __getitem__(self, d: int) -> int:
        return self.counts.get(d, 0)


def shift_profile_oracle(n: int, k: int, p: int, c: int) -> ShiftProfile:
    if binomial(n, k) > MAX_SUBSETS:
        raise CapExceededError(f"C({n},{k}) subsets exceeds the cap {MAX_SUBSETS}")
    counts: dict[int, int] = {}
    for T in itertools.combinations(range(1, n + 1), k):
        d = shift(T, c, p)
        counts[d] = counts.get(d, 0) + 1
    return ShiftProfile(n, k, p, c, dict(sorted(counts.items())))


@dataclass(frozen=True)
class PhiClosedForm:
    with_prefactor: Fraction
    without_prefactor: int


def phi_closed_form(n: int, k: int, p: int, c: int, d: int) -> PhiClosedForm:
    """Both printed counts ``C(d-1, m-1) C(n-d, m)`` with ``m = floor(|k-c|/(p-1))``."""
    if p < 2:
        raise ValueError(f"p must be >= 2, got {p}")
    if not 0 <= c <= p:
        raise ValueError(f"c must lie in [0, {p}], got {c}")
    if not k <= d <= n - k:
        raise ValueError(f"d = {d} outside [{k}, {n - k}]")
    m = abs(k - c) // (p - 1)
    count = binomial_or_zero(d - 1, m - 1) * binomial_or_zero(n - d, m)
    return PhiClosedForm(Fraction(count, p ** k), count)


@dataclass(frozen=True)
class PhiCheck:
    profile: ShiftProfile
    rows: tuple[tuple[int, int, Fraction, int], ...]  # (d, oracle, with, without)
    mass_outside: int

    @property
    def with_prefactor_matches(self) -> bool:
        return self.mass_outside == 0 and all(o == w for _, o, w, _ in self.rows)

    @property
    def without_prefactor_matches(self) -> bool:
        return self.mass_outside == 0 and all(o == wo for _, o, _, wo in self.rows)


def phi_check(n: int, k: int, p: int, c: int) -> PhiCheck:
    profile = shift_profile_oracle(n, k, p, c)
    rows = []
    for d in range(k, n - k + 1):
        cf = phi_closed_form(n, k, p, c, d)
        rows.append((d, profile[d], cf.with_prefactor, cf.without_prefactor))
    outside = sum(v for d, v in profile.counts.items() if not k <= d <= n - k)
    return PhiCheck(profile, tuple(rows), outside)


def expected_krawtchouk_oracle(params: WalkParams, k: int) -> Fraction:
    """``E[K_k(|s|_0)]`` from the exact zero-count law."""
    if not 0 <= k <= params.n:
        raise IndexError(f"k = {k} outside [0, {params.n}]")
    table = krawtchouk_table(params.n, params.p, "generalized")
    return dot(zero_count_distribution(params).probs, table.row(k))


@dataclass(frozen=True)
class MomentVector:
    p: int
    n: int
    values: tuple[Poly, ...]

    def at(self, delta: object) -> tuple[Fraction, ...]:
        return tuple(v(delta) for v in self.values)

    def vanishing_violations(self) -> tuple[int, ...]:
        """Indices ``k`` with ``k mod p != 0`` whose moment is not identically 0."""
        return tuple(k for k, v in enumerate(self.values) if k % self.p and not v.is_zero())


def expected_krawtchouk_polynomial(p: int, n: int, k: int) -> Poly:
    if not 0 <= k <= n:
        raise IndexError(f"k = {k} outside [0, {n}]")
    table = krawtchouk_table(n, p, "generalized")
    acc = Poly()
    for poly, kv in zip(zero_count_polynomial(p, n), table.row(k)):
        if kv:
            acc = acc + poly * kv
    return acc


def moment_vector(p: int, n: int) -> MomentVector:
    return MomentVector(p, n, tuple(expected_krawtchouk_polynomial(p, n, k) for k in range(n + 1)))


# (normalization, substitution) pairs for the printed expectation
CLOSED_FORM_VARIANTS = (
    ("inverse_p_power", "delta"),
    ("inverse_p_power", "lambda"),
    ("nonzero_power", "delta"),
    ("nonzero_power", "lambda"),
)


def variant_name(norm: str, subst: str) -> str:
    return f"{norm}/{subst}"


def closed_form_polynomial(p: int, n: int, k: int, norm: str, subst: str) -> Poly:
    """A printed closed form as a polynomial in ``delta``.

    ``sum_{d=k}^{n-k} C(d-1, m-1) C(n-d, m) x^d`` with ``m = floor(k/(p-1))``,
    scaled by ``1/p^k`` (``inverse_p_power``) or ``(p-1)^(n-k)``
    (``nonzero_power``); ``x`` is ``delta`` or ``delta/p``.
    """
    m = k // (p - 1)
    if norm == "inverse_p_power":
        scale = Fraction(1, p ** k)
    elif norm == "nonzero_power":
        scale = Fraction((p - 1) ** (n - k))
    else:
        raise ValueError(f"unknown normalization {norm!r}")
    if subst not in ("delta", "lambda"):
        raise ValueError(f"unknown substitution {subst!r}")
    coeffs = [Fraction(0)] * (n + 1)
    for d in range(k, n - k + 1):
        c = binomial_or_zero(d - 1, m - 1) * binomial_or_zero(n - d, m)
        if subst == "lambda":
            coeffs[d] = scale * Fraction(c, p ** d)
        else:
            coeffs[d] = scale * c
    return Poly(coeffs)


@dataclass(frozen=True)
class ClosedFormCheck:
    p: int
    n: int
    k: int
    delta: Fraction
    oracle: Fraction
    variants: dict[str, Fraction]

    @property
    def matches(self) -> tuple[str, ...]:
        return tuple(name for name, v in self.variants.items() if v == self.oracle)


def _check_closed_preconditions(p: int, n: int, k: int) -> None:
    if k < 1:
        raise ValueError("closed forms start at k >= p; use the oracle for k = 0")
    if k % p:
        raise ValueError(f"closed forms need k mod p == 0, got k={k}, p={p}")
    if 2 * k > n:
        raise ValueError(f"closed forms need k <= n/2, got k={k}, n={n}")


def expected_krawtchouk_closed(p: int, n: int, k: int, delta: object) -> ClosedFormCheck:
    _check_closed_preconditions(p, n, k)
    params = params_from_mixture(p, n, delta)
    variants = {
        variant_name(norm, subst): closed_form_polynomial(p, n, k, norm, subst)(params.delta)
        for norm, subst in CLOSED_FORM_VARIANTS
    }
    return ClosedFormCheck(p, n, k, params.delta, expected_krawtchouk_oracle(params, k), variants)


def closed_form_report(
    cells: Sequence[tuple[int, int]],
    deltas: Sequence[object] = ("1/4", "1/2"),
) -> dict:
    """Which printed variant, if any, equals the exact moment polynomial.

    A variant matches an instance ``(p, n, k)`` only if it agrees with the
    exact polynomial identically in ``delta``.
    """
    entries = []
    for p, n in cells:
        for k in range(p, n // 2 + 1, p):
            exact = expected_krawtchouk_polynomial(p, n, k)
            matched = [
                variant_name(norm, subst)
                for norm, subst in CLOSED_FORM_VARIANTS
                if closed_form_polynomial(p, n, k, norm, subst) == exact
            ]
            table = []
            for delta in deltas:
                chk = expected_krawtchouk_closed(p, n, k, delta)
                table.append(
                    {
                        "delta": str(chk.delta),
                        "oracle": str(chk.oracle),
                        **{name: str(v) for name, v in chk.variants.items()},
                    }
                )
            entries.append(
                {
                    "p": p,
                    "n": n,
                    "k": k,
                    "matched_variant": matched[0] if len(matched) == 1 else None,
                    "status": "verified" if len(matched) == 1 else "deviation",
                    "note": (
                        "no variant matches" if not matched
                        else "multiple variants match" if len(matched) > 1
                        else ""
                    ),
                    "table": table,
                }
            )
    return {"variants": [variant_name(*v) for v in CLOSED_FORM_VARIANTS], "instances": entries}


def increment_law(p: int, delta: object) -> tuple[Fraction, ...]:
    """``Pr[u = c]`` for an increment of ``(1-delta) U[Z_p] + delta 1_0``."""
    delta = as_fraction(delta)
    base = (1 - delta) / p
    return (base + delta,) + (base,) * (p - 1)


def increment_character_sum(p: int, delta: object) -> complex:
    return sum((root_of_unity(p, c) * float(w) for c, w in enumerate(increment_law(p, delta))), complex(0.0))


def increment_expectation(p: int, delta: object) -> Fraction:
    """``E[w_p^u]`` for one increment, returned exactly.

    The nonzero roots sum to the integer ``-1``; that sum is evaluated
    numerically and rounded (checked to ``1e-10``), the rest is rational.
    """
    law = increment_law(p, delta)
    z = increment_character_sum(p, delta)
    if abs(z.imag) > 1e-12:
        raise ArithmeticError(f"imaginary residue {z.imag} too large")
    nonzero_roots = round_to_integer(sum((root_of_unity(p, c) for c in range(1, p)), complex(0.0)))
    exact = law[0] + law[1] * nonzero_roots if p > 1 else law[0]
    if abs(z.real - float(exact)) > 1e-10:
        raise ArithmeticError(f"complex sum {z} disagrees with exact value {exact}")
    return exact
