"""The generalized sticky random walk on ``Z_p``.

The walk starts uniformly and at each step keeps its symbol with probability
``stay_prob`` or moves to each other symbol with probability ``switch_prob``.
The canonical bias is the mixture weight ``delta``: one step is
``(1 - delta) * Uniform(Z_p) + delta * Stay``.  Under the other common
parameterization (stay ``1/p + (p-1)*lam``) the same chain has
``delta = p * lam``; :func:`params_from_paper_lambda` builds it from ``lam``.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .numerics import Poly, as_fraction

WalkString = tuple[int, ...]

DEFAULT_MAX_ENUM = 2_000_000
MAX_DP_N = 10_000
MAX_POLY_N = 60


def max_enum() -> int:
    """Enumeration cap, overridable through ``STICKY_LAB_MAX_ENUM``."""
    raw = os.environ.get("STICKY_LAB_MAX_ENUM")
    if raw is None or not raw.strip():
        return DEFAULT_MAX_ENUM
    try:
        cap = int(raw)
    except ValueError as exc:
        raise ValueError(f"STICKY_LAB_MAX_ENUM must be an integer, got {raw!r}") from exc
    if cap < 1:
        raise ValueError(f"STICKY_LAB_MAX_ENUM must be positive, got {cap}")
    return cap


class CapExceededError(ValueError):
    """An exact computation was asked for beyond its size cap."""


@dataclass(frozen=True)
class WalkParams:
    p: int
    n: int
    delta: Fraction

    def __post_init__(self) -> None:
        if not isinstance(self.p, int) or self.p < 2:
            raise ValueError(f"p must be an integer >= 2, got {self.p!r}")
        if not isinstance(self.n, int) or self.n < 1:
            raise ValueError(f"n must be an integer >= 1, got {self.n!r}")
        delta = as_fraction(self.delta)
        if not 0 <= delta < 1:
            raise ValueError(f"delta must lie in [0, 1), got {delta}")
        object.__setattr__(self, "delta", delta)

    @property
    def stay_prob(self) -> Fraction:
        return Fraction(1, self.p) + self.delta * Fraction(self.p - 1, self.p)

    @property
    def switch_prob(self) -> Fraction:
        return (1 - self.delta) / self.p

    @property
    def paper_lambda(self) -> Fraction:
        """The bias in the ``stay = 1/p + (p-1)*lam`` convention."""
        return self.delta / self.p

    def with_n(self, n: int) -> "WalkParams":
        return WalkParams(self.p, n, self.delta)


def params_from_mixture(p: int, n: int, delta: object) -> WalkParams:
    return WalkParams(p, n, as_fraction(delta))


def params_from_paper_lambda(p: int, n: int, lam: object) -> WalkParams:
    lam = as_fraction(lam)
    if lam < 0:
        raise ValueError(f"lambda must be >= 0, got {lam}")
    if lam >= Fraction(1, p):
        raise ValueError(f"lambda must be < 1/p = 1/{p}, got {lam}")
    return WalkParams(p, n, p * lam)


@dataclass(frozen=True)
class StochasticMatrix:
    """Square matrix of exact rationals, validated as row-stochastic."""

    rows: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self) -> None:
        rows = tuple(tuple(as_fraction(x) for x in row) for row in self.rows)
        size = len(rows)
        if size == 0 or any(len(r) != size for r in rows):
            raise ValueError("matrix must be square and non-empty")
        for i, row in enumerate(rows):
            if any(x < 0 for x in row):
                raise ValueError(f"row {i} has a negative entry")
            if sum(row) != 1:
                raise ValueError(f"row {i} sums to {sum(row)}, not 1")
        object.__setattr__(self, "rows", rows)

    @property
    def size(self) -> int:
        return len(self.rows)

    def is_symmetric(self) -> bool:
        return all(self.rows[i][j] == self.rows[j][i] for i in range(self.size) for j in range(i))

    def sticky_form(self) -> tuple[Fraction, Fraction] | None:
        """``(diagonal, off_diagonal)`` when the matrix is ``aI + b(J - I)``."""
        diag = {self.rows[i][i] for i in range(self.size)}
        off = {self.rows[i][j] for i in range(self.size) for j in range(self.size) if i != j}
        if len(diag) != 1 or len(off) > 1:
            return None
        a = diag.pop()
        b = off.pop() if off else Fraction(0)
        return a, b

    def to_array(self) -> np.ndarray:
        return np.array([[float(x) for x in row] for row in self.rows], dtype=float)


def transition_matrix(params: WalkParams) -> StochasticMatrix:
    a, b = params.stay_prob, params.switch_prob
    return StochasticMatrix(tuple(tuple(a if i == j else b for j in range(params.p)) for i in range(params.p)))


def _check_string(params: WalkParams, s: Sequence[int]) -> WalkString:
    s = tuple(int(x) for x in s)
    if len(s) != params.n:
        raise ValueError(f"string has length {len(s)}, expected {params.n}")
    if any(not 0 <= x < params.p for x in s):
        raise ValueError(f"symbol out of range for p={params.p}: {s}")
    return s


def stay_count(s: Sequence[int]) -> int:
    return sum(1 for a, b in zip(s, s[1:]) if a == b)


def string_probability(params: WalkParams, s: Sequence[int]) -> Fraction:
    s = _check_string(params, s)
    stays = stay_count(s)
    switches = params.n - 1 - stays
    return Fraction(1, params.p) * params.stay_prob ** stays * params.switch_prob ** switches


def enumerate_distribution(params: WalkParams) -> dict[WalkString, Fraction]:
    """Exact probability of every string in ``Z_p^n`` (brute force)."""
    count = params.p ** params.n
    cap = max_enum()
    if count > cap:
        raise CapExceededError(f"p^n = {count} strings exceeds the enumeration cap {cap}")
    # probabilities only depend on the stay count
    by_stays = [
        Fraction(1, params.p) * params.stay_prob ** t * params.switch_prob ** (params.n - 1 - t)
        for t in range(params.n)
    ]
    return {s: by_stays[stay_count(s)] for s in itertools.product(range(params.p), repeat=params.n)}


def marginal_zero_count(dist: dict[WalkString, Fraction], n: int) -> tuple[Fraction, ...]:
    out = [Fraction(0)] * (n + 1)
    for s, pr in dist.items():
        out[s.count(0)] += pr
    return tuple(out)


@dataclass(frozen=True)
class ZeroCountDistribution:
    """Exact law of the number of zeros in a walk string."""

    probs: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        probs = tuple(as_fraction(x) for x in self.probs)
        if any(x < 0 for x in probs):
            raise ValueError("negative probability")
        if sum(probs) != 1:
            raise ValueError(f"probabilities sum to {sum(probs)}, not 1")
        object.__setattr__(self, "probs", probs)

    @property
    def n(self) -> int:
        return len(self.probs) - 1

    def __getitem__(self, ell: int) -> Fraction:
        return self.probs[ell]

    def __len__(self) -> int:
        return len(self.probs)

    def __iter__(self):
        return iter(self.probs)


def _zero_count_dp(p: int, n: int, stay, switch, one):
    """Shared DP over (zero count, current symbol is zero).

    The ``p - 1`` nonzero symbols are collapsed into one aggregate state;
    from the aggregate the walk returns to zero with ``switch`` and stays
    nonzero with ``stay + (p - 2) * switch``.
    """
    nz_stay = stay + (p - 2) * switch
    to_nz = (p - 1) * switch
    at_zero = [one * 0 for _ in range(n + 1)]
    at_nz = [one * 0 for _ in range(n + 1)]
    at_zero[1] = one * Fraction(1, p)
    at_nz[0] = one * Fraction(p - 1, p)
    for step in range(1, n):
        new_zero = [one * 0 for _ in range(n + 1)]
        new_nz = [one * 0 for _ in range(n + 1)]
        for z in range(step + 1):
            pz, pn = at_zero[z], at_nz[z]
            new_zero[z + 1] = new_zero[z + 1] + pz * stay + pn * switch
            new_nz[z] = new_nz[z] + pz * to_nz + pn * nz_stay
        at_zero, at_nz = new_zero, new_nz
    return [a + b for a, b in zip(at_zero, at_nz)]


def zero_count_distribution(params: WalkParams) -> ZeroCountDistribution:
    """Exact law of ``|s|_0`` by dynamic programming."""
    if params.n > MAX_DP_N:
        raise CapExceededError(f"n = {params.n} exceeds the DP cap {MAX_DP_N}")
    return ZeroCountDistribution(tuple(_zero_count_dp_int(params)))


def _zero_count_dp_int(params: WalkParams) -> list[Fraction]:
    # Integer DP: every step shares the denominator p * den(delta).
    p, n = params.p, params.n
    a, b = params.delta.numerator, params.delta.denominator
    w_stay = b + a * (p - 1)
    w_switch = b - a
    w_nz_stay = w_stay + (p - 2) * w_switch
    w_to_nz = (p - 1) * w_switch
    at_zero = [0] * (n + 1)
    at_nz = [0] * (n + 1)
    at_zero[1] = 1
    at_nz[0] = p - 1
    for step in range(1, n):
        new_zero = [0] * (n + 1)
        new_nz = [0] * (n + 1)
        for z in range(step + 1):
            pz, pn = at_zero[z], at_nz[z]
            if pz or pn:
                new_zero[z + 1] += pz * w_stay + pn * w_switch
                new_nz[z] += pz * w_to_nz + pn * w_nz_stay
        at_zero, at_nz = new_zero, new_nz
    denom = p * (p * b) ** (n - 1)
    return [Fraction(x + y, denom) for x, y in zip(at_zero, at_nz)]


@lru_cache(maxsize=256)
def zero_count_polynomial(p: int, n: int) -> tuple[Poly, ...]:
    """``Pr[|s|_0 = l]`` as exact polynomials in ``delta``."""
    if p < 2 or n < 1:
        raise ValueError(f"invalid (p, n) = ({p}, {n})")
    if n > MAX_POLY_N:
        raise CapExceededError(f"n = {n} exceeds the polynomial DP cap {MAX_POLY_N}")
    stay = Poly([Fraction(1, p), Fraction(p - 1, p)])
    switch = Poly([Fraction(1, p), Fraction(-1, p)])
    return tuple(_zero_count_dp(p, n, stay, switch, Poly.constant(1)))


def group_states(params: WalkParams, k: int) -> tuple[StochasticMatrix, WalkParams]:
    """Collapse ``Z_p`` into ``k`` equal blocks and return the induced chain.

    Block ``i`` holds symbols ``i*(p/k) .. (i+1)*(p/k) - 1`` so block 0
    contains symbol 0.  The induced chain is again sticky, with the same
    mixture weight ``delta``.
    """
    p = params.p
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    if p % k:
        raise ValueError(f"k = {k} does not divide p = {p}")
    size = p // k
    full = transition_matrix(params).rows
    block = [s // size for s in range(p)]
    grouped = []
    for bi in range(k):
        # any representative works; check they all agree
        reps = [s for s in range(p) if block[s] == bi]
        row_sets = set()
        for r in reps:
            row = [Fraction(0)] * k
            for t in range(p):
                row[block[t]] += full[r][t]
            row_sets.add(tuple(row))
        if len(row_sets) != 1:
            raise ArithmeticError("grouping is not lumpable")
        grouped.append(row_sets.pop())
    matrix = StochasticMatrix(tuple(grouped))
    form = matrix.sticky_form()
    if form is None:
        raise ArithmeticError("grouped chain is not sticky")
    expected_stay = Fraction(1, k) + p * params.paper_lambda * (1 - Fraction(1, k))
    if form[0] != expected_stay:
        raise ArithmeticError(f"grouped stay {form[0]} != {expected_stay}")
    # stay = 1/k + delta' (k-1)/k  =>  delta' = (stay - 1/k) * k/(k-1)
    effective_delta = (form[0] - Fraction(1, k)) * Fraction(k, k - 1)
    return matrix, WalkParams(k, params.n, effective_delta)


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed) & (2 ** 64 - 1)))


def sample_walks(params: WalkParams, size: int, seed: int) -> np.ndarray:
    """Draw ``size`` walks by the stay/switch law, shape ``(size, n)``."""
    rng = _rng(seed)
    p, n = params.p, params.n
    out = np.empty((size, n), dtype=np.int64)
    out[:, 0] = rng.integers(0, p, size=size)
    stay = float(params.stay_prob)
    for i in range(1, n):
        move = rng.random(size) >= stay
        offset = rng.integers(1, p, size=size) if p > 2 else np.ones(size, dtype=np.int64)
        out[:, i] = np.where(move, (out[:, i - 1] + offset) % p, out[:, i - 1])
    return out


def sample_walks_increments(params: WalkParams, size: int, seed: int) -> np.ndarray:
    """Draw walks as prefix sums of independent increments mod ``p``.

    The first increment is uniform; later ones are ``0`` with weight
    ``delta`` and uniform on ``Z_p`` otherwise.
    """
    rng = _rng(seed)
    p, n = params.p, params.n
    inc = rng.integers(0, p, size=(size, n))
    if n > 1:
        hold = rng.random((size, n - 1)) < float(params.delta)
        inc[:, 1:] = np.where(hold, 0, inc[:, 1:])
    return np.cumsum(inc, axis=1) % p


def sample_walk(params: WalkParams, seed: int) -> WalkString:
    return tuple(int(x) for x in sample_walks(params, 1, seed)[0])


def sample_walk_increments(params: WalkParams, seed: int) -> WalkString:
    return tuple(int(x) for x in sample_walks_increments(params, 1, seed)[0])


def zero_count_histogram(walks: np.ndarray) -> np.ndarray:
    n = walks.shape[1]
    return np.bincount((walks == 0).sum(axis=1), minlength=n + 1)


def block_zero_count_distribution(params: WalkParams, k: int | None = None) -> tuple[Fraction, ...]:
    """Law of the number of visits to block 0 when ``Z_p`` is cut into ``k`` blocks.

    Runs over the full ``p``-state chain without any symmetry collapse, so
    with ``k = p`` (the default) it is an independent route to the law of
    ``|s|_0``.
    """
    p, n = params.p, params.n
    k = p if k is None else k
    if k < 2 or p % k:
        raise ValueError(f"k = {k} must be >= 2 and divide p = {p}")
    size = p // k
    if n > MAX_DP_N:
        raise CapExceededError(f"n = {n} exceeds the DP cap {MAX_DP_N}")
    rows = transition_matrix(params).rows
    # state[(count, symbol)] -> probability
    state = {(1 if s < size else 0, s): Fraction(1, p) for s in range(p)}
    for _ in range(n - 1):
        nxt: dict[tuple[int, int], Fraction] = {}
        for (c, s), pr in state.items():
            for t in range(p):
                key = (c + (1 if t < size else 0), t)
                nxt[key] = nxt.get(key, Fraction(0)) + pr * rows[s][t]
        state = nxt
    out = [Fraction(0)] * (n + 1)
    for (c, _), pr in state.items():
        out[c] += pr
    return tuple(out)
