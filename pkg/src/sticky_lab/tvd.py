"""Total variation distance between the walk's zero count and the uniform one.

Everything here is computed from the exact DP law; the Krawtchouk route is
only ever compared against it.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Iterable, Sequence

from .chain import CapExceededError, WalkParams, ZeroCountDistribution, params_from_mixture, zero_count_distribution
from .krawtchouk import krawtchouk_table
from .numerics import as_fraction, dot, fraction_sqrt, zero_distribution

RADIUS = 1 / (1 + math.e)

CSV_COLUMNS = (
    "p",
    "n",
    "delta",
    "paper_lambda",
    "tvd_exact",
    "cs_bound",
    "second_moment",
    "theorem_bound",
    "ratio_tvd_over_lambda",
    "ratio_tvd_over_delta",
)


class DivergenceError(ValueError):
    """The geometric tail behind the bound does not converge."""


def probability_ratio(params: WalkParams) -> tuple[Fraction, ...]:
    """``q(l)``: walk probability of ``l`` zeros over the uniform probability."""
    walk = zero_count_distribution(params).probs
    uniform = zero_distribution(params.n, params.p)
    return tuple(a / b for a, b in zip(walk, uniform))


def tvd_direct(params: WalkParams) -> Fraction:
    walk = zero_count_distribution(params).probs
    uniform = zero_distribution(params.n, params.p)
    return sum((abs(a - b) for a, b in zip(walk, uniform)), Fraction(0)) / 2


def tvd_expectation_form(params: WalkParams) -> Fraction:
    """``E_b |q(b) - 1| / 2`` with ``b`` drawn from the uniform zero law."""
    q = probability_ratio(params)
    return dot(zero_distribution(params.n, params.p), [abs(x - 1) for x in q]) / 2


def tvd_exact(params: WalkParams) -> Fraction:
    direct = tvd_direct(params)
    via_ratio = tvd_expectation_form(params)
    if direct != via_ratio:
        raise ArithmeticError(f"TVD forms disagree: {direct} != {via_ratio}")
    return direct


@dataclass(frozen=True)
class ReconstructionReport:
    params: WalkParams
    reconstructed: tuple[Fraction, ...]
    oracle: ZeroCountDistribution
    deviations: tuple[tuple[int, Fraction, Fraction], ...]

    @property
    def matches(self) -> bool:
        return not self.deviations

    @property
    def distribution(self) -> ZeroCountDistribution:
        return ZeroCountDistribution(self.reconstructed)


def reconstruct_via_krawtchouk(params: WalkParams) -> ReconstructionReport:
    """Rebuild ``Pr[|s|_0 = l] = p^-n sum_k K_l(k) E[K_k(|s|_0)]`` and diff it."""
    if params.n > 20:
        raise CapExceededError(f"reconstruction is capped at n <= 20, got {params.n}")
    n, p = params.n, params.p
    table = krawtchouk_table(n, p, "generalized")
    oracle = zero_count_distribution(params)
    moments = [dot(oracle.probs, table.row(k)) for k in range(n + 1)]
    scale = Fraction(1, p ** n)
    recon = tuple(scale * sum((table(l, k) * m for k, m in enumerate(moments)), Fraction(0)) for l in range(n + 1))
    deviations = tuple((l, r, o) for l, (r, o) in enumerate(zip(recon, oracle.probs)) if r != o)
    return ReconstructionReport(params, recon, oracle, deviations)


@dataclass(frozen=True)
class SecondMomentReport:
    lhs: Fraction
    printed_rhs: Fraction
    constant_removed_rhs: Fraction

    @property
    def matches(self) -> bool:
        return self.lhs == self.printed_rhs


def second_moment(params: WalkParams) -> SecondMomentReport:
    """``E_b[(q(b) - 1)^2]`` directly and through squared moments.

    ``printed_rhs`` sums ``E[K_k]^2 / (C(n,k)(p-1)^(n-k))`` over ``k = 1..n``.
    ``constant_removed_rhs`` drops the constant row (``k = n`` in the
    generalized table) instead of ``k = 0``; by Parseval it equals ``lhs``.
    """
    n, p = params.n, params.p
    q = probability_ratio(params)
    w = zero_distribution(n, p)
    lhs = dot(w, [(x - 1) ** 2 for x in q])
    table = krawtchouk_table(n, p, "generalized")
    probs = zero_count_distribution(params).probs
    terms = [dot(probs, table.row(k)) ** 2 / table.norm(k) for k in range(n + 1)]
    printed = sum(terms[1:], Fraction(0))
    removed = sum(terms[:n], Fraction(0))
    return SecondMomentReport(lhs, printed, removed)


def theorem_bound(lam: float) -> float:
    """``sqrt(r^2 / (1 - r^2)) / 2`` with ``r = e*lam/(1-lam)``.

    Raises :class:`DivergenceError` once ``lam >= 1/(1+e)``, where the
    geometric series stops converging.
    """
    lam = float(lam)
    if lam < 0:
        raise ValueError(f"lambda must be >= 0, got {lam}")
    if lam >= RADIUS:
        raise DivergenceError(f"series does not converge for lambda = {lam} >= 1/(1+e) = {RADIUS:.6f}")
    rho = math.e * lam / (1 - lam)
    return 0.5 * math.sqrt(rho * rho / (1 - rho * rho))


@dataclass(frozen=True)
class TvdReport:
    params: WalkParams
    tvd_exact: Fraction
    expectation_form: Fraction
    cs_bound: float
    second_moment: Fraction
    theorem_bound: float | None
    ratio_to_lambda: float | None
    ratio_to_delta: float | None
    printed_second_moment: Fraction | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if self.tvd_exact != self.expectation_form:
            raise ArithmeticError("TVD differs from its expectation form")
        if not 0 <= self.tvd_exact <= 1:
            raise ArithmeticError(f"TVD {self.tvd_exact} outside [0, 1]")
        if float(self.tvd_exact) > self.cs_bound + 1e-12:
            raise ArithmeticError(f"TVD {self.tvd_exact} exceeds the Cauchy-Schwarz bound {self.cs_bound}")

    @property
    def cs_holds_exactly(self) -> bool:
        return (2 * self.tvd_exact) ** 2 <= self.second_moment

    def row(self) -> dict[str, str]:
        prm = self.params
        return {
            "p": str(prm.p),
            "n": str(prm.n),
            "delta": format_rational(prm.delta),
            "paper_lambda": format_rational(prm.paper_lambda),
            "tvd_exact": format_rational(self.tvd_exact),
            "cs_bound": _fmt_float(self.cs_bound),
            "second_moment": format_rational(self.second_moment),
            "theorem_bound": _fmt_float(self.theorem_bound),
            "ratio_tvd_over_lambda": _fmt_float(self.ratio_to_lambda),
            "ratio_tvd_over_delta": _fmt_float(self.ratio_to_delta),
        }


def tvd_report(params: WalkParams, *, with_printed: bool = False) -> TvdReport:
    tvd = tvd_exact(params)
    sm = second_moment(params)
    lam = params.paper_lambda
    try:
        bound = theorem_bound(float(lam))
    except DivergenceError:
        bound = None
    return TvdReport(
        params=params,
        tvd_exact=tvd,
        expectation_form=tvd_expectation_form(params),
        cs_bound=0.5 * fraction_sqrt(sm.lhs),
        second_moment=sm.lhs,
        theorem_bound=bound,
        ratio_to_lambda=float(tvd / lam) if lam else None,
        ratio_to_delta=float(tvd / params.delta) if params.delta else None,
        printed_second_moment=sm.printed_rhs if with_printed else None,
    )


def format_rational(x: Fraction) -> str:
    """30 significant digits, then the exact ``num/den``: ``"2.5...E-1|1/4"``."""
    with localcontext() as ctx:
        ctx.prec = 30
        dec = Decimal(x.numerator) / Decimal(x.denominator)
    return f"{dec:.29E}|{x.numerator}/{x.denominator}"


def parse_rational(cell: str) -> Fraction:
    return Fraction(cell.split("|", 1)[1])


def _fmt_float(x: float | None) -> str:
    return "" if x is None else repr(float(x))


@dataclass(frozen=True)
class SweepResult:
    reports: tuple[TvdReport, ...]
    skipped: tuple[tuple[int, int, str, str], ...]  # (p, n, delta, reason)

    def sup_ratio_by_p(self, against: str = "lambda") -> dict[int, float]:
        out: dict[int, float] = {}
        for r in self.reports:
            ratio = r.ratio_to_lambda if against == "lambda" else r.ratio_to_delta
            if ratio is None:
                continue
            out[r.params.p] = max(out.get(r.params.p, 0.0), ratio)
        return dict(sorted(out.items()))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\r\n")
        writer.writeheader()
        for r in self.reports:
            writer.writerow(r.row())
        return buf.getvalue()


def _cell(args: tuple[int, int, Fraction]) -> TvdReport | str:
    p, n, delta = args
    try:
        return tvd_report(params_from_mixture(p, n, delta))
    except (CapExceededError, ValueError) as exc:
        return str(exc)


def sweep(grid: Iterable[tuple[int, int, object]], workers: int | None = 1) -> SweepResult:
    """Exact TVD report per ``(p, n, delta)`` cell, in grid order.

    Cells are independent; ``workers > 1`` fans them out to processes.
    Invalid or over-cap cells are skipped with the reason kept.
    """
    cells = [(int(p), int(n), as_fraction(d)) for p, n, d in grid]
    if workers is not None and workers <= 1:
        results = [_cell(c) for c in cells]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_cell, cells, chunksize=4))
    reports, skipped = [], []
    for (p, n, d), res in zip(cells, results):
        if isinstance(res, str):
            skipped.append((p, n, str(d), res))
        else:
            reports.append(res)
    return SweepResult(tuple(reports), tuple(skipped))


def paper_lambda_grid(ps: Sequence[int], ns: Sequence[int], lams: Sequence[object]) -> list[tuple[int, int, Fraction]]:
    """Cells for bias values in the ``stay = 1/p + (p-1)*lam`` convention.

    Values with ``lam >= 1/p`` are dropped since they do not define a chain.
    """
    out = []
    for p in ps:
        for n in ns:
            for lam in lams:
                lam = as_fraction(lam)
                if 0 <= lam < Fraction(1, p):
                    out.append((p, n, p * lam))
    return out
