"""Command-line front end: ``sticky-lab <command> [options]``.

Exit codes: 0 on success, 1 when an asserted verification check fails,
2 on usage errors, invalid biases and exceeded caps.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import chain, moments, spectral, tvd
from .chain import CapExceededError, WalkParams
from .numerics import as_fraction, zero_distribution
from .verification import CheckResult, run_suite

SCHEMA = "sticky-lab/1"
COMMANDS = ("sample", "dist", "moments", "tvd", "sweep", "verify", "spectral")

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    p: str | None = None
    n: str | None = None
    bias: str | None = None
    bias_kind: str = "delta"
    lam: str | None = None
    delta: str | None = None
    step: str | None = None
    seed: int = 0
    size: int = 10
    workers: int = 1
    output: str | None = None
    format: str | None = None
    extra: dict = field(default_factory=dict)


def parse_values(text: str, step: str | None = None, *, integer: bool = False) -> list[Fraction]:
    """``"a..b"`` (inclusive, stepped), ``"a,b,c"`` or a single value, all exact."""
    out: list[Fraction] = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            lo_s, hi_s = part.split("..", 1)
            lo, hi = as_fraction(lo_s), as_fraction(hi_s)
            inc = Fraction(1) if integer and step is None else (as_fraction(step) if step else None)
            if inc is None:
                raise UsageError(f"range {part!r} needs --step")
            if inc <= 0:
                raise UsageError("--step must be positive")
            x = lo
            while x <= hi:
                out.append(x)
                x += inc
        elif part:
            out.append(as_fraction(part))
    if not out:
        raise UsageError(f"empty value list {text!r}")
    if integer and any(x.denominator != 1 for x in out):
        raise UsageError(f"expected integers, got {text!r}")
    return out


def _single_int(text: str | None, name: str) -> int:
    if text is None:
        raise UsageError(f"--{name} is required")
    try:
        return int(text)
    except ValueError as exc:
        raise UsageError(f"--{name} must be an integer, got {text!r}") from exc


def build_params(config: RunConfig) -> WalkParams:
    p = _single_int(config.p, "p")
    n = _single_int(config.n, "n")
    if config.bias is None:
        raise UsageError("--bias is required")
    if "." in config.bias or "e" in config.bias.lower():
        raise UsageError(f"--bias must be an exact fraction string such as 3/10, got {config.bias!r}")
    try:
        bias = Fraction(config.bias)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"invalid bias {config.bias!r}") from exc
    if config.bias_kind == "lambda":
        return chain.params_from_paper_lambda(p, n, bias)
    return chain.params_from_mixture(p, n, bias)


def _params_json(params: WalkParams) -> dict:
    return {
        "p": params.p,
        "n": params.n,
        "delta": str(params.delta),
        "paper_lambda": str(params.paper_lambda),
        "stay_prob": str(params.stay_prob),
    }


def _csv_text(header: Sequence[str], rows: Sequence[Sequence[object]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _json_text(payload: dict) -> str:
    return json.dumps({"schema": SCHEMA, **payload}, indent=2, sort_keys=True) + "\n"


def emit_verification_report(results: Sequence[CheckResult], instance: dict | None = None) -> dict:
    if not results:
        raise ValueError("no verification ran")
    counts = {s: sum(r.status == s for r in results) for s in ("verified", "deviation", "skipped")}
    return {
        "schema": SCHEMA,
        "instance": instance or {},
        "checks": [r.to_dict() for r in results],
        "summary": {
            **counts,
            "asserted_failures": [r.id for r in results if r.failed],
        },
    }


def _cmd_sample(config: RunConfig, fmt: str) -> tuple[str, int]:
    params = build_params(config)
    if config.size < 1:
        raise UsageError("--size must be positive")
    sampler = chain.sample_walks_increments if config.extra.get("increments") else chain.sample_walks
    walks = sampler(params, config.size, config.seed)
    rows = [["".join(str(int(x)) if params.p <= 10 else f"{int(x)} " for x in w).strip(), int((w == 0).sum())] for w in walks]
    if fmt == "csv":
        return _csv_text(["walk", "zero_count"], rows), EXIT_OK
    return _json_text(
        {
            "command": "sample",
            "params": _params_json(params),
            "seed": config.seed,
            "walks": [[int(x) for x in w] for w in walks],
            "zero_counts": [r[1] for r in rows],
        }
    ), EXIT_OK


def _cmd_dist(config: RunConfig, fmt: str) -> tuple[str, int]:
    params = build_params(config)
    probs = chain.zero_count_distribution(params).probs
    uniform = zero_distribution(params.n, params.p)
    if fmt == "csv":
        rows = [[l, tvd.format_rational(a), tvd.format_rational(b)] for l, (a, b) in enumerate(zip(probs, uniform))]
        return _csv_text(["zeros", "walk_prob", "uniform_prob"], rows), EXIT_OK
    return _json_text(
        {
            "command": "dist",
            "params": _params_json(params),
            "walk_prob": [str(x) for x in probs],
            "uniform_prob": [str(x) for x in uniform],
        }
    ), EXIT_OK


def _cmd_moments(config: RunConfig, fmt: str) -> tuple[str, int]:
    params = build_params(config)
    values = [moments.expected_krawtchouk_oracle(params, k) for k in range(params.n + 1)]
    if fmt == "csv":
        rows = [[k, tvd.format_rational(v)] for k, v in enumerate(values)]
        return _csv_text(["k", "expected_krawtchouk"], rows), EXIT_OK
    return _json_text(
        {"command": "moments", "params": _params_json(params), "expected_krawtchouk": [str(v) for v in values]}
    ), EXIT_OK


def _cmd_tvd(config: RunConfig, fmt: str) -> tuple[str, int]:
    params = build_params(config)
    rep = tvd.tvd_report(params, with_printed=True)
    if fmt == "csv":
        row = rep.row()
        return _csv_text(tvd.CSV_COLUMNS, [[row[c] for c in tvd.CSV_COLUMNS]]), EXIT_OK
    return _json_text(
        {
            "command": "tvd",
            "params": _params_json(params),
            "tvd_exact": str(rep.tvd_exact),
            "expectation_form": str(rep.expectation_form),
            "cs_bound": rep.cs_bound,
            "second_moment": str(rep.second_moment),
            "printed_second_moment": str(rep.printed_second_moment),
            "theorem_bound": rep.theorem_bound,
            "ratio_tvd_over_lambda": rep.ratio_to_lambda,
            "ratio_tvd_over_delta": rep.ratio_to_delta,
        }
    ), EXIT_OK


def _sweep_grid(config: RunConfig) -> list[tuple[int, int, Fraction]]:
    if config.p is None or config.n is None:
        raise UsageError("sweep needs --p and --n")
    ps = [int(x) for x in parse_values(config.p, integer=True)]
    ns = [int(x) for x in parse_values(config.n, integer=True)]
    if (config.lam is None) == (config.delta is None):
        raise UsageError("sweep needs exactly one of --lambda or --delta")
    if config.lam is not None:
        grid = tvd.paper_lambda_grid(ps, ns, parse_values(config.lam, config.step))
    else:
        grid = [(p, n, d) for p in ps for n in ns for d in parse_values(config.delta, config.step) if 0 <= d < 1]
    if not grid:
        raise UsageError("sweep grid is empty")
    return grid


def _cmd_sweep(config: RunConfig, fmt: str) -> tuple[str, int]:
    result = tvd.sweep(_sweep_grid(config), workers=config.workers)
    if fmt == "csv":
        return result.to_csv(), EXIT_OK
    return _json_text(
        {
            "command": "sweep",
            "columns": list(tvd.CSV_COLUMNS),
            "rows": [r.row() for r in result.reports],
            "skipped": [{"p": p, "n": n, "delta": d, "reason": why} for p, n, d, why in result.skipped],
            "sup_ratio_tvd_over_lambda_by_p": {str(p): v for p, v in result.sup_ratio_by_p("lambda").items()},
        }
    ), EXIT_OK


def _cmd_spectral(config: RunConfig, fmt: str) -> tuple[str, int]:
    params = build_params(config)
    chk = spectral.verify_expander(params)
    status = EXIT_OK if chk.ok else EXIT_FAILED
    if fmt == "csv":
        rows = [[i, repr(c), repr(j)] for i, (c, j) in enumerate(zip(chk.closed.eigenvalues, chk.jacobi.eigenvalues))]
        return _csv_text(["index", "closed_form", "jacobi"], rows), status
    return _json_text(
        {
            "command": "spectral",
            "params": _params_json(params),
            "eigenvalues": list(chk.closed.eigenvalues),
            "jacobi_eigenvalues": list(chk.jacobi.eigenvalues),
            "second_largest_magnitude": chk.closed.second_largest_magnitude,
            "residual": chk.closed.residual,
            "witness_residual": chk.witness_residual,
            "ok": chk.ok,
        }
    ), status


def _cmd_verify(config: RunConfig, fmt: str) -> tuple[str, int]:
    if fmt != "json":
        raise UsageError("verify only writes JSON")
    params = build_params(config)
    results = run_suite(params, config.seed)
    report = emit_verification_report(results, {**_params_json(params), "seed": config.seed})
    status = EXIT_FAILED if report["summary"]["asserted_failures"] else EXIT_OK
    return json.dumps(report, indent=2, sort_keys=True) + "\n", status


HANDLERS = {
    "sample": (_cmd_sample, "csv"),
    "dist": (_cmd_dist, "csv"),
    "moments": (_cmd_moments, "csv"),
    "tvd": (_cmd_tvd, "json"),
    "sweep": (_cmd_sweep, "csv"),
    "verify": (_cmd_verify, "json"),
    "spectral": (_cmd_spectral, "json"),
}


def run(config: RunConfig, stdout=None) -> int:
    """Dispatch one command and write its artifact once, at the end."""
    stdout = stdout or sys.stdout
    if config.command not in HANDLERS:
        print(f"error: unknown command {config.command!r}", file=sys.stderr)
        return EXIT_USAGE
    handler, default_fmt = HANDLERS[config.command]
    try:
        text, status = handler(config, config.format or default_fmt)
    except (UsageError, CapExceededError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if config.output:
        with open(config.output, "w", newline="", encoding="utf-8") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return status


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sticky-lab", description="Exact checks for the sticky random walk on Z_p.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--p", required=True, help="alphabet size; sweep accepts a..b or a,b")
        sp.add_argument("--n", required=True, help="walk length; sweep accepts a..b or a,b")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--output", "-o")
        sp.add_argument("--format", choices=("csv", "json"))
        if name == "sweep":
            sp.add_argument("--lambda", dest="lam", help="bias in the stay = 1/p + (p-1)*lambda convention")
            sp.add_argument("--delta", help="mixture bias range")
            sp.add_argument("--step", help="step for a..b ranges")
            sp.add_argument("--workers", type=int, default=1)
        else:
            sp.add_argument("--bias", required=True, help="exact fraction string, e.g. 1/4")
            sp.add_argument("--bias-kind", choices=("delta", "lambda"), default="delta")
        if name == "sample":
            sp.add_argument("--size", type=int, default=10)
            sp.add_argument("--increments", action="store_true", help="use the increment sampler")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    ns = vars(args)
    config = RunConfig(
        command=ns["command"],
        p=ns["p"],
        n=ns["n"],
        bias=ns.get("bias"),
        bias_kind=ns.get("bias_kind", "delta"),
        lam=ns.get("lam"),
        delta=ns.get("delta"),
        step=ns.get("step"),
        seed=ns["seed"],
        size=ns.get("size", 10),
        workers=ns.get("workers", 1),
        output=ns["output"],
        format=ns["format"],
        extra={"increments": ns.get("increments", False)},
    )
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
