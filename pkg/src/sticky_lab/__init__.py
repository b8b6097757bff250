"""Exact verification workbench for the sticky random walk on ``Z_p``."""

from .chain import (
    CapExceededError,
    WalkParams,
    params_from_mixture,
    params_from_paper_lambda,
    zero_count_distribution,
)
from .tvd import tvd_exact, tvd_report

__all__ = [
    "CapExceededError",
    "WalkParams",
    "params_from_mixture",
    "params_from_paper_lambda",
    "tvd_exact",
    "tvd_report",
    "zero_count_distribution",
]
__version__ = "0.1.0"
