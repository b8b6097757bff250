"""Spectrum of the sticky transition matrix.

A matrix ``aI + b(J - I)`` on ``p`` states has eigenvalue ``a + (p-1)b`` on
the all-ones vector and ``a - b`` with multiplicity ``p - 1`` on its
complement.  For the sticky walk ``a - b = delta``.  A cyclic Jacobi
eigensolver serves as the independent cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .chain import StochasticMatrix, WalkParams, group_states, transition_matrix

EIG_TOL = 1e-10


@dataclass(frozen=True)
class SpectrumReport:
    eigenvalues: tuple[float, ...]
    second_largest_magnitude: float
    predicted: float | None = None

    @property
    def residual(self) -> float | None:
        if self.predicted is None:
            return None
        return abs(self.second_largest_magnitude - self.predicted)


def jacobi_eigenvalues(a: np.ndarray, tol: float = 1e-14, max_sweeps: int = 100) -> np.ndarray:
    """Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations."""
    a = np.array(a, dtype=float, copy=True)
    m = a.shape[0]
    if a.shape != (m, m) or not np.allclose(a, a.T, atol=0, rtol=0):
        raise ValueError("jacobi_eigenvalues needs a square symmetric matrix")
    scale = max(np.abs(a).max(), 1.0)
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.tril(a, -1) ** 2))
        if off <= tol * scale:
            break
        for i in range(m - 1):
            for j in range(i + 1, m):
                if abs(a[i, j]) <= 1e-300:
                    continue
                theta = (a[j, j] - a[i, i]) / (2 * a[i, j])
                t = np.sign(theta) / (abs(theta) + np.hypot(theta, 1.0)) if theta else 1.0
                c = 1 / np.sqrt(t * t + 1)
                s = t * c
                rot = np.eye(m)
                rot[i, i] = rot[j, j] = c
                rot[i, j] = s
                rot[j, i] = -s
                a = rot.T @ a @ rot
    else:
        raise ArithmeticError("Jacobi iteration did not converge")
    return np.sort(np.diag(a))[::-1]


def _closed_form(matrix: StochasticMatrix) -> np.ndarray | None:
    form = matrix.sticky_form()
    if form is None:
        return None
    a, b = form
    p = matrix.size
    top = float(a + (p - 1) * b)
    rest = float(a - b)
    return np.array(sorted([top] + [rest] * (p - 1), reverse=True))


def spectrum(
    matrix: StochasticMatrix,
    method: Literal["auto", "closed", "jacobi"] = "auto",
    predicted: float | None = None,
) -> SpectrumReport:
    if not matrix.is_symmetric():
        raise ValueError("spectrum needs a symmetric matrix")
    if method == "jacobi":
        eig = jacobi_eigenvalues(matrix.to_array())
    else:
        eig = _closed_form(matrix)
        if eig is None:
            if method == "closed":
                raise ValueError("matrix is not of sticky form; closed form unavailable")
            eig = jacobi_eigenvalues(matrix.to_array())
    if abs(eig[0] - 1) > EIG_TOL:
        raise ArithmeticError(f"top eigenvalue {eig[0]} is not 1")
    second = float(np.max(np.abs(eig[1:]))) if len(eig) > 1 else 0.0
    return SpectrumReport(tuple(float(x) for x in eig), second, predicted)


@dataclass(frozen=True)
class ExpanderCheck:
    closed: SpectrumReport
    jacobi: SpectrumReport
    witness_residual: float
    solver_gap: float

    @property
    def ok(self) -> bool:
        return (
            self.closed.residual is not None
            and self.closed.residual <= EIG_TOL
            and self.witness_residual <= EIG_TOL
            and self.solver_gap <= 1e-9
        )


def verify_expander(params: WalkParams) -> ExpanderCheck:
    """Check that the second eigenvalue magnitude equals ``delta``.

    Also applies the matrix to ``e_0 - (1/p) 1``, which must come back
    scaled by ``delta``.
    """
    matrix = transition_matrix(params)
    delta = float(params.delta)
    closed = spectrum(matrix, "closed", predicted=delta)
    jac = spectrum(matrix, "jacobi", predicted=delta)
    p = params.p
    v = -np.full(p, 1.0 / p)
    v[0] += 1.0
    witness = float(np.max(np.abs(matrix.to_array() @ v - delta * v)))
    gap = float(np.max(np.abs(np.array(closed.eigenvalues) - np.array(jac.eigenvalues))))
    return ExpanderCheck(closed, jac, witness, gap)


def grouped_second_eigenvalue(params: WalkParams, k: int) -> float:
    grouped, _ = group_states(params, k)
    return spectrum(grouped).second_largest_magnitude
