"""Overlaps between vibrational states of two equal-frequency harmonic
surfaces displaced along a common coordinate.

The coordinate is dimensionless (oscillator units, H = hbar w (p^2 + q^2)/2);
a displacement d corresponds to a Huang-Rhys factor S = d^2/2 = lambda/(hbar w).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np


def displacement_from_lambda(lam: float, hbar_omega: float) -> float:
    if hbar_omega <= 0:
        raise ValueError("hbar_omega must be positive")
    return math.sqrt(2.0 * abs(lam) / hbar_omega)


def lambda_from_displacement(d: float, hbar_omega: float) -> float:
    return 0.5 * hbar_omega * d * d


def _recurrence(d: float, size: int) -> np.ndarray:
    # F[M, N] = <M| N'> with |N'> centred at +d.  With b = a - alpha,
    #   sqrt(M+1) F[M+1, N] = sqrt(N) F[M, N-1] + alpha F[M, N]
    #   sqrt(N+1) F[0, N+1] = -alpha F[0, N]
    alpha = d / math.sqrt(2.0)
    F = np.zeros((size, size))
    F[0, 0] = math.exp(-0.5 * alpha * alpha)
    sq = np.sqrt(np.arange(size + 1))
    for N in range(size - 1):
        F[0, N + 1] = -alpha * F[0, N] / sq[N + 1]
    for M in range(size - 1):
        F[M + 1, 0] = alpha * F[M, 0] / sq[M + 1]
        F[M + 1, 1:] = (sq[1:size] * F[M, :-1] + alpha * F[M, 1:]) / sq[M + 1]
    return F


def fc_amplitude(M: int, N: int, d: float) -> float:
    """<M | N displaced by d>; F[0,0] = exp(-d^2/4) > 0."""
    if M < 0 or N < 0:
        raise ValueError("vibrational quantum numbers must be non-negative")
    return float(_recurrence(d, max(M, N) + 1)[M, N])


def orthonormality_defect(F: np.ndarray, rows: int | None = None) -> float:
    """max |sum_K F[M,K] F[M',K] - delta_MM'| over M, M' < rows."""
    rows = F.shape[0] if rows is None else rows
    sub = F[:rows]
    return float(np.abs(sub @ sub.T - np.eye(rows)).max()) if rows else 0.0


@dataclass(frozen=True)
class FcTable:
    d: float
    n_max: int
    F: np.ndarray

    def __getitem__(self, idx):
        return self.F[idx]

    def valid_rows(self, tol: float = 1e-8) -> int:
        """Number of leading rows that are orthonormal to ``tol`` within the truncated basis."""
        n = 0
        for rows in range(1, self.n_max + 2):
            if orthonormality_defect(self.F, rows) > tol:
                break
            n = rows
        return n

    def defect(self, rows: int | None = None) -> float:
        return orthonormality_defect(self.F, rows)


def build_fc_table(d: float, n_max: int, *, min_valid_rows: int = 1, tol: float = 1e-8) -> FcTable:
    """Full (n_max+1)^2 overlap table.

    Warns when fewer than ``min_valid_rows`` rows survive the orthonormality
    check, i.e. the basis is too small for the displacement.
    """
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    table = FcTable(d=d, n_max=n_max, F=_recurrence(d, n_max + 1))
    if min_valid_rows > 1:
        good = table.valid_rows(tol)
        if good < min_valid_rows:
            warnings.warn(
                f"FC table with n_max={n_max} is orthonormal to {tol:g} only for "
                f"{good} rows (d={d:.3f}); increase n_max",
                RuntimeWarning,
                stacklevel=2,
            )
    return table
