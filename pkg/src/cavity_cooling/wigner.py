"""Wigner functions of Fock-diagonal field states.

Convention: ``alpha = x + i p`` and ``W`` is normalized so that
``integral W dx dp = 1``; the vacuum is ``(2/pi) exp(-2 |alpha|^2)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fock import FieldState, NotDiagonalError, off_diagonal_norm, photon_distribution

W_MAX = 2.0 / np.pi


@dataclass(frozen=True)
class PhaseGrid:
    x_min: float = -4.0
    x_max: float = 4.0
    p_min: float = -4.0
    p_max: float = 4.0
    nx: int = 161
    np: int = 161

    def __post_init__(self):
        if not (self.x_max > self.x_min and self.p_max > self.p_min):
            raise ValueError("grid bounds must be increasing")
        if self.nx < 2 or self.np < 2:
            raise ValueError("grid needs at least 2 points per axis")

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.nx)

    @property
    def p(self) -> np.ndarray:
        return np.linspace(self.p_min, self.p_max, self.np)

    def mesh(self):
        """``(X, P)`` with shape ``(nx, np)``; row index runs over x."""
        return np.meshgrid(self.x, self.p, indexing="ij")

    def to_dict(self) -> dict:
        return {"x_min": self.x_min, "x_max": self.x_max, "p_min": self.p_min,
                "p_max": self.p_max, "nx": self.nx, "np": self.np}


def laguerre_series(weights, x) -> np.ndarray:
    """``sum_n weights[n] * L_n(x)`` by the three-term recurrence.

    ``(n+1) L_{n+1} = (2n + 1 - x) L_n - n L_{n-1}``, no factorials involved.
    """
    x = np.asarray(x, dtype=float)
    weights = np.asarray(weights, dtype=float)
    l_prev = np.ones_like(x)
    total = weights[0] * l_prev
    if len(weights) == 1:
        return total
    l_cur = 1.0 - x
    total = total + weights[1] * l_cur
    for n in range(1, len(weights) - 1):
        l_next = ((2 * n + 1 - x) * l_cur - n * l_prev) / (n + 1)
        l_prev, l_cur = l_cur, l_next
        if weights[n + 1] != 0.0:
            total = total + weights[n + 1] * l_cur
    return total


def wigner_at(rho: FieldState, alpha) -> np.ndarray:
    """Wigner function at complex points ``alpha`` (any shape)."""
    if off_diagonal_norm(rho.matrix) >= 1e-8:
        raise NotDiagonalError("Wigner series requires a Fock-diagonal state")
    p = photon_distribution(rho)
    r2 = np.abs(np.asarray(alpha)) ** 2
    signs = np.where(np.arange(len(p)) % 2 == 0, 1.0, -1.0)
    w = (2.0 / np.pi) * laguerre_series(signs * p, 4.0 * r2) * np.exp(-2.0 * r2)
    if not np.all(np.isfinite(w)):
        raise FloatingPointError("non-finite Wigner value")
    bound = W_MAX * (1.0 + 1e-9)
    if np.max(np.abs(w)) > bound:
        raise FloatingPointError(f"|W| = {np.max(np.abs(w))!r} exceeds 2/pi")
    return w


def wigner_diagonal(rho: FieldState, grid: PhaseGrid | None = None) -> np.ndarray:
    grid = grid or PhaseGrid()
    X, P = grid.mesh()
    return wigner_at(rho, X + 1j * P)


def thermal_wigner_analytic(n_t: float, alpha) -> np.ndarray | float:
    if n_t < 0:
        raise ValueError("n_t must be non-negative")
    s = 2.0 * n_t + 1.0
    w = (2.0 / np.pi) / s * np.exp(-2.0 * np.abs(alpha) ** 2 / s)
    return float(w) if np.ndim(w) == 0 else w


def grid_integral(w: np.ndarray, grid: PhaseGrid) -> float:
    """Trapezoidal integral of ``w`` over the grid."""
    return float(np.trapezoid(np.trapezoid(w, grid.p, axis=1), grid.x))
