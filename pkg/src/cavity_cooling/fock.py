"""Truncated Fock-space states of a single cavity mode.

Density matrices are stored densely as ``(dim, dim)`` complex arrays with
Fock levels ``0 .. dim-1``.  Everything the cooling protocol produces is
diagonal in this basis, which is what makes the cheap fidelity below valid.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.constants import hbar, k as k_B

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-10
EIG_TOL = 1e-10
DIAGONAL_TOL = 1e-8


class TruncationError(ValueError):
    """Raised when a Fock truncation discards more mass than allowed."""


class NotDiagonalError(ValueError):
    """Raised when an operation restricted to Fock-diagonal states gets coherences."""


@dataclass(frozen=True)
class Truncation:
    dim: int
    tail_tol: float = 1e-8

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 2:
            raise ValueError(f"truncation dim must be an integer >= 2, got {self.dim}")
        if not 0.0 < self.tail_tol < 1.0:
            raise ValueError(f"tail_tol must lie in (0, 1), got {self.tail_tol}")


@dataclass(frozen=True, eq=False)
class FieldState:
    """Density matrix of the cavity mode.

    ``normalized=False`` marks a conditional (unnormalized) state whose trace
    is a probability.  ``tail_mass`` records probability discarded by the
    truncation before renormalization (zero unless built from a distribution
    with infinite support).
    """

    matrix: np.ndarray
    normalized: bool = True
    tail_mass: float = 0.0
    _diag: bool = field(default=False, init=False, repr=False)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
            raise ValueError(f"density matrix must be square, got shape {m.shape}")
        herm_err = np.max(np.abs(m - m.conj().T))
        if herm_err > HERMITIAN_TOL * max(1.0, np.max(np.abs(m))):
            raise ValueError(f"density matrix is not Hermitian (max deviation {herm_err:.3e})")
        m = 0.5 * (m + m.conj().T)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        diag = off_diagonal_norm(m) == 0.0
        object.__setattr__(self, "_diag", diag)

        evals = np.diagonal(m).real if diag else np.linalg.eigvalsh(m)
        if evals.min() < -EIG_TOL:
            raise ValueError(f"density matrix has negative eigenvalue {evals.min():.3e}")
        if self.normalized and abs(np.trace(m).real - 1.0) > TRACE_TOL:
            raise ValueError(f"normalized state has trace {np.trace(m).real!r}")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    @property
    def is_diagonal(self) -> bool:
        return self._diag or off_diagonal_norm(self.matrix) < DIAGONAL_TOL

    def normalize(self) -> "FieldState":
        tr = self.trace
        if tr <= 0.0:
            raise ValueError("cannot normalize a state with zero trace")
        return FieldState(self.matrix / tr, normalized=True, tail_mass=self.tail_mass)

    @classmethod
    def from_distribution(cls, probs, normalized=True, tail_mass=0.0) -> "FieldState":
        """Fock-diagonal state with the given photon-number populations."""
        p = np.asarray(probs, dtype=float)
        return cls(np.diag(p).astype(complex), normalized=normalized, tail_mass=tail_mass)


def off_diagonal_norm(matrix: np.ndarray) -> float:
    """Entrywise 1-norm of the off-diagonal part."""
    m = np.asarray(matrix)
    return float(np.abs(m).sum() - np.abs(np.diagonal(m)).sum())


def thermal_tail(n_t: float, dim: int) -> float:
    """Thermal probability mass on Fock levels ``>= dim``: ``(n_t/(1+n_t))**dim``."""
    if n_t == 0.0:
        return 0.0
    return (n_t / (1.0 + n_t)) ** dim


def thermal_probabilities(n_t: float, dim: int) -> np.ndarray:
    """Geometric distribution ``n_t**n / (1+n_t)**(n+1)`` on ``0..dim-1``, untruncated weights."""
    n = np.arange(dim)
    if n_t == 0.0:
        p = np.zeros(dim)
        p[0] = 1.0
        return p
    # log form avoids overflow of n_t**n for large n_t
    return np.exp(n * np.log(n_t) - (n + 1) * np.log1p(n_t))


def choose_truncation(n_t: float, tail_tol: float = 1e-8) -> Truncation:
    """Smallest dimension whose discarded thermal tail is below ``tail_tol``."""
    if n_t < 0:
        raise ValueError("n_t must be non-negative")
    if not 0.0 < tail_tol < 1.0:
        raise ValueError("tail_tol must lie in (0, 1)")
    if n_t == 0.0:
        return Truncation(2, tail_tol)
    ratio = n_t / (1.0 + n_t)
    dim = max(2, int(np.ceil(np.log(tail_tol) / np.log(ratio))))
    # guard the float estimate against off-by-one in either direction
    while dim > 2 and ratio ** (dim - 1) < tail_tol:
        dim -= 1
    while ratio**dim >= tail_tol:
        dim += 1
    return Truncation(dim, tail_tol)


def thermal_state(n_t: float, trunc: Truncation) -> FieldState:
    """Truncated thermal state, renormalized to unit trace.

    The discarded mass is kept on ``FieldState.tail_mass``.
    """
    if n_t < 0:
        raise ValueError("n_t must be non-negative")
    tail = thermal_tail(n_t, trunc.dim)
    if tail >= trunc.tail_tol:
        need = choose_truncation(n_t, trunc.tail_tol).dim
        raise TruncationError(
            f"dim={trunc.dim} discards {tail:.3e} of the thermal mass (tail_tol={trunc.tail_tol:g}); "
            f"need dim >= {need}"
        )
    p = thermal_probabilities(n_t, trunc.dim)
    return FieldState.from_distribution(p / p.sum(), tail_mass=tail)


def fock_state(n: int, trunc: Truncation) -> FieldState:
    if not 0 <= n < trunc.dim:
        raise ValueError(f"Fock level {n} outside truncation 0..{trunc.dim - 1}")
    p = np.zeros(trunc.dim)
    p[n] = 1.0
    return FieldState.from_distribution(p)


def vacuum(dim: int) -> FieldState:
    return fock_state(0, Truncation(dim))


def annihilation(dim: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1).astype(complex)


def number_operator(dim: int) -> np.ndarray:
    return np.diag(np.arange(dim, dtype=float)).astype(complex)


def photon_distribution(rho: FieldState) -> np.ndarray:
    p = np.diagonal(rho.matrix).real.copy()
    if p.min() < -EIG_TOL:
        raise ValueError(f"negative photon-number population {p.min():.3e}")
    return np.clip(p, 0.0, None)


def mean_photon(rho: FieldState) -> float:
    p = np.diagonal(rho.matrix).real
    return float(np.dot(np.arange(rho.dim), p))


def _require_diagonal(rho: FieldState, name: str):
    if not rho.is_diagonal:
        raise NotDiagonalError(
            f"{name} has off-diagonal 1-norm {off_diagonal_norm(rho.matrix):.3e} >= {DIAGONAL_TOL:g}"
        )


def fidelity(rho: FieldState, sigma: FieldState) -> float:
    """Fidelity ``(sum_n sqrt(p_n q_n))**2`` between two Fock-diagonal states.

    For commuting states this equals the Uhlmann fidelity; non-diagonal inputs
    are rejected rather than silently mishandled.
    """
    if rho.dim != sigma.dim:
        raise ValueError(f"dimension mismatch: {rho.dim} vs {sigma.dim}")
    _require_diagonal(rho, "rho")
    _require_diagonal(sigma, "sigma")
    p = photon_distribution(rho)
    q = photon_distribution(sigma)
    return float(min(1.0, np.sum(np.sqrt(p * q)) ** 2))


def vacuum_fidelity(rho: FieldState) -> float:
    """``<0|rho|0>``, the overlap with the zero-photon state."""
    return float(rho.matrix[0, 0].real)


def nbar_from_temperature(omega: float, T: float) -> float:
    """Bose-Einstein occupancy of a mode at angular frequency ``omega`` (rad/s) and temperature ``T`` (K)."""
    if T <= 0:
        raise ValueError("temperature must be positive")
    if omega <= 0:
        raise ValueError("omega must be positive")
    return float(1.0 / np.expm1(hbar * omega / (k_B * T)))


def temperature_from_nbar(omega: float, n_t: float) -> float:
    if n_t <= 0:
        raise ValueError("n_t must be positive")
    if omega <= 0:
        raise ValueError("omega must be positive")
    return float(hbar * omega / (k_B * np.log1p(1.0 / n_t)))
