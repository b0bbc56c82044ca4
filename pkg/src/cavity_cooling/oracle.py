"""Brute-force joint atom-field simulation of the Ramsey/dispersive sequence.

The atom is a two-level system in the basis ``(|e>, |g>)`` (index 0 is
``|e>``) and the joint space is ordered atom (x) field, so a joint index is
``atom * field_dim + n``.  Nothing here uses the closed forms of
:mod:`cavity_cooling.protocol`; it exists to check them.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fock import EIG_TOL, HERMITIAN_TOL, TRACE_TOL, FieldState
from .protocol import P_MIN, PhaseSequence, PostselectionError

E, G = 0, 1
ATOM_INDEX = {"e": E, "g": G}


@dataclass(frozen=True, eq=False)
class JointState:
    matrix: np.ndarray
    field_dim: int
    normalized: bool = True
    validate: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        object.__setattr__(self, "matrix", m)
        if not self.validate:
            return
        if m.shape != (2 * self.field_dim, 2 * self.field_dim):
            raise ValueError(f"joint matrix shape {m.shape} does not match 2 x {self.field_dim}")
        if np.max(np.abs(m - m.conj().T)) > HERMITIAN_TOL * max(1.0, np.max(np.abs(m))):
            raise ValueError("joint density matrix is not Hermitian")
        if self.normalized and abs(np.trace(m).real - 1.0) > TRACE_TOL:
            raise ValueError(f"joint state has trace {np.trace(m).real!r}")
        if np.linalg.eigvalsh(0.5 * (m + m.conj().T)).min() < -EIG_TOL:
            raise ValueError("joint density matrix is not positive")

    @classmethod
    def with_atom(cls, rho: FieldState, atom: str = "e") -> "JointState":
        """Product of a pure atomic level with the field state ``rho``."""
        a = np.zeros((2, 2), dtype=complex)
        a[ATOM_INDEX[atom], ATOM_INDEX[atom]] = 1.0
        return cls(np.kron(a, rho.matrix), rho.dim, normalized=rho.normalized, validate=False)

    def atom_populations(self) -> dict:
        d = self.field_dim
        diag = np.diagonal(self.matrix).real
        return {"e": float(diag[:d].sum()), "g": float(diag[d:].sum())}

    def field_partial(self) -> np.ndarray:
        d = self.field_dim
        return self.matrix[:d, :d] + self.matrix[d:, d:]


def ramsey_matrix() -> np.ndarray:
    """pi/2 Ramsey pulse in the ``(|e>, |g>)`` basis."""
    return np.array([[1.0, 1.0j], [1.0j, 1.0]]) / np.sqrt(2.0)


def dispersive_unitary(phi: float, field_dim: int) -> np.ndarray:
    """``exp(-i phi a^dag a |e><e|)`` on the joint space, as a dense matrix."""
    if field_dim < 2:
        raise ValueError("field_dim must be >= 2")
    n = np.arange(field_dim)
    phases = np.concatenate([np.exp(-1j * phi * n), np.ones(field_dim)])
    return np.diag(phases)


def atom_step_unitary(phi: float, field_dim: int) -> np.ndarray:
    r = np.kron(ramsey_matrix(), np.eye(field_dim))
    return r @ dispersive_unitary(phi, field_dim) @ r


def evolve_one_atom(joint: JointState, phi: float) -> JointState:
    u = atom_step_unitary(phi, joint.field_dim)
    # unitary conjugation cannot break Hermiticity, trace or positivity
    return JointState(u @ joint.matrix @ u.conj().T, joint.field_dim, normalized=joint.normalized, validate=False)


def measure_atom(joint: JointState, outcome: str) -> tuple[FieldState, float]:
    """Project the atom on ``outcome``; returns the unnormalized field block and its trace."""
    if outcome not in ATOM_INDEX:
        raise ValueError(f"outcome must be 'g' or 'e', got {outcome!r}")
    d = joint.field_dim
    a = ATOM_INDEX[outcome]
    block = joint.matrix[a * d:(a + 1) * d, a * d:(a + 1) * d]
    state = FieldState(block, normalized=False)
    return state, state.trace


def simulate_sequence(rho0: FieldState, seq: PhaseSequence, outcomes) -> tuple[FieldState, float]:
    """Send the atoms one at a time, each freshly prepared in ``|e>``, and postselect each click."""
    if len(outcomes) != len(seq):
        raise ValueError("need exactly one outcome per atom")
    rho = rho0
    p_total = 1.0
    for k, (phi, outcome) in enumerate(zip(seq, outcomes)):
        joint = evolve_one_atom(JointState.with_atom(rho, "e"), phi)
        cond, p = measure_atom(joint, outcome)
        if p < P_MIN:
            raise PostselectionError(f"atom {k + 1} cannot be detected in |{outcome}> (p = {p:.3e})")
        rho = FieldState(cond.matrix / p)
        p_total *= p
    return rho, p_total
