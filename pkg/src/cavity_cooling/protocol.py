"""Ideal (lossless) dispersive-postselection cooling in closed form.

Each atom enters in ``|e>``, passes a pi/2 Ramsey pulse, picks up a phase
``phi * n`` on ``|e>`` inside the cavity, passes a second pi/2 pulse and is
detected.  Conditioned on the detection outcome the field transforms as

    g:  rho_{nn'} -> exp(i phi (n' - n) / 2) cos(phi n / 2) cos(phi n' / 2) rho_{nn'}
    e:  rho_{nn'} -> exp(i phi (n' - n) / 2) sin(phi n / 2) sin(phi n' / 2) rho_{nn'}

The coherence phase was read off the brute-force joint simulation in
:mod:`cavity_cooling.oracle`; it is the same for both outcomes and drops out
of every Fock-diagonal quantity.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import comb

import numpy as np

from .fock import (
    FieldState,
    NotDiagonalError,
    Truncation,
    photon_distribution,
    thermal_state,
    vacuum_fidelity,
)

P_MIN = 1e-300
OUTCOMES = ("g", "e")


class PostselectionError(ArithmeticError):
    """The requested detection record has (numerically) zero probability."""


@dataclass(frozen=True)
class PhaseSequence:
    """One-photon phase shifts, one per atom, in the order the atoms fly."""

    phases: tuple

    def __post_init__(self):
        phases = tuple(float(p) for p in self.phases)
        if len(phases) < 1:
            raise ValueError("a phase sequence needs at least one atom")
        if not all(np.isfinite(phases)):
            raise ValueError("phases must be finite")
        object.__setattr__(self, "phases", phases)

    def __len__(self):
        return len(self.phases)

    def __iter__(self):
        return iter(self.phases)

    def __getitem__(self, k):
        return self.phases[k]


@dataclass(frozen=True)
class PostselectionSpec:
    """Number of atoms that must be found in ``|e>`` (the rest in ``|g>``), order ignored."""

    n_excited: int = 0

    def check(self, n_atoms: int):
        if not 0 <= self.n_excited <= n_atoms:
            raise ValueError(f"n_excited={self.n_excited} outside 0..{n_atoms}")


@dataclass
class CoolingResult:
    n_t: float
    sequence: PhaseSequence
    final_state: FieldState
    p_post: float
    fidelity_trace: list = field(default_factory=list)
    p_trace: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "n_t": self.n_t,
            "phases": list(self.sequence.phases),
            "p_trace": list(self.p_trace),
            "fidelity_trace": list(self.fidelity_trace),
            "p_post": self.p_post,
            "distribution": photon_distribution(self.final_state).tolist(),
        }


def dyadic_sequence(n_atoms: int) -> PhaseSequence:
    """``[pi, pi/2, pi/4, ...]``: atom k removes Fock levels that are odd multiples of ``2**(k-1)``."""
    if n_atoms < 1:
        raise ValueError("n_atoms must be >= 1")
    return PhaseSequence(tuple(np.pi / 2.0**k for k in range(n_atoms)))


def phase_from_physics(g: float, delta: float, tau: float) -> float:
    """One-photon dispersive phase ``g**2 tau / delta`` (g, delta in rad/s, tau in s)."""
    if delta == 0:
        raise ValueError("detuning must be nonzero for the dispersive phase")
    if tau < 0:
        raise ValueError("interaction time must be non-negative")
    return g * g * tau / delta


def interaction_time_for_phase(g: float, delta: float, phi: float) -> float:
    if g <= 0:
        raise ValueError("coupling g must be positive")
    return phi * delta / (g * g)


def _amplitudes(phi: float, dim: int, outcome: str) -> np.ndarray:
    """Diagonal Kraus amplitudes, up to a global phase, for one atom and one outcome."""
    n = np.arange(dim)
    half = 0.5 * phi * n
    envelope = np.cos(half) if outcome == "g" else np.sin(half)
    return np.exp(-1j * half) * envelope


def _check_outcome(outcome: str):
    if outcome not in OUTCOMES:
        raise ValueError(f"outcome must be 'g' or 'e', got {outcome!r}")


def single_atom_filter(rho: FieldState, phi: float, outcome: str) -> tuple[FieldState, float]:
    """Conditional field state after one atom is detected in ``outcome``.

    Returns the unnormalized state and its trace (the detection probability).
    """
    _check_outcome(outcome)
    k = _amplitudes(phi, rho.dim, outcome)
    out = k[:, None] * rho.matrix * k.conj()[None, :]
    state = FieldState(out, normalized=False, tail_mass=rho.tail_mass)
    return state, state.trace


def pattern_weights(seq: PhaseSequence, outcomes, dim: int) -> np.ndarray:
    """Per-Fock-level probability of the ordered detection record ``outcomes``."""
    if len(outcomes) != len(seq):
        raise ValueError("need exactly one outcome per atom")
    n = np.arange(dim)
    w = np.ones(dim)
    for phi, o in zip(seq, outcomes):
        _check_outcome(o)
        half = 0.5 * phi * n
        w *= np.cos(half) ** 2 if o == "g" else np.sin(half) ** 2
    return w


def postselect_pattern(rho0: FieldState, seq: PhaseSequence, outcomes) -> tuple[FieldState, float]:
    """Closed form for an ordered detection record; valid for any input state.

    Only the overall Kraus operator is built, so the cost is one elementwise
    product regardless of the number of atoms.
    """
    if len(outcomes) != len(seq):
        raise ValueError("need exactly one outcome per atom")
    k = np.ones(rho0.dim, dtype=complex)
    for phi, o in zip(seq, outcomes):
        _check_outcome(o)
        k *= _amplitudes(phi, rho0.dim, o)
    out = k[:, None] * rho0.matrix * k.conj()[None, :]
    p = float(np.trace(out).real)
    if p < P_MIN:
        raise PostselectionError(f"detection record {''.join(outcomes)} has probability {p:.3e}")
    return FieldState(out / p, tail_mass=rho0.tail_mass), p


def symmetric_weights(seq: PhaseSequence, n_excited: int, dim: int) -> np.ndarray:
    """Per-level probability that exactly ``n_excited`` atoms click in ``|e>``, any order.

    This is the elementary symmetric sum over all ``C(N, n_excited)`` orderings,
    accumulated with the usual one-atom-at-a-time recurrence.
    """
    n = np.arange(dim)
    # coeff[j] = weight of records with j excitations so far
    coeff = np.zeros((n_excited + 1, dim))
    coeff[0] = 1.0
    for phi in seq:
        half = 0.5 * phi * n
        c2, s2 = np.cos(half) ** 2, np.sin(half) ** 2
        shifted = np.vstack([np.zeros((1, dim)), coeff[:-1]])
        coeff = coeff * c2 + shifted * s2
    return coeff[n_excited]


def postselect_evolve(rho0: FieldState, seq: PhaseSequence, spec: PostselectionSpec) -> tuple[FieldState, float]:
    """Field state and probability after ``len(seq)`` atoms with ``spec.n_excited`` found in ``|e>``.

    Restricted to Fock-diagonal inputs.  With ``n_excited == 0`` this is the
    cooling filter ``prod_k cos^2(phi_k n / 2)``.
    """
    spec.check(len(seq))
    if not rho0.is_diagonal:
        raise NotDiagonalError("postselect_evolve accepts Fock-diagonal states only; use postselect_pattern")
    w = symmetric_weights(seq, spec.n_excited, rho0.dim)
    p_n = photon_distribution(rho0) * w
    p = float(p_n.sum())
    if p < P_MIN:
        raise PostselectionError(
            f"postselection impossible: {spec.n_excited} of {len(seq)} atoms in |e> has probability {p:.3e}"
        )
    return FieldState.from_distribution(p_n / p, tail_mass=rho0.tail_mass), p


def ordered_patterns(n_atoms: int, n_excited: int):
    """All detection records with ``n_excited`` atoms in ``|e>``."""
    for idx in combinations(range(n_atoms), n_excited):
        yield tuple("e" if k in idx else "g" for k in range(n_atoms))


def n_orderings(n_atoms: int, n_excited: int) -> int:
    return comb(n_atoms, n_excited)


def cool_to_vacuum(n_t: float, n_atoms: int, trunc: Truncation) -> CoolingResult:
    """Run the dyadic cooling sequence atom by atom, keeping only ``|g>`` clicks."""
    if n_t < 0:
        raise ValueError("n_t must be non-negative")
    seq = dyadic_sequence(n_atoms)
    rho0 = thermal_state(n_t, trunc)
    p = photon_distribution(rho0)
    n = np.arange(trunc.dim)
    p_total = 1.0
    fidelities, probs = [], []
    for phi in seq:
        p = p * np.cos(0.5 * phi * n) ** 2
        stage = p.sum()
        if stage < P_MIN:
            raise PostselectionError("cooling filter removed all probability")
        p /= stage
        p_total *= stage
        fidelities.append(float(p[0]))
        probs.append(float(p_total))
    final = FieldState.from_distribution(p, tail_mass=rho0.tail_mass)
    return CoolingResult(n_t, seq, final, float(p_total), fidelities, probs)


def fidelity_sweep(n_t: float, max_atoms: int, trunc: Truncation) -> list[tuple[int, float, float]]:
    """Rows ``(N, vacuum fidelity, p_post)`` for ``N = 1..max_atoms``.

    Dyadic sequences are prefixes of each other, so one run gives every row.
    """
    res = cool_to_vacuum(n_t, max_atoms, trunc)
    return [(k + 1, f, p) for k, (f, p) in enumerate(zip(res.fidelity_trace, res.p_trace))]


def survivors(seq, trunc: Truncation, tol: float = 1e-12) -> list[int]:
    """Fock levels whose ``|g>``-filter weight exceeds ``tol``."""
    phases = tuple(seq)
    n = np.arange(trunc.dim)
    w = np.ones(trunc.dim)
    for phi in phases:
        w *= np.cos(0.5 * phi * n) ** 2
    return [int(k) for k in n[w > tol]]


def asymptotic_success(n_t: float) -> float:
    """Limit of the all-``|g>`` success probability: the initial vacuum population."""
    if n_t < 0:
        raise ValueError("n_t must be non-negative")
    return 1.0 / (1.0 + n_t)


__all__ = [
    "CoolingResult",
    "PhaseSequence",
    "PostselectionError",
    "PostselectionSpec",
    "asymptotic_success",
    "cool_to_vacuum",
    "dyadic_sequence",
    "fidelity_sweep",
    "interaction_time_for_phase",
    "n_orderings",
    "ordered_patterns",
    "pattern_weights",
    "phase_from_physics",
    "postselect_evolve",
    "postselect_pattern",
    "single_atom_filter",
    "survivors",
    "symmetric_weights",
    "vacuum_fidelity",
]
