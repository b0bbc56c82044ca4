"""Randomized cross-check of the closed forms against the joint-space oracle."""
from __future__ import annotations

from itertools import product

import numpy as np

from .fock import FieldState
from .oracle import simulate_sequence
from .protocol import (
    PhaseSequence,
    PostselectionError,
    PostselectionSpec,
    ordered_patterns,
    postselect_evolve,
    postselect_pattern,
)

TOL = 1e-10
FAULTS = ("corrupt-state", "corrupt-probability")


def trace_distance(a, b) -> float:
    a = a.matrix if isinstance(a, FieldState) else np.asarray(a)
    b = b.matrix if isinstance(b, FieldState) else np.asarray(b)
    d = a - b
    return float(0.5 * np.abs(np.linalg.eigvalsh(0.5 * (d + d.conj().T))).sum())


def random_diagonal_state(rng, dim) -> FieldState:
    return FieldState.from_distribution(rng.dirichlet(np.ones(dim)))


def random_mixed_state(rng, dim, rank=None) -> FieldState:
    rank = rank or dim
    a = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    m = a @ a.conj().T
    return FieldState(m / np.trace(m).real)


def _corrupt(state, p, fault):
    if fault == "corrupt-state":
        probs = np.diagonal(state.matrix).real[::-1]
        m = np.array(state.matrix)
        np.fill_diagonal(m, probs)
        return FieldState(m), p
    if fault == "corrupt-probability":
        return state, p * (1 + 1e-6)
    return state, p


def _oracle(rho, seq, pattern):
    try:
        return simulate_sequence(rho, seq, pattern)
    except PostselectionError:
        return None


def _closed(rho, seq, pattern):
    try:
        return postselect_pattern(rho, seq, pattern)
    except PostselectionError:
        return None


def run_equivalence(seed: int = 0, n_cases: int = 1000, max_dim: int = 16, max_atoms: int = 4,
                    fault: str | None = None, tol: float = TOL) -> dict:
    """Compare oracle and closed forms on ``n_cases`` random instances.

    Every instance draws a dimension, a phase list and a Fock-diagonal state,
    and checks every ordered detection record plus the order-free
    ``postselect_evolve`` for each excitation count.  A random non-diagonal
    state is checked against the ordered closed form as well.  ``fault``
    injects a deliberate error into the closed-form side.
    """
    if fault is not None and fault not in FAULTS:
        raise ValueError(f"unknown fault {fault!r}; choose from {FAULTS}")
    rng = np.random.default_rng(seed)
    report = {
        "seed": seed,
        "cases": 0,
        "comparisons": 0,
        "max_probability_deviation": 0.0,
        "max_trace_distance": 0.0,
        "max_symmetric_probability_deviation": 0.0,
        "max_symmetric_trace_distance": 0.0,
        "max_coherent_probability_deviation": 0.0,
        "max_coherent_trace_distance": 0.0,
        "tolerance": tol,
        "first_failure": None,
    }

    def record(kind, case, dp, td):
        report[f"max_{kind}probability_deviation"] = max(report[f"max_{kind}probability_deviation"], dp)
        report[f"max_{kind}trace_distance"] = max(report[f"max_{kind}trace_distance"], td)
        report["comparisons"] += 1
        if (dp > tol or td > tol) and report["first_failure"] is None:
            report["first_failure"] = {**case, "probability_deviation": dp, "trace_distance": td}

    for _ in range(n_cases):
        dim = int(rng.integers(2, max_dim + 1))
        n_atoms = int(rng.integers(1, max_atoms + 1))
        seq = PhaseSequence(tuple(rng.uniform(0.0, 2 * np.pi, n_atoms)))
        rho = random_diagonal_state(rng, dim)
        general = random_mixed_state(rng, dim)
        case = {"dim": dim, "phases": list(seq.phases), "distribution": np.diagonal(rho.matrix).real.tolist()}

        per_pattern = {}
        for pattern in product("ge", repeat=n_atoms):
            ref = _oracle(rho, seq, pattern)
            got = _closed(rho, seq, pattern)
            if got is not None:
                got = _corrupt(*got, fault)
            per_pattern[pattern] = ref
            c = {**case, "pattern": "".join(pattern)}
            if ref is None or got is None:
                if (ref is None) != (got is None):
                    record("", c, 1.0, 1.0)
                continue
            record("", c, abs(ref[1] - got[1]), trace_distance(ref[0], got[0]))

            ref_g = _oracle(general, seq, pattern)
            got_g = _closed(general, seq, pattern)
            if ref_g is not None and got_g is not None:
                record("coherent_", {**c, "general_state": True},
                       abs(ref_g[1] - got_g[1]), trace_distance(ref_g[0], got_g[0]))

        for n_e in range(n_atoms + 1):
            parts = [per_pattern[pat] for pat in ordered_patterns(n_atoms, n_e) if per_pattern[pat] is not None]
            p_ref = sum(p for _, p in parts)
            c = {**case, "n_excited": n_e}
            try:
                state, p = postselect_evolve(rho, seq, PostselectionSpec(n_e))
            except PostselectionError:
                if p_ref > 1e-300:
                    record("symmetric_", c, p_ref, 1.0)
                continue
            m_ref = sum(p_k * s.matrix for s, p_k in parts) / p_ref
            record("symmetric_", c, abs(p - p_ref), trace_distance(m_ref, state))
        report["cases"] += 1

    report["passed"] = report["first_failure"] is None
    return report
