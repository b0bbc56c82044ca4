"""Open-system version of the cooling run.

Units: Hamiltonians are angular frequencies (rad/s), so the coherent part of
the master equation is ``-i [H, rho]`` with hbar absorbed.  Dissipators carry
their rates, ``L = sqrt(rate) * operator``.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy import sparse

from .fock import (
    DIAGONAL_TOL,
    FieldState,
    annihilation,
    mean_photon,
    off_diagonal_norm,
    photon_distribution,
    thermal_probabilities,
    vacuum_fidelity,
)
from .oracle import E, G, ramsey_matrix
from .protocol import P_MIN, PhaseSequence, PostselectionError, interaction_time_for_phase

TWO_PI = 2.0 * np.pi
TRACE_DRIFT_TOL = 1e-9
POSITIVITY_TOL = 1e-7


class IntegratorError(RuntimeError):
    """The fixed-step integrator produced an unphysical state."""


@dataclass(frozen=True)
class PhysicalParams:
    """Rates in SI angular units.  Defaults are the microwave cavity-QED values used for the Fig. 4 run."""

    g: float = TWO_PI * 49e3
    delta: float = TWO_PI * 245e3
    omega: float = TWO_PI * 51.1e9
    kappa: float = 1.0 / 130e-3
    gamma: float = 1.0 / 30e-3
    n_t_bath: float = 3.6
    gap: float = 82e-6
    dt: float = 1e-7

    def __post_init__(self):
        for name in ("kappa", "gamma", "n_t_bath", "gap"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.g <= 0 or self.delta == 0:
            raise ValueError("need g > 0 and delta != 0")

    @classmethod
    def from_hz(cls, g_hz=49e3, delta_hz=245e3, omega_hz=51.1e9, cavity_lifetime=130e-3,
                atom_lifetime=30e-3, **kw) -> "PhysicalParams":
        """Build from ordinary frequencies (the ``x/2pi`` values) and lifetimes in seconds.

        A lifetime of ``inf`` switches the corresponding loss off.
        """
        return cls(
            g=TWO_PI * g_hz,
            delta=TWO_PI * delta_hz,
            omega=TWO_PI * omega_hz,
            kappa=1.0 / cavity_lifetime,
            gamma=1.0 / atom_lifetime,
            **kw,
        )

    def max_stable_dt(self) -> float:
        """Largest step giving 100 steps per fastest timescale."""
        dispersive_period = TWO_PI * abs(self.delta) / self.g**2
        fastest_decay = max(self.kappa * (1 + self.n_t_bath), self.gamma * (1 + self.n_t_bath))
        bound = 0.01 * dispersive_period
        if fastest_decay > 0:
            bound = min(bound, 0.01 / fastest_decay)
        return bound

    def check_step(self):
        if self.dt > self.max_stable_dt():
            raise ValueError(f"dt={self.dt:.3e} s exceeds {self.max_stable_dt():.3e} s")

    def interaction_times(self, seq: PhaseSequence) -> list[float]:
        return [interaction_time_for_phase(self.g, self.delta, phi) for phi in seq]


@dataclass
class OpenRunResult:
    final_field: FieldState
    p_stage: list
    p_total: float
    vacuum_fidelity: float
    best_thermal_nbar: float
    fidelity_to_best_thermal: float
    interaction_times: list = field(default_factory=list)
    trajectory: list | None = None

    def to_dict(self) -> dict:
        return {
            "distribution": photon_distribution(self.final_field).tolist(),
            "p_stage": list(self.p_stage),
            "p_total": self.p_total,
            "vacuum_fidelity": self.vacuum_fidelity,
            "best_thermal": {"n_t": self.best_thermal_nbar, "fidelity": self.fidelity_to_best_thermal},
            "interaction_times_s": list(self.interaction_times),
        }


def _prepare(H, dissipators):
    """Effective non-Hermitian Hamiltonian and jump list for the rhs.

    Ladder and projector operators are very sparse, so jumps are kept in CSR
    form and a diagonal effective Hamiltonian is kept as a vector.
    """
    H = np.asarray(H, dtype=complex)
    h_eff = H.copy()
    jumps = []
    for L in dissipators:
        L = np.asarray(L, dtype=complex)
        if L.shape != H.shape:
            raise ValueError(f"dissipator shape {L.shape} does not match Hamiltonian {H.shape}")
        h_eff -= 0.5j * (L.conj().T @ L)
        if np.any(L):
            jumps.append((sparse.csr_matrix(L), sparse.csr_matrix(L.conj())))
    if np.count_nonzero(h_eff - np.diag(np.diagonal(h_eff))) == 0:
        h_eff = np.diagonal(h_eff).copy()
    return h_eff, jumps


def _rhs(rho, h_eff, jumps):
    if h_eff.ndim == 1:
        out = -1j * (h_eff[:, None] * rho - rho * h_eff.conj()[None, :])
    else:
        out = -1j * (h_eff @ rho - rho @ h_eff.conj().T)
    for L, L_conj in jumps:
        # rho @ L^dag == (conj(L) @ rho^T)^T
        out += L @ (L_conj @ rho.T).T
    return out


def lindblad_rhs(rho, H, dissipators) -> np.ndarray:
    """``-i[H, rho] + sum_i (L rho L^dag - {L^dag L, rho}/2)``."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != np.shape(H):
        raise ValueError(f"rho shape {rho.shape} does not match Hamiltonian {np.shape(H)}")
    return _rhs(rho, *_prepare(H, dissipators))


def _lowest_eigenvalue(rho):
    diag = np.diagonal(rho).real
    if np.count_nonzero(rho) == np.count_nonzero(diag):
        return diag.min()
    return np.linalg.eigvalsh(rho)[0]


def evolve(rho, H, dissipators, duration: float, dt: float, callback=None, callback_every: int = 0,
           check_positivity: bool = True) -> np.ndarray:
    """Fixed-step RK4 integration of the master equation over ``duration`` seconds.

    Whole steps of ``dt`` are taken and the last one is shortened to land on
    ``duration``.  ``callback(t, rho)`` is invoked every ``callback_every``
    steps when given.
    """
    if duration < 0:
        raise ValueError("duration must be non-negative")
    if dt <= 0:
        raise ValueError("dt must be positive")
    rho = np.array(rho, dtype=complex)
    if rho.shape != np.shape(H):
        raise ValueError(f"rho shape {rho.shape} does not match Hamiltonian {np.shape(H)}")
    h_eff, jumps = _prepare(H, dissipators)
    n_full = int(np.floor(duration / dt * (1 + 1e-12)))
    steps = [dt] * n_full
    rest = duration - n_full * dt
    if rest > 1e-12 * dt:
        steps.append(rest)
    t = 0.0
    for i, h in enumerate(steps, start=1):
        k1 = _rhs(rho, h_eff, jumps)
        k2 = _rhs(rho + 0.5 * h * k1, h_eff, jumps)
        k3 = _rhs(rho + 0.5 * h * k2, h_eff, jumps)
        k4 = _rhs(rho + h * k3, h_eff, jumps)
        rho = rho + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        rho = 0.5 * (rho + rho.conj().T)
        t += h
        if check_positivity:
            lowest = _lowest_eigenvalue(rho)
            if lowest < -POSITIVITY_TOL:
                raise IntegratorError(
                    f"eigenvalue {lowest:.3e} at t={t:.3e} s; reduce dt below {dt:.3e} s"
                )
        if callback is not None and callback_every and i % callback_every == 0:
            callback(t, rho)
    return rho


def field_dissipators(p: PhysicalParams, field_dim: int) -> list[np.ndarray]:
    a = annihilation(field_dim)
    return [np.sqrt(p.kappa * (1 + p.n_t_bath)) * a, np.sqrt(p.kappa * p.n_t_bath) * a.conj().T]


def joint_dissipators(p: PhysicalParams, field_dim: int) -> list[np.ndarray]:
    """Atomic decay/excitation on ``|e> <-> |g>`` and cavity decay/excitation, on atom (x) field.

    The atomic lowering operator is ``|g><e|``.
    """
    sigma_minus = np.zeros((2, 2), dtype=complex)
    sigma_minus[G, E] = 1.0
    i_f = np.eye(field_dim)
    i_a = np.eye(2)
    return [
        np.sqrt(p.gamma * (1 + p.n_t_bath)) * np.kron(sigma_minus, i_f),
        np.sqrt(p.gamma * p.n_t_bath) * np.kron(sigma_minus.conj().T, i_f),
    ] + [np.kron(i_a, L) for L in field_dissipators(p, field_dim)]


def dispersive_hamiltonian(p: PhysicalParams, field_dim: int) -> np.ndarray:
    """``(g**2/delta) a^dag a |e><e|`` in rad/s on atom (x) field."""
    proj_e = np.zeros((2, 2))
    proj_e[E, E] = 1.0
    return (p.g**2 / p.delta) * np.kron(proj_e, np.diag(np.arange(field_dim, dtype=float))).astype(complex)


def best_thermal_fit(rho: FieldState, xtol: float = 1e-6) -> tuple[float, float]:
    """Thermal occupancy maximizing the fidelity with ``rho``, by golden-section search."""
    dim = rho.dim
    p = photon_distribution(rho)

    def fid(n_t):
        q = thermal_probabilities(n_t, dim)
        q = q / q.sum()
        return float(np.sum(np.sqrt(p * q)) ** 2)

    lo, hi = 0.0, 10.0 * mean_photon(rho) + 1.0
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    c = hi - invphi * (hi - lo)
    d = lo + invphi * (hi - lo)
    fc, fd = fid(c), fid(d)
    while hi - lo > xtol:
        if fc > fd:
            hi, d, fd = d, c, fc
            c = hi - invphi * (hi - lo)
            fc = fid(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + invphi * (hi - lo)
            fd = fid(d)
    n_best = 0.5 * (lo + hi)
    # the bracket endpoint 0 is never sampled by the interior probes
    if fid(0.0) >= fid(n_best):
        n_best = 0.0
    return n_best, min(1.0, fid(n_best))


def _check_trace(rho, where):
    drift = abs(np.trace(rho).real - 1.0)
    if drift > TRACE_DRIFT_TOL:
        raise IntegratorError(f"trace drift {drift:.3e} after {where}")


def run_open_protocol(p: PhysicalParams, seq: PhaseSequence, rho0: FieldState,
                      trajectory_every: int = 0) -> OpenRunResult:
    """Atom-by-atom cooling run with cavity and atomic losses.

    Per atom: fresh ``|e>``, instantaneous Ramsey pulse, joint lossy evolution
    for the interaction time, second pulse, ``|g>`` postselection, then the
    field alone relaxes towards the bath for ``p.gap``.  With
    ``trajectory_every=m`` the mean photon number of the field is sampled every
    ``m`` integrator steps.
    """
    if abs(rho0.trace - 1.0) > TRACE_DRIFT_TOL:
        raise ValueError("initial field state must be normalized")
    dim = rho0.dim
    H = dispersive_hamiltonian(p, dim)
    jd = joint_dissipators(p, dim)
    fd = field_dissipators(p, dim)
    h_field = np.zeros((dim, dim), dtype=complex)
    r = np.kron(ramsey_matrix(), np.eye(dim))
    atom_e = np.zeros((2, 2), dtype=complex)
    atom_e[E, E] = 1.0
    taus = p.interaction_times(seq)

    traj = [] if trajectory_every else None
    clock = [0.0]
    n_op = np.arange(dim)

    def joint_sample(t, rho):
        traj.append((clock[0] + t, float(np.dot(n_op, np.diagonal(rho[:dim, :dim] + rho[dim:, dim:]).real))))

    def field_sample(t, rho):
        traj.append((clock[0] + t, float(np.dot(n_op, np.diagonal(rho).real))))

    rho_f = np.array(rho0.matrix)
    if traj is not None:
        field_sample(0.0, rho_f)
    p_stage = []
    for k, tau in enumerate(taus):
        joint = r @ np.kron(atom_e, rho_f) @ r.conj().T
        try:
            joint = evolve(joint, H, jd, tau, p.dt,
                           callback=joint_sample if traj is not None else None, callback_every=trajectory_every)
        except IntegratorError as exc:
            raise IntegratorError(f"interaction of atom {k + 1}: {exc}") from None
        _check_trace(joint, f"interaction of atom {k + 1}")
        clock[0] += tau
        joint = r @ joint @ r.conj().T
        block = joint[dim:, dim:]
        pk = float(np.trace(block).real)
        if pk < P_MIN:
            raise PostselectionError(f"atom {k + 1} cannot be detected in |g> (p = {pk:.3e})")
        p_stage.append(pk)
        rho_f = block / pk
        if rho0.is_diagonal and off_diagonal_norm(rho_f) > DIAGONAL_TOL:
            raise IntegratorError(f"field developed Fock coherences after atom {k + 1}")
        if p.gap > 0:
            try:
                rho_f = evolve(rho_f, h_field, fd, p.gap, p.dt,
                               callback=field_sample if traj is not None else None,
                               callback_every=trajectory_every)
            except IntegratorError as exc:
                raise IntegratorError(f"gap after atom {k + 1}: {exc}") from None
            _check_trace(rho_f, f"gap after atom {k + 1}")
            clock[0] += p.gap

    final = FieldState(rho_f / np.trace(rho_f).real)
    n_fit, f_fit = best_thermal_fit(final)
    return OpenRunResult(
        final_field=final,
        p_stage=p_stage,
        p_total=float(np.prod(p_stage)),
        vacuum_fidelity=vacuum_fidelity(final),
        best_thermal_nbar=n_fit,
        fidelity_to_best_thermal=f_fit,
        interaction_times=taus,
        trajectory=traj,
    )


def with_overrides(p: PhysicalParams, **kw) -> PhysicalParams:
    return replace(p, **{k: v for k, v in kw.items() if v is not None})


__all__ = [
    "IntegratorError",
    "OpenRunResult",
    "PhysicalParams",
    "best_thermal_fit",
    "dispersive_hamiltonian",
    "evolve",
    "field_dissipators",
    "joint_dissipators",
    "lindblad_rhs",
    "run_open_protocol",
    "with_overrides",
]
