import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cavity_cooling.fock import (
    FieldState,
    NotDiagonalError,
    Truncation,
    TruncationError,
    choose_truncation,
    fidelity,
    fock_state,
    mean_photon,
    nbar_from_temperature,
    photon_distribution,
    temperature_from_nbar,
    thermal_state,
    thermal_tail,
    vacuum,
)

OMEGA = 2 * np.pi * 51.1e9


def brute_truncation(n_t, tol):
    """Sum the discarded geometric tail explicitly, increasing dim until it drops below tol."""
    dim = 2
    while True:
        tail = 1.0 - sum(n_t**n / (1 + n_t) ** (n + 1) for n in range(dim))
        if tail < tol:
            return dim
        dim += 1


def test_thermal_zero_temperature_is_vacuum():
    rho = thermal_state(0.0, Truncation(8))
    assert rho.matrix[0, 0] == 1.0
    assert np.count_nonzero(rho.matrix) == 1


def test_thermal_ground_population():
    rho = thermal_state(3.6, Truncation(64, 1e-6))
    assert rho.matrix[0, 0].real == pytest.approx(1 / 4.6, rel=1e-6)


def test_thermal_mean_after_renormalization():
    rho = thermal_state(3.6, Truncation(64, 1e-6))
    p = np.diagonal(rho.matrix).real
    assert sum(n * p[n] for n in range(64)) == pytest.approx(3.6, abs=1e-4)
    # the 1e-6 quoted accuracy needs a tighter truncation
    rho = thermal_state(3.6, choose_truncation(3.6, 1e-10))
    assert mean_photon(rho) == pytest.approx(3.6, abs=1e-6)


def test_thermal_records_discarded_mass():
    rho = thermal_state(3.6, Truncation(64, 1e-6))
    assert rho.tail_mass == pytest.approx((3.6 / 4.6) ** 64, rel=1e-12)
    assert rho.trace == pytest.approx(1.0, abs=1e-14)


def test_thermal_rejects_small_truncation_and_names_dim():
    with pytest.raises(TruncationError, match="need dim >= 76"):
        thermal_state(3.6, Truncation(20, 1e-8))


def test_fock_state():
    assert np.allclose(np.diagonal(fock_state(2, Truncation(4)).matrix).real, [0, 0, 1, 0])
    rho = fock_state(0, Truncation(5))
    assert np.trace(rho.matrix @ rho.matrix).real == pytest.approx(1.0)
    for n in range(6):
        assert mean_photon(fock_state(n, Truncation(6))) == n
    with pytest.raises(ValueError):
        fock_state(4, Truncation(4))


@pytest.mark.parametrize("n_t,tol", [(3.6, 1e-8), (0.5, 1e-6), (1.0, 1e-3), (0.017, 1e-10)])
def test_choose_truncation_matches_brute_force(n_t, tol):
    assert choose_truncation(n_t, tol).dim == brute_truncation(n_t, tol)


def test_choose_truncation_values():
    assert choose_truncation(0.0, 1e-8).dim == 2
    assert choose_truncation(3.6, 1e-8).dim == 76
    # iterate the closed-form tail for the large case, where direct sums lose precision
    d = 2
    while (100 / 101) ** d >= 1e-8:
        d += 1
    assert choose_truncation(100.0, 1e-8).dim == d == 1852


@given(st.floats(0.001, 200.0), st.floats(1e-12, 0.5))
def test_choose_truncation_is_minimal(n_t, tol):
    dim = choose_truncation(n_t, tol).dim
    assert thermal_tail(n_t, dim) < tol
    if dim > 2:
        assert thermal_tail(n_t, dim - 1) >= tol


def test_photon_distribution():
    assert np.array_equal(photon_distribution(vacuum(4)), [1, 0, 0, 0])
    assert photon_distribution(thermal_state(3.6, Truncation(64, 1e-6)))[0] == pytest.approx(0.2174, abs=1e-4)
    assert np.array_equal(photon_distribution(fock_state(3, Truncation(5))), [0, 0, 0, 1, 0])


def test_photon_distribution_clips_roundoff():
    rho = FieldState.from_distribution([1.0 + 1e-12, -1e-12], normalized=False)
    p = photon_distribution(rho)
    assert p.min() == 0.0


def test_fidelity_examples():
    trunc = choose_truncation(3.6, 1e-8)
    th = thermal_state(3.6, trunc)
    assert fidelity(th, th) == pytest.approx(1.0, abs=1e-14)
    assert fidelity(th, vacuum(trunc.dim)) == pytest.approx(th.matrix[0, 0].real, rel=1e-12)
    assert fidelity(th, vacuum(trunc.dim)) == pytest.approx(0.2174, abs=1e-4)
    cold = thermal_state(0.017, choose_truncation(0.017, 1e-12))
    assert fidelity(cold, vacuum(cold.dim)) == pytest.approx(1 / 1.017, rel=1e-10)
    assert fidelity(cold, vacuum(cold.dim)) == pytest.approx(0.983, abs=5e-4)


def test_fidelity_rejects_bad_inputs():
    with pytest.raises(ValueError, match="dimension"):
        fidelity(vacuum(3), vacuum(4))
    plus = 0.5 * np.array([[1, 1], [1, 1]])
    with pytest.raises(NotDiagonalError):
        fidelity(FieldState(plus), vacuum(2))


@settings(max_examples=50)
@given(st.lists(st.floats(0.0, 1.0), min_size=2, max_size=12), st.lists(st.floats(0.0, 1.0), min_size=2, max_size=12))
def test_fidelity_symmetric_and_bounded(a, b):
    n = min(len(a), len(b))
    a, b = np.array(a[:n]) + 1e-3, np.array(b[:n]) + 1e-3
    rho = FieldState.from_distribution(a / a.sum())
    sigma = FieldState.from_distribution(b / b.sum())
    f = fidelity(rho, sigma)
    assert 0.0 <= f <= 1.0
    assert f == pytest.approx(fidelity(sigma, rho), abs=1e-15)


def test_field_state_validation():
    with pytest.raises(ValueError, match="Hermitian"):
        FieldState(np.array([[0.5, 0.1], [0.3, 0.5]]))
    with pytest.raises(ValueError, match="negative"):
        FieldState(np.diag([1.5, -0.5]))
    with pytest.raises(ValueError, match="trace"):
        FieldState(np.diag([0.5, 0.4]))
    assert FieldState(np.diag([0.5, 0.4]), normalized=False).trace == pytest.approx(0.9)


def test_nbar_reference_pairings():
    assert nbar_from_temperature(OMEGA, 10.0) == pytest.approx(3.60, abs=0.02)
    assert nbar_from_temperature(OMEGA, 0.6) == pytest.approx(0.017, abs=0.001)
    assert temperature_from_nbar(OMEGA, 3.6) == pytest.approx(10.0, abs=0.1)
    assert temperature_from_nbar(OMEGA, 0.017) == pytest.approx(0.6, abs=0.01)


def test_nbar_rayleigh_jeans_limit():
    T = 1e4  # hbar*omega/(k_B T) ~ 2.5e-4
    from scipy.constants import hbar, k

    assert hbar * OMEGA / (k * T) < 0.01
    assert nbar_from_temperature(OMEGA, T) == pytest.approx(k * T / (hbar * OMEGA), rel=0.01)


def test_temperature_errors():
    with pytest.raises(ValueError):
        nbar_from_temperature(OMEGA, 0.0)
    with pytest.raises(ValueError):
        temperature_from_nbar(OMEGA, 0.0)


@given(st.floats(0.001, 1000.0))
def test_temperature_round_trip(n_t):
    T = temperature_from_nbar(OMEGA, n_t)
    assert nbar_from_temperature(OMEGA, T) == pytest.approx(n_t, rel=1e-10)
