import itertools
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cavity_cooling.fock import FieldState, NotDiagonalError, Truncation, choose_truncation, fock_state, thermal_state, vacuum
from cavity_cooling.protocol import (
    PhaseSequence,
    PostselectionError,
    PostselectionSpec,
    asymptotic_success,
    cool_to_vacuum,
    dyadic_sequence,
    fidelity_sweep,
    interaction_time_for_phase,
    phase_from_physics,
    postselect_evolve,
    single_atom_filter,
    survivors,
    symmetric_weights,
)

G = 2 * np.pi * 49e3
DELTA = 2 * np.pi * 245e3


def enumerate_records(p, phases, n_excited):
    """Direct sum over every ordered record with the right excitation count."""
    n = np.arange(len(p))
    total = np.zeros(len(p))
    for rec in itertools.product("ge", repeat=len(phases)):
        if rec.count("e") != n_excited:
            continue
        w = np.ones(len(p))
        for phi, o in zip(phases, rec):
            w *= np.cos(phi * n / 2) ** 2 if o == "g" else np.sin(phi * n / 2) ** 2
        total += p * w
    return total


def test_dyadic_sequence():
    assert dyadic_sequence(1).phases == (np.pi,)
    assert np.allclose(dyadic_sequence(3).phases, [np.pi, np.pi / 2, np.pi / 4])
    for n in range(1, 20):
        assert dyadic_sequence(n)[-1] * 2 ** (n - 1) == pytest.approx(np.pi, rel=1e-15)
    with pytest.raises(ValueError):
        dyadic_sequence(0)


def test_phase_from_physics():
    tau = np.pi * DELTA / G**2
    assert tau == pytest.approx(51.02e-6, rel=1e-3)
    assert phase_from_physics(G, DELTA, 51.02e-6) == pytest.approx(np.pi, abs=1e-3)
    assert phase_from_physics(G, DELTA, 0.0) == 0.0
    assert phase_from_physics(G, DELTA, 2e-5) == pytest.approx(2 * phase_from_physics(G, DELTA, 1e-5))
    with pytest.raises(ValueError):
        phase_from_physics(G, 0.0, 1e-5)


def test_interaction_time_for_phase():
    tau = interaction_time_for_phase(G, DELTA, np.pi)
    assert tau == pytest.approx(51.0e-6, abs=0.05e-6)
    assert interaction_time_for_phase(G, DELTA, np.pi / 2) == pytest.approx(tau / 2)


@given(st.floats(0.0, 10.0))
def test_phase_time_round_trip(phi):
    tau = interaction_time_for_phase(G, DELTA, phi)
    assert phase_from_physics(G, DELTA, tau) == pytest.approx(phi, rel=1e-12, abs=1e-300)


def test_single_atom_filter_examples():
    state, p = single_atom_filter(vacuum(4), 1.234, "g")
    assert p == pytest.approx(1.0)
    assert np.allclose(state.matrix, vacuum(4).matrix)
    _, p = single_atom_filter(fock_state(1, Truncation(4)), np.pi, "g")
    assert p == pytest.approx(0.0, abs=1e-30)
    state, p = single_atom_filter(fock_state(1, Truncation(4)), np.pi, "e")
    assert p == pytest.approx(1.0)
    assert np.allclose(state.matrix, fock_state(1, Truncation(4)).matrix)
    with pytest.raises(ValueError):
        single_atom_filter(vacuum(2), 1.0, "x")


def test_single_atom_filter_outcomes_sum_to_one():
    rho = thermal_state(1.3, choose_truncation(1.3, 1e-9))
    _, pg = single_atom_filter(rho, 0.7, "g")
    _, pe = single_atom_filter(rho, 0.7, "e")
    assert pg + pe == pytest.approx(1.0, abs=1e-14)


def test_fig3_success_probability():
    rho, p = postselect_evolve(thermal_state(3.6, choose_truncation(3.6, 1e-10)), dyadic_sequence(5), PostselectionSpec(0))
    assert p == pytest.approx(0.217, abs=0.002)


def test_postselect_vacuum_input():
    seq = PhaseSequence((0.3, 1.7, 2.9))
    rho, p = postselect_evolve(vacuum(6), seq, PostselectionSpec(0))
    assert p == 1.0
    assert np.array_equal(rho.matrix, vacuum(6).matrix)
    for n_e in (1, 2, 3):
        with pytest.raises(PostselectionError, match="impossible"):
            postselect_evolve(vacuum(6), seq, PostselectionSpec(n_e))


def test_postselect_rejects_coherences_and_bad_counts():
    plus = FieldState(0.5 * np.array([[1, 1], [1, 1]]))
    with pytest.raises(NotDiagonalError):
        postselect_evolve(plus, dyadic_sequence(1), PostselectionSpec(0))
    with pytest.raises(ValueError):
        postselect_evolve(vacuum(2), dyadic_sequence(2), PostselectionSpec(3))


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 12), st.lists(st.floats(0, 2 * np.pi), min_size=1, max_size=5), st.data())
def test_symmetric_weights_match_enumeration(dim, phases, data):
    n_e = data.draw(st.integers(0, len(phases)))
    expected = enumerate_records(np.ones(dim), phases, n_e)
    assert np.allclose(symmetric_weights(PhaseSequence(phases), n_e, dim), expected, atol=1e-13)


def test_equal_phases_reduce_to_combinatorial_factor():
    phi, N, n_e, dim = 0.9, 4, 2, 10
    n = np.arange(dim)
    one_order = np.cos(phi * n / 2) ** (2 * (N - n_e)) * np.sin(phi * n / 2) ** (2 * n_e)
    got = symmetric_weights(PhaseSequence((phi,) * N), n_e, dim)
    assert np.allclose(got, comb(N, n_e) * one_order, atol=1e-14)


def test_cool_to_vacuum_fig3():
    res = cool_to_vacuum(3.6, 5, choose_truncation(3.6, 1e-10))
    assert res.fidelity_trace[-1] >= 0.999
    assert res.p_post == pytest.approx(0.217, abs=0.002)
    assert res.p_trace[-1] == res.p_post
    # residual mass lives on multiples of 32 only
    p = np.diagonal(res.final_state.matrix).real
    assert np.all(p[np.arange(len(p)) % 32 != 0] < 1e-25)


def test_cool_to_vacuum_fig2_convergence():
    res = cool_to_vacuum(100.0, 10, choose_truncation(100.0, 1e-8))
    assert res.fidelity_trace[-1] > 0.99


def test_cool_zero_temperature():
    res = cool_to_vacuum(0.0, 4, choose_truncation(0.0))
    assert res.fidelity_trace == [1.0] * 4
    assert res.p_post == 1.0


def test_sequential_equals_joint():
    trunc = choose_truncation(3.6, 1e-10)
    for n_atoms in range(1, 9):
        res = cool_to_vacuum(3.6, n_atoms, trunc)
        joint, p = postselect_evolve(thermal_state(3.6, trunc), dyadic_sequence(n_atoms), PostselectionSpec(0))
        assert res.p_post == pytest.approx(p, abs=1e-12)
        assert np.abs(res.final_state.matrix - joint.matrix).sum() / 2 < 1e-12


def test_sequential_single_atom_filters_equal_joint():
    rho = thermal_state(2.0, choose_truncation(2.0, 1e-10))
    seq = PhaseSequence((0.4, 2.2, 1.1))
    state, p_total = rho, 1.0
    for phi in seq:
        cond, p = single_atom_filter(state, phi, "g")
        state, p_total = cond.normalize(), p_total * p
    joint, p_joint = postselect_evolve(rho, seq, PostselectionSpec(0))
    assert p_total == pytest.approx(p_joint, abs=1e-12)
    assert np.abs(state.matrix - joint.matrix).sum() / 2 < 1e-12


def test_monotone_cooling_and_probability_bounds():
    n_t = 3.6
    res = cool_to_vacuum(n_t, 12, choose_truncation(n_t, 1e-10))
    assert all(b >= a - 1e-15 for a, b in zip(res.fidelity_trace, res.fidelity_trace[1:]))
    assert all(b <= a + 1e-15 for a, b in zip(res.p_trace, res.p_trace[1:]))
    assert all(1 / (1 + n_t) - 1e-12 <= p <= 1.0 for p in res.p_trace)
    assert res.p_post - asymptotic_success(n_t) < 1e-3


@settings(max_examples=30, deadline=None)
@given(st.permutations(list(dyadic_sequence(6).phases)))
def test_permutation_invariance(perm):
    rho = thermal_state(3.6, choose_truncation(3.6, 1e-8))
    a, pa = postselect_evolve(rho, dyadic_sequence(6), PostselectionSpec(0))
    b, pb = postselect_evolve(rho, PhaseSequence(perm), PostselectionSpec(0))
    assert pa == pytest.approx(pb, abs=1e-15)
    assert np.abs(a.matrix - b.matrix).max() < 1e-14


def test_survivors():
    assert survivors(dyadic_sequence(2), Truncation(16)) == [0, 4, 8, 12]
    assert survivors(dyadic_sequence(5), Truncation(64)) == [0, 32]
    assert survivors([], Truncation(5)) == [0, 1, 2, 3, 4]


@pytest.mark.parametrize("n_atoms", range(1, 9))
def test_survivors_divisible_by_power_of_two(n_atoms):
    surv = survivors(dyadic_sequence(n_atoms), Truncation(600))
    assert surv == list(range(0, 600, 2**n_atoms))


def test_asymptotic_success():
    assert asymptotic_success(3.6) == pytest.approx(0.21739, abs=1e-5)
    assert asymptotic_success(0.0) == 1.0
    xs = np.linspace(0, 50, 20)
    assert all(np.diff([asymptotic_success(x) for x in xs]) < 0)


def test_fidelity_sweep_rows():
    rows = fidelity_sweep(3.6, 6, choose_truncation(3.6, 1e-8))
    assert [r[0] for r in rows] == list(range(1, 7))
    for n, f, p in rows:
        res = cool_to_vacuum(3.6, n, choose_truncation(3.6, 1e-8))
        assert f == res.fidelity_trace[-1] and p == res.p_post


def test_one_atom_keeps_even_levels():
    trunc = choose_truncation(3.6, 1e-10)
    p = np.diagonal(thermal_state(3.6, trunc).matrix).real
    expected = p[0] / p[::2].sum()
    assert cool_to_vacuum(3.6, 1, trunc).fidelity_trace[0] == pytest.approx(expected, rel=1e-12)


def test_cooling_result_serialization():
    d = cool_to_vacuum(3.6, 3, choose_truncation(3.6, 1e-8)).to_dict()
    assert set(d) == {"n_t", "phases", "p_trace", "fidelity_trace", "p_post", "distribution"}
    assert len(d["phases"]) == 3 and len(d["distribution"]) == 76
