#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""Tests for the input-output solver and the two-mode Fano description."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from waveguide_metamaterial.errors import ParameterError, ValidityWarning
from waveguide_metamaterial.fitting import lineshape_skewness
from waveguide_metamaterial.hamiltonian import (ArrayConfig,
                                                build_effective_hamiltonian)
from waveguide_metamaterial.inputoutput import (
    blind_spot_detuning, drive_vector, fano_background,
    fano_reflection_approx, fano_validity_halfwidth, fano_validity_mask,
    reflection_poles, scattering_from_dipoles, solve_dipole_moments,
    symmetric_dimer_solution)
from waveguide_metamaterial.qubit import (DriveParams, QubitParams,
                                          two_level_response)
from waveguide_metamaterial.transfer import BackgroundModel, chain_scattering
from waveguide_metamaterial.units import ghz, mhz

OMEGA0 = ghz(7.898)
GAMMA = mhz(6.4)
LOSSLESS = QubitParams(omega10=OMEGA0, gamma_rad=GAMMA)


def three_qubits(phi, delta, qubit=LOSSLESS):
    cfg = ArrayConfig.from_phi(3, phi, qubit)
    return cfg.with_qubit(2, qubit.detuned(delta))


def exact_reflection(cfg, omegas):
    sol = solve_dipole_moments(cfg, omegas, include_loss=False)
    return scattering_from_dipoles(sol, GAMMA)[0]


def test_single_qubit_matches_closed_form():
    q = QubitParams(omega10=OMEGA0, gamma_rad=GAMMA, gamma_nr=mhz(0.4))
    cfg = ArrayConfig.from_phi(1, 0.2, q)
    omegas = OMEGA0 + GAMMA * np.linspace(-3, 3, 61)
    r, t = scattering_from_dipoles(solve_dipole_moments(cfg, omegas), GAMMA)
    r_ref, t_ref = two_level_response(q, DriveParams(omega_p=omegas))
    np.testing.assert_allclose(r, r_ref, atol=1e-12)
    np.testing.assert_allclose(t, t_ref, atol=1e-12)


def test_scalar_frequency_gives_scalars():
    cfg = ArrayConfig.from_phi(2, 0.2, LOSSLESS)
    sol = solve_dipole_moments(cfg, OMEGA0)
    assert sol.psi.shape == (2,)
    r, t = scattering_from_dipoles(sol, GAMMA)
    assert isinstance(r, complex) and isinstance(t, complex)


def test_agrees_with_transfer_matrix():
    q = QubitParams(omega10=OMEGA0, gamma_rad=GAMMA, gamma_nr=mhz(0.3975))
    cfg = three_qubits(0.165, 0.3 * GAMMA, qubit=q)
    omegas = OMEGA0 + GAMMA * np.linspace(-5, 5, 1000)
    r, t = scattering_from_dipoles(solve_dipole_moments(cfg, omegas), GAMMA)
    chain = chain_scattering(cfg, BackgroundModel(),
                             DriveParams(omega_p=omegas), phase_mode="markov")
    assert np.max(np.abs(np.abs(chain.s21) - np.abs(t))) < 1e-8
    assert np.max(np.abs(chain.s11 - r)) < 1e-8


@settings(derandomize=True, max_examples=40, deadline=None)
@given(n=st.integers(1, 8), phi=st.floats(0.05, 3.0),
       x=st.floats(-6, 6))
def test_lossless_array_conserves_energy(n, phi, x):
    cfg = ArrayConfig.from_phi(n, phi, LOSSLESS)
    r, t = scattering_from_dipoles(
        solve_dipole_moments(cfg, OMEGA0 + x * GAMMA, include_loss=False),
        GAMMA)
    assert abs(r) ** 2 + abs(t) ** 2 == pytest.approx(1.0, abs=1e-9)


def test_reflection_poles_are_the_hamiltonian_eigenvalues():
    cfg = three_qubits(0.3, GAMMA)
    poles = reflection_poles(cfg)
    eigenvalues = np.linalg.eigvals(build_effective_hamiltonian(
        cfg, include_loss=True))
    np.testing.assert_allclose(poles, np.sort_complex(eigenvalues))
    assert np.all(poles.imag > 0)


def test_drive_vector():
    np.testing.assert_allclose(drive_vector(3, 0.5),
                               [1, np.exp(-0.5j), np.exp(-1j)])


def test_fano_background():
    assert fano_background(-0.375 * GAMMA, GAMMA, 0.15) == pytest.approx(
        0.93023j, abs=1e-5)
    assert fano_background(0.0, GAMMA, 0.15) == pytest.approx(
        0.23529 + 0.94118j, abs=1e-5)
    assert fano_background(0.375 * GAMMA, GAMMA, 0.15) == pytest.approx(
        0.45223 + 0.83663j, abs=1e-5)
    # superradiant mirror of the resonant pair without retardation
    assert fano_background(GAMMA, GAMMA, 0.0) == pytest.approx(
        3 / (2 - 3j))


@settings(derandomize=True, max_examples=30, deadline=None)
@given(phi=st.floats(0.01, 0.5))
def test_background_is_imaginary_at_the_blind_spot(phi):
    r0 = fano_background(blind_spot_detuning(phi, GAMMA), GAMMA, phi)
    assert abs(r0.real) < 1e-12


def test_blind_spot_detuning():
    assert 2 * blind_spot_detuning(0.15, GAMMA) / GAMMA == pytest.approx(
        -0.75)
    with pytest.raises(ParameterError):
        blind_spot_detuning(0.0, GAMMA)


def fano_window(x, phi=0.15, points=401):
    delta = 0.5 * x * GAMMA
    halfwidth = fano_validity_halfwidth(delta, GAMMA, phi)
    return delta, OMEGA0 + delta + np.linspace(-halfwidth, halfwidth, points)


def test_approximation_is_symmetric_at_the_blind_spot():
    delta, omegas = fano_window(-0.75)
    approx = fano_reflection_approx(omegas, OMEGA0, delta, GAMMA, 0.15)
    assert abs(lineshape_skewness(omegas, np.abs(approx) ** 2)) < 1e-6


@pytest.mark.parametrize("x, expected", [
    (-0.95, -0.0860), (-0.75, 0.1139), (0.0, 0.4979)])
def test_exact_lineshape_asymmetry(x, expected):
    delta, omegas = fano_window(x)
    power = np.abs(exact_reflection(three_qubits(0.15, delta), omegas)) ** 2
    assert lineshape_skewness(omegas, power) == pytest.approx(expected,
                                                              abs=5e-3)


def test_approximation_tracks_exact_reflection_near_resonance():
    delta, omegas = fano_window(0.0)
    exact = np.abs(exact_reflection(three_qubits(0.15, delta), omegas)) ** 2
    approx = np.abs(fano_reflection_approx(omegas, OMEGA0, delta, GAMMA,
                                           0.15)) ** 2
    assert np.max(np.abs(exact - approx)) < 0.01


@pytest.mark.parametrize("x", [-0.75, 0.75])
def test_approximation_tracks_exact_reflection_off_resonance(x):
    delta, omegas = fano_window(x)
    exact = np.abs(exact_reflection(three_qubits(0.15, delta), omegas)) ** 2
    approx = np.abs(fano_reflection_approx(omegas, OMEGA0, delta, GAMMA,
                                           0.15)) ** 2
    assert np.max(np.abs(exact - approx)) < 0.05


def test_approximation_warns_outside_its_window():
    delta = 0.0
    far = OMEGA0 + 10 * GAMMA
    assert not fano_validity_mask(far, OMEGA0, delta, GAMMA, 0.15)
    with pytest.warns(ValidityWarning):
        fano_reflection_approx(far, OMEGA0, delta, GAMMA, 0.15)


def test_approximation_tends_to_background_far_away():
    delta = 0.2 * GAMMA
    r0 = fano_background(delta, GAMMA, 0.15)
    far = fano_reflection_approx(OMEGA0 + delta + 1e6 * GAMMA, OMEGA0, delta,
                                 GAMMA, 0.15, warn=False)
    assert far == pytest.approx(1j * r0, rel=1e-5)


def test_reduced_system_without_retardation():
    phi = 1e-3
    delta = 3 * GAMMA
    omegas = OMEGA0 + delta + GAMMA * np.linspace(-0.5, 0.5, 21)
    dimer, psi_sr, psi_3 = symmetric_dimer_solution(omegas, OMEGA0, delta,
                                                    GAMMA, phi)
    exact = exact_reflection(three_qubits(phi, delta), omegas)
    np.testing.assert_allclose(dimer, exact, atol=1e-2)
    assert psi_sr.shape == psi_3.shape == (21,)
    single = symmetric_dimer_solution(OMEGA0, OMEGA0, delta, GAMMA, phi)
    assert isinstance(single[0], complex)
