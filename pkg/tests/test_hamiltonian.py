#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""Tests for the effective Hamiltonian and its eigenmodes."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from waveguide_metamaterial.errors import ParameterError, ValidityWarning
from waveguide_metamaterial.hamiltonian import (
    ArrayConfig, brightest_subradiant, build_effective_hamiltonian,
    dispersion_estimate, eigenmodes, interaction_matrix,
    inverse_hamiltonian_tridiagonal, perturbative_subradiant_rate)
from waveguide_metamaterial.qubit import QubitParams
from waveguide_metamaterial.units import ghz, mhz

OMEGA0 = ghz(7.898)
GAMMA = mhz(6.4)
QUBIT = QubitParams(omega10=OMEGA0, gamma_rad=GAMMA)

# brightest subradiant rate / Gamma10 from the exact eigenproblem
RATES_PHI_0165 = {3: 0.05396, 4: 0.13292, 5: 0.26173, 6: 0.45023,
                  7: 0.70659, 8: 1.03708, 9: 1.44590, 10: 1.93506,
                  11: 2.50428, 12: 3.15105}
RATES_PHI_005 = {4: 0.01242, 5: 0.02473, 6: 0.04313, 7: 0.06882,
                 8: 0.10295, 9: 0.14667, 10: 0.20110, 11: 0.26734,
                 12: 0.34644}


def subradiant_rate(n, phi):
    cfg = ArrayConfig.from_phi(n, phi, QUBIT)
    mode = brightest_subradiant(eigenmodes(build_effective_hamiltonian(cfg)))
    return mode.gamma_xi / GAMMA


def test_single_qubit_pole():
    cfg = ArrayConfig.from_phi(1, 0.2, QUBIT)
    modes = eigenmodes(build_effective_hamiltonian(cfg))
    assert len(modes) == 1
    assert modes[0].omega_xi == pytest.approx(OMEGA0 + 0.5j * GAMMA)
    assert modes[0].gamma_xi == pytest.approx(GAMMA)


def test_loss_enters_the_diagonal():
    q = QubitParams(omega10=OMEGA0, gamma_rad=GAMMA, gamma_nr=mhz(0.5))
    cfg = ArrayConfig.from_phi(3, 0.2, q)
    lossy = build_effective_hamiltonian(cfg, include_loss=True)
    clean = build_effective_hamiltonian(cfg)
    np.testing.assert_allclose(lossy - clean, 1j * mhz(0.5) * np.eye(3))


def test_dimer_eigenvalues_in_closed_form():
    phi = 0.15
    rates = sorted(m.gamma_xi / GAMMA for m in eigenmodes(
        build_effective_hamiltonian(ArrayConfig.from_phi(2, phi, QUBIT))))
    assert rates[0] == pytest.approx(1 - np.cos(phi), rel=1e-7)
    assert rates[0] == pytest.approx(0.01123, abs=1e-5)
    assert rates[1] == pytest.approx(1 + np.cos(phi), rel=1e-7)


@pytest.mark.parametrize("n", sorted(RATES_PHI_0165))
def test_subradiant_rate_at_phi_0165(n):
    assert subradiant_rate(n, 0.165) == pytest.approx(RATES_PHI_0165[n],
                                                      rel=1e-3)


@pytest.mark.parametrize("n", sorted(RATES_PHI_005))
def test_subradiant_rate_at_phi_005(n):
    assert subradiant_rate(n, 0.05) == pytest.approx(RATES_PHI_005[n],
                                                     rel=1e-3)


def test_modes_are_sorted_by_brightness():
    cfg = ArrayConfig.from_phi(6, 0.4, QUBIT)
    modes = eigenmodes(build_effective_hamiltonian(cfg))
    rates = [m.gamma_xi for m in modes]
    assert rates == sorted(rates, reverse=True)
    assert [m.rank for m in modes] == list(range(6))
    for m in modes:
        assert np.linalg.norm(m.vector) == pytest.approx(1.0)
        assert 1.0 <= m.participation <= 6.0 + 1e-9


@settings(derandomize=True, max_examples=40, deadline=None)
@given(n=st.integers(1, 12), phi=st.floats(0.01, 3.1))
def test_trace_sum_rule(n, phi):
    cfg = ArrayConfig.from_phi(n, phi, QUBIT)
    modes = eigenmodes(build_effective_hamiltonian(cfg))
    total = sum(m.omega_xi.imag for m in modes)
    assert total == pytest.approx(0.5 * n * GAMMA, rel=1e-9)


@settings(derandomize=True, max_examples=40, deadline=None)
@given(n=st.integers(2, 16), phi=st.floats(0.05, 3.09))
def test_tridiagonal_inverse(n, phi):
    h = interaction_matrix(n, phi, 1.0)
    inverse = inverse_hamiltonian_tridiagonal(n, phi, 1.0)
    np.testing.assert_allclose(h @ inverse, np.eye(n), atol=1e-9)


def test_tridiagonal_inverse_needs_two_qubits():
    with pytest.raises(ParameterError):
        inverse_hamiltonian_tridiagonal(1, 0.2, 1.0)


def test_perturbative_rate():
    assert perturbative_subradiant_rate(8, 1, 0.165, 1.0) == pytest.approx(
        1.1448, abs=1e-4)


@pytest.mark.parametrize("n", [6, 8, 12])
@pytest.mark.parametrize("phi", [0.05, 0.165])
def test_perturbative_rate_tracks_exact_rate(n, phi):
    approx = perturbative_subradiant_rate(n, 1, phi, 1.0)
    exact = subradiant_rate(n, phi)
    assert abs(approx - exact) / exact < 0.3


def test_perturbative_rate_warns_outside_its_regime():
    with pytest.warns(ValidityWarning):
        perturbative_subradiant_rate(8, 1, 0.5, 1.0)


@pytest.mark.parametrize("xi", [0, 8])
def test_mode_index_out_of_range(xi):
    with pytest.raises(ParameterError):
        perturbative_subradiant_rate(8, xi, 0.1, 1.0)
    with pytest.raises(ParameterError):
        dispersion_estimate(8, xi, 0.1, 1.0)


def test_dispersion_estimate():
    estimate = dispersion_estimate(8, 1, 0.165, 1.0)
    assert 2 * estimate.imag == pytest.approx(0.8885, abs=1e-3)
    assert estimate.real < 0


def test_eigenmodes_rejects_bad_input():
    with pytest.raises(ParameterError):
        eigenmodes(np.zeros((2, 3)))
    with pytest.raises(ParameterError):
        eigenmodes(np.full((2, 2), np.nan))
    with pytest.raises(ParameterError):
        eigenmodes(np.eye(5), max_n=4)


def test_single_emitter_has_no_subradiant_mode():
    modes = eigenmodes(build_effective_hamiltonian(
        ArrayConfig.from_phi(1, 0.2, QUBIT)))
    with pytest.raises(ParameterError):
        brightest_subradiant(modes)


def test_array_config_validation():
    with pytest.raises(ParameterError):
        ArrayConfig.from_phi(3, 4.0, QUBIT)
    with pytest.raises(ParameterError):
        ArrayConfig.uniform(0, QUBIT, 1e-3, 1.2e8)
    cfg = ArrayConfig.uniform(3, QUBIT, 400e-6, 1.2e8)
    assert cfg.phi == pytest.approx(OMEGA0 * 400e-6 / 1.2e8)
    assert cfg.phase_at(2 * OMEGA0) == pytest.approx(2 * cfg.phi)
    detuned = cfg.with_qubit(2, QUBIT.detuned(GAMMA))
    assert detuned.omegas[2] == pytest.approx(OMEGA0 + GAMMA)
    assert cfg.omegas[2] == OMEGA0


def test_reversed_array_keeps_the_geometry():
    qubits = [QUBIT.detuned(k * GAMMA) for k in range(3)]
    cfg = ArrayConfig(qubits=qubits, spacing=400e-6, phase_velocity=1.2e8,
                      omega_ref=OMEGA0)
    backward = cfg.reversed()
    assert backward.qubits == tuple(reversed(qubits))
    assert backward.phi == cfg.phi
    assert backward.reversed() == cfg


@pytest.mark.parametrize("n, phi", [(8, 0.165), (5, 0.7), (3, 0.15)])
def test_modes_are_transpose_orthogonal(n, phi):
    modes = eigenmodes(interaction_matrix(n, phi, 1.0))
    for i, left in enumerate(modes):
        for right in modes[i + 1:]:
            assert abs(left.vector @ right.vector) < 1e-8


@pytest.mark.parametrize("n", [8, 40])
def test_tridiagonal_inverse_matches_dense_inverse(n):
    dense = np.linalg.inv(interaction_matrix(n, 0.165, 1.0))
    np.testing.assert_allclose(
        inverse_hamiltonian_tridiagonal(n, 0.165, 1.0), dense, atol=1e-9)
