# -*- coding: utf-8 -*-

"""Markovian input-output solution for a driven emitter array and the
two-mode Fano description of three emitters with one of them detuned.

The inter-qubit phase is always frozen at `cfg.phi`. Qubits sit at
x = 0, d, ..., (N - 1) d and the array is driven from the left by a
unit-amplitude wave.
"""

import logging
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, SingularSystemError, ValidityWarning
from .hamiltonian import build_effective_hamiltonian

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class DipoleSolution:
    """Dimensionless dipole amplitudes psi_s.

    For a frequency grid `psi` has shape (len(omega), N).
    """
    psi: np.ndarray
    omega: float
    phi: float

    @property
    def n(self):
        return self.psi.shape[-1]


def drive_vector(n, phi):
    """Incoming wave e^{-i (r - 1) phi} at each qubit."""
    return np.exp(-1j * phi * np.arange(n))


def solve_dipole_moments(cfg, omega, include_loss=True):
    """Solve sum_s (H_rs - omega delta_rs) psi_s = e^{-i (r-1) phi}.

    Parameters
    ----------
    cfg: ArrayConfig
    omega: float or array
        Drive frequency (rad/s). Arrays are solved as one batch.
    include_loss: bool
        Put each qubit's Gamma_nr on the diagonal so the result matches
        the lossy transfer matrix.
    """
    h = build_effective_hamiltonian(cfg, include_loss=include_loss)
    omega_arr = np.asarray(omega, dtype=float)
    if not np.all(np.isfinite(omega_arr)):
        raise ParameterError("drive frequency must be finite")
    n = cfg.n
    rhs = drive_vector(n, cfg.phi)
    system = h[None, :, :] - np.atleast_1d(omega_arr)[:, None, None] \
        * np.eye(n)[None, :, :]
    try:
        psi = np.linalg.solve(system, np.broadcast_to(
            rhs, (system.shape[0], n))[..., None])[..., 0]
    except np.linalg.LinAlgError:
        bad = None
        for w, block in zip(np.atleast_1d(omega_arr), system):
            if np.linalg.matrix_rank(block) < n:
                bad = float(w)
                break
        raise SingularSystemError("input-output system is singular",
                                  omega=bad)
    if omega_arr.ndim == 0:
        psi = psi[0]
    return DipoleSolution(psi=psi, omega=omega, phi=cfg.phi)


def scattering_from_dipoles(sol, gamma_rad):
    """Reflection and transmission radiated by the dipoles.

    r = -(i Gamma10 / 2) sum_s psi_s e^{-i (s-1) phi}
    t = 1 - (i Gamma10 / 2) sum_s psi_s e^{+i (s-1) phi}

    The reflected wave travels back to x = 0, hence the retarded phase
    e^{-i(s-1)phi}; the transmitted one is referred to the last qubit's
    frame. `r` is the reflection seen from the input port.
    """
    positions = np.arange(sol.n)
    back = np.exp(-1j * sol.phi * positions)
    forward = np.exp(1j * sol.phi * positions)
    r = -0.5j * gamma_rad * (sol.psi @ back)
    t = 1.0 - 0.5j * gamma_rad * (sol.psi @ forward)
    if np.ndim(r) == 0:
        return complex(r), complex(t)
    return r, t


def reflection_poles(cfg, include_loss=True):
    """Poles of r(omega): the eigenvalues of the effective Hamiltonian."""
    h = build_effective_hamiltonian(cfg, include_loss=include_loss)
    return np.sort_complex(np.linalg.eigvals(h))


def fano_background(delta, gamma_rad, phi):
    """Slowly varying reflection of three emitters when the third is
    detuned by `delta`, to first order in phi.

    r0 = 1 / (-i + (2 delta/Gamma10 + 5 phi)/3 + (4 i phi / 3) delta/Gamma10)
    For phi = 0 this is the superradiant mirror 3 / (-3i + 2 delta/Gamma10).
    """
    x = np.asarray(delta, dtype=float) / gamma_rad
    r0 = 1.0 / (-1j + (2.0 * x + 5.0 * phi) / 3.0
                + (4.0j * phi / 3.0) * x)
    if np.ndim(r0) == 0:
        return complex(r0)
    return r0


def fano_validity_halfwidth(delta, gamma_rad, phi):
    """Half width (1 - Im r0) Gamma10 / 2 of the narrow resonance; the
    two-mode expression is trusted within this distance of
    omega0 + delta."""
    r0 = fano_background(delta, gamma_rad, phi)
    return float((1.0 - np.imag(r0)) * 0.5 * gamma_rad)


def fano_validity_mask(omega, omega0, delta, gamma_rad, phi):
    halfwidth = fano_validity_halfwidth(delta, gamma_rad, phi)
    return np.abs(np.asarray(omega) - omega0 - delta) <= halfwidth


def fano_reflection_approx(omega, omega0, delta, gamma_rad, phi, warn=True):
    """Two-mode approximation of the reflection of three emitters near
    the resonance of the detuned one.

    r = i r0 (x + (Gamma10/2)(1/r0* - i)) / (x + (Gamma10/2)(r0 - i)),
    x = omega - omega0 - delta. Far from the narrow resonance the value
    tends to i r0.
    """
    r0 = fano_background(delta, gamma_rad, phi)
    if r0 == 0:
        raise ParameterError("background reflection r0 vanishes")
    if warn and not np.all(fano_validity_mask(omega, omega0, delta,
                                              gamma_rad, phi)):
        warnings.warn("two-mode Fano expression evaluated outside its "
                      "validity window", ValidityWarning, stacklevel=2)
    x = np.asarray(omega, dtype=float) - omega0 - delta
    half = 0.5 * gamma_rad
    r = 1j * r0 * (x + half * (1.0 / np.conj(r0) - 1j)) \
        / (x + half * (r0 - 1j))
    if np.ndim(r) == 0:
        return complex(r)
    return r


def blind_spot_detuning(phi, gamma_rad):
    """Detuning -5 phi Gamma10 / 2 at which the background reflection is
    purely imaginary and the narrow resonance appears as a symmetric
    peak."""
    if not phi > 0:
        raise ParameterError("phi must be > 0")
    return -2.5 * phi * gamma_rad


def symmetric_dimer_solution(omega, omega0, delta, gamma_rad, phi):
    """Reflection from the reduced two-mode system.

    The two resonant emitters are replaced by their symmetric
    combination psi_1 = psi_2 = psi_SR / sqrt(2); to leading order in phi
    its diagonal element is omega0 + i Gamma10. Returns r and the mode
    amplitudes (psi_SR, psi_3).
    """
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    e1, e2 = np.exp(-1j * phi), np.exp(-2j * phi)
    coupling = 0.5j * gamma_rad / np.sqrt(2.0) * (e1 + e2)
    drive_sr = (1.0 + e1) / np.sqrt(2.0)

    a11 = omega0 + 1j * gamma_rad - omega
    a22 = omega0 + delta + 0.5j * gamma_rad - omega
    determinant = a11 * a22 - coupling ** 2
    if np.any(determinant == 0):
        raise SingularSystemError("reduced two-mode system is singular")
    psi_sr = (drive_sr * a22 - coupling * e2) / determinant
    psi_3 = (a11 * e2 - coupling * drive_sr) / determinant
    r = -0.5j * gamma_rad * (drive_sr * psi_sr + e2 * psi_3)
    if len(r) == 1:
        return complex(r[0]), complex(psi_sr[0]), complex(psi_3[0])
    return r, psi_sr, psi_3
