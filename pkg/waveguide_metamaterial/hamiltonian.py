# -*- coding: utf-8 -*-

"""Effective non-Hermitian Hamiltonian of N emitters in the
single-excitation sector, its eigenmodes and the analytic results for
equally spaced arrays.

Matrices are dense complex numpy arrays, indexed H[r, s] with r, s the
qubit positions along the line.
"""

import dataclasses
import logging
import warnings
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np
import scipy.linalg

from .errors import (EigenSolverError, ParameterError, SingularityError,
                     ValidityWarning)
from .qubit import QubitParams

logger = logging.getLogger(__name__)

DEFAULT_MAX_QUBITS = 64
PERTURBATIVE_PHI_LIMIT = 0.3


@dataclass(frozen=True)
class ArrayConfig:
    """N emitters spaced by `spacing` along a line with phase velocity
    `phase_velocity`.

    The interaction uses a single shared Gamma10 (the mean over the
    qubits); per-qubit frequencies and non-radiative rates enter on the
    diagonal. `phi` is the inter-qubit phase frozen at `omega_ref`.
    """
    qubits: Tuple[QubitParams, ...]
    spacing: float
    phase_velocity: float
    omega_ref: float

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(self.qubits))
        if len(self.qubits) == 0:
            raise ParameterError("an array needs at least one qubit")
        if not self.spacing > 0:
            raise ParameterError("spacing must be > 0")
        if not self.phase_velocity > 0:
            raise ParameterError("phase_velocity must be > 0")
        if not 0 < self.phi < np.pi:
            raise ParameterError(
                "inter-qubit phase must lie in (0, pi), got {:.6g}".format(
                    self.phi))

    @property
    def n(self):
        return len(self.qubits)

    @property
    def phi(self):
        return self.omega_ref * self.spacing / self.phase_velocity

    @property
    def gamma_rad(self):
        return float(np.mean([q.gamma_rad for q in self.qubits]))

    @property
    def omegas(self):
        return np.array([q.omega10 for q in self.qubits])

    @property
    def gamma_nr(self):
        return np.array([q.gamma_nr for q in self.qubits])

    def phase_at(self, omega):
        """Propagation phase omega * d / c between neighbours."""
        return np.asarray(omega) * self.spacing / self.phase_velocity

    def with_qubit(self, index, qubit):
        qubits = list(self.qubits)
        qubits[index] = qubit
        return dataclasses.replace(self, qubits=tuple(qubits))

    def reversed(self):
        return dataclasses.replace(self, qubits=tuple(reversed(self.qubits)))

    @classmethod
    def uniform(cls, n, qubit, spacing, phase_velocity, omega_ref=None):
        """`n` copies of `qubit`, phase referenced to its omega10 unless
        `omega_ref` is given."""
        if n < 1:
            raise ParameterError("n must be >= 1")
        if omega_ref is None:
            omega_ref = qubit.omega10
        return cls(qubits=(qubit,) * n, spacing=spacing,
                   phase_velocity=phase_velocity, omega_ref=omega_ref)

    @classmethod
    def from_phi(cls, n, phi, qubit, phase_velocity=1.2e8):
        """Identical qubits with the spacing chosen to give `phi` at
        the qubit frequency."""
        spacing = phi * phase_velocity / qubit.omega10
        return cls.uniform(n, qubit, spacing, phase_velocity)


@dataclass(frozen=True, eq=False)
class EigenMode:
    """One collective mode.

    `rank` orders modes by brightness: 0 is the superradiant mode and
    rank xi >= 1 is the xi-th subradiant mode, so rank 1 is the
    brightest subradiant one.
    """
    omega_xi: complex
    gamma_xi: float
    vector: np.ndarray = field(repr=False)
    rank: int
    participation: float = 1.0


def interaction_matrix(n, phi, gamma_rad):
    """i (Gamma10 / 2) exp(-i phi |r - s|), diagonal included."""
    index = np.arange(n)
    distance = np.abs(index[:, None] - index[None, :])
    return 0.5j * gamma_rad * np.exp(-1j * phi * distance)


def build_effective_hamiltonian(cfg, include_loss=False):
    """Effective Hamiltonian of the array.

    H[r, s] = omega_s delta_rs + i (Gamma10/2) exp(-i phi |r - s|). The
    diagonal radiative term i Gamma10 / 2 is part of the interaction, so
    2 Im of each eigenvalue is the radiative rate of that mode.

    Parameters
    ----------
    cfg: ArrayConfig
    include_loss: bool
        Add +i Gamma_nr of each qubit to its diagonal entry. Off by
        default for eigenmode studies.
    """
    if cfg.n == 0:
        raise ParameterError("cannot build a Hamiltonian for N = 0")
    h = interaction_matrix(cfg.n, cfg.phi, cfg.gamma_rad)
    diagonal = cfg.omegas.astype(complex)
    if include_loss:
        diagonal = diagonal + 1j * cfg.gamma_nr
    h[np.diag_indices(cfg.n)] += diagonal
    return h


def eigenmodes(h, max_n=DEFAULT_MAX_QUBITS):
    """Diagonalize `h` and return its modes sorted by brightness.

    Sorting is by descending Im(omega); ties are broken by ascending
    Re(omega) and then by the solver's index.
    """
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ParameterError("Hamiltonian must be square, got shape {}"
                             .format(h.shape))
    n = h.shape[0]
    if n > max_n:
        raise ParameterError(
            "N = {} exceeds the eigenmode cap of {}".format(n, max_n))
    if not np.all(np.isfinite(h)):
        raise ParameterError("Hamiltonian has non-finite entries")

    try:
        values, vectors = scipy.linalg.eig(h)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise EigenSolverError("eigen-decomposition did not converge: {}"
                               .format(exc), condition=np.linalg.cond(h))
    if not (np.all(np.isfinite(values)) and np.all(np.isfinite(vectors))):
        raise EigenSolverError("eigen-decomposition returned non-finite "
                               "values", condition=np.linalg.cond(h))

    order = np.lexsort((np.arange(n), values.real, -values.imag))
    modes = []
    for rank, i in enumerate(order):
        vector = vectors[:, i] / np.linalg.norm(vectors[:, i])
        modes.append(EigenMode(
            omega_xi=complex(values[i]),
            gamma_xi=float(2.0 * values[i].imag),
            vector=vector,
            rank=rank,
            participation=float(1.0 / np.sum(np.abs(vector) ** 4)),
        ))
    logger.debug("diagonalized %d x %d Hamiltonian, brightest rate %.4g",
                 n, n, modes[0].gamma_xi)
    return modes


def brightest_subradiant(modes):
    if len(modes) < 2:
        raise ParameterError("a single emitter has no subradiant mode")
    return modes[1]


def inverse_hamiltonian_tridiagonal(n, phi, gamma_rad):
    """Exact inverse of `interaction_matrix(n, phi, gamma_rad)`.

    The inverse is tridiagonal: -cot(phi) in the bulk,
    -cot(phi)/2 - i/2 at both ends, 1 / (2 sin phi) off the diagonal,
    all scaled by 2 / Gamma10.
    """
    if n < 2:
        raise ParameterError("tridiagonal inverse needs N >= 2")
    if np.isclose(np.sin(phi), 0.0, atol=1e-15):
        raise SingularityError("sin(phi) = 0: interaction matrix is singular")
    if not 0 < phi < np.pi:
        raise ParameterError("phi must lie in (0, pi)")
    cot = np.cos(phi) / np.sin(phi)
    off = 1.0 / (2.0 * np.sin(phi))
    diagonal = np.full(n, -cot, dtype=complex)
    diagonal[0] = diagonal[-1] = -0.5 * cot - 0.5j
    inverse = np.diag(diagonal) + off * (np.eye(n, k=1) + np.eye(n, k=-1))
    return (2.0 / gamma_rad) * inverse


def _check_mode_index(n, xi):
    if not 1 <= xi <= n - 1:
        raise ParameterError(
            "subradiant index must satisfy 1 <= xi <= N - 1 "
            "(N = {}, xi = {})".format(n, xi))


def perturbative_subradiant_rate(n, xi, phi, gamma_rad):
    """Small-phi decay rate of the xi-th subradiant mode,
    Gamma10 * 8 N^3 phi^2 / (pi^4 xi^4).

    Valid for phi << 1 and xi << N.
    """
    _check_mode_index(n, xi)
    if phi >= PERTURBATIVE_PHI_LIMIT:
        warnings.warn("phi = {:.3g} is outside the perturbative regime "
                      "(phi < {})".format(phi, PERTURBATIVE_PHI_LIMIT),
                      ValidityWarning, stacklevel=2)
    return gamma_rad * 8.0 * n ** 3 * phi ** 2 / (np.pi ** 4 * xi ** 4)


def dispersion_estimate(n, xi, phi, gamma_rad):
    """Eigenfrequency omega_xi - omega0 of the xi-th subradiant mode from
    the long-wavelength dispersion relation with k = xi pi / N.
    """
    k = xi * np.pi / n
    if k == 0:
        raise ParameterError("k = 0 has no dispersion estimate")
    _check_mode_index(n, xi)
    denominator = (-(2.0 / phi) * np.sin(0.5 * k) ** 2
                   - (2.0j / n) * np.cos(0.5 * k) ** 2)
    return complex(0.5 * gamma_rad / denominator)
