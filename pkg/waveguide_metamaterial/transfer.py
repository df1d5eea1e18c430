# -*- coding: utf-8 -*-

"""2x2 transfer-matrix engine for a waveguide loaded with qubits.

A transfer matrix maps (right-moving, left-moving) amplitudes on the
input side to those on the output side. Entries may be numpy arrays, in
which case every matrix operation acts element-wise over a frequency
grid.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from tqdm.auto import tqdm

from .errors import ParameterError, SingularTransferError
from .fitting import Spectrum
from .qubit import (DriveParams, rabi_from_power, three_level_reflection,
                    two_level_response)
from .units import to_db

logger = logging.getLogger(__name__)

RESPONSE_MODELS = ("two_level", "three_level")
PHASE_MODES = ("markov", "dispersive")


@dataclass(frozen=True, eq=False)
class TransferMatrix:
    t11: complex
    t12: complex
    t21: complex
    t22: complex

    def __matmul__(self, other):
        return TransferMatrix(
            self.t11 * other.t11 + self.t12 * other.t21,
            self.t11 * other.t12 + self.t12 * other.t22,
            self.t21 * other.t11 + self.t22 * other.t21,
            self.t21 * other.t12 + self.t22 * other.t22,
        )

    @classmethod
    def identity(cls):
        return cls(1.0 + 0j, 0j, 0j, 1.0 + 0j)

    @property
    def det(self):
        return self.t11 * self.t22 - self.t12 * self.t21

    def as_array(self):
        """Entries stacked as (..., 2, 2)."""
        return np.moveaxis(np.array([[self.t11, self.t12],
                                     [self.t21, self.t22]]), (0, 1), (-2, -1))

    def s21(self):
        return 1.0 / self.t22

    def s22(self):
        """Reflection seen from the output port."""
        return self.t12 / self.t22

    def s11(self):
        """Reflection seen from the input port."""
        return -self.t21 / self.t22


@dataclass(frozen=True)
class BackgroundModel:
    """Semi-transparent inductive mirrors at both ends of the array.

    Parameters
    ----------
    l1, l2: float
        Series inductances (H) before the first and after the last qubit.
    z0: float
        Line impedance (ohm).
    lead1, lead2: float
        Line length (m) between each mirror and its nearest qubit.
    """
    l1: float = 0.0
    l2: float = 0.0
    z0: float = 50.0
    lead1: float = 0.0
    lead2: float = 0.0

    def __post_init__(self):
        if self.l1 < 0 or self.l2 < 0:
            raise ParameterError("mirror inductances must be >= 0")
        if not self.z0 > 0:
            raise ParameterError("z0 must be > 0")
        if self.lead1 < 0 or self.lead2 < 0:
            raise ParameterError("lead lengths must be >= 0")

    def reversed(self):
        """The same mirrors seen from the output port."""
        return BackgroundModel(l1=self.l2, l2=self.l1, z0=self.z0,
                               lead1=self.lead2, lead2=self.lead1)


@dataclass(frozen=True, eq=False)
class ScatteringResult:
    s21: complex
    s22: complex
    s11: complex


def qubit_tmatrix(r):
    """Transfer matrix of a point scatterer with reflection r."""
    r = np.asarray(r, dtype=complex)
    if np.any(r == -1):
        raise SingularTransferError(
            "r = -1 (perfect mirror) has no transfer matrix")
    inv = 1.0 / (1.0 + r)
    return TransferMatrix((1.0 + 2.0 * r) * inv, r * inv, -r * inv, inv)


def _scaled_qubit_tmatrix(r):
    """(1 + r) * qubit_tmatrix(r), defined for r = -1 as well."""
    return TransferMatrix(1.0 + 2.0 * r, r, -r, np.ones_like(r))


def propagation_tmatrix(phi):
    if not np.all(np.isfinite(phi)):
        raise ParameterError("propagation phase must be finite")
    forward = np.exp(-1j * np.asarray(phi, dtype=float))
    zero = np.zeros_like(forward)
    return TransferMatrix(forward, zero, zero, 1.0 / forward)


def inductance_tmatrix(omega, inductance, z0=50.0):
    """Series inductance, x = omega L / 2 Z0."""
    if not z0 > 0:
        raise ParameterError("z0 must be > 0")
    x = np.asarray(omega, dtype=float) * inductance / (2.0 * z0)
    return TransferMatrix(1.0 - 1j * x, -1j * x, 1j * x, 1.0 + 1j * x)


def qubit_reflections(cfg, drive, response_model="two_level"):
    """Reflection coefficient of every qubit of `cfg` under `drive`."""
    if response_model == "two_level":
        return [two_level_response(q, drive)[0] for q in cfg.qubits]
    if response_model == "three_level":
        return [three_level_reflection(q, drive) for q in cfg.qubits]
    raise ParameterError("unknown response model {!r}, expected one of {}"
                         .format(response_model, RESPONSE_MODELS))


def chain_tmatrix(cfg, bg, drive, response_model="two_level",
                  phase_mode="dispersive"):
    """Compose T^L2 T^lead2 T^QN T^phi ... T^Q1 T^lead1 T^L1.

    Qubit blocks are multiplied in the scaled form (1 + r) T^Q, which
    leaves a lossless qubit exactly on resonance computable.

    Returns
    -------
    (TransferMatrix, prefactor)
        The scaled product and the product of (1 + r) over the qubits;
        the chain matrix is their ratio.
    """
    if phase_mode not in PHASE_MODES:
        raise ParameterError("unknown phase mode {!r}, expected one of {}"
                             .format(phase_mode, PHASE_MODES))
    omega = np.asarray(drive.omega_p, dtype=float)
    reflections = qubit_reflections(cfg, drive, response_model)

    phase_omega = cfg.omega_ref if phase_mode == "markov" else omega
    phi = cfg.phase_at(phase_omega)
    lead1 = phase_omega * bg.lead1 / cfg.phase_velocity
    lead2 = phase_omega * bg.lead2 / cfg.phase_velocity

    total = inductance_tmatrix(omega, bg.l1, bg.z0)
    total = propagation_tmatrix(lead1) @ total
    prefactor = np.ones_like(omega, dtype=complex)
    step = propagation_tmatrix(phi)
    for index, r in enumerate(reflections):
        if index:
            total = step @ total
        total = _scaled_qubit_tmatrix(np.asarray(r, dtype=complex)) @ total
        prefactor = prefactor * (1.0 + r)
    total = propagation_tmatrix(lead2) @ total
    total = inductance_tmatrix(omega, bg.l2, bg.z0) @ total
    return total, prefactor


def chain_scattering(cfg, bg, drive, response_model="two_level",
                     phase_mode="dispersive"):
    """Compose the whole chain and return S21, S22 and S11."""
    total, prefactor = chain_tmatrix(cfg, bg, drive, response_model,
                                     phase_mode)
    omega = np.asarray(drive.omega_p, dtype=float)
    t22 = np.asarray(total.t22)
    singular = t22 == 0
    if np.any(singular):
        bad = np.atleast_1d(omega)[np.atleast_1d(singular)][0]
        raise SingularTransferError("T22 of the chain vanishes", omega=bad)
    s21 = prefactor / t22
    s22 = np.asarray(total.t12) / t22
    s11 = -np.asarray(total.t21) / t22
    if omega.ndim == 0:
        return ScatteringResult(complex(s21), complex(s22), complex(s11))
    return ScatteringResult(s21, s22, s11)


def chain_sparams(cfg, bg, drive, response_model="two_level",
                  phase_mode="dispersive"):
    """S21 and S22 of the array between the two mirrors.

    Parameters
    ----------
    cfg: ArrayConfig
    bg: BackgroundModel
    drive: DriveParams
        `omega_p` may be a grid; `rabi_p` applies to every qubit.
    response_model: str
        "two_level" or "three_level".
    phase_mode: str
        "markov" freezes phi at cfg.omega_ref, "dispersive" uses
        phi(omega) = omega d / c.
    """
    result = chain_scattering(cfg, bg, drive, response_model, phase_mode)
    return result.s21, result.s22


def _chunks(omegas, chunk_size):
    return [omegas[i:i + chunk_size]
            for i in range(0, len(omegas), chunk_size)]


def spectrum_sweep(cfg, bg, omegas, drive=None, response_model="two_level",
                   phase_mode="dispersive", chunk_size=2048, workers=1,
                   progress=False):
    """Evaluate the chain over a frequency grid.

    The grid is split into chunks that are evaluated independently (on
    `workers` threads) and merged back in frequency order.

    Returns
    -------
    dict
        "S21", "S22" and "S11" Spectrum objects.
    """
    omegas = np.asarray(omegas, dtype=float)
    if omegas.ndim != 1 or omegas.size == 0:
        raise ParameterError("frequency grid must be a non-empty 1D array")
    if chunk_size < 1:
        raise ParameterError("chunk_size must be >= 1")
    if drive is None:
        drive = DriveParams(omega_p=0.0)

    def evaluate(chunk):
        return chain_scattering(cfg, bg, drive.at(chunk), response_model,
                                phase_mode)

    chunks = _chunks(omegas, chunk_size)
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        parts = list(tqdm(pool.map(evaluate, chunks), total=len(chunks),
                          desc="Frequency sweep", unit="chunk",
                          leave=False, disable=not progress))

    metadata = {"phase_mode": phase_mode, "response_model": response_model,
                "n_qubits": cfg.n, "rabi_p": drive.rabi_p,
                "rabi_c": drive.rabi_c}
    spectra = {}
    for kind in ("S21", "S22", "S11"):
        values = np.concatenate([np.atleast_1d(getattr(p, kind.lower()))
                                 for p in parts])
        spectra[kind] = Spectrum(omegas, values, kind, dict(metadata))
    return spectra


@dataclass(frozen=True, eq=False)
class SaturationMap:
    """|S21(omega)| for a set of drive strengths.

    `s21` has shape (len(rabi_values), len(omegas)). `powers` is set only
    when the sweep was specified in watts.
    """
    omegas: np.ndarray
    rabi_values: np.ndarray
    s21: np.ndarray
    powers: np.ndarray = None

    @property
    def power_transmission(self):
        return np.abs(self.s21) ** 2


def saturation_sweep(cfg, bg, omegas, rabi_values=None, powers=None,
                     kappa=None, phase_mode="dispersive", progress=False):
    """Transmission spectra versus drive strength.

    Every qubit sees the same Rabi rate. Give either `rabi_values`
    (rad/s) or `powers` (W) together with the calibration constant
    `kappa`, Omega_p^2 = kappa P.
    """
    if (rabi_values is None) == (powers is None):
        raise ParameterError("give exactly one of rabi_values or powers")
    if powers is not None:
        if kappa is None:
            raise ParameterError("a power grid needs the kappa calibration")
        powers = np.asarray(powers, dtype=float)
        rabi_values = rabi_from_power(powers, kappa)
    rabi_values = np.atleast_1d(np.asarray(rabi_values, dtype=float))
    omegas = np.asarray(omegas, dtype=float)

    rows = []
    for rabi in tqdm(rabi_values, desc="Saturation sweep", unit="power",
                     leave=False, disable=not progress):
        drive = DriveParams(omega_p=omegas, rabi_p=float(rabi))
        rows.append(np.atleast_1d(
            chain_sparams(cfg, bg, drive, "two_level", phase_mode)[0]))
    logger.info("saturation sweep: %d powers x %d frequencies",
                len(rabi_values), len(omegas))
    return SaturationMap(omegas=omegas, rabi_values=rabi_values,
                         s21=np.array(rows), powers=powers)


def ats_sweep(cfg, bg, omegas, rabi_c_values, omega_c,
              phase_mode="dispersive", progress=False):
    """|S21|(omega, Omega_c) with the control tone applied uniformly to
    all qubits. Returns an array of shape (len(rabi_c_values),
    len(omegas))."""
    omegas = np.asarray(omegas, dtype=float)
    rows = []
    for rabi_c in tqdm(rabi_c_values, desc="Autler-Townes sweep",
                       unit="point", leave=False, disable=not progress):
        drive = DriveParams(omega_p=omegas, omega_c=omega_c,
                            rabi_c=float(rabi_c))
        rows.append(np.atleast_1d(
            chain_sparams(cfg, bg, drive, "three_level", phase_mode)[0]))
    return np.array(rows)


def _threshold_crossing(omegas, power_db, inside, outside, threshold_db):
    """Frequency where the dB curve crosses the threshold between two
    neighbouring grid points."""
    y0, y1 = power_db[inside], power_db[outside]
    fraction = (threshold_db - y0) / (y1 - y0)
    return omegas[inside] + fraction * (omegas[outside] - omegas[inside])


def bandgap_width(omegas, s21, threshold_db=-25.0, center=None):
    """Width (rad/s) of the contiguous region with |S21|^2 below
    `threshold_db` that contains `center`.

    `center` defaults to the transmission minimum. The region edges are
    located by linear interpolation between grid points; a region that
    touches the end of the grid is cut there. Returns 0 when `center`
    is above the threshold.
    """
    omegas = np.asarray(omegas, dtype=float)
    power_db = to_db(np.abs(np.asarray(s21)) ** 2)
    if center is None:
        index = int(np.argmin(power_db))
    else:
        index = int(np.argmin(np.abs(omegas - center)))
    if power_db[index] >= threshold_db:
        return 0.0

    below = power_db < threshold_db
    lo = index
    while lo > 0 and below[lo - 1]:
        lo -= 1
    hi = index
    while hi < len(omegas) - 1 and below[hi + 1]:
        hi += 1

    if lo == 0:
        logger.warning("bandgap reaches the lower end of the grid")
        left = omegas[0]
    else:
        left = _threshold_crossing(omegas, power_db, lo, lo - 1,
                                   threshold_db)
    if hi == len(omegas) - 1:
        logger.warning("bandgap reaches the upper end of the grid")
        right = omegas[-1]
    else:
        right = _threshold_crossing(omegas, power_db, hi, hi + 1,
                                    threshold_db)
    return float(right - left)


def transmission_minima(omegas, s21, center):
    """Deepest transmission point below and above `center`.

    Returns the (lower, upper) frequencies of the two branches of a
    split resonance.
    """
    omegas = np.asarray(omegas, dtype=float)
    power = np.abs(np.asarray(s21)) ** 2
    lower = omegas < center
    upper = omegas > center
    if not (np.any(lower) and np.any(upper)):
        raise ParameterError("grid must extend on both sides of center")
    lower_omega = omegas[lower][np.argmin(power[lower])]
    upper_omega = omegas[upper][np.argmin(power[upper])]
    return float(lower_omega), float(upper_omega)
