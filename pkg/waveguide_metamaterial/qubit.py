# -*- coding: utf-8 -*-

"""Closed-form response of a single emitter coupled to the waveguide.

All rates and frequencies are angular (rad/s). Time dependence is
e^{+i omega t}, so losses show up as positive imaginary parts.
"""

import dataclasses
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, SingularityError


def _check_finite(name, value):
    if not np.all(np.isfinite(value)):
        raise ParameterError(
            "{} must be finite, got {!r}".format(name, value))


def _as_output(value):
    """Return plain complex for 0-d results, arrays otherwise."""
    if np.ndim(value) == 0:
        return complex(value)
    return value


@dataclass(frozen=True)
class QubitParams:
    """One transmon-like emitter.

    Parameters
    ----------
    omega10: float
        0-1 transition frequency.
    gamma_rad: float
        Radiative decay rate Gamma10 into the waveguide.
    gamma_nr: float
        Non-radiative rate Gamma_nr = Gamma_phi + Gamma_l / 2.
    gamma_loss: float
        Non-radiative relaxation Gamma_l. Defaults to 0, with Gamma_nr
        attributed to pure dephasing.
    chi: float
        Anharmonicity (usually negative), omega21 = omega10 + chi.
    gamma20: float
        Decoherence rate of the 0-2 transition.
    """
    omega10: float
    gamma_rad: float
    gamma_nr: float = 0.0
    gamma_loss: float = 0.0
    chi: float = 0.0
    gamma20: float = 0.0

    def __post_init__(self):
        for field in dataclasses.fields(self):
            _check_finite(field.name, getattr(self, field.name))
        if self.gamma_rad <= 0:
            raise ParameterError("gamma_rad must be > 0")
        if self.gamma_nr < 0:
            raise ParameterError("gamma_nr must be >= 0")
        if self.gamma_loss < 0:
            raise ParameterError("gamma_loss must be >= 0")
        if self.gamma20 < 0:
            raise ParameterError("gamma20 must be >= 0")

    @property
    def gamma10(self):
        """Decoherence rate of the 0-1 transition, Gamma10/2 + Gamma_nr."""
        return 0.5 * self.gamma_rad + self.gamma_nr

    @property
    def omega21(self):
        return self.omega10 + self.chi

    def detuned(self, delta):
        return dataclasses.replace(self, omega10=self.omega10 + delta)

    @classmethod
    def from_coherence_times(cls, omega10, t1, t2, **kwargs):
        """Build from T1 = 1/Gamma10 and T2 = 1/gamma10 (seconds)."""
        if t1 <= 0 or t2 <= 0:
            raise ParameterError("coherence times must be positive")
        if t2 > 2 * t1:
            raise ParameterError(
                "T2 = {:.3g} s exceeds 2*T1 = {:.3g} s".format(t2, 2 * t1))
        gamma_rad = 1.0 / t1
        return cls(omega10=omega10, gamma_rad=gamma_rad,
                   gamma_nr=1.0 / t2 - 0.5 * gamma_rad, **kwargs)


@dataclass(frozen=True, eq=False)
class DriveParams:
    """Drive tone and (optional) control tone.

    `omega_p` may be a numpy array; every response function is then
    evaluated element-wise over that frequency grid.
    """
    omega_p: float
    rabi_p: float = 0.0
    omega_c: float = 0.0
    rabi_c: float = 0.0

    def __post_init__(self):
        for field in dataclasses.fields(self):
            _check_finite(field.name, getattr(self, field.name))
        if self.rabi_p < 0:
            raise ParameterError("rabi_p must be >= 0")
        if self.rabi_c < 0:
            raise ParameterError("rabi_c must be >= 0")

    def at(self, omega_p):
        return dataclasses.replace(self, omega_p=omega_p)


def saturation_parameter(q, rabi_p):
    return rabi_p ** 2 / ((q.gamma_rad + q.gamma_loss) * q.gamma10)


def two_level_response(q, drive):
    """Reflection and transmission of a driven two-level emitter.

    Parameters
    ----------
    q: QubitParams
    drive: DriveParams
        Only `omega_p` and `rabi_p` are used.

    Returns
    -------
    (r, t): complex or numpy arrays, with t = 1 + r
    """
    omega = np.asarray(drive.omega_p, dtype=float)
    gamma10 = q.gamma10
    x = (omega - q.omega10) / gamma10
    s = saturation_parameter(q, drive.rabi_p)
    depth = q.gamma_rad / (2.0 * gamma10)
    r = -depth * (1.0 - 1j * x) / (1.0 + x ** 2 + s)
    return _as_output(r), _as_output(1.0 + r)


def extinction_coefficient(q):
    """Suppression of power transmission at resonance for weak drive,
    1 - (1 - Gamma10 / 2 gamma10)^2."""
    return 1.0 - (1.0 - q.gamma_rad / (2.0 * q.gamma10)) ** 2


def three_level_reflection(q, drive):
    """Reflection of the 0-1 transition dressed by a control tone on 1-2.

    The drive is treated as weak: its saturation is not included,
    whatever `drive.rabi_p` says.
    """
    omega = np.asarray(drive.omega_p, dtype=float)
    delta = omega - q.omega10
    base = 2.0 * (q.gamma10 + 1j * delta)
    if drive.rabi_c == 0:
        return _as_output(-q.gamma_rad / base)
    two_photon = delta + drive.omega_c - q.omega21
    dressing = 2.0 * q.gamma20 + 2j * two_photon
    if np.any(dressing == 0):
        raise SingularityError(
            "three-level denominator vanishes: gamma20 = 0 at exact "
            "two-photon resonance")
    return _as_output(-q.gamma_rad / (base + drive.rabi_c ** 2 / dressing))


def rabi_from_power(power, kappa):
    """Drive Rabi rate from incident power (W), Omega_p^2 = kappa * P."""
    if kappa is None or kappa <= 0:
        raise ParameterError("kappa must be a positive calibration constant")
    return np.sqrt(kappa * np.asarray(power, dtype=float))


def power_from_rabi(rabi, kappa):
    if kappa is None or kappa <= 0:
        raise ParameterError("kappa must be a positive calibration constant")
    return np.asarray(rabi, dtype=float) ** 2 / kappa


def analytic_p50_rabi(q):
    """Rabi rate at which |t(omega10)|^2 of a lone qubit reaches 1/2."""
    depth = q.gamma_rad / (2.0 * q.gamma10)
    threshold = 1.0 - 1.0 / np.sqrt(2.0)
    if depth <= threshold:
        raise ParameterError(
            "weak-drive transmission is already above 1/2; "
            "there is no saturation crossing")
    s = depth / threshold - 1.0
    return float(np.sqrt(s * (q.gamma_rad + q.gamma_loss) * q.gamma10))


def calibrate_kappa(q, p50_power):
    """kappa that puts the single-qubit 50 % point at `p50_power` (W)."""
    if p50_power <= 0:
        raise ParameterError("p50_power must be positive")
    return analytic_p50_rabi(q) ** 2 / p50_power
