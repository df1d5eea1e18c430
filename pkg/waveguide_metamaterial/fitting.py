# -*- coding: utf-8 -*-

"""Parameter estimation on spectra.

Fits are Levenberg-Marquardt least squares through lmfit. Frequencies
are shifted and scaled to the resonance width before fitting so the
optimizer works with numbers of order one; results are converted back
to rad/s.
"""

import json
import logging
import warnings
from dataclasses import dataclass, field

import lmfit
import numpy as np
import scipy.stats

from .errors import (AmbiguousWindowError, NoCrossingError, ParameterError,
                     ValidityWarning)
from .units import to_db

logger = logging.getLogger(__name__)

SPECTRUM_KINDS = ("S21", "S22", "S11")
MAX_FUNCTION_EVALUATIONS = 2000
# smallest relative dip that still counts as a resonance
MIN_DIP_DEPTH = 1e-3
# a fitted resonance shallower than this many residual rms is noise
NOISE_FACTOR = 3.0


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Complex S-parameter samples on a strictly increasing grid of
    angular frequencies."""
    frequencies: np.ndarray
    values: np.ndarray
    kind: str = "S21"
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        frequencies = np.atleast_1d(np.asarray(self.frequencies, dtype=float))
        values = np.atleast_1d(np.asarray(self.values, dtype=complex))
        if frequencies.ndim != 1 or frequencies.shape != values.shape:
            raise ParameterError(
                "frequencies and values must be 1-D and of equal length, "
                "got {} and {}".format(frequencies.shape, values.shape))
        if np.any(np.diff(frequencies) <= 0):
            raise ParameterError("frequency grid must be strictly increasing")
        if self.kind not in SPECTRUM_KINDS:
            raise ParameterError(
                "unknown spectrum kind {!r}".format(self.kind))
        object.__setattr__(self, "frequencies", frequencies)
        object.__setattr__(self, "values", values)

    def __len__(self):
        return len(self.frequencies)

    @property
    def power(self):
        return np.abs(self.values) ** 2

    @property
    def power_db(self):
        return to_db(self.power)

    def window(self, lo, hi):
        keep = (self.frequencies >= lo) & (self.frequencies <= hi)
        return Spectrum(self.frequencies[keep], self.values[keep], self.kind,
                        dict(self.metadata, window=[float(lo), float(hi)]))


def _finite_or_none(value):
    value = float(value)
    return value if np.isfinite(value) else None


@dataclass
class FitResult:
    params: dict
    sigmas: dict
    residual_norm: float
    converged: bool
    message: str = ""
    nfev: int = 0

    def __post_init__(self):
        if self.converged and not all(np.isfinite(s)
                                      for s in self.sigmas.values()):
            self.converged = False
            self.message = (self.message + "; " if self.message else "") + \
                "uncertainties could not be estimated"

    def __getitem__(self, name):
        return self.params[name]

    def to_dict(self):
        return {
            "params": {name: {"value": _finite_or_none(value),
                              "sigma": _finite_or_none(self.sigmas[name])}
                       for name, value in self.params.items()},
            "residual_norm": _finite_or_none(self.residual_norm),
            "converged": bool(self.converged),
            "message": self.message,
            "nfev": int(self.nfev),
        }

    def to_json(self, **kwargs):
        kwargs.setdefault("sort_keys", True)
        return json.dumps(self.to_dict(), **kwargs)


def _stderr(param):
    if param.stderr is None:
        return np.nan
    return float(param.stderr)


def _half_max_width(x, y):
    """Full width of the region where y exceeds half its maximum."""
    above = x[y >= 0.5 * np.max(y)]
    return float(above[-1] - above[0])


def _complex_residual(params, x, data, transmission):
    gamma_rad = params["gamma_rad"].value
    gamma10 = params["gamma10"].value
    center = params["center"].value
    r = -0.5 * gamma_rad / (gamma10 + 1j * (x - center))
    model = 1.0 + r if transmission else r
    diff = model - data
    return np.concatenate([diff.real, diff.imag])


def fit_two_level_resonance(spec):
    """Fit the weak-drive two-level response to a complex spectrum.

    S21 data are fitted with t = 1 + r, reflection data with r, where
    r = -(Gamma10/2) / (gamma10 + i (omega - omega_r)). Real and
    imaginary residuals are minimized jointly. Initial guesses come
    from the dip position and its half width.

    Returns
    -------
    FitResult
        params `omega_r`, `gamma_rad` (Gamma10), `gamma10` and
        `gamma_nr`.
    """
    names = ("omega_r", "gamma_rad", "gamma10", "gamma_nr")
    transmission = spec.kind == "S21"
    omega = spec.frequencies
    data = spec.values
    scattered = np.abs(1.0 - data) if transmission else np.abs(data)

    edge = max(3, len(omega) // 20)
    background = np.median(np.abs(np.concatenate([data[:edge],
                                                  data[-edge:]])))
    depth = 1.0 - np.min(np.abs(data)) / background if transmission \
        else np.max(scattered) - background
    if len(omega) < 8 or not depth > MIN_DIP_DEPTH:
        return FitResult({n: np.nan for n in names},
                         {n: np.nan for n in names}, np.nan, False,
                         message="no resonance found in the spectrum")

    peak = int(np.argmax(scattered))
    omega_guess = omega[peak]
    gamma10_guess = 0.5 * _half_max_width(omega, scattered ** 2)
    if not gamma10_guess > 0:
        gamma10_guess = 2.0 * np.min(np.diff(omega))
    gamma_rad_guess = 2.0 * gamma10_guess * min(scattered[peak], 1.0)
    scale = gamma10_guess

    params = lmfit.Parameters()
    params.add("center", value=0.0)
    params.add("gamma_rad", value=gamma_rad_guess / scale, min=0.0)
    params.add("gamma_nr",
               value=max(gamma10_guess - 0.5 * gamma_rad_guess,
                         1e-3 * gamma10_guess) / scale, min=0.0)
    params.add("gamma10", expr="gamma_rad / 2 + gamma_nr")

    x = (omega - omega_guess) / scale
    result = lmfit.minimize(_complex_residual, params, method="leastsq",
                            args=(x, data, transmission),
                            max_nfev=MAX_FUNCTION_EVALUATIONS,
                            xtol=1e-10, ftol=1e-10)
    fitted = result.params
    values = {
        "omega_r": omega_guess + fitted["center"].value * scale,
        "gamma_rad": fitted["gamma_rad"].value * scale,
        "gamma10": fitted["gamma10"].value * scale,
        "gamma_nr": fitted["gamma_nr"].value * scale,
    }
    sigmas = {
        "omega_r": _stderr(fitted["center"]) * scale,
        "gamma_rad": _stderr(fitted["gamma_rad"]) * scale,
        "gamma10": _stderr(fitted["gamma10"]) * scale,
        "gamma_nr": _stderr(fitted["gamma_nr"]) * scale,
    }
    converged = bool(result.success) and values["gamma_rad"] > 0
    message = str(result.message)
    fitted_depth = values["gamma_rad"] / (2.0 * values["gamma10"]) \
        if values["gamma10"] > 0 else 0.0
    noise = float(np.sqrt(np.mean(result.residual ** 2)))
    if converged and fitted_depth <= NOISE_FACTOR * noise:
        converged = False
        message = "no resonance found: fitted depth {:.3g} is inside the " \
            "noise ({:.3g})".format(fitted_depth, noise)
    logger.debug("two-level fit: %s (nfev=%d)", message, result.nfev)
    return FitResult(values, sigmas, float(np.linalg.norm(result.residual)),
                     converged, message=message, nfev=int(result.nfev))


def _count_turning_points(y):
    steps = np.diff(y)
    significant = np.abs(steps) > 1e-9 * np.ptp(y)
    signs = np.sign(steps[significant])
    return int(np.count_nonzero(signs[1:] != signs[:-1]))


def lorentzian(x, amplitude, center, gamma):
    """Lorentzian of full width `gamma` and peak value `amplitude`."""
    half = 0.5 * gamma
    return amplitude * half ** 2 / ((x - center) ** 2 + half ** 2)


def _lorentzian_residual(params, x, data):
    p = params.valuesdict()
    model = lorentzian(x, p["amplitude"], p["center"], p["gamma"]) \
        + p["offset"] + p["slope"] * x
    return model - data


def fit_lorentzian_linewidth(spec, window):
    """Fit a Lorentzian plus a straight baseline to |S|^2 inside
    `window` = (lo, hi) and return its full width.

    The window must hold exactly one extremum of |S|^2.

    Returns
    -------
    FitResult
        params `center`, `gamma_xi`, `amplitude`, `offset`, `slope`.
    """
    lo, hi = window
    sub = spec.window(lo, hi)
    omega = sub.frequencies
    y = sub.power
    if len(omega) < 5:
        raise AmbiguousWindowError("fit window holds fewer than 5 points")
    if np.ptp(y) <= 1e-12 * max(1.0, np.max(np.abs(y))):
        raise AmbiguousWindowError("no feature in the fit window: data "
                                   "are flat")
    turning = _count_turning_points(y)
    if turning != 1:
        raise AmbiguousWindowError(
            "fit window must hold exactly one extremum, found {}".format(
                turning))

    baseline = 0.5 * (y[0] + y[-1])
    excursion = y - baseline
    peak = int(np.argmax(np.abs(excursion)))
    width_guess = _half_max_width(omega, np.abs(excursion))
    width_guess = max(width_guess, 2.0 * np.min(np.diff(omega)))
    omega_guess = omega[peak]
    scale = width_guess

    params = lmfit.Parameters()
    params.add("amplitude", value=excursion[peak])
    params.add("center", value=0.0)
    params.add("gamma", value=1.0, min=0.0)
    params.add("offset", value=baseline)
    params.add("slope", value=0.0)

    x = (omega - omega_guess) / scale
    result = lmfit.minimize(_lorentzian_residual, params, method="leastsq",
                            args=(x, y), max_nfev=MAX_FUNCTION_EVALUATIONS,
                            xtol=1e-12, ftol=1e-12)
    fitted = result.params
    values = {
        "center": omega_guess + fitted["center"].value * scale,
        "gamma_xi": fitted["gamma"].value * scale,
        "amplitude": fitted["amplitude"].value,
        "offset": fitted["offset"].value,
        "slope": fitted["slope"].value / scale,
    }
    sigmas = {
        "center": _stderr(fitted["center"]) * scale,
        "gamma_xi": _stderr(fitted["gamma"]) * scale,
        "amplitude": _stderr(fitted["amplitude"]),
        "offset": _stderr(fitted["offset"]),
        "slope": _stderr(fitted["slope"]) / scale,
    }
    return FitResult(values, sigmas, float(np.linalg.norm(result.residual)),
                     bool(result.success), message=str(result.message),
                     nfev=int(result.nfev))


def fit_power_law(n_values, rates):
    """Fit rate = prefactor * N^b by linear regression of log(rate) on
    log(N).

    With only two points the line is exact but its uncertainty is
    unknown: sigmas are reported as infinite and `converged` is False.
    """
    n_values = np.asarray(n_values, dtype=float)
    rates = np.asarray(rates, dtype=float)
    if n_values.shape != rates.shape or n_values.ndim != 1:
        raise ParameterError("N values and rates must be 1-D of equal "
                             "length")
    if len(rates) < 2:
        raise ParameterError("a power law needs at least two points")
    if np.any(rates <= 0) or np.any(n_values <= 0):
        raise ParameterError("power-law fit needs positive N and rates")

    log_n, log_rate = np.log(n_values), np.log(rates)
    regression = scipy.stats.linregress(log_n, log_rate)
    b, intercept = float(regression.slope), float(regression.intercept)
    prefactor = float(np.exp(intercept))
    residual = log_rate - (intercept + b * log_n)
    if len(rates) == 2:
        warnings.warn("power law through two points: uncertainty unknown",
                      ValidityWarning, stacklevel=2)
        sigmas = {"prefactor": np.inf, "b": np.inf}
        return FitResult({"prefactor": prefactor, "b": b}, sigmas,
                         float(np.linalg.norm(residual)), False,
                         message="two points: no degrees of freedom left")
    sigmas = {"prefactor": prefactor * float(regression.intercept_stderr),
              "b": float(regression.stderr)}
    return FitResult({"prefactor": prefactor, "b": b}, sigmas,
                     float(np.linalg.norm(residual)), True)


def fit_log_law(n_values, values):
    """Fit value = offset + slope * ln(N); the residual norm says how
    well the logarithmic trend holds."""
    n_values = np.asarray(n_values, dtype=float)
    values = np.asarray(values, dtype=float)
    if len(values) < 3:
        raise ParameterError("a logarithmic fit needs at least 3 points")
    regression = scipy.stats.linregress(np.log(n_values), values)
    residual = values - (regression.intercept
                         + regression.slope * np.log(n_values))
    return FitResult(
        {"offset": float(regression.intercept),
         "slope": float(regression.slope)},
        {"offset": float(regression.intercept_stderr),
         "slope": float(regression.stderr)},
        float(np.linalg.norm(residual)), True)


def saturation_p50(power_curve, values=None):
    """Drive strength at which |S21(omega_r)|^2 first rises through 0.5.

    Parameters
    ----------
    power_curve: mapping or array
        Either a mapping power -> |S21|^2, or the power axis with the
        transmission given in `values`.

    The crossing is interpolated linearly between the two bracketing
    points.
    """
    if values is None:
        items = sorted(dict(power_curve).items())
        powers = np.array([p for p, _ in items], dtype=float)
        values = np.array([v for _, v in items], dtype=float)
    else:
        powers = np.asarray(power_curve, dtype=float)
        values = np.asarray(values, dtype=float)
        order = np.argsort(powers)
        powers, values = powers[order], values[order]
    if len(powers) < 2:
        raise NoCrossingError("need at least two points to find a crossing")
    if values[0] >= 0.5:
        raise NoCrossingError("transmission is already >= 0.5 at the "
                              "lowest power")
    above = np.nonzero(values >= 0.5)[0]
    if len(above) == 0:
        raise NoCrossingError("transmission never reaches 0.5")
    hi = int(above[0])
    lo = hi - 1
    fraction = (0.5 - values[lo]) / (values[hi] - values[lo])
    return float(powers[lo] + fraction * (powers[hi] - powers[lo]))


def lineshape_skewness(omega, power):
    """Asymmetry of a resonance feature.

    The feature is measured against the straight line through the end
    points of the window: w = |P / baseline - 1| is used as a weight
    over omega and its third standardized moment is returned. Zero for
    a line symmetric about its centre; positive when the weight has a
    longer tail towards high frequency.
    """
    omega = np.asarray(omega, dtype=float)
    power = np.asarray(power, dtype=float)
    baseline = np.interp(omega, [omega[0], omega[-1]], [power[0], power[-1]])
    weight = np.abs(power / baseline - 1.0)
    total = np.sum(weight)
    if total == 0:
        return 0.0
    mean = np.sum(weight * omega) / total
    variance = np.sum(weight * (omega - mean) ** 2) / total
    third = np.sum(weight * (omega - mean) ** 3) / total
    return float(third / variance ** 1.5)


def noisy_copy(spec, sigma, rng):
    """`spec` plus complex Gaussian noise of standard deviation `sigma`
    in each quadrature."""
    noise = rng.normal(scale=sigma, size=(2, len(spec)))
    return Spectrum(spec.frequencies, spec.values + noise[0] + 1j * noise[1],
                    spec.kind, dict(spec.metadata, noise_sigma=sigma))
