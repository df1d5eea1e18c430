# -*- coding: utf-8 -*-

"""Flux-crosstalk calibration and normalization of measured spectra.

Coil and qubit indices are zero based. Fluxes and currents are related
by Phi = M I, with M stored row-normalized (M[x][x] = 1).
"""

import csv
import itertools
import logging
from dataclasses import dataclass

import numpy as np

from .errors import (CalibrationError, IncompleteCalibrationError,
                     InfiniteCrosstalkError, ParameterError,
                     ZeroReferenceError)
from .fitting import Spectrum

logger = logging.getLogger(__name__)

SLOPE_CSV_COLUMNS = ("x", "y", "slope_xy", "slope_yx")
MAX_CONDITION = 1e12


@dataclass(frozen=True, eq=False)
class MutualMatrix:
    entries: np.ndarray

    def __post_init__(self):
        entries = np.array(self.entries, dtype=float)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise CalibrationError("mutual matrix must be square")
        if not np.all(np.isfinite(entries)):
            raise CalibrationError("mutual matrix has non-finite entries")
        if not np.allclose(np.diag(entries), 1.0, rtol=0, atol=1e-12):
            raise CalibrationError("mutual matrix must be row-normalized "
                                   "(unit diagonal)")
        if np.linalg.cond(entries) > MAX_CONDITION:
            raise CalibrationError("mutual matrix is not invertible")
        object.__setattr__(self, "entries", entries)

    @property
    def n(self):
        return self.entries.shape[0]

    def __getitem__(self, index):
        return self.entries[index]

    @classmethod
    def from_raw(cls, matrix):
        """Row-normalize a matrix of mutual inductances."""
        matrix = np.asarray(matrix, dtype=float)
        return cls(matrix / np.diag(matrix)[:, None])


@dataclass(frozen=True)
class SlopeMeasurement:
    """Slopes of the two constant-flux traces of coils x and y.

    slope_xy is dI_y/dI_x along the trace of constant Phi_x, slope_yx
    is dI_x/dI_y along the trace of constant Phi_y. An infinite slope is
    a vertical trace (no crosstalk).
    """
    x: int
    y: int
    slope_xy: float
    slope_yx: float

    def __post_init__(self):
        if self.x == self.y:
            raise CalibrationError("a slope measurement needs two different "
                                   "coils, got x = y = {}".format(self.x))
        if np.isnan(self.slope_xy) or np.isnan(self.slope_yx):
            raise CalibrationError("slopes must not be NaN")


def ratios_from_slopes(m):
    """Return (M_xy / M_xx, M_yx / M_yy) = (-1 / slope_xy, -1 / slope_yx)."""
    if m.slope_xy == 0 or m.slope_yx == 0:
        raise InfiniteCrosstalkError(
            "zero slope for coils ({}, {}) means infinite crosstalk".format(
                m.x, m.y))
    # + 0.0 turns -0.0 from vertical traces into 0.0
    return -1.0 / m.slope_xy + 0.0, -1.0 / m.slope_yx + 0.0


def trace_points(matrix, x, y, flux, sweep):
    """Points (I_x, I_y) of constant Phi_x = `flux` while I_y runs over
    `sweep` and every other coil is off."""
    m = np.asarray(getattr(matrix, "entries", matrix), dtype=float)
    i_y = np.asarray(sweep, dtype=float)
    i_x = (flux - m[x, y] * i_y) / m[x, x]
    return i_x, i_y


def fit_trace_slope(i_x, i_y):
    """Least-squares slope dI_y/dI_x of a straight trace.

    Steep traces are fitted as I_x(I_y) and inverted, so a vertical
    trace gives an infinite slope instead of a bad fit.
    """
    i_x = np.asarray(i_x, dtype=float)
    i_y = np.asarray(i_y, dtype=float)
    if len(i_x) < 2 or len(i_x) != len(i_y):
        raise ParameterError("a trace needs at least two (I_x, I_y) points")
    if np.ptp(i_y) > np.ptp(i_x):
        inverse = np.polyfit(i_y, i_x, 1)[0]
        return np.inf if inverse == 0 else 1.0 / inverse
    return float(np.polyfit(i_x, i_y, 1)[0])


def slope_measurements_from_matrix(matrix, flux=1e-3, sweep=None):
    """Simulate both traces for every coil pair of a known matrix."""
    m = np.asarray(getattr(matrix, "entries", matrix), dtype=float)
    if sweep is None:
        sweep = np.linspace(-1e-3, 1e-3, 21)
    measurements = []
    for x, y in itertools.combinations(range(m.shape[0]), 2):
        i_x, i_y = trace_points(m, x, y, flux, sweep)
        j_y, j_x = trace_points(m, y, x, flux, sweep)
        measurements.append(SlopeMeasurement(
            x, y, fit_trace_slope(i_x, i_y), fit_trace_slope(j_y, j_x)))
    return measurements


def assemble_mutual_matrix(measurements, n):
    """Fill a row-normalized n x n matrix from one slope measurement per
    coil pair (n (n - 1) / 2 in total)."""
    entries = np.eye(n)
    seen = set()
    for m in measurements:
        if not (0 <= m.x < n and 0 <= m.y < n):
            raise CalibrationError("coil index out of range in pair "
                                   "({}, {})".format(m.x, m.y))
        pair = (min(m.x, m.y), max(m.x, m.y))
        if pair in seen:
            raise CalibrationError("duplicate measurement for coil pair "
                                   "{}".format(pair))
        seen.add(pair)
        entries[m.x, m.y], entries[m.y, m.x] = ratios_from_slopes(m)
    missing = set(itertools.combinations(range(n), 2)) - seen
    if missing:
        raise IncompleteCalibrationError(missing)
    logger.info("assembled %dx%d mutual matrix from %d pairs", n, n,
                len(seen))
    return MutualMatrix(entries)


def _untuned(n, tuned):
    if not 0 <= tuned < n:
        raise ParameterError("tuned index {} out of range".format(tuned))
    return [j for j in range(n) if j != tuned]


def compensation_currents(matrix, tuned, i_tuned):
    """Currents in the other n - 1 coils (in index order) that cancel
    the flux a current `i_tuned` in coil `tuned` induces in them."""
    m = matrix.entries
    others = _untuned(matrix.n, tuned)
    block = m[np.ix_(others, others)]
    if np.linalg.cond(block) > MAX_CONDITION:
        raise CalibrationError("compensation system for coil {} is "
                               "singular".format(tuned))
    return np.linalg.solve(block, -m[others, tuned] * i_tuned)


def full_currents(matrix, tuned, i_tuned):
    """All n coil currents: `i_tuned` plus its compensation."""
    others = _untuned(matrix.n, tuned)
    currents = np.zeros(matrix.n)
    currents[tuned] = i_tuned
    currents[others] = compensation_currents(matrix, tuned, i_tuned)
    return currents


def residual_crosstalk(true_matrix, currents, tuned):
    """max |Phi_j| over untuned j relative to |Phi_tuned|."""
    m = np.asarray(getattr(true_matrix, "entries", true_matrix))
    flux = m @ np.asarray(currents, dtype=float)
    others = _untuned(len(flux), tuned)
    return float(np.max(np.abs(flux[others])) / abs(flux[tuned]))


def normalize_spectrum(raw, reference=None, mode="transmission", a=1.0):
    """Remove the measurement chain from a raw spectrum.

    Parameters
    ----------
    raw: Spectrum
    reference: Spectrum, float or None
        Transmission mode: the saturated-qubit (background) spectrum on
        the same grid. Reflection mode: the resonance frequency, or None
        to use the point of largest |raw|.
    mode: str
        "transmission": raw / (a * reference).
        "reflection": raw / raw(omega_r).
    a: float
        Gain correction for the transmission reference.
    """
    if not a > 0:
        raise ParameterError("gain correction a must be > 0")
    if mode == "transmission":
        if not isinstance(reference, Spectrum):
            raise ParameterError("transmission normalization needs a "
                                 "reference spectrum")
        if not np.array_equal(reference.frequencies, raw.frequencies):
            raise ParameterError("reference and raw grids differ")
        zero = np.nonzero(reference.values == 0)[0]
        if len(zero):
            raise ZeroReferenceError("reference spectrum is zero",
                                     omega=raw.frequencies[zero[0]])
        values = raw.values / (a * reference.values)
    elif mode == "reflection":
        if reference is None or reference == "peak":
            index = int(np.argmax(np.abs(raw.values)))
        else:
            omega_r = float(reference)
            if not raw.frequencies[0] <= omega_r <= raw.frequencies[-1]:
                raise ParameterError("resonance frequency outside the grid")
            index = int(np.argmin(np.abs(raw.frequencies - omega_r)))
        anchor = raw.values[index]
        if anchor == 0:
            raise ZeroReferenceError("raw reflection is zero at the "
                                     "resonance", omega=raw.frequencies[index])
        values = raw.values / anchor
        values[index] = 1.0
    else:
        raise ParameterError("unknown normalization mode {!r}".format(mode))
    return Spectrum(raw.frequencies, values, raw.kind,
                    dict(raw.metadata, normalized=mode))


def read_slope_csv(path):
    """Slope measurements from a CSV with columns x, y, slope_xy and
    slope_yx. Lines starting with '#' are skipped."""
    try:
        with open(path, newline="") as handle:
            rows = list(csv.DictReader(
                line for line in handle if not line.startswith("#")))
    except OSError as exc:
        raise CalibrationError("cannot read {}: {}".format(
            path, exc.strerror or exc))
    missing = set(SLOPE_CSV_COLUMNS) - set(rows[0] if rows else ())
    if missing:
        raise CalibrationError("{}: missing columns {}".format(
            path, sorted(missing)))
    return [SlopeMeasurement(int(row["x"]), int(row["y"]),
                             float(row["slope_xy"]), float(row["slope_yx"]))
            for row in rows]


def write_slope_csv(path, measurements):
    with open(path, "w", newline="") as handle:
        writer = csv.DictWriter(handle, fieldnames=SLOPE_CSV_COLUMNS,
                                lineterminator="\n")
        writer.writeheader()
        for m in measurements:
            writer.writerow({"x": m.x, "y": m.y,
                             "slope_xy": repr(float(m.slope_xy)),
                             "slope_yx": repr(float(m.slope_yx))})
