#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""Tests for flux-crosstalk calibration and spectrum normalization."""

import numpy as np
import pytest

from waveguide_metamaterial.calibration import (
    MutualMatrix, SlopeMeasurement, assemble_mutual_matrix,
    compensation_currents, fit_trace_slope, full_currents,
    normalize_spectrum, ratios_from_slopes, read_slope_csv,
    residual_crosstalk, slope_measurements_from_matrix, trace_points,
    write_slope_csv)
from waveguide_metamaterial.errors import (CalibrationError,
                                           IncompleteCalibrationError,
                                           InfiniteCrosstalkError,
                                           ParameterError,
                                           ZeroReferenceError)
from waveguide_metamaterial.fitting import Spectrum


def random_matrix(n=8, bound=0.05, seed=0):
    rng = np.random.default_rng(seed)
    entries = rng.uniform(-bound, bound, size=(n, n))
    np.fill_diagonal(entries, 1.0)
    return MutualMatrix(entries)


def test_round_trip_reconstructs_the_matrix():
    true = random_matrix()
    measurements = slope_measurements_from_matrix(true)
    assert len(measurements) == 28
    rebuilt = assemble_mutual_matrix(measurements, 8)
    np.testing.assert_allclose(rebuilt.entries, true.entries, rtol=0,
                               atol=1e-10)


def test_compensation_nulls_untuned_fluxes():
    true = random_matrix()
    for tuned in (0, 3, 7):
        currents = full_currents(true, tuned, 1e-3)
        assert currents[tuned] == 1e-3
        assert residual_crosstalk(true, currents, tuned) < 1e-12
        assert len(compensation_currents(true, tuned, 1e-3)) == 7


def test_residual_of_perturbed_estimate_is_bounded():
    p = 0.01
    true = random_matrix()
    rng = np.random.default_rng(1)
    factors = 1 + rng.uniform(-p, p, size=(8, 8))
    np.fill_diagonal(factors, 1.0)
    estimate = MutualMatrix(true.entries * factors)
    tuned = 3
    currents = full_currents(estimate, tuned, 1e-3)
    flux = true.entries @ currents
    others = [j for j in range(8) if j != tuned]
    bound = p * np.max(np.abs(true.entries[others] * currents).sum(axis=1)) \
        / abs(flux[tuned])
    residual = residual_crosstalk(true, currents, tuned)
    assert 0 < residual <= bound


def test_trace_slope_recovers_the_ratio():
    m = np.array([[1.0, 0.04], [-0.02, 1.0]])
    i_x, i_y = trace_points(m, 0, 1, 1e-3, np.linspace(-1e-3, 1e-3, 11))
    slope = fit_trace_slope(i_x, i_y)
    assert slope == pytest.approx(-1 / 0.04)
    measurement = SlopeMeasurement(0, 1, slope, -1 / -0.02)
    assert ratios_from_slopes(measurement) == pytest.approx((0.04, -0.02))


def test_vertical_trace_means_no_crosstalk():
    m = np.eye(2)
    i_x, i_y = trace_points(m, 0, 1, 1e-3, np.linspace(-1e-3, 1e-3, 11))
    slope = fit_trace_slope(i_x, i_y)
    assert abs(slope) > 1e10
    ratio, _ = ratios_from_slopes(SlopeMeasurement(0, 1, slope, np.inf))
    assert ratio == pytest.approx(0.0, abs=1e-10)
    assert ratios_from_slopes(SlopeMeasurement(0, 1, np.inf, np.inf)) == \
        (0.0, 0.0)


def test_zero_slope_is_infinite_crosstalk():
    with pytest.raises(InfiniteCrosstalkError):
        ratios_from_slopes(SlopeMeasurement(0, 1, 0.0, -10.0))


def test_slope_measurement_validation():
    with pytest.raises(CalibrationError):
        SlopeMeasurement(2, 2, 1.0, 1.0)
    with pytest.raises(CalibrationError):
        SlopeMeasurement(0, 1, float("nan"), 1.0)
    with pytest.raises(ParameterError):
        fit_trace_slope([1.0], [2.0])


def test_missing_pairs_are_listed():
    measurements = slope_measurements_from_matrix(random_matrix(n=4))
    with pytest.raises(IncompleteCalibrationError) as info:
        assemble_mutual_matrix(measurements[1:], 4)
    assert info.value.missing == [(0, 1)]


def test_duplicate_and_out_of_range_pairs():
    measurements = slope_measurements_from_matrix(random_matrix(n=3))
    with pytest.raises(CalibrationError):
        assemble_mutual_matrix(measurements + measurements[:1], 3)
    with pytest.raises(CalibrationError):
        assemble_mutual_matrix([SlopeMeasurement(0, 5, -10.0, -10.0)], 3)


def test_mutual_matrix_validation():
    with pytest.raises(CalibrationError):
        MutualMatrix(np.ones((2, 3)))
    with pytest.raises(CalibrationError):
        MutualMatrix([[2.0, 0.1], [0.1, 1.0]])
    with pytest.raises(CalibrationError):
        MutualMatrix([[1.0, 1.0], [1.0, 1.0]])
    m = MutualMatrix.from_raw([[2.0, 0.1], [0.3, 3.0]])
    np.testing.assert_allclose(m.entries, [[1.0, 0.05], [0.1, 1.0]])
    assert m.n == 2
    assert m[0, 1] == pytest.approx(0.05)


def test_tuned_index_out_of_range():
    with pytest.raises(ParameterError):
        full_currents(random_matrix(n=3), 3, 1e-3)


def test_slope_csv_round_trip(tmp_path):
    measurements = slope_measurements_from_matrix(random_matrix(n=4))
    path = str(tmp_path / "slopes.csv")
    write_slope_csv(path, measurements)
    loaded = read_slope_csv(path)
    assert [(m.x, m.y) for m in loaded] == [(m.x, m.y) for m in measurements]
    assert [m.slope_xy for m in loaded] == [m.slope_xy for m in measurements]


def test_slope_csv_needs_all_columns(tmp_path):
    path = tmp_path / "slopes.csv"
    path.write_text("# measured\nx,y,slope_xy\n0,1,-20.0\n")
    with pytest.raises(CalibrationError):
        read_slope_csv(str(path))


def spectrum(values, kind="S21"):
    return Spectrum(np.linspace(1.0, 2.0, len(values)), values, kind)


def test_transmission_normalization():
    raw = spectrum([0.2, 0.1, 0.2])
    reference = spectrum([0.4, 0.4, 0.5])
    normalized = normalize_spectrum(raw, reference, a=0.5)
    np.testing.assert_allclose(normalized.values, [1.0, 0.5, 0.8])
    assert normalized.metadata["normalized"] == "transmission"
    with pytest.raises(ZeroReferenceError) as info:
        normalize_spectrum(raw, spectrum([0.4, 0.0, 0.5]))
    assert info.value.omega == pytest.approx(1.5)
    with pytest.raises(ParameterError):
        normalize_spectrum(raw, spectrum([1.0, 1.0]))
    with pytest.raises(ParameterError):
        normalize_spectrum(raw, reference, a=0.0)


def test_reflection_normalization():
    raw = spectrum([0.1, 0.3j, 0.1], kind="S22")
    normalized = normalize_spectrum(raw, mode="reflection")
    assert normalized.values[1] == 1.0
    assert normalized.values[0] == pytest.approx(0.1 / 0.3j)
    at_edge = normalize_spectrum(raw, 1.0, mode="reflection")
    assert at_edge.values[0] == 1.0
    with pytest.raises(ParameterError):
        normalize_spectrum(raw, 5.0, mode="reflection")
    with pytest.raises(ParameterError):
        normalize_spectrum(raw, mode="phase")


def test_compensation_is_linear_in_the_tuned_current():
    true = random_matrix(seed=3)
    base = compensation_currents(true, 2, 1e-3)
    np.testing.assert_allclose(compensation_currents(true, 2, 2e-3),
                               2 * base, rtol=1e-12)
    np.testing.assert_allclose(compensation_currents(true, 2, -1e-3),
                               -base, rtol=1e-12)


def test_missing_slope_file(tmp_path):
    with pytest.raises(CalibrationError):
        read_slope_csv(str(tmp_path / "absent.csv"))


def test_normalization_is_idempotent():
    omegas = np.linspace(1.0, 2.0, 5)
    raw = Spectrum(omegas, [0.3 + 0.1j, 0.2j, 0.05, 0.2j, 0.3 - 0.1j])
    reference = Spectrum(omegas, 0.4 * np.exp(0.3j * omegas))
    once = normalize_spectrum(raw, reference)
    unity = normalize_spectrum(reference, reference)
    np.testing.assert_allclose(unity.values, 1.0, rtol=1e-14)
    twice = normalize_spectrum(once, unity)
    np.testing.assert_allclose(twice.values, once.values, rtol=1e-12)


def test_gain_correction_recovers_the_device_response():
    omegas = np.linspace(1.0, 2.0, 21)
    device = 1 - 0.9 / (1 + 1j * (omegas - 1.5) / 0.1)
    chain = 0.02 * np.exp(-2.0j * omegas)
    reference = Spectrum(omegas, chain)
    raw = Spectrum(omegas, 1.02 * chain * device)
    normalized = normalize_spectrum(raw, reference, a=1.02)
    np.testing.assert_allclose(normalized.values, device, rtol=1e-12)
