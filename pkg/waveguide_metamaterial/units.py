# -*- coding: utf-8 -*-

"""Unit conversions. Configuration files and the CLI speak linear
frequency (GHz / MHz); everything else in the package works in rad/s."""

import numpy as np

TWO_PI = 2.0 * np.pi


def _scaled(value, factor):
    if np.ndim(value):
        return factor * np.asarray(value, dtype=float)
    return factor * float(value)


def ghz(value):
    """Linear frequency in GHz to angular frequency in rad/s."""
    return _scaled(value, TWO_PI * 1e9)


def mhz(value):
    """Linear frequency in MHz to angular frequency in rad/s."""
    return _scaled(value, TWO_PI * 1e6)


def to_hz(omega):
    return np.asarray(omega) / TWO_PI


def power_to_dbm(power_w):
    return 10.0 * np.log10(np.asarray(power_w, dtype=float) / 1e-3)


def dbm_to_power(dbm):
    return 1e-3 * 10.0 ** (np.asarray(dbm, dtype=float) / 10.0)


def to_db(power_ratio, floor=1e-30):
    """Power ratio to dB. Values below `floor` are clipped to keep the
    result finite."""
    return 10.0 * np.log10(np.maximum(np.asarray(power_ratio, dtype=float),
                                      floor))
