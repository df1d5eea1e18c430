# -*- coding: utf-8 -*-

"""The experiments behind `waveguide-metamaterial run <scenario>`."""

import hashlib
import logging
import os
import warnings

import numpy as np
import scipy.stats
from tqdm.auto import tqdm

from ..calibration import (MutualMatrix, assemble_mutual_matrix,
                           full_currents, normalize_spectrum, read_slope_csv,
                           residual_crosstalk,
                           slope_measurements_from_matrix)
from ..config import (array_config, array_qubit, ats_qubit,
                      background_model, coherence_qubits, grid,
                      grid_problems)
from ..errors import AmbiguousWindowError, NoCrossingError, ValidityWarning
from ..fitting import (fit_log_law, fit_lorentzian_linewidth, fit_power_law,
                       fit_two_level_resonance, lineshape_skewness,
                       noisy_copy, saturation_p50)
from ..hamiltonian import (ArrayConfig, brightest_subradiant,
                           build_effective_hamiltonian, dispersion_estimate,
                           eigenmodes, perturbative_subradiant_rate)
from ..inputoutput import (blind_spot_detuning, fano_background,
                           fano_reflection_approx, fano_validity_halfwidth,
                           reflection_poles, scattering_from_dipoles,
                           solve_dipole_moments, symmetric_dimer_solution)
from ..qubit import (DriveParams, QubitParams, analytic_p50_rabi,
                     extinction_coefficient, power_from_rabi)
from ..transfer import (BackgroundModel, ats_sweep, bandgap_width,
                        chain_scattering, saturation_sweep, spectrum_sweep,
                        transmission_minima)
from ..units import ghz, mhz, power_to_dbm, to_db, to_hz
from .base import Scenario, Table, map_table, spectrum_table

logger = logging.getLogger(__name__)

# drive Rabi rate, in units of Gamma10, that bleaches every qubit
SATURATING_RABI = 1e4


def _frequency_grid(center, span_mhz, points):
    return center + mhz(np.linspace(-span_mhz, span_mhz, int(points)))


def _int_problems(prefix, section, keys, low=1, high=None):
    problems = []
    for key in keys:
        value = section.get(key)
        if not isinstance(value, int) or isinstance(value, bool) \
                or value < low or (high is not None and value > high):
            bounds = ">= {}".format(low) if high is None else \
                "in [{}, {}]".format(low, high)
            problems.append("{}.{}: must be an integer {}".format(
                prefix, key, bounds))
    return problems


def _number_problems(prefix, section, keys, low=0.0):
    problems = []
    for key in keys:
        value = section.get(key)
        if isinstance(value, bool) or not isinstance(value, (int, float)) \
                or not np.isfinite(value) or not value > low:
            problems.append("{}.{}: must be a number > {}".format(
                prefix, key, low))
    return problems


def _n_values_problems(prefix, section, key="n_values"):
    values = section.get(key)
    if isinstance(values, list) and not all(
            isinstance(v, int) and not isinstance(v, bool) and v >= 1
            for v in values):
        return ["{}.{}: entries must be positive integers".format(
            prefix, key)]
    return []


def _eigen_rows(modes, **fixed):
    rows = {key: [] for key in fixed}
    rows.update(rank=[], frequency_Hz=[], gamma_xi_Hz=[])
    for mode in modes:
        for key, value in fixed.items():
            rows[key].append(value)
        rows["rank"].append(mode.rank)
        rows["frequency_Hz"].append(to_hz(mode.omega_xi.real))
        rows["gamma_xi_Hz"].append(to_hz(mode.gamma_xi))
    return rows


def _extend(rows, more):
    for key, values in more.items():
        rows.setdefault(key, []).extend(values)


class ResonantStack(Scenario):
    """Transmission of 1..N resonant qubits and the growing bandgap."""
    id = "resonant_stack"
    required = ("n_values", "span_MHz", "points")
    grids = ("n_values",)

    @classmethod
    def check(cls, section, config):
        prefix = "scenarios." + cls.id
        problems = super().check(section, config) \
            + _n_values_problems(prefix, section) \
            + _int_problems(prefix, section, ("points",), low=3) \
            + _number_problems(prefix, section, ("span_MHz",))
        sigma = section.get("fit_noise_sigma", 0.0)
        if isinstance(sigma, bool) or not isinstance(sigma, (int, float)) \
                or not np.isfinite(sigma) or sigma < 0:
            problems.append("{}.fit_noise_sigma: must be a number "
                            ">= 0".format(prefix))
        return problems

    def setup(self):
        omega_ref = ghz(self.config["array"]["omega_ref_GHz"])
        self.omegas = _frequency_grid(omega_ref, self.section["span_MHz"],
                                      self.section["points"])
        self.threshold_db = float(self.section.get("threshold_dB", -25.0))

    def run(self):
        bg = background_model(self.config)
        gamma_rad = mhz(self.config["array"]["gamma_rad_MHz"])
        tables = [self._coherence_table()]
        eigen = {}
        widths = []
        for n in tqdm(self.section["n_values"], desc="Resonant stack",
                      unit="N", leave=False, disable=not self.progress):
            cfg = array_config(self.config, n=n)
            spectra = spectrum_sweep(cfg, bg, self.omegas,
                                     response_model=self.spec.response_model,
                                     phase_mode=self.spec.phase_mode)
            s21 = spectra["S21"].values
            calibrated = self._calibrated(cfg, bg, spectra["S21"])
            if n == 1:
                self._single_qubit_fit(calibrated)
            tables.append(spectrum_table(
                "s21_N{}".format(n), self.omegas, s21,
                description="|S21| for {} resonant qubits".format(n),
                extra={"calibrated_abs2_dB": to_db(calibrated.power)}))
            modes = eigenmodes(build_effective_hamiltonian(cfg))
            _extend(eigen, _eigen_rows(modes, n_qubits=n))
            widths.append(bandgap_width(self.omegas, s21, self.threshold_db))

        tables.append(Table("eigenfrequencies", eigen,
                            description="eigenmodes of the effective "
                                        "Hamiltonian, rank 0 superradiant"))
        widths = np.array(widths)
        tables.append(Table(
            "bandgap", {"n_qubits": self.section["n_values"],
                        "width_Hz": to_hz(widths),
                        "width_over_gamma": widths / gamma_rad},
            plot=("line", "n_qubits", "width_over_gamma"),
            description="width of the region with |S21|^2 below "
                        "{} dB".format(self.threshold_db)))
        self.metadata["threshold_dB"] = self.threshold_db
        return tables

    def _calibrated(self, cfg, bg, s21):
        """`s21` divided by the transmission of the bleached array, which
        leaves the mirrors and leads out. The reference is computed with
        the two-level response."""
        drive = DriveParams(omega_p=0.0,
                            rabi_p=SATURATING_RABI * cfg.gamma_rad)
        reference = spectrum_sweep(cfg, bg, self.omegas, drive=drive,
                                   phase_mode=self.spec.phase_mode)["S21"]
        return normalize_spectrum(s21, reference)

    def _single_qubit_fit(self, s21):
        sigma = float(self.section.get("fit_noise_sigma", 0.0))
        data = noisy_copy(s21, sigma, self.rng) if sigma > 0 else s21
        fit = fit_two_level_resonance(data)
        if not fit.converged:
            logger.warning("single-qubit fit: %s", fit.message)
        self.metadata["single_qubit_fit"] = dict(fit.to_dict(),
                                                 noise_sigma=sigma)

    def _coherence_table(self):
        table = self.config["coherence_table"]
        computed = [100.0 * extinction_coefficient(q)
                    for q in coherence_qubits(self.config)]
        return Table("qubit_parameters", {
            "qubit": np.arange(len(computed)),
            "T1_ns": table["T1_ns"],
            "T2_ns": table["T2_ns"],
            "extinction_quoted_percent": table["extinction_percent"],
            "extinction_percent": computed,
        }, description="extinction from T1 and T2 next to the quoted values")


class DetunedQubit(Scenario):
    """One qubit swept through the collective resonance of the others."""
    id = "detuned_qubit"
    required = ("n_qubits", "tuned", "detuning_MHz", "span_MHz", "points")
    grids = ("detuning_MHz",)

    @classmethod
    def check(cls, section, config):
        prefix = "scenarios." + cls.id
        problems = super().check(section, config) \
            + _int_problems(prefix, section, ("n_qubits",), low=2) \
            + _int_problems(prefix, section, ("points",), low=3) \
            + _number_problems(prefix, section, ("span_MHz",))
        n = section.get("n_qubits")
        if isinstance(n, int):
            problems += _int_problems(prefix, section, ("tuned",), low=0,
                                      high=n - 1)
        return problems

    def run(self):
        bg = background_model(self.config)
        qubit = array_qubit(self.config)
        base = array_config(self.config, n=self.section["n_qubits"])
        tuned = self.section["tuned"]
        omegas = _frequency_grid(qubit.omega10, self.section["span_MHz"],
                                 self.section["points"])
        deltas = mhz(grid(self.section["detuning_MHz"]))

        rows = []
        traces = {}
        for delta in tqdm(deltas, desc="Detuning sweep", unit="step",
                          leave=False, disable=not self.progress):
            cfg = base.with_qubit(tuned, qubit.detuned(delta))
            result = chain_scattering(cfg, bg, DriveParams(omega_p=omegas),
                                      self.spec.response_model,
                                      self.spec.phase_mode)
            rows.append(result.s22)
            modes = eigenmodes(build_effective_hamiltonian(cfg))
            _extend(traces, _eigen_rows(modes, detuning_Hz=to_hz(delta)))

        # the last configuration is the least symmetric one
        reverse = chain_scattering(cfg.reversed(), bg.reversed(),
                                   DriveParams(omega_p=omegas),
                                   self.spec.response_model,
                                   self.spec.phase_mode)
        self.metadata["reciprocity_error"] = float(
            np.max(np.abs(reverse.s21 - result.s21)))
        self.metadata["tuned_qubit"] = tuned
        return [
            map_table("s22_map", omegas, "detuning_Hz", to_hz(deltas), rows,
                      description="|S22| while qubit {} is detuned".format(
                          tuned)),
            Table("eigenfrequency_traces", traces,
                  plot=("line", "detuning_Hz", "frequency_Hz"),
                  description="eigenfrequencies versus detuning"),
        ]


class Saturation(Scenario):
    """Power saturation of the on-resonance transmission."""
    id = "saturation"
    required = ("n_values", "rabi_over_gamma", "map_n",
                "map_rabi_over_gamma", "span_MHz", "points")
    grids = ("n_values", "rabi_over_gamma", "map_rabi_over_gamma")

    @classmethod
    def check(cls, section, config):
        prefix = "scenarios." + cls.id
        return super().check(section, config) \
            + _n_values_problems(prefix, section) \
            + _int_problems(prefix, section, ("map_n",)) \
            + _int_problems(prefix, section, ("points",), low=3) \
            + _number_problems(prefix, section, ("span_MHz",))

    def _power_columns(self, rabi, name):
        """dBm column for a Rabi axis, only when kappa is configured."""
        kappa = self.spec.kappa
        if kappa is None:
            return {}
        rabi = np.asarray(rabi, dtype=float)
        dbm = np.full(rabi.shape, np.nan)
        positive = rabi > 0
        dbm[positive] = power_to_dbm(power_from_rabi(rabi[positive], kappa))
        return {name: dbm}

    def run(self):
        bg = background_model(self.config)
        gamma_rad = mhz(self.config["array"]["gamma_rad_MHz"])
        omega_ref = ghz(self.config["array"]["omega_ref_GHz"])
        rabi_axis = grid(self.section["rabi_over_gamma"])
        n_values = self.section["n_values"]

        curves = {}
        p50 = []
        for n in tqdm(n_values, desc="Saturation", unit="N", leave=False,
                      disable=not self.progress):
            cfg = array_config(self.config, n=n)
            sat = saturation_sweep(cfg, bg, [omega_ref],
                                   rabi_values=rabi_axis * gamma_rad,
                                   phase_mode=self.spec.phase_mode)
            transmission = sat.power_transmission[:, 0]
            _extend(curves, {"n_qubits": [n] * len(rabi_axis),
                             "rabi_over_gamma": rabi_axis,
                             "transmission": transmission})
            try:
                p50.append(saturation_p50(rabi_axis, transmission))
            except NoCrossingError as exc:
                logger.warning("N = %d: %s", n, exc)
                p50.append(np.nan)
        curves.update(self._power_columns(
            np.array(curves["rabi_over_gamma"]) * gamma_rad, "power_dBm"))

        p50 = np.array(p50)
        p50_columns = {"n_qubits": n_values, "p50_rabi_over_gamma": p50}
        p50_columns.update(self._power_columns(p50 * gamma_rad, "p50_dBm"))
        finite = np.isfinite(p50)
        if np.count_nonzero(finite) >= 3:
            fit = fit_log_law(np.array(n_values)[finite], p50[finite])
            self.metadata["p50_log_fit"] = fit.to_dict()
        self.metadata["p50_single_qubit_analytic_over_gamma"] = \
            analytic_p50_rabi(array_qubit(self.config)) / gamma_rad
        kappa = self.spec.kappa
        self.metadata["kappa"] = kappa
        self.metadata["power_axis"] = "rabi_over_gamma" \
            if kappa is None else "rabi_over_gamma, dBm"

        map_n = self.section["map_n"]
        map_axis = grid(self.section["map_rabi_over_gamma"])
        omegas = _frequency_grid(omega_ref, self.section["span_MHz"],
                                 self.section["points"])
        sat_map = saturation_sweep(
            array_config(self.config, n=map_n), bg, omegas,
            rabi_values=map_axis * gamma_rad,
            phase_mode=self.spec.phase_mode, progress=self.progress)
        return [
            Table("on_resonance", curves,
                  description="|S21(omega_r)|^2 versus drive Rabi rate"),
            Table("p50", p50_columns,
                  plot=("line", "n_qubits", "p50_rabi_over_gamma"),
                  description="drive strength for 50 % transmission"),
            map_table("s21_saturation_map", omegas, "rabi_over_gamma",
                      map_axis, sat_map.s21,
                      description="|S21| of {} qubits versus drive "
                                  "strength".format(map_n)),
        ]


class AutlerTownes(Scenario):
    """Collective Autler-Townes splitting of the three-level array."""
    id = "ats"
    required = ("n_qubits", "rabi_c_MHz", "span_MHz", "points")
    grids = ("rabi_c_MHz",)

    @classmethod
    def check(cls, section, config):
        prefix = "scenarios." + cls.id
        problems = super().check(section, config) \
            + _int_problems(prefix, section, ("n_qubits",)) \
            + _int_problems(prefix, section, ("points",), low=3) \
            + _number_problems(prefix, section, ("span_MHz",))
        rabi = section.get("rabi_c_MHz")
        if rabi is not None and not grid_problems("", rabi) \
                and np.any(grid(rabi) < 0):
            problems.append("{}.rabi_c_MHz: values must be >= 0".format(
                prefix))
        return problems

    def run(self):
        bg = background_model(self.config)
        qubit = ats_qubit(self.config)
        cfg = array_config(self.config, n=self.section["n_qubits"],
                           qubit=qubit)
        omegas = _frequency_grid(qubit.omega10, self.section["span_MHz"],
                                 self.section["points"])
        rabi_c = mhz(grid(self.section["rabi_c_MHz"]))
        s21 = ats_sweep(cfg, bg, omegas, rabi_c, omega_c=qubit.omega21,
                        phase_mode=self.spec.phase_mode,
                        progress=self.progress)

        center = int(np.argmin(np.abs(omegas - qubit.omega10)))
        lower, upper = np.array([transmission_minima(omegas, row,
                                                     qubit.omega10)
                                 for row in s21]).T
        splitting = upper - lower
        center_db = to_db(np.abs(s21[:, center]) ** 2)

        upper_half = rabi_c >= 0.5 * (rabi_c[0] + rabi_c[-1])
        if np.count_nonzero(upper_half) >= 3:
            fit = scipy.stats.linregress(rabi_c[upper_half],
                                         splitting[upper_half])
            self.metadata["splitting_fit"] = {
                "slope": float(fit.slope),
                "intercept_Hz": float(to_hz(fit.intercept)),
                "r_squared": float(fit.rvalue ** 2),
            }
        self.metadata["transparency_monotonic"] = bool(
            np.all(np.diff(center_db) >= 0))
        self.metadata["response_model"] = "three_level"
        return [
            map_table("s21_map", omegas, "rabi_c_Hz", to_hz(rabi_c), s21,
                      description="|S21| versus control Rabi rate"),
            Table("splitting", {
                "rabi_c_Hz": to_hz(rabi_c),
                "lower_Hz": to_hz(lower),
                "upper_Hz": to_hz(upper),
                "splitting_Hz": to_hz(splitting),
                "center_abs2_dB": center_db,
            }, plot=("line", "rabi_c_Hz", "splitting_Hz"),
                description="transmission minima either side of omega10"),
        ]


class Fano(Scenario):
    """Three emitters, the third detuned: exact reflection against the
    two-mode and reduced descriptions."""
    id = "fano"
    required = ("phi", "detuning_over_gamma", "points")
    grids = ("detuning_over_gamma",)

    @classmethod
    def check(cls, section, config):
        prefix = "scenarios." + cls.id
        problems = super().check(section, config) \
            + _int_problems(prefix, section, ("points",), low=5) \
            + _number_problems(prefix, section, ("phi",))
        phi = section.get("phi")
        if isinstance(phi, (int, float)) and not phi < np.pi:
            problems.append("{}.phi: must be < pi".format(prefix))
        return problems

    def run(self):
        array = self.config["array"]
        gamma_rad = mhz(array["gamma_rad_MHz"])
        omega0 = ghz(array["omega_ref_GHz"])
        phi = float(self.section["phi"])
        points = self.section["points"]
        qubit = QubitParams(omega10=omega0, gamma_rad=gamma_rad)
        base = ArrayConfig.from_phi(3, phi, qubit,
                                    phase_velocity=array["phase_velocity_m_s"])

        tables = []
        summary = {key: [] for key in (
            "detuning_over_gamma", "halfwidth_Hz", "r0_re", "r0_im",
            "skewness_exact", "skewness_approx", "max_approx_deviation",
            "max_dimer_error", "narrow_pole_Hz", "narrow_width_over_gamma")}
        for x in grid(self.section["detuning_over_gamma"]):
            delta = 0.5 * x * gamma_rad
            cfg = base.with_qubit(2, qubit.detuned(delta))
            halfwidth = fano_validity_halfwidth(delta, gamma_rad, phi)
            omegas = omega0 + delta + np.linspace(-halfwidth, halfwidth,
                                                  points)
            exact, _ = scattering_from_dipoles(
                solve_dipole_moments(cfg, omegas, include_loss=False),
                gamma_rad)
            approx = fano_reflection_approx(omegas, omega0, delta, gamma_rad,
                                            phi, warn=False)
            dimer = symmetric_dimer_solution(omegas, omega0, delta,
                                             gamma_rad, phi)[0]
            power = np.abs(exact) ** 2
            tables.append(spectrum_table(
                "reflection_delta{:+.2f}".format(x), omegas, exact,
                description="reflection for 2 delta / Gamma10 = "
                            "{:+.2f}".format(x),
                extra={"approx_abs2_dB": to_db(np.abs(approx) ** 2),
                       "dimer_abs2_dB": to_db(np.abs(dimer) ** 2)}))

            r0 = fano_background(delta, gamma_rad, phi)
            summary["detuning_over_gamma"].append(x)
            summary["halfwidth_Hz"].append(to_hz(halfwidth))
            summary["r0_re"].append(r0.real)
            summary["r0_im"].append(r0.imag)
            summary["skewness_exact"].append(
                lineshape_skewness(omegas, power))
            summary["skewness_approx"].append(
                lineshape_skewness(omegas, np.abs(approx) ** 2))
            summary["max_approx_deviation"].append(
                np.max(np.abs(power - np.abs(approx) ** 2)))
            summary["max_dimer_error"].append(np.max(np.abs(dimer - exact)))
            poles = reflection_poles(cfg, include_loss=False)
            narrow = poles[np.argmin(poles.imag)]
            summary["narrow_pole_Hz"].append(to_hz(narrow.real))
            summary["narrow_width_over_gamma"].append(
                2.0 * narrow.imag / gamma_rad)

        self.metadata["blind_spot_over_gamma"] = \
            2.0 * blind_spot_detuning(phi, gamma_rad) / gamma_rad
        self.metadata["phase_mode"] = "markov"
        tables.append(Table("fano_summary", summary,
                            plot=("line", "detuning_over_gamma",
                                  "skewness_exact"),
                            description="lineshape asymmetry inside the "
                                        "validity window"))
        return tables


class LinewidthScaling(Scenario):
    """Decay rate of the brightest subradiant mode against N."""
    id = "linewidth_scaling"
    required = ("phi", "n_values")
    grids = ("n_values",)

    @classmethod
    def check(cls, section, config):
        prefix = "scenarios." + cls.id
        problems = super().check(section, config) \
            + _n_values_problems(prefix, section) \
            + _number_problems(prefix, section, ("phi",))
        values = section.get("n_values")
        if isinstance(values, list) and values and min(values) < 2:
            problems.append("{}.n_values: N must be >= 2 for a subradiant "
                            "mode".format(prefix))
        check = section.get("spectral_check")
        if check is not None:
            sub = prefix + ".spectral_check"
            if not isinstance(check, dict):
                return problems + ["{}: must be an object".format(sub)]
            problems += _int_problems(sub, check, ("n_qubits",), low=2) \
                + _int_problems(sub, check, ("points",), low=5) \
                + _number_problems(sub, check, ("phi",))
            window = check.get("window_over_gamma")
            if not (isinstance(window, list) and len(window) == 2
                    and window[0] < window[1]):
                problems.append("{}.window_over_gamma: must be [lo, hi] "
                                "with lo < hi".format(sub))
        return problems

    def run(self):
        array = self.config["array"]
        gamma_rad = mhz(array["gamma_rad_MHz"])
        qubit = QubitParams(omega10=ghz(array["omega_ref_GHz"]),
                            gamma_rad=gamma_rad)
        velocity = array["phase_velocity_m_s"]
        phi = float(self.section["phi"])
        n_values = self.section["n_values"]

        columns = {key: [] for key in (
            "n_qubits", "gamma_exact_over_gamma",
            "gamma_perturbative_over_gamma", "gamma_dispersion_over_gamma",
            "shift_exact_over_gamma", "shift_dispersion_over_gamma")}
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", ValidityWarning)
            for n in n_values:
                cfg = ArrayConfig.from_phi(n, phi, qubit, velocity)
                mode = brightest_subradiant(
                    eigenmodes(build_effective_hamiltonian(cfg)))
                estimate = dispersion_estimate(n, 1, phi, gamma_rad)
                columns["n_qubits"].append(n)
                columns["gamma_exact_over_gamma"].append(
                    mode.gamma_xi / gamma_rad)
                columns["gamma_perturbative_over_gamma"].append(
                    perturbative_subradiant_rate(n, 1, phi, gamma_rad)
                    / gamma_rad)
                columns["gamma_dispersion_over_gamma"].append(
                    2.0 * estimate.imag / gamma_rad)
                columns["shift_exact_over_gamma"].append(
                    (mode.omega_xi.real - qubit.omega10) / gamma_rad)
                columns["shift_dispersion_over_gamma"].append(
                    estimate.real / gamma_rad)
        self.metadata["perturbative_valid"] = not any(
            issubclass(w.category, ValidityWarning) for w in caught)

        fit = fit_power_law(n_values, columns["gamma_exact_over_gamma"])
        self.metadata["power_law"] = fit.to_dict()
        logger.info("power-law exponent b = %.4f", fit["b"])
        tables = [Table("linewidths", columns,
                        plot=("line", "n_qubits", "gamma_exact_over_gamma"),
                        description="brightest subradiant decay rate")]
        if self.section.get("spectral_check"):
            tables.append(self._spectral_check(qubit, velocity))
        return tables

    def _spectral_check(self, qubit, velocity):
        """Lorentzian fit of |S22|^2 around one subradiant resonance."""
        check = self.section["spectral_check"]
        gamma_rad = qubit.gamma_rad
        cfg = ArrayConfig.from_phi(check["n_qubits"], check["phi"], qubit,
                                   velocity)
        exact = brightest_subradiant(
            eigenmodes(build_effective_hamiltonian(cfg))).gamma_xi
        lo, hi = check["window_over_gamma"]
        omegas = qubit.omega10 + gamma_rad * np.linspace(lo, hi,
                                                         check["points"])
        s22 = spectrum_sweep(cfg, BackgroundModel(), omegas,
                             phase_mode="markov")["S22"]
        report = {"gamma_exact_over_gamma": exact / gamma_rad}
        try:
            fit = fit_lorentzian_linewidth(s22, (omegas[0], omegas[-1]))
        except AmbiguousWindowError as exc:
            logger.warning("spectral check skipped: %s", exc)
            report["error"] = str(exc)
        else:
            report["fit"] = fit.to_dict()
            report["gamma_fit_over_gamma"] = fit["gamma_xi"] / gamma_rad
        self.metadata["spectral_check"] = report
        return spectrum_table("spectral_check", omegas, s22.values,
                              description="|S22| around the brightest "
                                          "subradiant mode (markov)")


class Crosstalk(Scenario):
    """Calibration round trip on a mutual-inductance matrix, random or
    assembled from measured slopes."""
    id = "crosstalk"
    required = ("n_coils", "max_crosstalk", "perturbation", "tuned",
                "current_mA")

    @classmethod
    def check(cls, section, config):
        prefix = "scenarios." + cls.id
        problems = super().check(section, config) \
            + _int_problems(prefix, section, ("n_coils",), low=2) \
            + _number_problems(prefix, section, ("max_crosstalk",
                                                 "current_mA"))
        perturbation = section.get("perturbation")
        if not isinstance(perturbation, (int, float)) \
                or not 0 <= perturbation < 1:
            problems.append("{}.perturbation: must lie in [0, 1)".format(
                prefix))
        n = section.get("n_coils")
        if isinstance(n, int):
            problems += _int_problems(prefix, section, ("tuned",), low=0,
                                      high=n - 1)
            crosstalk = section.get("max_crosstalk")
            if isinstance(crosstalk, (int, float)) \
                    and crosstalk * (n - 1) >= 1:
                problems.append("{}.max_crosstalk: (n_coils - 1) * "
                                "max_crosstalk must stay below 1".format(
                                    prefix))
        path = section.get("slopes_csv")
        if path is not None and not (isinstance(path, str)
                                     and os.path.isfile(path)):
            problems.append("{}.slopes_csv: {!r} is not a readable "
                            "file".format(prefix, path))
        return problems

    def _reference_matrix(self, n, bound):
        """The matrix assembled from measured slopes when
        `slopes_csv` is set, a random one otherwise."""
        path = self.section.get("slopes_csv")
        if path is None:
            entries = self.rng.uniform(-bound, bound, size=(n, n))
            np.fill_diagonal(entries, 1.0)
            return MutualMatrix(entries)
        with open(path, "rb") as handle:
            self.metadata["slopes_sha256"] = hashlib.sha256(
                handle.read()).hexdigest()
        logger.info("reading slope measurements from %s", path)
        return assemble_mutual_matrix(read_slope_csv(path), n)

    def run(self):
        n = self.section["n_coils"]
        tuned = self.section["tuned"]
        bound = float(self.section["max_crosstalk"])
        perturbation = float(self.section["perturbation"])
        i_tuned = self.section["current_mA"] * 1e-3

        true = self._reference_matrix(n, bound)
        measurements = slope_measurements_from_matrix(true)
        reconstructed = assemble_mutual_matrix(measurements, n)

        factors = 1.0 + self.rng.uniform(-perturbation, perturbation,
                                         size=(n, n))
        np.fill_diagonal(factors, 1.0)
        estimate = MutualMatrix(true.entries * factors)

        ideal = full_currents(reconstructed, tuned, i_tuned)
        perturbed = full_currents(estimate, tuned, i_tuned)
        flux_ideal = true.entries @ ideal
        flux_perturbed = true.entries @ perturbed
        others = [j for j in range(n) if j != tuned]
        contributions = np.abs(true.entries * perturbed[None, :])
        self.metadata.update({
            "reconstruction_error": float(
                np.max(np.abs(reconstructed.entries - true.entries))),
            "residual_exact": residual_crosstalk(true, ideal, tuned),
            "residual_perturbed": residual_crosstalk(true, perturbed, tuned),
            "residual_bound": float(
                perturbation * np.max(contributions[others].sum(axis=1))
                / abs(flux_perturbed[tuned])),
            "pairs": len(measurements),
            "seed": self.spec.seed,
        })

        rows, cols = np.indices((n, n))
        return [
            Table("mutual_matrix", {
                "row": rows.ravel(), "column": cols.ravel(),
                "true": true.entries.ravel(),
                "reconstructed": reconstructed.entries.ravel(),
                "estimate": estimate.entries.ravel(),
            }, description="row-normalized mutual inductance ratios"),
            Table("slopes", {
                "x": [m.x for m in measurements],
                "y": [m.y for m in measurements],
                "slope_xy": [m.slope_xy for m in measurements],
                "slope_yx": [m.slope_yx for m in measurements],
            }, description="fitted constant-flux trace slopes"),
            Table("compensation", {
                "coil": np.arange(n),
                "current_ideal_A": ideal,
                "current_perturbed_A": perturbed,
                "flux_ideal": flux_ideal,
                "flux_perturbed": flux_perturbed,
            }, description="compensation currents for coil {}".format(
                tuned)),
        ]
