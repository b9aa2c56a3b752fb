"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines.  Two known-red items are asserted faithfully rather than loosened;
the analysis lives in README.md (Known deviations) and the failure messages
below:

* The Autler-Townes gap criterion expects the full steady-state map to
  reproduce (Omega_d^2 + Omega_s^2)^(1/2) within 10%.  With the published
  Kerr coefficients the qubit-excited resonator ladder is nearly harmonic
  (anharmonicity ~0.2 MHz per rung against MHz-scale drives), so the coupler
  dresses several ladder rungs at once and the simulated doublet is ~1.5x
  wider than the 4-level law.  The 4-level limit itself (criterion 3), the
  n_fock=2 truncation, and a large-anharmonicity variant all reproduce the
  law exactly, and the steady-state solver was cross-checked against direct
  time integration to 1e-12, so the inflation is a property of the specified
  model, not of the implementation.

* Truncation invariance at 1e-8 holds for all thermal/weak-drive scenarios
  but not at the two strongest coupler amplitudes (1.0, 1.3 MHz), where the
  n_fock=10 boundary still carries ~1e-6 population and moving it to 14
  shifts the readout by ~1e-7.
"""

import csv
from pathlib import Path

import numpy as np
import pytest

from twotone.analytic import FourLevelParams, at_splitting, dressed_pair_gap
from twotone.cli import main
from twotone.lindblad import build_liouvillian, expectation, steady_state, trace_functional
from twotone.model import (
    TWO_PI,
    DriveSpec,
    derive_params,
    dressed,
    paper_device,
    per_photon_stark_shifts,
)
from twotone.operators import SpaceConfig, identity, qubit_ops, tensor
from twotone.specfit import fit_lorentzians, lorentzian
from twotone.sweep import FixedDrive, SweepAxis, SweepPlan, run_sweep

PARAMS = paper_device()
DRESSED = dressed(PARAMS)
F_GE = DRESSED.omega_ge_tilde / TWO_PI
F_R = DRESSED.omega_r_tilde / TWO_PI
CHI_HZ = PARAMS.chi / TWO_PI
SPACE = SpaceConfig(10, 2)
WORKERS = 2


def report(name: str, passed: bool, detail: str = "") -> bool:
    line = f"ACCEPTANCE {name}: {'PASS' if passed else 'FAIL'}"
    if detail:
        line += f" ({detail})"
    print(line, flush=True)
    return passed


def read_csv(path: Path) -> list[dict]:
    with open(path) as fh:
        return list(csv.DictReader(fh))


# ---------------------------------------------------------------- fixtures

@pytest.fixture(scope="session")
def thermal_outputs(tmp_path_factory):
    out = tmp_path_factory.mktemp("thermal")
    assert main(["spectrum", "--out", str(out), "--workers", str(WORKERS)]) == 0
    return out


@pytest.fixture(scope="session")
def splitting_rows(tmp_path_factory):
    out = tmp_path_factory.mktemp("splitting")
    assert main(["splitting-curve", "--out", str(out), "--workers", str(WORKERS)]) == 0
    return read_csv(out / "splitting.csv")


@pytest.fixture(scope="session")
def sideband_map_blue():
    # between-band region of the wide two-tone window, moderate coupler
    plan = SweepPlan(
        params=PARAMS, space=SPACE,
        axis1=SweepAxis("omega_s", F_GE - 12e6, F_GE + 2e6, 36),
        axis2=SweepAxis("omega_d", F_R - 1e6, F_R + 7e6, 21),
        fixed=FixedDrive(rabi_s=TWO_PI * 0.3e6, rabi_d=TWO_PI * 0.6e6),
    )
    return run_sweep(plan, workers=WORKERS)


# ------------------------------------------------------------- criterion 1

def test_criterion_1_thermal_spectrum(thermal_outputs):
    rows = read_csv(thermal_outputs / "peaks.csv")
    peaks = [r for r in rows if r["row_kind"] == "peak"]
    stats = next(r for r in rows if r["row_kind"] == "stats")
    assert len(peaks) == 2
    centers = sorted(float(r["center_hz"]) for r in peaks)
    separation = centers[1] - centers[0]
    ratio = float(stats["n_th"])
    t_eff = float(stats["t_eff_kelvin"])

    ok_sep = abs(separation - 9.3e6) <= 0.2e6
    ok_ratio = abs(ratio - 0.111) <= 0.01
    ok_t = abs(t_eff - 0.120) <= 0.010
    detail = (f"separation {separation / 1e6:.3f} MHz, w1/w0 {ratio:.4f}, "
              f"T_eff {t_eff * 1e3:.1f} mK")
    assert report("1 thermal-spectrum", ok_sep and ok_ratio and ok_t, detail), detail


# ------------------------------------------------------------- criterion 2

def test_criterion_2a_at_splitting_gap(splitting_rows):
    failures = []
    details = []
    for target_mhz in (0.6, 1.0, 1.3):
        row = min(splitting_rows,
                  key=lambda r: abs(float(r["omega_d_rabi_hz"]) - target_mhz * 1e6))
        assert float(row["omega_d_rabi_hz"]) == pytest.approx(target_mhz * 1e6)
        gap = float(row["gap_hz_simulated"])
        ref = float(row["gap_hz_analytic"])
        rel = abs(gap - ref) / ref if np.isfinite(gap) else np.inf
        details.append(f"Omega_d {target_mhz} MHz: gap {gap / 1e6:.4f} vs {ref / 1e6:.4f} MHz "
                       f"({rel:+.1%})")
        if not rel <= 0.10:
            failures.append(details[-1])
    detail = "; ".join(details)
    passed = report("2a at-splitting-gap-within-10pct", not failures, detail)
    assert passed, (
        "simulated gap exceeds the 4-level law: the published Kerr "
        "coefficients leave the excited-manifold ladder nearly harmonic, so "
        "the coupler dresses several rungs at once (see module docstring "
        "and README Known deviations); " + detail
    )


def test_criterion_2b_at_splitting_linearity(splitting_rows):
    v_rf, gaps = [], []
    for row in splitting_rows:
        gap = float(row["gap_hz_simulated"])
        if np.isfinite(gap):
            v_rf.append(float(row["v_rf_volts"]))
            gaps.append(gap)
    assert len(gaps) >= 5, "too few resolved points for the linearity check"
    slope, intercept = np.polyfit(v_rf, gaps, 1)
    fitted = slope * np.asarray(v_rf) + intercept
    ss_res = float(np.sum((np.asarray(gaps) - fitted) ** 2))
    ss_tot = float(np.sum((np.asarray(gaps) - np.mean(gaps)) ** 2))
    r2 = 1.0 - ss_res / ss_tot
    detail = f"{len(gaps)} resolved points, R^2 = {r2:.5f}"
    assert report("2b splitting-linear-in-voltage", r2 > 0.99, detail), detail


# ------------------------------------------------------------- criterion 3

def test_criterion_3_four_level_oracle():
    rng = np.random.default_rng(42)
    worst = 0.0
    for _ in range(1000):
        omega_s = TWO_PI * rng.uniform(0.05e6, 3e6)
        omega_d = TWO_PI * rng.uniform(0.05e6, 3e6)
        chi = TWO_PI * rng.uniform(1e6, 10e6) * rng.choice([-1.0, 1.0])
        p = FourLevelParams(delta_s=-2 * chi, delta_d=-chi, chi=chi,
                            Omega_s=omega_s, Omega_d=omega_d)
        gap = dressed_pair_gap(p)
        ref = at_splitting(omega_s, omega_d)
        worst = max(worst, abs(gap - ref) / ref)
    detail = f"worst relative error {worst:.2e} over 1000 draws"
    assert report("3 four-level-oracle", worst < 1e-12, detail), detail


# ------------------------------------------------------------- criterion 4

def test_criterion_4_detailed_balance():
    drive = DriveSpec.from_detunings(PARAMS, 0.0, 0.0, 0.0, 0.0)
    state = steady_state(build_liouvillian(PARAMS, drive, SPACE))
    pops = np.real(np.diag(state.rho)).reshape(SPACE.n_fock, 2)
    p_fock = pops.sum(axis=1)
    p_qubit = pops.sum(axis=0)
    kr = PARAMS.kappa_plus / PARAMS.kappa_minus
    worst = max(abs(p_fock[n + 1] / p_fock[n] - kr) for n in range(7))
    qubit = abs(p_qubit[1] / p_qubit[0] - PARAMS.gamma_plus / PARAMS.gamma_minus)
    detail = f"worst resonator defect {worst:.2e} (n<=6), qubit defect {qubit:.2e}"
    assert report("4 detailed-balance", worst < 1e-8 and qubit < 1e-8, detail), detail


# ------------------------------------------------------------- criterion 5

def test_criterion_5_exact_vs_dispersive():
    derived = derive_params(
        omega_r=TWO_PI * 5.464e9,
        omega_ge=TWO_PI * (5.464e9 - 482e6),
        omega_ef=None,
        g_ge=TWO_PI * 70e6,
        g_ef=TWO_PI * 89e6,
        kappa_minus=PARAMS.kappa_minus, kappa_plus=PARAMS.kappa_plus,
        gamma_minus=PARAMS.gamma_minus, gamma_plus=PARAMS.gamma_plus,
        gamma_phi=PARAMS.gamma_phi,
    )
    shifts = per_photon_stark_shifts(derived, n_fock=10, max_n=2)
    rel = abs(shifts[0] - 2 * derived.chi) / abs(2 * derived.chi)
    detail = (f"first per-photon shift {shifts[0] / TWO_PI / 1e6:.3f} MHz vs "
              f"2chi {2 * derived.chi / TWO_PI / 1e6:.3f} MHz ({rel:.1%})")
    assert report("5 exact-vs-dispersive", rel < 0.10, detail), detail


# ------------------------------------------------------------- criterion 6

def acceptance_scenarios() -> list[tuple[str, DriveSpec]]:
    probe = TWO_PI * 50e3
    at_probe = TWO_PI * 0.3e6
    scenarios = [
        ("thermal-n0-peak", DriveSpec.from_detunings(PARAMS, 0.0, -PARAMS.chi, probe, 0.0)),
        ("thermal-n1-peak", DriveSpec.from_detunings(
            PARAMS, -2 * PARAMS.chi - 2 * PARAMS.zeta, -PARAMS.chi, probe, 0.0)),
        ("thermal-off-peak", DriveSpec.from_detunings(
            PARAMS, TWO_PI * 5e6, -PARAMS.chi, probe, 0.0)),
        ("coherent-pump", DriveSpec.from_detunings(
            PARAMS, -2 * PARAMS.chi, PARAMS.chi, probe, TWO_PI * 0.429e6)),
        ("sideband-blue", DriveSpec.from_detunings(
            PARAMS, -TWO_PI * 3e6 - PARAMS.chi, TWO_PI * 3e6, at_probe, TWO_PI * 0.6e6)),
    ]
    at_kerr_d = -PARAMS.chi - PARAMS.zeta - PARAMS.zeta_prime
    at_kerr_s = -2 * PARAMS.chi - 2 * PARAMS.zeta
    for omd_mhz in (0.6, 1.0, 1.3):
        scenarios.append((f"at-{omd_mhz}", DriveSpec.from_detunings(
            PARAMS, at_kerr_s, at_kerr_d, at_probe, TWO_PI * omd_mhz * 1e6)))
    return scenarios


def test_criterion_6a_liouvillian_trace_and_state_invariants():
    drive = DriveSpec.from_detunings(PARAMS, TWO_PI * 1e6, TWO_PI * -2e6,
                                     TWO_PI * 0.3e6, TWO_PI * 1.0e6)
    liou = build_liouvillian(PARAMS, drive, SPACE)
    t_defect = float(np.max(np.abs(trace_functional(SPACE.dim) @ liou.matrix)))
    t_defect /= float(np.max(np.abs(liou.matrix)))

    worst_herm = worst_eig = 0.0
    for name, drv in acceptance_scenarios():
        state = steady_state(build_liouvillian(PARAMS, drv, SPACE))
        worst_herm = max(worst_herm, float(np.max(np.abs(state.rho - state.rho.conj().T))))
        worst_eig = min(worst_eig, float(np.min(np.linalg.eigvalsh(state.rho))))
    ok = t_defect < 1e-12 and worst_herm < 1e-10 and worst_eig > -1e-8
    detail = (f"trace defect {t_defect:.2e}, worst hermiticity {worst_herm:.2e}, "
              f"lowest eigenvalue {worst_eig:.2e}")
    assert report("6a liouvillian-structure", ok, detail), detail


def test_criterion_6b_truncation_invariance():
    failures = []
    details = []
    sz_small = tensor(identity((10,)), qubit_ops()[0]).entries
    sz_large = tensor(identity((14,)), qubit_ops()[0]).entries
    for name, drv in acceptance_scenarios():
        s10 = expectation(steady_state(
            build_liouvillian(PARAMS, drv, SpaceConfig(10, 2))).rho, sz_small)
        s14 = expectation(steady_state(
            build_liouvillian(PARAMS, drv, SpaceConfig(14, 2))).rho, sz_large)
        diff = abs(s10 - s14)
        details.append(f"{name}: {diff:.2e}")
        if not diff < 1e-8:
            failures.append(f"{name} ({diff:.2e})")
    detail = ", ".join(details)
    passed = report("6b truncation-invariance", not failures, detail)
    assert passed, (
        "readout changes by more than 1e-8 between n_fock 10 and 14 at the "
        "strongest coupler drives, where the truncation boundary still holds "
        "~1e-6 population (see README Known deviations): " + detail
    )


# ------------------------------------------------------------- criterion 7

def test_criterion_7a_sideband_slope_minus_one(sideband_map_blue):
    m = sideband_map_blue
    cell = m.grid1_hz[1] - m.grid1_hz[0]
    bands = (F_GE, F_GE + 2 * CHI_HZ)
    clearance = 1.8e6
    checked = 0
    worst = 0.0
    for j, fd in enumerate(m.grid2_hz):
        pred = F_GE + F_R + CHI_HZ - fd
        if not (bands[1] + clearance < pred < bands[0] - clearance):
            continue
        col = m.signal[:, j].copy()
        for b in bands:
            col[np.abs(m.grid1_hz - b) < clearance] = -np.inf
        ridge = m.grid1_hz[int(np.argmax(col))]
        worst = max(worst, abs(ridge - pred) / cell)
        checked += 1
    ok = checked >= 8 and worst <= 1.0
    detail = f"{checked} coupler rows checked, worst offset {worst:.2f} grid cells"
    assert report("7a sideband-slope-minus-1", ok, detail), detail


def test_criterion_7b_sideband_slope_minus_half():
    f_pump = F_R - CHI_HZ  # ground-manifold resonance, populates n >= 2
    kerr_hz = (PARAMS.zeta + PARAMS.zeta_prime) / TWO_PI
    plan = SweepPlan(
        params=PARAMS, space=SPACE,
        axis1=SweepAxis("omega_s", F_GE - 19e6, F_GE - 13e6, 31),
        axis2=SweepAxis("omega_d", f_pump - 1.2e6, f_pump - 0.4e6, 5),
        fixed=FixedDrive(rabi_s=TWO_PI * 0.3e6, rabi_d=TWO_PI * 1.2e6),
    )
    m = run_sweep(plan, workers=WORKERS)

    # n = 2 levels are populated near the pump resonance
    pump_drive = DriveSpec.from_frequencies(
        PARAMS, TWO_PI * (F_GE - 16e6), TWO_PI * f_pump, TWO_PI * 0.3e6, TWO_PI * 1.2e6)
    rho = steady_state(build_liouvillian(PARAMS, pump_drive, SPACE)).rho
    p2 = float(np.real(np.diag(rho)).reshape(10, 2).sum(axis=1)[2])

    detections = 0
    contrasts = []
    for j, fd in enumerate(m.grid2_hz):
        pred = F_GE + 2 * F_R + 2 * CHI_HZ + 4 * kerr_hz - 2 * fd
        i = int(np.argmin(np.abs(m.grid1_hz - pred)))
        lo, hi = max(0, i - 6), min(m.grid1_hz.size, i + 7)
        window = m.signal[lo:hi, j]
        contrast = float(np.max(window) - np.median(window))
        contrasts.append(contrast)
        if contrast >= 0.004:
            detections += 1
    ok = detections >= 3 and p2 > 0.005
    detail = (f"p2(pump) = {p2:.3f}, ridge contrast per row "
              + ", ".join(f"{c:.4f}" for c in contrasts))
    assert report("7b sideband-slope-minus-half", ok, detail), detail


# ------------------------------------------------------------- criterion 8

def test_criterion_8_fit_round_trip():
    rng = np.random.default_rng(7)
    worst_area = worst_center = 0.0
    for _ in range(100):
        w = rng.uniform(0.25e6, 0.75e6, size=2)
        sep = rng.uniform(2.5 * float(w.sum()), 10e6)
        c0 = rng.uniform(4.97e9, 4.985e9)
        centers = (c0, c0 + sep)
        a0 = 10 ** rng.uniform(4.0, 5.5)
        areas = (a0, a0 * rng.uniform(1.0 / 9.0, 9.0))
        baseline = rng.uniform(-0.9, -0.5)
        x = np.linspace(c0 - 8e6, c0 + sep + 8e6, 801)
        y = np.full_like(x, baseline)
        for c, wi, a in zip(centers, w, areas):
            y += lorentzian(x, c, wi, a)
        fit = fit_lorentzians((x, y), n_peaks=2)
        assert fit.n_peaks == 2
        for k in range(2):
            worst_area = max(worst_area, abs(fit.areas[k] - areas[k]) / areas[k])
            worst_center = max(worst_center, abs(fit.centers_hz[k] - centers[k]) / w[k])
    ok = worst_area <= 0.02 and worst_center <= 0.01
    detail = (f"worst area error {worst_area:.2e} (<= 2%), worst center error "
              f"{worst_center:.2e} of linewidth (<= 1%)")
    assert report("8 fit-round-trip", ok, detail), detail
