"""Command-line entry point: spectrum, map2d, splitting-curve, validate.

Exit codes: 0 success, 1 configuration error, 2 numerical failure.  All CSV
output uses 17-significant-digit round-trip float formatting, the literal
``NaN`` for failed points, and LF line endings, so identical configs produce
byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__, analytic, lindblad, model, specfit
from .config import RunConfig, default_config_text, load_config
from .errors import ConfigError, SimulationError, UnresolvedSplittingError
from .model import DriveSpec, dressed, h_total_rotating, per_photon_stark_shifts
from .sweep import FixedDrive, GapCut, SweepAxis, SweepPlan, extract_gap, run_sweep

TWO_PI = 2.0 * np.pi
LINE_IMPEDANCE_OHM = 50.0


def _fmt(value: float) -> str:
    if isinstance(value, float) and not np.isfinite(value):
        return "NaN" if np.isnan(value) else ("Inf" if value > 0 else "-Inf")
    return f"{value:.17g}"


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(cell if isinstance(cell, str) else _fmt(cell) for cell in row))
            fh.write("\n")


def _out_dir(cfg: RunConfig, override: str | None) -> Path:
    out = Path(override) if override else cfg.output_dir
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_spectrum(cfg: RunConfig, out_dir: Path, workers: int | None) -> int:
    """Probe-frequency sweep -> spectrum.csv, peaks.csv."""
    sw = cfg.sweep
    plan = SweepPlan(
        params=cfg.params,
        space=cfg.space,
        axis1=SweepAxis("omega_s", sw["probe_start_hz"], sw["probe_stop_hz"],
                        int(sw["probe_points"])),
        fixed=FixedDrive(
            rabi_s=cfg.probe_rabi(),
            rabi_d=cfg.coupler_rabi(),
            omega_d_hz=cfg.drive["coupler_freq_hz"],
        ),
    )
    trace = run_sweep(plan, workers=workers)
    _write_csv(
        out_dir / "spectrum.csv",
        ["omega_s_hz", "signal", "residual"],
        zip(trace.grid_hz, trace.signal, trace.residual_norms),
    )

    seeds = _peak_seeds(trace)
    fit = specfit.fit_lorentzians(trace, n_peaks=len(seeds), seeds=seeds)
    f = dressed(cfg.params)
    stats = specfit.photon_stats(fit, cfg.params.chi, f.omega_ge_tilde, f.omega_r_tilde)

    rows = []
    for c, w, a in zip(fit.centers_hz, fit.fwhm_hz, fit.areas):
        n = _assigned_n(c, cfg.params.chi, f.omega_ge_tilde)
        rows.append(["peak", str(n), _fmt(c), _fmt(w), _fmt(a), _fmt(stats.weights[n]),
                     "", "", "", ""])
    rows.append([
        "stats", "", "", "", "", "",
        _fmt(stats.nbar), _fmt(stats.n_th), _fmt(stats.t_eff_kelvin), stats.classification,
    ])
    _write_csv(
        out_dir / "peaks.csv",
        ["row_kind", "n", "center_hz", "fwhm_hz", "area", "weight",
         "nbar", "n_th", "t_eff_kelvin", "classification"],
        rows,
    )
    print(f"spectrum: {trace.grid_hz.size} points, {len(trace.failures)} failed; "
          f"{fit.n_peaks} peaks, nbar={stats.nbar:.4f}, n_th={stats.n_th:.4f}, "
          f"T_eff={stats.t_eff_kelvin * 1e3:.1f} mK, {stats.classification}")
    return 0


def _assigned_n(center_hz: float, chi: float, omega_ge_tilde: float) -> int:
    return int(round((TWO_PI * center_hz - omega_ge_tilde) / (2.0 * chi)))


def _peak_seeds(trace) -> list[float]:
    """Seed centers from the resolvable maxima, strongest first, capped at 8.

    Uses a finer prominence threshold than the fitter's default so the weak
    high-photon-number peaks of a coherently driven resonator are kept; the
    traces are noise-free, so small real maxima are trustworthy.
    """
    from scipy.signal import find_peaks

    good = np.isfinite(trace.signal)
    x, y = trace.grid_hz[good], trace.signal[good]
    span = y.max() - y.min()
    idx, _ = find_peaks(y, prominence=0.005 * span)
    if idx.size == 0:
        idx = np.array([int(np.argmax(y))])
    order = np.argsort(y[idx])[::-1]
    return [float(x[i]) for i in idx[order][:8]]


def cmd_map2d(cfg: RunConfig, out_dir: Path, workers: int | None) -> int:
    """Two-tone (omega_s, omega_d) map -> map.csv, map.meta."""
    sw = cfg.sweep
    plan = SweepPlan(
        params=cfg.params,
        space=cfg.space,
        axis1=SweepAxis("omega_s", sw["map_probe_start_hz"], sw["map_probe_stop_hz"],
                        int(sw["map_probe_points"])),
        axis2=SweepAxis("omega_d", sw["coupler_start_hz"], sw["coupler_stop_hz"],
                        int(sw["coupler_points"])),
        fixed=FixedDrive(rabi_s=cfg.probe_rabi(), rabi_d=cfg.coupler_rabi()),
    )
    map2d = run_sweep(plan, workers=workers)

    rows = (
        (map2d.grid1_hz[i], map2d.grid2_hz[j], map2d.signal[i, j])
        for i in range(map2d.grid1_hz.size)
        for j in range(map2d.grid2_hz.size)
    )
    _write_csv(out_dir / "map.csv", ["omega_s_hz", "omega_d_hz", "signal"], rows)

    f = dressed(cfg.params)
    meta = {
        "schema": "twotone-map/1",
        "version": __version__,
        "params_hash": cfg.params_hash(),
        "axis1": {"name": "omega_s", "start_hz": sw["map_probe_start_hz"],
                  "stop_hz": sw["map_probe_stop_hz"], "count": int(sw["map_probe_points"])},
        "axis2": {"name": "omega_d", "start_hz": sw["coupler_start_hz"],
                  "stop_hz": sw["coupler_stop_hz"], "count": int(sw["coupler_points"])},
        "omega_ge_tilde_hz": f.omega_ge_tilde / TWO_PI,
        "omega_r_tilde_hz": f.omega_r_tilde / TWO_PI,
        "chi_hz": cfg.params.chi / TWO_PI,
        "zeta_hz": cfg.params.zeta / TWO_PI,
        "zeta_prime_hz": cfg.params.zeta_prime / TWO_PI,
        "probe_rabi_hz": cfg.probe_rabi() / TWO_PI,
        "coupler_rabi_hz": cfg.coupler_rabi() / TWO_PI,
        "n_failed": len(map2d.failures),
        "failures": [list(f) for f in map2d.failures[:20]],
    }
    (out_dir / "map.meta").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    print(f"map2d: {map2d.grid1_hz.size}x{map2d.grid2_hz.size} points, "
          f"{len(map2d.failures)} failed")
    return 0


def _rabi_list(cfg: RunConfig) -> list[float]:
    text = str(cfg.sweep["coupler_rabi_list_hz"])
    try:
        values = [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise ConfigError(f"sweep.coupler_rabi_list_hz is not a comma list of Hz: {exc}") from exc
    if not values:
        raise ConfigError("sweep.coupler_rabi_list_hz is empty")
    return values


def cmd_splitting_curve(cfg: RunConfig, out_dir: Path, workers: int | None) -> int:
    """Autler-Townes splitting vs coupler amplitude -> splitting.csv."""
    sw = cfg.sweep
    probe_rabi = TWO_PI * float(sw["probe_rabi_at_hz"])
    rows = []
    for rabi_hz in _rabi_list(cfg):
        omega_d_rabi = TWO_PI * rabi_hz
        plan = SweepPlan(
            params=cfg.params,
            space=cfg.space,
            axis1=SweepAxis(
                "omega_s",
                sw["at_probe_center_hz"] - sw["at_probe_halfspan_hz"],
                sw["at_probe_center_hz"] + sw["at_probe_halfspan_hz"],
                int(sw["at_probe_points"]),
            ),
            axis2=SweepAxis(
                "omega_d",
                sw["at_coupler_center_hz"] - sw["at_coupler_halfspan_hz"],
                sw["at_coupler_center_hz"] + sw["at_coupler_halfspan_hz"],
                int(sw["at_coupler_points"]),
            ),
            fixed=FixedDrive(rabi_s=probe_rabi, rabi_d=omega_d_rabi),
        )
        map2d = run_sweep(plan, workers=workers)
        try:
            gap = extract_gap(map2d, GapCut("omega_d", sw["at_coupler_center_hz"]))
        except UnresolvedSplittingError:
            gap = float("nan")
        power_w = analytic.power_from_rabi(omega_d_rabi, cfg.calibration)
        v_rf = float(np.sqrt(power_w * LINE_IMPEDANCE_OHM))
        gap_analytic = analytic.at_splitting(probe_rabi, omega_d_rabi) / TWO_PI
        rows.append((rabi_hz, v_rf, gap, gap_analytic))
        flag = "unresolved" if np.isnan(gap) else f"gap {gap / 1e6:.4f} MHz"
        print(f"splitting-curve: coupler rabi {rabi_hz / 1e6:.2f} MHz -> {flag} "
              f"(analytic {gap_analytic / 1e6:.4f} MHz)")
    _write_csv(
        out_dir / "splitting.csv",
        ["omega_d_rabi_hz", "v_rf_volts", "gap_hz_simulated", "gap_hz_analytic"],
        rows,
    )
    return 0


def _validate_checks(cfg: RunConfig, workers: int | None) -> list[dict]:
    """Invariant suite at the configured parameters."""
    checks: list[dict] = []
    params, space = cfg.params, cfg.space

    def record(name: str, value: float, tol: float, passed: bool, detail: str = "") -> None:
        checks.append({"check": name, "value": value, "tolerance": tol,
                       "passed": bool(passed), "detail": detail})

    no_drive = DriveSpec.from_detunings(params, 0.0, 0.0, 0.0, 0.0)
    liou = lindblad.build_liouvillian(params, no_drive, space)
    scale = float(np.max(np.abs(liou.matrix)))

    # trace functional annihilates L
    t_row = lindblad.trace_functional(space.dim)
    defect = float(np.max(np.abs(t_row @ liou.matrix))) / scale
    record("trace_annihilates_liouvillian", defect, 1e-12, defect < 1e-12)

    # Hermiticity preservation on a deterministic Hermitian probe basis
    rng = np.random.default_rng(20130901)
    worst = 0.0
    for _ in range(4):
        m = rng.standard_normal((space.dim, space.dim)) + 1j * rng.standard_normal((space.dim, space.dim))
        h = (m + m.conj().T) / 2.0
        out = lindblad.unvectorize(liou.matrix @ lindblad.vectorize(h))
        worst = max(worst, float(np.max(np.abs(out - out.conj().T)) / np.max(np.abs(out))))
    record("hermiticity_preserved", worst, 1e-12, worst < 1e-12)

    # detailed balance and Gibbs factorization, undriven
    state = lindblad.steady_state(liou)
    pops = np.real(np.diag(state.rho)).reshape(space.n_fock, space.n_qubit)
    p_fock = pops.sum(axis=1)
    p_qubit = pops.sum(axis=0)
    kr = params.kappa_plus / params.kappa_minus
    worst_balance = max(
        abs(p_fock[n + 1] / p_fock[n] - kr) for n in range(min(7, space.n_fock - 1))
    )
    record("detailed_balance_resonator", worst_balance, 1e-8, worst_balance < 1e-8)
    gr = params.gamma_plus / params.gamma_minus
    qubit_defect = abs(p_qubit[1] / p_qubit[0] - gr)
    record("detailed_balance_qubit", qubit_defect, 1e-8, qubit_defect < 1e-8)
    product = np.kron(np.diag(p_fock), np.diag(p_qubit))
    fact = float(np.max(np.abs(state.rho - product)))
    record("gibbs_factorization", fact, 1e-8, fact < 1e-8)

    # dressed-ladder eigenvalues with Kerr and drives off
    bare = model.SystemParams(
        **{**params.__dict__, "zeta": 0.0, "zeta_prime": 0.0,
           "provenance": {}, "validity_warnings": ()}
    )
    h = h_total_rotating(bare, DriveSpec.from_detunings(bare, TWO_PI * 1e6, TWO_PI * 2e6, 0, 0), space)
    vals = np.sort(np.linalg.eigvalsh(h.entries))
    ns = np.arange(space.n_fock)
    expect = np.sort(np.concatenate([
        TWO_PI * 2e6 * ns + (TWO_PI * 1e6 / 2 + params.chi * ns),
        TWO_PI * 2e6 * ns - (TWO_PI * 1e6 / 2 + params.chi * ns),
    ]))
    ladder_defect = float(np.max(np.abs(vals - expect)) / np.max(np.abs(expect)))
    record("dressed_ladder_eigenvalues", ladder_defect, 1e-12, ladder_defect < 1e-12)

    # exact-vs-dispersive per-photon Stark shift
    shifts = per_photon_stark_shifts(params, n_fock=10, max_n=2)
    rel = float(abs(shifts[0] - 2 * params.chi) / abs(2 * params.chi))
    record("exact_vs_dispersive_stark", rel, 0.10, rel < 0.10,
           f"first per-photon shift {shifts[0] / TWO_PI / 1e6:.3f} MHz vs 2chi "
           f"{2 * params.chi / TWO_PI / 1e6:.3f} MHz")

    # four-level gap equals the closed-form splitting at double resonance
    worst_gap = 0.0
    for oms_mhz in (0.1, 0.3):
        for omd_mhz in (0.4, 0.9, 1.4):
            p4 = analytic.FourLevelParams(
                delta_s=-2 * params.chi, delta_d=-params.chi, chi=params.chi,
                Omega_s=TWO_PI * oms_mhz * 1e6, Omega_d=TWO_PI * omd_mhz * 1e6,
            )
            gap = analytic.dressed_pair_gap(p4)
            ref = analytic.at_splitting(p4.Omega_s, p4.Omega_d)
            worst_gap = max(worst_gap, abs(gap - ref) / ref)
    record("four_level_gap_vs_at_splitting", worst_gap, 1e-12, worst_gap < 1e-12)

    return checks


def cmd_validate(cfg: RunConfig, out_dir: Path, workers: int | None) -> int:
    checks = _validate_checks(cfg, workers)
    report = {
        "profile_warnings": list(cfg.params.validity_warnings),
        "checks": checks,
        "all_passed": all(c["passed"] for c in checks),
    }
    text = json.dumps(report, indent=2, sort_keys=True)
    (out_dir / "validate.json").write_text(text + "\n")
    print(text)
    return 0 if report["all_passed"] else 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="twotone",
        description="Steady-state two-tone spectroscopy of a driven transmon-resonator system",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("spectrum", "probe sweep: spectrum.csv and fitted peaks.csv"),
        ("map2d", "two-tone map: map.csv and map.meta"),
        ("splitting-curve", "Autler-Townes splitting vs coupler amplitude: splitting.csv"),
        ("validate", "run the invariant suite at the configured parameters"),
        ("dump-config", "print the built-in profile as a config file"),
    ):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", metavar="PATH", default=None,
                         help="config file overriding the built-in profile")
        cmd.add_argument("--out", metavar="DIR", default=None, help="output directory")
        cmd.add_argument("--workers", metavar="N", type=int,
                         default=max(1, os.cpu_count() or 1),
                         help="parallel steady-state solves (default: machine parallelism)")
        cmd.add_argument("--profile", default="paper-device",
                         help="built-in parameter profile (default: paper-device)")
    return parser


_COMMANDS = {
    "spectrum": cmd_spectrum,
    "map2d": cmd_map2d,
    "splitting-curve": cmd_splitting_curve,
    "validate": cmd_validate,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "dump-config":
        print(default_config_text(), end="")
        return 0
    try:
        cfg = load_config(args.config, profile=args.profile)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    out_dir = _out_dir(cfg, args.out)
    try:
        return _COMMANDS[args.command](cfg, out_dir, args.workers)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except SimulationError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
