import numpy as np
import pytest

import twotone.sweep as sweep_mod
from twotone.errors import SweepFailureError, UnresolvedSplittingError
from twotone.model import TWO_PI, SystemParams, dressed, paper_device
from twotone.operators import SpaceConfig
from twotone.specfit import lorentzian
from twotone.sweep import (
    FixedDrive,
    GapCut,
    Map2D,
    SweepAxis,
    SweepPlan,
    extract_gap,
    run_sweep,
)

SPACE = SpaceConfig(10, 2)


def small_probe_plan(params=None, count=41, rabi_s=TWO_PI * 0.05e6, rabi_d=0.0,
                     halfspan=2.0e6, center=None):
    params = params or paper_device()
    f = dressed(params)
    center = center if center is not None else f.omega_ge_tilde / TWO_PI
    return SweepPlan(
        params=params,
        space=SPACE,
        axis1=SweepAxis("omega_s", center - halfspan, center + halfspan, count),
        fixed=FixedDrive(rabi_s=rabi_s, rabi_d=rabi_d,
                         omega_d_hz=(f.omega_r_tilde - params.chi) / TWO_PI),
    )


def test_axis_validation():
    with pytest.raises(ValueError):
        SweepAxis("omega_x", 0.0, 1.0, 5)
    with pytest.raises(ValueError):
        SweepAxis("omega_s", 1.0, 0.0, 5)
    with pytest.raises(ValueError):
        SweepAxis("omega_s", 0.0, 1.0, 1)


def test_plan_requires_fixed_tone():
    p = paper_device()
    with pytest.raises(ValueError):
        SweepPlan(params=p, space=SPACE,
                  axis1=SweepAxis("omega_s", 1e9, 2e9, 5),
                  fixed=FixedDrive(rabi_s=0.0, rabi_d=0.0))
    with pytest.raises(ValueError):
        SweepPlan(params=p, space=SPACE,
                  axis1=SweepAxis("omega_s", 1e9, 2e9, 5),
                  axis2=SweepAxis("omega_s", 1e9, 2e9, 5),
                  fixed=FixedDrive(rabi_s=0.0, rabi_d=0.0))


def test_probe_sweep_peak_at_dressed_frequency():
    plan = small_probe_plan(count=41, halfspan=1.0e6)
    trace = run_sweep(plan, workers=1)
    assert trace.signal.shape == (41,)
    assert np.all(np.isfinite(trace.signal))
    assert np.all(np.abs(trace.signal) <= 1 + 1e-6)
    assert np.max(trace.residual_norms) < 1e-9
    peak_hz = trace.grid_hz[np.argmax(trace.signal)]
    f = dressed(plan.params)
    assert abs(peak_hz - f.omega_ge_tilde / TWO_PI) <= 2 * (trace.grid_hz[1] - trace.grid_hz[0])


def test_determinism_and_worker_independence():
    plan = small_probe_plan(count=21, halfspan=0.8e6)
    t1 = run_sweep(plan, workers=1)
    t2 = run_sweep(plan, workers=1)
    t3 = run_sweep(plan, workers=2)
    assert np.array_equal(t1.signal, t2.signal)
    assert np.array_equal(t1.signal, t3.signal)
    assert np.array_equal(t1.residual_norms, t3.residual_norms)


def test_overdamped_trace_is_flat_at_thermal_value():
    p0 = paper_device()
    overdamped = SystemParams(**{
        **p0.__dict__,
        "kappa_minus": 5e9, "kappa_plus": 5e8,
        "gamma_minus": 5e9, "gamma_plus": 5e8,
        "gamma_phi": 1e9,
        "provenance": {}, "validity_warnings": (),
    })
    plan = small_probe_plan(params=overdamped, count=11, rabi_s=TWO_PI * 0.3e6,
                            halfspan=3e6)
    trace = run_sweep(plan, workers=1)
    thermal = 2 * (0.1 / 1.1) - 1.0
    assert np.max(np.abs(trace.signal - thermal)) < 1e-3


def test_kerr_peak_position_drift():
    # hotter bath populates n = 0..2; peak centers sit at
    # omega_ge_tilde + 2 chi n + 2 zeta n^2, i.e. drift |2 zeta n^2| from
    # the Kerr-free prediction (plus a small fit/pulling budget)
    from twotone.specfit import fit_lorentzians

    p0 = paper_device()
    hot = SystemParams(**{
        **p0.__dict__,
        "kappa_plus": p0.kappa_minus * 0.3,
        "provenance": {}, "validity_warnings": (),
    })
    f = dressed(hot)
    chi_hz = hot.chi / TWO_PI
    zeta_hz = hot.zeta / TWO_PI
    center = f.omega_ge_tilde / TWO_PI + 2 * chi_hz
    plan = SweepPlan(
        params=hot, space=SpaceConfig(10, 2),
        axis1=SweepAxis("omega_s", center + 2 * chi_hz - 3e6, center - 2 * chi_hz + 3e6, 241),
        fixed=FixedDrive(rabi_s=TWO_PI * 0.05e6, rabi_d=0.0,
                         omega_d_hz=(f.omega_r_tilde - hot.chi) / TWO_PI),
    )
    trace = run_sweep(plan)
    seeds = [f.omega_ge_tilde / TWO_PI + 2 * chi_hz * n for n in range(3)]
    fit = fit_lorentzians(trace, n_peaks=3, seeds=seeds)
    assert fit.n_peaks == 3
    order = np.argsort(fit.centers_hz)[::-1]  # n = 0, 1, 2 (chi < 0)
    for n, k in enumerate(order):
        drift = abs(fit.centers_hz[k] - (f.omega_ge_tilde / TWO_PI + 2 * chi_hz * n))
        # fit budget: 3% of the fitted linewidth covers pulling by the
        # overlapping neighbours
        assert drift <= abs(2 * zeta_hz * n**2) + 0.03 * fit.fwhm_hz[k]


def test_failures_marked_and_bounded(monkeypatch):
    # one failure in 121 points stays under the 1% abort threshold
    plan = small_probe_plan(count=121, halfspan=0.8e6)
    from twotone.errors import ConvergenceError

    real = sweep_mod.steady_state
    calls = {"n": 0}

    def flaky(liou, **kw):
        calls["n"] += 1
        if calls["n"] == 5:
            raise ConvergenceError("synthetic failure")
        return real(liou, **kw)

    monkeypatch.setattr(sweep_mod, "steady_state", flaky)
    trace = run_sweep(plan, workers=1)
    assert len(trace.failures) == 1
    idx = trace.failures[0][0]
    assert np.isnan(trace.signal[idx])
    assert "ConvergenceError" in trace.failures[0][1]


def test_too_many_failures_abort(monkeypatch):
    plan = small_probe_plan(count=21, halfspan=0.8e6)
    from twotone.errors import ConvergenceError

    def broken(liou, **kw):
        raise ConvergenceError("always fails")

    monkeypatch.setattr(sweep_mod, "steady_state", broken)
    with pytest.raises(SweepFailureError):
        run_sweep(plan, workers=1)


def synthetic_map(separation_hz, width_hz, n=401):
    grid_s = np.linspace(-5e6, 5e6, n) + 4.9727e9
    grid_d = np.linspace(-1e6, 1e6, 3) + 5.4647e9
    c = 4.9727e9
    signal = np.empty((n, 3))
    for j in range(3):
        y = -0.8 + lorentzian(grid_s, c - separation_hz / 2, width_hz, 1e5)
        y += lorentzian(grid_s, c + separation_hz / 2, width_hz, 1e5)
        signal[:, j] = y
    return Map2D(
        axis1_name="omega_s", grid1_hz=grid_s,
        axis2_name="omega_d", grid2_hz=grid_d,
        signal=signal, residual_norms=np.zeros_like(signal),
    )


def test_split_branches_follow_anticrossing_hyperbola():
    # off coupler resonance the two branches of the split n=1 peak sit at
    # center + dc/2 +- sqrt(dc^2 + gap^2)/2 (dc = coupler offset): the
    # avoided crossing whose asymptote gives the slope +1 of the splitting
    from twotone.specfit import fit_lorentzians

    p = paper_device()
    f = dressed(p)
    center_s = (f.omega_ge_tilde + 2 * p.chi + 2 * p.zeta) / TWO_PI
    center_d = (f.omega_r_tilde + p.chi + p.zeta + p.zeta_prime) / TWO_PI
    step_d = 0.4e6
    plan = SweepPlan(
        params=p, space=SPACE,
        axis1=SweepAxis("omega_s", center_s - 2.5e6, center_s + 2.5e6, 81),
        axis2=SweepAxis("omega_d", center_d - step_d, center_d + step_d, 3),
        fixed=FixedDrive(rabi_s=TWO_PI * 0.3e6, rabi_d=TWO_PI * 1.0e6),
    )
    m = run_sweep(plan)
    fits = []
    for j in range(3):
        fit = fit_lorentzians((m.grid1_hz, m.signal[:, j]), n_peaks=2)
        assert fit.n_peaks == 2
        fits.append(np.array(fit.centers_hz) - center_s)
    gap = fits[1][1] - fits[1][0]
    for j, dc in ((0, -step_d), (2, +step_d)):
        half = np.sqrt(dc**2 + gap**2) / 2
        expected = np.array([dc / 2 - half, dc / 2 + half])
        assert np.all(np.abs(fits[j] - expected) < 0.12e6)


def test_extract_gap_synthetic_pair():
    map2d = synthetic_map(1.0e6, 0.4e6)
    gap = extract_gap(map2d, GapCut("omega_d", 5.4647e9))
    assert gap == pytest.approx(1.0e6, rel=0.01)


def test_extract_gap_unresolved():
    map2d = synthetic_map(0.1e6, 0.5e6)
    with pytest.raises(UnresolvedSplittingError):
        extract_gap(map2d, GapCut("omega_d", 5.4647e9))


def test_extract_gap_cut_along_other_axis():
    map2d = synthetic_map(1.0e6, 0.4e6)
    # cutting along omega_s at a fixed row index: hold omega_s, scan omega_d
    # (flat there, so unresolved)
    with pytest.raises(UnresolvedSplittingError):
        extract_gap(map2d, GapCut("omega_s", 4.9727e9))
