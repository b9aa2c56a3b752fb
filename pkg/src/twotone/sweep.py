"""Drive-frequency sweep engine: 1D spectra and 2D two-tone maps.

Each grid point is an independent, stateless steady-state solve of the full
Liouvillian; there is no warm starting, so results are bit-identical
regardless of evaluation order or worker count.  Sweeps parallelize over
grid points with threads (the dense LAPACK solves release the GIL), and the
outputs land in pre-allocated grid slots, making aggregation
order-insensitive by construction.

Grid axes are drive frequencies in Hz (the user-facing unit); conversion to
angular frequency happens when each point's DriveSpec is built.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.signal import find_peaks
from threadpoolctl import threadpool_limits

from . import specfit
from .errors import SimulationError, SweepFailureError, UnresolvedSplittingError
from .lindblad import LiouvillianFamily, expectation, steady_state
from .model import DriveSpec, SystemParams
from .operators import SpaceConfig, identity, qubit_ops, tensor

__all__ = [
    "SweepAxis",
    "FixedDrive",
    "SweepPlan",
    "SpectrumTrace",
    "Map2D",
    "GapCut",
    "run_sweep",
    "extract_gap",
]

TWO_PI = 2.0 * np.pi
AXIS_NAMES = ("omega_s", "omega_d")
SIGNAL_BOUND = 1.0 + 1e-6
MAX_FAILED_FRACTION = 0.01
GAP_PROMINENCE_FRACTION = 0.05


@dataclass(frozen=True)
class SweepAxis:
    """One swept drive-frequency axis, in Hz."""

    name: str
    start_hz: float
    stop_hz: float
    count: int

    def __post_init__(self) -> None:
        if self.name not in AXIS_NAMES:
            raise ValueError(f"axis name must be one of {AXIS_NAMES}, got {self.name!r}")
        if self.count < 2:
            raise ValueError("axis count must be >= 2")
        if not self.start_hz < self.stop_hz:
            raise ValueError("axis start must be below stop")

    @property
    def values_hz(self) -> np.ndarray:
        return np.linspace(self.start_hz, self.stop_hz, self.count)


@dataclass(frozen=True)
class FixedDrive:
    """Drive settings that are not swept.

    Rabi amplitudes in rad/s; the frequency of an unswept tone in Hz (None
    when that tone's frequency is a sweep axis).
    """

    rabi_s: float
    rabi_d: float
    omega_s_hz: float | None = None
    omega_d_hz: float | None = None


@dataclass(frozen=True)
class SweepPlan:
    params: SystemParams
    space: SpaceConfig
    axis1: SweepAxis
    fixed: FixedDrive
    axis2: SweepAxis | None = None

    def __post_init__(self) -> None:
        names = {self.axis1.name}
        if self.axis2 is not None:
            if self.axis2.name in names:
                raise ValueError("the two sweep axes must differ")
            names.add(self.axis2.name)
        for tone, fixed_value in (("omega_s", self.fixed.omega_s_hz),
                                  ("omega_d", self.fixed.omega_d_hz)):
            if tone not in names and fixed_value is None:
                raise ValueError(f"unswept tone {tone} needs a fixed frequency")


@dataclass(frozen=True, eq=False)
class SpectrumTrace:
    """1D sweep result: Tr[rho sigma_z] per grid point, with residuals."""

    axis_name: str
    grid_hz: np.ndarray
    signal: np.ndarray
    residual_norms: np.ndarray
    failures: tuple[tuple[int, str], ...] = ()


@dataclass(frozen=True, eq=False)
class Map2D:
    """2D sweep result; signal[i, j] belongs to (grid1_hz[i], grid2_hz[j])."""

    axis1_name: str
    grid1_hz: np.ndarray
    axis2_name: str
    grid2_hz: np.ndarray
    signal: np.ndarray
    residual_norms: np.ndarray
    failures: tuple[tuple[int, int, str], ...] = ()


@dataclass(frozen=True)
class GapCut:
    """Cut through a Map2D: hold ``axis_name`` at ``value_hz``, scan the other."""

    axis_name: str
    value_hz: float


def _default_workers() -> int:
    return max(1, os.cpu_count() or 1)


def _readout_op(space: SpaceConfig) -> np.ndarray:
    sz = qubit_ops()[0]
    return tensor(identity((space.n_fock,)), sz).entries


def run_sweep(plan: SweepPlan, workers: int | None = None):
    """Run the steady-state solve on every grid point of the plan.

    Returns a SpectrumTrace for a 1D plan, a Map2D for a 2D plan.  Failed
    points are recorded with NaN signal and an error message; more than 1%
    failures aborts with SweepFailureError.
    """
    workers = _default_workers() if workers is None else max(1, int(workers))
    family = LiouvillianFamily(plan.params, plan.space)
    sz_full = _readout_op(plan.space)

    ax1 = plan.axis1.values_hz
    ax2 = plan.axis2.values_hz if plan.axis2 is not None else None
    shape = (ax1.size,) if ax2 is None else (ax1.size, ax2.size)
    signal = np.full(shape, np.nan)
    residuals = np.full(shape, np.nan)
    failures: list[tuple] = []

    flat_points = list(np.ndindex(shape))

    def drive_for(index) -> DriveSpec:
        tones = {"omega_s": plan.fixed.omega_s_hz, "omega_d": plan.fixed.omega_d_hz}
        tones[plan.axis1.name] = float(ax1[index[0]])
        if plan.axis2 is not None:
            tones[plan.axis2.name] = float(ax2[index[1]])
        return DriveSpec.from_frequencies(
            plan.params,
            omega_s=TWO_PI * tones["omega_s"],
            omega_d=TWO_PI * tones["omega_d"],
            Omega_s=plan.fixed.rabi_s,
            Omega_d=plan.fixed.rabi_d,
        )

    def solve_point(index) -> None:
        try:
            state = steady_state(family.liouvillian(drive_for(index)), refinement_steps=1)
            value = expectation(state.rho, sz_full)
            if abs(value) > SIGNAL_BOUND:
                raise SimulationError(f"readout {value} outside [-1, 1] envelope")
            signal[index] = value
            residuals[index] = state.residual_norm
        except SimulationError as exc:
            failures.append((*index, f"{type(exc).__name__}: {exc}"))

    # single-threaded BLAS: the solves are small, and letting the BLAS pool
    # compete with the point-level threads collapses sustained throughput
    with threadpool_limits(limits=1, user_api="blas"):
        if workers == 1:
            for idx in flat_points:
                solve_point(idx)
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                list(pool.map(solve_point, flat_points))

    failures.sort()
    if len(failures) > MAX_FAILED_FRACTION * len(flat_points):
        raise SweepFailureError(
            f"{len(failures)} of {len(flat_points)} grid points failed; first: {failures[0]}"
        )

    if ax2 is None:
        return SpectrumTrace(
            axis_name=plan.axis1.name,
            grid_hz=ax1,
            signal=signal,
            residual_norms=residuals,
            failures=tuple(failures),
        )
    return Map2D(
        axis1_name=plan.axis1.name,
        grid1_hz=ax1,
        axis2_name=plan.axis2.name,
        grid2_hz=ax2,
        signal=signal,
        residual_norms=residuals,
        failures=tuple(failures),
    )


def _cut_trace(map2d: Map2D, cut: GapCut) -> tuple[np.ndarray, np.ndarray]:
    if cut.axis_name == map2d.axis2_name:
        j = int(np.argmin(np.abs(map2d.grid2_hz - cut.value_hz)))
        return map2d.grid1_hz, map2d.signal[:, j]
    if cut.axis_name == map2d.axis1_name:
        i = int(np.argmin(np.abs(map2d.grid1_hz - cut.value_hz)))
        return map2d.grid2_hz, map2d.signal[i, :]
    raise ValueError(f"cut axis {cut.axis_name!r} not in map axes")


def extract_gap(map2d: Map2D, cut: GapCut,
                prominence_fraction: float = GAP_PROMINENCE_FRACTION) -> float:
    """Distance in Hz between the two strongest peaks along the cut.

    The cut trace is searched for local maxima; with fewer than two
    resolvable maxima an UnresolvedSplittingError is raised (expected when
    the splitting is below the linewidth).  The two strongest maxima seed a
    two-Lorentzian fit whose center distance is returned.
    """
    x, y = _cut_trace(map2d, cut)
    good = np.isfinite(y)
    x, y = x[good], y[good]
    if x.size < 5:
        raise UnresolvedSplittingError("cut has too few valid points")
    span = float(y.max() - y.min())
    if span <= 0:
        raise UnresolvedSplittingError("cut trace is flat")
    idx, _ = find_peaks(y, prominence=prominence_fraction * span)
    if idx.size < 2:
        raise UnresolvedSplittingError(
            f"found {idx.size} resolvable extrema along the cut; need 2 "
            "(splitting below the linewidth?)"
        )
    strongest = idx[np.argsort(y[idx])[::-1][:2]]
    seeds = sorted(float(x[i]) for i in strongest)
    fit = specfit.fit_lorentzians((x, y), n_peaks=2, seeds=seeds)
    if fit.n_peaks < 2:
        raise UnresolvedSplittingError("two-peak fit collapsed to a single peak")
    return float(abs(fit.centers_hz[1] - fit.centers_hz[0]))
