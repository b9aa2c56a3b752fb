"""Build the paper-analog figures from twotone CSV outputs.

Four figure kinds, consuming exactly the CSV/meta schemas written by the
simulator CLI (see the simulator's docs/config.md):

* ``spectrum``       - 1D probe trace from spectrum.csv, photon-number peak
                       labels from an optional peaks.csv
* ``sideband-map``   - two-tone heatmap from map.csv(+map.meta) with the
                       order-1 and order-2 two-photon sideband lines overlaid
* ``splitting-map``  - the same heatmap zoomed on the dressed n=1 peak with
                       the analytic splitting guides overlaid
* ``splitting-curve``- measured vs analytic splitting against drive voltage
                       from splitting.csv

Rendering is pure: identical inputs give identical files, nothing mutates
the inputs, and NaN map cells are drawn as masked.
"""

from __future__ import annotations

import csv
import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from matplotlib.figure import Figure

__all__ = ["FigureSpec", "SchemaError", "FIGURE_KINDS", "build_figure", "render"]

FIGURE_KINDS = ("spectrum", "sideband-map", "splitting-map", "splitting-curve")

GHZ = 1e9
MHZ = 1e6


class SchemaError(ValueError):
    """An input file is missing a required column or field."""


@dataclass(frozen=True)
class FigureSpec:
    """One figure to render: kind, input CSV path(s), output path."""

    kind: str
    inputs: tuple[str, ...]
    out: str
    dpi: int = 150
    annotations: tuple[str, ...] = field(default=("sidebands", "model"))

    def __post_init__(self) -> None:
        if self.kind not in FIGURE_KINDS:
            raise SchemaError(f"unknown figure kind {self.kind!r}; choose from {FIGURE_KINDS}")
        if not self.inputs:
            raise SchemaError("at least one input CSV is required")


def _read_csv(path: str, required: tuple[str, ...]) -> dict[str, np.ndarray]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        names = tuple(reader.fieldnames or ())
        for column in required:
            if column not in names:
                raise SchemaError(f"{path}: missing required column {column!r}")
        rows = list(reader)
    out: dict[str, np.ndarray] = {}
    for column in names:
        values = [row[column] for row in rows]
        try:
            out[column] = np.array([float(v) if v != "" else np.nan for v in values])
        except ValueError:
            out[column] = np.array(values, dtype=object)
    return out


def _read_meta(path: Path) -> dict:
    meta_path = path.with_suffix(".meta")
    if not meta_path.exists():
        raise SchemaError(f"{meta_path}: map meta file not found next to {path.name}")
    meta = json.loads(meta_path.read_text())
    for key in ("axis1", "axis2", "omega_ge_tilde_hz", "omega_r_tilde_hz", "chi_hz"):
        if key not in meta:
            raise SchemaError(f"{meta_path}: missing required field {key!r}")
    return meta


def _spectrum_figure(spec: FigureSpec) -> Figure:
    data = _read_csv(spec.inputs[0], ("omega_s_hz", "signal"))
    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    x = data["omega_s_hz"] / GHZ
    ax.plot(x, data["signal"], color="tab:blue", lw=1.2)
    ax.set_xlabel("probe frequency (GHz)")
    ax.set_ylabel("qubit readout  Tr[rho sigma_z]  (dimensionless)")
    if x.size == 0:
        warnings.warn(f"{spec.inputs[0]}: empty spectrum, rendering empty axes")
    if len(spec.inputs) > 1 and x.size:
        peaks = _read_csv(spec.inputs[1], ("row_kind", "n", "center_hz"))
        signal = data["signal"]
        for kind, n, center in zip(peaks["row_kind"], peaks["n"], peaks["center_hz"]):
            if kind != "peak":
                continue
            c = float(center) / GHZ
            top = float(np.interp(c, x, signal))
            ax.annotate(f"n={int(n)}", xy=(c, top),
                        xytext=(c, top + 0.06 * (signal.max() - signal.min() + 1e-12)),
                        ha="center", fontsize=10)
    ax.margins(x=0.02)
    fig.tight_layout()
    return fig


def _map_arrays(data: dict[str, np.ndarray], meta: dict):
    n1, n2 = int(meta["axis1"]["count"]), int(meta["axis2"]["count"])
    if data["omega_s_hz"].size != n1 * n2:
        raise SchemaError(
            f"map.csv holds {data['omega_s_hz'].size} rows, meta grid is {n1}x{n2}"
        )
    # row-major: axis1 (omega_s) outer, axis2 (omega_d) inner
    sgrid = data["omega_s_hz"].reshape(n1, n2)[:, 0]
    dgrid = data["omega_d_hz"].reshape(n1, n2)[0, :]
    signal = np.ma.masked_invalid(data["signal"].reshape(n1, n2))
    return sgrid, dgrid, signal


def _heatmap_figure(spec: FigureSpec, zoom: bool) -> Figure:
    data = _read_csv(spec.inputs[0], ("omega_s_hz", "omega_d_hz", "signal"))
    meta = _read_meta(Path(spec.inputs[0]))
    sgrid, dgrid, signal = _map_arrays(data, meta)

    fig, ax = plt.subplots(figsize=(6.4, 5.2))
    mesh = ax.pcolormesh(sgrid / GHZ, dgrid / GHZ, signal.T, shading="nearest",
                         cmap="RdBu_r", rasterized=True)
    fig.colorbar(mesh, ax=ax, label="Tr[rho sigma_z]  (dimensionless)")
    ax.set_xlabel("probe frequency (GHz)")
    ax.set_ylabel("coupler frequency (GHz)")

    f_ge = meta["omega_ge_tilde_hz"]
    f_r = meta["omega_r_tilde_hz"]
    chi = meta["chi_hz"]
    if "sidebands" in spec.annotations and not zoom:
        # order-n two-photon band: omega_d = f_r + chi + (f_ge - omega_s)/n
        for n, style in ((1, "-"), (2, "--")):
            fs_line = np.linspace(sgrid[0], sgrid[-1], 200)
            fd_line = f_r + chi + (f_ge - fs_line) / n
            inside = (fd_line >= dgrid[0]) & (fd_line <= dgrid[-1])
            if np.any(inside):
                ax.plot(fs_line[inside] / GHZ, fd_line[inside] / GHZ, style,
                        color="k", lw=0.9, label=f"two-photon band, slope -1/{n}")
    if "model" in spec.annotations and zoom:
        rabi_s = meta.get("probe_rabi_hz", 0.0)
        rabi_d = meta.get("coupler_rabi_hz", 0.0)
        delta = float(np.hypot(rabi_s, rabi_d))
        zeta = meta.get("zeta_hz", 0.0)
        zeta_p = meta.get("zeta_prime_hz", 0.0)
        center_s = f_ge + 2 * chi + 2 * zeta
        center_d = f_r + chi + zeta + zeta_p
        for sign in (-1.0, 1.0):
            fd_line = np.linspace(dgrid[0], dgrid[-1], 100)
            fs_line = center_s + sign * delta / 2 + (fd_line - center_d)
            ax.plot(fs_line / GHZ, fd_line / GHZ, "--", color="k", lw=0.9,
                    label="dressed branches" if sign < 0 else None)
    if ax.get_legend_handles_labels()[0]:
        ax.legend(loc="upper right", fontsize=8)
    fig.tight_layout()
    return fig


def _splitting_curve_figure(spec: FigureSpec) -> Figure:
    data = _read_csv(spec.inputs[0],
                     ("omega_d_rabi_hz", "v_rf_volts", "gap_hz_simulated", "gap_hz_analytic"))
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    v = data["v_rf_volts"] * 1e6  # microvolts at the device
    sim = data["gap_hz_simulated"] / MHZ
    model = data["gap_hz_analytic"] / MHZ
    resolved = np.isfinite(sim)
    if v.size == 0:
        warnings.warn(f"{spec.inputs[0]}: empty splitting curve, rendering empty axes")
    ax.plot(v[resolved], sim[resolved], "ko", ms=5, label="extracted splitting")
    if np.any(~resolved):
        ax.plot(v[~resolved], model[~resolved], "kx", ms=5, label="unresolved")
    if "model" in spec.annotations and v.size:
        order = np.argsort(v)
        ax.plot(v[order], model[order], "-", color="tab:red", lw=1.4,
                label="two-level model")
    ax.set_xlabel("coupler drive voltage (uV rms)")
    ax.set_ylabel("Autler-Townes splitting (MHz)")
    if ax.get_legend_handles_labels()[0]:
        ax.legend(loc="upper left", fontsize=9)
    fig.tight_layout()
    return fig


def build_figure(spec: FigureSpec) -> Figure:
    """Build the matplotlib Figure for a spec without writing it."""
    if spec.kind == "spectrum":
        return _spectrum_figure(spec)
    if spec.kind == "sideband-map":
        return _heatmap_figure(spec, zoom=False)
    if spec.kind == "splitting-map":
        return _heatmap_figure(spec, zoom=True)
    return _splitting_curve_figure(spec)


def render(spec: FigureSpec) -> Path:
    """Render the figure to ``spec.out`` and return the path."""
    fig = build_figure(spec)
    out = Path(spec.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    try:
        fig.savefig(out, dpi=spec.dpi, metadata={"Software": "twotone-plots"})
    finally:
        plt.close(fig)
    return out
