"""Run configuration: flat key-value text with sections, Hz at the boundary.

The file format is deliberately simple and diff-friendly:

    # comment
    [section]
    key = value

Every key is defaulted from the built-in paper-device profile, so an empty
config is a valid run of the published device.  Unknown sections or keys are
rejected with file:line positions; all Hz -> rad/s conversion happens here
and nowhere else.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import model
from .analytic import CalibrationParams, rabi_from_power
from .errors import ConfigError
from .model import SystemParams, dressed
from .operators import SpaceConfig

__all__ = ["RunConfig", "load_config", "default_config_text", "PROFILE_NAMES"]

TWO_PI = 2.0 * np.pi
PROFILE_NAMES = ("paper-device",)


def _paper_defaults() -> dict[str, dict[str, float | str]]:
    params = model.paper_device()
    f = dressed(params)
    f_ge = f.omega_ge_tilde / TWO_PI
    f_r = f.omega_r_tilde / TWO_PI
    f_chi = params.chi / TWO_PI
    f_zeta = params.zeta / TWO_PI
    f_zeta_p = params.zeta_prime / TWO_PI
    # coupler resonance of the qubit-excited manifold (Kerr corrected): the
    # Autler-Townes working point on the n=1 photon peak
    f_at_d = f_r + f_chi + f_zeta + f_zeta_p
    f_at_s = f_ge + 2 * f_chi + 2 * f_zeta
    return {
        "system": {
            "n_fock": 10,
            "omega_r_hz": params.omega_r / TWO_PI,
            "omega_ge_hz": params.omega_ge / TWO_PI,
            "omega_ef_hz": params.omega_ef / TWO_PI,
            "g_ge_hz": params.g_ge / TWO_PI,
            "g_ef_hz": params.g_ef / TWO_PI,
            "chi_ge_hz": params.chi_ge / TWO_PI,
            "chi_ef_hz": params.chi_ef / TWO_PI,
            "chi_hz": params.chi / TWO_PI,
            "lambda_ge": params.lambda_ge,
            "lambda_ef": params.lambda_ef,
            "zeta_hz": f_zeta,
            "zeta_prime_hz": f_zeta_p,
        },
        "dissipation": {
            "kappa_minus": params.kappa_minus,
            "kappa_plus": params.kappa_plus,
            "gamma_minus": params.gamma_minus,
            "gamma_plus": params.gamma_plus,
            "gamma_phi": params.gamma_phi,
        },
        "calibration": {
            "q_loaded": model.PAPER_Q_LOADED,
            "q_internal": model.PAPER_Q_INTERNAL,
            "attenuation_db": model.PAPER_ATTENUATION_DB,
        },
        "drive": {
            # weakly saturating probe: strong probes inflate the fitted
            # relative peak areas (see docs/config.md)
            "probe_rabi_hz": 50e3,
            "coupler_rabi_hz": 0.0,
            "coupler_power_w": 0.0,
            "coupler_freq_hz": f_r - f_chi,  # ground-manifold resonance, 5.474 GHz
        },
        "sweep": {
            "probe_start_hz": f_ge - 15e6,
            "probe_stop_hz": f_ge + 15e6,
            "probe_points": 601,
            "coupler_start_hz": f_r - 2e6,
            "coupler_stop_hz": f_r + 8e6,
            "coupler_points": 161,
            "map_probe_start_hz": f_ge - 20e6,
            "map_probe_stop_hz": f_ge + 4e6,
            "map_probe_points": 161,
            "at_probe_center_hz": f_at_s,
            "at_probe_halfspan_hz": 2.5e6,
            "at_probe_points": 101,
            "at_coupler_center_hz": f_at_d,
            "at_coupler_halfspan_hz": 0.8e6,
            "at_coupler_points": 5,
            "coupler_rabi_list_hz": "0.4e6,0.5e6,0.6e6,0.7e6,0.8e6,0.9e6,1.0e6,1.1e6,1.2e6,1.3e6,1.4e6,1.5e6",
            "probe_rabi_at_hz": 0.3e6,
        },
        "output": {
            "directory": "out",
        },
    }


_INT_KEYS = {
    ("system", "n_fock"),
    ("sweep", "probe_points"),
    ("sweep", "coupler_points"),
    ("sweep", "map_probe_points"),
    ("sweep", "at_probe_points"),
    ("sweep", "at_coupler_points"),
}
_STR_KEYS = {("output", "directory"), ("sweep", "coupler_rabi_list_hz")}


@dataclass(frozen=True)
class RunConfig:
    """Validated run configuration with everything the commands need."""

    params: SystemParams
    space: SpaceConfig
    calibration: CalibrationParams
    drive: dict[str, float]
    sweep: dict[str, float | int | str]
    output_dir: Path
    raw: dict[str, dict[str, float | int | str]]

    def params_hash(self) -> str:
        canon = []
        for section in sorted(self.raw):
            for key in sorted(self.raw[section]):
                canon.append(f"{section}.{key}={self.raw[section][key]!r}")
        return hashlib.sha256("\n".join(canon).encode()).hexdigest()[:16]

    def coupler_rabi(self) -> float:
        """Coupler Rabi amplitude in rad/s, from power when given."""
        if self.drive["coupler_power_w"] > 0:
            return rabi_from_power(self.drive["coupler_power_w"], self.calibration)
        return TWO_PI * self.drive["coupler_rabi_hz"]

    def probe_rabi(self) -> float:
        return TWO_PI * self.drive["probe_rabi_hz"]


def _parse_text(text: str, source: str) -> dict[str, dict[str, str]]:
    sections: dict[str, dict[str, str]] = {}
    current: str | None = None
    for lineno, rawline in enumerate(text.splitlines(), start=1):
        line = rawline.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip()
            sections.setdefault(current, {})
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {rawline.strip()!r}")
        if current is None:
            raise ConfigError(f"{source}:{lineno}: key outside of any [section]")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"{source}:{lineno}: empty key")
        if key in sections[current]:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r} in [{current}]")
        sections[current][key] = value
        sections[current][f"__line_{key}"] = str(lineno)
    return sections


def _convert(section: str, key: str, text_value: str, source: str, lineno: str):
    if (section, key) in _STR_KEYS:
        return text_value
    try:
        value = float(text_value)
    except ValueError as exc:
        raise ConfigError(
            f"{source}:{lineno}: value for {section}.{key} is not a number: {text_value!r}"
        ) from exc
    if (section, key) in _INT_KEYS:
        if value != int(value):
            raise ConfigError(f"{source}:{lineno}: {section}.{key} must be an integer")
        return int(value)
    return value


def load_config(path: str | Path | None = None, profile: str = "paper-device") -> RunConfig:
    """Merge the built-in profile with an optional config file and validate."""
    if profile not in PROFILE_NAMES:
        raise ConfigError(f"unknown profile {profile!r}; available: {', '.join(PROFILE_NAMES)}")
    merged = _paper_defaults()

    if path is not None:
        source = str(path)
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config file {source}: {exc}") from exc
        parsed = _parse_text(text, source)
        for section, items in parsed.items():
            if section not in merged:
                raise ConfigError(f"{source}: unknown section [{section}]")
            for key, text_value in items.items():
                if key.startswith("__line_"):
                    continue
                lineno = items[f"__line_{key}"]
                if key not in merged[section]:
                    raise ConfigError(
                        f"{source}:{lineno}: unknown key {key!r} in section [{section}]"
                    )
                merged[section][key] = _convert(section, key, text_value, source, lineno)

    return _assemble(merged)


def _assemble(merged: dict[str, dict]) -> RunConfig:
    sys_sec = merged["system"]
    dis = merged["dissipation"]
    cal_sec = merged["calibration"]

    if sys_sec["n_fock"] < 2:
        raise ConfigError("system.n_fock must be >= 2")
    if dis["kappa_plus"] > dis["kappa_minus"]:
        raise ConfigError("dissipation.kappa_plus must not exceed kappa_minus")
    if dis["gamma_plus"] > dis["gamma_minus"]:
        raise ConfigError("dissipation.gamma_plus must not exceed gamma_minus")
    for key, value in {**dis}.items():
        if value < 0:
            raise ConfigError(f"dissipation.{key} must be >= 0")
    for key in ("probe_rabi_hz", "coupler_rabi_hz", "coupler_power_w"):
        if merged["drive"][key] < 0:
            raise ConfigError(f"drive.{key} must be >= 0")

    try:
        params = SystemParams(
            omega_r=TWO_PI * sys_sec["omega_r_hz"],
            omega_ge=TWO_PI * sys_sec["omega_ge_hz"],
            omega_ef=TWO_PI * sys_sec["omega_ef_hz"],
            g_ge=TWO_PI * sys_sec["g_ge_hz"],
            g_ef=TWO_PI * sys_sec["g_ef_hz"],
            chi_ge=TWO_PI * sys_sec["chi_ge_hz"],
            chi_ef=TWO_PI * sys_sec["chi_ef_hz"],
            chi=TWO_PI * sys_sec["chi_hz"],
            lambda_ge=sys_sec["lambda_ge"],
            lambda_ef=sys_sec["lambda_ef"],
            zeta=TWO_PI * sys_sec["zeta_hz"],
            zeta_prime=TWO_PI * sys_sec["zeta_prime_hz"],
            kappa_minus=dis["kappa_minus"],
            kappa_plus=dis["kappa_plus"],
            gamma_minus=dis["gamma_minus"],
            gamma_plus=dis["gamma_plus"],
            gamma_phi=dis["gamma_phi"],
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    try:
        calibration = CalibrationParams.from_loaded_internal(
            Q_L=cal_sec["q_loaded"],
            Q_I=cal_sec["q_internal"],
            kappa_minus=dis["kappa_minus"],
            omega_r_tilde=dressed(params).omega_r_tilde,
            attenuation_db=cal_sec["attenuation_db"],
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    return RunConfig(
        params=params,
        space=SpaceConfig(n_fock=int(sys_sec["n_fock"]), n_qubit=2),
        calibration=calibration,
        drive=dict(merged["drive"]),
        sweep=dict(merged["sweep"]),
        output_dir=Path(merged["output"]["directory"]),
        raw=merged,
    )


def default_config_text() -> str:
    """The built-in profile rendered as a config file (for --dump-config)."""
    lines = ["# twotone run configuration (paper-device profile)"]
    for section, items in _paper_defaults().items():
        lines.append("")
        lines.append(f"[{section}]")
        for key, value in items.items():
            lines.append(f"{key} = {value}")
    return "\n".join(lines) + "\n"
