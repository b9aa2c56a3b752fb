"""Closed-form models: truncated 4-level Hamiltonian, Autler-Townes
splitting law, photon statistics, occupation vs power, and Rabi calibration.

The 4-level basis order is (|g0>, |e0>, |g1>, |e1>) in the dressed states;
entries are angular frequencies (hbar = 1).  With the signed dispersive
shift chi < 0 of the default device, the qubit-ground resonator response
peaks at delta_d = chi (branch "-") and the qubit-excited response at
delta_d = -chi (branch "+").
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.constants as const

__all__ = [
    "FourLevelParams",
    "CalibrationParams",
    "h_four_level",
    "four_level_eigensystem",
    "dressed_pair_gap",
    "at_splitting",
    "nbar_from_weights",
    "nbar_vs_power",
    "rabi_from_power",
    "power_from_rabi",
    "sideband_condition",
    "sideband_coupler_freq",
    "boltzmann_temperature",
]


@dataclass(frozen=True)
class FourLevelParams:
    """Detunings, dispersive shift, and drive amplitudes (rad/s)."""

    delta_s: float
    delta_d: float
    chi: float
    Omega_s: float
    Omega_d: float


@dataclass(frozen=True)
class CalibrationParams:
    """Quality factors and line properties for drive-power calibration.

    Q_C is usually derived from the parallel combination 1/Q_L = 1/Q_I +
    1/Q_C since only Q_L and Q_I are published.  ``attenuation_db`` is the
    input-line attenuation between generator and device.
    """

    Q_L: float
    Q_C: float
    Q_I: float
    kappa_minus: float
    omega_r_tilde: float
    attenuation_db: float = 0.0

    def __post_init__(self) -> None:
        for name in ("Q_L", "Q_C", "Q_I"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")
        combined = 1.0 / self.Q_I + 1.0 / self.Q_C
        if abs(combined * self.Q_L - 1.0) > 0.01:
            raise ValueError(
                f"1/Q_L = 1/Q_I + 1/Q_C violated beyond 1%: 1/{self.Q_L} vs {combined}"
            )

    @classmethod
    def from_loaded_internal(
        cls,
        Q_L: float,
        Q_I: float,
        kappa_minus: float,
        omega_r_tilde: float,
        attenuation_db: float = 0.0,
    ) -> "CalibrationParams":
        """Derive Q_C from the parallel combination of Q_L and Q_I."""
        if Q_I <= Q_L:
            raise ValueError("Q_I must exceed Q_L for a positive coupling Q")
        q_c = 1.0 / (1.0 / Q_L - 1.0 / Q_I)
        return cls(Q_L=Q_L, Q_C=q_c, Q_I=Q_I, kappa_minus=kappa_minus,
                   omega_r_tilde=omega_r_tilde, attenuation_db=attenuation_db)


def h_four_level(p: FourLevelParams) -> np.ndarray:
    """4x4 Hamiltonian of the lowest dressed levels under both drives.

    Diagonal (-d_s/2, d_s/2, d_d - d_s/2 - chi, d_d + d_s/2 + chi) with
    coupler coupling Omega_d/2 on |e0><e1| and probe coupling Omega_s/2 on
    |g1><e1|.
    """
    h = np.zeros((4, 4), dtype=complex)
    h[0, 0] = -p.delta_s / 2.0
    h[1, 1] = p.delta_s / 2.0
    h[2, 2] = p.delta_d - p.delta_s / 2.0 - p.chi
    h[3, 3] = p.delta_d + p.delta_s / 2.0 + p.chi
    h[1, 3] = h[3, 1] = p.Omega_d / 2.0
    h[2, 3] = h[3, 2] = p.Omega_s / 2.0
    return h


def four_level_eigensystem(p: FourLevelParams) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and eigenvectors (columns) of h_four_level."""
    return np.linalg.eigh(h_four_level(p))


def dressed_pair_gap(p: FourLevelParams) -> float:
    """Energy gap of the dressed pair carrying the |e1> character.

    The two eigenstates with the largest |<e1|psi>|^2 are the pair whose
    splitting is probed on the n=1 photon peak; identifying them by overlap
    avoids ordering ambiguity away from exact resonance.
    """
    vals, vecs = four_level_eigensystem(p)
    weight_e1 = np.abs(vecs[3, :]) ** 2
    top = np.argsort(weight_e1)[-2:]
    return float(abs(vals[top[0]] - vals[top[1]]))


def at_splitting(Omega_s: float, Omega_d: float) -> float:
    """Autler-Townes splitting (Omega_d^2 + Omega_s^2)^(1/2) at double resonance."""
    if Omega_s < 0 or Omega_d < 0:
        raise ValueError("Rabi amplitudes must be >= 0")
    return float(np.hypot(Omega_s, Omega_d))


def nbar_from_weights(w) -> float:
    """Weighted mean photon number sum(n w_n)/sum(w_n)."""
    w = np.asarray(w, dtype=float)
    if np.any(w < 0):
        raise ValueError("weights must be nonnegative")
    total = w.sum()
    if total <= 0:
        raise ValueError("all-zero weights: mean photon number undefined")
    return float(np.arange(w.size) @ w / total)


def nbar_vs_power(
    p_rf: float,
    branch: str,
    params: CalibrationParams,
    delta_d: float,
    chi: float,
) -> float:
    """Steady resonator occupation vs drive power, Lorentzian in detuning.

    n_pm = (Q_C/2Q_L) (kappa_- P / hbar w_r) / ((kappa_-/2)^2 + (delta_d +- chi)^2)

    ``branch`` is "+" or "-" selecting the sign in (delta_d +- chi).  With
    the signed chi convention the "-" branch peaks on the qubit-ground
    resonator response and "+" on the qubit-excited one.
    """
    if p_rf < 0:
        raise ValueError("drive power must be >= 0")
    if branch not in ("+", "-"):
        raise ValueError(f"branch must be '+' or '-', got {branch!r}")
    sign = 1.0 if branch == "+" else -1.0
    lorentz = 1.0 / ((params.kappa_minus / 2.0) ** 2 + (delta_d + sign * chi) ** 2)
    return float(
        (params.Q_C / (2.0 * params.Q_L))
        * (params.kappa_minus * p_rf / (const.hbar * params.omega_r_tilde))
        * lorentz
    )


def rabi_from_power(p_rf: float, params: CalibrationParams) -> float:
    """Coupler Rabi amplitude from drive power at the device.

    Omega_d = sqrt(Q_C kappa_- P / (2 Q_L hbar w_r)).
    """
    if p_rf < 0:
        raise ValueError("drive power must be >= 0")
    return float(
        np.sqrt(
            params.Q_C * params.kappa_minus * p_rf
            / (2.0 * params.Q_L * const.hbar * params.omega_r_tilde)
        )
    )


def power_from_rabi(omega_d: float, params: CalibrationParams) -> float:
    """Inverse of rabi_from_power."""
    if omega_d < 0:
        raise ValueError("Rabi amplitude must be >= 0")
    return float(
        omega_d**2 * 2.0 * params.Q_L * const.hbar * params.omega_r_tilde
        / (params.Q_C * params.kappa_minus)
    )


def sideband_condition(
    n: int,
    delta_s: float,
    delta_d: float,
    chi: float,
    atol: float = 1.0,
) -> bool:
    """Two-photon sideband resonance |g,0> <-> |e,n>: delta_s + n delta_d = -n chi.

    Equivalently omega_s + n omega_d equals the |g0> -> |en> transition
    frequency, the band of slope -1/n in the (omega_s, omega_d) plane.  The
    n = 1 band runs between (w_ge_tilde, w_r_tilde + chi) and
    (w_ge_tilde + 2 chi, w_r_tilde - chi), i.e. between the two vertical
    photon-number bands.  ``atol`` is the allowed residual in rad/s.
    """
    if n < 1:
        raise ValueError("sideband order n must be >= 1")
    residual = delta_s + n * delta_d + n * chi
    return bool(abs(residual) <= atol)


def sideband_coupler_freq(
    n: int,
    omega_s: float,
    omega_ge_tilde: float,
    omega_r_tilde: float,
    chi: float,
) -> float:
    """Coupler frequency on the order-n sideband band at probe frequency omega_s."""
    if n < 1:
        raise ValueError("sideband order n must be >= 1")
    return omega_r_tilde + chi + (omega_ge_tilde - omega_s) / n


def boltzmann_temperature(ratio: float, omega: float) -> float:
    """Temperature (K) with ratio = exp(-hbar omega / k_B T).

    ratio -> 0 maps to T = 0 (reported as a lower bound for single-peak
    spectra); ratio >= 1 has no finite positive solution and raises.
    """
    if ratio < 0:
        raise ValueError("population ratio must be >= 0")
    if ratio == 0.0:
        return 0.0
    if ratio >= 1.0:
        raise ValueError("population ratio must be < 1 for a thermal state")
    return float(const.hbar * omega / (const.k * np.log(1.0 / ratio)))
