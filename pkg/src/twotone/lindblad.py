"""Liouvillian superoperator construction and steady-state solver.

Vectorization convention: column stacking, ``vec(rho)[i + j*d] = rho[i, j]``,
so left multiplication is ``I (x) A``, right multiplication ``B^T (x) I``,
and the commutator part of the flow is ``-i (I (x) H  -  H^T (x) I)``.

The steady state is obtained by replacing one row of the (scaled) Liouvillian
with the vectorized trace functional and solving the dense linear system with
LU factorization plus a fixed number of iterative-refinement steps.  At the
default truncation (Hilbert dimension 20, Liouvillian 400x400) a solve takes
milliseconds and is fully deterministic.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import ConvergenceError, DegenerateSteadyStateError, DimensionError, PositivityError
from .model import DriveSpec, SystemParams, h_total_rotating
from .operators import Operator, SpaceConfig, annihilation, identity, qubit_ops, tensor

__all__ = [
    "Liouvillian",
    "SteadyState",
    "dissipator",
    "hamiltonian_superop",
    "build_liouvillian",
    "LiouvillianFamily",
    "steady_state",
    "trace_functional",
    "vectorize",
    "unvectorize",
    "expectation",
]

HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-10
POSITIVITY_TOL = -1e-8
RESIDUAL_TOL = 1e-9
REFINEMENT_STEPS = 2


def vectorize(rho: np.ndarray) -> np.ndarray:
    """Column-stack a matrix into a vector."""
    return np.asarray(rho, dtype=complex).reshape(-1, order="F")


def unvectorize(vec: np.ndarray) -> np.ndarray:
    d = int(round(np.sqrt(vec.size)))
    if d * d != vec.size:
        raise DimensionError(f"vector of length {vec.size} is not a stacked square matrix")
    return vec.reshape((d, d), order="F")


def trace_functional(dim: int) -> np.ndarray:
    """Row vector t with t @ vec(rho) = Tr(rho) under column stacking."""
    t = np.zeros(dim * dim)
    t[np.arange(dim) * (dim + 1)] = 1.0
    return t


def expectation(rho: np.ndarray, op: np.ndarray) -> float:
    """Real part of Tr[rho A] for a Hermitian observable."""
    return float(np.real(np.trace(rho @ op)))


@dataclass(frozen=True, eq=False)
class Liouvillian:
    """Superoperator matrix acting on column-stacked density matrices.

    ``space`` is None for ad-hoc superoperators assembled outside the
    resonator (x) qubit pipeline (e.g. single-subsystem rate models).
    """

    matrix: np.ndarray
    space: SpaceConfig | None = None

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True, eq=False)
class SteadyState:
    """Steady-state density matrix with solver metadata."""

    rho: np.ndarray
    residual_norm: float
    solver: str


def dissipator(a: Operator | np.ndarray) -> np.ndarray:
    """Superoperator matrix of D[A]rho = A rho A+ - (A+A rho + rho A+A)/2."""
    m = a.entries if isinstance(a, Operator) else np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"dissipator argument must be square, got {m.shape}")
    d = m.shape[0]
    eye = np.eye(d, dtype=complex)
    mdm = m.conj().T @ m
    return np.kron(m.conj(), m) - 0.5 * (np.kron(eye, mdm) + np.kron(mdm.T, eye))


def hamiltonian_superop(h: Operator | np.ndarray) -> np.ndarray:
    """Superoperator of the coherent part -i[H, .]."""
    m = h.entries if isinstance(h, Operator) else np.asarray(h, dtype=complex)
    d = m.shape[0]
    eye = np.eye(d, dtype=complex)
    return -1j * (np.kron(eye, m) - np.kron(m.T, eye))


def _full_jump_ops(space: SpaceConfig) -> dict[str, np.ndarray]:
    a = annihilation(space.n_fock)
    i_f = identity((space.n_fock,))
    i_q = identity((space.n_qubit,))
    sz, sp, sm = qubit_ops()
    return {
        "a": tensor(a, i_q).entries,
        "adag": tensor(a.dag(), i_q).entries,
        "sm": tensor(i_f, sm).entries,
        "sp": tensor(i_f, sp).entries,
        "sz": tensor(i_f, sz).entries,
    }


def _dissipation_superop(params: SystemParams, space: SpaceConfig) -> np.ndarray:
    ops = _full_jump_ops(space)
    return (
        params.kappa_minus * dissipator(ops["a"])
        + params.kappa_plus * dissipator(ops["adag"])
        + params.gamma_minus * dissipator(ops["sm"])
        + params.gamma_plus * dissipator(ops["sp"])
        + 0.5 * params.gamma_phi * dissipator(ops["sz"])
    )


def build_liouvillian(params: SystemParams, drive: DriveSpec, space: SpaceConfig) -> Liouvillian:
    """L = -i[H_tot, .] + kappa_- D[a] + kappa_+ D[a+] + Gamma_- D[s-]
    + Gamma_+ D[s+] + (gamma_phi/2) D[sz], on the resonator (x) qubit space."""
    if space.n_qubit != 2:
        raise DimensionError("build_liouvillian requires a 2-level qubit space")
    h = h_total_rotating(params, drive, space)
    matrix = hamiltonian_superop(h) + _dissipation_superop(params, space)
    return Liouvillian(matrix=matrix, space=space)


class LiouvillianFamily:
    """Drive-affine decomposition of the Liouvillian for fast sweeps.

    The Liouvillian depends on the drive only through the four scalars
    (delta_s, delta_d, Omega_s, Omega_d), each multiplying a fixed
    superoperator.  Precomputing those parts once makes a grid point cost
    four scaled additions plus one dense solve.  Each evaluation is a pure
    function of the drive, so results do not depend on evaluation order.
    """

    def __init__(self, params: SystemParams, space: SpaceConfig):
        if space.n_qubit != 2:
            raise DimensionError("LiouvillianFamily requires a 2-level qubit space")
        self.params = params
        self.space = space
        zero = DriveSpec(omega_s=0.0, omega_d=0.0, Omega_s=0.0, Omega_d=0.0,
                         delta_s=0.0, delta_d=0.0)
        self._base = build_liouvillian(params, zero, space).matrix

        ops = _full_jump_ops(space)
        n_full = ops["adag"] @ ops["a"]
        self._k_delta_d = hamiltonian_superop(n_full)
        self._k_delta_s = hamiltonian_superop(0.5 * ops["sz"])
        self._k_omega_d = hamiltonian_superop(0.5 * (ops["a"] + ops["adag"]))
        self._k_omega_s = hamiltonian_superop(0.5 * (ops["sp"] + ops["sm"]))

    def liouvillian(self, drive: DriveSpec) -> Liouvillian:
        matrix = (
            self._base
            + drive.delta_s * self._k_delta_s
            + drive.delta_d * self._k_delta_d
            + drive.Omega_s * self._k_omega_s
            + drive.Omega_d * self._k_omega_d
        )
        return Liouvillian(matrix=matrix, space=self.space)


def steady_state(
    liouvillian: Liouvillian,
    *,
    residual_tol: float = RESIDUAL_TOL,
    check_positivity: bool = True,
    refinement_steps: int = REFINEMENT_STEPS,
) -> SteadyState:
    """Unique trace-one solution of L rho = 0.

    Scales L to unit magnitude, replaces row 0 with the trace functional,
    LU-solves, and applies ``refinement_steps`` iterative-refinement passes
    (the default two make population ratios of weakly occupied levels
    accurate to ~1e-12; sweeps use one, which is plenty for the readout).
    The reported residual is ||L vec(rho)|| / max|L|.

    Raises DegenerateSteadyStateError when the null space is not
    one-dimensional (e.g. all dissipation rates zero), ConvergenceError when
    the refined residual stays above ``residual_tol``, and PositivityError /
    ValueError when the solution violates the density-matrix invariants.
    """
    mat = liouvillian.matrix
    dim2 = mat.shape[0]
    d = int(round(np.sqrt(dim2)))
    scale = float(np.max(np.abs(mat)))
    if scale == 0.0:
        raise DegenerateSteadyStateError("Liouvillian is identically zero")
    scaled = mat / scale

    system = scaled.copy()
    system[0, :] = trace_functional(d)
    rhs = np.zeros(dim2, dtype=complex)
    rhs[0] = 1.0

    with np.errstate(all="ignore"), warnings.catch_warnings():
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        try:
            lu = sla.lu_factor(system, check_finite=False)
            x = sla.lu_solve(lu, rhs, check_finite=False)
            for _ in range(refinement_steps):
                x += sla.lu_solve(lu, rhs - system @ x, check_finite=False)
        except sla.LinAlgError as exc:
            raise DegenerateSteadyStateError(f"singular steady-state system: {exc}") from exc

    residual = float(np.linalg.norm(scaled @ x)) if np.all(np.isfinite(x)) else np.inf
    if not np.isfinite(residual) or residual > residual_tol:
        if _null_space_degenerate(scaled):
            raise DegenerateSteadyStateError(
                "Liouvillian null space is degenerate (no unique steady state); "
                "at least one dissipation channel must be active"
            )
        raise ConvergenceError(
            f"steady-state residual {residual:.3e} exceeds tolerance {residual_tol:.3e}"
        )

    rho = unvectorize(x)
    herm_defect = float(np.max(np.abs(rho - rho.conj().T)))
    if herm_defect > HERMITICITY_TOL:
        raise ConvergenceError(f"steady state not Hermitian: defect {herm_defect:.3e}")
    trace_defect = abs(np.trace(rho) - 1.0)
    if trace_defect > TRACE_TOL:
        raise ConvergenceError(f"steady-state trace off by {trace_defect:.3e}")
    rho = 0.5 * (rho + rho.conj().T)
    if check_positivity:
        min_eig = float(np.min(np.linalg.eigvalsh(rho)))
        if min_eig < POSITIVITY_TOL:
            raise PositivityError(
                f"steady state has eigenvalue {min_eig:.3e} below tolerance {POSITIVITY_TOL:.0e}"
            )
    return SteadyState(rho=rho, residual_norm=residual, solver="lu-trace-row")


def _null_space_degenerate(scaled: np.ndarray, tol: float = 1e-10) -> bool:
    s = sla.svdvals(scaled)
    return bool(np.sum(s < tol * s[0]) >= 2)


def effective_temperature_ratio(params: SystemParams) -> tuple[float, float]:
    """Diagnostic thermal ratios (kappa_+/kappa_-, Gamma_+/Gamma_-).

    Equal ratios correspond to a single effective bath temperature via
    ratio = exp(-hbar omega_r / k_B T).
    """
    return params.kappa_plus / params.kappa_minus, params.gamma_plus / params.gamma_minus
