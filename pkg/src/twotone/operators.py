"""Finite-dimensional operator algebra on a truncated Fock space and a qubit.

Basis conventions, fixed once for the whole package:

* Composite spaces are ordered resonator (x) qubit.  A composite basis index
  is ``fock_index * n_qubit + qubit_index``.
* Qubit index 0 is the ground state |g>, index 1 the excited state |e>, so
  ``sigma_z = diag(-1, +1)`` and ``Tr[rho sigma_z] = -1`` for a pure ground
  state.

All constructors are pure and deterministic; operators are plain dense
complex matrices tagged with the dimensions of their Hilbert-space factors.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError

__all__ = [
    "SpaceConfig",
    "Operator",
    "annihilation",
    "number",
    "qubit_ops",
    "tensor",
    "identity",
]


@dataclass(frozen=True)
class SpaceConfig:
    """Factorization of the composite Hilbert space: n_fock x n_qubit."""

    n_fock: int
    n_qubit: int = 2

    def __post_init__(self) -> None:
        if self.n_fock < 2:
            raise DimensionError(f"n_fock must be >= 2, got {self.n_fock}")
        if self.n_qubit < 2:
            raise DimensionError(f"n_qubit must be >= 2, got {self.n_qubit}")

    @property
    def dims(self) -> tuple[int, ...]:
        return (self.n_fock, self.n_qubit)

    @property
    def dim(self) -> int:
        return self.n_fock * self.n_qubit


@dataclass(frozen=True, eq=False)
class Operator:
    """Square complex matrix tagged with its Hilbert-space factorization.

    ``dims`` lists the dimensions of the tensor factors the operator acts
    on, e.g. ``(10,)`` for a bare resonator operator or ``(10, 2)`` after
    :func:`tensor`.  Binary operations require identical ``dims``.
    """

    entries: np.ndarray
    dims: tuple[int, ...] = field(default=())

    def __post_init__(self) -> None:
        entries = np.asarray(self.entries, dtype=complex)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise DimensionError(f"operator must be square, got shape {entries.shape}")
        dims = self.dims if self.dims else (entries.shape[0],)
        if int(np.prod(dims)) != entries.shape[0]:
            raise DimensionError(
                f"dims {dims} inconsistent with matrix dimension {entries.shape[0]}"
            )
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "dims", tuple(dims))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def _check_same_space(self, other: "Operator") -> None:
        if self.dims != other.dims:
            raise DimensionError(
                f"operators live on different spaces: {self.dims} vs {other.dims}"
            )

    def dag(self) -> "Operator":
        return Operator(self.entries.conj().T, self.dims)

    def trace(self) -> complex:
        return complex(np.trace(self.entries))

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        scale = max(1.0, float(np.max(np.abs(self.entries))))
        return bool(np.max(np.abs(self.entries - self.entries.conj().T)) <= tol * scale)

    def __add__(self, other: "Operator") -> "Operator":
        self._check_same_space(other)
        return Operator(self.entries + other.entries, self.dims)

    def __sub__(self, other: "Operator") -> "Operator":
        self._check_same_space(other)
        return Operator(self.entries - other.entries, self.dims)

    def __neg__(self) -> "Operator":
        return Operator(-self.entries, self.dims)

    def __mul__(self, scalar: complex) -> "Operator":
        return Operator(self.entries * scalar, self.dims)

    __rmul__ = __mul__

    def __matmul__(self, other: "Operator") -> "Operator":
        self._check_same_space(other)
        return Operator(self.entries @ other.entries, self.dims)


def annihilation(n_fock: int) -> Operator:
    """Resonator annihilation operator on the lowest ``n_fock`` Fock levels.

    Entry (i, i+1) is sqrt(i+1); the truncation makes [a, a+] deviate from
    the identity only in the top-level diagonal entry.
    """
    if n_fock < 2:
        raise DimensionError(f"n_fock must be >= 2, got {n_fock}")
    off = np.sqrt(np.arange(1, n_fock, dtype=float))
    return Operator(np.diag(off, k=1).astype(complex), (n_fock,))


def number(n_fock: int) -> Operator:
    """Photon-number operator diag(0 .. n_fock-1).

    Built directly as the integer diagonal: a+ @ a reproduces it only to one
    ulp (IEEE sqrt(n)^2 != n for n = 2, 3, ...), and the Hamiltonians rely
    on the diagonal being exact.
    """
    if n_fock < 2:
        raise DimensionError(f"n_fock must be >= 2, got {n_fock}")
    return Operator(np.diag(np.arange(n_fock, dtype=float)).astype(complex), (n_fock,))


def qubit_ops() -> tuple[Operator, Operator, Operator]:
    """Two-level operators (sigma_z, sigma_plus, sigma_minus).

    Basis order (|g>, |e>): sigma_z = diag(-1, +1), sigma_plus |g> = |e>.
    """
    sz = Operator(np.diag([-1.0, 1.0]).astype(complex), (2,))
    sp = Operator(np.array([[0, 0], [1, 0]], dtype=complex), (2,))
    sm = sp.dag()
    return sz, sp, sm


def tensor(a: Operator, b: Operator) -> Operator:
    """Kronecker product with the fixed factor order resonator (x) qubit.

    The left factor varies slowest: index = i_a * dim_b + i_b.
    """
    return Operator(np.kron(a.entries, b.entries), a.dims + b.dims)


def identity(dims: int | tuple[int, ...]) -> Operator:
    if isinstance(dims, int):
        dims = (dims,)
    dim = int(np.prod(dims))
    return Operator(np.eye(dim, dtype=complex), tuple(dims))
