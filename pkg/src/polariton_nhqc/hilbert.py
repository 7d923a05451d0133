"""Dense operator algebra on truncated tensor-product Hilbert spaces.

Factor ordering follows the ``|q, n>`` labelling used throughout the package:
factor 0 is the transmon, factor 1 its cavity, and a coupled device appends a
second transmon/cavity pair. Composite indices are built with ``np.kron`` in
factor order, so the leftmost factor is the most significant digit.

Transmon conventions: ``|0>_q`` is index 0 (ground) and ``|1>_q`` index 1, so
``sigma_z = |1><1| - |0><0| = diag(-1, +1)`` and ``sigma_minus = |0><1|``.
With this choice ``(omega_q / 2) sigma_z`` puts the excited level above the
ground level, which is what the measured transition frequencies require.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np


class DimensionError(ValueError):
    """Raised when operator/state dimensions are inconsistent."""


@dataclass(frozen=True)
class HilbertSpace:
    factor_dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.factor_dims)
        if not dims:
            raise DimensionError("a Hilbert space needs at least one factor")
        if any(d < 2 for d in dims):
            raise DimensionError(f"every factor dimension must be >= 2, got {dims}")
        object.__setattr__(self, "factor_dims", dims)

    @property
    def dim(self) -> int:
        return int(np.prod(self.factor_dims))

    def basis_index(self, labels: Sequence[int]) -> int:
        """Composite index of the product basis state with the given factor labels."""
        if len(labels) != len(self.factor_dims):
            raise DimensionError("one label per factor is required")
        return int(np.ravel_multi_index(tuple(labels), self.factor_dims))

    def basis_state(self, labels: Sequence[int]) -> np.ndarray:
        psi = np.zeros(self.dim, dtype=complex)
        psi[self.basis_index(labels)] = 1.0
        return psi

    def labels(self) -> np.ndarray:
        """Array of shape (dim, n_factors) giving the factor labels of each index."""
        return np.array(np.unravel_index(np.arange(self.dim), self.factor_dims)).T


@dataclass(frozen=True, eq=False)
class Operator:
    """A dense complex matrix tied to the space it acts on."""

    space: HilbertSpace
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        n = self.space.dim
        if m.shape != (n, n):
            raise DimensionError(f"matrix shape {m.shape} does not match space dimension {n}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.space.dim

    def dag(self) -> "Operator":
        return dagger(self)

    def is_hermitian(self, rtol: float = 1e-12) -> bool:
        m = self.matrix
        scale = max(np.linalg.norm(m), 1.0)
        return bool(np.linalg.norm(m - m.conj().T) <= rtol * scale)

    def __matmul__(self, other):
        if isinstance(other, Operator):
            return matmul(self, other)
        return self.matrix @ np.asarray(other)

    def __add__(self, other: "Operator") -> "Operator":
        _check_same_space(self, other)
        return Operator(self.space, self.matrix + other.matrix)

    def __sub__(self, other: "Operator") -> "Operator":
        _check_same_space(self, other)
        return Operator(self.space, self.matrix - other.matrix)

    def __mul__(self, scalar) -> "Operator":
        return Operator(self.space, self.matrix * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> "Operator":
        return Operator(self.space, -self.matrix)


def _check_same_space(a: Operator, b: Operator) -> None:
    if a.space.factor_dims != b.space.factor_dims:
        raise DimensionError(f"operators act on different spaces: {a.space} vs {b.space}")


def fock_annihilation(dim: int) -> Operator:
    """Truncated bosonic annihilation operator, <n-1|a|n> = sqrt(n)."""
    if dim < 2:
        raise DimensionError(f"Fock truncation must be >= 2, got {dim}")
    return Operator(HilbertSpace((dim,)), np.diag(np.sqrt(np.arange(1, dim)), 1))


def identity(dim: int) -> Operator:
    return Operator(HilbertSpace((dim,)), np.eye(dim))


def sigma_minus() -> Operator:
    """Transmon lowering operator |0><1|."""
    return Operator(HilbertSpace((2,)), [[0, 1], [0, 0]])


def sigma_plus() -> Operator:
    return dagger(sigma_minus())


def sigma_z() -> Operator:
    """|1><1| - |0><0| in the (|0>, |1>) ordering."""
    return Operator(HilbertSpace((2,)), [[-1, 0], [0, 1]])


def sigma_x() -> Operator:
    return Operator(HilbertSpace((2,)), [[0, 1], [1, 0]])


def embed(op: Operator, slot: int, space: HilbertSpace) -> Operator:
    """Place a single-factor operator in ``slot`` with identities elsewhere."""
    dims = space.factor_dims
    if not 0 <= slot < len(dims):
        raise IndexError(f"slot {slot} out of range for {len(dims)} factors")
    if op.dim != dims[slot]:
        raise DimensionError(f"operator dimension {op.dim} != factor dimension {dims[slot]}")
    factors = [np.eye(d) for d in dims]
    factors[slot] = op.matrix
    return Operator(space, reduce(np.kron, factors))


def dagger(op: Operator) -> Operator:
    return Operator(op.space, op.matrix.conj().T)


def matmul(a: Operator, b: Operator) -> Operator:
    _check_same_space(a, b)
    return Operator(a.space, a.matrix @ b.matrix)


def expectation(op: Operator, state: np.ndarray) -> complex:
    """<psi|A|psi> for a state vector, tr(A rho) for a density matrix."""
    state = np.asarray(state)
    n = op.dim
    if state.shape == (n,):
        return complex(np.vdot(state, op.matrix @ state))
    if state.shape == (n, n):
        return complex(np.trace(op.matrix @ state))
    raise DimensionError(f"state shape {state.shape} incompatible with operator dimension {n}")


def tensor(*ops: Operator) -> Operator:
    space = HilbertSpace(tuple(d for o in ops for d in o.space.factor_dims))
    return Operator(space, reduce(np.kron, [o.matrix for o in ops]))
