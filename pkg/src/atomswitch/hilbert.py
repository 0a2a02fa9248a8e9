"""Truncated Hilbert space of one traveling-wave resonator mode and a
two-level atom, and the dense operator algebra on it.

Basis ordering is fixed throughout the package:

    index = 2 * photon_number + atom_level,   atom_level in {0: ground, 1: excited}

i.e. the mode is the outer tensor factor and the atom the inner one, so
``op = kron(mode_part, atom_part)``.  Operators are dense complex matrices;
every rate carried by an operator is an angular frequency in rad/us.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError

ATOM_GROUND = 0
ATOM_EXCITED = 1


@dataclass(frozen=True)
class HilbertSpace:
    """Product space of ``n_max + 1`` Fock states and a two-level atom."""

    n_max: int

    @property
    def dim_mode(self) -> int:
        return self.n_max + 1

    @property
    def dim_atom(self) -> int:
        return 2

    @property
    def dim(self) -> int:
        return 2 * (self.n_max + 1)

    def index(self, photon_number: int, atom_level: int) -> int:
        """Basis index of |photon_number, atom_level>."""
        if not 0 <= photon_number <= self.n_max:
            raise InvalidArgumentError(
                f"photon_number {photon_number} outside [0, {self.n_max}]")
        if atom_level not in (ATOM_GROUND, ATOM_EXCITED):
            raise InvalidArgumentError(f"atom_level must be 0 or 1, got {atom_level}")
        return 2 * photon_number + atom_level

    def labels(self, index: int) -> tuple[int, int]:
        """Inverse of :meth:`index`: returns (photon_number, atom_level)."""
        if not 0 <= index < self.dim:
            raise InvalidArgumentError(f"index {index} outside [0, {self.dim})")
        return index // 2, index % 2


def build_space(n_max: int) -> HilbertSpace:
    """Create the truncated space; ``n_max`` must be a positive integer."""
    if int(n_max) != n_max or n_max < 1:
        raise InvalidArgumentError(f"n_max must be an integer >= 1, got {n_max!r}")
    return HilbertSpace(int(n_max))


def identity(space: HilbertSpace) -> np.ndarray:
    return np.eye(space.dim, dtype=complex)


def annihilation(space: HilbertSpace) -> np.ndarray:
    """Mode annihilation operator a (identity on the atom factor).

    a|n, s> = sqrt(n) |n-1, s>; the [a, a+] = 1 commutator holds exactly on
    the n < n_max block, with the truncation artifact confined to the edge.
    """
    n = np.arange(1, space.dim_mode)
    a_mode = np.diag(np.sqrt(n).astype(complex), k=1)
    return np.kron(a_mode, np.eye(2, dtype=complex))


def creation(space: HilbertSpace) -> np.ndarray:
    return annihilation(space).conj().T


def number_operator(space: HilbertSpace) -> np.ndarray:
    n_mode = np.diag(np.arange(space.dim_mode, dtype=float).astype(complex))
    return np.kron(n_mode, np.eye(2, dtype=complex))


def atom_lowering(space: HilbertSpace) -> np.ndarray:
    """Atomic lowering operator: |n, g><n, e| for every n."""
    sm = np.zeros((2, 2), dtype=complex)
    sm[ATOM_GROUND, ATOM_EXCITED] = 1.0
    return np.kron(np.eye(space.dim_mode, dtype=complex), sm)


def atom_raising(space: HilbertSpace) -> np.ndarray:
    return atom_lowering(space).conj().T


def atom_excitation(space: HilbertSpace) -> np.ndarray:
    """Excited-state projector sigma+ sigma-."""
    sp = atom_raising(space)
    return sp @ atom_lowering(space)


def adjoint(op: np.ndarray) -> np.ndarray:
    return np.asarray(op).conj().T


def ket(space: HilbertSpace, photon_number: int, atom_level: int) -> np.ndarray:
    """Basis column vector |photon_number, atom_level>."""
    v = np.zeros(space.dim, dtype=complex)
    v[space.index(photon_number, atom_level)] = 1.0
    return v


def projector(space: HilbertSpace, photon_number: int, atom_level: int) -> np.ndarray:
    v = ket(space, photon_number, atom_level)
    return np.outer(v, v.conj())


def expectation(op: np.ndarray, rho: np.ndarray) -> complex:
    """Tr[op rho]; raises on dimension mismatch."""
    op = np.asarray(op)
    rho = np.asarray(rho)
    if op.shape != rho.shape or op.ndim != 2 or op.shape[0] != op.shape[1]:
        raise InvalidArgumentError(
            f"dimension mismatch: op {op.shape} vs rho {rho.shape}")
    return complex(np.einsum("ij,ji->", op, rho))


def check_density_matrix(rho: np.ndarray,
                         herm_tol: float = 1e-10,
                         trace_tol: float = 1e-10,
                         eig_floor: float = -1e-8) -> None:
    """Validate the state invariants: Hermitian, unit trace, PSD up to noise.

    Raises :class:`InvalidArgumentError` on violation.
    """
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise InvalidArgumentError(f"density matrix must be square, got {rho.shape}")
    herm = np.abs(rho - rho.conj().T).max()
    if herm > herm_tol:
        raise InvalidArgumentError(f"not Hermitian: max deviation {herm:.3e}")
    tr = np.trace(rho)
    if abs(tr - 1.0) > trace_tol:
        raise InvalidArgumentError(f"trace {tr} differs from 1 beyond {trace_tol}")
    lam_min = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min()
    if lam_min < eig_floor:
        raise InvalidArgumentError(f"negative eigenvalue {lam_min:.3e} below floor")
