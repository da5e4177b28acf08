"""Dense linear algebra for small Hilbert spaces.

States and operators are plain complex numpy arrays. The basis convention is
fixed project-wide: in a joint space the system index is the slow one and the
ancilla index the fast one, i.e. ``kron(system, ancilla)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .constants import HBAR
from .errors import InvariantViolation

TRACE_TOL = 1e-12
HERMITIAN_TOL = 1e-12
PSD_TOL = 1e-10
UNITARY_TOL = 1e-10
IMAG_TOL = 1e-10

IDENTITY2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)

for _m in (IDENTITY2, *PAULIS):
    _m.setflags(write=False)


def _square(m, name="matrix"):
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{name} must be square, got shape {m.shape}")
    return m


def _scale(m) -> float:
    # tolerances on operators are relative to their largest entry (Hamiltonians
    # are ~1e-19 J in SI); states have entries of order one
    big = float(np.max(np.abs(m))) if np.size(m) else 0.0
    return big if big > 0 else 1.0


def hermiticity_error(m) -> float:
    m = np.asarray(m)
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def hermitize(m, tol=HERMITIAN_TOL):
    """Return (m + m^dagger)/2 after checking m was Hermitian to within tol.

    Used after arithmetic-heavy steps so roundoff cannot accumulate over many
    collisions.
    """
    err = hermiticity_error(m)
    if err > tol * _scale(m):
        raise InvariantViolation(f"matrix is not Hermitian (deviation {err:.3e})")
    return 0.5 * (m + m.conj().T)


def hermitian_operator(m, tol=HERMITIAN_TOL):
    """Validate and return a Hermitian operator as a complex array."""
    m = _square(m, "operator")
    if hermiticity_error(m) > tol * _scale(m):
        raise ValueError("operator is not Hermitian")
    return m


def density_matrix(rho, *, trace_tol=TRACE_TOL, herm_tol=HERMITIAN_TOL, psd_tol=PSD_TOL):
    """Validate a density matrix: unit trace, Hermitian, positive semidefinite."""
    rho = _square(rho, "density matrix")
    tr = np.trace(rho)
    if abs(tr - 1.0) > trace_tol:
        raise ValueError(f"density matrix trace is {tr.real:.15g}, expected 1")
    if hermiticity_error(rho) > herm_tol:
        raise ValueError("density matrix is not Hermitian")
    if min_eigenvalue(rho) < -psd_tol:
        raise ValueError("density matrix is not positive semidefinite")
    return rho


def min_eigenvalue(m) -> float:
    return float(np.linalg.eigvalsh(0.5 * (m + m.conj().T))[0])


def is_density_matrix(rho, **tols) -> bool:
    try:
        density_matrix(rho, **tols)
    except ValueError:
        return False
    return True


@dataclass(frozen=True)
class QubitThermalState:
    """Diagonal qubit state (1 + a sigma_z)/2 with level splitting set by omega.

    ``a = -1`` is the ground state, ``a = 0`` maximally mixed and ``a > 0``
    population inverted. The local Hamiltonian is ``hbar*omega*sigma_z`` so the
    state's energy is ``hbar*omega*a``.
    """

    a: float
    omega: float = 0.0

    def __post_init__(self):
        if not -1.0 <= self.a <= 1.0:
            raise ValueError(f"polarization must lie in [-1, 1], got {self.a}")

    def density_matrix(self):
        return 0.5 * (IDENTITY2 + self.a * SIGMA_Z)

    def hamiltonian(self):
        return HBAR * self.omega * SIGMA_Z

    @property
    def energy(self) -> float:
        return HBAR * self.omega * self.a


def tensor_product(a, b):
    """Kronecker product with ``a`` as the slow (first) index."""
    return np.kron(_square(a), _square(b))


def partial_trace(joint, keep: Literal["first", "second"], dims: tuple[int, int]):
    """Reduced state of one factor of a bipartite operator on ``d1*d2`` dims."""
    d1, d2 = dims
    joint = _square(joint, "joint state")
    if joint.shape[0] != d1 * d2:
        raise ValueError(f"joint dimension {joint.shape[0]} != {d1}*{d2}")
    t = joint.reshape(d1, d2, d1, d2)
    if keep == "first":
        return np.einsum("ijkj->ik", t)
    if keep == "second":
        return np.einsum("ijil->jl", t)
    raise ValueError(f"keep must be 'first' or 'second', got {keep!r}")


def swap_operator(d: int):
    """U_sw on C^d (x) C^d: |i>|j> -> |j>|i>. Self-adjoint and unitary."""
    if d < 1:
        raise ValueError("dimension must be positive")
    u = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            u[j * d + i, i * d + j] = 1.0
    return u


def swap_hamiltonian(J: float, d: int = 2):
    """hbar*J*U_sw; for qubits this is hbar*J*(1 + sigma_S . sigma_A)/2."""
    return HBAR * J * swap_operator(d)


def partial_swap_unitary(J: float, t: float, d: int = 2):
    """exp(-i hbar J U_sw t / hbar) = cos(Jt) 1 - i sin(Jt) U_sw."""
    if d < 2:
        raise ValueError("partial swap needs subsystem dimension >= 2")
    x = J * t
    return np.cos(x) * np.eye(d * d, dtype=complex) - 1j * np.sin(x) * swap_operator(d)


def isotropic_coupling(J: float):
    """hbar*J*sigma_S . sigma_A on two qubits (generates swaps at rate 2J)."""
    return HBAR * J * sum(np.kron(p, p) for p in PAULIS)


def unitarity_error(u) -> float:
    u = np.asarray(u)
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))


def check_unitary(u, tol=UNITARY_TOL):
    u = _square(u, "unitary")
    err = unitarity_error(u)
    if err > tol:
        raise InvariantViolation(f"operator is not unitary (|U^dag U - 1| = {err:.3e})")
    return u


def _spectral(h, duration, hbar):
    h = hermitian_operator(h)
    d = h.shape[0]
    # a global phase drops out of U rho U^dag; removing it keeps U - 1 small
    h = 0.5 * (h + h.conj().T) - np.trace(h).real / d * np.eye(d)
    w, v = np.linalg.eigh(h)
    return w * (duration / hbar), v


def unitary_from_hamiltonian(h, duration: float, hbar: float = HBAR):
    """exp(-i h duration / hbar) through a Hermitian eigendecomposition.

    Exact up to roundoff and a global phase (the trace part of ``h`` is
    dropped) for the small matrices used here, at any duration.
    """
    theta, v = _spectral(h, duration, hbar)
    return (v * np.exp(-1j * theta)) @ v.conj().T


def unitary_increment(h, duration: float, hbar: float = HBAR):
    """U - 1 for the unitary above, free of cancellation when U is close to 1."""
    theta, v = _spectral(h, duration, hbar)
    k = -2.0 * np.sin(0.5 * theta) ** 2 - 1j * np.sin(theta)
    return (v * k) @ v.conj().T


def evolve(u, rho, check: bool = True):
    """U rho U^dagger; raises InvariantViolation for non-unitary U."""
    u = _square(u, "unitary")
    rho = _square(rho, "state")
    if u.shape != rho.shape:
        raise ValueError(f"shape mismatch: U {u.shape} vs rho {rho.shape}")
    if check:
        check_unitary(u)
    out = u @ rho @ u.conj().T
    return hermitize(out, tol=1e-10)


def expectation(op, rho) -> float:
    """Tr(op rho) for Hermitian op; a non-negligible imaginary part is an error."""
    op = _square(op, "operator")
    rho = _square(rho, "state")
    if op.shape != rho.shape:
        raise ValueError(f"shape mismatch: {op.shape} vs {rho.shape}")
    val = np.einsum("ij,ji->", op, rho)
    if abs(val.imag) >= IMAG_TOL * _scale(op):
        raise InvariantViolation(f"expectation has imaginary part {val.imag:.3e}")
    return float(val.real)


def commutator(a, b):
    return a @ b - b @ a


def random_density_matrix(d: int, rng: np.random.Generator, rank: int | None = None):
    """Ginibre-ensemble state G G^dagger / Tr(G G^dagger)."""
    k = d if rank is None else rank
    g = rng.normal(size=(d, k)) + 1j * rng.normal(size=(d, k))
    rho = g @ g.conj().T
    rho = rho / np.trace(rho).real
    return 0.5 * (rho + rho.conj().T)


def random_diagonal_qubit(rng: np.random.Generator):
    return QubitThermalState(float(rng.uniform(-1.0, 1.0))).density_matrix()
