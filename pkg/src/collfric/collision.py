"""Generic collision-model engine with energy, work and friction accounting.

A system is dragged at speed ``v`` over ancillas spaced ``delta_x`` apart and
meets a fresh ancilla every ``dt = delta_x / v``. Each collision applies a joint
unitary to ``rho_S (x) rho_A(0)``; the friction of collision ``n`` is the sum of
the local energy changes divided by the spacing.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from . import kernels
from . import quantum as qc
from .constants import HBAR
from .errors import InvariantViolation

CouplingMode = Literal["fixed", "velocity_scaled"]
Generator = Literal["full", "interaction"]


def _frozen(m):
    m = np.array(m, dtype=complex)
    m.setflags(write=False)
    return m


@dataclass(frozen=True)
class CollisionSpec:
    """Joint Hamiltonian pieces, ancilla preparation and lattice spacing.

    ``coupling_mode="velocity_scaled"`` multiplies the whole generator by
    ``v * (1 s/m)``, so the collision unitary is ``exp(-i H delta_x / hbar)``
    regardless of speed. ``generator="interaction"`` evolves with ``H_SA``
    alone (interaction picture) while ``H_S``/``H_A`` still define the energies.
    """

    H_S: np.ndarray
    H_A: np.ndarray
    H_SA: np.ndarray
    ancilla_initial: np.ndarray
    delta_x: float
    coupling_mode: CouplingMode = "fixed"
    generator: Generator = "full"
    dims: tuple[int, int] = field(init=False)

    def __post_init__(self):
        h_s = qc.hermitian_operator(self.H_S)
        h_a = qc.hermitian_operator(self.H_A)
        h_sa = qc.hermitian_operator(self.H_SA)
        rho_a = qc.density_matrix(self.ancilla_initial)
        ds, da = h_s.shape[0], h_a.shape[0]
        if h_sa.shape[0] != ds * da:
            raise ValueError(f"H_SA has dimension {h_sa.shape[0]}, expected {ds}*{da}")
        if rho_a.shape[0] != da:
            raise ValueError("ancilla state and H_A dimensions differ")
        if not self.delta_x > 0:
            raise ValueError("spacing delta_x must be positive")
        if self.coupling_mode not in ("fixed", "velocity_scaled"):
            raise ValueError(f"unknown coupling mode {self.coupling_mode!r}")
        if self.generator not in ("full", "interaction"):
            raise ValueError(f"unknown generator {self.generator!r}")
        for name, m in (("H_S", h_s), ("H_A", h_a), ("H_SA", h_sa), ("ancilla_initial", rho_a)):
            object.__setattr__(self, name, _frozen(m))
        object.__setattr__(self, "dims", (ds, da))

    def hamiltonian(self):
        """Generator of the joint unitary (before any velocity scaling)."""
        ds, da = self.dims
        if self.generator == "interaction":
            return np.array(self.H_SA)
        return (np.kron(self.H_S, np.eye(da)) + np.kron(np.eye(ds), self.H_A)
                + self.H_SA)

    def duration(self, v: float) -> float:
        """Argument t of exp(-i H t / hbar) for one collision at speed v."""
        _check_speed(v)
        if self.coupling_mode == "velocity_scaled":
            # H = v * H0 with v in m/s: H*dt = H0 * delta_x
            return self.delta_x
        return self.delta_x / v

    def unitary(self, v: float):
        return qc.unitary_from_hamiltonian(self.hamiltonian(), self.duration(v))

    def unitary_increment(self, v: float):
        """U(v) - 1 without cancellation."""
        return qc.unitary_increment(self.hamiltonian(), self.duration(v))

    def characteristic_speed(self) -> float:
        """delta_x * ||H - Tr(H)/D|| / hbar, the scale above which Zeno
        behaviour sets in. Only meaningful for fixed coupling."""
        h = self.hamiltonian()
        d = h.shape[0]
        h = h - np.trace(h) / d * np.eye(d)
        return self.delta_x * float(np.max(np.abs(np.linalg.eigvalsh(h)))) / HBAR


@dataclass(frozen=True)
class InteractionRecord:
    n: int
    dE_S: float
    dE_A: float
    dW: float
    f_n: float
    system_state_after: np.ndarray


def _check_speed(v):
    if not v > 0:
        raise ValueError(f"speed must be positive, got {v}")


def _records(spec, states, d_e_s, d_e_a, herm_dev, offset=0):
    if herm_dev > 1e-10:
        raise InvariantViolation(f"reduced state lost Hermiticity ({herm_dev:.3e})")
    out = []
    for n in range(len(d_e_s)):
        de_s = float(d_e_s[n])
        de_a = float(d_e_a[n])
        dw = -(de_s + de_a)
        st = states[n].copy()
        st.setflags(write=False)
        out.append(InteractionRecord(n + offset, de_s, de_a, dw, (de_s + de_a) / spec.delta_x, st))
    return out


def collide_once(spec: CollisionSpec, rho_S, v: float, n: int = 0) -> InteractionRecord:
    """One collision of the system (state ``rho_S``) with a fresh ancilla."""
    rho_S = qc.density_matrix(rho_S)
    if rho_S.shape[0] != spec.dims[0]:
        raise ValueError("system state and H_S dimensions differ")
    u = qc.check_unitary(spec.unitary(v))
    res = kernels.collision_trajectory(u, spec.unitary_increment(v), rho_S,
                                       spec.ancilla_initial, spec.H_S, spec.H_A, 1)
    return _records(spec, *res, offset=n)[0]


def run_trajectory(spec: CollisionSpec, rho_S0, v: float, N: int) -> list[InteractionRecord]:
    """``N`` successive collisions, threading the system state through."""
    if N < 1:
        raise ValueError("need at least one interaction")
    rho_S0 = qc.density_matrix(rho_S0)
    if rho_S0.shape[0] != spec.dims[0]:
        raise ValueError("system state and H_S dimensions differ")
    u = qc.check_unitary(spec.unitary(v))
    res = kernels.collision_trajectory(u, spec.unitary_increment(v), rho_S0,
                                       spec.ancilla_initial, spec.H_S, spec.H_A, int(N))
    return _records(spec, *res)


def friction_series(records) -> np.ndarray:
    return np.array([r.f_n for r in records])


def zeno_leading_coefficient(spec: CollisionSpec, rho_S) -> float:
    """lim v*f_n as v -> oo: < (i/hbar) [H_SA, H_S + H_A] > on rho_S (x) rho_A(0).

    Units N m/s (J/s). Undefined when the coupling grows with speed.
    """
    if spec.coupling_mode != "fixed":
        raise ValueError("Zeno expansion needs a velocity-independent generator")
    rho_S = qc.density_matrix(rho_S)
    ds, da = spec.dims
    local = np.kron(spec.H_S, np.eye(da)) + np.kron(np.eye(ds), spec.H_A)
    op = 1j / HBAR * qc.commutator(spec.H_SA, local)
    return qc.expectation(op, np.kron(rho_S, spec.ancilla_initial))


def zeno_critical_speed(r: float, E: float) -> float:
    """2 r E / hbar: speed above which a crossing of width 2r is perturbative."""
    if r <= 0:
        raise ValueError("radius must be positive")
    if E < 0:
        raise ValueError("energy scale must be non-negative")
    return 2.0 * r * E / HBAR
