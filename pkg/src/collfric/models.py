"""The damped partial-swap and entangle-disentangle example models.

Both are one-dimensional convex collision models. Each comes with a factory
for a ConvexModelSpec and its own closed-form friction, so the two routes can
be checked against each other.

Qubit energies follow ``QubitThermalState``: H = hbar*omega*sigma_z, so a
qubit with polarization a carries energy hbar*omega*a.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from . import quantum as qc
from .collision import CollisionSpec
from .constants import HBAR
from .convex import ConvexEnergies, ConvexModelSpec, FrictionDecomposition, Retention

SERIES_CUTOFF = 1e-8  # |omega dt|^2 below which the critical-damping series is used


def _coupling(J, k):
    if (J is None) == (k is None):
        raise ValueError("give exactly one of J (fixed coupling) or k (J = k*v)")
    if J is not None and J < 0 or k is not None and k < 0:
        raise ValueError("coupling strength must be non-negative")
    return "fixed" if J is not None else "velocity_scaled"


@dataclass(frozen=True)
class DampedSwapParams:
    """Two thermal qubits, partial-swap coupling, ancilla leaking at gamma_A.

    Exactly one of ``J`` (rad/s) or ``k`` (rad/m, with J = k*v) is given.
    """

    system: qc.QubitThermalState
    ancilla: qc.QubitThermalState
    delta_x: float
    gamma_A: float = 0.0
    J: float | None = None
    k: float | None = None

    def __post_init__(self):
        _coupling(self.J, self.k)
        if self.gamma_A < 0:
            raise ValueError("gamma_A must be non-negative")
        if not self.delta_x > 0:
            raise ValueError("spacing delta_x must be positive")

    @property
    def coupling(self) -> Literal["fixed", "velocity_scaled"]:
        return _coupling(self.J, self.k)

    def rate(self, dt):
        """Coupling rate J during a collision of duration dt."""
        if self.J is not None:
            return self.J + 0.0 * np.asarray(dt, dtype=float)
        return self.k * self.delta_x / np.asarray(dt, dtype=float)

    def damped_frequency(self, v=None):
        """sqrt(J^2 - gamma_A^2); complex when overdamped."""
        J = self.J if self.J is not None else self.k * v
        return np.sqrt(complex(J * J - self.gamma_A**2))

    def characteristic_speed(self) -> float:
        """J*delta_x for fixed coupling, the critical speed gamma_A/k otherwise."""
        if self.J is not None:
            return self.J * self.delta_x
        return self.gamma_A / self.k


@dataclass(frozen=True)
class EntangleDisentangleParams:
    """Entangle-disentangle model given through energies (J).

    The targets are the maximally mixed states, so ``E_S_target`` and
    ``E_A_target`` are Tr(H)/D of each party.
    """

    epsilon: float
    delta_x: float
    E_S0: float
    E_S_target: float
    E_A0: float
    E_A_target: float
    J: float | None = None
    k: float | None = None

    def __post_init__(self):
        _coupling(self.J, self.k)
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError("epsilon must lie in [0, 1]")
        if not self.delta_x > 0:
            raise ValueError("spacing delta_x must be positive")

    @classmethod
    def from_states(cls, rho_S0, H_S, rho_A0, H_A, *, epsilon, delta_x, J=None, k=None):
        return cls(
            epsilon=epsilon, delta_x=delta_x,
            E_S0=qc.expectation(H_S, rho_S0),
            E_S_target=float(np.trace(qc.hermitian_operator(H_S)).real) / len(H_S),
            E_A0=qc.expectation(H_A, rho_A0),
            E_A_target=float(np.trace(qc.hermitian_operator(H_A)).real) / len(H_A),
            J=J, k=k,
        )

    @property
    def coupling(self):
        return _coupling(self.J, self.k)

    def phase(self, dt):
        """J*dt for the collision duration dt."""
        dt = np.asarray(dt, dtype=float)
        if self.J is not None:
            return self.J * dt
        return self.k * self.delta_x + 0.0 * dt

    def characteristic_speed(self) -> float:
        if self.J is None:
            raise ValueError("velocity-scaled coupling has no characteristic speed")
        return self.J * self.delta_x


def _damped_amplitudes(J, gamma, t):
    """(A, B, log|A|) with phi_S = A^2 and 1 - phi_A = B^2.

    A = e^{-gamma t}(cos wt + gamma sin(wt)/w), B = e^{-gamma t} J sin(wt)/w,
    w^2 = J^2 - gamma^2. Works in s = (w t)^2 so all damping regimes stay real.
    """
    J, gamma, t = np.broadcast_arrays(*(np.asarray(x, dtype=float) for x in (J, gamma, t)))
    s = (J - gamma) * (J + gamma) * t * t
    gt = gamma * t
    A = np.empty(s.shape)
    B = np.empty(s.shape)
    logA = np.empty(s.shape)

    series = np.abs(s) < SERIES_CUTOFF
    if np.any(series):
        ss, g, Jt = s[series], gt[series], (J * t)[series]
        c = 1 - ss / 2 + ss * ss / 24
        sinc = 1 - ss / 6 + ss * ss / 120
        env = np.exp(-g)
        A[series] = env * (c + g * sinc)
        B[series] = env * Jt * sinc
        # log1p keeps log|A| accurate when A is within roundoff of one
        logA[series] = -g + np.log1p(-ss / 2 + ss * ss / 24 + g * sinc)

    under = (s >= SERIES_CUTOFF)
    if np.any(under):
        x = np.sqrt(s[under])
        g, Jt = gt[under], (J * t)[under]
        env = np.exp(-g)
        inner = np.cos(x) + g * np.sin(x) / x
        excess = -2 * np.sin(0.5 * x) ** 2 + g * np.sin(x) / x  # inner - 1
        A[under] = env * inner
        B[under] = env * Jt * np.sin(x) / x
        with np.errstate(divide="ignore", invalid="ignore"):
            logA[under] = -g + np.where(inner > 0.5, np.log1p(excess), np.log(np.abs(inner)))

    over = (s <= -SERIES_CUTOFF)
    if np.any(over):
        x = np.sqrt(-s[over])
        g, Jt = gt[over], (J * t)[over]
        tt, gam, JJ = t[over], gamma[over], J[over]
        # x - gamma t = (sqrt(gamma^2 - J^2) - gamma) t, written without cancellation
        shift = -JJ * JJ * tt / (np.sqrt(-s[over]) / tt + gam)
        shrink = -np.expm1(-2 * x) / (2 * x)  # e^{-x} sinh(x)/x
        bracket = 0.5 * (1 + np.exp(-2 * x)) + g * shrink
        A[over] = np.exp(shift) * bracket
        B[over] = np.exp(shift) * Jt * shrink
        logA[over] = shift + np.log1p(-shift * shrink)  # bracket - 1 = -shift * shrink

    return A[()], B[()], logA[()]


def damped_swap_retentions(p: DampedSwapParams, dt):
    """(phi_S, phi_A) of the damped partial swap for collision duration dt."""
    A, B, _ = _damped_amplitudes(p.rate(dt), p.gamma_A, dt)
    return A * A, 1.0 - B * B


def damped_swap_retention_profiles(p: DampedSwapParams):
    def phi_s(dt):
        A, _, _ = _damped_amplitudes(p.rate(dt), p.gamma_A, dt)
        return A * A

    def log_phi_s(dt):
        return 2.0 * _damped_amplitudes(p.rate(dt), p.gamma_A, dt)[2]

    def leak_s(dt):
        return -np.expm1(log_phi_s(dt))

    def phi_a(dt):
        B = _damped_amplitudes(p.rate(dt), p.gamma_A, dt)[1]
        return 1.0 - B * B

    def leak_a(dt):
        B = _damped_amplitudes(p.rate(dt), p.gamma_A, dt)[1]
        return B * B

    return (Retention(phi_s, log=log_phi_s, complement=leak_s, name="damped_swap_S"),
            Retention(phi_a, complement=leak_a, name="damped_swap_A"))


def damped_swap_friction(p: DampedSwapParams, v) -> FrictionDecomposition:
    """Closed form: the friction is purely transient (f_infty = 0)."""
    v = np.asarray(v, dtype=float)
    if np.any(~(v > 0)):
        raise ValueError("speed must be positive")
    dt = p.delta_x / v
    A, B, logA = _damped_amplitudes(p.rate(dt), p.gamma_A, dt)
    w_s, w_a = p.system.omega, p.ancilla.omega
    da = p.ancilla.a - p.system.a
    if p.gamma_A == 0:
        # 1 - A^2 = B^2 exactly: nothing leaks to the environment
        f_tr = HBAR * (w_s - w_a) * B * B * da / p.delta_x
    else:
        f_tr = HBAR * (w_s * -np.expm1(2 * logA) - w_a * B * B) * da / p.delta_x
    gamma = -2 * logA / dt + 0.0
    return FrictionDecomposition(np.zeros_like(v)[()], f_tr, gamma, v[()], (A * A))


@dataclass(frozen=True)
class DampedSwapLimits:
    """Leading behaviour f_tr ~ f_tr_coeff * v**f_tr_power, Gamma ~ gamma_coeff * v**gamma_power."""

    regime: Literal["large_v", "small_v"]
    coupling: Literal["fixed", "velocity_scaled"]
    f_tr_coeff: float
    f_tr_power: int
    gamma_coeff: float
    gamma_power: int
    f_infty: float = 0.0

    def evaluate(self, v) -> FrictionDecomposition:
        v = np.asarray(v, dtype=float)
        return FrictionDecomposition(
            np.full_like(v, self.f_infty)[()],
            (self.f_tr_coeff * v**self.f_tr_power)[()],
            (self.gamma_coeff * v**self.gamma_power)[()],
            v[()],
        )


def damped_swap_limits(p: DampedSwapParams, regime: Literal["large_v", "small_v"]) -> DampedSwapLimits:
    """Leading-order coefficients of f_tr and Gamma at large or small speed."""
    hw_s, hw_a = HBAR * p.system.omega, HBAR * p.ancilla.omega
    da = p.ancilla.a - p.system.a
    dx, g = p.delta_x, p.gamma_A
    if regime == "large_v":
        if p.coupling == "fixed":
            J = p.J
            return DampedSwapLimits(regime, "fixed", J * J * dx * (hw_s - hw_a) * da, -2, J * J * dx, -1)
        s2 = np.sin(p.k * dx) ** 2
        return DampedSwapLimits(regime, "velocity_scaled", s2 * (hw_s - hw_a) * da / dx, 0,
                                -np.log1p(-s2) / dx, 1)
    if regime != "small_v":
        raise ValueError(f"unknown regime {regime!r}")
    if g <= 0:
        raise ValueError("the small-speed limit needs a damped ancilla (gamma_A > 0)")
    if p.coupling == "fixed":
        J = p.J
        rate = 2 * g if g <= J else 2 * g - 2 * np.sqrt(g * g - J * J)
        return DampedSwapLimits(regime, "fixed", hw_s * da / dx, 0, rate, 0)
    k = p.k
    return DampedSwapLimits(regime, "velocity_scaled", k * k * hw_s * da / g, 1, k * k / g, 2)


def ed_retentions(p: EntangleDisentangleParams, dt):
    """phi_S = phi_A = eps + (1 - eps) cos^2(J dt)."""
    leak = (1 - p.epsilon) * np.sin(p.phase(dt)) ** 2
    return 1.0 - leak, 1.0 - leak


def ed_retention_profile(p: EntangleDisentangleParams):
    def leak(dt):
        return (1 - p.epsilon) * np.sin(p.phase(dt)) ** 2

    def phi(dt):
        return 1.0 - leak(dt)

    def log_phi(dt):
        with np.errstate(divide="ignore"):
            return np.log1p(-leak(dt))

    return Retention(phi, log=log_phi, complement=leak, name="entangle_disentangle")


def ed_friction(p: EntangleDisentangleParams, v) -> FrictionDecomposition:
    """Closed form for the entangle-disentangle model at speed v."""
    v = np.asarray(v, dtype=float)
    if np.any(~(v > 0)):
        raise ValueError("speed must be positive")
    dt = p.delta_x / v
    leak = (1 - p.epsilon) * np.sin(p.phase(dt)) ** 2
    f_inf = leak * (p.E_A_target - p.E_A0) / p.delta_x
    f_tr = leak * (p.E_S_target - p.E_S0) / p.delta_x
    with np.errstate(divide="ignore"):
        gamma = -(v / p.delta_x) * np.log1p(-leak) + 0.0
    return FrictionDecomposition(f_inf[()], f_tr[()], gamma[()], v[()], (1.0 - leak)[()])


def build_convex_spec(p: DampedSwapParams | EntangleDisentangleParams) -> ConvexModelSpec:
    """ConvexModelSpec equivalent to the model's reduced dynamics."""
    if isinstance(p, DampedSwapParams):
        phi_s, phi_a = damped_swap_retention_profiles(p)
        rho_s = p.system.density_matrix()
        rho_a = p.ancilla.density_matrix()
        # system relaxes to the ancilla's state; the ancilla is pulled towards
        # the system's current state, which itself tends to rho_A(0)
        return ConvexModelSpec(
            phi_S=phi_s, phi_A=phi_a, delta_x=p.delta_x,
            rho_S_init=rho_s, rho_S_target=rho_a,
            rho_A_init=rho_a, rho_A_target_0=rho_s, rho_A_target_inf=rho_a,
            H_S=p.system.hamiltonian(), H_A=p.ancilla.hamiltonian(),
        )
    if isinstance(p, EntangleDisentangleParams):
        phi = ed_retention_profile(p)
        energies = ConvexEnergies(p.E_S0, p.E_S_target, p.E_A0, p.E_A_target, p.E_A_target)
        return ConvexModelSpec(phi_S=phi, phi_A=phi, delta_x=p.delta_x, energies=energies)
    raise TypeError(f"unsupported model parameters {type(p).__name__}")


def swap_collision_spec(p: DampedSwapParams) -> CollisionSpec:
    """Unitary collision model behind the undamped, fixed-coupling swap.

    The generator is hbar*J*U_sw alone; H_S and H_A only define energies.
    """
    if p.gamma_A != 0 or p.coupling != "fixed":
        raise ValueError("only the undamped fixed-coupling swap is unitary")
    return CollisionSpec(
        H_S=p.system.hamiltonian(), H_A=p.ancilla.hamiltonian(),
        H_SA=qc.swap_hamiltonian(p.J), ancilla_initial=p.ancilla.density_matrix(),
        delta_x=p.delta_x, generator="interaction",
    )
