"""One-dimensional convex collision models.

Each collision moves the system a fraction ``1 - phi_S(dt)`` of the way from its
current state to a fixed target, and moves the fresh ancilla a fraction
``1 - phi_A(dt)`` towards a target that depends linearly on the system state.
Everything about the friction then follows in closed form:

    f_n = f_infty + f_tr * phi_S(dt)**n = f_infty + f_tr * exp(-Gamma n dt)
"""
from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Callable, Literal

import numpy as np

from . import quantum as qc
from .errors import InvariantViolation

CLAMP_TOL = 1e-12


class Retention:
    """Retention fraction phi(dt) in [0, 1] for a collision of duration dt.

    ``log`` may supply log(phi) directly; it is used for decay rates so that
    phi values which underflow to zero still give a finite rate. ``complement``
    may supply 1 - phi without cancellation for phi close to one.
    """

    def __init__(self, func: Callable, log: Callable | None = None,
                 complement: Callable | None = None, name: str = ""):
        self._func = func
        self._log = log
        self._complement = complement
        self.name = name or getattr(func, "__name__", "retention")

    def __repr__(self):
        return f"Retention({self.name})"

    def __call__(self, dt):
        return check_retention(self._func(dt))

    def complement(self, dt):
        """1 - phi(dt)."""
        if self._complement is not None:
            # range check on 1 - phi itself; subtracting twice would undo the point
            return check_retention(self._complement(dt))[()]
        return 1.0 - self(dt)

    def log(self, dt):
        if self._log is not None:
            return np.asarray(self._log(dt), dtype=float)[()]
        with np.errstate(divide="ignore"):
            return np.log(self(dt))


def as_retention(obj) -> Retention:
    if isinstance(obj, Retention):
        return obj
    if callable(obj):
        return Retention(obj)
    value = float(obj)
    return Retention(lambda dt: np.full(np.shape(dt), value)[()], name=f"const({value})")


def check_retention(phi):
    """Clamp roundoff-level excursions outside [0, 1]; reject anything larger."""
    if isinstance(phi, float) and -CLAMP_TOL <= phi <= 1 + CLAMP_TOL:
        return np.float64(min(max(phi, 0.0), 1.0))
    phi = np.asarray(phi, dtype=float)
    ok = (phi >= -CLAMP_TOL) & (phi <= 1 + CLAMP_TOL)  # False for NaN
    if not ok.all():
        bad = phi[~ok]
        raise InvariantViolation(f"retention value {bad.flat[0]!r} outside [0, 1]")
    return np.clip(phi, 0.0, 1.0)[()]


@dataclass(frozen=True)
class ConvexEnergies:
    """Energies (J) of the five endpoint states of a convex model."""

    E_S0: float
    E_S_target: float
    E_A0: float
    E_A_target_0: float
    E_A_target_inf: float

    def __post_init__(self):
        for f in fields(self):
            if not np.isfinite(getattr(self, f.name)):
                raise ValueError(f"energy {f.name} is not finite")

    @property
    def system_gap(self):
        return self.E_S_target - self.E_S0

    @property
    def ancilla_gap(self):
        return self.E_A_target_inf - self.E_A0

    @property
    def ancilla_target_drift(self):
        return self.E_A_target_0 - self.E_A_target_inf

    def bounds(self, delta_x):
        """Speed-independent bounds on |f_infty| and |f_tr|."""
        return (abs(self.ancilla_gap) / delta_x,
                (abs(self.system_gap) + abs(self.ancilla_target_drift)) / delta_x)


_STATE_FIELDS = ("rho_S_init", "rho_S_target", "rho_A_init", "rho_A_target_0", "rho_A_target_inf")


@dataclass(frozen=True)
class ConvexModelSpec:
    """Retention functions, endpoint states (or just their energies) and spacing.

    Either give all five states plus ``H_S``/``H_A`` or give ``energies``
    directly; state-level operations need the states.
    """

    phi_S: Retention
    phi_A: Retention
    delta_x: float
    rho_S_init: np.ndarray | None = None
    rho_S_target: np.ndarray | None = None
    rho_A_init: np.ndarray | None = None
    rho_A_target_0: np.ndarray | None = None
    rho_A_target_inf: np.ndarray | None = None
    H_S: np.ndarray | None = None
    H_A: np.ndarray | None = None
    energies: ConvexEnergies | None = None

    def __post_init__(self):
        if not self.delta_x > 0:
            raise ValueError("spacing delta_x must be positive")
        object.__setattr__(self, "phi_S", as_retention(self.phi_S))
        object.__setattr__(self, "phi_A", as_retention(self.phi_A))
        states = [getattr(self, k) for k in _STATE_FIELDS]
        if all(s is None for s in states):
            if self.energies is None:
                raise ValueError("need either endpoint states or energies")
            return
        if any(s is None for s in states) or self.H_S is None or self.H_A is None:
            raise ValueError("state-level spec needs all five states and both Hamiltonians")
        h_s = qc.hermitian_operator(self.H_S)
        h_a = qc.hermitian_operator(self.H_A)
        for k in _STATE_FIELDS:
            rho = qc.density_matrix(getattr(self, k))
            h = h_s if k.startswith("rho_S") else h_a
            if rho.shape != h.shape:
                raise ValueError(f"{k} does not match its Hamiltonian's dimension")
            rho = rho.copy()
            rho.setflags(write=False)
            object.__setattr__(self, k, rho)
        computed = ConvexEnergies(
            qc.expectation(h_s, self.rho_S_init),
            qc.expectation(h_s, self.rho_S_target),
            qc.expectation(h_a, self.rho_A_init),
            qc.expectation(h_a, self.rho_A_target_0),
            qc.expectation(h_a, self.rho_A_target_inf),
        )
        if self.energies is not None:
            scale = max(abs(getattr(computed, f.name)) for f in fields(computed)) or 1.0
            for f in fields(computed):
                if abs(getattr(computed, f.name) - getattr(self.energies, f.name)) > 1e-12 * scale:
                    raise ValueError(f"given energy {f.name} disagrees with the states")
        object.__setattr__(self, "energies", computed)

    @property
    def has_states(self):
        return self.rho_S_init is not None


@dataclass(frozen=True)
class FrictionDecomposition:
    """f_n = f_infty + f_tr * phi_S**n at one speed (fields may be arrays)."""

    f_infty: float
    f_tr: float
    gamma: float
    velocity: float
    phi_S: float | None = None

    def at(self, n):
        """Friction during interaction n."""
        if self.phi_S is None:
            raise ValueError("per-interaction friction needs phi_S; use at_time")
        return self.f_infty + self.f_tr * np.power(self.phi_S, n)

    def at_time(self, t):
        """Interpolated friction f_infty + f_tr * exp(-Gamma t), exact at t = n dt."""
        gamma = np.asarray(self.gamma, dtype=float)
        t = np.asarray(t, dtype=float)
        with np.errstate(invalid="ignore", over="ignore"):
            decay = np.where(t == 0, 1.0, np.exp(-gamma * t))
        return (self.f_infty + self.f_tr * decay)[()]


def _require_states(spec):
    if not spec.has_states:
        raise ValueError("this operation needs a state-level ConvexModelSpec")


def _delta_t(spec, v):
    if isinstance(v, float):
        if not v > 0:
            raise ValueError("speed must be positive")
        return spec.delta_x / v
    v = np.asarray(v, dtype=float)
    if np.any(~(v > 0)):
        raise ValueError("speed must be positive")
    return (spec.delta_x / v)[()]


def _check_n(n):
    if isinstance(n, int):
        if n < 0:
            raise ValueError("interaction index must be non-negative")
        return
    if np.any(np.asarray(n) < 0):
        raise ValueError("interaction index must be non-negative")


def system_state_at(spec: ConvexModelSpec, dt, n: int):
    """rho_S(n dt) = phi_S^n rho_S(0) + (1 - phi_S^n) rho_S_target."""
    _require_states(spec)
    _check_n(n)
    w = float(spec.phi_S(dt)) ** n
    return w * spec.rho_S_init + (1 - w) * spec.rho_S_target


def decay_rate(phi, dt):
    """Gamma = -ln(phi)/dt, with phi = 0 giving +inf."""
    if np.any(np.asarray(dt) <= 0):
        raise ValueError("duration must be positive")
    phi = np.asarray(phi, dtype=float)
    if np.any(phi < 0) or np.any(phi > 1):
        raise ValueError("retention must lie in [0, 1]")
    with np.errstate(divide="ignore"):
        return (-np.log(phi) / dt + 0.0)[()]


def spec_decay_rate(spec: ConvexModelSpec, dt):
    """Gamma for a spec, through log(phi_S) when the profile provides it."""
    if np.any(np.asarray(dt) <= 0):
        raise ValueError("duration must be positive")
    return (-spec.phi_S.log(dt) / dt + 0.0)[()]


def interpolated_state(spec: ConvexModelSpec, dt, t):
    """exp(-Gamma t) rho_S(0) + (1 - exp(-Gamma t)) rho_S_target."""
    _require_states(spec)
    if t < 0:
        raise ValueError("time must be non-negative")
    gamma = spec_decay_rate(spec, dt)
    w = 1.0 if t == 0 else float(np.exp(-gamma * t))
    return w * spec.rho_S_init + (1 - w) * spec.rho_S_target


def ancilla_target_at(spec: ConvexModelSpec, dt, n: int):
    """Target of the n-th ancilla, interpolating between its two endpoints."""
    _require_states(spec)
    _check_n(n)
    w = float(spec.phi_S(dt)) ** n
    return w * spec.rho_A_target_0 + (1 - w) * spec.rho_A_target_inf


def friction_decomposition(spec: ConvexModelSpec, v) -> FrictionDecomposition:
    """(f_infty, f_tr, Gamma) at speed v; vectorised over arrays of v."""
    dt = _delta_t(spec, v)
    e = spec.energies
    phi_s = spec.phi_S(dt)
    leak_s = spec.phi_S.complement(dt)
    leak_a = spec.phi_A.complement(dt)
    f_inf = leak_a * e.ancilla_gap / spec.delta_x
    f_tr = (leak_s * e.system_gap + leak_a * e.ancilla_target_drift) / spec.delta_x
    gamma = spec_decay_rate(spec, dt)
    return FrictionDecomposition(f_inf, f_tr, gamma, np.asarray(v, dtype=float)[()], phi_s)


def friction_at(spec: ConvexModelSpec, v, n):
    """f_infty + f_tr * phi_S(dt)**n for interaction n at speed v."""
    _check_n(n)
    return friction_decomposition(spec, v).at(n)


def energy_steps(spec: ConvexModelSpec, v, n: int):
    """(dE_S, dE_A) of interaction n, obtained by stepping states or energies.

    Independent of the f_infty/f_tr factorisation: with states available the
    update maps are applied to density matrices and energies read off with
    the Hamiltonians.
    """
    _check_n(n)
    dt = _delta_t(spec, v)
    phi_s = float(spec.phi_S(dt))
    phi_a = float(spec.phi_A(dt))
    w = phi_s ** n
    if spec.has_states:
        before = w * spec.rho_S_init + (1 - w) * spec.rho_S_target
        after = phi_s * before + (1 - phi_s) * spec.rho_S_target
        target = w * spec.rho_A_target_0 + (1 - w) * spec.rho_A_target_inf
        anc = phi_a * spec.rho_A_init + (1 - phi_a) * target
        d_e_s = qc.expectation(spec.H_S, after - before)
        d_e_a = qc.expectation(spec.H_A, anc - spec.rho_A_init)
        return d_e_s, d_e_a
    e = spec.energies
    e_before = w * e.E_S0 + (1 - w) * e.E_S_target
    e_after = phi_s * e_before + (1 - phi_s) * e.E_S_target
    e_target = w * e.E_A_target_0 + (1 - w) * e.E_A_target_inf
    e_anc = phi_a * e.E_A0 + (1 - phi_a) * e_target
    return e_after - e_before, e_anc - e.E_A0


def direct_friction(spec: ConvexModelSpec, v, n: int) -> float:
    d_e_s, d_e_a = energy_steps(spec, v, n)
    return (d_e_s + d_e_a) / spec.delta_x


Regime = Literal["regular_large_v", "jump_large_v", "saturating_small_v", "polynomial_small_v"]

_REGIME_FIELDS = {
    "regular_large_v": ("phi_S1", "phi_A1"),
    "jump_large_v": ("F_S", "F_A"),
    "saturating_small_v": ("f_S", "f_A"),
    "polynomial_small_v": ("phi_Sp", "phi_Ap", "p"),
}


@dataclass(frozen=True)
class AsymptoticCoefficients:
    """Leading behaviour of the retention functions in one limit.

    regular_large_v:     phi = 1 - dt*phi_1 + O(dt^2)        (phi_S1, phi_A1 in 1/s)
    jump_large_v:        phi(dt -> 0) = 1 - F                (F_S, F_A)
    saturating_small_v:  phi(dt -> oo) = 1 - f              (f_S, f_A)
    polynomial_small_v:  phi = 1 - dt**-p * phi_p            (phi_Sp, phi_Ap in s^p; p)
    """

    regime: Regime
    phi_S1: float | None = None
    phi_A1: float | None = None
    F_S: float | None = None
    F_A: float | None = None
    f_S: float | None = None
    f_A: float | None = None
    phi_Sp: float | None = None
    phi_Ap: float | None = None
    p: float | None = None

    def __post_init__(self):
        if self.regime not in _REGIME_FIELDS:
            raise ValueError(f"unknown regime {self.regime!r}")
        active = _REGIME_FIELDS[self.regime]
        for f in fields(self):
            if f.name == "regime":
                continue
            value = getattr(self, f.name)
            if f.name in active and value is None:
                raise ValueError(f"regime {self.regime} needs {f.name}")
            if f.name not in active and value is not None:
                raise ValueError(f"{f.name} does not belong to regime {self.regime}")
        if self.regime == "polynomial_small_v" and not self.p > 0:
            raise ValueError("polynomial exponent p must be positive")


def asymptotics(coeffs: AsymptoticCoefficients, energies: ConvexEnergies, delta_x: float, v):
    """Leading-order (f_infty, f_tr, Gamma) in the regime described by coeffs."""
    v = np.asarray(v, dtype=float)
    e = energies
    dx = delta_x
    if coeffs.regime == "regular_large_v":
        f_inf = e.ancilla_gap * coeffs.phi_A1 / v
        f_tr = (e.system_gap * coeffs.phi_S1 + e.ancilla_target_drift * coeffs.phi_A1) / v
        gamma = np.full_like(v, coeffs.phi_S1)
    elif coeffs.regime == "jump_large_v":
        f_inf = np.full_like(v, e.ancilla_gap * coeffs.F_A / dx)
        f_tr = np.full_like(v, (e.system_gap * coeffs.F_S + e.ancilla_target_drift * coeffs.F_A) / dx)
        with np.errstate(divide="ignore"):
            gamma = -np.log1p(-coeffs.F_S) * v / dx
    elif coeffs.regime == "saturating_small_v":
        f_inf = np.full_like(v, e.ancilla_gap * coeffs.f_A / dx)
        f_tr = np.full_like(v, (e.system_gap * coeffs.f_S + e.ancilla_target_drift * coeffs.f_A) / dx)
        gamma = np.zeros_like(v)
    else:
        p = coeffs.p
        scale = v**p / dx ** (p + 1)
        f_inf = e.ancilla_gap * coeffs.phi_Ap * scale
        f_tr = (e.system_gap * coeffs.phi_Sp + e.ancilla_target_drift * coeffs.phi_Ap) * scale
        gamma = coeffs.phi_Sp * v ** (p + 1) / dx ** (p + 1)
    return FrictionDecomposition(f_inf[()], f_tr[()], gamma[()], v[()])
