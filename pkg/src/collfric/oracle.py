"""Brute-force validators for the analytic modules.

The swap oracle evolves the full two-qubit state with the joint unitary and
reads energies off the reduced states. It deliberately uses nothing from
``convex`` or ``collision``; only the ``quantum`` primitives are shared.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import quantum as qc
from .errors import InvariantViolation
from .collision import CollisionSpec, collide_once, zeno_leading_coefficient


@dataclass(frozen=True)
class ComparisonReport:
    max_abs_error: float
    max_rel_error: float
    n_points: int
    worst_case: str
    state_max_abs_error: float = 0.0

    def passed(self, rel_tol: float) -> bool:
        return self.max_rel_error <= rel_tol


@dataclass(frozen=True)
class BruteForceTrajectory:
    friction: np.ndarray
    system_states: np.ndarray
    dE_S: np.ndarray
    dE_A: np.ndarray
    max_trace_error: float
    max_purity_error: float


def brute_force_swap_trajectory(system: qc.QubitThermalState, ancilla: qc.QubitThermalState,
                                J: float, delta_x: float, v: float, N: int,
                                gamma_A: float = 0.0) -> BruteForceTrajectory:
    """Friction series f_0..f_{N-1} of the undamped partial swap, by brute force.

    Each collision applies exp(-i hbar J U_sw dt / hbar) to rho_S (x) rho_A(0);
    H_S and H_A enter only through the energy bookkeeping.
    """
    if gamma_A != 0:
        raise ValueError("the unitary oracle has no dissipation channel (gamma_A must be 0)")
    if not v > 0:
        raise ValueError("speed must be positive")
    if N < 1:
        raise ValueError("need at least one interaction")
    dt = delta_x / v
    h_sw = qc.swap_hamiltonian(J)
    u = qc.check_unitary(qc.unitary_from_hamiltonian(h_sw, dt))
    k = qc.unitary_increment(h_sw, dt)
    h_s, h_a = system.hamiltonian(), ancilla.hamiltonian()
    rho_a = ancilla.density_matrix()
    rho_s = system.density_matrix()

    friction = np.empty(N)
    d_e_s = np.empty(N)
    d_e_a = np.empty(N)
    states = np.empty((N, 2, 2), dtype=complex)
    u_dag, k_dag = u.conj().T, k.conj().T
    trace_err = purity_err = 0.0
    for n in range(N):
        joint = np.multiply.outer(rho_s, rho_a).transpose(0, 2, 1, 3).reshape(4, 4)
        # U rho U^dag - rho, formed from U - 1 so that tiny changes keep
        # their relative precision at high speed
        change = k @ joint @ u_dag + joint @ k_dag
        if np.max(np.abs(change - change.conj().T)) > 1e-12:
            raise InvariantViolation("joint state change lost Hermiticity")
        change = 0.5 * (change + change.conj().T)
        after = joint + change
        trace_err = max(trace_err, abs(np.trace(after).real - 1.0))
        # Tr(X^2) = sum |X_ij|^2 for Hermitian X
        purity_err = max(purity_err, abs(np.vdot(after, after).real - np.vdot(joint, joint).real))
        t = change.reshape(2, 2, 2, 2)
        change_s = np.einsum("ijkj->ik", t)
        change_a = np.einsum("ijil->jl", t)
        d_e_s[n] = np.einsum("ij,ji->", h_s, change_s).real
        d_e_a[n] = np.einsum("ij,ji->", h_a, change_a).real
        friction[n] = (d_e_s[n] + d_e_a[n]) / delta_x
        rho_s = rho_s + change_s
        states[n] = rho_s
    return BruteForceTrajectory(friction, states, d_e_s, d_e_a, trace_err, purity_err)


def compare_convex_vs_brute(params, v: float, N: int) -> ComparisonReport:
    """Convex closed form f_infty + f_tr*phi^n against the brute-force oracle.

    Relative errors are normalised by the largest |f_n| of the oracle series,
    so interactions where the friction has decayed to ~0 do not dominate.
    """
    from .convex import friction_decomposition
    from .models import build_convex_spec

    if params.gamma_A != 0 or params.coupling != "fixed":
        raise ValueError("comparison needs the undamped fixed-coupling swap")
    brute = brute_force_swap_trajectory(params.system, params.ancilla, params.J,
                                        params.delta_x, v, N)
    spec = build_convex_spec(params)
    dec = friction_decomposition(spec, v)
    n = np.arange(N)
    analytic = dec.at(n)
    diff = np.abs(analytic - brute.friction)
    scale = float(np.max(np.abs(brute.friction)))
    dt = params.delta_x / v
    w = float(spec.phi_S(dt)) ** (n + 1.0)
    predicted = (w[:, None, None] * spec.rho_S_init
                 + (1 - w)[:, None, None] * spec.rho_S_target)
    state_err = float(np.max(np.abs(predicted - brute.system_states)))
    worst = int(np.argmax(diff))
    rel = float(diff[worst] / scale) if scale > 0 else float(diff[worst] > 0) * np.inf
    return ComparisonReport(
        max_abs_error=float(diff[worst]),
        max_rel_error=rel if np.isfinite(rel) else float("inf"),
        n_points=N,
        worst_case=(f"n={worst}, v={v:.6g} m/s, a_S={params.system.a:.6g}, "
                    f"a_A={params.ancilla.a:.6g}, J={params.J:.6g}"),
        state_max_abs_error=state_err,
    )


def richardson(values, ratio: float = 2.0, order: int = 2):
    """Richardson table for g(h) = L + c1 h + c2 h^2 + ..., with h shrinking by ``ratio``.

    Returns the list of extrapolation levels; ``levels[-1][-1]`` is the best
    estimate.
    """
    levels = [np.asarray(values, dtype=float)]
    for k in range(1, order + 1):
        prev = levels[-1]
        if prev.size < 2:
            break
        f = ratio**k
        levels.append((f * prev[1:] - prev[:-1]) / (f - 1))
    return levels


@dataclass(frozen=True)
class ZenoLadderReport:
    estimate: float
    speeds: np.ndarray
    scaled_friction: np.ndarray  # v * f_0
    residuals: np.ndarray  # |v f_0 - estimate|
    shrink_ratios: np.ndarray
    converged: bool
    note: str = ""


def numeric_zeno_limit(spec: CollisionSpec, rho_S, v_ladder, order: int = 2) -> ZenoLadderReport:
    """Estimate lim v*f_0 from single collisions on a geometric speed ladder."""
    v = np.asarray(v_ladder, dtype=float)
    if v.ndim != 1 or v.size < order + 2:
        raise ValueError(f"need at least {order + 2} ladder speeds")
    ratios = v[1:] / v[:-1]
    ratio = float(ratios[0])
    if not ratio > 1 or not np.allclose(ratios, ratio, rtol=1e-9):
        raise ValueError("speed ladder must be geometric and increasing")
    if spec.coupling_mode != "fixed":
        raise ValueError("Zeno limit needs a velocity-independent generator")
    v_zeno = spec.characteristic_speed()
    if v[-1] < 1e3 * v_zeno:
        raise ValueError(f"ladder must reach 1e3 x the Zeno speed ({v_zeno:.3g} m/s)")

    g = np.array([vi * collide_once(spec, rho_S, vi).f_n for vi in v])
    levels = richardson(g, ratio, order)
    estimate = float(levels[-1][-1])
    residuals = np.abs(g - estimate)
    # energy changes are differences of O(|H|) numbers, so v*f_0 carries an
    # absolute roundoff of about eps*|H|*v/delta_x
    floor = 1e3 * np.finfo(float).eps * np.linalg.norm(spec.hamiltonian(), 2) * v / spec.delta_x
    with np.errstate(divide="ignore", invalid="ignore"):
        shrink = residuals[:-1] / residuals[1:]
    above = residuals[:-1] > floor[:-1]
    converged = bool(np.all(shrink[above] > 1.0)) if np.any(above) else True
    note = "" if converged else "residuals are not shrinking along the ladder"
    return ZenoLadderReport(estimate, v, g, residuals, shrink, converged, note)


def zeno_check(spec: CollisionSpec, rho_S, v_ladder) -> ComparisonReport:
    """Commutator coefficient against the numerical ladder limit."""
    report = numeric_zeno_limit(spec, rho_S, v_ladder)
    exact = zeno_leading_coefficient(spec, rho_S)
    err = abs(report.estimate - exact)
    scale = max(abs(exact), float(np.max(np.abs(report.scaled_friction))))
    return ComparisonReport(err, err / scale if scale > 0 else 0.0, len(report.speeds),
                            f"ladder {report.speeds[0]:.3g}..{report.speeds[-1]:.3g} m/s")
