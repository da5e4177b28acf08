"""Generic engine: bookkeeping, unitaries and the high-speed (Zeno) regime."""
import numpy as np
import pytest
from scipy.linalg import expm

from collfric import quantum as qc
from collfric.collision import (CollisionSpec, collide_once, friction_series, run_trajectory,
                                zeno_critical_speed, zeno_leading_coefficient)
from collfric.constants import C_LIGHT, EV, HBAR, MEV, NM
from collfric.errors import InvariantViolation
from collfric.oracle import numeric_zeno_limit

E = 0.05 * EV


def coherent_spec(coupling="fixed", generator="full"):
    return CollisionSpec(
        H_S=E * qc.SIGMA_Z, H_A=0.7 * E * qc.SIGMA_Z,
        H_SA=0.3 * E * np.kron(qc.SIGMA_X, qc.SIGMA_X),
        ancilla_initial=np.array([[0.6, 0.3j], [-0.3j, 0.4]]),
        delta_x=0.3 * NM, coupling_mode=coupling, generator=generator)


RHO_S = np.array([[0.7, 0.2 - 0.1j], [0.2 + 0.1j, 0.3]])


def test_spec_validation():
    with pytest.raises(ValueError, match="dimension"):
        CollisionSpec(qc.SIGMA_Z, qc.SIGMA_Z, np.eye(2), np.eye(2) / 2, 1e-9)
    with pytest.raises(ValueError, match="delta_x"):
        CollisionSpec(qc.SIGMA_Z, qc.SIGMA_Z, np.eye(4), np.eye(2) / 2, 0.0)
    with pytest.raises(ValueError):
        CollisionSpec(qc.SIGMA_Z, qc.SIGMA_Z, np.eye(4), np.eye(2), 1e-9)
    with pytest.raises(ValueError, match="coupling mode"):
        CollisionSpec(qc.SIGMA_Z, qc.SIGMA_Z, np.eye(4), np.eye(2) / 2, 1e-9, coupling_mode="x")


def test_spec_arrays_frozen():
    spec = coherent_spec()
    with pytest.raises(ValueError):
        spec.H_S[0, 0] = 0


@pytest.mark.parametrize("v", [1e2, 1e4, 1e6])
def test_unitary_matches_expm(v):
    spec = coherent_spec()
    ref = expm(-1j * spec.hamiltonian() * (spec.delta_x / v) / HBAR)
    u = spec.unitary(v)
    # equal up to the global phase dropped from the trace part
    phase = ref[0, 0] / u[0, 0] if abs(u[0, 0]) > 1e-3 else ref[1, 1] / u[1, 1]
    np.testing.assert_allclose(u * phase, ref, atol=1e-10)


def test_unitary_matches_trotter_at_small_step():
    spec = coherent_spec()
    v = 1e7
    dt = spec.delta_x / v
    local = np.kron(spec.H_S, np.eye(2)) + np.kron(np.eye(2), spec.H_A)
    half = expm(-1j * local * dt / (2 * HBAR))
    trotter = half @ expm(-1j * spec.H_SA * dt / HBAR) @ half
    u = spec.unitary(v)
    exact = expm(-1j * spec.hamiltonian() * dt / HBAR)
    np.testing.assert_allclose(exact, trotter, rtol=0, atol=1e-8)
    phase = exact[0, 0] / u[0, 0]
    np.testing.assert_allclose(u * phase, trotter, atol=1e-8)


def test_velocity_scaled_unitary_is_speed_independent():
    spec = coherent_spec("velocity_scaled")
    np.testing.assert_allclose(spec.unitary(10.0), spec.unitary(1e5), atol=1e-15)


def test_energy_bookkeeping_closes():
    recs = run_trajectory(coherent_spec(), RHO_S, 2e3, 40)
    for r in recs:
        assert r.dE_S + r.dE_A + r.dW == pytest.approx(0.0, abs=1e-30)
        assert -r.dW / coherent_spec().delta_x == pytest.approx(r.f_n, rel=1e-12)
        assert qc.is_density_matrix(r.system_state_after)
    assert [r.n for r in recs] == list(range(40))


def test_trajectory_threads_state():
    spec = coherent_spec()
    recs = run_trajectory(spec, RHO_S, 5e3, 3)
    again = collide_once(spec, recs[0].system_state_after, 5e3, n=1)
    assert again.f_n == pytest.approx(recs[1].f_n, rel=1e-12)
    assert again.n == 1


def test_trajectory_rejects_bad_input():
    with pytest.raises(ValueError):
        run_trajectory(coherent_spec(), RHO_S, 1e3, 0)
    with pytest.raises(ValueError):
        run_trajectory(coherent_spec(), RHO_S, -1.0, 3)
    with pytest.raises(ValueError):
        collide_once(coherent_spec(), np.eye(3) / 3, 1e3)


def test_records_are_immutable():
    rec = collide_once(coherent_spec(), RHO_S, 1e3)
    with pytest.raises(ValueError):
        rec.system_state_after[0, 0] = 1


def test_commuting_coupling_gives_no_friction():
    spec = CollisionSpec(E * qc.SIGMA_Z, E * qc.SIGMA_Z, E * np.kron(qc.SIGMA_Z, qc.SIGMA_Z),
                         np.eye(2) / 2, 0.2 * NM)
    assert zeno_leading_coefficient(spec, RHO_S) == 0.0
    assert np.allclose(friction_series(run_trajectory(spec, RHO_S, 1e3, 5)), 0.0, atol=1e-25)


def test_isotropic_diagonal_states_have_zero_leading_term():
    spec = CollisionSpec(E * qc.SIGMA_Z, 0.5 * E * qc.SIGMA_Z, qc.isotropic_coupling(20 * MEV / HBAR),
                         qc.QubitThermalState(0.5).density_matrix(), 0.2 * NM)
    rho = qc.QubitThermalState(-0.3).density_matrix()
    assert zeno_leading_coefficient(spec, rho) == pytest.approx(0.0, abs=1e-25)
    # what survives decays like 1/v^2, so v*f_0 halves per doubling
    v0 = 1e3 * spec.characteristic_speed()
    g = [v * collide_once(spec, rho, v).f_n for v in (v0, 2 * v0, 4 * v0)]
    assert g[0] / g[1] == pytest.approx(2.0, rel=1e-2)
    assert g[1] / g[2] == pytest.approx(2.0, rel=1e-2)


def test_zeno_leading_coefficient_and_decay():
    spec = coherent_spec()
    exact = zeno_leading_coefficient(spec, RHO_S)
    assert abs(exact) > 0
    scale = E * spec.delta_x / HBAR
    res = [abs(v * collide_once(spec, RHO_S, v).f_n - exact) for v in scale * np.array(
        [1e2, 2e2, 1e3, 2e3, 1e4, 2e4])]
    for a, b in zip(res[::2], res[1::2]):
        assert a / b >= 1.9


def test_zeno_ladder_agrees_with_commutator():
    spec = coherent_spec()
    v_top = 1e4 * spec.characteristic_speed()
    rep = numeric_zeno_limit(spec, RHO_S, v_top / 2.0 ** np.arange(8)[::-1])
    assert rep.converged
    assert rep.estimate == pytest.approx(zeno_leading_coefficient(spec, RHO_S), rel=1e-6)


def test_zeno_needs_fixed_coupling():
    with pytest.raises(ValueError):
        zeno_leading_coefficient(coherent_spec("velocity_scaled"), RHO_S)


def test_velocity_scaled_friction_tends_to_constant():
    spec = coherent_spec("velocity_scaled")
    f = [collide_once(spec, RHO_S, v).f_n for v in (1e3, 1e5, 1e7)]
    assert f[0] != 0
    assert f[0] == pytest.approx(f[2], rel=1e-12)


def test_zeno_critical_speed_nitrogen():
    v = zeno_critical_speed(0.23 * NM, 1e-20)
    assert v == pytest.approx(2 * 0.23e-9 * 1e-20 / HBAR)
    assert v == pytest.approx(43e3, rel=0.02)
    # the quoted 1.5e-4 c is a two-digit rounding of v/c = 1.455e-4
    assert f"{v / C_LIGHT:.2g}" == "0.00015"
    with pytest.raises(ValueError):
        zeno_critical_speed(0, 1e-20)
    with pytest.raises(ValueError):
        zeno_critical_speed(1e-10, -1)


def test_hermiticity_loss_is_reported(monkeypatch):
    from collfric import collision, kernels

    def broken(*args):
        states, des, dea, _ = kernels.BACKENDS["python"](*args)
        return states, des, dea, 1e-6

    monkeypatch.setattr(collision.kernels, "collision_trajectory", broken)
    with pytest.raises(InvariantViolation):
        run_trajectory(coherent_spec(), RHO_S, 1e3, 2)
