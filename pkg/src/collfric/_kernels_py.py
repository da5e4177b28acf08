"""Pure numpy implementation of the collision-trajectory kernel.

Same contract as the compiled ``_kernels.collision_trajectory``; selected by
``collfric.kernels`` when the extension is not built.
"""
import numpy as np


def collision_trajectory(u, k, rho_s0, rho_a, h_s, h_a, n_steps):
    """Run ``n_steps`` collisions of a system with fresh copies of one ancilla.

    ``k = u - 1`` must be supplied separately (computed without cancellation):
    the joint change is formed as ``k rho u^dag + rho k^dag`` so energy changes
    keep full relative precision even when a collision barely moves the state.

    Returns ``(states, d_e_s, d_e_a, herm_dev)`` where ``states[n]`` is the
    system state after collision ``n``, ``d_e_s[n]``/``d_e_a[n]`` the local
    energy changes and ``herm_dev`` the largest anti-Hermitian residue seen
    before re-symmetrisation.
    """
    ds = rho_s0.shape[0]
    da = rho_a.shape[0]
    u_dag = u.conj().T
    k_dag = k.conj().T
    states = np.empty((n_steps, ds, ds), dtype=complex)
    d_e_s = np.empty(n_steps)
    d_e_a = np.empty(n_steps)
    herm_dev = 0.0
    rs = np.array(rho_s0, dtype=complex)
    for n in range(n_steps):
        joint = np.kron(rs, rho_a)
        delta = (k @ joint @ u_dag + joint @ k_dag).reshape(ds, da, ds, da)
        ds_s = np.einsum("ijkj->ik", delta)
        ds_a = np.einsum("ijil->jl", delta)
        herm_dev = max(herm_dev, float(np.max(np.abs(ds_s - ds_s.conj().T))))
        ds_s = 0.5 * (ds_s + ds_s.conj().T)
        ds_a = 0.5 * (ds_a + ds_a.conj().T)
        d_e_s[n] = np.einsum("ij,ji->", h_s, ds_s).real
        d_e_a[n] = np.einsum("ij,ji->", h_a, ds_a).real
        rs = rs + ds_s
        states[n] = rs
    return states, d_e_s, d_e_a, herm_dev
