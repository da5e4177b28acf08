# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled collision-trajectory kernel (see ``_kernels_py`` for the contract)."""
import numpy as np

cdef extern from "complex.h" nogil:
    double complex conj(double complex)
    double cabs(double complex)
    double creal(double complex)


cdef double _energy(const double complex[:, ::1] h, double complex[:, ::1] rho) noexcept nogil:
    cdef Py_ssize_t i, k, d = h.shape[0]
    cdef double complex acc = 0
    for i in range(d):
        for k in range(d):
            acc = acc + h[i, k] * rho[k, i]
    return creal(acc)


def collision_trajectory(u, k, rho_s0, rho_a, h_s, h_a, Py_ssize_t n_steps):
    cdef const double complex[:, ::1] U = np.ascontiguousarray(u, dtype=np.complex128)
    cdef const double complex[:, ::1] K = np.ascontiguousarray(k, dtype=np.complex128)
    cdef const double complex[:, ::1] RA = np.ascontiguousarray(rho_a, dtype=np.complex128)
    cdef const double complex[:, ::1] HS = np.ascontiguousarray(h_s, dtype=np.complex128)
    cdef const double complex[:, ::1] HA = np.ascontiguousarray(h_a, dtype=np.complex128)
    cdef Py_ssize_t ds = rho_s0.shape[0], da = RA.shape[0], D = ds * da
    cdef double complex[:, ::1] rs = np.array(rho_s0, dtype=np.complex128, order="C")
    cdef double complex[:, ::1] ds_s = np.empty((ds, ds), dtype=np.complex128)
    cdef double complex[:, ::1] ds_a = np.empty((da, da), dtype=np.complex128)
    cdef double complex[:, ::1] joint = np.empty((D, D), dtype=np.complex128)
    cdef double complex[:, ::1] tmp = np.empty((D, D), dtype=np.complex128)
    cdef double complex[:, ::1] delta = np.empty((D, D), dtype=np.complex128)

    states_arr = np.empty((n_steps, ds, ds), dtype=np.complex128)
    d_e_s_arr = np.empty(n_steps, dtype=np.float64)
    d_e_a_arr = np.empty(n_steps, dtype=np.float64)
    cdef double complex[:, :, ::1] states = states_arr
    cdef double[::1] d_e_s = d_e_s_arr
    cdef double[::1] d_e_a = d_e_a_arr

    cdef Py_ssize_t n, a, b, c, i, j, m, l
    cdef double complex acc, x, y
    cdef double herm_dev = 0.0, dev

    with nogil:
        for n in range(n_steps):
            for i in range(ds):
                for j in range(da):
                    for m in range(ds):
                        for l in range(da):
                            joint[i * da + j, m * da + l] = rs[i, m] * RA[j, l]
            # delta = K rho U^dag + rho K^dag
            for a in range(D):
                for b in range(D):
                    acc = 0
                    for c in range(D):
                        acc = acc + K[a, c] * joint[c, b]
                    tmp[a, b] = acc
            for a in range(D):
                for b in range(D):
                    acc = 0
                    for c in range(D):
                        acc = acc + tmp[a, c] * conj(U[b, c]) + joint[a, c] * conj(K[b, c])
                    delta[a, b] = acc
            for i in range(ds):
                for m in range(ds):
                    acc = 0
                    for j in range(da):
                        acc = acc + delta[i * da + j, m * da + j]
                    ds_s[i, m] = acc
            for j in range(da):
                for l in range(da):
                    acc = 0
                    for i in range(ds):
                        acc = acc + delta[i * da + j, i * da + l]
                    ds_a[j, l] = acc
            for i in range(ds):
                for m in range(i, ds):
                    x = ds_s[i, m]
                    y = conj(ds_s[m, i])
                    dev = cabs(x - y)
                    if dev > herm_dev:
                        herm_dev = dev
                    ds_s[i, m] = 0.5 * (x + y)
                    ds_s[m, i] = conj(ds_s[i, m])
            for j in range(da):
                for l in range(j, da):
                    x = 0.5 * (ds_a[j, l] + conj(ds_a[l, j]))
                    ds_a[j, l] = x
                    ds_a[l, j] = conj(x)
            d_e_s[n] = _energy(HS, ds_s)
            d_e_a[n] = _energy(HA, ds_a)
            for i in range(ds):
                for m in range(ds):
                    rs[i, m] = rs[i, m] + ds_s[i, m]
                    states[n, i, m] = rs[i, m]
    return states_arr, d_e_s_arr, d_e_a_arr, herm_dev
