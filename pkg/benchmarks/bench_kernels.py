"""Time the collision-trajectory kernel on each available backend.

    python3 benchmarks/bench_kernels.py [--steps 2000 --repeat 5]

Prints the best-of-repeat wall time per backend and the speedup of the
compiled kernel over the numpy fallback, for a few system/ancilla sizes.
"""
import argparse
import timeit

import numpy as np

from collfric import kernels
from collfric import quantum as qc


def problem(ds, da, seed=0):
    rng = np.random.default_rng(seed)
    h = qc.random_density_matrix(ds * da, rng) - 0.5 * np.eye(ds * da)
    h = 0.5 * (h + h.conj().T)
    u = qc.unitary_from_hamiltonian(h, 0.3, hbar=1.0)
    k = qc.unitary_increment(h, 0.3, hbar=1.0)
    h_s = np.diag(np.arange(ds, dtype=float)).astype(complex)
    h_a = np.diag(np.arange(da, dtype=float)).astype(complex)
    return (u, k, qc.random_density_matrix(ds, rng), qc.random_density_matrix(da, rng), h_s, h_a)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    names = sorted(kernels.BACKENDS)
    print(f"default backend: {kernels.BACKEND}; steps per run: {args.steps}")
    print(f"{'dims':>6} " + " ".join(f"{n + ' (ms)':>14}" for n in names) + f" {'speedup':>8}")
    for ds, da in ((2, 2), (3, 2), (4, 4)):
        args_ = problem(ds, da)
        best = {}
        for name in names:
            fn = kernels.BACKENDS[name]
            best[name] = min(timeit.repeat(lambda: fn(*args_, args.steps), number=1,
                                           repeat=args.repeat))
        ref = kernels.BACKENDS["python"](*args_, 50)
        for name in names:
            got = kernels.BACKENDS[name](*args_, 50)
            assert np.allclose(got[1], ref[1], rtol=1e-10, atol=1e-14), name
        speedup = best["python"] / best["cython"] if "cython" in best else float("nan")
        cells = " ".join(f"{1e3 * best[n]:14.2f}" for n in names)
        print(f"{ds}x{da:<4} {cells} {speedup:8.1f}")


if __name__ == "__main__":
    main()
