"""Acceptance criteria, one PASS/FAIL line each.

Run under pytest (lines are printed even with output capture on) or directly:
``python3 tests/test_acceptance.py``.
"""
from __future__ import annotations

import io
import time
from contextlib import redirect_stdout

import numpy as np
import pytest

from collfric import cli
from collfric import quantum as qc
from collfric.constants import AMU, EV, HBAR, KM_PER_S, MEV, NM, NN, THZ
from collfric.convex import ConvexModelSpec, direct_friction, friction_at, friction_decomposition
from collfric.models import (DampedSwapParams, EntangleDisentangleParams, damped_swap_friction,
                             damped_swap_limits, damped_swap_retentions, ed_friction)
from collfric.oracle import compare_convex_vs_brute


class Result:
    def __init__(self, number, title, passed, detail, seconds, budget=None):
        self.number, self.title, self.passed = number, title, passed
        self.detail, self.seconds, self.budget = detail, seconds, budget

    @property
    def ok(self):
        return self.passed and (self.budget is None or self.seconds < self.budget)

    def line(self):
        limit = "" if self.budget is None else f" (limit {self.budget:g} s)"
        return (f"[{'PASS' if self.ok else 'FAIL'}] {self.number:2d}. {self.title}: "
                f"{self.detail}; {self.seconds:.3f} s{limit}")


def timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def fig3_params(gamma_thz=16.0):
    return DampedSwapParams(qc.QubitThermalState(0.0, 0.6 * EV / HBAR),
                            qc.QubitThermalState(1.0, 1.2 * EV / HBAR),
                            0.2 * NM, gamma_thz * THZ, J=60 * MEV / HBAR)


def fig5_params():
    return DampedSwapParams(qc.QubitThermalState(-1.0, 1.2 * EV / HBAR),
                            qc.QubitThermalState(0.0, 0.6 * EV / HBAR),
                            0.2 * NM, 165 * THZ, k=55 / NM)


def run_cli(argv):
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = cli.main(argv)
    return code, buf.getvalue()


def parse_csv(text):
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    return np.array([[float(x) for x in ln.split(",")] for ln in lines[1:]])


# -- criteria -----------------------------------------------------------------

def criterion_1():
    cli.shipped_config("zeno_nitrogen.yaml")  # warm the resource loader
    (code, out), dt = timed(lambda: run_cli(["zeno"]))
    report = dict(line.split(": ", 1) for line in out.strip().splitlines())
    v = float(report["zeno_critical_speed_m_per_s"])
    rel = abs(v - 43e3) / 43e3
    return Result(1, "Zeno critical speed", code == 0 and rel <= 0.02,
                  f"2rE/hbar = {v / KM_PER_S:.2f} km/s, {100 * rel:.2f}% from 43 km/s (tol 2%)", dt, 0.1)


def criterion_2():
    k, dt = timed(lambda: cli.kinematics(0.1 * NN, 14 * AMU, 10 * KM_PER_S, 0.23 * NM))
    checks = {
        "a": (k.acceleration, 4.3e15, 0.01),
        "t_stop": (k.stopping_time, 2.3e-12, 0.02),
        "d_stop": (k.stopping_distance, 11e-9, 0.05),
    }
    parts, ok = [], True
    for name, (got, ref, tol) in checks.items():
        rel = abs(got - ref) / ref
        ok &= rel <= tol
        parts.append(f"{name} {got:.4g} ({100 * rel:.2f}% vs tol {100 * tol:g}%)")
    radii_ok = abs(k.radii_crossed - 50) <= 1.0
    ok &= radii_ok
    parts.append(f"radii {k.radii_crossed:.1f}")
    return Result(2, "Kinematics reference", ok, ", ".join(parts), dt, 0.1)


def criterion_3():
    def work():
        rng = np.random.default_rng(3)
        worst = None
        for _ in range(20):
            p = DampedSwapParams(
                qc.QubitThermalState(float(rng.uniform(-1, 1)), float(rng.uniform(0.1, 1.5)) * EV / HBAR),
                qc.QubitThermalState(float(rng.uniform(-1, 1)), float(rng.uniform(0.1, 1.5)) * EV / HBAR),
                float(rng.uniform(0.1, 0.5)) * NM, 0.0, J=float(rng.uniform(10, 100)) * MEV / HBAR)
            for v in np.geomspace(1e1, 1e8, 10):
                rep = compare_convex_vs_brute(p, v, 100)
                if worst is None or rep.max_rel_error > worst.max_rel_error:
                    worst = rep
        return worst

    worst, dt = timed(work)
    return Result(3, "Oracle equivalence (undamped swap)", worst.max_rel_error <= 1e-10,
                  f"max rel error {worst.max_rel_error:.2e} over 20 x 10 x 100 (tol 1e-10) at "
                  f"{worst.worst_case}", dt, 2.0)


def criterion_4():
    def work():
        rng = np.random.default_rng(4)
        worst = 0.0
        n = np.arange(51)
        for _ in range(200):
            w = rng.uniform(0.1, 1.5, size=2) * EV / HBAR
            st = [qc.QubitThermalState(x).density_matrix() for x in rng.uniform(-1, 1, size=5)]
            spec = ConvexModelSpec(float(rng.uniform(0.01, 1)), float(rng.uniform(0.01, 1)),
                                   float(rng.uniform(0.1, 1)) * NM, *st,
                                   H_S=HBAR * w[0] * qc.SIGMA_Z, H_A=HBAR * w[1] * qc.SIGMA_Z)
            v = 10 ** rng.uniform(1, 7)
            scale = sum(spec.energies.bounds(spec.delta_x))
            fast = friction_at(spec, v, n)
            direct = np.array([direct_friction(spec, v, int(k)) for k in n])
            worst = max(worst, float(np.max(np.abs(fast - direct))) / scale)
        return worst

    worst, dt = timed(work)
    return Result(4, "Decomposition exactness", worst <= 1e-12,
                  f"max rel deviation {worst:.2e} over 200 specs, n <= 50 (tol 1e-12)", dt, 1.0)


def criterion_5():
    def work():
        p = fig3_params()
        target = HBAR * p.J**2 * p.delta_x * abs(p.system.omega - p.ancilla.omega) * abs(
            p.ancilla.a - p.system.a)
        v0 = 100 * p.characteristic_speed()
        v = v0 * 2.0 ** np.arange(4)
        scaled = np.abs(damped_swap_friction(p, v).f_tr) * v**2
        resid = np.abs(scaled - target)
        lim = damped_swap_limits(p, "large_v")
        return target, scaled, resid, lim

    (target, scaled, resid, lim), dt = timed(work)
    rel = abs(scaled[0] - target) / target
    shrink = resid[:-1] / resid[1:]
    ok = rel <= 0.01 and np.all(shrink >= 1.9) and abs(abs(lim.f_tr_coeff) - target) <= 1e-12 * target
    return Result(5, "Zeno scaling law", bool(ok),
                  f"|f_tr| v^2 within {100 * rel:.3f}% at 100x Zeno speed (tol 1%), residual shrink "
                  f"per doubling {', '.join(f'{s:.2f}' for s in shrink)} (need >= 1.9)", dt, 1.0)


def criterion_6():
    def work():
        out = []
        for gamma in (16.0, 120.0):  # under- and overdamped with hbar J = 60 meV
            p = fig3_params(gamma)
            v = 1e-6 * p.characteristic_speed()
            d = damped_swap_friction(p, v)
            f_ref = HBAR * p.system.omega / p.delta_x * (p.ancilla.a - p.system.a)
            g, J = p.gamma_A, p.J
            g_ref = 2 * g if g <= J else 2 * g - 2 * np.sqrt(g * g - J * J)
            out.append((gamma, abs(d.f_tr - f_ref) / abs(f_ref), abs(d.gamma - g_ref) / g_ref))
        return out

    res, dt = timed(work)
    ok = all(ef <= 5e-3 and eg <= 5e-3 for _, ef, eg in res)
    detail = "; ".join(f"gamma_A={g:g} THz: f_tr {100 * ef:.3g}%, Gamma {100 * eg:.3g}%"
                       for g, ef, eg in res)
    return Result(6, "Small-v limits", ok, detail + " (tol 0.5%)", dt)


def criterion_7():
    def work():
        p = fig5_params()
        target = p.k**2 * HBAR * p.system.omega * (p.ancilla.a - p.system.a) / p.gamma_A
        v = np.array([1e-2, 1e-4, 1e-6]) * p.characteristic_speed()
        ratio = damped_swap_friction(p, v).f_tr / v
        return np.abs(ratio - target) / abs(target)

    rel, dt = timed(work)
    ok = rel[-1] <= 0.01 and np.all(np.diff(rel) < 0)
    return Result(7, "Velocity-scaled linear law", bool(ok),
                  "f_tr/v vs k^2 hbar w_S (a_A-a_S)/gamma_A: "
                  + ", ".join(f"{100 * r:.3g}% at {s:g} v_c" for r, s in zip(rel, (1e-2, 1e-4, 1e-6)))
                  + " (tol 1%, shrinking)", dt)


def criterion_8():
    def work():
        rng = np.random.default_rng(8)
        v = np.geomspace(1.0, 1e8, 25)
        a_ok = True
        for _ in range(100):
            w = rng.uniform(0.1, 1.5, size=2) * EV / HBAR
            st = [qc.QubitThermalState(x).density_matrix() for x in rng.uniform(-1, 1, size=5)]
            st[2] = qc.QubitThermalState(-1.0).density_matrix()
            spec = ConvexModelSpec(lambda dt, r=rng.uniform(1e12, 1e14): np.exp(-r * dt),
                                   float(rng.uniform(0, 1)), 0.2 * NM, *st,
                                   H_S=HBAR * w[0] * qc.SIGMA_Z, H_A=HBAR * w[1] * qc.SIGMA_Z)
            a_ok &= bool(np.all(friction_decomposition(spec, v).f_infty >= -1e-15))
        b_ok = True
        for _ in range(100):
            e_s0, e_st, e_a0, e_at = rng.uniform(-1, 1, 4) * EV
            coupling = {"J": 100 * THZ} if rng.random() < 0.5 else {"k": 55 / NM}
            p = EntangleDisentangleParams(float(rng.uniform(0, 0.99)), 0.2 * NM, e_s0, e_st, e_a0, e_at,
                                          **coupling)
            d = ed_friction(p, v)
            moving = (1 - p.epsilon) * np.sin(p.phase(p.delta_x / v)) ** 2 > 0
            b_ok &= bool(np.all((d.f_infty[moving] < 0) == (e_a0 > e_at)))
            b_ok &= bool(np.all((d.f_tr[moving] < 0) == (e_s0 > e_st)))
        c_ok = True
        for _ in range(100):
            a_s, a_a = rng.uniform(-1, 1, 2)
            p = DampedSwapParams(qc.QubitThermalState(a_s, 1.2 * EV / HBAR),
                                 qc.QubitThermalState(a_a, 0.6 * EV / HBAR), 0.2 * NM,
                                 float(rng.uniform(1, 200)) * THZ, J=60 * MEV / HBAR)
            f = damped_swap_friction(p, 1e-6 * p.characteristic_speed()).f_tr
            c_ok &= bool((f < 0) == (a_s > a_a))
        return a_ok, b_ok, c_ok

    (a, b, c), dt = timed(work)
    return Result(8, "Sign / anti-friction properties", a and b and c,
                  f"(a) ground ancillas f_inf >= 0: {a}; (b) E-D sign rule: {b}; "
                  f"(c) damped-swap anti-friction iff a_S > a_A: {c}", dt)


def criterion_9():
    parts, ok, slowest = [], True, 0.0
    for fig in cli.FIGURES:
        (code, out), dt = timed(lambda: run_cli(["reproduce-figure", str(fig)]))
        slowest = max(slowest, dt)
        d = parse_csv(out)
        v, f_inf, g = d[:, 0], d[:, 1], d[:, 3]
        ok &= code == 0 and dt < 5.0
        if fig == 3:
            p = fig3_params()
            w = p.damped_frequency().real
            zeros = np.array([w * p.delta_x / (np.pi * (n + 1) - np.arctan(w / p.gamma_A))
                              for n in range(60)])
            zeros = zeros[(zeros > v[0]) & (zeros < v[-1])]
            peaks = v[1:-1][(g[1:-1] > g[:-2]) & (g[1:-1] > g[2:])]
            step = np.log(v[1] / v[0])
            on_zero = all(np.min(np.abs(np.log(zeros / pk))) <= 1.01 * step for pk in peaks)
            baseline = g[v < 2 * KM_PER_S].min() / (2 * p.gamma_A)
            good = on_zero and len(peaks) >= 5 and abs(baseline - 1) < 0.02
            parts.append(f"fig3 {len(peaks)} Gamma peaks on retention zeros, floor {baseline:.3f} x 2gamma_A")
        elif fig == 4:
            i = np.argmax(f_inf)
            good = abs(f_inf[i] / NN - 0.3605) < 1e-3 and abs(v[i] / 12.73e3 - 1) < 0.01
            parts.append(f"fig4 f_inf peak {f_inf[i] / NN:.4f} nN at {v[i] / KM_PER_S:.2f} km/s")
        elif fig == 5:
            p = fig5_params()
            vc = p.characteristic_speed()
            below = v < vc
            smooth = bool(np.all(np.diff(g[below]) > 0))
            over = [np.sqrt(complex((p.k * x) ** 2 - p.gamma_A**2)).imag > 0 for x in (0.999 * vc, 1.001 * vc)]
            good = abs(vc - 3e3) < 1e-6 and smooth and over == [True, False]
            parts.append(f"fig5 critical damping at {vc / KM_PER_S:g} km/s")
        else:
            spread = float(np.ptp(f_inf) / f_inf.mean())
            good = spread < 1e-12
            parts.append(f"fig6 f_inf relative spread {spread:.1e}")
        ok &= bool(good)
    return Result(9, "Figure reproduction", ok, "; ".join(parts) + f"; slowest {slowest:.2f} s (limit 5 s each)",
                  slowest)


def criterion_10():
    def work():
        worst = 0.0
        s = qc.QubitThermalState(0.0, 1.0)
        Jdt = np.linspace(1e-6, 10.0, 20001)
        at = np.array(damped_swap_retentions(DampedSwapParams(s, s, 1.0, 1.0, J=1.0), Jdt))
        for g in (1 - 1e-6, 1 + 1e-6):
            near = np.array(damped_swap_retentions(DampedSwapParams(s, s, 1.0, g, J=1.0), Jdt))
            worst = max(worst, float(np.max(np.abs(near - at))))
        return worst

    worst, dt = timed(work)
    return Result(10, "Continuity at critical damping", worst <= 1e-5,
                  f"max |phi(J(1 +- 1e-6)) - phi(J)| = {worst:.2e} for J dt <= 10 (tol 1e-5)", dt)


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]

# Sub-clauses that cannot pass as written; the analysis is kept in the decisions
# ledger. The line is still printed as FAIL.
KNOWN_RED = {
    2: "stopping distance v0^2/(2a) = 11.62 nm is 5.7% from the quoted 11 nm (tol 5%)",
}


@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"criterion_{i}" for i in range(1, 11)])
def test_acceptance(criterion, capsys):
    res = criterion()
    with capsys.disabled():
        print("\n" + res.line())
    if res.number in KNOWN_RED:
        if res.ok:
            pytest.fail(f"criterion {res.number} now passes; drop it from KNOWN_RED")
        pytest.xfail(KNOWN_RED[res.number])
    assert res.ok, res.line()


if __name__ == "__main__":
    results = [c() for c in CRITERIA]
    for r in results:
        print(r.line())
    print(f"{sum(r.ok for r in results)}/{len(results)} criteria pass")
