"""collfric command line: sweeps, trajectories, Zeno analysis, kinematics.

Exit codes: 0 success, 2 bad config or unwritable output, 3 a numerical
invariant failed during the run.
"""
from __future__ import annotations

import argparse
import io
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from importlib import resources

import numpy as np

from . import config as cfgmod
from . import convex
from .collision import friction_series, run_trajectory, zeno_critical_speed, zeno_leading_coefficient
from .constants import AMU, C_LIGHT, KM_PER_S, NM, NN
from .errors import ConfigError, InvariantViolation
from .models import (DampedSwapParams, EntangleDisentangleParams, build_convex_spec,
                     damped_swap_friction, ed_friction)
from .oracle import numeric_zeno_limit

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3
FIGURES = (3, 4, 5, 6)
SWEEP_WORKERS = 4


def fmt(x) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def write_csv(stream, header, rows, comments=()):
    for c in comments:
        stream.write(f"# {c}\n")
    stream.write(",".join(header) + "\n")
    for row in rows:
        stream.write(",".join(fmt(x) for x in row) + "\n")


def shipped_config(name: str) -> dict:
    path = resources.files("collfric") / "figures" / name
    with resources.as_file(path) as p:
        return cfgmod.load(p)


# -- sweep --------------------------------------------------------------------

def _decomposition(params, v):
    if isinstance(params, DampedSwapParams):
        return damped_swap_friction(params, v)
    return ed_friction(params, v)


def _sweep_chunk(params, v, t):
    dec = _decomposition(params, v)
    cols = [v, np.broadcast_to(dec.f_infty, v.shape), np.broadcast_to(dec.f_tr, v.shape),
            np.broadcast_to(dec.gamma, v.shape)]
    cols += [np.broadcast_to(dec.at_time(tk), v.shape) for tk in t]
    return np.column_stack(cols)


def sweep_table(cfg: dict):
    """(header, rows, comments) of a velocity sweep."""
    params = cfgmod.model_params(cfg)
    if not isinstance(params, (DampedSwapParams, EntangleDisentangleParams)):
        raise ConfigError("sweep needs a closed-form model (damped_swap or entangle_disentangle); "
                          "use 'trajectory' or 'zeno' for generic_hamiltonian")
    v = cfgmod.velocity_grid(cfg)
    t = cfgmod.times(cfg)
    header = ["v_m_per_s", "f_infty_N", "f_tr_N", "gamma_per_s"]
    # labels from the configured values, not the SI round trip
    header += [f"f_at_{float(tk):g}fs_N" for tk in cfg.get("times_fs", [])]
    chunks = np.array_split(v, min(SWEEP_WORKERS, len(v)))
    with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
        # map preserves grid order whatever the completion order
        parts = list(pool.map(lambda c: _sweep_chunk(params, c, t), chunks))
    rows = np.vstack(parts)
    return header, rows, _comments(cfg, params)


def _comments(cfg, params):
    out = [f"model: {cfg['model']}"]
    if isinstance(params, DampedSwapParams):
        if params.coupling == "fixed":
            w = params.damped_frequency()
            kind = "underdamped" if w.imag == 0 and w.real > 0 else "not underdamped"
            out.append(f"derived damped frequency omega = sqrt(J^2 - gamma_A^2) = "
                       f"{fmt(abs(w) / 1e12)} THz ({kind})")
        else:
            out.append(f"critical damping speed gamma_A/k = {fmt(params.characteristic_speed())} m/s")
    return out


# -- trajectory ---------------------------------------------------------------

TRAJECTORY_HEADER = ["n", "t_s", "f_n_N", "E_S_J", "delta_E_S_J", "delta_E_A_J", "delta_W_J"]


def trajectory_table(cfg: dict):
    params = cfgmod.model_params(cfg)
    v, N = cfgmod.trajectory_settings(cfg)
    if isinstance(params, cfgmod.GenericModel):
        records = run_trajectory(params.spec, params.rho_S, v, N)
        d_e_s = np.array([r.dE_S for r in records])
        d_e_a = np.array([r.dE_A for r in records])
        e_s0 = float(np.einsum("ij,ji->", params.spec.H_S, params.rho_S).real)
        dx = params.spec.delta_x
        f = friction_series(records)
    else:
        spec = build_convex_spec(params)
        steps = np.array([convex.energy_steps(spec, v, n) for n in range(N)])
        d_e_s, d_e_a = steps[:, 0], steps[:, 1]
        e_s0 = spec.energies.E_S0
        dx = spec.delta_x
        f = (d_e_s + d_e_a) / dx
    d_w = -(d_e_s + d_e_a)
    n = np.arange(N)
    rows = np.column_stack([n, n * dx / v, f, e_s0 + np.cumsum(d_e_s), d_e_s, d_e_a, d_w])
    return TRAJECTORY_HEADER, rows, [f"model: {cfg['model']}", f"v = {fmt(v)} m/s"]


def _write_trajectory(stream, header, rows, comments):
    for c in comments:
        stream.write(f"# {c}\n")
    stream.write(",".join(header) + "\n")
    for row in rows:
        stream.write(",".join([str(int(row[0]))] + [fmt(x) for x in row[1:]]) + "\n")


# -- zeno ---------------------------------------------------------------------

@dataclass(frozen=True)
class ZenoSummary:
    critical_speed: float
    fraction_of_c: float
    leading_coefficient: float | None
    ladder: object | None


def zeno_summary(cfg: dict, radius=None, energy=None, with_ladder=True) -> ZenoSummary:
    z = cfgmod.zeno_settings(cfg)
    r = z["radius"] if radius is None else radius
    e = z["energy"] if energy is None else energy
    try:
        v_c = zeno_critical_speed(r, e)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    coeff = ladder = None
    if "model" in cfg:
        model = cfgmod.model_params(cfg)
        if not isinstance(model, cfgmod.GenericModel):
            raise ConfigError("zeno needs a generic_hamiltonian model")
        try:
            coeff = zeno_leading_coefficient(model.spec, model.rho_S)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if with_ladder:
            v_char = model.spec.characteristic_speed()
            if not v_char > 0:
                raise ConfigError("model has no dynamics (characteristic speed is zero)")
            top = z["ladder_top"] * v_char
            k = np.arange(z["ladder_points"])[::-1]
            ladder = numeric_zeno_limit(model.spec, model.rho_S, top / z["ladder_ratio"] ** k)
    return ZenoSummary(v_c, v_c / C_LIGHT, coeff, ladder)


def _zeno_report(s: ZenoSummary) -> str:
    lines = [
        f"zeno_critical_speed_m_per_s: {fmt(s.critical_speed)}",
        f"zeno_critical_speed_km_per_s: {s.critical_speed / KM_PER_S:.4g}",
        f"fraction_of_light_speed: {s.fraction_of_c:.4g}",
    ]
    if s.leading_coefficient is not None:
        lines.append(f"leading_coefficient_W: {fmt(s.leading_coefficient)}")
    if s.ladder is not None:
        est = s.ladder.estimate
        lines.append(f"ladder_estimate_W: {fmt(est)}")
        diff = abs(est - s.leading_coefficient)
        scale = float(np.max(np.abs(s.ladder.scaled_friction)))
        lines.append(f"ladder_abs_difference_W: {fmt(diff)}")
        lines.append(f"ladder_rel_difference: {fmt(diff / scale) if scale > 0 else '0'}")
        lines.append(f"ladder_converged: {str(s.ladder.converged).lower()}")
        if s.ladder.note:
            lines.append(f"note: {s.ladder.note}")
    return "\n".join(lines) + "\n"


# -- kinematics ---------------------------------------------------------------

@dataclass(frozen=True)
class Kinematics:
    acceleration: float
    stopping_time: float
    stopping_distance: float
    radii_crossed: float


def kinematics(force: float, mass: float, v0: float, radius: float) -> Kinematics:
    """Constant deceleration a = F/m from v0: t = v0/a, d = v0^2/(2a)."""
    if force < 0 or not mass > 0 or v0 < 0 or not radius > 0:
        raise ConfigError("kinematics needs force >= 0, mass > 0, v0 >= 0, radius > 0")
    a = force / mass
    if a == 0:
        return Kinematics(0.0, math.inf, math.inf, math.inf)
    t = v0 / a
    d = v0 * v0 / (2 * a)
    return Kinematics(a, t, d, d / radius)


# -- plumbing -----------------------------------------------------------------

def _open_out(path):
    if path is None or path == "-":
        return None
    try:
        return open(path, "w", encoding="utf-8", newline="\n")
    except OSError as exc:
        raise ConfigError(f"cannot write {path}: {exc}") from exc


def _emit(text: str, path):
    fh = _open_out(path)
    if fh is None:
        sys.stdout.write(text)
        return
    with fh:
        fh.write(text)


def _config_for(args, default_name=None):
    if args.config is not None:
        raw = cfgmod.load(args.config)
    elif default_name is not None:
        raw = shipped_config(default_name)
    else:
        raise ConfigError(f"'{args.command}' needs --config")
    return cfgmod.normalize(raw)


def _output_path(args, cfg):
    return args.out if args.out is not None else cfg.get("output")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML run configuration")
    common.add_argument("--out", help="output path (default: the config's 'output', else stdout)")
    common.add_argument("--dump-config", action="store_true",
                        help="print the normalized configuration and exit")

    p = argparse.ArgumentParser(prog="collfric", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("sweep", parents=[common], help="friction versus speed")
    sub.add_parser("trajectory", parents=[common], help="per-interaction energies at one speed")
    z = sub.add_parser("zeno", parents=[common], help="Zeno critical speed and leading coefficient")
    z.add_argument("--radius-nm", type=float)
    z.add_argument("--energy-J", type=float)
    k = sub.add_parser("kinematics", help="stopping under a constant friction force")
    k.add_argument("--force-nN", type=float, required=True)
    k.add_argument("--mass-amu", type=float, required=True)
    k.add_argument("--v0-km-per-s", type=float, required=True)
    k.add_argument("--radius-nm", type=float, default=0.23)
    f = sub.add_parser("reproduce-figure", parents=[common], help="sweep with a shipped figure config")
    f.add_argument("figure", type=int, choices=FIGURES)
    return p


def run(args) -> int:
    if args.command == "kinematics":
        k = kinematics(args.force_nN * NN, args.mass_amu * AMU, args.v0_km_per_s * KM_PER_S,
                       args.radius_nm * NM)
        sys.stdout.write(
            f"acceleration_m_per_s2: {k.acceleration:.4g}\n"
            f"stopping_time_s: {k.stopping_time:.4g}\n"
            f"stopping_distance_m: {k.stopping_distance:.4g}\n"
            f"radii_crossed: {k.radii_crossed:.4g}\n")
        return EXIT_OK

    default = {"zeno": "zeno_nitrogen.yaml"}.get(args.command)
    if args.command == "reproduce-figure":
        if args.config is not None:
            raise ConfigError("reproduce-figure uses its shipped config; use 'sweep --config' instead")
        default = f"figure{args.figure}.yaml"
    cfg = _config_for(args, default)
    if args.dump_config:
        _emit(cfgmod.dump(cfg), args.out)
        return EXIT_OK
    out = _output_path(args, cfg)

    if args.command in ("sweep", "reproduce-figure"):
        header, rows, comments = sweep_table(cfg)
        buf = io.StringIO()
        write_csv(buf, header, rows, comments)
        _emit(buf.getvalue(), out)
    elif args.command == "trajectory":
        header, rows, comments = trajectory_table(cfg)
        buf = io.StringIO()
        _write_trajectory(buf, header, rows, comments)
        _emit(buf.getvalue(), out)
    elif args.command == "zeno":
        s = zeno_summary(cfg, radius=None if args.radius_nm is None else args.radius_nm * NM,
                         energy=args.energy_J)
        sys.stdout.write(_zeno_report(s))
        if s.ladder is not None and out is not None:
            lad = s.ladder
            buf = io.StringIO()
            write_csv(buf, ["v_m_per_s", "v_times_f0_W", "residual_W"],
                      np.column_stack([lad.speeds, lad.scaled_friction, lad.residuals]))
            _emit(buf.getvalue(), out)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return run(args)
    except ConfigError as exc:
        print(f"collfric: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InvariantViolation as exc:
        print(f"collfric: numerical invariant violated: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except BrokenPipeError:
        os._exit(EXIT_OK)


if __name__ == "__main__":
    sys.exit(main())
