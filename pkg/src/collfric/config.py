"""YAML run configurations with unit-suffixed keys.

Every physical quantity carries its unit in the key name (``delta_x_nm``,
``gamma_A_THz``, ``hbar_omega_S_eV``); parsing converts to SI once and the
rest of the package never sees anything else. ``normalize`` fills defaults so
that a dumped config re-parses to the identical run.
"""
from __future__ import annotations

import copy
from dataclasses import dataclass

import numpy as np
import yaml

from . import quantum as qc
from .collision import CollisionSpec
from .constants import EV, FS, HBAR, KM_PER_S, MEV, NM, THZ
from .errors import ConfigError
from .models import DampedSwapParams, EntangleDisentangleParams

MODELS = ("damped_swap", "entangle_disentangle", "generic_hamiltonian")


def load(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"config {path} is not valid YAML: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a mapping at top level")
    return raw


def dump(cfg: dict) -> str:
    return yaml.safe_dump(cfg, sort_keys=False, default_flow_style=None)


def _section(cfg, name, required=True) -> dict:
    sec = cfg.get(name)
    if sec is None:
        if required:
            raise ConfigError(f"missing section '{name}'")
        return {}
    if not isinstance(sec, dict):
        raise ConfigError(f"section '{name}' must be a mapping")
    return sec


def _number(sec, key, *, default=None, where="parameters") -> float:
    if key not in sec:
        if default is None:
            raise ConfigError(f"missing '{key}' in {where}")
        return float(default)
    val = sec[key]
    if isinstance(val, bool):
        raise ConfigError(f"'{key}' must be a number")
    try:
        out = float(val)
    except (TypeError, ValueError):
        raise ConfigError(f"'{key}' must be a number, got {val!r}") from None
    if not np.isfinite(out):
        raise ConfigError(f"'{key}' must be finite")
    return out


def _unknown(sec, allowed, where):
    extra = sorted(set(sec) - set(allowed))
    if extra:
        raise ConfigError(f"unknown keys in {where}: {', '.join(extra)}")


def _matrix(value, key):
    try:
        m = np.array([[complex(str(x).replace(" ", "")) for x in row] for row in value])
    except (TypeError, ValueError):
        raise ConfigError(f"'{key}' must be a list of rows of numbers") from None
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ConfigError(f"'{key}' must be a square matrix")
    return m


# -- coupling -----------------------------------------------------------------

_COUPLING_KEYS = ("hbar_J_meV", "J_THz", "k_per_nm")


def _coupling(sec):
    given = [k for k in _COUPLING_KEYS if k in sec]
    if len(given) != 1:
        raise ConfigError(f"give exactly one of {', '.join(_COUPLING_KEYS)}")
    key = given[0]
    val = _number(sec, key)
    if key == "hbar_J_meV":
        return {"J": val * MEV / HBAR}
    if key == "J_THz":
        return {"J": val * THZ}
    return {"k": val / NM}


# -- models -------------------------------------------------------------------

_SWAP_KEYS = ("delta_x_nm", "a_S", "hbar_omega_S_eV", "a_A", "hbar_omega_A_eV",
              "gamma_A_THz", *_COUPLING_KEYS)
_ED_KEYS = ("delta_x_nm", "epsilon", "E_S0_eV", "E_S_target_eV", "E_A0_eV",
            "E_A_target_eV", *_COUPLING_KEYS)
_GENERIC_KEYS = ("delta_x_nm", "H_S_eV", "H_A_eV", "H_SA_eV", "coupling", "hbar_J_meV",
                 "rho_S", "rho_A", "generator", "coupling_mode")


def damped_swap_params(sec) -> DampedSwapParams:
    _unknown(sec, _SWAP_KEYS, "damped_swap parameters")
    try:
        return DampedSwapParams(
            system=qc.QubitThermalState(_number(sec, "a_S"), _number(sec, "hbar_omega_S_eV") * EV / HBAR),
            ancilla=qc.QubitThermalState(_number(sec, "a_A"), _number(sec, "hbar_omega_A_eV") * EV / HBAR),
            delta_x=_number(sec, "delta_x_nm") * NM,
            gamma_A=_number(sec, "gamma_A_THz", default=0.0) * THZ,
            **_coupling(sec),
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc


def ed_params(sec) -> EntangleDisentangleParams:
    _unknown(sec, _ED_KEYS, "entangle_disentangle parameters")
    try:
        return EntangleDisentangleParams(
            epsilon=_number(sec, "epsilon"),
            delta_x=_number(sec, "delta_x_nm") * NM,
            E_S0=_number(sec, "E_S0_eV") * EV,
            E_S_target=_number(sec, "E_S_target_eV") * EV,
            E_A0=_number(sec, "E_A0_eV") * EV,
            E_A_target=_number(sec, "E_A_target_eV") * EV,
            **_coupling(sec),
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc


@dataclass(frozen=True)
class GenericModel:
    spec: CollisionSpec
    rho_S: np.ndarray


def generic_model(sec) -> GenericModel:
    """Explicit matrices (energies in eV) plus optional named coupling.

    ``coupling: isotropic`` or ``coupling: swap`` with ``hbar_J_meV`` builds
    the two-qubit coupling; otherwise ``H_SA_eV`` is read as a matrix.
    """
    _unknown(sec, _GENERIC_KEYS, "generic_hamiltonian parameters")
    for key in ("H_S_eV", "H_A_eV", "rho_S", "rho_A"):
        if key not in sec:
            raise ConfigError(f"missing '{key}' in parameters")
    h_s = _matrix(sec["H_S_eV"], "H_S_eV") * EV
    h_a = _matrix(sec["H_A_eV"], "H_A_eV") * EV
    named = sec.get("coupling")
    if named is not None:
        if "H_SA_eV" in sec:
            raise ConfigError("give either 'coupling' or 'H_SA_eV', not both")
        J = _number(sec, "hbar_J_meV") * MEV / HBAR
        if h_s.shape != (2, 2) or h_a.shape != (2, 2):
            raise ConfigError("named couplings are defined for two qubits")
        if named == "isotropic":
            h_sa = qc.isotropic_coupling(J)
        elif named == "swap":
            h_sa = qc.swap_hamiltonian(J)
        else:
            raise ConfigError(f"unknown coupling {named!r} (isotropic or swap)")
    else:
        if "H_SA_eV" not in sec:
            raise ConfigError("missing 'H_SA_eV' or 'coupling' in parameters")
        h_sa = _matrix(sec["H_SA_eV"], "H_SA_eV") * EV
    try:
        spec = CollisionSpec(
            H_S=h_s, H_A=h_a, H_SA=h_sa,
            ancilla_initial=qc.density_matrix(_matrix(sec["rho_A"], "rho_A")),
            delta_x=_number(sec, "delta_x_nm") * NM,
            coupling_mode=sec.get("coupling_mode", "fixed"),
            generator=sec.get("generator", "full"),
        )
        rho_s = qc.density_matrix(_matrix(sec["rho_S"], "rho_S"))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if rho_s.shape[0] != spec.dims[0]:
        raise ConfigError("rho_S and H_S dimensions differ")
    return GenericModel(spec, rho_s)


def model_params(cfg):
    model = cfg.get("model")
    if model not in MODELS:
        raise ConfigError(f"model must be one of {', '.join(MODELS)}, got {model!r}")
    sec = _section(cfg, "parameters")
    if model == "damped_swap":
        return damped_swap_params(sec)
    if model == "entangle_disentangle":
        return ed_params(sec)
    return generic_model(sec)


# -- grids --------------------------------------------------------------------

def velocity_grid(cfg) -> np.ndarray:
    sec = _section(cfg, "velocity_grid")
    _unknown(sec, ("spacing", "v_min_km_per_s", "v_max_km_per_s", "n_points"), "velocity_grid")
    spacing = sec.get("spacing", "log")
    v_min = _number(sec, "v_min_km_per_s", where="velocity_grid") * KM_PER_S
    v_max = _number(sec, "v_max_km_per_s", where="velocity_grid") * KM_PER_S
    n = sec.get("n_points")
    if not isinstance(n, int) or isinstance(n, bool) or n < 2:
        raise ConfigError("velocity_grid.n_points must be an integer >= 2")
    if not v_min > 0:
        raise ConfigError("velocity_grid.v_min_km_per_s must be positive")
    if not v_max > v_min:
        raise ConfigError("velocity_grid.v_max_km_per_s must exceed v_min_km_per_s")
    if spacing == "log":
        return np.geomspace(v_min, v_max, n)
    if spacing == "linear":
        return np.linspace(v_min, v_max, n)
    raise ConfigError(f"velocity_grid.spacing must be 'log' or 'linear', got {spacing!r}")


def times(cfg) -> np.ndarray:
    raw = cfg.get("times_fs", [])
    if not isinstance(raw, list):
        raise ConfigError("times_fs must be a list")
    out = np.array([_number({"t": t}, "t", where="times_fs") for t in raw]) * FS
    if np.any(out < 0):
        raise ConfigError("times_fs must be non-negative")
    return out


def trajectory_settings(cfg) -> tuple[float, int]:
    """(speed in m/s, number of interactions)."""
    sec = _section(cfg, "trajectory")
    _unknown(sec, ("v_km_per_s", "delta_t_fs", "n_interactions"), "trajectory")
    n = sec.get("n_interactions")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ConfigError("trajectory.n_interactions must be an integer >= 1")
    if ("v_km_per_s" in sec) == ("delta_t_fs" in sec):
        raise ConfigError("trajectory needs exactly one of v_km_per_s or delta_t_fs")
    if "v_km_per_s" in sec:
        v = _number(sec, "v_km_per_s", where="trajectory") * KM_PER_S
    else:
        dt = _number(sec, "delta_t_fs", where="trajectory") * FS
        if not dt > 0:
            raise ConfigError("trajectory.delta_t_fs must be positive")
        v = _delta_x(cfg) / dt
    if not v > 0:
        raise ConfigError("trajectory speed must be positive")
    return v, n


def _delta_x(cfg):
    return _number(_section(cfg, "parameters"), "delta_x_nm") * NM


# nitrogen-scale defaults: r = 0.23 nm, E = 1e-20 J
_ZENO_DEFAULTS = {"radius_nm": 0.23, "energy_J": 1e-20, "ladder_points": 8,
                  "ladder_ratio": 2.0, "ladder_top": 1e4}


def zeno_settings(cfg) -> dict:
    sec = _section(cfg, "zeno", required=False)
    _unknown(sec, ("radius_nm", "energy_J", "ladder_points", "ladder_ratio", "ladder_top"), "zeno")
    pts = sec.get("ladder_points", _ZENO_DEFAULTS["ladder_points"])
    if not isinstance(pts, int) or isinstance(pts, bool) or pts < 4:
        raise ConfigError("zeno.ladder_points must be an integer >= 4")
    out = {
        "radius": _number(sec, "radius_nm", default=_ZENO_DEFAULTS["radius_nm"], where="zeno") * NM,
        "energy": _number(sec, "energy_J", default=_ZENO_DEFAULTS["energy_J"], where="zeno"),
        "ladder_points": pts,
        "ladder_ratio": _number(sec, "ladder_ratio", default=_ZENO_DEFAULTS["ladder_ratio"], where="zeno"),
        # top of the ladder in units of the model's characteristic speed
        "ladder_top": _number(sec, "ladder_top", default=_ZENO_DEFAULTS["ladder_top"], where="zeno"),
    }
    if not out["radius"] > 0 or out["energy"] < 0:
        raise ConfigError("zeno needs radius_nm > 0 and energy_J >= 0")
    if not out["ladder_ratio"] > 1 or not out["ladder_top"] >= 1e3:
        raise ConfigError("zeno needs ladder_ratio > 1 and ladder_top >= 1e3")
    return out


_TOP = ("model", "parameters", "velocity_grid", "times_fs", "trajectory", "zeno", "output")


def normalize(cfg: dict) -> dict:
    """Validated deep copy with defaults written out explicitly."""
    _unknown(cfg, _TOP, "config")
    cfg = copy.deepcopy(cfg)
    model_params(cfg)
    if "velocity_grid" in cfg:
        cfg["velocity_grid"].setdefault("spacing", "log")
        velocity_grid(cfg)
    if "times_fs" in cfg:
        times(cfg)
    if "trajectory" in cfg:
        trajectory_settings(cfg)
    if cfg.get("model") == "damped_swap":
        cfg["parameters"].setdefault("gamma_A_THz", 0.0)
    if "zeno" in cfg:
        zeno_settings(cfg)
        for key, val in _ZENO_DEFAULTS.items():
            cfg["zeno"].setdefault(key, val)
    if "output" in cfg and not isinstance(cfg["output"], str):
        raise ConfigError("output must be a path string")
    return cfg

