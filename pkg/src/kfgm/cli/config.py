"""Scenario files: strict JSON with defaults for every field."""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

from ..errors import ConfigError, InputParseError
from ..states_grid import MINUS, PLUS, Grid, Units

BC_KINDS = ("periodic", "antiperiodic", "flux_balanced", "transfer")


@dataclass(frozen=True)
class UnitsConfig:
    hbar: float = 1.0
    m: float = 1.0
    c: float = 1.0

    def build(self) -> Units:
        return Units(self.hbar, self.m, self.c)


@dataclass(frozen=True)
class GridConfig:
    a: float = 0.0
    b: float = 2 * math.pi
    n: int = 129

    def build(self) -> Grid:
        return Grid(self.a, self.b, self.n)


@dataclass(frozen=True)
class BcConfig:
    kind: str = "antiperiodic"
    mu: float | None = None
    branch: str | None = None
    matrix: list | None = None


@dataclass(frozen=True)
class SolverConfig:
    dt_factor: float = 0.2
    cfl_factor: float = 0.5
    crossings: float = 10.0
    snapshot_stride: int = 0
    n_max: int = 5
    n_modes: int = 4
    n_states: int = 20
    mu_samples: int = 64
    e_window: tuple = (1.0001, 6.0)
    k_list: tuple = (0.01, 0.02, 0.04)


@dataclass(frozen=True)
class Scenario:
    units: UnitsConfig = field(default_factory=UnitsConfig)
    grid: GridConfig = field(default_factory=GridConfig)
    bc: BcConfig = field(default_factory=BcConfig)
    majorana_sign: str = PLUS
    seed: int = 42
    tol_scale: float = 1.0
    solver: SolverConfig = field(default_factory=SolverConfig)
    output: str = "out"

    def to_dict(self) -> dict:
        d = asdict(self)
        d["solver"]["e_window"] = list(self.solver.e_window)
        d["solver"]["k_list"] = list(self.solver.k_list)
        return d

    def config_hash(self) -> str:
        d = self.to_dict()
        d.pop("output")
        blob = json.dumps(d, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


def _build(cls, data, where: str):
    if not isinstance(data, dict):
        raise ConfigError(f"{where} must be an object")
    names = {f.name: f for f in fields(cls)}
    unknown = sorted(set(data) - set(names))
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {', '.join(unknown)}")
    kw = {}
    for key, value in data.items():
        sub = _NESTED.get((cls, key))
        if sub is not None:
            kw[key] = _build(sub, value, f"{where}.{key}")
        elif key in ("e_window", "k_list"):
            if not isinstance(value, list):
                raise ConfigError(f"{where}.{key} must be a list")
            kw[key] = tuple(float(v) for v in value)
        else:
            kw[key] = value
    return cls(**kw)


_NESTED = {
    (Scenario, "units"): UnitsConfig,
    (Scenario, "grid"): GridConfig,
    (Scenario, "bc"): BcConfig,
    (Scenario, "solver"): SolverConfig,
}


def validate(sc: Scenario) -> Scenario:
    if not isinstance(sc.seed, int) or isinstance(sc.seed, bool):
        raise ConfigError("seed must be an integer")
    if not sc.tol_scale > 0:
        raise ConfigError("tol_scale must be positive")
    if sc.majorana_sign not in (PLUS, MINUS):
        raise ConfigError("majorana_sign must be 'plus' or 'minus'")
    if sc.bc.kind not in BC_KINDS:
        raise ConfigError(f"bc.kind must be one of {BC_KINDS}")
    if sc.bc.kind == "flux_balanced":
        if sc.bc.mu is None or sc.bc.branch not in ("upper", "lower"):
            raise ConfigError("flux_balanced needs mu and branch ('upper' or 'lower')")
    if sc.bc.kind == "transfer" and sc.bc.matrix is None:
        raise ConfigError("transfer needs a 2x2 matrix")
    s = sc.solver
    positives = {
        "solver.dt_factor": s.dt_factor, "solver.cfl_factor": s.cfl_factor,
        "solver.crossings": s.crossings, "units.hbar": sc.units.hbar,
        "units.m": sc.units.m, "units.c": sc.units.c,
    }
    for name, value in positives.items():
        if not (isinstance(value, (int, float)) and value > 0):
            raise ConfigError(f"{name} must be positive")
    if s.n_max < 1 or s.n_modes < 1 or s.n_states < 1 or s.mu_samples < 1 or s.snapshot_stride < 0:
        raise ConfigError("solver counts must be positive")
    if len(s.e_window) != 2:
        raise ConfigError("solver.e_window needs two entries")
    try:
        sc.grid.build()
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return sc


def load_scenario(path=None, seed=None, grid_n=None, tol_scale=None, out=None) -> Scenario:
    """Read a scenario file (or take defaults) and apply command-line overrides."""
    data = {}
    if path is not None:
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise InputParseError(f"cannot read scenario {path}: {exc}") from exc
    sc = _build(Scenario, data, "scenario")
    if seed is not None:
        sc = replace(sc, seed=seed)
    if grid_n is not None:
        sc = replace(sc, grid=replace(sc.grid, n=grid_n))
    if tol_scale is not None:
        sc = replace(sc, tol_scale=tol_scale)
    if out is not None:
        sc = replace(sc, output=str(out))
    return validate(sc)
