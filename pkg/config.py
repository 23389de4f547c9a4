#!/usr/bin/env python3
"""
config.py: Run configuration

Lookup order for every key: explicit flag > --config file > TORUS_CONFIG
file > defaults below. Config files are flat JSON objects whose keys are
the long flag names (dashes or underscores).
"""

import json
import os
from dataclasses import dataclass, fields, asdict
from pathlib import Path
from typing import Optional

from constants import (
    ALGEBRAIC_TOL, DEFAULT_CHI_STEPS, DEFAULT_CROSSING_GRID,
    DEFAULT_ORBIT_STEPS, DEFAULT_SAMPLES, KERNEL_REL_TOL,
)
from errors import DomainError

COMMANDS = ("geodesics", "homology", "cz", "perturb", "flow", "paper")
FORMATS = ("json", "csv")

# keys each command cannot run without
REQUIRED = {
    "geodesics": ("n", "a"),
    "homology": ("n", "k"),
    "cz": (),
    "perturb": ("k",),
    "flow": (),
    "paper": (),
}


@dataclass
class RunConfig:
    command: str = "paper"
    n: Optional[int] = None
    k: Optional[str] = None           # "1,0,-2"; a single integer for perturb/flow
    a: Optional[float] = None
    q0: float = 0.0
    samples: int = DEFAULT_SAMPLES
    grid: int = DEFAULT_CROSSING_GRID
    orbit_steps: int = DEFAULT_ORBIT_STEPS
    chi_steps: int = DEFAULT_CHI_STEPS
    t_points: int = 64
    s_max: float = 15.0
    s_step: float = 0.01
    tol: float = ALGEBRAIC_TOL
    kernel_tol: float = KERNEL_REL_TOL
    json_path: Optional[str] = None
    csv_path: Optional[str] = None
    format: str = "json"
    workers: int = 4

    def validate(self) -> "RunConfig":
        if self.command not in COMMANDS:
            raise DomainError(f"unknown command {self.command!r}")
        if self.format not in FORMATS:
            raise DomainError(f"format must be one of {FORMATS}, got {self.format!r}")
        missing = [key for key in REQUIRED[self.command] if getattr(self, key) is None]
        if missing:
            raise DomainError(f"{self.command} needs --{' --'.join(missing)}")
        if self.n is not None and self.n < 1:
            raise DomainError(f"n must be ≥ 1, got {self.n}")
        for key in ("samples", "grid", "orbit_steps", "chi_steps", "t_points", "workers"):
            if getattr(self, key) < 1:
                raise DomainError(f"{key} must be positive, got {getattr(self, key)}")
        return self


def load_config(path) -> dict:
    """Flat JSON object -> dict of RunConfig keys; unknown keys are an error"""
    if path is None:
        return {}
    with open(Path(path), "r") as f:
        raw = json.load(f)
    if not isinstance(raw, dict):
        raise DomainError(f"config {path} must hold a JSON object")
    known = {f.name for f in fields(RunConfig)}
    values = {}
    for key, value in raw.items():
        name = key.replace("-", "_")
        if name == "json":
            name = "json_path"
        elif name == "csv":
            name = "csv_path"
        if name not in known:
            raise DomainError(f"unknown config key {key!r} in {path}")
        values[name] = value
    return values


def resolve(command: str, flags: dict, config_path=None) -> RunConfig:
    """
    Merge the sources into one validated RunConfig.

    flags holds what argparse produced; None means "not given on the
    command line" and lets the files or the defaults through.
    """
    merged = {}
    merged.update(load_config(os.environ.get("TORUS_CONFIG") or None))
    merged.update(load_config(config_path))
    known = {f.name for f in fields(RunConfig)}
    merged.update({key: value for key, value in flags.items()
                   if key in known and value is not None})
    merged["command"] = command
    return RunConfig(**merged).validate()


if __name__ == "__main__":
    print(json.dumps(asdict(RunConfig()), indent=2))
