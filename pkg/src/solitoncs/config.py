"""Run configuration: one flat JSON document, every field defaulted."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from .errors import ConfigurationError
from .numerics import ComplexPlaneQuadrature, Grid1D, MomentumNodes

OUT_ENV = "SOLITONCS_OUT"


@dataclass
class RunConfig:
    a: float = 1.0
    x_min: float = -20.0
    x_max: float = 20.0
    n_points: int = 2001
    basis_n: int = 8
    max_n: int = 60
    p_max: float = 12.0
    n_p: int = 1025
    quad_radius: float = 9.0
    quad_n_radial: int = 80
    quad_n_angular: int = 64
    quad_scheme: str = "polar"
    times: list = field(default_factory=lambda: [0.0, 1.3])
    dt: float = 1e-4
    tolerances: dict = field(default_factory=dict)
    out_dir: str = "out"
    output_format: str = ""

    def validate(self) -> "RunConfig":
        if not (isinstance(self.a, (int, float)) and math.isfinite(self.a) and self.a > 0):
            raise ConfigurationError(f"a must be a positive real number, got {self.a!r}")
        for name in ("n_points", "basis_n", "max_n", "n_p", "quad_n_radial", "quad_n_angular"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or value <= 0:
                raise ConfigurationError(f"{name} must be a positive integer, got {value!r}")
        if self.basis_n + 2 > self.max_n:
            raise ConfigurationError("basis_n + 2 must not exceed max_n")
        if not self.times:
            raise ConfigurationError("times must list at least one time sample")
        if self.dt <= 0:
            raise ConfigurationError("dt must be positive")
        if self.output_format not in ("", "json", "csv"):
            raise ConfigurationError(f"output_format must be json or csv, got {self.output_format!r}")
        for key, value in self.tolerances.items():
            if not isinstance(value, (int, float)) or value <= 0:
                raise ConfigurationError(f"tolerance override {key!r} must be positive")
        # constructing these runs their own checks
        self.grid, self.nodes, self.plane_quadrature  # noqa: B018
        return self

    @property
    def grid(self) -> Grid1D:
        return Grid1D(float(self.x_min), float(self.x_max), int(self.n_points))

    @property
    def nodes(self) -> MomentumNodes:
        return MomentumNodes(float(self.p_max), int(self.n_p))

    @property
    def plane_quadrature(self) -> ComplexPlaneQuadrature:
        return ComplexPlaneQuadrature(float(self.quad_radius), int(self.quad_n_radial),
                                      int(self.quad_n_angular), self.quad_scheme)

    def tolerance(self, key: str, default: float) -> float:
        return float(self.tolerances.get(key, default))

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigurationError(f"unknown config keys: {', '.join(unknown)}")
        cfg = cls(**data)
        for name in ("a", "x_min", "x_max", "p_max", "quad_radius", "dt"):
            value = getattr(cfg, name)
            if isinstance(value, int) and not isinstance(value, bool):
                setattr(cfg, name, float(value))
        cfg.times = [float(t) for t in cfg.times]
        return cfg

    @classmethod
    def load(cls, path) -> "RunConfig":
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigurationError("config file must hold a single JSON object")
        return cls.from_dict(data)

    def dump(self, path):
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")
