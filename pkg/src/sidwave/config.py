"""Experiment configuration: nested TOML sections over embedded defaults.

Example::

    horizon = 100.0

    [model]
    n = 1
    mu = 50.0
    nonlinearity = "none"

    [data]
    amplitude = 1.0

    [weight]
    delta = "auto"   # from the feasibility construction for (n, p)

``r_max`` defaults to ``r0 + horizon + margin``.
"""

from __future__ import annotations

import copy
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Optional

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .diagnostics import WeightSpec
from .feasibility import InfeasibleError, solve_feasible
from .model import (
    ConfigurationError,
    ModelSpec,
    PolynomialBump,
    TruncatedGaussian,
    make_damping,
    make_grid,
)
from .solver import StepControl

DEFAULTS: dict[str, Any] = {
    "horizon": 10.0,
    "sample_dt": None,
    "snapshot_stride": None,
    "model": {"n": 1, "mu": 2.0, "beta": None, "p": 2.0, "nonlinearity": "abs_pow"},
    "data": {
        "profile": "polynomial_bump",
        "amplitude": 1.0,
        "velocity": 0.0,
        "r0": 1.0,
        "k": 3,
        "width": 0.5,
        "cutoff": 2.0,
    },
    "grid": {"nr": None, "dr": 0.05, "margin": 2.0, "r_max": None},
    "control": {
        "cfl": 0.5,
        "dt_floor": 1e-9,
        "blowup_threshold": None,
        "blowup_factor": 1e6,
        "refine_factor": 2.0,
        "nonlinear_cfl": 0.1,
    },
    "weight": {"delta": 1.0, "eps": None, "p": None},
    "fit": {"t_lo": None, "t_hi": None},
    "sweep": {
        "p_list": [],
        "mu_list": [],
        "bisect_steps": 3,
        "escalation_steps": 1,
        "escalation_factor": 2.0,
    },
    "analysis": {
        "compare_times": [20.0, 40.0, 80.0],
        "R_list": [8.0, 16.0, 32.0],
        "eps_list": None,
        "nrs": [60, 120, 240, 480],
    },
    "outputs": {"csv_path": "run.csv", "summary_path": "summary.json"},
}


def _merge(base: dict, extra: dict, path: str = "") -> dict:
    out = copy.deepcopy(base)
    for key, value in extra.items():
        where = f"{path}{key}"
        if key not in base:
            raise ConfigurationError(f"unknown config key {where!r}")
        if isinstance(base[key], dict):
            if not isinstance(value, dict):
                raise ConfigurationError(f"{where!r} must be a section")
            out[key] = _merge(base[key], value, where + ".")
        else:
            out[key] = value
    return out


def parse_override(item: str) -> dict:
    """``"model.p=3.5"`` -> ``{"model": {"p": 3.5}}``; values use TOML syntax, bare words are strings."""
    if "=" not in item:
        raise ConfigurationError(f"override {item!r} is not key=value")
    key, raw = item.split("=", 1)
    try:
        value = tomllib.loads(f"v = {raw.strip()}")["v"]
    except tomllib.TOMLDecodeError:
        value = raw.strip()
    node: Any = value
    for part in reversed(key.strip().split(".")):
        node = {part: node}
    return node


@dataclass
class ExperimentConfig:
    raw: dict

    @classmethod
    def from_dict(cls, data: Optional[dict] = None, overrides: Iterable[str] = ()) -> "ExperimentConfig":
        raw = _merge(DEFAULTS, data or {})
        for item in overrides:
            raw = _merge(raw, parse_override(item))
        cfg = cls(raw)
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path: Optional[str | Path], overrides: Iterable[str] = ()) -> "ExperimentConfig":
        data = {}
        if path is not None:
            try:
                with open(path, "rb") as fh:
                    data = tomllib.load(fh)
            except (OSError, tomllib.TOMLDecodeError) as exc:
                raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
        return cls.from_dict(data, overrides)

    def merged(self, **sections) -> dict:
        """Raw dict with ``section={key: value}`` or top-level ``key=value`` replaced, unvalidated."""
        return _merge(self.raw, sections)

    def with_overrides(self, **sections) -> "ExperimentConfig":
        return ExperimentConfig.from_dict(self.merged(**sections))

    def validate(self):
        self.model()
        self.profile()
        self.control()
        if not self.horizon >= 0:
            raise ConfigurationError("horizon must be nonnegative")
        self.grid()

    # builders ---------------------------------------------------------------

    @property
    def horizon(self) -> float:
        return float(self.raw["horizon"])

    @property
    def snapshot_stride(self) -> Optional[float]:
        v = self.raw["snapshot_stride"]
        return None if v is None else float(v)

    @property
    def sample_dt(self) -> Optional[float]:
        v = self.raw["sample_dt"]
        return None if v is None else float(v)

    def model(self, forcing=None) -> ModelSpec:
        m = self.raw["model"]
        damping = make_damping(mu=None if m["beta"] is not None else m["mu"], beta=m["beta"])
        return ModelSpec(int(m["n"]), damping, float(m["p"]), str(m["nonlinearity"]), forcing)

    def profile(self):
        d = self.raw["data"]
        if d["profile"] == "polynomial_bump":
            return PolynomialBump(float(d["amplitude"]), float(d["r0"]), int(d["k"]), float(d["velocity"]))
        if d["profile"] == "truncated_gaussian":
            return TruncatedGaussian(float(d["amplitude"]), float(d["width"]), float(d["cutoff"]), float(d["velocity"]))
        raise ConfigurationError(f"unknown profile {d['profile']!r}")

    def grid(self, horizon: Optional[float] = None):
        g = self.raw["grid"]
        T = self.horizon if horizon is None else horizon
        r_max = g["r_max"] if g["r_max"] is not None else self.profile().support + T + float(g["margin"])
        nr = g["nr"] if g["nr"] is not None else max(16, math.ceil(r_max / float(g["dr"])))
        return make_grid(float(r_max), int(nr))

    def control(self) -> StepControl:
        return StepControl(**{k: (None if v is None else float(v)) for k, v in self.raw["control"].items()})

    def weight(self) -> WeightSpec:
        """Weight for the run; unweighted when the damping is not scale invariant."""
        m = self.raw["model"]
        if m["beta"] is not None or not m["mu"]:
            return WeightSpec.unweighted()
        w = self.raw["weight"]
        delta = w["delta"]
        if delta == "auto":
            p = float(w["p"] if w["p"] is not None else m["p"])
            try:
                delta = solve_feasible(int(m["n"]), p, w["eps"]).delta
            except InfeasibleError as exc:
                raise ConfigurationError(f"weight.delta='auto' needs feasible (n, p): {exc}") from exc
        return WeightSpec(float(m["mu"]), float(delta))

    def feasibility_eps(self) -> Optional[float]:
        """The eps paired with an ``auto`` weight (used for the M functional)."""
        w, m = self.raw["weight"], self.raw["model"]
        if w["delta"] != "auto":
            return w["eps"]
        p = float(w["p"] if w["p"] is not None else m["p"])
        return solve_feasible(int(m["n"]), p, w["eps"]).eps

    def fit_window(self, horizon: Optional[float] = None):
        f = self.raw["fit"]
        T = self.horizon if horizon is None else horizon
        lo = f["t_lo"] if f["t_lo"] is not None else max(1.0, T / 10.0)
        hi = f["t_hi"] if f["t_hi"] is not None else T
        return float(lo), float(hi)
