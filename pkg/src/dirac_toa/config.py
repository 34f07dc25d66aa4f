"""Run configuration: one INI file plus command-line overrides (flags win).

A config is fully validated before any computation; a rejected config
produces no output files. Pair specs are either presets ("standard",
"rotated", "generic", "generic:SEED") or explicit component lists like
"1,0,0;0,0,1" (Fractions and decimal strings stay exact).
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import List, Optional

from .pauli import ConstraintViolation, DiracPair, ROTATED_PAIR, STANDARD_PAIR, make_dirac_pair, sample_dirac_pair


class ConfigError(ValueError):
    """Invalid run configuration."""


@dataclass
class RunConfig:
    pairs: List[str] = field(default_factory=lambda: ["standard"])
    hbar: float = 1.0
    c: float = 1.0
    m0: float = 1.0
    p_max: float = 20.0
    p_count: int = 4096
    x_max: float = 15.0
    x_count: int = 2048
    taus: List[float] = field(default_factory=lambda: [1.0])
    branches: List[str] = field(default_factory=lambda: ["non-nodal", "nodal"])
    time_count: int = 201
    window_fraction: float = 0.15
    m_min: int = -3
    m_max: int = 3
    n_max: int = 3
    nonrel_p_center: float = 0.01
    nonrel_relative_width: float = 0.125
    seed: int = 0
    out: Optional[Path] = None
    parallel: bool = False
    fault: str = "none"

    def validate(self) -> None:
        if not self.pairs:
            raise ConfigError("at least one pair spec is required")
        for spec in self.pairs:
            resolve_pair(spec, self.seed)  # raises on invalid specs
        if min(self.hbar, self.c, self.m0) <= 0:
            raise ConfigError("hbar, c, m0 must be positive")
        if self.p_max <= 0 or self.p_count < 8 or self.p_count % 2:
            raise ConfigError("momentum grid needs p_max > 0 and an even count >= 8")
        if self.x_max <= 0 or self.x_count < 9:
            raise ConfigError("position grid needs x_max > 0 and count >= 9")
        for tau in self.taus:
            if tau == 0.0:
                raise ConfigError("tau = 0 is rejected (degenerate arrival time)")
            if tau < 0.0:
                raise ConfigError("tau must be positive")
        for branch in self.branches:
            if branch not in ("non-nodal", "nodal"):
                raise ConfigError(f"unknown branch {branch!r}")
        if self.time_count < 3:
            raise ConfigError("time_count must be >= 3")
        if not 0.0 < self.window_fraction < 1.0:
            raise ConfigError("window_fraction must be in (0, 1)")
        if self.m_min > -2 or self.m_max < 2 or self.n_max < 2:
            raise ConfigError("solver window must cover m in [-2, 2] and n_max >= 2")
        if self.nonrel_p_center <= 0 or self.nonrel_relative_width <= 0:
            raise ConfigError("nonrel sweep needs positive p_center and width")
        if self.nonrel_relative_width >= Fraction(1, 3):
            raise ConfigError("nonrel relative width must keep support off p = 0")
        if self.fault not in ("none", "t0-sign"):
            raise ConfigError(f"unknown fault {self.fault!r}")


def _parse_vector(text: str):
    parts = [t.strip() for t in text.split(",")]
    if len(parts) != 3:
        raise ConfigError(f"expected three components, got {text!r}")
    out = []
    for t in parts:
        try:
            out.append(Fraction(t))
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"bad vector component {t!r}") from exc
    return tuple(out)


def resolve_pair(spec: str, seed: int) -> DiracPair:
    spec = spec.strip()
    if spec == "standard":
        return STANDARD_PAIR
    if spec == "rotated":
        return ROTATED_PAIR
    if spec == "generic":
        return sample_dirac_pair(seed)
    if spec.startswith("generic:"):
        try:
            return sample_dirac_pair(int(spec.split(":", 1)[1]))
        except ValueError as exc:
            raise ConfigError(f"bad generic pair spec {spec!r}") from exc
    if ";" in spec:
        alpha_text, beta_text = spec.split(";", 1)
        try:
            return make_dirac_pair(_parse_vector(alpha_text), _parse_vector(beta_text))
        except ConstraintViolation as exc:
            raise ConfigError(f"invalid pair {spec!r}: {exc}") from exc
    raise ConfigError(f"unknown pair spec {spec!r}")


def _split_list(text: str) -> List[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def load_config(path: Optional[str]) -> RunConfig:
    cfg = RunConfig()
    if path is None:
        return cfg
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise ConfigError(f"config file {path!r} not found")

    def get(section, key, cast, current):
        if parser.has_option(section, key):
            raw = parser.get(section, key)
            try:
                return cast(raw)
            except (ValueError, TypeError) as exc:
                raise ConfigError(f"bad value for [{section}] {key}: {raw!r}") from exc
        return current

    as_bool = lambda raw: raw.strip().lower() in ("1", "true", "yes", "on")
    cfg.pairs = get("pairs", "list", _split_list, cfg.pairs)
    cfg.hbar = get("params", "hbar", float, cfg.hbar)
    cfg.c = get("params", "c", float, cfg.c)
    cfg.m0 = get("params", "m0", float, cfg.m0)
    cfg.p_max = get("momentum_grid", "p_max", float, cfg.p_max)
    cfg.p_count = get("momentum_grid", "count", int, cfg.p_count)
    cfg.x_max = get("position_grid", "x_max", float, cfg.x_max)
    cfg.x_count = get("position_grid", "count", int, cfg.x_count)
    cfg.taus = get("dynamics", "taus", lambda t: [float(x) for x in _split_list(t)], cfg.taus)
    cfg.branches = get("dynamics", "branches", _split_list, cfg.branches)
    cfg.time_count = get("dynamics", "time_count", int, cfg.time_count)
    cfg.window_fraction = get("dynamics", "window_fraction", float, cfg.window_fraction)
    cfg.m_min = get("solver", "m_min", int, cfg.m_min)
    cfg.m_max = get("solver", "m_max", int, cfg.m_max)
    cfg.n_max = get("solver", "n_max", int, cfg.n_max)
    cfg.nonrel_p_center = get("nonrel", "p_center", float, cfg.nonrel_p_center)
    cfg.nonrel_relative_width = get("nonrel", "relative_width", float, cfg.nonrel_relative_width)
    cfg.seed = get("run", "seed", int, cfg.seed)
    cfg.out = get("run", "out", Path, cfg.out)
    cfg.parallel = get("run", "parallel", as_bool, cfg.parallel)
    cfg.fault = get("run", "fault", str, cfg.fault)
    return cfg


def apply_overrides(cfg: RunConfig, args) -> RunConfig:
    """Command-line flags win over config-file values."""
    if getattr(args, "pair", None):
        cfg.pairs = [args.pair]
    if getattr(args, "tau", None):
        cfg.taus = [float(t) for t in args.tau]
    if getattr(args, "grid_n", None):
        cfg.p_count = int(args.grid_n)
    if getattr(args, "out", None):
        cfg.out = Path(args.out)
    if getattr(args, "seed", None) is not None:
        cfg.seed = int(args.seed)
    if getattr(args, "parallel", False):
        cfg.parallel = True
    if getattr(args, "fault", None):
        cfg.fault = args.fault
    return cfg
