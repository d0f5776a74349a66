"""Experiment configuration: TOML loading, validation, and materialization.

Rationals are written as "p/q" strings in config files so exactness survives
the round trip (e.g. epsilon = "3/100").
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, replace
from fractions import Fraction
from pathlib import Path
from typing import Optional

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from . import costs as costs_mod
from . import graph as graph_mod
from .quant import level_for, parse_rational


class ConfigError(Exception):
    """Base class for configuration problems (CLI exit code 2)."""


class ConfigParseError(ConfigError):
    pass


class ConfigValidationError(ConfigError):
    pass


MODES = ("quantized", "exact", "refined")


@dataclass(frozen=True)
class GraphSpec:
    kind: str  # "random" | "file"
    n: int = 0
    extra_edge_prob: float = 0.0
    path: Optional[str] = None


@dataclass(frozen=True)
class CostSpec:
    kind: str  # "quadratic" | "abs" | "explicit"
    p: int = 1
    seed: Optional[int] = None
    weight: float = 1.0
    P: Optional[tuple] = None
    q: Optional[tuple] = None
    r: Optional[tuple] = None


@dataclass(frozen=True)
class RunConfig:
    graph: GraphSpec
    costs: CostSpec
    epsilon: Fraction
    delta: Fraction
    rho: float = 1.0
    B: int = 1
    k_max: int = 300
    seed: int = 0
    mode: str = "quantized"
    out: str = "run.csv"

    def with_overrides(self, **kwargs) -> "RunConfig":
        cfg = replace(self, **{k: v for k, v in kwargs.items() if v is not None})
        _validate(cfg)
        return cfg


def _require(table: dict, key: str, context: str):
    if key not in table:
        raise ConfigValidationError(f"missing required key {key!r} in {context}")
    return table[key]


def _parse_graph(table) -> GraphSpec:
    if not isinstance(table, dict):
        raise ConfigValidationError("[graph] must be a table")
    kind = _require(table, "kind", "[graph]")
    if kind == "random":
        n = int(_require(table, "n", "[graph]"))
        prob = float(table.get("extra_edge_prob", 0.0))
        return GraphSpec(kind="random", n=n, extra_edge_prob=prob)
    if kind == "file":
        return GraphSpec(kind="file", path=str(_require(table, "path", "[graph]")))
    raise ConfigValidationError(f"[graph] kind must be 'random' or 'file', got {kind!r}")


def _freeze(obj):
    if isinstance(obj, list):
        return tuple(_freeze(v) for v in obj)
    return obj


def _parse_costs(table) -> CostSpec:
    if not isinstance(table, dict):
        raise ConfigValidationError("[costs] must be a table")
    kind = _require(table, "kind", "[costs]")
    if kind == "quadratic":
        p = int(table.get("p", 1))
        seed = table.get("seed")
        return CostSpec(kind="quadratic", p=p, seed=None if seed is None else int(seed))
    if kind == "abs":
        return CostSpec(kind="abs", weight=float(table.get("weight", 1.0)))
    if kind == "explicit":
        return CostSpec(
            kind="explicit",
            P=_freeze(_require(table, "P", "[costs]")),
            q=_freeze(_require(table, "q", "[costs]")),
            r=_freeze(table.get("r", [])),
        )
    raise ConfigValidationError(
        f"[costs] kind must be 'quadratic', 'abs', or 'explicit', got {kind!r}"
    )


def _validate(cfg: RunConfig) -> None:
    if cfg.mode not in MODES:
        raise ConfigValidationError(f"mode must be one of {MODES}, got {cfg.mode!r}")
    if cfg.rho <= 0:
        raise ConfigValidationError(f"rho must be positive, got {cfg.rho}")
    if cfg.B < 1:
        raise ConfigValidationError(f"delay bound B must be >= 1, got {cfg.B}")
    if cfg.k_max < 1:
        raise ConfigValidationError(f"k_max must be >= 1, got {cfg.k_max}")
    if cfg.epsilon <= 0:
        raise ConfigValidationError(f"epsilon must be positive, got {cfg.epsilon}")
    if cfg.delta <= 0:
        raise ConfigValidationError(f"delta must be positive, got {cfg.delta}")
    if cfg.delta >= cfg.epsilon / 2:
        raise ConfigValidationError(
            f"delta must satisfy delta < epsilon/2: got delta={cfg.delta}, "
            f"epsilon/2={cfg.epsilon / 2}"
        )
    if cfg.graph.kind == "random" and cfg.graph.n < 2:
        raise ConfigValidationError(f"graph.n must be >= 2, got {cfg.graph.n}")


def load_config(path: str | Path) -> RunConfig:
    """Load and validate a TOML run configuration, applying defaults."""
    path = Path(path)
    try:
        raw = tomllib.loads(path.read_text())
    except FileNotFoundError:
        raise ConfigParseError(f"config file not found: {path}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigParseError(f"{path}: {exc}") from None

    try:
        epsilon = parse_rational(_require(raw, "epsilon", "config"))
        delta_raw = raw.get("delta")
        level = level_for(epsilon, None if delta_raw is None else parse_rational(delta_raw))
    except ValueError as exc:
        raise ConfigValidationError(str(exc)) from None

    cfg = RunConfig(
        graph=_parse_graph(_require(raw, "graph", "config")),
        costs=_parse_costs(_require(raw, "costs", "config")),
        epsilon=epsilon,
        delta=level.delta,
        rho=float(raw.get("rho", 1.0)),
        B=int(raw.get("B", 1)),
        k_max=int(raw.get("k_max", 300)),
        seed=int(raw.get("seed", 0)),
        mode=str(raw.get("mode", "quantized")),
        out=str(raw.get("out", "run.csv")),
    )
    _validate(cfg)
    return cfg


def build_graph(cfg: RunConfig) -> graph_mod.DiGraph:
    spec = cfg.graph
    if spec.kind == "random":
        return graph_mod.random_strongly_connected(spec.n, spec.extra_edge_prob, cfg.seed)
    return graph_mod.read_edge_list(spec.path)


def build_costs(cfg: RunConfig, n: int) -> list:
    spec = cfg.costs
    if spec.kind == "quadratic":
        base = cfg.seed if spec.seed is None else spec.seed
        return [costs_mod.random_quadratic(spec.p, base + i) for i in range(n)]
    if spec.kind == "abs":
        return [costs_mod.AbsCost(spec.weight) for _ in range(n)]
    P, q = spec.P, spec.q
    if len(P) != n or len(q) != n:
        raise ConfigValidationError(
            f"explicit costs need one P and q entry per node (n={n}), "
            f"got {len(P)} and {len(q)}"
        )
    r = spec.r if spec.r else tuple(0.0 for _ in range(n))
    return [costs_mod.QuadraticCost(P[i], q[i], r[i]) for i in range(n)]
