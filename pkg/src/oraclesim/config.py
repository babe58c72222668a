"""Scenario parameters, identifiers, and structural validation.

A scenario is fully described by a ScenarioConfig; every run is keyed by its
seed, so two runs of the same config are byte-identical. Configs are loaded
from YAML key/value trees (see configs/table2.yaml for a commented example).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, is_dataclass
from pathlib import Path

import yaml

MAX_SEED = 2**64 - 1

LATENCY_MODES = ("iid-per-task", "fixed-affinity")
LATENCY_DISTRIBUTIONS = ("uniform", "gaussian")
STRATEGY_KINDS = ("simple", "daon", "iot", "rl")

# Gaussian latency samples are clipped to this floor (seconds).
GAUSSIAN_LATENCY_FLOOR = 0.01


def round_half_up(x: float) -> int:
    """Fraction-to-count conversion: 0.5 rounds up, unlike banker's rounding."""
    return int(math.floor(x + 0.5))


@dataclass(frozen=True)
class LatencyModelSpec:
    """Network latency model for node-to-source fetches.

    mode "iid-per-task" redraws every (node, source) latency each task;
    "fixed-affinity" draws a persistent base latency per pair once and applies
    multiplicative jitter per task. params are (low, high) for uniform and
    (mean, std) for gaussian.
    """

    mode: str = "fixed-affinity"
    distribution: str = "uniform"
    params: tuple[float, float] = (0.1, 2.3)
    jitter_fraction: float = 0.1


@dataclass(frozen=True)
class AdversaryConfig:
    """Fractions of compromised actors; counts are round-half-up of fraction x population."""

    malicious_node_fraction: float = 0.0
    malicious_source_fraction: float = 0.0
    collusion: bool = False

    def malicious_node_count(self, node_count: int) -> int:
        return round_half_up(self.malicious_node_fraction * node_count)

    def malicious_source_count(self, source_count: int) -> int:
        return round_half_up(self.malicious_source_fraction * source_count)


@dataclass(frozen=True)
class RlHyperparams:
    """Hyperparameters of the double-Q source-selection agent."""

    learning_rate: float = 5e-4
    exploration: float = 0.05
    discount: float = 0.99
    memory_size: int = 1000
    batch_size: int = 32
    target_sync_period: int = 100
    hidden_layers: tuple[int, ...] = (64, 64)
    # Each task is an independent round; by default targets are terminal
    # (y = r). Set episodic=False for the bootstrapped form.
    episodic: bool = True
    # Full belief-matrix state (N x M flattened) vs. the agent's own row only.
    full_matrix_state: bool = True


@dataclass(frozen=True)
class StrategySpec:
    """Per-node data-source selection policy.

    kind "simple" picks `fanout` random sources per task, "daon" queries all
    M sources, "iot" uses an idealized latency-reputation assignment of
    `nodes_per_source` nodes per source, "rl" learns selections online.
    """

    kind: str = "rl"
    fanout: int = 1
    nodes_per_source: int = 2

    def label(self) -> str:
        if self.kind == "simple":
            return f"simple-{self.fanout}"
        return self.kind


@dataclass(frozen=True)
class ScenarioConfig:
    """Complete parameterization of one simulated oracle scenario."""

    node_count: int = 50
    source_count: int = 20
    threshold: int = 20
    diversity_k: int = 18
    task_count: int = 1000
    latency_model: LatencyModelSpec = field(default_factory=LatencyModelSpec)
    adversary: AdversaryConfig = field(default_factory=AdversaryConfig)
    strategy: StrategySpec = field(default_factory=StrategySpec)
    rl_params: RlHyperparams = field(default_factory=RlHyperparams)
    seed: int = 1
    # Diversity-checked aggregation (the full protocol). When False the run
    # models a plain threshold-signature baseline: first value to collect t
    # partials wins and source provenance is not verified.
    enforce_diversity: bool = True
    # Emit warnings when the analytical security assumptions (t < M, the
    # collusion population bound) are violated.
    check_assumptions: bool = False
    retry_cap: int = 10
    submission_latency: float = 0.0
    broadcast_latency: float = 0.0


@dataclass(frozen=True)
class ValidationReport:
    """Errors are hard invariant violations; warnings flag broken security assumptions."""

    errors: tuple[str, ...] = ()
    warnings: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.errors


def validate_config(cfg: ScenarioConfig) -> ValidationReport:
    """Check structural invariants of a scenario. Pure: same input, same report.

    A scenario with a non-empty error list must not run; warnings do not
    block execution (attack sweeps intentionally violate the assumptions).
    """
    errors: list[str] = []
    warnings: list[str] = []

    n, m = cfg.node_count, cfg.source_count
    t, k = cfg.threshold, cfg.diversity_k

    for name, value in (("node_count", n), ("source_count", m),
                        ("threshold", t), ("diversity_k", k)):
        if value < 1:
            errors.append(f"{name} must be positive, got {value}")
    if cfg.task_count < 1:
        errors.append(f"task_count must be >= 1, got {cfg.task_count}")
    if t > n:
        errors.append(f"threshold t={t} exceeds node count N={n}")
    if k > m:
        errors.append(f"diversity requirement K={k} exceeds source count M={m}")
    if cfg.enforce_diversity:
        if 2 * k <= m:
            errors.append(f"K must exceed M/2 when diversity is enforced (K={k}, M={m})")
        if k > t:
            errors.append(f"K={k} exceeds threshold t={t}: no t-subset can cover K sources")
    if not 0 <= cfg.seed <= MAX_SEED:
        errors.append(f"seed must fit in 64 unsigned bits, got {cfg.seed}")
    if cfg.retry_cap < 0:
        errors.append(f"retry_cap must be >= 0, got {cfg.retry_cap}")
    if cfg.submission_latency < 0 or cfg.broadcast_latency < 0:
        errors.append("latency constants must be non-negative")

    lm = cfg.latency_model
    if lm.mode not in LATENCY_MODES:
        errors.append(f"unknown latency mode {lm.mode!r}")
    if lm.distribution not in LATENCY_DISTRIBUTIONS:
        errors.append(f"unknown latency distribution {lm.distribution!r}")
    elif lm.distribution == "uniform":
        lo, hi = lm.params
        if not 0 <= lo < hi:
            errors.append(f"uniform latency bounds must satisfy 0 <= low < high, got ({lo}, {hi})")
    else:
        mean, std = lm.params
        if mean <= 0 or std <= 0:
            errors.append(f"gaussian latency needs positive mean and std, got ({mean}, {std})")
    if lm.jitter_fraction < 0:
        errors.append(f"jitter_fraction must be >= 0, got {lm.jitter_fraction}")

    adv = cfg.adversary
    for name, frac in (("malicious_node_fraction", adv.malicious_node_fraction),
                       ("malicious_source_fraction", adv.malicious_source_fraction)):
        if not 0.0 <= frac <= 1.0:
            errors.append(f"{name} must lie in [0, 1], got {frac}")

    st = cfg.strategy
    if st.kind not in STRATEGY_KINDS:
        errors.append(f"unknown strategy kind {st.kind!r}")
    if st.kind == "simple" and not 1 <= st.fanout <= m:
        errors.append(f"simple-n fanout must lie in [1, M], got {st.fanout}")
    if st.kind == "iot" and st.nodes_per_source < 1:
        errors.append(f"iot nodes_per_source must be >= 1, got {st.nodes_per_source}")

    rl = cfg.rl_params
    if rl.learning_rate <= 0:
        errors.append(f"learning_rate must be positive, got {rl.learning_rate}")
    if not 0.0 <= rl.exploration <= 1.0:
        errors.append(f"exploration must lie in [0, 1], got {rl.exploration}")
    if not 0.0 < rl.discount <= 1.0:
        errors.append(f"discount must lie in (0, 1], got {rl.discount}")
    if rl.batch_size < 1:
        errors.append(f"batch_size must be >= 1, got {rl.batch_size}")
    if rl.memory_size < rl.batch_size:
        errors.append(f"memory_size {rl.memory_size} smaller than batch_size {rl.batch_size}")
    if rl.target_sync_period < 1:
        errors.append(f"target_sync_period must be >= 1, got {rl.target_sync_period}")
    if any(w < 1 for w in rl.hidden_layers):
        errors.append(f"hidden layer widths must be positive, got {rl.hidden_layers}")

    # Security-assumption checks (warnings only). The collusion bound
    # compares expected compromised counts against (N + M) / 2.
    if not errors:
        compromised = adv.malicious_node_fraction * n + adv.malicious_source_fraction * m
        if compromised >= (n + m) / 2:
            warnings.append(
                f"compromised population {compromised:g} violates the bound P(D)+P(O) < (N+M)/2 = {(n + m) / 2:g}")
        if adv.malicious_source_fraction * m >= m / 2:
            warnings.append(
                f"malicious source mass {adv.malicious_source_fraction * m:g} is not below M/2 = {m / 2:g}")
        if cfg.check_assumptions and t >= m:
            warnings.append(f"t < M assumption violated (t={t}, M={m})")

    return ValidationReport(errors=tuple(errors), warnings=tuple(warnings))


# --- YAML round trip ---------------------------------------------------------

def _build(cls, data: dict):
    if not isinstance(data, dict):
        raise ValueError(f"expected a mapping for {cls.__name__}, got {type(data).__name__}")
    known = {f.name: f for f in fields(cls)}
    unknown = set(data) - set(known)
    if unknown:
        raise ValueError(f"unknown {cls.__name__} keys: {sorted(unknown)}")
    kwargs = {}
    for name, value in data.items():
        ftype = known[name].type
        if name in ("latency_model", "adversary", "strategy", "rl_params"):
            value = _build(_NESTED[name], value)
        elif isinstance(value, list):
            value = tuple(value)
        kwargs[name] = value
    return cls(**kwargs)


_NESTED = {
    "latency_model": LatencyModelSpec,
    "adversary": AdversaryConfig,
    "strategy": StrategySpec,
    "rl_params": RlHyperparams,
}


def config_from_dict(data: dict) -> ScenarioConfig:
    return _build(ScenarioConfig, data)


def config_to_dict(cfg: ScenarioConfig) -> dict:
    def unfold(obj):
        if is_dataclass(obj):
            return {f.name: unfold(getattr(obj, f.name)) for f in fields(obj)}
        if isinstance(obj, tuple):
            return list(obj)
        return obj

    return unfold(cfg)


def load_config(path: str | Path) -> ScenarioConfig:
    """Parse a YAML scenario file into a validated-shape ScenarioConfig."""
    with open(path, "r", encoding="utf-8") as fh:
        data = yaml.safe_load(fh)
    if data is None:
        data = {}
    return config_from_dict(data)


def save_config(cfg: ScenarioConfig, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        yaml.safe_dump(config_to_dict(cfg), fh, sort_keys=False)
