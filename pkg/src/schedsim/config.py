"""JSON experiment configuration.

Example::

    {
      "algorithms": ["rr", "aco", "hybrid"],
      "task_counts": [50, 100, 200, 400],
      "num_resources": 10,
      "task_length_range": [100, 1000],
      "mips_range": [100, 1000],
      "seeds": [0, 1, 2],
      "aco": {"alpha": 1.0, "beta": 2.0, "max_iterations": 100},
      "csa": {"clone_factor": 3},
      "hybrid": {"csa_generations_per_iteration": 20}
    }

Every key is optional; missing keys take the defaults below.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields
from pathlib import Path

from .aco import AcoParams
from .csa import CsaParams
from .hybrid import HybridParams

ALGORITHMS = ("rr", "aco", "hybrid")


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending key or line."""


@dataclass(frozen=True)
class ExperimentConfig:
    algorithms: tuple[str, ...] = ALGORITHMS
    task_counts: tuple[int, ...] = (50, 100, 200, 400)
    num_resources: int = 10
    task_length_range: tuple[float, float] = (100.0, 1000.0)
    mips_range: tuple[float, float] = (100.0, 1000.0)
    seeds: tuple[int, ...] = tuple(range(20))
    hybrid: HybridParams = field(default_factory=HybridParams)

    @property
    def aco(self) -> AcoParams:
        return self.hybrid.aco

    @property
    def csa(self) -> CsaParams:
        return self.hybrid.csa

    def restrict(self, algo: str | None = None, seed: int | None = None) -> "ExperimentConfig":
        kw = {f.name: getattr(self, f.name) for f in fields(self)}
        if algo is not None:
            if algo not in ALGORITHMS:
                raise ConfigError(f"--algo: unknown algorithm {algo!r}")
            kw["algorithms"] = (algo,)
        if seed is not None:
            if seed < 0:
                raise ConfigError(f"--seed: must be non-negative, got {seed}")
            kw["seeds"] = (seed,)
        return ExperimentConfig(**kw)


_TOP_KEYS = {"algorithms", "task_counts", "num_resources", "task_length_range", "mips_range", "seeds",
             "aco", "csa", "hybrid"}


def _block(raw: dict, name: str, cls, extra=()):
    sub = raw.get(name, {})
    if not isinstance(sub, dict):
        raise ConfigError(f"{name}: expected an object")
    allowed = {f.name for f in fields(cls)} - set(extra)
    for key in sub:
        if key not in allowed:
            raise ConfigError(f"{name}.{key}: unknown key")
    defaults = {f.name: f.default for f in fields(cls)}
    out = {}
    for key, value in sub.items():
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{name}.{key}: expected a number, got {value!r}")
        if isinstance(defaults[key], int):
            if int(value) != value:
                raise ConfigError(f"{name}.{key}: expected an integer, got {value!r}")
            value = int(value)
        out[key] = value
    return out


def _int_list(raw, key, minimum):
    value = raw[key]
    if not isinstance(value, list) or not value:
        raise ConfigError(f"{key}: expected a non-empty list")
    for v in value:
        if isinstance(v, bool) or not isinstance(v, int) or v < minimum:
            raise ConfigError(f"{key}: entries must be integers >= {minimum}, got {v!r}")
    return tuple(value)


def _range(raw, key):
    value = raw[key]
    if (not isinstance(value, list) or len(value) != 2
            or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)):
        raise ConfigError(f"{key}: expected [min, max]")
    lo, hi = float(value[0]), float(value[1])
    if not 0 < lo <= hi:
        raise ConfigError(f"{key}: need 0 < min <= max, got [{lo}, {hi}]")
    return lo, hi


def config_from_dict(raw: dict) -> ExperimentConfig:
    if not isinstance(raw, dict):
        raise ConfigError("top level: expected an object")
    for key in raw:
        if key not in _TOP_KEYS:
            raise ConfigError(f"{key}: unknown key")
    kw = {}
    if "algorithms" in raw:
        algos = raw["algorithms"]
        if not isinstance(algos, list) or not algos or any(a not in ALGORITHMS for a in algos):
            raise ConfigError(f"algorithms: expected a non-empty subset of {list(ALGORITHMS)}")
        kw["algorithms"] = tuple(dict.fromkeys(algos))
    if "task_counts" in raw:
        kw["task_counts"] = _int_list(raw, "task_counts", 1)
    if "seeds" in raw:
        kw["seeds"] = _int_list(raw, "seeds", 0)
    if "num_resources" in raw:
        v = raw["num_resources"]
        if isinstance(v, bool) or not isinstance(v, int) or v < 1:
            raise ConfigError(f"num_resources: expected a positive integer, got {v!r}")
        kw["num_resources"] = v
    for key in ("task_length_range", "mips_range"):
        if key in raw:
            kw[key] = _range(raw, key)

    aco_kw = _block(raw, "aco", AcoParams)
    csa_kw = _block(raw, "csa", CsaParams)
    hyb_kw = _block(raw, "hybrid", HybridParams, extra=("aco", "csa"))
    for name, cls, sub in (("aco", AcoParams, aco_kw), ("csa", CsaParams, csa_kw)):
        try:
            cls(**sub)
        except ValueError as exc:
            raise ConfigError(f"{name}: {exc}") from None
    try:
        kw["hybrid"] = HybridParams(aco=AcoParams(**aco_kw), csa=CsaParams(**csa_kw), **hyb_kw)
    except ValueError as exc:
        raise ConfigError(f"hybrid: {exc}") from None
    return ExperimentConfig(**kw)


def load_config(path) -> ExperimentConfig:
    text = Path(path).read_text()
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    try:
        return config_from_dict(raw)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from None
