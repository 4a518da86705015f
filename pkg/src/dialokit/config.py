"""Pipeline configuration: documented key set, JSON file, CLI overrides.

Precedence is CLI flag > config file > built-in default. All seeds are
explicit integers; nothing is ever seeded from the clock, so a config file
fully determines a run.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, Mapping, Optional

from .errors import ToolkitError


class ConfigError(ToolkitError):
    """The configuration is unusable (unknown key, missing path, bad value)."""


@dataclass(frozen=True)
class GenerationSettings:
    model_id: str = "mock"
    temperature: float = 0.7
    max_output_tokens: int = 2048
    timeout_s: float = 60.0
    retries: int = 2
    endpoint: Optional[str] = None
    replay_path: Optional[str] = None
    api_key_env: str = "GENERATION_API_KEY"
    concurrency: int = 1
    requests_per_minute: Optional[float] = None


@dataclass(frozen=True)
class PipelineConfig:
    """Everything a pipeline run needs. Paths are resolved against the
    config file's directory when loaded from disk."""

    registry_path: str = ""
    snips_path: Optional[str] = None
    fc_path: Optional[str] = None
    seeds_path: Optional[str] = None
    output_dir: str = "out"
    mask_seed: int = 13
    shuffle_seed: int = 17
    review_seed: int = 19
    mask_probability: float = 0.5
    dedup: bool = False
    review_sample_size: int = 0
    annotation_token: Optional[str] = None
    generation: GenerationSettings = field(default_factory=GenerationSettings)

    def validate(self) -> None:
        if not self.registry_path:
            raise ConfigError("registry path is required")
        if not Path(self.registry_path).exists():
            raise ConfigError(f"registry path does not exist: {self.registry_path}")
        for label, path in (
            ("snips", self.snips_path),
            ("function-calling", self.fc_path),
            ("seed-dialogue", self.seeds_path),
        ):
            if path is not None and not Path(path).exists():
                raise ConfigError(f"{label} source does not exist: {path}")
        if not 0.0 <= self.mask_probability <= 1.0:
            raise ConfigError("mask_probability must lie in [0, 1]")
        if self.review_sample_size < 0:
            raise ConfigError("review_sample_size must be >= 0")
        if self.generation.replay_path is None and self.generation.endpoint is None:
            if self.seeds_path is not None:
                raise ConfigError(
                    "generation needs either a replay_path or an endpoint"
                )


_TOP_LEVEL_KEYS = {f.name for f in fields(PipelineConfig)} - {"generation"}
_GENERATION_KEYS = {f.name for f in fields(GenerationSettings)}


def _resolve(base: Path, value: Optional[str]) -> Optional[str]:
    if value is None:
        return None
    path = Path(value)
    return str(path if path.is_absolute() else base / path)


def config_from_doc(doc: Mapping[str, Any], base_dir: str | Path = ".") -> PipelineConfig:
    base = Path(base_dir)
    unknown = set(doc) - _TOP_LEVEL_KEYS - {"generation"}
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    gen_doc = doc.get("generation", {})
    unknown_gen = set(gen_doc) - _GENERATION_KEYS
    if unknown_gen:
        raise ConfigError(f"unknown generation keys: {sorted(unknown_gen)}")
    generation = GenerationSettings(**gen_doc)
    generation = replace(
        generation, replay_path=_resolve(base, generation.replay_path)
    )
    plain: Dict[str, Any] = {k: v for k, v in doc.items() if k != "generation"}
    config = PipelineConfig(generation=generation, **plain)
    return replace(
        config,
        registry_path=_resolve(base, config.registry_path) or "",
        snips_path=_resolve(base, config.snips_path),
        fc_path=_resolve(base, config.fc_path),
        seeds_path=_resolve(base, config.seeds_path),
        output_dir=_resolve(base, config.output_dir) or "out",
    )


def load_config(path: str | Path) -> PipelineConfig:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config document must be an object")
    return config_from_doc(doc, base_dir=path.parent)


def apply_overrides(config: PipelineConfig, overrides: Mapping[str, Any]) -> PipelineConfig:
    """Overlay non-None CLI values onto a config (flags win over the file)."""
    plain = {k: v for k, v in overrides.items() if v is not None and k in _TOP_LEVEL_KEYS}
    gen = {k: v for k, v in overrides.items() if v is not None and k in _GENERATION_KEYS}
    out = replace(config, **plain)
    if gen:
        out = replace(out, generation=replace(out.generation, **gen))
    return out
