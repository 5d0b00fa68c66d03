"""Analysis configuration: a JSON file (or a named preset) plus flag overrides."""

from __future__ import annotations

import json
from dataclasses import dataclass

from .directive import DEFAULT_GROWTH_THRESHOLD, DEFAULT_MAX_SYMBOLS, DirectiveSequence
from .cones import DEFAULT_EPS, DEFAULT_WINDOW
from .errors import InvalidArgumentError
from .morphisms import Alphabet, Morphism
from .presets import preset


class ConfigError(InvalidArgumentError):
    pass


@dataclass
class AnalysisConfig:
    sequence: DirectiveSequence
    name: str = "custom"
    depth: int = 30
    eps: float = DEFAULT_EPS
    growth_threshold: int = DEFAULT_GROWTH_THRESHOLD
    budget: int = DEFAULT_MAX_SYMBOLS
    window: int = DEFAULT_WINDOW
    format: str = "text"

    def validate(self):
        for key in ("depth", "eps", "growth_threshold", "budget", "window"):
            if not getattr(self, key) > 0:
                raise ConfigError(f"field '{key}': must be positive, got {getattr(self, key)!r}")
        if self.depth < 2:
            raise ConfigError(f"field 'depth': must be >= 2, got {self.depth}")
        if self.format not in ("text", "structured"):
            raise ConfigError(f"field 'format': expected text or structured, got {self.format!r}")
        if self.sequence.depth is not None and self.depth > self.sequence.depth:
            raise ConfigError(f"field 'depth': {self.depth} exceeds the {self.sequence.depth} explicit levels")
        return self


def parse_morphism_block(block, where: str) -> Morphism:
    """A morphism block is a rule string (lines or ';'-separated), a list of
    rule strings, or ``{"rules": ..., "codomain": "a b"}``."""
    codomain = None
    if isinstance(block, dict):
        unknown = set(block) - {"rules", "codomain"}
        if unknown:
            raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")
        if "codomain" in block:
            try:
                codomain = Alphabet.of(block["codomain"])
            except InvalidArgumentError as exc:
                raise ConfigError(f"{where}.codomain: {exc}") from None
        block = block.get("rules")
    if isinstance(block, list) and all(isinstance(r, str) for r in block):
        text = "\n".join(block)
    elif isinstance(block, str):
        text = block.replace(";", "\n")
    else:
        raise ConfigError(f"{where}: expected rule text, list of rules, or object with 'rules'")
    try:
        return Morphism.from_text(text, codomain=codomain)
    except InvalidArgumentError as exc:
        raise ConfigError(f"{where}: {exc}") from None


def _indices(data, key, count):
    idx = data.get(key, [])
    if not isinstance(idx, list) or not all(isinstance(i, int) and not isinstance(i, bool) for i in idx):
        raise ConfigError(f"field '{key}': expected a list of morphism indices")
    for i in idx:
        if not 0 <= i < count:
            raise ConfigError(f"field '{key}': index {i} out of range 0..{count - 1}")
    return idx


def sequence_from_dict(data: dict) -> DirectiveSequence:
    kind = data.get("type", "explicit")
    if kind not in ("periodic", "explicit"):
        raise ConfigError(f"field 'type': expected periodic or explicit, got {kind!r}")
    blocks = data.get("morphisms")
    if not isinstance(blocks, list) or not blocks:
        raise ConfigError("field 'morphisms': expected a nonempty list of morphism blocks")
    pool = [parse_morphism_block(b, f"morphisms[{i}]") for i, b in enumerate(blocks)]
    try:
        if kind == "explicit":
            if "period" in data:
                raise ConfigError("field 'period': only valid for type periodic")
            order = _indices(data, "levels", len(pool)) if "levels" in data else range(len(pool))
            return DirectiveSequence.explicit([pool[i] for i in order])
        period = _indices(data, "period", len(pool)) if "period" in data else list(range(len(pool)))
        if not period:
            raise ConfigError("field 'period': must be nonempty")
        prefix = _indices(data, "prefix", len(pool))
        return DirectiveSequence.periodic([pool[i] for i in period], [pool[i] for i in prefix])
    except ConfigError:
        raise
    except InvalidArgumentError as exc:
        raise ConfigError(f"field 'morphisms': {exc}") from None


_NUMERIC = {"depth": int, "eps": float, "growth_threshold": int, "budget": int, "window": int}
_KNOWN = {"type", "morphisms", "period", "prefix", "levels", "name", "format", *_NUMERIC}


def config_from_dict(data: dict, name: str = "custom") -> AnalysisConfig:
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(data) - _KNOWN
    if unknown:
        raise ConfigError(f"unknown fields {sorted(unknown)}")
    cfg = AnalysisConfig(sequence_from_dict(data), name=data.get("name", name))
    for key, conv in _NUMERIC.items():
        if key in data:
            val = data[key]
            if isinstance(val, bool) or not isinstance(val, (int, float)):
                raise ConfigError(f"field '{key}': expected a number, got {val!r}")
            if conv is int and float(val) != int(val):
                raise ConfigError(f"field '{key}': expected an integer, got {val!r}")
            setattr(cfg, key, conv(val))
    if "format" in data:
        cfg.format = data["format"]
    return cfg


def load_config(path: str) -> AnalysisConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    try:
        return config_from_dict(data, name=path)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def preset_config(name: str) -> AnalysisConfig:
    try:
        return AnalysisConfig(preset(name), name=name)
    except InvalidArgumentError as exc:
        raise ConfigError(str(exc)) from None
