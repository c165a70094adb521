"""Sectioned key-value run configuration.

Configs are plain INI text (configparser syntax).  Each scenario ships a
complete default table; a config file and then ``--set section.key=value``
overrides are layered on top.  Unknown keys are rejected with the full
field path so typos fail before any computation starts.
"""

from __future__ import annotations

import configparser
import hashlib
from dataclasses import dataclass

from ..errors import ConfigError


@dataclass(frozen=True)
class RunConfig:
    values: tuple   # ((section, ((key, value), ...)), ...) canonical, sorted

    @classmethod
    def from_dict(cls, table: dict) -> "RunConfig":
        canon = tuple(sorted(
            (sec, tuple(sorted((k, str(v)) for k, v in kv.items())))
            for sec, kv in table.items()))
        return cls(values=canon)

    def as_dict(self) -> dict:
        return {sec: dict(kv) for sec, kv in self.values}

    def _lookup(self, path: str) -> str:
        sec, _, key = path.partition(".")
        for s, kv in self.values:
            if s == sec:
                for k, v in kv:
                    if k == key:
                        return v
                raise ConfigError(f"unknown config key '{path}'")
        raise ConfigError(f"unknown config section '{sec}'")

    def get_str(self, path: str) -> str:
        return self._lookup(path)

    def get_int(self, path: str) -> int:
        raw = self._lookup(path)
        try:
            return int(raw)
        except ValueError:
            raise ConfigError(f"config key '{path}': expected integer, got {raw!r}") from None

    def get_float(self, path: str) -> float:
        raw = self._lookup(path)
        try:
            return float(raw)
        except ValueError:
            raise ConfigError(f"config key '{path}': expected number, got {raw!r}") from None

    def get_int_list(self, path: str) -> list:
        raw = self._lookup(path).strip()
        if not raw:
            return []
        try:
            return [int(tok) for tok in raw.split(",")]
        except ValueError:
            raise ConfigError(
                f"config key '{path}': expected comma-separated integers, got {raw!r}"
            ) from None

    def hash(self) -> str:
        """16-hex digest over the canonical key=value lines."""
        lines = [f"{sec}.{k}={v}"
                 for sec, kv in self.values for k, v in kv]
        digest = hashlib.sha256("\n".join(lines).encode("utf-8")).hexdigest()
        return digest[:16]

    def flat_items(self):
        for sec, kv in self.values:
            for k, v in kv:
                yield f"{sec}.{k}", v


def _apply(table: dict, path: str, value: str, source: str) -> None:
    sec, _, key = path.partition(".")
    if not key:
        raise ConfigError(f"{source}: expected section.key, got '{path}'")
    if sec not in table:
        known = ", ".join(sorted(table))
        raise ConfigError(f"{source}: unknown section '{sec}' (known: {known})")
    if key not in table[sec]:
        known = ", ".join(sorted(table[sec]))
        raise ConfigError(
            f"{source}: unknown key '{sec}.{key}' (known in [{sec}]: {known})")
    table[sec][key] = value


def load_config(defaults: dict, path: str | None = None,
                overrides: list | None = None) -> RunConfig:
    """Layer defaults <- optional INI file <- --set overrides."""
    table = {sec: dict(kv) for sec, kv in defaults.items()}
    if path is not None:
        parser = configparser.ConfigParser(interpolation=None)
        try:
            with open(path, "r", encoding="utf-8") as fh:
                parser.read_file(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from None
        except configparser.Error as exc:
            raise ConfigError(f"cannot parse config file {path}: {exc}") from None
        for sec in parser.sections():
            for key, value in parser.items(sec):
                _apply(table, f"{sec}.{key}", value, f"config file {path}")
    for item in overrides or []:
        path_part, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects section.key=value, got '{item}'")
        _apply(table, path_part.strip(), value.strip(), "--set override")
    return RunConfig.from_dict(table)
