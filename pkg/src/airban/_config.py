"""Flat ``key=value`` config files shared by curves, profiles and runs."""

from __future__ import annotations

from pathlib import Path

from .errors import ConfigError, InputError


def read_keyvalue(path) -> dict[str, str]:
    """Read a ``key=value`` file.

    Blank lines and lines starting with ``#`` are skipped. Keys are
    lower-cased and stripped; values are stripped but otherwise verbatim.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read config file {path}: {exc}") from exc
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, value = line.split("=", 1)
        key = key.strip().lower()
        if not key:
            raise ConfigError(f"{path}:{lineno}: empty key")
        if key in out:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        out[key] = value.strip()
    return out


def get_float(values: dict[str, str], key: str, default=None, *, source="config") -> float:
    if key not in values:
        if default is None:
            raise ConfigError(f"{source}: missing key {key!r}")
        return float(default)
    try:
        return float(values[key])
    except ValueError:
        raise ConfigError(f"{source}: {key}={values[key]!r} is not numeric") from None


def split_list(value: str) -> list[str]:
    return [item.strip() for item in value.split(",") if item.strip()]
