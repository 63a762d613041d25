"""Line-oriented ``name = value`` config parsing.

Blank lines and ``#`` comments are ignored. Values are floats. Keys may
contain dots (used by space files for ``name.min`` / ``name.max``).
"""

from __future__ import annotations

import os

from .errors import ConfigError


def parse_kv_file(path: str) -> dict[str, float]:
    if not os.path.isfile(path):
        raise ConfigError(path, "config file not found")
    values: dict[str, float] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(path, f"line {lineno}: expected 'name = value'")
            name, _, text = line.partition("=")
            name = name.strip()
            text = text.strip()
            if not name:
                raise ConfigError(path, f"line {lineno}: empty name")
            try:
                value = float(text)
            except ValueError:
                raise ConfigError(
                    path, f"line {lineno}: value for {name!r} is not a number"
                ) from None
            if name in values:
                raise ConfigError(path, f"line {lineno}: duplicate key {name!r}")
            values[name] = value
    return values


def format_kv(values: dict[str, float], header: str | None = None) -> str:
    lines = []
    if header:
        for line in header.splitlines():
            lines.append(f"# {line}" if line else "#")
    for name, value in values.items():
        lines.append(f"{name} = {value!r}")
    return "\n".join(lines) + "\n"
