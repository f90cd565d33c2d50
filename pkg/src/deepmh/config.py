"""Flat key-value run configuration with dotted section names.

The format is one ``key = value`` pair per line, e.g.::

    task = synthetic_bimodal
    sampler.beta = 10000
    sampler.proposal_sigma = 0.1 2
    # comments run to end of line

Values are parsed as int, float, ``true``/``false``, or string; several
whitespace- or comma-separated values form a list. One file drives an
entire experiment so runs stay reproducible.
"""

from __future__ import annotations

from .exceptions import ConfigError

_REQUIRED = object()


def _parse_scalar(token: str):
    try:
        return int(token)
    except ValueError:
        pass
    try:
        return float(token)
    except ValueError:
        pass
    if token.lower() in ("true", "false"):
        return token.lower() == "true"
    return token


def parse_config(text: str, source: str = "<config>") -> dict:
    """Parse configuration text; raises :class:`ConfigError` with line numbers."""
    cfg: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(
                f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}"
            )
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"{source}:{lineno}: empty key")
        if key in cfg:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        tokens = value.replace(",", " ").split()
        if not tokens:
            raise ConfigError(f"{source}:{lineno}: empty value for {key!r}")
        parsed = [_parse_scalar(t) for t in tokens]
        cfg[key] = parsed[0] if len(parsed) == 1 else parsed
    return cfg


def load_config(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    return parse_config(text, source=str(path))


def _coerce(key: str, raw, kind: str):
    if kind == "str":
        if isinstance(raw, (int, float, bool)):
            return str(raw)
        if isinstance(raw, list):
            raise ConfigError(f"{key}: expected a single value, got a list")
        return raw
    if kind == "bool":
        if isinstance(raw, bool):
            return raw
        raise ConfigError(f"{key}: expected true/false, got {raw!r}")
    if kind == "int":
        if isinstance(raw, bool) or not isinstance(raw, int):
            raise ConfigError(f"{key}: expected an integer, got {raw!r}")
        return raw
    if kind == "float":
        if isinstance(raw, bool) or not isinstance(raw, (int, float)):
            raise ConfigError(f"{key}: expected a number, got {raw!r}")
        return float(raw)
    if kind == "floats":
        items = raw if isinstance(raw, list) else [raw]
        out = []
        for item in items:
            if isinstance(item, bool) or not isinstance(item, (int, float)):
                raise ConfigError(f"{key}: expected numbers, got {item!r}")
            out.append(float(item))
        return out
    if kind == "ints":
        items = raw if isinstance(raw, list) else [raw]
        out = []
        for item in items:
            if isinstance(item, bool) or not isinstance(item, int):
                raise ConfigError(f"{key}: expected integers, got {item!r}")
            out.append(item)
        return out
    raise ValueError(f"unknown coercion kind {kind!r}")


def cfg_get(cfg: dict, key: str, kind: str = "str", default=_REQUIRED):
    """Typed lookup with a clear error naming the missing/malformed key."""
    if key not in cfg:
        if default is _REQUIRED:
            raise ConfigError(f"missing required config key {key!r}")
        return default
    return _coerce(key, cfg[key], kind)
