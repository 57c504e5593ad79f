"""Flat ``key = value`` text files shared by tracker configs and synth scripts."""

import dataclasses
import types
import typing
from pathlib import Path


def parse_kv(text, source="<config>"):
    """Parse ``key = value`` (or ``key: value``) lines; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        sep = "=" if "=" in line else ":" if ":" in line else None
        if sep is None:
            raise ValueError(f"{source}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split(sep, 1))
        if not key:
            raise ValueError(f"{source}:{lineno}: missing key")
        if key in out:
            raise ValueError(f"{source}:{lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def _coerce(value, annotation, key):
    origin = typing.get_origin(annotation)
    if origin in (typing.Union, types.UnionType):
        args = [a for a in typing.get_args(annotation) if a is not type(None)]
        if value.lower() in ("none", "null", ""):
            return None
        annotation = args[0]
    try:
        if annotation is bool:
            lowered = value.lower()
            if lowered in ("1", "true", "yes", "on"):
                return True
            if lowered in ("0", "false", "no", "off"):
                return False
            raise ValueError(value)
        if annotation is int:
            return int(value)
        if annotation is float:
            return float(value)
    except ValueError:
        raise ValueError(f"bad value for {key!r}: {value!r} (expected {annotation.__name__})") from None
    return value


def build_dataclass(cls, values, source="<config>"):
    """Instantiate ``cls`` from string values; unknown keys are errors."""
    hints = typing.get_type_hints(cls)
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = sorted(set(values) - names)
    if unknown:
        raise ValueError(f"{source}: unknown key(s) {', '.join(unknown)}")
    kwargs = {k: _coerce(v, hints[k], k) if isinstance(v, str) else v for k, v in values.items()}
    return cls(**kwargs)


def load_dataclass(cls, path):
    path = Path(path)
    return build_dataclass(cls, parse_kv(path.read_text(), str(path)), str(path))
