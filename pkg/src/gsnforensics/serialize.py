"""Stable JSON-friendly encoding shared by reports, manifests and tests."""

from __future__ import annotations

import dataclasses
import enum
from datetime import date, datetime
from pathlib import Path

from .model import iso_instant


def to_jsonable(value):
    """Recursively convert records to JSON-safe primitives, deterministically."""
    if isinstance(value, enum.Enum):
        return value.value
    if isinstance(value, datetime):  # must precede the date check
        return iso_instant(value)
    if isinstance(value, date):
        return value.isoformat()
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, bytes):
        return value.hex()
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        return {f.name: to_jsonable(getattr(value, f.name)) for f in dataclasses.fields(value)}
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, (set, frozenset)):
        return sorted(to_jsonable(v) for v in value)
    return value


def image_link_to_dict(link) -> dict:
    return {
        "app": link.app.value,
        "profile_id": link.profile_id,
        "url": link.image.origin_url,
        "content_hash": link.image.content_hash,
        "via": link.via,
    }
