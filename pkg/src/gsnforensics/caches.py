"""Cache parsers: Picasso .o/.i pairs, volley JSON entries, string carving.

The carve routine recovers the last-message previews the Badoo cache blob
holds without assuming a binary layout: it finds printable UTF-8 runs and
groups the ones adjacent to a URL-shaped run into one record.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass
from datetime import datetime
from typing import Optional

from .model import (
    AppId,
    ArtifactSource,
    CachedImage,
    CarvedMessagePreview,
    MalformedTimestamp,
    VolleyMatchEvent,
    normalize_epoch,
)

# Printable ASCII or multi-byte UTF-8 sequences; run length checked in chars.
_UTF8_RUN_RE = re.compile(
    rb"(?:[\x20-\x7e]|[\xc2-\xdf][\x80-\xbf]|[\xe0-\xef][\x80-\xbf]{2})+"
)
_URL_TEXT_RE = re.compile(r"https?://\S+")

_MATCH_ID_KEYS = ("match_id", "matchid")
_EVENT_DATE_KEYS = ("date", "created", "occurred_at", "timestamp")


class CacheParseError(ValueError):
    pass


@dataclass(frozen=True)
class PicassoEntry:
    meta_path: str
    image_path: str
    request_url: str
    image: CachedImage


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def classify_image_bytes(data: bytes) -> str:
    if data.startswith(b"\xff\xd8\xff"):
        return "JPEG"
    if data.startswith(b"\x89PNG\r\n\x1a\n"):
        return "PNG"
    if data[:4] == b"RIFF" and data[8:12] == b"WEBP":
        return "WebP"
    return "unknown"


def parse_picasso_pair(
    meta_bytes: bytes,
    image_bytes: bytes,
    meta_source: ArtifactSource,
    image_source: ArtifactSource,
    app: AppId,
) -> PicassoEntry:
    """Extract the request URL from a .o file and hash its .i image twin.

    Only the request line matters; header ordering after it is irrelevant.
    """
    url = None
    for line in meta_bytes.splitlines():
        if line.startswith(b"GET "):
            target = line[4:].strip().split(b" ", 1)[0]
            if target:
                url = target.decode("utf-8", errors="replace")
            break
    if url is None:
        raise CacheParseError(f"no GET request line in {meta_source.file_path}")
    image = CachedImage(
        app=app,
        origin_url=url,
        content_hash=sha256_hex(image_bytes),
        format=classify_image_bytes(image_bytes),
        bytes_ref=image_source,
    )
    return PicassoEntry(meta_source.file_path, image_source.file_path, url, image)


def _event_instant(value) -> Optional[datetime]:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        try:
            return normalize_epoch(int(value))[0]
        except MalformedTimestamp:
            return None
    if isinstance(value, str):
        try:
            return normalize_epoch(int(value))[0]
        except (ValueError, MalformedTimestamp):
            pass
        try:
            parsed = datetime.fromisoformat(value.replace("Z", "+00:00"))
            return parsed
        except ValueError:
            return None
    return None


def _walk_json(node, found: list) -> None:
    if isinstance(node, dict):
        keys = {k.lower(): k for k in node}
        for candidate in _MATCH_ID_KEYS:
            if candidate in keys:
                found.append(node)
                break
        for value in node.values():
            _walk_json(value, found)
    elif isinstance(node, list):
        for item in node:
            _walk_json(item, found)


def parse_volley_match_cache(
    data: bytes, source: ArtifactSource
) -> tuple[list[VolleyMatchEvent], list[str]]:
    """Parse match events out of a volley cache file, in file order.

    Volley entries may carry a binary header before the JSON body and may
    hold several concatenated JSON documents.
    """
    warnings: list[str] = []
    start = data.find(b"{")
    if start < 0:
        warnings.append(f"no JSON payload found in {source.file_path}")
        return [], warnings
    text = data[start:].decode("utf-8", errors="replace")
    decoder = json.JSONDecoder()
    objects = []
    pos = 0
    while pos < len(text):
        brace = text.find("{", pos)
        if brace < 0:
            break
        try:
            obj, end = decoder.raw_decode(text, brace)
        except ValueError:
            pos = brace + 1
            continue
        objects.append(obj)
        pos = end

    events = []
    for obj in objects:
        holders: list = []
        _walk_json(obj, holders)
        for holder in holders:
            keys = {k.lower(): k for k in holder}
            match_key = next(k for k in _MATCH_ID_KEYS if k in keys)
            occurred = None
            for date_key in _EVENT_DATE_KEYS:
                if date_key in keys:
                    occurred = _event_instant(holder[keys[date_key]])
                    break
            events.append(
                VolleyMatchEvent(
                    match_id=str(holder[keys[match_key]]),
                    matched=bool(holder.get(keys.get("matched", "matched"), False)),
                    occurred_at=occurred,
                    source=source,
                )
            )
    if not events:
        warnings.append(f"JSON payload without match events in {source.file_path}")
    return events, warnings


@dataclass(frozen=True)
class CarveGrammar:
    min_chars: int = 3  # shortest printable run worth keeping
    window: int = 32  # max byte gap between runs of one record


@dataclass(frozen=True)
class _Run:
    start: int
    end: int
    text: str

    @property
    def is_url(self) -> bool:
        return bool(_URL_TEXT_RE.match(self.text))


def _find_runs(data: bytes, grammar: CarveGrammar) -> list[_Run]:
    runs = []
    for match in _UTF8_RUN_RE.finditer(data):
        text = match.group().decode("utf-8", errors="replace").strip()
        if len(text) >= grammar.min_chars:
            runs.append(_Run(match.start(), match.end(), text))
    return runs


def carve_string_records(
    data: bytes,
    source: ArtifactSource,
    grammar: CarveGrammar = CarveGrammar(),
    app: AppId = AppId.BADOO,
) -> list[CarvedMessagePreview]:
    """Carve message previews around URL-shaped runs in an opaque blob.

    A record is one URL run plus its adjacent non-URL runs: the run just
    before is read as the username, the two after as last message and
    suburb.  Records are returned in offset order; zero records is valid.
    """
    runs = _find_runs(data, grammar)
    previews = []
    used: set[int] = set()
    for i, run in enumerate(runs):
        if not run.is_url or i in used:
            continue
        username = ""
        first = run.start
        if i > 0 and not runs[i - 1].is_url and i - 1 not in used:
            if run.start - runs[i - 1].end <= grammar.window:
                username = runs[i - 1].text
                first = runs[i - 1].start
                used.add(i - 1)
        trailing = []
        last_end = run.end
        j = i + 1
        while j < len(runs) and len(trailing) < 2:
            nxt = runs[j]
            if nxt.is_url or nxt.start - last_end > grammar.window:
                break
            trailing.append(nxt.text)
            last_end = nxt.end
            used.add(j)
            j += 1
        if not username and not trailing:
            continue  # a lone URL is not a message preview
        used.add(i)
        previews.append(
            CarvedMessagePreview(
                username=username,
                profile_pic_url=run.text,
                last_message=trailing[0] if trailing else "",
                location_suburb=trailing[1] if len(trailing) > 1 else "",
                app=app,
                source=ArtifactSource(
                    file_path=source.file_path,
                    kind=source.kind,
                    byte_range=(first, last_end - first),
                ),
            )
        )
    return previews
