"""HTTP transaction ingest, PII leak detection, and the summary leak matrix.

Input is a normalized NDJSON capture (one transaction per line) rather than
raw packets; TLS/PCAP decoding is out of scope.  Detection is a pure
function of the transactions (plus known token values), so identical logs
always yield identical findings.
"""

from __future__ import annotations

import base64
import enum
import json
import re
import urllib.parse
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Iterable, Optional, Sequence

from .model import AppId, EvidenceBundle, TokenProvider
from .appregistry import app_from_name

# Decimal degree with 4+ fraction digits, not embedded in a larger number.
_COORD_RE = re.compile(rb"(?<![\d.])[-+]?\d{1,3}\.\d{4,}")
_COORD_PAIR_GAP = 40  # max bytes between the two decimals of a bare pair

_KEYED_LAT_RE = re.compile(rb"(?i)\blat(?:itude)?\b[\"']?\s*[=:]\s*[\"']?([-+]?\d{1,3}\.\d+)")
_KEYED_LON_RE = re.compile(rb"(?i)\b(?:lon(?:gitude)?|lng)\b[\"']?\s*[=:]\s*[\"']?([-+]?\d{1,3}\.\d+)")

_EMAIL_RE = re.compile(rb"[A-Za-z0-9._%+-]+@[A-Za-z0-9.-]+\.[A-Za-z]{2,}")

_MESSAGE_PATH_HINTS = ("/chat", "/message", "/send", "/im/")
_MESSAGE_JSON_RE = re.compile(rb"\"(?:message|text|body|msg)\"\s*:")
_MESSAGE_FORM_RE = re.compile(rb"(?:^|[&?])(?:message|text|body|msg)=")

_IMAGE_MAGICS = (b"\xff\xd8\xff", b"\x89PNG\r\n\x1a\n")

_COARSE_FIELDS = (b"country", b"state", b"city", b"distance")
_SUBURB_FIELD = b"suburb"


def _field_pattern(name: bytes) -> re.Pattern:
    return re.compile(
        rb"(?i)(?:<\s*" + name + rb"\b[^>]*>|\"" + name + rb"\"\s*:|(?:^|[&?])" + name + rb"=)"
    )


_COARSE_RES = {name.decode(): _field_pattern(name) for name in _COARSE_FIELDS}
_SUBURB_RE = _field_pattern(_SUBURB_FIELD)


class IngestError(ValueError):
    pass


class LeakCategory(enum.Enum):
    PLAINTEXT_MESSAGE = "PlaintextMessage"
    PLAINTEXT_IMAGE = "PlaintextImage"
    EXACT_LOCATION = "ExactLocation"
    COARSE_LOCATION = "CoarseLocation"
    EMAIL_ADDRESS = "EmailAddress"
    TOKEN_IN_TRANSIT = "TokenInTransit"
    LOCATION_IN_FILENAME = "LocationInFilename"


@dataclass(frozen=True)
class HttpTransaction:
    at: datetime
    method: str
    url: str
    tls: bool
    request_headers: dict
    request_body: bytes
    response_status: int
    response_headers: dict
    response_body: bytes
    app_hint: Optional[AppId] = None


@dataclass(frozen=True)
class LeakEvidence:
    transaction_index: int
    location: str  # "url" | "req_body" | "resp_body"
    span: tuple  # (offset, length) within that field


@dataclass(frozen=True)
class LeakFinding:
    category: LeakCategory
    severity: str  # "info" | "medium" | "high"
    app: AppId
    evidence: LeakEvidence
    description: str


def ingest_transactions(lines: Iterable) -> tuple[list[HttpTransaction], list[str]]:
    """Parse NDJSON transaction lines; malformed lines are counted, not fatal."""
    transactions = []
    warnings = []
    try:
        iterator = iter(lines)
    except TypeError as exc:
        raise IngestError(f"unreadable transaction stream: {exc}") from exc
    for lineno, line in enumerate(iterator, start=1):
        if isinstance(line, bytes):
            line = line.decode("utf-8", errors="replace")
        line = line.strip()
        if not line:
            continue
        try:
            doc = json.loads(line)
            if not isinstance(doc, dict):
                raise ValueError("transaction line is not an object")
            transactions.append(_transaction_from(doc))
        except (ValueError, KeyError, TypeError) as exc:
            warnings.append(f"line {lineno}: skipped malformed transaction ({exc})")
    return transactions, warnings


def _transaction_from(doc: dict) -> HttpTransaction:
    url = str(doc["url"])
    if not urllib.parse.urlsplit(url).scheme:
        raise ValueError(f"url without scheme: {url!r}")
    app_name = doc.get("app")
    app_hint = app_from_name(str(app_name)) if app_name else None
    return HttpTransaction(
        at=datetime.fromtimestamp(float(doc["ts"]), tz=timezone.utc),
        method=str(doc["method"]).upper(),
        url=url,
        tls=bool(doc["tls"]),
        request_headers=dict(doc.get("req_headers") or {}),
        request_body=base64.b64decode(doc.get("req_body_b64") or ""),
        response_status=int(doc.get("status") or 0),
        response_headers=dict(doc.get("resp_headers") or {}),
        response_body=base64.b64decode(doc.get("resp_body_b64") or ""),
        app_hint=app_hint,
    )


def _valid_pair(a: float, b: float) -> bool:
    return (abs(a) <= 90.0 and abs(b) <= 180.0) or (abs(a) <= 180.0 and abs(b) <= 90.0)


def _bare_pair_span(data: bytes) -> Optional[tuple]:
    hits = list(_COORD_RE.finditer(data))
    for i, first in enumerate(hits):
        for second in hits[i + 1:]:
            if second.start() - first.end() > _COORD_PAIR_GAP:
                break  # later hits only get farther away
            if _valid_pair(float(first.group()), float(second.group())):
                return (first.start(), second.end() - first.start())
    return None


def _keyed_pair_span(data: bytes) -> Optional[tuple]:
    lat = _KEYED_LAT_RE.search(data)
    lon = _KEYED_LON_RE.search(data)
    if not lat or not lon:
        return None
    lat_v, lon_v = float(lat.group(1)), float(lon.group(1))
    if not (-90.0 <= lat_v <= 90.0 and -180.0 <= lon_v <= 180.0):
        return None
    start = min(lat.start(), lon.start())
    end = max(lat.end(), lon.end())
    return (start, end - start)


def _coord_pair_span(data: bytes) -> Optional[tuple]:
    return _bare_pair_span(data) or _keyed_pair_span(data)


def _coarse_span(data: bytes) -> Optional[tuple]:
    suburb = _SUBURB_RE.search(data)
    if suburb:
        return (suburb.start(), suburb.end() - suburb.start())
    hits = [m for rx in _COARSE_RES.values() if (m := rx.search(data))]
    if len(hits) >= 2:
        start = min(m.start() for m in hits)
        end = max(m.end() for m in hits)
        return (start, end - start)
    return None


def detect_leaks(
    transactions: Sequence[HttpTransaction], known_tokens: Sequence = ()
) -> list[LeakFinding]:
    """Classify PII exposure; one finding per (transaction, category)."""
    findings = []
    token_values = [t.token.encode() for t in known_tokens if t.token]
    token_apps = {t.token.encode(): t.app for t in known_tokens if t.token}
    for index, txn in enumerate(transactions):
        app = txn.app_hint or AppId.UNKNOWN
        split = urllib.parse.urlsplit(txn.url)
        url_bytes = txn.url.encode()
        query_bytes = split.query.encode()
        filename = split.path.rsplit("/", 1)[-1].encode()
        fields = (
            ("url", url_bytes),
            ("req_body", txn.request_body),
            ("resp_body", txn.response_body),
        )

        def emit(category, severity, location, span, description):
            findings.append(
                LeakFinding(
                    category=category,
                    severity=severity,
                    app=app,
                    evidence=LeakEvidence(index, location, span),
                    description=description,
                )
            )

        # (a) plaintext chat payloads
        if not txn.tls:
            span = None
            location = None
            if any(h in split.path.lower() for h in _MESSAGE_PATH_HINTS):
                pos = txn.url.lower().find(split.path.lower())
                span = (max(pos, 0), len(split.path))
                location = "url"
            else:
                for loc, data in fields[1:]:
                    m = _MESSAGE_JSON_RE.search(data) or _MESSAGE_FORM_RE.search(data)
                    if m:
                        span, location = (m.start(), m.end() - m.start()), loc
                        break
            if span is not None:
                emit(
                    LeakCategory.PLAINTEXT_MESSAGE, "high", location, span,
                    "chat message content transmitted without encryption",
                )

        # (b) plaintext image bodies
        if not txn.tls and txn.response_body[:8]:
            body = txn.response_body
            if body.startswith(_IMAGE_MAGICS) or (body[:4] == b"RIFF" and body[8:12] == b"WEBP"):
                emit(
                    LeakCategory.PLAINTEXT_IMAGE, "high", "resp_body", (0, min(12, len(body))),
                    "image content transmitted without encryption",
                )

        # (c) exact coordinates in query or bodies
        for location, data in (("url", query_bytes), ("req_body", txn.request_body),
                               ("resp_body", txn.response_body)):
            span = _coord_pair_span(data)
            if span is not None:
                if location == "url" and split.query:
                    offset = txn.url.find(split.query)
                    span = (offset + span[0], span[1])
                emit(
                    LeakCategory.EXACT_LOCATION,
                    "high" if not txn.tls else "medium",
                    location, span,
                    "precise latitude/longitude pair transmitted",
                )
                break

        # (d) coordinates inside the filename segment of the URL path
        span = _coord_pair_span(filename)
        if span is not None:
            offset = txn.url.find(split.path.rsplit("/", 1)[-1])
            emit(
                LeakCategory.LOCATION_IN_FILENAME, "high", "url",
                (offset + span[0] if offset >= 0 else span[0], span[1]),
                "precise coordinates embedded in a requested filename",
            )

        # (e) email addresses on the wire, plaintext only
        if not txn.tls:
            for location, data in fields:
                m = _EMAIL_RE.search(data)
                if m:
                    emit(
                        LeakCategory.EMAIL_ADDRESS, "medium", location,
                        (m.start(), m.end() - m.start()),
                        "email address transmitted without encryption",
                    )
                    break

        # (f) recovered credentials appearing in traffic
        for value in token_values:
            hit = None
            for location, data in fields:
                pos = data.find(value)
                if pos >= 0:
                    hit = (location, (pos, len(value)))
                    break
            if hit is not None:
                emit(
                    LeakCategory.TOKEN_IN_TRANSIT,
                    "info" if txn.tls else "medium",
                    hit[0], hit[1],
                    f"recovered {token_apps[value].value} credential observed in traffic",
                )
                break

        # (g) coarse location fields (country/state/suburb/distance)
        for location, data in (("url", url_bytes), ("req_body", txn.request_body),
                               ("resp_body", txn.response_body)):
            span = _coarse_span(data)
            if span is not None:
                emit(
                    LeakCategory.COARSE_LOCATION,
                    "medium" if not txn.tls else "info",
                    location, span,
                    "suburb/region level location fields transmitted",
                )
                break

    return _dedup_findings(findings)


def _dedup_findings(findings: list[LeakFinding]) -> list[LeakFinding]:
    seen = set()
    unique = []
    for finding in findings:
        key = (finding.evidence.transaction_index, finding.category)
        if key not in seen:
            seen.add(key)
            unique.append(finding)
    return unique


# -- Summary matrix ----------------------------------------------------------

NONE_OBSERVED = "none observed"

APP_ROW_ORDER = (
    AppId.BADOO, AppId.GRINDR, AppId.SKOUT, AppId.TINDER,
    AppId.MEETME, AppId.JAUMO, AppId.FULLCIRCLE, AppId.MIUMEET,
)

# Strongest-first evidence classes per column.
_MESSAGE_RANK = ("plaintext-network", "database", "cached-preview")
_IMAGE_RANK = ("plaintext-network", "cached-on-device", "urls-in-database")
_LOCATION_RANK = (
    "exact-over-network", "exact-in-filename", "exact-on-device",
    "coarse-over-network", "suburb-cached",
)
_EMAIL_RANK = ("plaintext-network", "on-device")


@dataclass(frozen=True)
class MatrixRow:
    app: AppId
    app_label: str
    messages: str
    images: str
    location: str
    email_address: str
    auth_method: str
    observed: dict  # column -> every evidence class seen, not just the strongest


def _strongest(observed: set, rank: tuple) -> str:
    for cls in rank:
        if cls in observed:
            return cls
    return NONE_OBSERVED


def build_leak_matrix(
    findings: Sequence[LeakFinding], bundle: EvidenceBundle
) -> list[MatrixRow]:
    """One row per detected app; each cell is the strongest evidence class."""
    by_app_findings: dict[AppId, set] = {}
    for f in findings:
        by_app_findings.setdefault(f.app, set()).add(f.category)

    present = {i.app for i in bundle.installs}
    present.update(by_app_findings)
    for collection in (bundle.messages, bundle.tokens, bundle.previews, bundle.images):
        present.update(item.app for item in collection)
    present.discard(AppId.UNKNOWN)
    unknown_row = AppId.UNKNOWN in by_app_findings

    ordered = [a for a in APP_ROW_ORDER if a in present]
    ordered.extend(sorted((a for a in present if a not in APP_ROW_ORDER), key=lambda a: a.value))
    if unknown_row:
        ordered.append(AppId.UNKNOWN)

    rows = []
    for app in ordered:
        categories = by_app_findings.get(app, set())

        messages = set()
        if any(m.app is app for m in bundle.messages):
            messages.add("database")
        if LeakCategory.PLAINTEXT_MESSAGE in categories:
            messages.add("plaintext-network")
        if any(p.app is app for p in bundle.previews):
            messages.add("cached-preview")

        images = set()
        if any(i.app is app for i in bundle.images):
            images.add("cached-on-device")
        if any(u.app is app for u in bundle.media_urls):
            images.add("urls-in-database")
        if LeakCategory.PLAINTEXT_IMAGE in categories:
            images.add("plaintext-network")

        location = set()
        if LeakCategory.EXACT_LOCATION in categories:
            location.add("exact-over-network")
        if LeakCategory.LOCATION_IN_FILENAME in categories:
            location.add("exact-in-filename")
        if LeakCategory.COARSE_LOCATION in categories:
            location.add("coarse-over-network")
        for fix in bundle.locations:
            if fix.app is app and fix.precision == "exact":
                location.add("exact-on-device")
            elif fix.app is app and fix.precision == "suburb":
                location.add("suburb-cached")

        email = set()
        if any(e.app is app for e in bundle.emails):
            email.add("on-device")
        if LeakCategory.EMAIL_ADDRESS in categories:
            email.add("plaintext-network")

        providers = sorted(
            {t.provider.value for t in bundle.tokens if t.app is app}
        )
        if TokenProvider.OTHER.value in providers and len(providers) > 1:
            providers.remove(TokenProvider.OTHER.value)
        auth = " + ".join(f"{p} Token" for p in providers) if providers else NONE_OBSERVED

        rows.append(
            MatrixRow(
                app=app,
                app_label=bundle.app_label(app),
                messages=_strongest(messages, _MESSAGE_RANK),
                images=_strongest(images, _IMAGE_RANK),
                location=_strongest(location, _LOCATION_RANK),
                email_address=_strongest(email, _EMAIL_RANK),
                auth_method=auth,
                observed={
                    "messages": sorted(messages),
                    "images": sorted(images),
                    "location": sorted(location),
                    "email_address": sorted(email),
                    "auth_method": providers,
                },
            )
        )
    return rows
