"""Core evidence records shared by every extraction and analysis stage.

All record types are frozen dataclasses: once an artifact has been pulled
out of an acquisition it is never mutated, only aggregated into an
EvidenceBundle (single writer, many readers).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from datetime import date, datetime, timedelta, timezone
from pathlib import Path
from typing import Optional

EPOCH_ORIGIN = datetime(1970, 1, 1, tzinfo=timezone.utc)

# Raw epoch values at or above this are read as milliseconds: 1e11 seconds
# lands in year 5138 (implausible for app data) while 1e11 ms is early 1973.
EPOCH_MS_BOUNDARY = 10 ** 11

EPOCH_UNIT_DISCLOSURE = (
    "epoch-unit heuristic: raw timestamps >= 1e11 were interpreted as "
    "milliseconds, smaller values as seconds"
)


class MalformedTimestamp(ValueError):
    """Raised for epoch values that cannot denote a real instant."""


class AppId(enum.Enum):
    """The analyzed proximity dating apps, plus Unknown for unmatched data."""

    BADOO = "Badoo"
    GRINDR = "Grindr"
    SKOUT = "Skout"
    TINDER = "Tinder"
    MEETME = "Meet Me"
    JAUMO = "Jaumo"
    FULLCIRCLE = "FullCircle"
    MIUMEET = "MiuMeet"
    UNKNOWN = "Unknown"

    def __str__(self) -> str:  # pragma: no cover - repr convenience
        return self.value


class TokenProvider(enum.Enum):
    FACEBOOK = "Facebook"
    GRINDR = "Grindr"
    TINDER = "Tinder"
    MIUMEET = "MiuMeet"
    OTHER = "Other"

    def __str__(self) -> str:  # pragma: no cover
        return self.value


class Direction(enum.Enum):
    INBOUND = "inbound"
    OUTBOUND = "outbound"
    UNKNOWN = "unknown"


class FileKind(enum.Enum):
    """Content classification assigned by the filesystem scanner."""

    SQLITE_DB = "SqliteDb"
    PREFS_XML = "PrefsXml"
    JPEG = "Jpeg"
    WEBP = "WebP"
    PNG = "Png"
    JSON = "Json"
    PICASSO_META = "PicassoMeta"
    OPAQUE = "Opaque"


def normalize_epoch(raw: int) -> tuple[datetime, str]:
    """Resolve a raw epoch integer to a UTC instant plus the unit chosen.

    Values >= 1e11 are treated as milliseconds, smaller ones as seconds.
    The chosen unit is returned alongside the instant so reports can
    disclose the assumption.  Negative or absurdly large values raise
    MalformedTimestamp.
    """
    if not isinstance(raw, int):
        raise MalformedTimestamp(f"epoch value must be an integer, got {raw!r}")
    if raw < 0:
        raise MalformedTimestamp(f"negative epoch value {raw}")
    try:
        if raw >= EPOCH_MS_BOUNDARY:
            unit = "milliseconds"
            seconds, millis = divmod(raw, 1000)
            delta = timedelta(seconds=seconds, milliseconds=millis)
        else:
            unit = "seconds"
            delta = timedelta(seconds=raw)
        return EPOCH_ORIGIN + delta, unit
    except OverflowError as exc:
        raise MalformedTimestamp(f"epoch value {raw} beyond calendar range") from exc


def iso_instant(at: Optional[datetime]) -> Optional[str]:
    """Render an instant as a compact UTC ISO-8601 string ('...Z')."""
    if at is None:
        return None
    if at.tzinfo is not None:
        at = at.astimezone(timezone.utc).replace(tzinfo=None)
    return at.isoformat() + "Z"


@dataclass(frozen=True)
class ArtifactSource:
    """Provenance pointer: where in the acquisition an artifact came from."""

    file_path: str  # relative to the evidence root, posix separators
    kind: FileKind = FileKind.OPAQUE
    byte_range: Optional[tuple[int, int]] = None  # (offset, length)


@dataclass(frozen=True)
class AppInstall:
    app: AppId
    package_path: str  # relative to the evidence root
    version_hint: Optional[str] = None
    registry_extended: bool = False  # matched via the editable registry section


@dataclass(frozen=True)
class ChatMessage:
    """One normalized chat message, regardless of originating app."""

    app: AppId
    message_id: str
    sender_id: str
    recipient_id: str
    sent_at: datetime
    body: str
    direction: Direction
    source: ArtifactSource
    unread: Optional[bool] = None
    failed: Optional[bool] = None
    media_ref: Optional[str] = None  # image hash or URL when the body is media
    admin_origin: Optional[bool] = None  # Skout "rich" messages come from admins
    match_id: Optional[str] = None  # Tinder messages key into the matches table
    heuristic: bool = False  # recovered by the generic sweep, not a known schema


@dataclass(frozen=True)
class ProfileRecord:
    """Normalized profile; raw_fields keeps every source column verbatim."""

    app: AppId
    profile_id: str
    source: ArtifactSource
    display_name: Optional[str] = None
    birth_date: Optional[date] = None
    age: Optional[int] = None
    social_ids: dict = field(default_factory=dict)  # provider name -> handle
    image_hash: Optional[str] = None
    last_seen: Optional[datetime] = None
    distance_m: Optional[float] = None
    is_owner: bool = False
    raw_fields: dict = field(default_factory=dict)


@dataclass(frozen=True)
class MatchRecord:
    app: AppId
    match_id: str
    counterpart_user_id: str
    created_at: datetime
    source: ArtifactSource
    last_activity: Optional[datetime] = None
    viewed: Optional[bool] = None
    raw_fields: dict = field(default_factory=dict)


@dataclass(frozen=True)
class LocationFix:
    """A located moment at one of three precision classes.

    precision "exact" carries lat/lon, "suburb" a locality name, and
    "region" country/state plus a distance in meters.
    """

    precision: str  # "exact" | "suburb" | "region"
    source: ArtifactSource
    lat: Optional[float] = None
    lon: Optional[float] = None
    suburb: Optional[str] = None
    country: Optional[str] = None
    state: Optional[str] = None
    distance_m: Optional[float] = None
    at: Optional[datetime] = None
    subject: str = "owner"  # "owner" | "other"
    subject_id: Optional[str] = None  # profile id when subject == "other"
    app: AppId = AppId.UNKNOWN

    def __post_init__(self) -> None:
        if self.precision not in ("exact", "suburb", "region"):
            raise ValueError(f"unknown precision class {self.precision!r}")
        if self.precision == "exact":
            if self.lat is None or self.lon is None:
                raise ValueError("exact fix requires lat and lon")
            if not (-90.0 <= self.lat <= 90.0 and -180.0 <= self.lon <= 180.0):
                raise ValueError(f"coordinates out of range: {self.lat}, {self.lon}")


@dataclass(frozen=True)
class AuthToken:
    provider: TokenProvider
    token: str
    source: ArtifactSource
    app: AppId = AppId.UNKNOWN
    expiry_hint: Optional[datetime] = None

    def __post_init__(self) -> None:
        if not self.token:
            raise ValueError("token value must be non-empty")


@dataclass(frozen=True)
class CachedImage:
    app: AppId
    content_hash: str  # hex digest of the image bytes
    format: str  # "JPEG" | "WebP" | "PNG" | "unknown"
    bytes_ref: ArtifactSource
    origin_url: Optional[str] = None


@dataclass(frozen=True)
class MomentRecord:
    """A Tinder 'moment' post visible to the user's matches."""

    app: AppId
    moment_id: str
    user_id: str
    source: ArtifactSource
    created_at: Optional[datetime] = None
    text: Optional[str] = None
    photo_id: Optional[str] = None
    raw_fields: dict = field(default_factory=dict)


@dataclass(frozen=True)
class PhotoRecord:
    app: AppId
    photo_id: str
    source: ArtifactSource
    user_id: Optional[str] = None
    urls: tuple = ()
    photo_order: Optional[int] = None
    raw_fields: dict = field(default_factory=dict)


@dataclass(frozen=True)
class MediaUrlRecord:
    """A media URL observed in stored data (db cell, profile column)."""

    app: AppId
    url: str
    source: ArtifactSource
    table: Optional[str] = None
    column: Optional[str] = None


@dataclass(frozen=True)
class DeviceIdentifier:
    app: AppId
    name: str  # e.g. "deviceId", "userID", "networkType"
    value: str
    source: ArtifactSource


@dataclass(frozen=True)
class EmailArtifact:
    app: AppId
    address: str
    source: ArtifactSource


@dataclass(frozen=True)
class ActivityMarker:
    """A 'last active' style timestamp recovered outside message records."""

    app: AppId
    at: datetime
    label: str
    source: ArtifactSource


@dataclass(frozen=True)
class VolleyMatchEvent:
    """A cached match/no-match JSON event joinable against match records."""

    match_id: str
    matched: bool
    source: ArtifactSource
    occurred_at: Optional[datetime] = None
    app: AppId = AppId.TINDER


@dataclass(frozen=True)
class CarvedMessagePreview:
    """A last-message preview carved out of an undocumented cache blob."""

    username: str
    profile_pic_url: str
    last_message: str
    location_suburb: str
    source: ArtifactSource
    app: AppId = AppId.BADOO


@dataclass
class EvidenceBundle:
    """Everything recovered from one acquisition, plus assembly warnings.

    Collections are append-only while the pipeline runs; afterwards the
    bundle is treated as immutable.
    """

    root: Path
    installs: list = field(default_factory=list)
    messages: list = field(default_factory=list)
    profiles: list = field(default_factory=list)
    matches: list = field(default_factory=list)
    locations: list = field(default_factory=list)
    tokens: list = field(default_factory=list)
    images: list = field(default_factory=list)
    moments: list = field(default_factory=list)
    photos: list = field(default_factory=list)
    previews: list = field(default_factory=list)
    volley_events: list = field(default_factory=list)
    media_urls: list = field(default_factory=list)
    device_ids: list = field(default_factory=list)
    emails: list = field(default_factory=list)
    activity: list = field(default_factory=list)
    picasso_entries: list = field(default_factory=list)
    raw_tables: dict = field(default_factory=dict)  # "App/table" -> row dicts
    db_inventory: list = field(default_factory=list)  # (app, db path, table, rows)
    owners: dict = field(default_factory=dict)  # AppId -> owner profile id
    disclosures: set = field(default_factory=set)
    warnings: list = field(default_factory=list)

    def app_label(self, app: AppId) -> str:
        for install in self.installs:
            if install.app is app and install.registry_extended:
                return f"{app.value} (registry-extended)"
        return app.value
