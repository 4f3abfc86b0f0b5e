"""SQLite artifact extraction: schema-matched normalizers plus a generic sweep.

Databases are always opened read-only from a temporary copy so the original
acquisition is never touched, not even by WAL/journal side effects.
"""

from __future__ import annotations

import json
import logging
import re
import shutil
import sqlite3
import tempfile
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path
from typing import Optional

from .model import (
    AppId,
    ArtifactSource,
    ChatMessage,
    DeviceIdentifier,
    Direction,
    EmailArtifact,
    LocationFix,
    MalformedTimestamp,
    MatchRecord,
    MediaUrlRecord,
    MomentRecord,
    PhotoRecord,
    ProfileRecord,
    normalize_epoch,
)
from .prefs import EMAIL_RE
from .schema import SCHEMA_REGISTRY, TableSpec

log = logging.getLogger(__name__)

# Exact table-name match plus this much column overlap routes a table to its
# normalizer; anything below falls back to the generic sweep.
COLUMN_OVERLAP_THRESHOLD = 0.6

URL_RE = re.compile(r"https?://[^\s\"'<>]+")
HEX32_RE = re.compile(r"[0-9a-fA-F]{32}")
ISO_DATE_RE = re.compile(r"\d{4}-\d{2}-\d{2}$")

SWEEP_DISCLOSURE = (
    "generic sweep heuristic: message stores were identified by column-name "
    "patterns in databases without a documented schema"
)

_MSG_TEXT_HINTS = ("message", "body", "text")
_MSG_TIME_HINTS = ("time", "date", "stamp", "created")
_SENDER_HINTS = ("sender", "from", "source")


class DbOpenError(RuntimeError):
    def __init__(self, path, reason: str):
        super().__init__(f"cannot open database {path}: {reason}")
        self.path = str(path)


@dataclass(frozen=True)
class TableInfo:
    name: str
    columns: tuple  # (name, declared type) pairs
    row_count: Optional[int]

    @property
    def column_names(self) -> tuple:
        return tuple(name for name, _ in self.columns)


@dataclass(frozen=True)
class TableMatch:
    table_name: str
    matched_spec: Optional[TableSpec]
    column_overlap: float


@dataclass
class ExtractResult:
    """One database's contribution to the evidence bundle."""

    messages: list = field(default_factory=list)
    profiles: list = field(default_factory=list)
    matches: list = field(default_factory=list)
    locations: list = field(default_factory=list)
    moments: list = field(default_factory=list)
    photos: list = field(default_factory=list)
    media_urls: list = field(default_factory=list)
    device_ids: list = field(default_factory=list)
    emails: list = field(default_factory=list)
    raw_tables: dict = field(default_factory=dict)
    db_inventory: list = field(default_factory=list)
    owner_id: Optional[str] = None
    warnings: list = field(default_factory=list)
    disclosures: set = field(default_factory=set)


def _connect_readonly_copy(db_path: Path):
    """Connect to a temp copy of the database, never the evidence file.

    WAL/shm sidecars are copied along so rows still sitting in an
    un-checkpointed WAL are recovered; recovery writes hit the copy only.
    """
    tmp_dir = Path(tempfile.mkdtemp(prefix="gsnf_db_"))
    tmp_path = tmp_dir / (db_path.name or "evidence.sqlite")
    shutil.copyfile(db_path, tmp_path)
    for suffix in ("-wal", "-shm"):
        sidecar = Path(str(db_path) + suffix)
        if sidecar.is_file():
            shutil.copyfile(sidecar, Path(str(tmp_path) + suffix))
    conn = sqlite3.connect(tmp_path)
    conn.row_factory = sqlite3.Row
    return conn, tmp_dir


def read_tables(db_path: Path, source: Optional[ArtifactSource] = None) -> list[TableInfo]:
    """Enumerate user tables with column names and row counts, read-only."""
    db_path = Path(db_path)
    if not db_path.is_file():
        raise DbOpenError(db_path, "no such file")
    try:
        conn, tmp_dir = _connect_readonly_copy(db_path)
    except OSError as exc:
        raise DbOpenError(db_path, str(exc))
    infos = []
    try:
        try:
            names = [
                r[0]
                for r in conn.execute(
                    "SELECT name FROM sqlite_master WHERE type='table' "
                    "AND name NOT LIKE 'sqlite_%' ORDER BY name"
                )
            ]
        except sqlite3.DatabaseError as exc:
            raise DbOpenError(db_path, str(exc))
        log.debug("%s: %d user tables", db_path.name, len(names))
        for name in names:
            cols = tuple(
                (r["name"], r["type"] or "")
                for r in conn.execute(f'PRAGMA table_info("{name}")')
            )
            try:
                row_count = conn.execute(f'SELECT COUNT(*) FROM "{name}"').fetchone()[0]
            except sqlite3.DatabaseError:
                row_count = None
            infos.append(TableInfo(name, cols, row_count))
    finally:
        conn.close()
        shutil.rmtree(tmp_dir, ignore_errors=True)
    return infos


def _read_rows(conn, table: str) -> list[dict]:
    rows = []
    for r in conn.execute(f'SELECT rowid AS __rowid__, * FROM "{table}" ORDER BY rowid'):
        rows.append({k: r[k] for k in r.keys()})
    return rows


def match_tables(app: AppId, infos: list[TableInfo]) -> list[TableMatch]:
    """Pair physical tables with registry specs by name + column overlap."""
    matches = []
    specs = {s.table_name: s for s in SCHEMA_REGISTRY.get(app, ())}
    for info in infos:
        spec = specs.get(info.name)
        if spec is None:
            matches.append(TableMatch(info.name, None, 0.0))
            continue
        expected = {c.lower() for c in spec.column_names}
        if not expected:
            matches.append(TableMatch(info.name, spec, 1.0))
            continue
        actual = {c.lower() for c in info.column_names}
        overlap = len(expected & actual) / len(expected)
        if overlap >= COLUMN_OVERLAP_THRESHOLD:
            matches.append(TableMatch(info.name, spec, overlap))
        else:
            matches.append(TableMatch(info.name, None, overlap))
    return matches


def _text(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bytes):
        return value.hex()
    return str(value)


def _as_int(value) -> Optional[int]:
    if isinstance(value, bool):
        return int(value)
    if isinstance(value, int):
        return value
    if isinstance(value, float) and value.is_integer():
        return int(value)
    try:
        return int(str(value).strip())
    except (TypeError, ValueError):
        return None


def _as_bool(value) -> Optional[bool]:
    if value is None or value == "":
        return None
    if isinstance(value, str):
        lowered = value.strip().lower()
        if lowered in ("true", "false"):
            return lowered == "true"
    number = _as_int(value)
    if number is None:
        return None
    return bool(number)


def _instant(value, result: ExtractResult, context: str):
    raw = _as_int(value)
    if raw is None:
        return None
    try:
        instant, unit = normalize_epoch(raw)
    except MalformedTimestamp as exc:
        result.warnings.append(f"{context}: {exc}")
        return None
    if unit == "milliseconds":
        result.disclosures.add(
            "epoch-unit heuristic: some raw timestamps were read as milliseconds"
        )
    return instant


def _raw_fields(row: dict) -> dict:
    return {k: v for k, v in row.items() if k != "__rowid__"}


def _birth_date(value) -> Optional[date]:
    if isinstance(value, str) and ISO_DATE_RE.match(value.strip()):
        try:
            return date.fromisoformat(value.strip())
        except ValueError:
            return None
    raw = _as_int(value)
    if raw is not None and raw > 0:
        try:
            return normalize_epoch(raw)[0].date()
        except MalformedTimestamp:
            return None
    return None


def extract_normalized(app: AppId, db_path: Path, source: ArtifactSource) -> ExtractResult:
    """Normalize a known app's database against the schema registry.

    Tables that fail the registry match are handed to the generic sweep so
    schema drift degrades gracefully instead of dropping data.
    """
    if app not in (AppId.GRINDR, AppId.SKOUT, AppId.TINDER, AppId.BADOO):
        raise ValueError(f"no registry normalizer for {app.value}")
    result = ExtractResult()
    infos = read_tables(db_path, source)
    for info in infos:
        result.db_inventory.append((app.value, source.file_path, info.name, info.row_count))

    if app is AppId.BADOO:
        _extract_badoo(db_path, source, infos, result)
        return result

    matches = match_tables(app, infos)
    matched_names = {m.table_name for m in matches if m.matched_spec is not None}
    conn, tmp_dir = _connect_readonly_copy(db_path)
    try:
        tables = {}
        for info in infos:
            try:
                tables[info.name] = _read_rows(conn, info.name)
            except sqlite3.DatabaseError as exc:
                result.warnings.append(
                    f"table {info.name} in {source.file_path} partially unreadable: {exc}"
                )
                tables[info.name] = []
        if app is AppId.GRINDR:
            _extract_grindr(tables, matched_names, source, result)
        elif app is AppId.SKOUT:
            _extract_skout(tables, matched_names, source, result)
        elif app is AppId.TINDER:
            _extract_tinder(tables, matched_names, source, result)
    finally:
        conn.close()
        shutil.rmtree(tmp_dir, ignore_errors=True)

    unmatched = [m.table_name for m in matches if m.matched_spec is None]
    if unmatched:
        sweep = _sweep_tables(
            app, {n: tables.get(n, []) for n in unmatched}, infos, source
        )
        _merge(result, sweep)
    return result


def _merge(into: ExtractResult, other: ExtractResult) -> None:
    for name in (
        "messages", "profiles", "matches", "locations", "moments", "photos",
        "media_urls", "device_ids", "emails", "db_inventory", "warnings",
    ):
        getattr(into, name).extend(getattr(other, name))
    into.raw_tables.update(other.raw_tables)
    into.disclosures |= other.disclosures
    if into.owner_id is None:
        into.owner_id = other.owner_id


# -- Grindr ------------------------------------------------------------------

def _extract_grindr(tables, matched, source, result):
    profiles = tables.get("profile", []) if "profile" in matched else []
    owner_id = None
    for row in profiles:
        if _as_bool(row.get("isCurrent")):
            owner_id = _text(row.get("profileID"))
            break
    result.owner_id = owner_id

    for row in profiles:
        social = {}
        for column, provider in (
            ("facebookID", "facebook"), ("twitterID", "twitter"), ("instagramID", "instagram"),
        ):
            value = _text(row.get(column))
            if value:
                social[provider] = value
        result.profiles.append(
            ProfileRecord(
                app=AppId.GRINDR,
                profile_id=_text(row.get("profileID")),
                display_name=_text(row.get("displayName")) or None,
                birth_date=_birth_date(row.get("birthdate")),
                age=_as_int(row.get("age")),
                social_ids=social,
                image_hash=_text(row.get("profileImageHash")) or None,
                last_seen=_instant(row.get("lastSeen"), result, "grindr profile.lastSeen"),
                is_owner=bool(_as_bool(row.get("isCurrent"))),
                raw_fields=_raw_fields(row),
                source=source,
            )
        )

    gallery = tables.get("imageGallery", []) if "imageGallery" in matched else []
    gallery_by_message = {_text(r.get("messageID")): _text(r.get("mediaHash")) for r in gallery}

    for row in tables.get("chat", []) if "chat" in matched else []:
        sender = _text(row.get("Source"))
        recipient = _text(row.get("Target"))
        if owner_id is None:
            direction = Direction.UNKNOWN
        elif sender == owner_id:
            direction = Direction.OUTBOUND
        else:
            direction = Direction.INBOUND
        body = _text(row.get("Body"))
        message_id = _text(row.get("messageID"))
        media_ref = None
        gallery_hash = gallery_by_message.get(message_id)
        if gallery_hash and (body == gallery_hash or not body):
            media_ref = gallery_hash
        elif body and HEX32_RE.fullmatch(body):
            media_ref = body
        sent_at = _instant(row.get("Timestamp"), result, "grindr chat.Timestamp")
        if sent_at is None:
            result.warnings.append(f"grindr chat message {message_id} lacks a usable timestamp")
            continue
        result.messages.append(
            ChatMessage(
                app=AppId.GRINDR,
                message_id=message_id,
                sender_id=sender,
                recipient_id=recipient,
                sent_at=sent_at,
                body=body,
                direction=direction,
                unread=_as_bool(row.get("Unread")),
                failed=_as_bool(row.get("Failed")),
                media_ref=media_ref,
                source=source,
            )
        )

    # Side tables kept verbatim for the report; not normalized further.
    for name in ("blocks", "lookingFor", "moderation", "imageGallery"):
        if name in matched and tables.get(name):
            result.raw_tables[f"{AppId.GRINDR.value}/{name}"] = [
                _raw_fields(r) for r in tables[name]
            ]


# -- Skout -------------------------------------------------------------------

def _extract_skout(tables, matched, source, result):
    for row in tables.get("skoutMessages", []) if "skoutMessages" in matched else []:
        message_id = _text(row.get("messageID"))
        sent_at = _instant(row.get("Timestamp"), result, "skout message Timestamp")
        if sent_at is None:
            result.warnings.append(f"skout message {message_id} lacks a usable timestamp")
            continue
        kind = _text(row.get("Type")).strip().lower()
        body = _text(row.get("Message"))
        result.messages.append(
            ChatMessage(
                app=AppId.SKOUT,
                message_id=message_id,
                sender_id=_text(row.get("fromUserID")),
                recipient_id=_text(row.get("toUserID")),
                sent_at=sent_at,
                body=body,
                direction=Direction.UNKNOWN,
                media_ref=body if kind == "picture" else None,
                admin_origin=True if kind == "rich" else None,
                source=source,
            )
        )

    for row in tables.get("skoutUsersTable", []) if "skoutUsersTable" in matched else []:
        pic_url = _text(row.get("picUrl"))
        result.profiles.append(
            ProfileRecord(
                app=AppId.SKOUT,
                profile_id=_text(row.get("userID")),
                display_name=_text(row.get("userName")) or None,
                raw_fields=_raw_fields(row),
                source=source,
            )
        )
        if URL_RE.match(pic_url or ""):
            result.media_urls.append(
                MediaUrlRecord(AppId.SKOUT, pic_url, source, "skoutUsersTable", "picUrl")
            )


# -- Tinder ------------------------------------------------------------------

def _extract_tinder(tables, matched, source, result):
    for row in tables.get("messages", []) if "messages" in matched else []:
        sent_at = _instant(row.get("Created"), result, "tinder messages.Created")
        if sent_at is None:
            result.warnings.append(
                f"tinder message rowid {row.get('__rowid__')} lacks a usable timestamp"
            )
            continue
        result.messages.append(
            ChatMessage(
                app=AppId.TINDER,
                message_id=_text(row.get("__rowid__")),
                sender_id=_text(row.get("User_id")),
                recipient_id="",
                sent_at=sent_at,
                body=_text(row.get("Text")),
                direction=Direction.UNKNOWN,
                failed=_as_bool(row.get("Has_error")),
                unread=None if (v := _as_bool(row.get("Viewed"))) is None else not v,
                match_id=_text(row.get("Match_id")) or None,
                source=source,
            )
        )

    for row in tables.get("matches", []) if "matches" in matched else []:
        created = _instant(row.get("Created"), result, "tinder matches.Created")
        if created is None:
            result.warnings.append(f"tinder match {row.get('Id')} lacks a created date")
            continue
        result.matches.append(
            MatchRecord(
                app=AppId.TINDER,
                match_id=_text(row.get("Id")),
                counterpart_user_id=_text(row.get("User_id")),
                created_at=created,
                last_activity=_instant(row.get("Last_activity"), result, "tinder Last_activity"),
                viewed=_as_bool(row.get("Viewed")),
                raw_fields=_raw_fields(row),
                source=source,
            )
        )

    for row in tables.get("Analytic_Events", []) if "Analytic_Events" in matched else []:
        _extract_analytic_params(row, source, result)

    for row in tables.get("moments", []) if "moments" in matched else []:
        result.moments.append(
            MomentRecord(
                app=AppId.TINDER,
                moment_id=_text(row.get("Id")),
                user_id=_text(row.get("User_id")),
                created_at=_instant(row.get("Created"), result, "tinder moments.Created"),
                text=_text(row.get("Text")) or None,
                photo_id=_text(row.get("Photo_id")) or None,
                raw_fields=_raw_fields(row),
                source=source,
            )
        )

    for row in tables.get("photos", []) if "photos" in matched else []:
        url = _text(row.get("Image_url"))
        result.photos.append(
            PhotoRecord(
                app=AppId.TINDER,
                photo_id=_text(row.get("Id")),
                user_id=_text(row.get("User_id")) or None,
                urls=(url,) if url else (),
                photo_order=_as_int(row.get("Photo_order")),
                raw_fields=_raw_fields(row),
                source=source,
            )
        )

    for row in tables.get("photo_moments", []) if "photo_moments" in matched else []:
        urls = tuple(
            u for u in (_text(row.get(c)) for c in ("Large", "Med", "Orig", "Small", "thumb")) if u
        )
        result.photos.append(
            PhotoRecord(
                app=AppId.TINDER,
                photo_id=_text(row.get("Id")),
                urls=urls,
                raw_fields=_raw_fields(row),
                source=source,
            )
        )

    for row in tables.get("facebook_friends", []) if "facebook_friends" in matched else []:
        fb_id = _text(row.get("Id"))
        tinder_id = _text(row.get("Tinder"))
        result.profiles.append(
            ProfileRecord(
                app=AppId.TINDER,
                profile_id=tinder_id or fb_id,
                display_name=_text(row.get("Name")) or None,
                social_ids={"facebook": fb_id} if fb_id else {},
                raw_fields=_raw_fields(row),
                source=source,
            )
        )


def _extract_analytic_params(row, source, result):
    params_raw = row.get("Params")
    params = _parse_params(_text(params_raw))
    if not params:
        return
    at = _instant(row.get("timestamp"), result, "tinder Analytic_Events.timestamp")
    lat = lon = None
    for key, value in params.items():
        lowered = key.lower()
        try:
            number = float(str(value))
        except (TypeError, ValueError):
            number = None
        if number is not None and "lat" in lowered and "lon" not in lowered:
            lat = number
        elif number is not None and ("lon" in lowered or "lng" in lowered):
            lon = number
        elif lowered in ("userid", "deviceid", "networktype", "network_type", "network"):
            result.device_ids.append(
                DeviceIdentifier(AppId.TINDER, key, _text(value), source)
            )
    if lat is not None and lon is not None:
        if -90.0 <= lat <= 90.0 and -180.0 <= lon <= 180.0:
            result.locations.append(
                LocationFix(
                    precision="exact", lat=lat, lon=lon, at=at,
                    subject="owner", app=AppId.TINDER, source=source,
                )
            )
        else:
            result.warnings.append(
                f"analytic event carries out-of-range coordinates {lat}, {lon}"
            )


def _parse_params(text: str) -> dict:
    text = text.strip()
    if not text:
        return {}
    if text.startswith("{"):
        try:
            parsed = json.loads(text)
            return parsed if isinstance(parsed, dict) else {}
        except ValueError:
            pass
    pairs = {}
    for chunk in re.split(r"[&,;]", text):
        if "=" in chunk:
            key, _, value = chunk.partition("=")
            if key.strip():
                pairs[key.strip()] = value.strip()
    return pairs


# -- Badoo -------------------------------------------------------------------

def _extract_badoo(db_path, source, infos, result):
    fname = Path(source.file_path).name
    if fname in ("google_analytics_v2.db",):
        non_empty = [i.name for i in infos if (i.row_count or 0) > 0]
        if non_empty:
            result.warnings.append(
                f"{fname} expected empty but tables have rows: {', '.join(non_empty)}"
            )
        return
    sweep = generic_sweep(db_path, source, app=AppId.BADOO)
    _merge(result, sweep)


# -- Generic sweep -----------------------------------------------------------

def _is_texty(decltype: str) -> bool:
    upper = decltype.upper()
    return any(t in upper for t in ("CHAR", "CLOB", "TEXT"))


def _is_inty(decltype: str) -> bool:
    return "INT" in decltype.upper()


def _name_hits(name: str, hints) -> bool:
    lowered = name.lower()
    return any(h in lowered for h in hints)


def _recipient_col(name: str) -> bool:
    lowered = name.lower()
    if "recipient" in lowered or "target" in lowered:
        return True
    return lowered == "to" or lowered.startswith("to_") or lowered.startswith("touser")


def generic_sweep(db_path: Path, source: ArtifactSource, app: AppId = AppId.UNKNOWN) -> ExtractResult:
    """Best-effort recovery from databases without a documented schema."""
    result = ExtractResult()
    infos = read_tables(db_path, source)
    for info in infos:
        result.db_inventory.append((app.value, source.file_path, info.name, info.row_count))
    conn, tmp_dir = _connect_readonly_copy(db_path)
    try:
        tables = {}
        for info in infos:
            try:
                tables[info.name] = _read_rows(conn, info.name)
            except sqlite3.DatabaseError as exc:
                result.warnings.append(
                    f"table {info.name} in {source.file_path} partially unreadable: {exc}"
                )
    finally:
        conn.close()
        shutil.rmtree(tmp_dir, ignore_errors=True)
    sweep = _sweep_tables(app, tables, infos, source)
    _merge(result, sweep)
    return result


def _sweep_tables(app, tables: dict, infos: list[TableInfo], source) -> ExtractResult:
    result = ExtractResult()
    info_by_name = {i.name: i for i in infos}
    for name in sorted(tables):
        info = info_by_name.get(name)
        if info is None:
            continue
        rows = tables[name]
        text_cols = [c for c, t in info.columns if _is_texty(t)]
        int_cols = [c for c, t in info.columns if _is_inty(t)]
        msg_col = next((c for c in text_cols if _name_hits(c, _MSG_TEXT_HINTS)), None)
        ts_col = next((c for c in int_cols if _name_hits(c, _MSG_TIME_HINTS)), None)

        if msg_col and ts_col and rows:
            sender_col = next((c for c in text_cols if _name_hits(c, _SENDER_HINTS)), None)
            recip_col = next((c for c in text_cols if _recipient_col(c)), None)
            result.disclosures.add(SWEEP_DISCLOSURE)
            for row in rows:
                sent_at = _instant(row.get(ts_col), result, f"sweep {name}.{ts_col}")
                if sent_at is None:
                    continue
                result.messages.append(
                    ChatMessage(
                        app=app,
                        message_id=_text(row.get("__rowid__")),
                        sender_id=_text(row.get(sender_col)) if sender_col else "",
                        recipient_id=_text(row.get(recip_col)) if recip_col else "",
                        sent_at=sent_at,
                        body=_text(row.get(msg_col)),
                        direction=Direction.UNKNOWN,
                        heuristic=True,
                        source=source,
                    )
                )

        seen_urls = set()
        for row in rows:
            for column in info.column_names:
                cell = row.get(column)
                if not isinstance(cell, str):
                    continue
                for url in URL_RE.findall(cell):
                    if (name, column, url) not in seen_urls:
                        seen_urls.add((name, column, url))
                        result.media_urls.append(
                            MediaUrlRecord(app, url, source, name, column)
                        )
                for email in EMAIL_RE.findall(cell):
                    result.emails.append(EmailArtifact(app, email, source))
    return result
