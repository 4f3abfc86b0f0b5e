"""Deterministic synthetic evidence corpora for testing and demos.

The forge emits directory trees, databases, prefs files, caches and
transaction logs shaped like the documented acquisitions, and returns the
exact ground-truth manifest the extractors are expected to reproduce.  All
randomness flows from one seed; the same spec always produces byte-identical
output.  Planted PII is synthetic by construction and externally supplied
strings are refused if they look like real emails or phone numbers.
"""

from __future__ import annotations

import base64
import json
import re
import sqlite3
from dataclasses import dataclass, field, fields as dc_fields
from datetime import date, timedelta
from pathlib import Path
from random import Random

from .appregistry import app_from_name, default_registry
from .caches import sha256_hex
from .model import (
    EPOCH_ORIGIN,
    AppId,
    ArtifactSource,
    AuthToken,
    CarvedMessagePreview,
    ChatMessage,
    Direction,
    EmailArtifact,
    FileKind,
    LocationFix,
    MatchRecord,
    MediaUrlRecord,
    ProfileRecord,
    TokenProvider,
    VolleyMatchEvent,
)
from .netleak import LeakCategory
from .serialize import to_jsonable

BASE_EPOCH = 1403136000  # 2014-06-19T00:00:00Z, the era the corpora mimic
DAY = 86400

NAMES = (
    "alice", "bruno", "carla", "devon", "erin", "felix", "gita", "hollis",
    "ines", "jonas", "kiri", "lars", "mona", "nils", "odessa", "priya",
    "quinn", "rafi", "suki", "tomas",
)
WORDS = (
    "hey", "there", "tonight", "coffee", "later", "nearby", "sure", "sounds",
    "good", "meet", "where", "when", "soon", "maybe", "haha", "nice", "photo",
    "profile", "around", "city", "beach", "tomorrow", "busy", "free",
)
SUBURBS = ("Adelaide", "Norwood", "Glenelg", "Prospect", "Unley", "Semaphore")

PHONE_RE = re.compile(r"\+?\d[\d\s().-]{7,}\d")
_EMAIL_RE = re.compile(r"[A-Za-z0-9._%+-]+@[A-Za-z0-9.-]+\.[A-Za-z]{2,}")

# Bytes that can never join a printable UTF-8 run (invalid leads / controls).
_NOISE_ALPHABET = bytes(list(range(0x01, 0x09)) + list(range(0x0E, 0x20)) + list(range(0xF8, 0xFE)))

FORGE_APP_ORDER = (
    AppId.BADOO, AppId.GRINDR, AppId.SKOUT, AppId.TINDER,
    AppId.MEETME, AppId.JAUMO, AppId.FULLCIRCLE, AppId.MIUMEET,
)


class ForgeError(RuntimeError):
    pass


@dataclass
class AppPlan:
    profiles: int = 0
    messages: int = 0
    matches: int = 0
    images: int = 0
    location_fixes: int = 0
    previews: int = 0
    tokens: bool = False

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in dc_fields(self)}


@dataclass(frozen=True)
class LeakPlant:
    app: AppId
    category: LeakCategory
    tls: bool = False


@dataclass
class LogPlan:
    plants: list = field(default_factory=list)  # LeakPlant entries
    decoys: int = 0


@dataclass
class ForgeSpec:
    seed: int = 42
    apps: dict = field(default_factory=dict)  # AppId -> AppPlan
    log: LogPlan = field(default_factory=LogPlan)
    inject_malformed: dict = field(default_factory=dict)
    extra_names: tuple = ()

    @classmethod
    def from_dict(cls, doc: dict) -> "ForgeSpec":
        apps = {}
        for name, counts in (doc.get("apps") or {}).items():
            app = app_from_name(name)
            if app is None:
                raise ForgeError(f"unknown app name in spec: {name!r}")
            apps[app] = AppPlan(**counts)
        plants = []
        for entry in (doc.get("log") or {}).get("plants", []):
            app = app_from_name(entry["app"])
            if app is None:
                raise ForgeError(f"unknown app name in log plan: {entry['app']!r}")
            plants.append(
                LeakPlant(app, LeakCategory(entry["category"]), bool(entry.get("tls", False)))
            )
        return cls(
            seed=int(doc.get("seed", 42)),
            apps=apps,
            log=LogPlan(plants=plants, decoys=int((doc.get("log") or {}).get("decoys", 0))),
            inject_malformed=dict(doc.get("inject_malformed") or {}),
            extra_names=tuple(doc.get("extra_names") or ()),
        )

    @classmethod
    def from_json_file(cls, path: Path) -> "ForgeSpec":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "apps": {app.value: plan.to_dict() for app, plan in self.apps.items()},
            "log": {
                "plants": [
                    {"app": p.app.value, "category": p.category.value, "tls": p.tls}
                    for p in self.log.plants
                ],
                "decoys": self.log.decoys,
            },
            "inject_malformed": dict(self.inject_malformed),
            "extra_names": list(self.extra_names),
        }


def canonical_spec() -> ForgeSpec:
    """The reference corpus: every documented artifact class exercised once."""
    apps = {
        AppId.BADOO: AppPlan(previews=2, images=2, tokens=True),
        AppId.GRINDR: AppPlan(profiles=3, messages=5, tokens=True),
        AppId.SKOUT: AppPlan(profiles=2, messages=4, tokens=True),
        AppId.TINDER: AppPlan(profiles=2, messages=6, matches=2, location_fixes=2, tokens=True),
        AppId.MEETME: AppPlan(messages=3, tokens=True),
        AppId.JAUMO: AppPlan(images=2, tokens=True),
        AppId.FULLCIRCLE: AppPlan(tokens=True),
        AppId.MIUMEET: AppPlan(tokens=True),
    }
    plants = [
        LeakPlant(AppId.GRINDR, LeakCategory.EXACT_LOCATION, tls=False),
        LeakPlant(AppId.TINDER, LeakCategory.EXACT_LOCATION, tls=True),
        LeakPlant(AppId.JAUMO, LeakCategory.LOCATION_IN_FILENAME, tls=False),
        LeakPlant(AppId.FULLCIRCLE, LeakCategory.PLAINTEXT_MESSAGE, tls=False),
        LeakPlant(AppId.FULLCIRCLE, LeakCategory.PLAINTEXT_IMAGE, tls=False),
        LeakPlant(AppId.FULLCIRCLE, LeakCategory.EMAIL_ADDRESS, tls=False),
        LeakPlant(AppId.FULLCIRCLE, LeakCategory.COARSE_LOCATION, tls=False),
        LeakPlant(AppId.MIUMEET, LeakCategory.PLAINTEXT_MESSAGE, tls=False),
        LeakPlant(AppId.MIUMEET, LeakCategory.TOKEN_IN_TRANSIT, tls=False),
        LeakPlant(AppId.MIUMEET, LeakCategory.EXACT_LOCATION, tls=False),
        LeakPlant(AppId.MIUMEET, LeakCategory.COARSE_LOCATION, tls=False),
        LeakPlant(AppId.MIUMEET, LeakCategory.EMAIL_ADDRESS, tls=False),
        LeakPlant(AppId.SKOUT, LeakCategory.COARSE_LOCATION, tls=False),
    ]
    return ForgeSpec(seed=42, apps=apps, log=LogPlan(plants=plants, decoys=6))


def _validate_names(names) -> None:
    for name in names:
        if _EMAIL_RE.search(name) or PHONE_RE.search(name):
            raise ForgeError(f"refusing externally supplied PII-like value: {name!r}")


# -- low-level builders -------------------------------------------------------


def _instant(epoch_seconds: int):
    return EPOCH_ORIGIN + timedelta(seconds=epoch_seconds)


def _epoch(rng: Random) -> int:
    return BASE_EPOCH + rng.randrange(0, 30 * DAY)


def _words(rng: Random, low=3, high=7) -> str:
    return " ".join(rng.choice(WORDS) for _ in range(rng.randrange(low, high)))


def _hex(rng: Random, n: int) -> str:
    return "".join(rng.choice("0123456789abcdef") for _ in range(n))


def _token_value(rng: Random, prefix: str) -> str:
    alphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789"
    return prefix + "".join(rng.choice(alphabet) for _ in range(24))


def _noise(rng: Random, n: int) -> bytes:
    return bytes(rng.choice(_NOISE_ALPHABET) for _ in range(n))


def _jpeg_bytes(rng: Random) -> bytes:
    return b"\xff\xd8\xff\xe0\x00\x10JFIF\x00\x01" + _noise(rng, 64) + b"\xff\xd9"


def _webp_bytes(rng: Random) -> bytes:
    payload = b"VP8 " + _noise(rng, 60)
    return b"RIFF" + len(payload).to_bytes(4, "little") + b"WEBP" + payload


def _write(path: Path, data: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(data)


def _prefs_xml(entries) -> bytes:
    lines = ["<?xml version='1.0' encoding='utf-8' standalone='yes' ?>", "<map>"]
    for tag, key, value in entries:
        if tag == "string":
            lines.append(f'    <string name="{key}">{value}</string>')
        else:
            lines.append(f'    <{tag} name="{key}" value="{value}" />')
    lines.append("</map>")
    return ("\n".join(lines) + "\n").encode()


def _create_db(path: Path, ddl: dict, rows: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    conn = sqlite3.connect(path)
    try:
        for table, columns in ddl.items():
            cols = ", ".join(f'"{name}" {ctype}' for name, ctype in columns)
            conn.execute(f'CREATE TABLE "{table}" ({cols})')
            for row in rows.get(table, ()):  # row dicts keyed by column name
                names = [name for name, _ in columns]
                placeholders = ", ".join("?" for _ in names)
                quoted = ", ".join(f'"{n}"' for n in names)
                conn.execute(
                    f'INSERT INTO "{table}" ({quoted}) VALUES ({placeholders})',
                    [row.get(n) for n in names],
                )
        conn.commit()
    finally:
        conn.close()


_FACEBOOK_PREFS_FILE = "com.facebook.SharedPreferencesTokenCachingStrategy.DEFAULT_KEY.xml"
_FACEBOOK_PREFS_FILE_ALT = "com.facebook.AuthorizationClient.WebViewAuthHandler.TOKEN_STORE_KEY.xml"


@dataclass
class Manifest:
    """Ground truth: what a faithful extraction must recover."""

    spec: dict
    installs: list = field(default_factory=list)
    messages: list = field(default_factory=list)
    profiles: list = field(default_factory=list)
    matches: list = field(default_factory=list)
    tokens: list = field(default_factory=list)
    image_links: list = field(default_factory=list)
    previews: list = field(default_factory=list)
    locations: list = field(default_factory=list)
    volley_events: list = field(default_factory=list)
    media_urls: list = field(default_factory=list)
    emails: list = field(default_factory=list)
    token_values: dict = field(default_factory=dict)  # app name -> token string
    log: dict = field(default_factory=dict)  # planted-leak manifest

    def to_dict(self) -> dict:
        return to_jsonable(self.__dict__)


def forge_corpus(spec: ForgeSpec, outdir: Path) -> Manifest:
    """Emit an evidence tree under outdir and return the ground-truth manifest."""
    outdir = Path(outdir)
    if outdir.exists() and any(outdir.iterdir()):
        raise ForgeError(f"output directory not empty: {outdir}")
    _validate_names(spec.extra_names)
    outdir.mkdir(parents=True, exist_ok=True)

    rng = Random(spec.seed)
    manifest = Manifest(spec=spec.to_dict())
    registry = {e.app: e.package for e in default_registry().entries}

    for app in FORGE_APP_ORDER:
        plan = spec.apps.get(app)
        if plan is None:
            continue
        package = registry[app]
        package_dir = outdir / "data" / "data" / package
        package_dir.mkdir(parents=True, exist_ok=True)
        manifest.installs.append({"app": app.value, "package_path": f"data/data/{package}"})
        builder = _BUILDERS[app]
        builder(rng, plan, package_dir, f"data/data/{package}", manifest)

    (outdir / "external").mkdir(exist_ok=True)

    if spec.inject_malformed.get("prefs"):
        bad = outdir / "data" / "data" / registry[AppId.FULLCIRCLE] / "shared_prefs" / "broken.xml"
        _write(bad, b"<?xml version='1.0'?><map><string name='x'>unterminated")
    if spec.inject_malformed.get("database"):
        bad = outdir / "data" / "data" / registry[AppId.MEETME] / "databases" / "corrupt.db"
        _write(bad, b"SQLite format 3\x00" + _noise(rng, 64))
    return manifest


# -- per-app builders ---------------------------------------------------------


def _facebook_prefs(rng, prefs_dir, rel_prefix, manifest, app, both_files=False):
    token = _token_value(rng, "CAAFB")
    files = [_FACEBOOK_PREFS_FILE] + ([_FACEBOOK_PREFS_FILE_ALT] if both_files else [])
    for fname in files:
        _write(prefs_dir / fname, _prefs_xml([("string", "com.facebook.token.AccessToken", token)]))
        manifest.tokens.append(
            AuthToken(
                provider=TokenProvider.FACEBOOK,
                token=token,
                app=app,
                source=ArtifactSource(f"{rel_prefix}/shared_prefs/{fname}", FileKind.PREFS_XML),
            )
        )
    manifest.token_values[app.value] = token
    return token


def _forge_badoo(rng, plan, package_dir, rel, manifest):
    if plan.tokens:
        _facebook_prefs(rng, package_dir / "shared_prefs", rel, manifest, AppId.BADOO, both_files=True)
    if plan.tokens or plan.previews or plan.images:
        _create_db(package_dir / "databases" / "google_analytics_v2.db", {}, {})

    if plan.previews:
        guid = _hex(rng, 32)
        blob = bytearray(_noise(rng, 40))
        cache_rel = f"{rel}/cache/{guid}"
        for _ in range(plan.previews):
            username = rng.choice(NAMES)
            url = f"http://pcdn.badoo.example/p/{_hex(rng, 10)}.jpg"
            message = _words(rng)
            suburb = rng.choice(SUBURBS)
            start = len(blob)
            blob += username.encode() + b"\x00" + url.encode() + b"\x00"
            blob += message.encode() + b"\x00" + suburb.encode()
            end = len(blob)
            blob += _noise(rng, 40)
            source = ArtifactSource(cache_rel, FileKind.OPAQUE, byte_range=(start, end - start))
            manifest.previews.append(
                CarvedMessagePreview(
                    username=username, profile_pic_url=url, last_message=message,
                    location_suburb=suburb, app=AppId.BADOO, source=source,
                )
            )
            manifest.locations.append(
                LocationFix(
                    precision="suburb", suburb=suburb, subject="owner",
                    app=AppId.BADOO, source=source,
                )
            )
        _write(package_dir / "cache" / guid, bytes(blob))

    for i in range(plan.images):
        data = _jpeg_bytes(rng) if i % 2 == 0 else _webp_bytes(rng)
        fname = _hex(rng, 16)
        _write(package_dir / "cache" / "downloader" / fname, data)


def _forge_grindr(rng, plan, package_dir, rel, manifest):
    db_rel = f"{rel}/databases/grindr.db"
    source = ArtifactSource(db_rel, FileKind.SQLITE_DB)
    owner_id = "1000000"
    profile_ids = [owner_id] + [str(1000001 + i) for i in range(plan.profiles)]

    profile_rows = []
    image_hashes = {}
    for index, pid in enumerate(profile_ids):
        name = rng.choice(NAMES)
        birth_year = 1975 + rng.randrange(0, 20)
        birthdate = f"{birth_year}-{rng.randrange(1, 13):02d}-{rng.randrange(1, 29):02d}"
        image_hash = _hex(rng, 32)
        image_hashes[pid] = image_hash
        last_seen = _epoch(rng) * (1000 if index == 1 else 1)  # one ms-unit value
        row = {
            "profileID": pid,
            "about": _words(rng),
            "age": 2014 - birth_year,
            "birthdate": birthdate,
            "isBlocked": 0,
            "isBlocker": 0,
            "bodyType": rng.randrange(1, 4),
            "children": rng.randrange(0, 3),
            "displayName": name,
            "ethnicity": rng.randrange(1, 4),
            "weight": 60000 + rng.randrange(0, 40) * 1000,
            "facebookID": f"fb.{name}.{rng.randrange(100, 999)}",
            "headline": _words(rng, 2, 4),
            "headlineDate": _epoch(rng),
            "height": 160 + rng.randrange(0, 40),
            "isCurrent": 1 if pid == owner_id else 0,
            "isFave": rng.randrange(0, 2),
            "Version": "2.1.1",
            "profileImageHash": image_hash,
            "relationshipStatus": rng.randrange(1, 3),
            "showAge": 1,
            "showDistance": 1,
            "twitterID": name if rng.random() < 0.5 else "",
            "instagramID": "",
            "lastSeen": last_seen,
            "profileStatus": "",
        }
        profile_rows.append(row)

    chat_rows = []
    gallery_rows = []
    for i in range(plan.messages):
        counterpart = profile_ids[1 + i % max(plan.profiles, 1)] if plan.profiles else owner_id
        outbound = rng.random() < 0.5
        sender, target = (owner_id, counterpart) if outbound else (counterpart, owner_id)
        is_media = plan.messages >= 3 and i == 2
        media_hash = _hex(rng, 32) if is_media else None
        body = media_hash if is_media else _words(rng)
        row = {
            "messageID": i + 1,
            "Source": sender,
            "Target": target,
            "Timestamp": _epoch(rng),
            "Type": "text" if not is_media else "image",
            "Body": body,
            "Unread": rng.randrange(0, 2),
            "Failed": 0,
        }
        chat_rows.append(row)
        if is_media:
            gallery_rows.append({"messageID": i + 1, "mediaHash": media_hash, "Profile": counterpart})

    ddl = {
        "blocks": (("profile", "TEXT"), ("timeStamp", "INTEGER"), ("isBlocked", "INTEGER")),
        "bodyTypeField": (("fieldID", "INTEGER"), ("name", "TEXT")),
        "broadcast": (("messageID", "INTEGER"), ("expirationDate", "INTEGER")),
        "chat": (
            ("messageID", "INTEGER"), ("Source", "TEXT"), ("Target", "TEXT"),
            ("Timestamp", "INTEGER"), ("Type", "TEXT"), ("Body", "TEXT"),
            ("Unread", "INTEGER"), ("Failed", "INTEGER"),
        ),
        "ethnicityField": (("fieldID", "INTEGER"), ("Name", "TEXT")),
        "flagReason": (("fieldID", "INTEGER"), ("Name", "TEXT")),
        "imageGallery": (("messageID", "INTEGER"), ("mediaHash", "TEXT"), ("Profile", "TEXT")),
        "lookingFor": (("Profile", "TEXT"), ("lookingForId", "INTEGER")),
        "lookingForField": (("fieldID", "INTEGER"), ("Name", "TEXT")),
        "moderation": (
            ("messageID", "INTEGER"), ("Message", "TEXT"), ("Type", "TEXT"),
            ("mediaHash", "TEXT"), ("Unread", "INTEGER"),
        ),
        "profile": tuple(
            (name, "INTEGER" if name in (
                "age", "isBlocked", "isBlocker", "bodyType", "children", "ethnicity",
                "weight", "headlineDate", "height", "isCurrent", "isFave",
                "relationshipStatus", "showAge", "showDistance", "lastSeen",
            ) else "TEXT")
            for name in (
                "profileID", "about", "age", "birthdate", "isBlocked", "isBlocker",
                "bodyType", "children", "displayName", "ethnicity", "weight",
                "facebookID", "headline", "headlineDate", "height", "isCurrent",
                "isFave", "Version", "profileImageHash", "relationshipStatus",
                "showAge", "showDistance", "twitterID", "instagramID", "lastSeen",
                "profileStatus",
            )
        ),
    }
    rows = {
        "bodyTypeField": [{"fieldID": i + 1, "name": n} for i, n in enumerate(("Slim", "Average", "Athletic"))],
        "ethnicityField": [{"fieldID": i + 1, "Name": n} for i, n in enumerate(("A", "B", "C"))],
        "lookingForField": [{"fieldID": i + 1, "Name": n} for i, n in enumerate(("Chat", "Friends", "Dates"))],
        "flagReason": [{"fieldID": 1, "Name": "Spam"}],
        "broadcast": [{"messageID": 1, "expirationDate": BASE_EPOCH + 60 * DAY}],
        "blocks": [],
        "moderation": [],
        "lookingFor": [{"Profile": pid, "lookingForId": rng.randrange(1, 4)} for pid in profile_ids[1:]],
        "chat": chat_rows,
        "imageGallery": gallery_rows,
        "profile": profile_rows,
    }
    if plan.profiles or plan.messages:
        _create_db(package_dir / "databases" / "grindr.db", ddl, rows)
        _create_db(
            package_dir / "databases" / "1dfd3ff262804a5794a90eb9d3a15b9f",
            {"api_calls": (("id", "INTEGER"), ("call", "TEXT"))},
            {},
        )

    gallery_by_message = {r["messageID"]: r["mediaHash"] for r in gallery_rows}
    for row in chat_rows:
        direction = Direction.OUTBOUND if row["Source"] == owner_id else Direction.INBOUND
        manifest.messages.append(
            ChatMessage(
                app=AppId.GRINDR,
                message_id=str(row["messageID"]),
                sender_id=row["Source"],
                recipient_id=row["Target"],
                sent_at=_instant(row["Timestamp"]),
                body=row["Body"],
                direction=direction,
                unread=bool(row["Unread"]),
                failed=False,
                media_ref=gallery_by_message.get(row["messageID"]),
                source=source,
            )
        )
    for row in profile_rows:
        social = {"facebook": row["facebookID"]}
        if row["twitterID"]:
            social["twitter"] = row["twitterID"]
        last_seen_raw = row["lastSeen"]
        if last_seen_raw >= 10 ** 11:
            seconds, millis = divmod(last_seen_raw, 1000)
            last_seen = EPOCH_ORIGIN + timedelta(seconds=seconds, milliseconds=millis)
        else:
            last_seen = _instant(last_seen_raw)
        manifest.profiles.append(
            ProfileRecord(
                app=AppId.GRINDR,
                profile_id=row["profileID"],
                display_name=row["displayName"],
                birth_date=date.fromisoformat(row["birthdate"]),
                age=row["age"],
                social_ids=social,
                image_hash=row["profileImageHash"],
                last_seen=last_seen,
                is_owner=row["isCurrent"] == 1,
                raw_fields=dict(row),
                source=source,
            )
        )

    # Picasso cache: one .o/.i pair per profile, URL embeds the image hash.
    if plan.profiles or plan.messages:
        for pid in profile_ids:
            image_hash = image_hashes[pid]
            url = f"http://cdns.grindr.example/images/{image_hash}.jpg"
            stem = image_hash[:12]
            image_data = _jpeg_bytes(rng)
            meta = (
                f"GET {url} HTTP/1.1\r\nHost: cdns.grindr.example\r\n"
                "User-Agent: Picasso\r\n\r\n"
            ).encode()
            _write(package_dir / "cache" / "Picasso-cache" / f"{stem}.o", meta)
            _write(package_dir / "cache" / "Picasso-cache" / f"{stem}.i", image_data)
            manifest.image_links.append(
                {
                    "app": AppId.GRINDR.value,
                    "profile_id": pid,
                    "url": url,
                    "content_hash": sha256_hex(image_data),
                    "via": "hash-in-url",
                }
            )

    if plan.tokens:
        token = _token_value(rng, "GRN")
        email = f"{rng.choice(NAMES)}.{rng.randrange(10, 99)}@example.test"
        last_active = _epoch(rng)
        prefs_rel = f"{rel}/shared_prefs/Rules.xml"
        _write(
            package_dir / "shared_prefs" / "Rules.xml",
            _prefs_xml(
                [
                    ("string", "grindrToken", token),
                    ("string", "sessionId", _hex(rng, 16)),
                    ("long", "lastActiveTime", last_active),
                    ("string", "email", email),
                ]
            ),
        )
        prefs_source = ArtifactSource(prefs_rel, FileKind.PREFS_XML)
        manifest.tokens.append(
            AuthToken(provider=TokenProvider.GRINDR, token=token, app=AppId.GRINDR, source=prefs_source)
        )
        manifest.emails.append(EmailArtifact(AppId.GRINDR, email, prefs_source))
        manifest.token_values[AppId.GRINDR.value] = token


def _forge_skout(rng, plan, package_dir, rel, manifest):
    db_rel = f"{rel}/databases/skout.db"
    source = ArtifactSource(db_rel, FileKind.SQLITE_DB)
    owner_id = "2000000"
    profile_ids = [str(2000001 + i) for i in range(plan.profiles)]

    user_rows = []
    for pid in profile_ids:
        user_rows.append(
            {
                "userID": pid,
                "userName": rng.choice(NAMES),
                "picUrl": f"http://cdn.skout.example/u/{pid}.jpg",
                "userLastMessageID": rng.randrange(1, 50),
                "lastMessageTimestamp": _epoch(rng),
            }
        )

    message_rows = []
    kinds = ["normal", "normal", "picture", "rich"]
    for i in range(plan.messages):
        kind = kinds[i % len(kinds)] if plan.messages >= 3 else "normal"
        counterpart = profile_ids[i % max(len(profile_ids), 1)] if profile_ids else "2000009"
        outbound = rng.random() < 0.5
        sender, recipient = (owner_id, counterpart) if outbound else (counterpart, owner_id)
        body = (
            f"http://cdn.skout.example/m/{_hex(rng, 8)}.jpg" if kind == "picture" else _words(rng)
        )
        message_rows.append(
            {
                "messageID": i + 1,
                "Timestamp": _epoch(rng),
                "fromUserID": sender,
                "toUserID": recipient,
                "chatID": f"c{1 + i % 2}",
                "Type": kind,
                "Message": body,
                "addedFrom": "",
                "messageOrdered": 1,
            }
        )

    if plan.profiles or plan.messages:
        _create_db(
            package_dir / "databases" / "skout.db",
            {
                "skoutUsersTable": (
                    ("userID", "TEXT"), ("userName", "TEXT"), ("picUrl", "TEXT"),
                    ("userLastMessageID", "INTEGER"), ("lastMessageTimestamp", "INTEGER"),
                ),
                "skoutMessages": (
                    ("messageID", "INTEGER"), ("Timestamp", "INTEGER"), ("fromUserID", "TEXT"),
                    ("toUserID", "TEXT"), ("chatID", "TEXT"), ("Type", "TEXT"),
                    ("Message", "TEXT"), ("addedFrom", "TEXT"), ("messageOrdered", "INTEGER"),
                ),
            },
            {"skoutUsersTable": user_rows, "skoutMessages": message_rows},
        )

    for row in message_rows:
        manifest.messages.append(
            ChatMessage(
                app=AppId.SKOUT,
                message_id=str(row["messageID"]),
                sender_id=row["fromUserID"],
                recipient_id=row["toUserID"],
                sent_at=_instant(row["Timestamp"]),
                body=row["Message"],
                direction=Direction.UNKNOWN,
                media_ref=row["Message"] if row["Type"] == "picture" else None,
                admin_origin=True if row["Type"] == "rich" else None,
                source=source,
            )
        )
    for row in user_rows:
        manifest.profiles.append(
            ProfileRecord(
                app=AppId.SKOUT,
                profile_id=row["userID"],
                display_name=row["userName"],
                raw_fields=dict(row),
                source=source,
            )
        )
        manifest.media_urls.append(
            MediaUrlRecord(AppId.SKOUT, row["picUrl"], source, "skoutUsersTable", "picUrl")
        )

    if plan.tokens:
        token = _token_value(rng, "CAASK")
        for fname, key in (
            ("LOGIN_PREFS.xml", "access_token"),
            (_FACEBOOK_PREFS_FILE, "com.facebook.token.AccessToken"),
        ):
            _write(package_dir / "shared_prefs" / fname, _prefs_xml([("string", key, token)]))
            manifest.tokens.append(
                AuthToken(
                    provider=TokenProvider.FACEBOOK,
                    token=token,
                    app=AppId.SKOUT,
                    source=ArtifactSource(f"{rel}/shared_prefs/{fname}", FileKind.PREFS_XML),
                )
            )
        _write(
            package_dir / "shared_prefs" / "LOCATION_PREFS.xml",
            _prefs_xml([("long", "LOCATION_LAST_SENT_TIME", _epoch(rng))]),
        )
        manifest.token_values[AppId.SKOUT.value] = token


def _forge_tinder(rng, plan, package_dir, rel, manifest):
    db_rel = f"{rel}/databases/tinder.db"
    source = ArtifactSource(db_rel, FileKind.SQLITE_DB)
    counterpart_ids = [str(3000001 + i) for i in range(max(plan.matches, 1))]

    match_rows = []
    for i in range(plan.matches):
        created = _epoch(rng)
        match_rows.append(
            {
                "Id": f"m{4001 + i}",
                "User_id": counterpart_ids[i % len(counterpart_ids)],
                "Created": created,
                "Last_activity": created + rng.randrange(0, 5 * DAY),
                "Server_message_count": None,
                "Touched": 1,
                "Viewed": rng.randrange(0, 2),
                "User_name": rng.choice(NAMES),
                "Draft_msg": "",
                "Reported_for": "",
                "Gender": rng.randrange(0, 2),
                "Following": 1,
            }
        )

    message_rows = []
    for i in range(plan.messages):
        match = match_rows[i % len(match_rows)] if match_rows else None
        message_rows.append(
            {
                "User_id": match["User_id"] if match else counterpart_ids[0],
                "Match_id": match["Id"] if match else "",
                "Client_created": None,
                "Created": _epoch(rng),
                "Has_error": 0,
                "Text": _words(rng),
                "Viewed": rng.randrange(0, 2),
            }
        )

    analytics_rows = []
    fixes = []
    for i in range(plan.location_fixes):
        lat = round(-34.92 - rng.random() / 50, 5)
        lon = round(138.59 + rng.random() / 50, 5)
        at = _epoch(rng)
        params = {
            "userID": "3000000",
            "latitude": lat,
            "longitude": lon,
            "networkType": "wifi",
            "deviceId": f"d-{_hex(rng, 12)}",
        }
        analytics_rows.append(
            {"timestamp": at, "Name": "session.start", "Params": json.dumps(params, sort_keys=True)}
        )
        fixes.append((lat, lon, at))

    avatar_urls = [f"http://images.tinder.example/u/{cid}/avatar.jpg" for cid in counterpart_ids]
    friend_rows = []
    for i in range(plan.profiles):
        cid = counterpart_ids[i % len(counterpart_ids)]
        friend_rows.append(
            {
                "Id": f"fb{7000 + i}",
                "Name": rng.choice(NAMES),
                "Avatar_url": avatar_urls[i % len(avatar_urls)],
                "State": "",
                "Tinder": cid,
            }
        )

    photo_rows = [
        {
            "Id": f"p{9000 + i}",
            "User_id": "3000000",
            "Image_url": f"http://images.tinder.example/photos/p{9000 + i}.jpg",
            "Origin_x": 0, "Origin_y": 0, "Height": 640, "Width": 640,
            "Xoffset_percent": 0.0, "Yoffset_percent": 0.0,
            "Xdistance_Percent": 1.0, "Ydistance_Percent": 1.0,
            "Photo_order": i,
        }
        for i in range(2 if (plan.profiles or plan.messages) else 0)
    ]
    photo_moment_rows = (
        [
            {
                "Id": "pm1",
                "Large": "http://images.tinder.example/moments/pm1_l.jpg",
                "Med": "http://images.tinder.example/moments/pm1_m.jpg",
                "Orig": "http://images.tinder.example/moments/pm1_o.jpg",
                "Small": "http://images.tinder.example/moments/pm1_s.jpg",
                "thumb": "http://images.tinder.example/moments/pm1_t.jpg",
            }
        ]
        if (plan.profiles or plan.messages)
        else []
    )
    moment_rows = (
        [
            {
                "Id": "mo1", "User_id": "3000000", "Created": _epoch(rng),
                "Text": _words(rng, 2, 5), "Photo_id": "p9000", "Filter": "none",
                "Text_alignment": 0, "Text_size": 12, "Text_height": 20,
                "Is_pending": 0, "Has_failed": 0, "Rated_type": "", "Num_likes": rng.randrange(0, 9),
            }
        ]
        if (plan.profiles or plan.messages)
        else []
    )

    if plan.profiles or plan.messages or plan.matches or plan.location_fixes:
        _create_db(
            package_dir / "databases" / "tinder.db",
            {
                "messages": (
                    ("User_id", "TEXT"), ("Match_id", "TEXT"), ("Client_created", "TEXT"),
                    ("Created", "INTEGER"), ("Has_error", "INTEGER"), ("Text", "TEXT"),
                    ("Viewed", "INTEGER"),
                ),
                "Analytic_Events": (("timestamp", "INTEGER"), ("Name", "TEXT"), ("Params", "TEXT")),
                "facebook_friends": (
                    ("Id", "TEXT"), ("Name", "TEXT"), ("Avatar_url", "TEXT"),
                    ("State", "TEXT"), ("Tinder", "TEXT"),
                ),
                "Match_requests": (("_id", "INTEGER"),),
                "matches": (
                    ("Id", "TEXT"), ("User_id", "TEXT"), ("Created", "INTEGER"),
                    ("Last_activity", "INTEGER"), ("Server_message_count", "INTEGER"),
                    ("Touched", "INTEGER"), ("Viewed", "INTEGER"), ("User_name", "TEXT"),
                    ("Draft_msg", "TEXT"), ("Reported_for", "TEXT"), ("Gender", "INTEGER"),
                    ("Following", "INTEGER"),
                ),
                "Moment_likes": (
                    ("Date", "INTEGER"), ("Moment_id", "TEXT"), ("Liked_by_id", "TEXT"),
                    ("Thumb_url", "TEXT"), ("Has_been_viewed", "INTEGER"),
                    ("Mixed_id", "TEXT"), ("By_user_id", "TEXT"),
                ),
                "moments": (
                    ("Id", "TEXT"), ("User_id", "TEXT"), ("Created", "INTEGER"),
                    ("Text", "TEXT"), ("Photo_id", "TEXT"), ("Filter", "TEXT"),
                    ("Text_alignment", "INTEGER"), ("Text_size", "INTEGER"),
                    ("Text_height", "INTEGER"), ("Is_pending", "INTEGER"),
                    ("Has_failed", "INTEGER"), ("Rated_type", "TEXT"), ("Num_likes", "INTEGER"),
                ),
                "photos": (
                    ("Id", "TEXT"), ("User_id", "TEXT"), ("Image_url", "TEXT"),
                    ("Origin_x", "INTEGER"), ("Origin_y", "INTEGER"), ("Height", "INTEGER"),
                    ("Width", "INTEGER"), ("Xoffset_percent", "REAL"), ("Yoffset_percent", "REAL"),
                    ("Xdistance_Percent", "REAL"), ("Ydistance_Percent", "REAL"),
                    ("Photo_order", "INTEGER"),
                ),
                "photo_moments": (
                    ("Id", "TEXT"), ("Large", "TEXT"), ("Med", "TEXT"),
                    ("Orig", "TEXT"), ("Small", "TEXT"), ("thumb", "TEXT"),
                ),
            },
            {
                "messages": message_rows,
                "matches": match_rows,
                "Analytic_Events": analytics_rows,
                "facebook_friends": friend_rows,
                "photos": photo_rows,
                "photo_moments": photo_moment_rows,
                "moments": moment_rows,
            },
        )

    for i, row in enumerate(message_rows):
        manifest.messages.append(
            ChatMessage(
                app=AppId.TINDER,
                message_id=str(i + 1),
                sender_id=row["User_id"],
                recipient_id="",
                sent_at=_instant(row["Created"]),
                body=row["Text"],
                direction=Direction.UNKNOWN,
                unread=not bool(row["Viewed"]),
                failed=False,
                match_id=row["Match_id"] or None,
                source=source,
            )
        )
    for row in match_rows:
        manifest.matches.append(
            MatchRecord(
                app=AppId.TINDER,
                match_id=row["Id"],
                counterpart_user_id=row["User_id"],
                created_at=_instant(row["Created"]),
                last_activity=_instant(row["Last_activity"]),
                viewed=bool(row["Viewed"]),
                raw_fields=dict(row),
                source=source,
            )
        )
    for row in friend_rows:
        manifest.profiles.append(
            ProfileRecord(
                app=AppId.TINDER,
                profile_id=row["Tinder"],
                display_name=row["Name"],
                social_ids={"facebook": row["Id"]},
                raw_fields=dict(row),
                source=source,
            )
        )
    for lat, lon, at in fixes:
        manifest.locations.append(
            LocationFix(
                precision="exact", lat=lat, lon=lon, at=_instant(at),
                subject="owner", app=AppId.TINDER, source=source,
            )
        )

    # Volley cache: one JSON match event per match, behind a binary header.
    if match_rows:
        volley_rel = f"{rel}/cache/volley/entry_0001"
        payload = bytearray(_noise(rng, 24))
        for row in match_rows:
            event_doc = {
                "match_id": row["Id"],
                "matched": bool(row["Viewed"]),
                "date": row["Created"],
            }
            payload += json.dumps(event_doc, sort_keys=True).encode()
            manifest.volley_events.append(
                VolleyMatchEvent(
                    match_id=row["Id"],
                    matched=bool(row["Viewed"]),
                    occurred_at=_instant(row["Created"]),
                    source=ArtifactSource(volley_rel, FileKind.JSON),
                )
            )
        _write(package_dir / "cache" / "volley" / "entry_0001", bytes(payload))

    # Picasso pairs: friend avatar (linkable by URL equality) plus one photo.
    if friend_rows:
        pairs = [avatar_urls[0]]
        if photo_rows:
            pairs.append(photo_rows[0]["Image_url"])
        for index, url in enumerate(pairs):
            image_data = _jpeg_bytes(rng)
            meta = (f"GET {url} HTTP/1.1\r\nHost: images.tinder.example\r\n\r\n").encode()
            stem = f"t{index:02d}{_hex(rng, 8)}"
            _write(package_dir / "cache" / "Picasso-cache" / f"{stem}.o", meta)
            _write(package_dir / "cache" / "Picasso-cache" / f"{stem}.i", image_data)
            if index == 0:
                for row in friend_rows:
                    if row["Avatar_url"] == url:
                        manifest.image_links.append(
                            {
                                "app": AppId.TINDER.value,
                                "profile_id": row["Tinder"],
                                "url": url,
                                "content_hash": sha256_hex(image_data),
                                "via": "url-equals",
                            }
                        )

    if plan.tokens:
        fb_token = _token_value(rng, "CAATI")
        tinder_token = _token_value(rng, "TIN")
        lat = round(-34.92 - rng.random() / 50, 5)
        lon = round(138.59 + rng.random() / 50, 5)
        prefs_rel = f"{rel}/shared_prefs/SP.xml"
        _write(
            package_dir / "shared_prefs" / "SP.xml",
            _prefs_xml(
                [
                    ("string", "facebook_token", fb_token),
                    ("string", "tinder_token", tinder_token),
                    ("float", "latitude", lat),
                    ("float", "longitude", lon),
                ]
            ),
        )
        prefs_source = ArtifactSource(prefs_rel, FileKind.PREFS_XML)
        manifest.tokens.append(
            AuthToken(provider=TokenProvider.FACEBOOK, token=fb_token, app=AppId.TINDER, source=prefs_source)
        )
        manifest.tokens.append(
            AuthToken(provider=TokenProvider.TINDER, token=tinder_token, app=AppId.TINDER, source=prefs_source)
        )
        manifest.locations.append(
            LocationFix(
                precision="exact", lat=lat, lon=lon, subject="owner",
                app=AppId.TINDER, source=prefs_source,
            )
        )
        manifest.token_values[AppId.TINDER.value] = tinder_token


def _forge_meetme(rng, plan, package_dir, rel, manifest):
    db_rel = f"{rel}/databases/meetme.db"
    source = ArtifactSource(db_rel, FileKind.SQLITE_DB)
    rows = []
    for i in range(plan.messages):
        rows.append(
            {
                "text_body": _words(rng),
                "created_at": _epoch(rng),
                "sender": f"40000{1 + i % 2}",
                "recipient": f"40000{2 - i % 2}",
            }
        )
    if rows:
        _create_db(
            package_dir / "databases" / "meetme.db",
            {
                "msgs": (
                    ("text_body", "TEXT"), ("created_at", "INTEGER"),
                    ("sender", "TEXT"), ("recipient", "TEXT"),
                )
            },
            {"msgs": rows},
        )
    for i, row in enumerate(rows):
        manifest.messages.append(
            ChatMessage(
                app=AppId.MEETME,
                message_id=str(i + 1),
                sender_id=row["sender"],
                recipient_id=row["recipient"],
                sent_at=_instant(row["created_at"]),
                body=row["text_body"],
                direction=Direction.UNKNOWN,
                heuristic=True,
                source=source,
            )
        )
    if plan.tokens:
        _facebook_prefs(rng, package_dir / "shared_prefs", rel, manifest, AppId.MEETME)


def _forge_jaumo(rng, plan, package_dir, rel, manifest):
    db_rel = f"{rel}/databases/jaumo.db"
    source = ArtifactSource(db_rel, FileKind.SQLITE_DB)
    rows = [
        {"pic_id": i + 1, "picUrl": f"http://img.jaumo.example/g/{_hex(rng, 8)}.jpg"}
        for i in range(plan.images)
    ]
    if rows:
        _create_db(
            package_dir / "databases" / "jaumo.db",
            {"gallery": (("pic_id", "INTEGER"), ("picUrl", "TEXT"))},
            {"gallery": rows},
        )
    for row in rows:
        manifest.media_urls.append(
            MediaUrlRecord(AppId.JAUMO, row["picUrl"], source, "gallery", "picUrl")
        )
    if plan.tokens:
        _facebook_prefs(rng, package_dir / "shared_prefs", rel, manifest, AppId.JAUMO)


def _forge_fullcircle(rng, plan, package_dir, rel, manifest):
    (package_dir / "cache").mkdir(parents=True, exist_ok=True)
    if plan.tokens:
        _facebook_prefs(rng, package_dir / "shared_prefs", rel, manifest, AppId.FULLCIRCLE)


def _forge_miumeet(rng, plan, package_dir, rel, manifest):
    (package_dir / "cache").mkdir(parents=True, exist_ok=True)
    if plan.tokens:
        token = _token_value(rng, "MIU")
        fname = "com.miumeet.prefs.xml"
        _write(package_dir / "shared_prefs" / fname, _prefs_xml([("string", "auth_token", token)]))
        manifest.tokens.append(
            AuthToken(
                provider=TokenProvider.MIUMEET,
                token=token,
                app=AppId.MIUMEET,
                source=ArtifactSource(f"{rel}/shared_prefs/{fname}", FileKind.PREFS_XML),
            )
        )
        manifest.token_values[AppId.MIUMEET.value] = token


_BUILDERS = {
    AppId.BADOO: _forge_badoo,
    AppId.GRINDR: _forge_grindr,
    AppId.SKOUT: _forge_skout,
    AppId.TINDER: _forge_tinder,
    AppId.MEETME: _forge_meetme,
    AppId.JAUMO: _forge_jaumo,
    AppId.FULLCIRCLE: _forge_fullcircle,
    AppId.MIUMEET: _forge_miumeet,
}


# -- transaction log ----------------------------------------------------------

_API_HOSTS = {
    AppId.BADOO: "badoo.example", AppId.GRINDR: "grindr.example",
    AppId.SKOUT: "skout.example", AppId.TINDER: "tinder.example",
    AppId.MEETME: "meetme.example", AppId.JAUMO: "jaumo.example",
    AppId.FULLCIRCLE: "fullcircle.example", AppId.MIUMEET: "miumeet.example",
}


def _plant_transaction(rng: Random, plant: LeakPlant, token_values: dict) -> dict:
    host = _API_HOSTS[plant.app]
    scheme = "https" if plant.tls else "http"
    lat = round(-34.92 - rng.random() / 50, 5)
    lon = round(138.59 + rng.random() / 50, 5)
    doc = {
        "method": "GET",
        "url": f"{scheme}://api.{host}/v1/profile/{rng.randrange(100, 999)}",
        "tls": plant.tls,
        "req_body": b"",
        "status": 200,
        "resp_body": b'{"ok":true}',
        "app": plant.app.value,
    }
    category = plant.category
    if category is LeakCategory.EXACT_LOCATION:
        doc["method"] = "POST"
        doc["url"] = f"{scheme}://api.{host}/v1/location/report"
        doc["req_body"] = f"lat={lat}&lon={lon}".encode()
    elif category is LeakCategory.LOCATION_IN_FILENAME:
        # empty response body: a plaintext image here would be its own finding
        doc["url"] = f"{scheme}://img.{host}/shots/{lat}_{lon}.jpg"
        doc["resp_body"] = b""
    elif category is LeakCategory.PLAINTEXT_MESSAGE:
        doc["method"] = "POST"
        doc["url"] = f"{scheme}://api.{host}/v1/relay"
        doc["req_body"] = json.dumps({"message": _words(rng)}).encode()
    elif category is LeakCategory.PLAINTEXT_IMAGE:
        doc["url"] = f"{scheme}://media.{host}/v1/full/{rng.randrange(100, 999)}"
        doc["resp_body"] = _jpeg_bytes(rng)
    elif category is LeakCategory.EMAIL_ADDRESS:
        doc["method"] = "POST"
        doc["url"] = f"{scheme}://api.{host}/v1/account"
        doc["req_body"] = f"email={rng.choice(NAMES)}@example.test&plan=free".encode()
    elif category is LeakCategory.TOKEN_IN_TRANSIT:
        token = token_values.get(plant.app.value) or _token_value(rng, "TKX")
        token_values[plant.app.value] = token  # manifest must know planted values
        doc["url"] = f"{scheme}://api.{host}/v1/profile?token={token}"
    elif category is LeakCategory.COARSE_LOCATION:
        if plant.app is AppId.SKOUT:
            doc["resp_body"] = (
                b"<user><name>kiri</name><country>AU</country><state>SA</state>"
                b"<distance>12.3</distance></user>"
            )
        else:
            doc["req_body"] = json.dumps(
                {"suburb": rng.choice(SUBURBS), "nearby": rng.randrange(1, 9)}
            ).encode()
            doc["method"] = "POST"
            doc["url"] = f"{scheme}://api.{host}/v1/area"
    return doc


_DECOY_BUILDERS = (
    lambda rng, host: {"method": "GET", "url": f"https://api.{host}/v2/settings", "tls": True,
                       "req_body": b"", "status": 200, "resp_body": b'{"ok":true,"count":4}'},
    lambda rng, host: {"method": "GET", "url": f"http://static.{host}/css/app.css", "tls": False,
                       "req_body": b"", "status": 200, "resp_body": b"body{margin:0}"},
    lambda rng, host: {"method": "POST", "url": f"https://api.{host}/v2/metrics", "tls": True,
                       "req_body": b'{"event":"open","v":"1.2.3"}', "status": 204, "resp_body": b""},
    lambda rng, host: {"method": "GET", "url": f"http://cdn.{host}/page/42", "tls": False,
                       "req_body": b"", "status": 200,
                       "resp_body": b"Your message history is available in the app"},
    lambda rng, host: {"method": "POST", "url": f"http://api.{host}/v1/telemetry", "tls": False,
                       "req_body": b"metric=912.34567&other=481.23456", "status": 200,
                       "resp_body": b""},
    lambda rng, host: {"method": "POST", "url": f"http://api.{host}/v1/weather", "tls": False,
                       "req_body": b"temp=34.56789", "status": 200, "resp_body": b""},
    lambda rng, host: {"method": "GET", "url": f"http://api.{host}/v1/zoom?v=34.92&w=138.60",
                       "tls": False, "req_body": b"", "status": 200, "resp_body": b""},
    lambda rng, host: {"method": "POST", "url": f"https://api.{host}/v2/support", "tls": True,
                       "req_body": b"contact=ops@example.test", "status": 200, "resp_body": b""},
    lambda rng, host: {"method": "GET", "url": f"https://media.{host}/v2/avatar/9", "tls": True,
                       "req_body": b"", "status": 200,
                       "resp_body": b"\xff\xd8\xff\xe0\x00\x10JFIF\x00\x01 tiny"},
    lambda rng, host: {"method": "GET", "url": f"http://api.{host}/v1/status", "tls": False,
                       "req_body": b"", "status": 200, "resp_body": b'{"status":"ok"}'},
)


def forge_transaction_log(
    plan: LogPlan,
    seed: int = 42,
    token_values: dict | None = None,
    inject_malformed: bool = False,
) -> tuple[bytes, dict]:
    """Emit an NDJSON capture with planted leaks and clean decoys.

    Returns (ndjson bytes, manifest).  The manifest lists every planted
    finding by final transaction index; decoys must produce none.
    """
    rng = Random(seed ^ 0x5EAF)
    token_values = dict(token_values or {})
    entries = []
    for plant in plan.plants:
        entries.append(("plant", plant, _plant_transaction(rng, plant, token_values)))
    apps = list(_API_HOSTS)
    for i in range(plan.decoys):
        app = apps[i % len(apps)]
        builder = _DECOY_BUILDERS[i % len(_DECOY_BUILDERS)]
        doc = builder(rng, _API_HOSTS[app])
        doc["app"] = app.value
        entries.append(("decoy", None, doc))
    rng.shuffle(entries)

    lines = []
    planted = []
    ts = float(BASE_EPOCH)
    for index, (kind, plant, doc) in enumerate(entries):
        ts += 7.5 + (index % 5)
        line = {
            "ts": ts,
            "method": doc["method"],
            "url": doc["url"],
            "tls": doc["tls"],
            "req_headers": {"Host": doc["url"].split("/")[2]},
            "req_body_b64": base64.b64encode(doc["req_body"]).decode(),
            "status": doc["status"],
            "resp_headers": {},
            "resp_body_b64": base64.b64encode(doc["resp_body"]).decode(),
            "app": doc["app"],
        }
        lines.append(json.dumps(line, sort_keys=True))
        if kind == "plant":
            planted.append(
                {"index": index, "app": plant.app.value, "category": plant.category.value,
                 "tls": plant.tls}
            )
    if inject_malformed and lines:
        # indices refer to parsed order; the malformed line is skipped at ingest
        lines.insert(1, '{"ts": broken')
    body = ("\n".join(lines) + "\n").encode()
    manifest = {
        "transactions": len(entries),
        "planted": sorted(planted, key=lambda p: p["index"]),
        "token_values": dict(token_values),
    }
    return body, manifest


def forge_bundle(spec: ForgeSpec, outdir: Path) -> Manifest:
    """Corpus + transaction log + manifest in one step (CLI surface).

    Layout: <outdir>/evidence/...  <outdir>/transactions.ndjson
    <outdir>/manifest.json
    """
    outdir = Path(outdir)
    if outdir.exists() and any(outdir.iterdir()):
        raise ForgeError(f"output directory not empty: {outdir}")
    manifest = forge_corpus(spec, outdir / "evidence")
    log_bytes, log_manifest = forge_transaction_log(
        spec.log,
        seed=spec.seed,
        token_values=manifest.token_values,
        inject_malformed=bool(spec.inject_malformed.get("transaction")),
    )
    (outdir / "transactions.ndjson").write_bytes(log_bytes)
    manifest.log = log_manifest
    (outdir / "manifest.json").write_text(
        json.dumps(manifest.to_dict(), sort_keys=True, indent=2) + "\n"
    )
    return manifest
