"""Android shared_prefs XML parsing and per-app key extraction.

The prefs dialect is a root <map> whose children are typed elements:
<string name="k">v</string> holds its value as text, the numeric and
boolean types carry a value="" attribute.
"""

from __future__ import annotations

import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from pathlib import PurePosixPath
from typing import Optional

from .model import (
    AppId,
    ArtifactSource,
    AuthToken,
    EmailArtifact,
    LocationFix,
    MalformedTimestamp,
    TokenProvider,
    normalize_epoch,
)

PREF_TYPES = ("string", "int", "long", "boolean", "float")

# Facebook SDK token stores appear under these exact filenames for any app.
FACEBOOK_TOKEN_FILES = frozenset(
    {
        "com.facebook.SharedPreferencesTokenCachingStrategy.DEFAULT_KEY.xml",
        "com.facebook.AuthorizationClient.WebViewAuthHandler.TOKEN_STORE_KEY.xml",
    }
)

EMAIL_RE = re.compile(r"[A-Za-z0-9._%+-]+@[A-Za-z0-9.-]+\.[A-Za-z]{2,}")

NATIVE_PROVIDERS = {
    AppId.GRINDR: TokenProvider.GRINDR,
    AppId.TINDER: TokenProvider.TINDER,
    AppId.MIUMEET: TokenProvider.MIUMEET,
}

LATLON_DISCLOSURE = (
    "prefs lat/lon heuristic: keys containing 'lat'/'lon'/'lng' with decimal "
    "values in coordinate range were read as the owner's position"
)
TOKEN_KEY_DISCLOSURE = (
    "prefs token heuristic: string keys containing 'token' were treated as "
    "credentials (longest value wins within a file)"
)


class PrefsParseError(ValueError):
    """Malformed prefs XML; carries the byte offset of the failure."""

    def __init__(self, message: str, byte_offset: int):
        super().__init__(f"{message} (byte offset {byte_offset})")
        self.byte_offset = byte_offset


@dataclass(frozen=True)
class PrefsValue:
    type_name: str
    raw: str
    value: object


@dataclass
class PrefsDocument:
    source: ArtifactSource
    entries: dict = field(default_factory=dict)  # key -> PrefsValue
    warnings: list = field(default_factory=list)


@dataclass
class PrefsFindings:
    tokens: list = field(default_factory=list)
    locations: list = field(default_factory=list)
    emails: list = field(default_factory=list)
    last_active: Optional[object] = None  # datetime
    warnings: list = field(default_factory=list)
    disclosures: set = field(default_factory=set)


def _parse_typed(tag: str, raw: str) -> object:
    if tag == "string":
        return raw
    if tag in ("int", "long"):
        return int(raw)
    if tag == "float":
        return float(raw)
    if tag == "boolean":
        return raw.strip().lower() == "true"
    return raw


def _byte_offset(data: bytes, line: int, column: int) -> int:
    lines = data.split(b"\n")
    return sum(len(l) + 1 for l in lines[: line - 1]) + column


def parse_prefs_xml(data: bytes, source: ArtifactSource) -> PrefsDocument:
    """Parse one shared_prefs file into a typed key/value document."""
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        line, column = exc.position
        raise PrefsParseError(str(exc), _byte_offset(data, line, column)) from exc

    doc = PrefsDocument(source=source)
    if root.tag != "map":
        doc.warnings.append(f"root element is <{root.tag}>, expected <map>")
    for child in root:
        if child.tag not in PREF_TYPES:
            doc.warnings.append(f"unsupported element <{child.tag}> ignored")
            continue
        key = child.get("name")
        if key is None:
            doc.warnings.append(f"<{child.tag}> entry without a name attribute ignored")
            continue
        raw = child.text or "" if child.tag == "string" else child.get("value", "")
        try:
            value = _parse_typed(child.tag, raw)
        except ValueError:
            doc.warnings.append(f"entry {key!r} has unparseable {child.tag} value {raw!r}")
            value = raw
        if key in doc.entries:
            doc.warnings.append(f"duplicate key {key!r}; last occurrence kept")
        doc.entries[key] = PrefsValue(child.tag, raw, value)
    return doc


def _string_entries(doc: PrefsDocument) -> list[tuple[str, str]]:
    return [(k, v.raw) for k, v in doc.entries.items() if v.type_name == "string"]


def _epoch_entry(value: PrefsValue) -> Optional[int]:
    if isinstance(value.value, int):
        return value.value
    try:
        return int(str(value.raw).strip())
    except (TypeError, ValueError):
        return None


def _best_token(candidates: list[tuple[str, str]]) -> Optional[tuple[str, str]]:
    # Longest value wins; key order breaks exact-length ties deterministically.
    best = None
    for key, value in sorted(candidates):
        if value and (best is None or len(value) > len(best[1])):
            best = (key, value)
    return best


def _expiry_hint(doc: PrefsDocument, findings: PrefsFindings):
    for key, value in doc.entries.items():
        if "expir" in key.lower():
            raw = _epoch_entry(value)
            if raw is None:
                continue
            try:
                instant, _unit = normalize_epoch(raw)
                return instant
            except MalformedTimestamp:
                findings.warnings.append(f"unusable expiry value under key {key!r}")
    return None


def extract_known_prefs(doc: PrefsDocument, app: AppId) -> PrefsFindings:
    """Pull tokens, emails, owner location and activity markers from one file.

    Pure in (doc, app); an Unknown app only gets the generic Facebook-token
    filename rules.
    """
    findings = PrefsFindings()
    fname = PurePosixPath(doc.source.file_path).name
    consumed: set[str] = set()

    token_entries = [
        (k, v) for k, v in _string_entries(doc) if "token" in k.lower()
    ]

    if fname in FACEBOOK_TOKEN_FILES:
        best = _best_token(token_entries)
        if best is not None:
            consumed.add(best[0])
            findings.tokens.append(
                AuthToken(
                    provider=TokenProvider.FACEBOOK,
                    token=best[1],
                    source=doc.source,
                    app=app,
                    expiry_hint=_expiry_hint(doc, findings),
                )
            )
            findings.disclosures.add(TOKEN_KEY_DISCLOSURE)
    elif app is not AppId.UNKNOWN:
        _extract_app_native(doc, app, fname, findings, token_entries, consumed)

    _count_leftovers(doc, findings, consumed, fname)
    return findings


def _extract_app_native(doc, app, fname, findings, token_entries, consumed):
    facebook_keys = [(k, v) for k, v in token_entries if "facebook" in k.lower() or k.lower().startswith("fb")]
    native_keys = [kv for kv in token_entries if kv not in facebook_keys]

    if app is AppId.SKOUT and fname == "LOGIN_PREFS.xml":
        # Skout's login prefs hold the Facebook token despite the plain key name.
        facebook_keys, native_keys = token_entries, []

    best_fb = _best_token(facebook_keys)
    if best_fb is not None:
        consumed.add(best_fb[0])
        findings.tokens.append(
            AuthToken(TokenProvider.FACEBOOK, best_fb[1], doc.source, app=app)
        )
        findings.disclosures.add(TOKEN_KEY_DISCLOSURE)
    best_native = _best_token(native_keys)
    if best_native is not None:
        provider = NATIVE_PROVIDERS.get(app, TokenProvider.OTHER)
        consumed.add(best_native[0])
        findings.tokens.append(AuthToken(provider, best_native[1], doc.source, app=app))
        findings.disclosures.add(TOKEN_KEY_DISCLOSURE)

    for key, value in doc.entries.items():
        lowered = key.lower()
        if "email" in lowered:
            match = EMAIL_RE.search(str(value.raw))
            if match:
                consumed.add(key)
                findings.emails.append(EmailArtifact(app, match.group(), doc.source))
        elif "session" in lowered:
            consumed.add(key)
            findings.warnings.append(
                f"session identifier under key {key!r} recorded but not modeled"
            )

    _extract_last_active(doc, app, fname, findings, consumed)
    _extract_latlon(doc, app, findings, consumed)


def _extract_last_active(doc, app, fname, findings, consumed):
    candidates = []
    for key, value in doc.entries.items():
        lowered = key.lower()
        is_active_key = "active" in lowered and "last" in lowered
        is_skout_key = app is AppId.SKOUT and "location_last" in lowered
        if not (is_active_key or is_skout_key):
            continue
        raw = _epoch_entry(value)
        if raw is None:
            continue
        try:
            instant, _unit = normalize_epoch(raw)
        except MalformedTimestamp as exc:
            findings.warnings.append(f"bad activity timestamp under {key!r}: {exc}")
            continue
        consumed.add(key)
        candidates.append(instant)
    if candidates:
        findings.last_active = max(candidates)


def _extract_latlon(doc, app, findings, consumed):
    lat_value = lon_value = None
    lat_key = lon_key = None
    for key in sorted(doc.entries):
        lowered = key.lower()
        value = doc.entries[key]
        try:
            number = float(str(value.raw).strip())
        except (TypeError, ValueError):
            continue
        if "lat" in lowered and "lon" not in lowered and lat_value is None:
            if -90.0 <= number <= 90.0:
                lat_value, lat_key = number, key
        elif ("lon" in lowered or "lng" in lowered) and lon_value is None:
            if -180.0 <= number <= 180.0:
                lon_value, lon_key = number, key
    if lat_value is not None and lon_value is not None:
        consumed.update({lat_key, lon_key})
        findings.locations.append(
            LocationFix(
                precision="exact",
                lat=lat_value,
                lon=lon_value,
                subject="owner",
                app=app,
                source=doc.source,
            )
        )
        findings.disclosures.add(LATLON_DISCLOSURE)
    elif lat_value is not None or lon_value is not None:
        findings.warnings.append(
            f"unpaired coordinate key {lat_key or lon_key!r} ignored"
        )


def _count_leftovers(doc, findings, consumed, fname):
    leftover = len([k for k in doc.entries if k not in consumed])
    if leftover:
        findings.warnings.append(f"{leftover} unrecognized key(s) in {fname}")
