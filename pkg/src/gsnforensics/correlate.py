"""Analyst-facing fusion: timeline, image links, contact evidence, locations.

Identity equivalence across apps is never inferred; the analyst supplies an
explicit mapping file when two accounts are known to be the same person.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

from .model import AppId, CachedImage, EvidenceBundle, iso_instant

_UNTIMED = datetime.max.replace(tzinfo=timezone.utc)

KIND_ORDER = ("message", "match", "moment", "location", "token_activity", "last_active")


@dataclass(frozen=True)
class TimelineEvent:
    at: Optional[datetime]
    kind: str
    app: AppId
    summary: str
    refs: tuple  # ArtifactSource entries

    def sort_key(self, seq: int):
        return (self.at or _UNTIMED, self.app.value, KIND_ORDER.index(self.kind), seq)


@dataclass(frozen=True)
class ContactEvidence:
    identity_a: tuple  # (app, profile_id)
    identity_b: tuple
    first_contact: datetime
    last_contact: datetime
    message_count: int
    supporting: tuple


@dataclass(frozen=True)
class ImageLink:
    app: AppId
    profile_id: str
    image: CachedImage
    via: str  # "hash-in-url" | "url-equals"


class IdentityMap:
    """Analyst-asserted identity equivalences: app:id=app:id lines."""

    def __init__(self):
        self._parent: dict[tuple, tuple] = {}

    def _find(self, identity: tuple) -> tuple:
        parent = self._parent.get(identity, identity)
        if parent == identity:
            return identity
        root = self._find(parent)
        self._parent[identity] = root
        return root

    def assert_same(self, a: tuple, b: tuple) -> None:
        ra, rb = self._find(a), self._find(b)
        if ra != rb:
            self._parent[max(ra, rb)] = min(ra, rb)

    def canonical(self, identity: tuple) -> tuple:
        return self._find(identity)

    @classmethod
    def from_file(cls, path: Path) -> "IdentityMap":
        mapping = cls()
        for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"identity map line {lineno}: expected app:id=app:id")
            left, _, right = line.partition("=")
            mapping.assert_same(_parse_identity(left, lineno), _parse_identity(right, lineno))
        return mapping


def _parse_identity(text: str, lineno: int) -> tuple:
    text = text.strip()
    if ":" not in text:
        raise ValueError(f"identity map line {lineno}: identity {text!r} lacks app prefix")
    app_name, _, profile_id = text.partition(":")
    for app in AppId:
        if app.value.lower() == app_name.strip().lower():
            return (app.value, profile_id.strip())
    raise ValueError(f"identity map line {lineno}: unknown app {app_name!r}")


def build_timeline(bundle: EvidenceBundle) -> list[TimelineEvent]:
    """Every dated artifact as one event, in a deterministic total order.

    Events without a timestamp sort to the end; nothing is invented and
    nothing is dropped.
    """
    events = []

    for m in bundle.messages:
        flavor = "media message" if m.media_ref else "message"
        events.append(
            TimelineEvent(
                at=m.sent_at, kind="message", app=m.app,
                summary=f"{flavor} {m.message_id} {m.sender_id or '?'} -> {m.recipient_id or '?'} ({m.direction.value})",
                refs=(m.source,),
            )
        )
    for match in bundle.matches:
        events.append(
            TimelineEvent(
                at=match.created_at, kind="match", app=match.app,
                summary=f"match {match.match_id} with {match.counterpart_user_id}",
                refs=(match.source,),
            )
        )
    for event in bundle.volley_events:
        events.append(
            TimelineEvent(
                at=event.occurred_at, kind="match", app=event.app,
                summary=f"cached match event {event.match_id} matched={event.matched}",
                refs=(event.source,),
            )
        )
    for moment in bundle.moments:
        events.append(
            TimelineEvent(
                at=moment.created_at, kind="moment", app=moment.app,
                summary=f"moment {moment.moment_id} by {moment.user_id}",
                refs=(moment.source,),
            )
        )
    for fix in bundle.locations:
        if fix.precision == "exact":
            where = f"{fix.lat:.5f},{fix.lon:.5f}"
        elif fix.precision == "suburb":
            where = f"suburb {fix.suburb}"
        else:
            where = f"region {fix.country or '?'}/{fix.state or '?'}"
        events.append(
            TimelineEvent(
                at=fix.at, kind="location", app=fix.app,
                summary=f"{fix.subject} located: {where}", refs=(fix.source,),
            )
        )
    for marker in bundle.activity:
        events.append(
            TimelineEvent(
                at=marker.at, kind="last_active", app=marker.app,
                summary=marker.label, refs=(marker.source,),
            )
        )
    for token in bundle.tokens:
        if token.expiry_hint is not None:
            events.append(
                TimelineEvent(
                    at=token.expiry_hint, kind="token_activity", app=token.app,
                    summary=f"{token.provider.value} token expiry hint",
                    refs=(token.source,),
                )
            )

    indexed = sorted(enumerate(events), key=lambda pair: pair[1].sort_key(pair[0]))
    return [event for _seq, event in indexed]


def link_profile_images(bundle: EvidenceBundle) -> list[ImageLink]:
    """Join profiles to cached images via image hashes or equal URLs."""
    links = []
    seen = set()
    url_sources = list(bundle.images)
    for profile in bundle.profiles:
        candidates = []
        if profile.image_hash:
            for image in url_sources:
                if image.origin_url and profile.image_hash in image.origin_url:
                    candidates.append((image, "hash-in-url"))
        pic_url = profile.raw_fields.get("picUrl") or profile.raw_fields.get("Avatar_url")
        if pic_url:
            for image in url_sources:
                if image.origin_url == pic_url:
                    candidates.append((image, "url-equals"))
        for image, via in candidates:
            key = (profile.app, profile.profile_id, image.content_hash)
            if key not in seen:
                seen.add(key)
                links.append(ImageLink(profile.app, profile.profile_id, image, via))
    return links


def _message_identities(message) -> tuple:
    return (
        (message.app.value, message.sender_id),
        (message.app.value, message.recipient_id),
    )


def contact_evidence(
    bundle: EvidenceBundle,
    a: tuple,
    b: tuple,
    before: Optional[datetime] = None,
    identity_map: Optional[IdentityMap] = None,
) -> Optional[ContactEvidence]:
    """Messages and matches linking identities a and b, optionally before t.

    Identities are (app_name, profile_id) pairs; returns None when nothing
    links them.  Symmetric in a and b.
    """
    identity_map = identity_map or IdentityMap()
    canon_a = identity_map.canonical((str(a[0]), str(a[1])))
    canon_b = identity_map.canonical((str(b[0]), str(b[1])))
    if canon_a == canon_b:
        return None
    target = {canon_a, canon_b}

    instants = []
    refs = []
    message_count = 0
    for message in bundle.messages:
        sender, recipient = _message_identities(message)
        pair = {identity_map.canonical(sender), identity_map.canonical(recipient)}
        if pair != target:
            continue
        if before is not None and message.sent_at >= before:
            continue
        message_count += 1
        instants.append(message.sent_at)
        refs.append(message.source)

    if message_count == 0:
        return None

    for match in bundle.matches:
        owner = bundle.owners.get(match.app)
        if owner is None:
            continue
        pair = {
            identity_map.canonical((match.app.value, owner)),
            identity_map.canonical((match.app.value, match.counterpart_user_id)),
        }
        if pair != target:
            continue
        if before is not None and match.created_at >= before:
            continue
        instants.append(match.created_at)
        refs.append(match.source)

    ordered = sorted(canon for canon in (canon_a, canon_b))
    return ContactEvidence(
        identity_a=ordered[0],
        identity_b=ordered[1],
        first_contact=min(instants),
        last_contact=max(instants),
        message_count=message_count,
        supporting=tuple(refs),
    )


def location_history(bundle: EvidenceBundle) -> list:
    """The owner's location fixes ordered by time; untimed fixes sort last."""
    fixes = [f for f in bundle.locations if f.subject == "owner"]
    indexed = sorted(
        enumerate(fixes),
        key=lambda pair: (pair[1].at or _UNTIMED, pair[1].app.value, pair[0]),
    )
    return [fix for _seq, fix in indexed]


def describe_history(fixes) -> list[str]:
    """Readable one-liners for a location history; untimed entries flagged."""
    lines = []
    for fix in fixes:
        stamp = iso_instant(fix.at) or "untimed"
        if fix.precision == "exact":
            lines.append(f"{stamp}  {fix.app.value}  exact {fix.lat:.5f},{fix.lon:.5f}")
        elif fix.precision == "suburb":
            lines.append(f"{stamp}  {fix.app.value}  suburb {fix.suburb}")
        else:
            lines.append(
                f"{stamp}  {fix.app.value}  region {fix.country or '?'} {fix.state or ''}"
                f" distance={fix.distance_m or '?'}m"
            )
    return lines
