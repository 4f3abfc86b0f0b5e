"""Run the full on-device extraction pipeline and inspect what comes back.

The pipeline normalizes prefs, databases and caches into one immutable
evidence bundle: chat messages with resolved epoch instants, profiles with
their verbatim raw columns, tokens with provenance, carved previews, and a
deterministic timeline over all of it.
"""

import tempfile
from pathlib import Path

from gsnforensics import (
    build_timeline,
    canonical_spec,
    extract_bundle,
    forge_corpus,
    link_profile_images,
)
from gsnforensics.model import iso_instant

workdir = Path(tempfile.mkdtemp(prefix="gsnf_demo_"))
evidence = workdir / "evidence"
forge_corpus(canonical_spec(), evidence)

bundle = extract_bundle(evidence)

# ---------------------------------------------------------------------------
# Messages: every row is tied to its source file, with direction resolved
# against the owner profile where the app records one (Grindr's isCurrent).
# ---------------------------------------------------------------------------
print(f"recovered {len(bundle.messages)} messages:")
for message in bundle.messages[:8]:
    stamp = iso_instant(message.sent_at)
    body = message.body if len(message.body) < 40 else message.body[:37] + "..."
    flags = " [media]" if message.media_ref else ""
    flags += " [heuristic]" if message.heuristic else ""
    print(f"  {stamp}  {message.app.value:<8} {message.direction.value:<8} {body!r}{flags}")
print("  ...")

# ---------------------------------------------------------------------------
# Profiles keep every source column verbatim in raw_fields; the owner row is
# flagged, never guessed.
# ---------------------------------------------------------------------------
owner = next(p for p in bundle.profiles if p.is_owner)
print(f"\ndevice owner on Grindr: profile {owner.profile_id}"
      f" ({owner.display_name}), image hash {owner.image_hash[:12]}...")
print(f"owner raw columns: {len(owner.raw_fields)} preserved verbatim")

# ---------------------------------------------------------------------------
# Tokens carry provenance down to the exact prefs file.
# ---------------------------------------------------------------------------
print(f"\nrecovered credentials ({len(bundle.tokens)}):")
for token in bundle.tokens:
    print(f"  {token.app.value:<10} {token.provider.value:<9} from {token.source.file_path}")

# ---------------------------------------------------------------------------
# Cache artifacts: image cache entries link back to profiles by image hash
# or by URL equality; the Badoo blob yields carved last-message previews.
# ---------------------------------------------------------------------------
links = link_profile_images(bundle)
print(f"\nprofile-image links: {len(links)}")
for link in links[:3]:
    print(f"  {link.app.value} profile {link.profile_id} -> {link.image.origin_url} ({link.via})")

print(f"\ncarved previews ({len(bundle.previews)}):")
for preview in bundle.previews:
    start, length = preview.source.byte_range
    print(f"  {preview.username!r} said {preview.last_message!r}"
          f" from {preview.location_suburb} (bytes {start}..{start + length})")

# ---------------------------------------------------------------------------
# The timeline totally orders every dated artifact; untimed fixes sort last.
# ---------------------------------------------------------------------------
timeline = build_timeline(bundle)
print(f"\ntimeline: {len(timeline)} events; first and last three:")
for event in timeline[:3] + timeline[-3:]:
    stamp = iso_instant(event.at) or "untimed"
    print(f"  {stamp}  {event.app.value:<8} {event.kind:<12} {event.summary}")

print(f"\nheuristics disclosed ({len(bundle.disclosures)}):")
for disclosure in sorted(bundle.disclosures):
    print(f"  - {disclosure}")
