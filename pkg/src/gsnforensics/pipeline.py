"""End-to-end on-device extraction: scan, prefs, databases, caches, bundle.

Processing order is deterministic (installs by package path, files by
relative path) so repeated runs over the same acquisition produce identical
bundles.  Evidence files are only ever read.
"""

from __future__ import annotations

import dataclasses
import hashlib
import logging
from datetime import timedelta
from pathlib import Path, PurePosixPath
from typing import Optional

from . import caches, dbextract, prefs
from .appregistry import AppRegistry, default_registry
from .model import (
    ActivityMarker,
    AppId,
    ArtifactSource,
    CachedImage,
    EvidenceBundle,
    FileKind,
    LocationFix,
)
from .scanner import ScanCatalog, scan_root

log = logging.getLogger(__name__)

REGISTRY_EXTENDED_DISCLOSURE = (
    "registry-extended: {label} was identified by the editable package "
    "registry, not a documented acquisition"
)


def sha256_file(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def hash_tree(root: Path) -> str:
    """One digest over every file's (path, content digest), order-normalized."""
    root = Path(root)
    lines = []
    for path in sorted(p for p in root.rglob("*") if p.is_file() and not p.is_symlink()):
        lines.append(f"{path.relative_to(root).as_posix()}:{sha256_file(path)}")
    overall = hashlib.sha256("\n".join(lines).encode()).hexdigest()
    return overall


def _resolve(root: Path, rel: str) -> Path:
    return root / PurePosixPath(rel)


def extract_bundle(
    root: Path | str,
    registry: Optional[AppRegistry] = None,
    catalog: Optional[ScanCatalog] = None,
    acquisition_time=None,
) -> EvidenceBundle:
    """Run the full on-device pipeline over one evidence root.

    When acquisition_time is given, message timestamps later than it (plus
    a day of clock-skew slack) are flagged; the device timezone is never
    guessed, so no tighter bound is safe.
    """
    root = Path(root)
    registry = registry or default_registry()
    catalog = catalog or scan_root(root, registry)

    bundle = EvidenceBundle(root=root)
    bundle.installs = list(catalog.installs)
    bundle.warnings.extend(catalog.warnings)
    bundle.warnings.extend(catalog.notes)
    for install in bundle.installs:
        if install.registry_extended:
            bundle.disclosures.add(
                REGISTRY_EXTENDED_DISCLOSURE.format(
                    label=f"{install.app.value} ({install.package_path})"
                )
            )

    for install in bundle.installs:
        log.debug("extracting %s from %s", install.app.value, install.package_path)
        entries = catalog.entries_for(install)
        _extract_prefs(root, install.app, entries, bundle)
        _extract_databases(root, install.app, entries, bundle)
        _extract_caches(root, install.app, install.package_path, entries, bundle)

    # databases outside any recognized package still get a best-effort sweep
    known_prefixes = tuple(i.package_path + "/" for i in bundle.installs)
    for entry in catalog.entries:
        if entry.kind is FileKind.SQLITE_DB and not entry.path.startswith(known_prefixes):
            _sweep_db(root, AppId.UNKNOWN, entry, bundle)

    if acquisition_time is not None:
        cutoff = acquisition_time + timedelta(days=1)
        for message in bundle.messages:
            if message.sent_at > cutoff:
                bundle.warnings.append(
                    f"{message.app.value} message {message.message_id} is dated "
                    f"after acquisition: {message.sent_at.isoformat()}"
                )
    return bundle


def _extract_prefs(root, app, entries, bundle):
    for entry in entries:
        if entry.kind is not FileKind.PREFS_XML:
            continue
        source = ArtifactSource(entry.path, FileKind.PREFS_XML)
        try:
            data = _resolve(root, entry.path).read_bytes()
            document = prefs.parse_prefs_xml(data, source)
        except (OSError, prefs.PrefsParseError) as exc:
            bundle.warnings.append(f"{entry.path}: {exc}")
            continue
        bundle.warnings.extend(f"{entry.path}: {w}" for w in document.warnings)
        findings = prefs.extract_known_prefs(document, app)
        bundle.tokens.extend(findings.tokens)
        bundle.locations.extend(findings.locations)
        bundle.emails.extend(findings.emails)
        bundle.warnings.extend(f"{entry.path}: {w}" for w in findings.warnings)
        bundle.disclosures |= findings.disclosures
        if findings.last_active is not None:
            bundle.activity.append(
                ActivityMarker(
                    app=app,
                    at=findings.last_active,
                    label=f"{app.value} last-active marker from prefs",
                    source=source,
                )
            )


def _extract_databases(root, app, entries, bundle):
    for entry in entries:
        if entry.kind is not FileKind.SQLITE_DB:
            continue
        if app in (AppId.GRINDR, AppId.SKOUT, AppId.TINDER, AppId.BADOO):
            source = ArtifactSource(entry.path, FileKind.SQLITE_DB)
            try:
                result = dbextract.extract_normalized(app, _resolve(root, entry.path), source)
            except dbextract.DbOpenError as exc:
                bundle.warnings.append(str(exc))
                continue
            _merge_result(bundle, app, result)
        else:
            _sweep_db(root, app, entry, bundle)


def _sweep_db(root, app, entry, bundle):
    source = ArtifactSource(entry.path, FileKind.SQLITE_DB)
    try:
        result = dbextract.generic_sweep(_resolve(root, entry.path), source, app=app)
    except dbextract.DbOpenError as exc:
        bundle.warnings.append(str(exc))
        return
    _merge_result(bundle, app, result)


def _merge_result(bundle, app, result):
    bundle.messages.extend(result.messages)
    bundle.profiles.extend(result.profiles)
    bundle.matches.extend(result.matches)
    bundle.locations.extend(result.locations)
    bundle.moments.extend(result.moments)
    bundle.photos.extend(result.photos)
    bundle.media_urls.extend(result.media_urls)
    bundle.device_ids.extend(result.device_ids)
    bundle.emails.extend(result.emails)
    bundle.raw_tables.update(result.raw_tables)
    bundle.db_inventory.extend(result.db_inventory)
    bundle.warnings.extend(result.warnings)
    bundle.disclosures |= result.disclosures
    if result.owner_id and app not in bundle.owners:
        bundle.owners[app] = result.owner_id


def _extract_caches(root, app, package_path, entries, bundle):
    by_path = {e.path: e for e in entries}

    # Picasso .o/.i pairs share a basename
    for entry in entries:
        if entry.kind is not FileKind.PICASSO_META:
            continue
        image_rel = entry.path[:-2] + ".i"
        image_entry = by_path.get(image_rel)
        meta_source = ArtifactSource(entry.path, FileKind.PICASSO_META)
        if image_entry is None:
            bundle.warnings.append(f"{entry.path}: metadata without an image twin")
            continue
        try:
            meta_bytes = _resolve(root, entry.path).read_bytes()
            image_bytes = _resolve(root, image_rel).read_bytes()
            pair = caches.parse_picasso_pair(
                meta_bytes,
                image_bytes,
                meta_source,
                ArtifactSource(image_rel, image_entry.kind),
                app,
            )
        except (OSError, caches.CacheParseError) as exc:
            bundle.warnings.append(f"{entry.path}: {exc}")
            continue
        bundle.picasso_entries.append(pair)
        bundle.images.append(pair.image)

    for entry in entries:
        parts = PurePosixPath(entry.path).parts
        # volley caches hold match events, often behind a binary entry header
        # (which makes the classifier call them Opaque)
        if "volley" in parts[:-1] and entry.kind in (FileKind.JSON, FileKind.OPAQUE):
            try:
                data = _resolve(root, entry.path).read_bytes()
            except OSError as exc:
                bundle.warnings.append(f"{entry.path}: {exc}")
                continue
            events, warnings = caches.parse_volley_match_cache(
                data, ArtifactSource(entry.path, FileKind.JSON)
            )
            bundle.volley_events.extend(
                e if e.app is app else dataclasses.replace(e, app=app) for e in events
            )
            bundle.warnings.extend(warnings)
        # downloader directories hold bare profile images with no metadata
        elif entry.kind in (FileKind.JPEG, FileKind.WEBP, FileKind.PNG) and "downloader" in parts:
            try:
                data = _resolve(root, entry.path).read_bytes()
            except OSError as exc:
                bundle.warnings.append(f"{entry.path}: {exc}")
                continue
            bundle.images.append(
                CachedImage(
                    app=app,
                    origin_url=None,
                    content_hash=caches.sha256_hex(data),
                    format=caches.classify_image_bytes(data),
                    bytes_ref=ArtifactSource(entry.path, entry.kind),
                )
            )

    # Badoo keeps a last-messages blob directly under cache/
    if app is AppId.BADOO:
        cache_prefix = f"{package_path}/cache/"
        for entry in entries:
            if not entry.path.startswith(cache_prefix) or entry.kind is not FileKind.OPAQUE:
                continue
            if "/" in entry.path[len(cache_prefix):]:
                continue  # only files immediately under cache/
            try:
                data = _resolve(root, entry.path).read_bytes()
            except OSError as exc:
                bundle.warnings.append(f"{entry.path}: {exc}")
                continue
            previews = caches.carve_string_records(
                data, ArtifactSource(entry.path, FileKind.OPAQUE), app=app
            )
            bundle.previews.extend(previews)
            for preview in previews:
                if preview.location_suburb:
                    bundle.locations.append(
                        LocationFix(
                            precision="suburb",
                            suburb=preview.location_suburb,
                            subject="owner",
                            app=app,
                            source=preview.source,
                        )
                    )
            if previews:
                bundle.disclosures.add(
                    "cache carving heuristic: last-message previews were "
                    "recovered by printable-run adjacency, not a documented layout"
                )


def iter_artifact_sources(bundle: EvidenceBundle):
    """Yield every ArtifactSource attached to any artifact in the bundle."""
    for collection in (
        bundle.messages, bundle.profiles, bundle.matches, bundle.locations,
        bundle.tokens, bundle.moments, bundle.photos, bundle.previews,
        bundle.volley_events, bundle.media_urls, bundle.device_ids,
        bundle.emails, bundle.activity,
    ):
        for artifact in collection:
            yield artifact.source
    for image in bundle.images:
        yield image.bytes_ref
