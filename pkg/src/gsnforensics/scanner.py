"""Evidence-root walker: detects app installs, classifies files by magic bytes."""

from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path, PurePosixPath
from typing import Optional

from .appregistry import AppRegistry, default_registry
from .model import AppId, AppInstall, FileKind

log = logging.getLogger(__name__)

HEADER_LEN = 16

SQLITE_MAGIC = b"SQLite format 3\x00"
JPEG_MAGIC = b"\xff\xd8\xff"
PNG_MAGIC = b"\x89PNG\r\n\x1a\n"
XML_DECL = b"<?xml"


class ScanError(OSError):
    """Raised when the evidence root itself cannot be read."""


@dataclass(frozen=True)
class ScanEntry:
    path: str  # relative to root, posix separators
    kind: FileKind
    size_bytes: int
    app: AppId


@dataclass
class ScanCatalog:
    root: Path
    package_base: str  # relative dir the package directories live under ("" = root)
    installs: list = field(default_factory=list)
    entries: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def entries_for(self, install: AppInstall) -> list[ScanEntry]:
        prefix = install.package_path + "/"
        return [e for e in self.entries if e.path.startswith(prefix)]

    def to_json(self) -> str:
        doc = {
            "package_base": self.package_base,
            "installs": [
                {
                    "app": i.app.value,
                    "package_path": i.package_path,
                    "registry_extended": i.registry_extended,
                }
                for i in self.installs
            ],
            "entries": [
                {"path": e.path, "kind": e.kind.value, "size": e.size_bytes, "app": e.app.value}
                for e in self.entries
            ],
            "warnings": list(self.warnings),
            "notes": list(self.notes),
        }
        return json.dumps(doc, sort_keys=True, indent=2)


def _is_under(parts: tuple[str, ...], name: str) -> bool:
    return any(p == name for p in parts[:-1])


def classify_file(path: str, header: bytes) -> FileKind:
    """Classify by magic bytes first; path rules only decide the leftovers.

    `header` is the first 16 bytes of the file (shorter for tiny files).
    File extensions are ignored whenever a magic rule fires.
    """
    if header.startswith(SQLITE_MAGIC):
        return FileKind.SQLITE_DB
    if header.startswith(PNG_MAGIC):
        return FileKind.PNG
    if header[:4] == b"RIFF" and header[8:12] == b"WEBP":
        return FileKind.WEBP
    if header.startswith(JPEG_MAGIC):
        return FileKind.JPEG

    parts = tuple(p.lower() for p in PurePosixPath(path).parts)
    if parts and parts[-1].endswith(".o") and _is_under(parts, "picasso-cache"):
        return FileKind.PICASSO_META
    if _is_under(parts, "shared_prefs") and header.startswith(XML_DECL):
        return FileKind.PREFS_XML
    if any("cache" in p for p in parts[:-1]):
        stripped = header.lstrip()
        if stripped[:1] in (b"{", b"["):
            return FileKind.JSON
    return FileKind.OPAQUE


def _read_header(path: Path) -> bytes:
    with open(path, "rb") as fh:
        return fh.read(HEADER_LEN)


def _detect_package_base(root: Path) -> str:
    # Acquisitions come either rooted at / (containing data/data/...) or
    # rooted directly at the data/data directory itself.
    if (root / "data").is_dir() and (root / "data" / "data").is_dir():
        return "data/data"
    return ""


def scan_root(root: Path | str, registry: Optional[AppRegistry] = None) -> ScanCatalog:
    """Walk an evidence root; deterministic, read-only, symlinks not followed."""
    root = Path(root)
    registry = registry or default_registry()
    try:
        if not root.is_dir():
            raise ScanError(f"evidence root is not a readable directory: {root}")
        os.listdir(root)
    except OSError as exc:
        raise ScanError(f"cannot read evidence root {root}: {exc}") from exc

    catalog = ScanCatalog(root=root, package_base=_detect_package_base(root))
    log.debug("scanning %s (package base %r)", root, catalog.package_base)

    base_dir = root / catalog.package_base if catalog.package_base else root
    installs = []
    if base_dir.is_dir():
        for child in sorted(os.listdir(base_dir)):
            child_path = base_dir / child
            if not child_path.is_dir() or child_path.is_symlink():
                continue
            entry = registry.lookup(child)
            if entry is None:
                continue
            package_rel = f"{catalog.package_base}/{child}" if catalog.package_base else child
            installs.append(
                AppInstall(app=entry.app, package_path=package_rel, registry_extended=entry.extended)
            )
    catalog.installs = sorted(installs, key=lambda i: i.package_path)

    app_by_prefix = {i.package_path + "/": i.app for i in catalog.installs}

    entries = []
    for dirpath, dirnames, filenames in os.walk(root, followlinks=False):
        dirnames.sort()
        for name in sorted(filenames):
            fpath = Path(dirpath) / name
            if fpath.is_symlink():
                continue
            rel = fpath.relative_to(root).as_posix()
            try:
                size = fpath.stat().st_size
                header = _read_header(fpath)
            except OSError as exc:
                catalog.warnings.append(f"unreadable file skipped content check: {rel} ({exc})")
                entries.append(ScanEntry(rel, FileKind.OPAQUE, 0, _owner_app(rel, app_by_prefix)))
                continue
            kind = classify_file(rel, header)
            entries.append(ScanEntry(rel, kind, size, _owner_app(rel, app_by_prefix)))
    catalog.entries = sorted(entries, key=lambda e: e.path)

    external = root / "external"
    if external.is_dir():
        count = sum(1 for e in catalog.entries if e.path.startswith("external/"))
        catalog.notes.append(f"external storage tree scanned: {count} file(s) found")
    return catalog


def _owner_app(rel_path: str, app_by_prefix: dict[str, AppId]) -> AppId:
    for prefix, app in app_by_prefix.items():
        if rel_path.startswith(prefix):
            return app
    return AppId.UNKNOWN
