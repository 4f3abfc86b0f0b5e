"""Known-app package registry and package-name lookup.

Four package paths are documented acquisition facts; the other four ship in
an editable TSV so deployments can correct them without touching code.
Matches from the editable section are flagged so reports can distinguish
documented identifications from assumed ones.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional

from .model import AppId

# Documented private-storage package names.
CORE_PACKAGES = {
    "com.badoo.mobile": AppId.BADOO,
    "com.grindapp.android": AppId.GRINDR,
    "com.skout.android": AppId.SKOUT,
    "com.tinder": AppId.TINDER,
}

_NAME_ALIASES = {
    "meetme": AppId.MEETME,
    "meet me": AppId.MEETME,
    "badoo": AppId.BADOO,
    "grindr": AppId.GRINDR,
    "skout": AppId.SKOUT,
    "tinder": AppId.TINDER,
    "jaumo": AppId.JAUMO,
    "fullcircle": AppId.FULLCIRCLE,
    "miumeet": AppId.MIUMEET,
}


class RegistryError(ValueError):
    """Raised for unparseable registry config lines."""


@dataclass(frozen=True)
class RegistryEntry:
    package: str
    app: AppId
    extended: bool  # True when the entry came from the editable section


def app_from_name(name: str) -> Optional[AppId]:
    """Map a human app name ('Meet Me', 'tinder') to its AppId, or None."""
    return _NAME_ALIASES.get(name.strip().lower())


def parse_registry_lines(lines: Iterable[str], extended: bool = True) -> list[RegistryEntry]:
    """Parse "package<TAB>app_name" lines; blanks and '#' comments skipped."""
    entries = []
    for lineno, line in enumerate(lines, start=1):
        line = line.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        if "\t" not in line:
            raise RegistryError(f"line {lineno}: expected 'package<TAB>app_name'")
        package, _, app_name = line.partition("\t")
        package = package.strip()
        app = app_from_name(app_name)
        if not package or app is None:
            raise RegistryError(f"line {lineno}: unknown app name {app_name.strip()!r}")
        entries.append(RegistryEntry(package=package, app=app, extended=extended))
    return entries


class AppRegistry:
    """Case-sensitive exact lookup from package directory name to app."""

    def __init__(self, entries: Iterable[RegistryEntry]):
        self._by_package: dict[str, RegistryEntry] = {}
        for entry in entries:
            self._by_package[entry.package] = entry

    def lookup(self, package_dir_name: str) -> Optional[RegistryEntry]:
        return self._by_package.get(package_dir_name)

    def app_for(self, package_dir_name: str) -> AppId:
        entry = self.lookup(package_dir_name)
        return entry.app if entry is not None else AppId.UNKNOWN

    @property
    def entries(self) -> list[RegistryEntry]:
        return list(self._by_package.values())

    def extend_from_file(self, path: Path) -> "AppRegistry":
        """Return a new registry with the file's entries overriding extended ones."""
        merged = {e.package: e for e in self.entries if not e.extended}
        for entry in parse_registry_lines(Path(path).read_text().splitlines()):
            merged[entry.package] = entry
        return AppRegistry(merged.values())


def _builtin_extended_entries() -> list[RegistryEntry]:
    text = resources.files("gsnforensics.data").joinpath("registry_extended.tsv").read_text()
    return parse_registry_lines(text.splitlines(), extended=True)


def default_registry() -> AppRegistry:
    """The shipped registry: documented core packages plus editable defaults."""
    entries = [RegistryEntry(p, a, extended=False) for p, a in CORE_PACKAGES.items()]
    entries.extend(_builtin_extended_entries())
    return AppRegistry(entries)


_DEFAULT = default_registry()


def lookup_app(package_dir_name: str) -> AppId:
    """Total function: exact package-name match against the default registry."""
    if not package_dir_name:
        return AppId.UNKNOWN
    return _DEFAULT.app_for(package_dir_name)
