"""Forge a synthetic acquisition and walk it with the filesystem scanner.

Everything below runs against generated data: the forge emits a directory
tree shaped like a real Android extraction (data/data/<package>/...), and
the scanner detects app installs and classifies every file by magic bytes.
"""

import tempfile
from collections import Counter
from pathlib import Path

from gsnforensics import canonical_spec, forge_corpus, scan_root

workdir = Path(tempfile.mkdtemp(prefix="gsnf_demo_"))
evidence = workdir / "evidence"

# ---------------------------------------------------------------------------
# Forge the reference corpus.  Same spec -> byte-identical output, so demos,
# tests and docs all talk about the very same bytes.
# ---------------------------------------------------------------------------
spec = canonical_spec()
manifest = forge_corpus(spec, evidence)
print(f"forged evidence tree under {evidence}")
print(f"ground truth: {len(manifest.messages)} messages, "
      f"{len(manifest.profiles)} profiles, {len(manifest.tokens)} tokens")

# ---------------------------------------------------------------------------
# Scan it.  Installs are matched against the package registry; every regular
# file gets a FileKind from its first 16 bytes (path rules only break ties).
# ---------------------------------------------------------------------------
catalog = scan_root(evidence)
print(f"\ndetected installs ({len(catalog.installs)}):")
for install in catalog.installs:
    marker = "  [registry-extended]" if install.registry_extended else ""
    print(f"  {install.app.value:<12} {install.package_path}{marker}")

kinds = Counter(entry.kind.value for entry in catalog.entries)
print(f"\nclassified {len(catalog.entries)} files:")
for kind, count in sorted(kinds.items()):
    print(f"  {kind:<12} {count}")

# A database renamed to .txt would still classify as SqliteDb: magic first.
databases = [e.path for e in catalog.entries if e.kind.value == "SqliteDb"]
print("\ndatabases found:")
for path in databases:
    print(f"  {path}")

for note in catalog.notes:
    print(f"\nnote: {note}")
