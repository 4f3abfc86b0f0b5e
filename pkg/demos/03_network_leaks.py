"""Detect PII leakage in a captured HTTP transaction log.

The capture is normalized NDJSON (one transaction per line).  The detector
is a pure function of the log plus known token values, flagging plaintext
chat payloads and images, precise coordinate pairs (including inside image
filenames), coarse location fields, emails, and recovered credentials
appearing on the wire.  Everything merges into the per-app summary matrix.
"""

import tempfile
from pathlib import Path

from gsnforensics import (
    build_leak_matrix,
    canonical_spec,
    detect_leaks,
    extract_bundle,
    ingest_transactions,
)
from gsnforensics.forge import forge_bundle
from gsnforensics.report import format_matrix_table

workdir = Path(tempfile.mkdtemp(prefix="gsnf_demo_"))
manifest = forge_bundle(canonical_spec(), workdir / "bundle")
evidence = workdir / "bundle" / "evidence"
log_path = workdir / "bundle" / "transactions.ndjson"

# On-device extraction first: detected tokens feed the token-in-transit rule.
bundle = extract_bundle(evidence)

with open(log_path) as fh:
    transactions, warnings = ingest_transactions(fh)
print(f"ingested {len(transactions)} transactions ({len(warnings)} malformed skipped)")

findings = detect_leaks(transactions, known_tokens=bundle.tokens)
print(f"\nfindings ({len(findings)}):")
for finding in findings:
    evidence_ptr = (f"txn #{finding.evidence.transaction_index} "
                    f"{finding.evidence.location}@{finding.evidence.span[0]}")
    print(f"  [{finding.severity:<6}] {finding.category.value:<20} "
          f"{finding.app.value:<11} {evidence_ptr:<20} {finding.description}")

# The forge planted each leak deliberately; the manifest is the ground truth.
planted = {(p["index"], p["category"]) for p in manifest.log["planted"]}
found = {(f.evidence.transaction_index, f.category.value) for f in findings}
print(f"\nrecall:    {len(planted & found)}/{len(planted)} planted leaks found")
print(f"precision: {len(found - planted)} false positives")

# ---------------------------------------------------------------------------
# The summary matrix: one row per app, each cell the strongest evidence
# class seen on device or on the wire.
# ---------------------------------------------------------------------------
matrix = build_leak_matrix(findings, bundle)
print("\nsummary of data retrieved:\n")
print(format_matrix_table(matrix))
