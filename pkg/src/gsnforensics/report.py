"""Report assembly and deterministic rendering.

JSON output is key-sorted and stable: identical inputs always serialize to
identical bytes.  Wall-clock stamps are therefore opt-in; by default the
report carries only input-derived metadata.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from . import __version__ as _version
from .correlate import build_timeline, link_profile_images
from .model import AppId, EvidenceBundle
from .netleak import LeakFinding, MatrixRow, build_leak_matrix
from .pipeline import hash_tree
from .serialize import image_link_to_dict, to_jsonable

DIGEST_ALGORITHM = "sha256"

_COUNT_COLLECTIONS = (
    "messages", "profiles", "matches", "locations", "tokens", "images",
    "moments", "photos", "previews", "volley_events", "media_urls", "emails",
)


class UsageError(ValueError):
    pass


@dataclass
class Report:
    meta: dict
    apps: list
    matrix: list
    findings: list
    timeline: list
    artifact_counts: dict
    image_links: list
    warnings: list

    def to_dict(self) -> dict:
        return to_jsonable(
            {
                "meta": self.meta,
                "apps": self.apps,
                "matrix": self.matrix,
                "findings": self.findings,
                "timeline": self.timeline,
                "artifact_counts": self.artifact_counts,
                "image_links": self.image_links,
                "warnings": self.warnings,
            }
        )


def render_summary_matrix(
    bundle: EvidenceBundle, findings: Sequence[LeakFinding] = ()
) -> list[MatrixRow]:
    return build_leak_matrix(findings, bundle)


def _artifact_counts(bundle: EvidenceBundle) -> dict:
    apps = sorted({i.app for i in bundle.installs}, key=lambda a: a.value)
    counts: dict = {}
    for app in apps + [AppId.UNKNOWN]:
        per_app = {}
        for name in _COUNT_COLLECTIONS:
            n = sum(1 for item in getattr(bundle, name) if item.app is app)
            if n:
                per_app[name] = n
        if per_app or app is not AppId.UNKNOWN:
            counts[app.value] = per_app
    return counts


def build_report(
    bundle: EvidenceBundle,
    findings: Sequence[LeakFinding] = (),
    matrix: Optional[Sequence[MatrixRow]] = None,
    stamp: Optional[str] = None,
    transactions_digest: Optional[str] = None,
) -> Report:
    """Assemble the full report; matrix/timeline derived if not supplied."""
    if matrix is None:
        matrix = render_summary_matrix(bundle, findings)
    meta = {
        "tool": "gsnforensics",
        "version": _version,
        "digest_algorithm": DIGEST_ALGORITHM,
        "evidence_root": str(bundle.root),
        "evidence_root_digest": hash_tree(bundle.root),
        "generated_at": stamp,  # None unless the operator asked for a stamp
        "heuristic_disclosures": sorted(bundle.disclosures),
    }
    if transactions_digest is not None:
        meta["transaction_log_digest"] = transactions_digest
    apps = [
        {
            "app": install.app.value,
            "package_path": install.package_path,
            "registry_extended": install.registry_extended,
        }
        for install in bundle.installs
    ]
    return Report(
        meta=meta,
        apps=apps,
        matrix=list(matrix),
        findings=list(findings),
        timeline=build_timeline(bundle),
        artifact_counts=_artifact_counts(bundle),
        image_links=[image_link_to_dict(l) for l in link_profile_images(bundle)],
        warnings=list(bundle.warnings),
    )


def emit_report(report: Report, fmt: str = "json") -> bytes:
    """Serialize a report; json output is byte-stable for identical inputs."""
    if fmt == "json":
        return (json.dumps(report.to_dict(), sort_keys=True, indent=2) + "\n").encode()
    if fmt == "text":
        return _render_text(report).encode()
    raise UsageError(f"unknown report format {fmt!r} (expected 'json' or 'text')")


_CELL_PHRASES = {
    "database": "stored in database",
    "plaintext-network": "unencrypted over network",
    "cached-preview": "last received only (cached preview)",
    "cached-on-device": "cached on device",
    "urls-in-database": "URLs in database",
    "exact-over-network": "exact location over network",
    "exact-in-filename": "exact location in image filename",
    "exact-on-device": "exact location on device",
    "coarse-over-network": "coarse location over network",
    "suburb-cached": "suburb level (cached)",
    "on-device": "on device",
    "none observed": "none observed",
}


def format_matrix_table(matrix: Sequence[MatrixRow]) -> str:
    headers = ("App", "Messages", "Images", "Location", "Email", "Authentication")
    rows = [headers]
    for row in matrix:
        rows.append(
            (
                row.app_label,
                _CELL_PHRASES.get(row.messages, row.messages),
                _CELL_PHRASES.get(row.images, row.images),
                _CELL_PHRASES.get(row.location, row.location),
                _CELL_PHRASES.get(row.email_address, row.email_address),
                row.auth_method,
            )
        )
    widths = [max(len(r[i]) for r in rows) for i in range(len(headers))]
    lines = []
    for index, row in enumerate(rows):
        lines.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip())
        if index == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines)


def _render_text(report: Report) -> str:
    sections = []
    meta = report.meta
    sections.append(
        f"gsnforensics {meta['version']} report\n"
        f"evidence root: {meta['evidence_root']}\n"
        f"root digest ({meta['digest_algorithm']}): {meta['evidence_root_digest']}"
    )
    if report.apps:
        sections.append(
            "detected apps:\n"
            + "\n".join(
                f"  {a['app']:<12} {a['package_path']}"
                + ("  [registry-extended]" if a["registry_extended"] else "")
                for a in report.apps
            )
        )
    else:
        sections.append("detected apps: none")
    if report.matrix:
        sections.append("summary of data retrieved:\n" + format_matrix_table(report.matrix))
    counts = report.artifact_counts
    lines = []
    for app_name, per_app in counts.items():
        if per_app:
            listed = ", ".join(f"{k}={v}" for k, v in sorted(per_app.items()))
            lines.append(f"  {app_name}: {listed}")
    if lines:
        sections.append("artifact counts:\n" + "\n".join(lines))
    if report.findings:
        finding_lines = []
        for f in report.findings:
            finding_lines.append(
                f"  [{f.severity:<6}] {f.category.value:<20} {f.app.value:<10} "
                f"txn#{f.evidence.transaction_index} {f.evidence.location}"
                f"@{f.evidence.span[0]}+{f.evidence.span[1]}: {f.description}"
            )
        sections.append(f"network findings ({len(report.findings)}):\n" + "\n".join(finding_lines))
    if meta["heuristic_disclosures"]:
        sections.append(
            "heuristics used:\n" + "\n".join(f"  - {d}" for d in meta["heuristic_disclosures"])
        )
    if report.warnings:
        sections.append(
            f"warnings ({len(report.warnings)}):\n"
            + "\n".join(f"  - {w}" for w in report.warnings)
        )
    return "\n\n".join(sections) + "\n"


def write_report(report: Report, out: Optional[Path], fmt: str = "json") -> bytes:
    data = emit_report(report, fmt)
    if out is not None:
        Path(out).write_bytes(data)
    return data
