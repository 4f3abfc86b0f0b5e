"""Command-line interface.

Exit status is 0 only when the requested operation completed without
errors; warnings alone do not fail a run.
"""

from __future__ import annotations

import argparse
import json
import sys
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .appregistry import default_registry
from .correlate import IdentityMap, contact_evidence
from .forge import ForgeError, ForgeSpec, forge_bundle
from .model import MalformedTimestamp, normalize_epoch
from .netleak import detect_leaks, ingest_transactions
from .pipeline import extract_bundle, sha256_file
from .report import UsageError, build_report, write_report
from .scanner import ScanError, scan_root
from .tokens import (
    OnlineCheckFailed,
    RefusalTransport,
    TokenProvider,
    UrllibTransport,
    assess_tokens,
    verify_token,
)


def _registry_from(args):
    registry = default_registry()
    if getattr(args, "registry", None):
        registry = registry.extend_from_file(Path(args.registry))
    return registry


def _stamp(args):
    if getattr(args, "stamp", False):
        return datetime.now(timezone.utc).isoformat()
    return None


def cmd_scan(args) -> int:
    catalog = scan_root(Path(args.root), _registry_from(args))
    if args.json:
        print(catalog.to_json())
        return 0
    print(f"evidence root: {catalog.root}")
    print(f"package base: {catalog.package_base or '(root)'}")
    print(f"installs ({len(catalog.installs)}):")
    for install in catalog.installs:
        marker = "  [registry-extended]" if install.registry_extended else ""
        print(f"  {install.app.value:<12} {install.package_path}{marker}")
    by_kind: dict = {}
    for entry in catalog.entries:
        by_kind[entry.kind.value] = by_kind.get(entry.kind.value, 0) + 1
    print(f"files ({len(catalog.entries)}):")
    for kind in sorted(by_kind):
        print(f"  {kind:<12} {by_kind[kind]}")
    for note in catalog.notes:
        print(f"note: {note}")
    for warning in catalog.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    return 0


def cmd_extract(args) -> int:
    bundle = extract_bundle(Path(args.root), _registry_from(args))
    report = build_report(bundle, findings=(), stamp=_stamp(args))
    data = write_report(report, Path(args.out) if args.out else None, args.format)
    if args.out:
        print(f"report written to {args.out}")
    else:
        sys.stdout.buffer.write(data)
    return 0


def cmd_netscan(args) -> int:
    bundle = extract_bundle(Path(args.root), _registry_from(args))
    log_path = Path(args.http_log)
    try:
        with open(log_path, "r", encoding="utf-8") as fh:
            transactions, warnings = ingest_transactions(fh)
    except OSError as exc:
        print(f"error: cannot read transaction log: {exc}", file=sys.stderr)
        return 1
    bundle.warnings.extend(f"{log_path.name}: {w}" for w in warnings)
    findings = detect_leaks(transactions, known_tokens=bundle.tokens)
    report = build_report(
        bundle,
        findings=findings,
        stamp=_stamp(args),
        transactions_digest=sha256_file(log_path),
    )
    data = write_report(report, Path(args.out) if args.out else None, args.format)
    if args.out:
        print(f"report written to {args.out}")
    else:
        sys.stdout.buffer.write(data)
    return 0


def _parse_identity(text: str):
    if ":" not in text:
        raise UsageError(f"identity {text!r} must be app:profile_id")
    app, _, profile = text.partition(":")
    return (app.strip(), profile.strip())


def cmd_correlate(args) -> int:
    bundle = extract_bundle(Path(args.root), _registry_from(args))
    identity_map = IdentityMap.from_file(Path(args.identity_map)) if args.identity_map else None
    before = None
    if args.before is not None:
        try:
            before = normalize_epoch(int(args.before))[0]
        except (ValueError, MalformedTimestamp):
            try:
                before = datetime.fromisoformat(args.before.replace("Z", "+00:00"))
                if before.tzinfo is None:
                    before = before.replace(tzinfo=timezone.utc)
            except ValueError:
                print(f"error: unparseable --before value {args.before!r}", file=sys.stderr)
                return 1
    a = _parse_identity(args.contact[0])
    b = _parse_identity(args.contact[1])
    evidence = contact_evidence(bundle, a, b, before=before, identity_map=identity_map)
    if evidence is None:
        print("no contact evidence linking the two identities")
        return 0
    doc = {
        "identity_a": list(evidence.identity_a),
        "identity_b": list(evidence.identity_b),
        "first_contact": evidence.first_contact.isoformat(),
        "last_contact": evidence.last_contact.isoformat(),
        "message_count": evidence.message_count,
        "supporting_files": sorted({s.file_path for s in evidence.supporting}),
    }
    print(json.dumps(doc, indent=2, sort_keys=True))
    return 0


def cmd_forge(args) -> int:
    spec = ForgeSpec.from_json_file(Path(args.spec))
    manifest = forge_bundle(spec, Path(args.outdir))
    print(f"corpus written under {args.outdir}/evidence")
    print(f"transaction log: {args.outdir}/transactions.ndjson")
    print(f"ground-truth manifest: {args.outdir}/manifest.json")
    counts = {k: len(v) for k, v in manifest.to_dict().items() if isinstance(v, list)}
    print(json.dumps(counts, indent=2, sort_keys=True))
    return 0


def cmd_verify_token(args) -> int:
    bundle = extract_bundle(Path(args.root), _registry_from(args))
    facebook = [t for t in bundle.tokens if t.provider is TokenProvider.FACEBOOK]
    assessments = assess_tokens(bundle.tokens)
    for assessment in assessments:
        token = assessment.token
        print(f"{token.app.value}: {token.provider.value} token from {token.source.file_path}")
        for note in assessment.risk_notes:
            print(f"    note: {note}")
        if assessment.graph_url:
            print(f"    graph url: {assessment.graph_url}")
    if not facebook:
        print("no Facebook tokens recovered; nothing to verify")
        return 0
    transport = UrllibTransport() if args.allow_online_token_check else RefusalTransport()
    for token in facebook:
        try:
            outcome = verify_token(token, transport)
        except OnlineCheckFailed as exc:
            print(f"    verification failed: {exc}", file=sys.stderr)
            continue
        if outcome.identity:
            name, account = outcome.identity
            print(f"    verified identity: {name} (id {account})")
        else:
            print(f"    not verified: {outcome.note}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gsnforensics",
        description="Recover and correlate dating-app artifacts from an Android acquisition.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--registry", help="extra package registry TSV (package<TAB>app)")

    p = sub.add_parser("scan", help="walk an evidence root and classify files")
    p.add_argument("root")
    p.add_argument("--json", action="store_true", help="emit the catalog as JSON")
    common(p)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("extract", help="run the on-device extraction pipeline")
    p.add_argument("root")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--stamp", action="store_true", help="include a wall-clock timestamp")
    common(p)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("netscan", help="extraction plus HTTP transaction log analysis")
    p.add_argument("root")
    p.add_argument("--http-log", required=True, help="normalized NDJSON transaction log")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--stamp", action="store_true", help="include a wall-clock timestamp")
    common(p)
    p.set_defaults(func=cmd_netscan)

    p = sub.add_parser("correlate", help="contact evidence between two identities")
    p.add_argument("root")
    p.add_argument("--contact", nargs=2, required=True, metavar=("A", "B"),
                   help="identities as app:profile_id")
    p.add_argument("--before", help="epoch seconds or ISO instant upper bound")
    p.add_argument("--identity-map", help="analyst identity equivalences (app:id=app:id lines)")
    common(p)
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("forge", help="synthesize a test corpus from a spec file")
    p.add_argument("spec", help="ForgeSpec JSON file")
    p.add_argument("outdir")
    p.set_defaults(func=cmd_forge)

    p = sub.add_parser("verify-token", help="classify recovered tokens; online check is opt-in")
    p.add_argument("root")
    p.add_argument("--allow-online-token-check", action="store_true",
                   help="actually contact the Graph endpoint (default: refuse)")
    common(p)
    p.set_defaults(func=cmd_verify_token)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ScanError, ForgeError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
