import json

import pytest

from gsnforensics.model import EvidenceBundle
from gsnforensics.netleak import detect_leaks, ingest_transactions
from gsnforensics.pipeline import extract_bundle
from gsnforensics.report import (
    UsageError,
    build_report,
    emit_report,
    format_matrix_table,
    render_summary_matrix,
)


@pytest.fixture(scope="module")
def canonical_report(canonical_corpus):
    root, _ = canonical_corpus
    bundle = extract_bundle(root / "evidence")
    with open(root / "transactions.ndjson") as fh:
        transactions, _ = ingest_transactions(fh)
    findings = detect_leaks(transactions, known_tokens=bundle.tokens)
    return build_report(bundle, findings=findings)


class TestEmitReport:
    def test_same_report_twice_is_byte_identical(self, canonical_report):
        assert emit_report(canonical_report) == emit_report(canonical_report)

    def test_json_roundtrips_through_independent_parser(self, canonical_report):
        data = emit_report(canonical_report, "json")
        doc = json.loads(data.decode())
        assert doc["meta"]["tool"] == "gsnforensics"
        assert json.dumps(doc, sort_keys=True, indent=2).encode() + b"\n" == data

    def test_zero_findings_is_empty_array_not_absent(self, tmp_path):
        bundle = EvidenceBundle(root=tmp_path)
        report = build_report(bundle, findings=())
        doc = json.loads(emit_report(report).decode())
        assert doc["findings"] == []
        assert doc["matrix"] == []

    def test_unknown_format_is_usage_error(self, canonical_report):
        with pytest.raises(UsageError):
            emit_report(canonical_report, "yaml")

    def test_text_format_renders(self, canonical_report):
        text = emit_report(canonical_report, "text").decode()
        assert "summary of data retrieved" in text
        assert "Grindr" in text
        assert "heuristics used" in text

    def test_generated_at_absent_by_default(self, canonical_report):
        doc = json.loads(emit_report(canonical_report).decode())
        assert doc["meta"]["generated_at"] is None

    def test_digest_algorithm_disclosed(self, canonical_report):
        doc = json.loads(emit_report(canonical_report).decode())
        assert doc["meta"]["digest_algorithm"] == "sha256"
        assert len(doc["meta"]["evidence_root_digest"]) == 64


class TestDisclosures:
    def test_every_heuristic_used_is_disclosed(self, canonical_report):
        doc = json.loads(emit_report(canonical_report).decode())
        disclosures = "\n".join(doc["meta"]["heuristic_disclosures"])
        # milliseconds choice (one forged lastSeen is in ms)
        assert "milliseconds" in disclosures
        # prefs lat/lon key matching (Tinder SP.xml)
        assert "lat/lon" in disclosures
        # generic sweep (Meet Me / Jaumo databases)
        assert "generic sweep" in disclosures
        # extended registry identifications
        assert "registry-extended" in disclosures
        # cache carving (Badoo blob)
        assert "carving" in disclosures

    def test_artifact_counts_present(self, canonical_report):
        doc = json.loads(emit_report(canonical_report).decode())
        assert doc["artifact_counts"]["Grindr"]["messages"] == 5
        assert doc["artifact_counts"]["Tinder"]["matches"] == 2


class TestMatrixRendering:
    def test_matrix_table_text(self, canonical_report):
        table = format_matrix_table(canonical_report.matrix)
        lines = table.splitlines()
        assert lines[0].startswith("App")
        assert len(lines) == 2 + len(canonical_report.matrix)

    def test_render_summary_matrix_matches_report(self, canonical_corpus):
        root, _ = canonical_corpus
        bundle = extract_bundle(root / "evidence")
        rows = render_summary_matrix(bundle, ())
        assert [r.app.value for r in rows] == [
            "Badoo", "Grindr", "Skout", "Tinder", "Meet Me", "Jaumo", "FullCircle", "MiuMeet",
        ]
