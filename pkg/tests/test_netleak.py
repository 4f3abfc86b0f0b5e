import base64
import json

import pytest
from hypothesis import given, strategies as st

from gsnforensics.model import (
    AppId,
    ArtifactSource,
    AuthToken,
    EvidenceBundle,
    TokenProvider,
)
from gsnforensics.netleak import (
    IngestError,
    LeakCategory,
    build_leak_matrix,
    detect_leaks,
    ingest_transactions,
)
from gsnforensics.serialize import to_jsonable


def _line(url, tls, req=b"", resp=b"", app=None, method="GET", ts=1403136000.0):
    doc = {
        "ts": ts,
        "method": method,
        "url": url,
        "tls": tls,
        "req_headers": {},
        "req_body_b64": base64.b64encode(req).decode(),
        "status": 200,
        "resp_headers": {},
        "resp_body_b64": base64.b64encode(resp).decode(),
    }
    if app:
        doc["app"] = app
    return json.dumps(doc)


def _txns(*lines):
    transactions, warnings = ingest_transactions(lines)
    return transactions, warnings


class TestIngest:
    def test_one_valid_line(self):
        transactions, warnings = _txns(_line("https://api.example/x", True, app="Grindr"))
        assert warnings == []
        [txn] = transactions
        assert txn.tls is True
        assert txn.app_hint is AppId.GRINDR

    def test_empty_stream(self):
        transactions, warnings = _txns()
        assert transactions == []
        assert warnings == []

    def test_malformed_lines_counted_order_preserved(self):
        lines = [
            _line("http://a.example/1", False),
            "{this is not json",
            _line("http://a.example/2", False),
            _line("http://a.example/3", False),
        ]
        transactions, warnings = _txns(*lines)
        assert len(transactions) == 3
        assert len(warnings) == 1
        assert [t.url for t in transactions] == [f"http://a.example/{i}" for i in (1, 2, 3)]

    def test_unreadable_stream_raises(self):
        with pytest.raises(IngestError):
            ingest_transactions(42)


def _detect(*lines, tokens=()):
    transactions, _ = _txns(*lines)
    return detect_leaks(transactions, known_tokens=tokens)


class TestDetectLeaks:
    def test_plaintext_coordinate_body_high(self):
        findings = _detect(
            _line("http://api.example/loc", False, req=b"lat=34.92850&lon=138.60070")
        )
        [finding] = findings
        assert finding.category is LeakCategory.EXACT_LOCATION
        assert finding.severity == "high"
        assert finding.evidence.location == "req_body"

    def test_tls_coordinates_downgraded_not_suppressed(self):
        findings = _detect(
            _line("https://api.example/loc", True, req=b"lat=-34.92850&lon=138.60070")
        )
        [finding] = findings
        assert finding.category is LeakCategory.EXACT_LOCATION
        assert finding.severity == "medium"

    def test_tls_empty_body_no_findings(self):
        assert _detect(_line("https://api.example/ok", True)) == []

    def test_location_in_filename(self):
        findings = _detect(_line("http://img.example/imgs/-34.92850_138.60070.jpg", False))
        [finding] = findings
        assert finding.category is LeakCategory.LOCATION_IN_FILENAME
        assert finding.severity == "high"
        assert finding.evidence.location == "url"

    def test_plaintext_message_by_json_field(self):
        findings = _detect(
            _line("http://api.example/relay", False, req=b'{"message": "see you at 8"}',
                  method="POST", app="FullCircle")
        )
        assert [f.category for f in findings] == [LeakCategory.PLAINTEXT_MESSAGE]
        assert findings[0].app is AppId.FULLCIRCLE

    def test_plaintext_message_by_path_hint(self):
        findings = _detect(_line("http://api.example/chat/77", False))
        assert [f.category for f in findings] == [LeakCategory.PLAINTEXT_MESSAGE]

    def test_tls_message_not_flagged(self):
        assert _detect(_line("https://api.example/chat/77", True)) == []

    def test_plaintext_image(self):
        jpeg = b"\xff\xd8\xff\xe0\x00\x10JFIF\x00\x01data"
        findings = _detect(_line("http://media.example/p/1", False, resp=jpeg))
        assert [f.category for f in findings] == [LeakCategory.PLAINTEXT_IMAGE]

    def test_email_plaintext_only(self):
        findings = _detect(
            _line("http://api.example/account", False, req=b"email=kiri@example.test"),
            _line("https://api.example/account", True, req=b"email=kiri@example.test"),
        )
        assert [f.category for f in findings] == [LeakCategory.EMAIL_ADDRESS]
        assert findings[0].evidence.transaction_index == 0

    def test_token_in_transit_severity_by_tls(self):
        token = AuthToken(
            provider=TokenProvider.MIUMEET, token="MIUSECRET123",
            source=ArtifactSource("x"), app=AppId.MIUMEET,
        )
        findings = _detect(
            _line("http://api.example/profile?token=MIUSECRET123", False),
            _line("https://api.example/profile?token=MIUSECRET123", True),
            tokens=[token],
        )
        assert [f.category for f in findings] == [LeakCategory.TOKEN_IN_TRANSIT] * 2
        assert [f.severity for f in findings] == ["medium", "info"]

    def test_coarse_location_fields(self):
        xml = b"<user><country>AU</country><state>SA</state><distance>12.3</distance></user>"
        findings = _detect(_line("http://api.example/u/1", False, resp=xml, app="Skout"))
        assert [f.category for f in findings] == [LeakCategory.COARSE_LOCATION]

    def test_suburb_field_alone_fires(self):
        findings = _detect(
            _line("http://api.example/area", False, req=b'{"suburb": "Norwood"}', method="POST")
        )
        assert [f.category for f in findings] == [LeakCategory.COARSE_LOCATION]

    def test_single_coarse_field_does_not_fire(self):
        assert _detect(_line("http://api.example/x", False, req=b'{"country": "AU"}')) == []

    def test_findings_cite_spans_inside_field(self):
        body = b"pad pad lat=-34.92850&lon=138.60070 tail"
        findings = _detect(_line("http://api.example/loc", False, req=body))
        start, length = findings[0].evidence.span
        assert b"-34.92850" in body[start:start + length]

    def test_detection_deterministic(self):
        lines = [
            _line("http://api.example/loc", False, req=b"lat=-34.92850&lon=138.60070"),
            _line("http://img.example/i/-34.92850_138.60070.jpg", False),
        ]
        first = json.dumps(to_jsonable(_detect(*lines)), sort_keys=True)
        second = json.dumps(to_jsonable(_detect(*lines)), sort_keys=True)
        assert first == second

    def test_out_of_range_pair_rejected(self):
        assert _detect(
            _line("http://api.example/t", False, req=b"a=912.34567&b=481.23456")
        ) == []

    def test_short_fraction_pair_rejected(self):
        assert _detect(_line("http://api.example/t?v=34.92&w=138.60", False)) == []

    def test_distant_pair_rejected(self):
        body = b"a=34.92850" + b"x" * 60 + b"b=138.60070"
        assert _detect(_line("http://api.example/t", False, req=body)) == []

    def test_valid_pair_found_past_an_invalid_decimal(self):
        body = b"v=-34.92850&junk=999.99999&w=138.60070"
        findings = _detect(_line("http://api.example/t", False, req=body))
        assert [f.category for f in findings] == [LeakCategory.EXACT_LOCATION]

    @given(
        value=st.floats(min_value=-179.9999, max_value=179.9999).map(lambda v: round(v, 5)),
        key=st.sampled_from(["metric", "value", "reading"]),
    )
    def test_single_decimal_never_fires(self, value, key):
        body = f"{key}={value:.5f}".encode()
        assert _detect(_line("http://api.example/x", False, req=body)) == []

    @given(
        a=st.floats(min_value=190.0, max_value=999.0).map(lambda v: round(v, 5)),
        b=st.floats(min_value=190.0, max_value=999.0).map(lambda v: round(v, 5)),
    )
    def test_out_of_range_pairs_never_fire(self, a, b):
        body = f"p={a:.5f}&q={b:.5f}".encode()
        assert _detect(_line("http://api.example/x", False, req=body)) == []


class TestMatrix:
    def test_empty_bundle_and_log(self, tmp_path):
        bundle = EvidenceBundle(root=tmp_path)
        assert build_leak_matrix([], bundle) == []

    def test_single_app_single_row(self, tmp_path):
        from gsnforensics.forge import AppPlan, ForgeSpec, forge_corpus
        from gsnforensics.pipeline import extract_bundle

        spec = ForgeSpec(seed=7, apps={AppId.TINDER: AppPlan(profiles=1, messages=2, matches=1)})
        forge_corpus(spec, tmp_path / "ev")
        bundle = extract_bundle(tmp_path / "ev")
        matrix = build_leak_matrix([], bundle)
        assert [row.app for row in matrix] == [AppId.TINDER]
        assert matrix[0].messages == "database"

    def test_cells_read_none_observed_without_evidence(self, tmp_path):
        from gsnforensics.forge import AppPlan, ForgeSpec, forge_corpus
        from gsnforensics.pipeline import extract_bundle

        spec = ForgeSpec(seed=7, apps={AppId.FULLCIRCLE: AppPlan(tokens=True)})
        forge_corpus(spec, tmp_path / "ev")
        bundle = extract_bundle(tmp_path / "ev")
        [row] = build_leak_matrix([], bundle)
        assert row.messages == "none observed"
        assert row.images == "none observed"
        assert row.location == "none observed"
        assert row.auth_method == "Facebook Token"
