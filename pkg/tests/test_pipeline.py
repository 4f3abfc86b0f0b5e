from pathlib import PurePosixPath

from gsnforensics.correlate import contact_evidence, link_profile_images
from gsnforensics.model import AppId
from gsnforensics.pipeline import extract_bundle, iter_artifact_sources


class TestBundleInvariants:
    def test_every_artifact_source_resolves_under_root(self, canonical_bundle):
        sources = list(iter_artifact_sources(canonical_bundle))
        assert sources
        for source in sources:
            path = canonical_bundle.root / PurePosixPath(source.file_path)
            assert path.is_file(), f"missing source file {source.file_path}"

    def test_byte_ranges_within_source_files(self, canonical_bundle):
        for source in iter_artifact_sources(canonical_bundle):
            if source.byte_range is None:
                continue
            start, length = source.byte_range
            size = (canonical_bundle.root / source.file_path).stat().st_size
            assert 0 <= start and start + length <= size

    def test_tokens_name_exact_prefs_files(self, canonical_bundle):
        assert canonical_bundle.tokens
        for token in canonical_bundle.tokens:
            assert "/shared_prefs/" in token.source.file_path
            assert token.token

    def test_owner_identified_for_grindr(self, canonical_bundle):
        assert canonical_bundle.owners[AppId.GRINDR] == "1000000"

    def test_direction_resolved_only_with_owner(self, canonical_bundle):
        for message in canonical_bundle.messages:
            if message.app is AppId.GRINDR:
                assert message.direction.value in ("inbound", "outbound")
            else:
                assert message.direction.value == "unknown"

    def test_badoo_expected_empty_db_produces_no_warning(self, canonical_bundle):
        assert not any("expected empty" in w for w in canonical_bundle.warnings)

    def test_volley_events_join_matches(self, canonical_bundle):
        match_ids = {m.match_id for m in canonical_bundle.matches}
        assert canonical_bundle.volley_events
        for event in canonical_bundle.volley_events:
            assert event.match_id in match_ids

    def test_rescan_extraction_equal(self, canonical_corpus):
        from gsnforensics.serialize import to_jsonable

        root, _ = canonical_corpus
        first = to_jsonable(extract_bundle(root / "evidence").messages)
        second = to_jsonable(extract_bundle(root / "evidence").messages)
        assert first == second

    def test_messages_after_acquisition_time_flagged(self, canonical_corpus):
        from datetime import datetime, timezone

        root, _ = canonical_corpus
        # pretend the image was taken before any forged message was sent
        early = datetime(2014, 6, 1, tzinfo=timezone.utc)
        bundle = extract_bundle(root / "evidence", acquisition_time=early)
        flagged = [w for w in bundle.warnings if "after acquisition" in w]
        assert len(flagged) == len(bundle.messages)
        # with a plausible acquisition time nothing is flagged
        late = datetime(2014, 8, 1, tzinfo=timezone.utc)
        bundle = extract_bundle(root / "evidence", acquisition_time=late)
        assert not any("after acquisition" in w for w in bundle.warnings)


class TestCorrelatorRefsResolve:
    def test_image_link_edges_point_at_bundle_images(self, canonical_bundle):
        cached = {image.content_hash for image in canonical_bundle.images}
        links = link_profile_images(canonical_bundle)
        assert links
        for link in links:
            assert link.image.content_hash in cached

    def test_contact_evidence_refs_are_bundle_sources(self, canonical_bundle):
        evidence = contact_evidence(
            canonical_bundle, ("Grindr", "1000000"), ("Grindr", "1000001")
        )
        assert evidence is not None
        bundle_sources = {s.file_path for s in iter_artifact_sources(canonical_bundle)}
        for ref in evidence.supporting:
            assert ref.file_path in bundle_sources
