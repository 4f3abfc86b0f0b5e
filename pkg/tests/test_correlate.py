from datetime import datetime, timedelta, timezone

from gsnforensics.correlate import (
    IdentityMap,
    build_timeline,
    contact_evidence,
    link_profile_images,
    location_history,
)
from gsnforensics.model import (
    AppId,
    ArtifactSource,
    CachedImage,
    ChatMessage,
    Direction,
    EvidenceBundle,
    LocationFix,
    MatchRecord,
    ProfileRecord,
)
from gsnforensics.serialize import to_jsonable

T0 = datetime(2014, 6, 19, tzinfo=timezone.utc)
SRC = ArtifactSource("data/data/com.grindapp.android/databases/grindr.db")


def _msg(i, sender, recipient, minutes, app=AppId.GRINDR, direction=Direction.UNKNOWN):
    return ChatMessage(
        app=app, message_id=str(i), sender_id=sender, recipient_id=recipient,
        sent_at=T0 + timedelta(minutes=minutes), body=f"m{i}", direction=direction,
        source=SRC,
    )


def _bundle(tmp_path, **collections):
    bundle = EvidenceBundle(root=tmp_path)
    for name, items in collections.items():
        getattr(bundle, name).extend(items)
    return bundle


class TestTimeline:
    def test_messages_and_match_in_timestamp_order(self, tmp_path):
        match = MatchRecord(
            app=AppId.TINDER, match_id="m1", counterpart_user_id="u9",
            created_at=T0 + timedelta(minutes=5), source=SRC,
        )
        bundle = _bundle(
            tmp_path,
            messages=[_msg(1, "a", "b", 10), _msg(2, "b", "a", 0)],
            matches=[match],
        )
        events = build_timeline(bundle)
        assert [e.kind for e in events] == ["message", "match", "message"]
        assert events[0].at <= events[1].at <= events[2].at

    def test_empty_bundle_empty_timeline(self, tmp_path):
        assert build_timeline(_bundle(tmp_path)) == []

    def test_equal_timestamps_break_ties_deterministically(self, tmp_path):
        a = _msg(1, "x", "y", 0, app=AppId.TINDER)
        b = MatchRecord(
            app=AppId.GRINDR, match_id="m", counterpart_user_id="z",
            created_at=T0, source=SRC,
        )
        bundle = _bundle(tmp_path, messages=[a], matches=[b])
        runs = [to_jsonable(build_timeline(bundle)) for _ in range(3)]
        assert runs[0] == runs[1] == runs[2]
        # Grindr sorts before Tinder at the same instant
        assert runs[0][0]["app"] == "Grindr"

    def test_timeline_is_permutation_of_inputs(self, canonical_bundle):
        events = build_timeline(canonical_bundle)
        timed_artifacts = (
            len(canonical_bundle.messages)
            + len(canonical_bundle.matches)
            + len(canonical_bundle.volley_events)
            + len(canonical_bundle.moments)
            + len(canonical_bundle.locations)
            + len(canonical_bundle.activity)
            + sum(1 for t in canonical_bundle.tokens if t.expiry_hint)
        )
        assert len(events) == timed_artifacts

    def test_untimed_events_sort_last(self, tmp_path):
        fix = LocationFix(precision="suburb", suburb="Norwood", subject="owner",
                          app=AppId.BADOO, source=SRC)
        bundle = _bundle(tmp_path, messages=[_msg(1, "a", "b", 0)], locations=[fix])
        events = build_timeline(bundle)
        assert events[-1].kind == "location"
        assert events[-1].at is None


class TestImageLinks:
    def test_hash_in_url_linkage(self, tmp_path):
        image_hash = "ab" * 16
        profile = ProfileRecord(
            app=AppId.GRINDR, profile_id="p1", image_hash=image_hash, source=SRC,
        )
        image = CachedImage(
            app=AppId.GRINDR, origin_url=f"http://cdn.example/{image_hash}.jpg",
            content_hash="ff" * 32, format="JPEG",
            bytes_ref=ArtifactSource("data/data/x/cache/Picasso-cache/a.i"),
        )
        bundle = _bundle(tmp_path, profiles=[profile], images=[image])
        [link] = link_profile_images(bundle)
        assert link.profile_id == "p1"
        assert link.via == "hash-in-url"

    def test_picurl_equality_linkage(self, tmp_path):
        url = "http://cdn.skout.example/u/2000001.jpg"
        profile = ProfileRecord(
            app=AppId.SKOUT, profile_id="2000001", raw_fields={"picUrl": url}, source=SRC,
        )
        image = CachedImage(
            app=AppId.SKOUT, origin_url=url, content_hash="aa" * 32, format="JPEG",
            bytes_ref=ArtifactSource("x/cache/a.i"),
        )
        bundle = _bundle(tmp_path, profiles=[profile], images=[image])
        [link] = link_profile_images(bundle)
        assert link.via == "url-equals"

    def test_no_images_no_edges(self, tmp_path):
        profile = ProfileRecord(app=AppId.GRINDR, profile_id="p1", image_hash="aa" * 16,
                                source=SRC)
        assert link_profile_images(_bundle(tmp_path, profiles=[profile])) == []

    def test_forged_corpus_one_edge_per_cached_profile(self, canonical_corpus, canonical_bundle):
        _, manifest = canonical_corpus
        links = link_profile_images(canonical_bundle)
        grindr_links = [l for l in links if l.app is AppId.GRINDR]
        grindr_profiles = [p for p in canonical_bundle.profiles if p.app is AppId.GRINDR]
        assert len(grindr_links) == len(grindr_profiles)
        assert len({l.profile_id for l in grindr_links}) == len(grindr_profiles)


class TestContactEvidence:
    def _five_message_bundle(self, tmp_path):
        messages = [_msg(i, "a1", "b2", i * 10) for i in range(5)]
        return _bundle(tmp_path, messages=messages)

    def test_counts_and_extremes(self, tmp_path):
        bundle = self._five_message_bundle(tmp_path)
        evidence = contact_evidence(bundle, ("Grindr", "a1"), ("Grindr", "b2"))
        assert evidence.message_count == 5
        assert evidence.first_contact == T0
        assert evidence.last_contact == T0 + timedelta(minutes=40)
        assert len(evidence.supporting) == 5

    def test_symmetry(self, tmp_path):
        bundle = self._five_message_bundle(tmp_path)
        ab = contact_evidence(bundle, ("Grindr", "a1"), ("Grindr", "b2"))
        ba = contact_evidence(bundle, ("Grindr", "b2"), ("Grindr", "a1"))
        assert to_jsonable(ab) == to_jsonable(ba)

    def test_unlinked_identities_absent(self, tmp_path):
        bundle = self._five_message_bundle(tmp_path)
        assert contact_evidence(bundle, ("Grindr", "a1"), ("Grindr", "zz")) is None

    def test_before_filter(self, tmp_path):
        bundle = self._five_message_bundle(tmp_path)
        before = T0 + timedelta(minutes=15)  # between message 2 and 3
        evidence = contact_evidence(bundle, ("Grindr", "a1"), ("Grindr", "b2"), before=before)
        assert evidence.message_count == 2

    def test_identity_map_bridges_apps(self, tmp_path):
        messages = [
            _msg(1, "a1", "b2", 0, app=AppId.GRINDR),
            _msg(2, "s9", "b2", 10, app=AppId.GRINDR),
        ]
        bundle = _bundle(tmp_path, messages=messages)
        identity_map = IdentityMap()
        identity_map.assert_same(("Skout", "777"), ("Grindr", "a1"))
        evidence = contact_evidence(
            bundle, ("Skout", "777"), ("Grindr", "b2"), identity_map=identity_map
        )
        assert evidence.message_count == 1

    def test_identity_map_file_roundtrip(self, tmp_path):
        path = tmp_path / "map.txt"
        path.write_text("# analyst assertions\nGrindr:a1=Skout:777\n")
        identity_map = IdentityMap.from_file(path)
        assert identity_map.canonical(("Skout", "777")) == identity_map.canonical(("Grindr", "a1"))


class TestLocationHistory:
    def test_merge_and_order(self, tmp_path):
        timed = [
            LocationFix(precision="exact", lat=-34.9, lon=138.6, at=T0 + timedelta(hours=2),
                        subject="owner", app=AppId.TINDER, source=SRC),
            LocationFix(precision="exact", lat=-34.8, lon=138.5, at=T0,
                        subject="owner", app=AppId.TINDER, source=SRC),
        ]
        untimed = LocationFix(precision="suburb", suburb="Adelaide", subject="owner",
                              app=AppId.BADOO, source=SRC)
        other = LocationFix(precision="exact", lat=1.0, lon=2.0, at=T0, subject="other",
                            subject_id="p2", app=AppId.GRINDR, source=SRC)
        bundle = _bundle(tmp_path, locations=[untimed, timed[0], timed[1], other])
        history = location_history(bundle)
        assert [f.at for f in history] == [T0, T0 + timedelta(hours=2), None]
        assert all(f.subject == "owner" for f in history)

    def test_empty(self, tmp_path):
        assert location_history(_bundle(tmp_path)) == []

    def test_canonical_suburb_fixes_present(self, canonical_bundle):
        history = location_history(canonical_bundle)
        suburb = [f for f in history if f.precision == "suburb"]
        assert len(suburb) == 2
        assert all(f.app is AppId.BADOO for f in suburb)
        # untimed carved fixes sort to the end
        assert history[-1].at is None
