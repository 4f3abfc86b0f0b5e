import hashlib

import pytest

from gsnforensics.caches import (
    CacheParseError,
    CarveGrammar,
    carve_string_records,
    classify_image_bytes,
    parse_picasso_pair,
    parse_volley_match_cache,
    sha256_hex,
)
from gsnforensics.model import AppId, ArtifactSource, FileKind, normalize_epoch

META_SRC = ArtifactSource("data/data/app/cache/Picasso-cache/ab.o", FileKind.PICASSO_META)
IMG_SRC = ArtifactSource("data/data/app/cache/Picasso-cache/ab.i", FileKind.JPEG)
BLOB_SRC = ArtifactSource("data/data/com.badoo.mobile/cache/abc123", FileKind.OPAQUE)
JPEG = b"\xff\xd8\xff\xe0\x00\x10JFIF\x00\x01 body \xff\xd9"


class TestPicasso:
    def test_url_from_get_line(self):
        meta = b"GET http://cdn.example/img/abc.jpg HTTP/1.1\r\nHost: cdn.example\r\n\r\n"
        entry = parse_picasso_pair(meta, JPEG, META_SRC, IMG_SRC, AppId.GRINDR)
        assert entry.request_url == "http://cdn.example/img/abc.jpg"
        assert entry.image.format == "JPEG"
        assert entry.image.content_hash == hashlib.sha256(JPEG).hexdigest()

    def test_header_order_after_request_line_is_irrelevant(self):
        base = b"GET http://cdn.example/x.jpg HTTP/1.1\r\n"
        a = base + b"Host: h\r\nAccept: */*\r\n\r\n"
        b = base + b"Accept: */*\r\nHost: h\r\n\r\n"
        url_a = parse_picasso_pair(a, JPEG, META_SRC, IMG_SRC, AppId.GRINDR).request_url
        url_b = parse_picasso_pair(b, JPEG, META_SRC, IMG_SRC, AppId.GRINDR).request_url
        assert url_a == url_b

    def test_missing_get_line_raises(self):
        with pytest.raises(CacheParseError):
            parse_picasso_pair(b"POST /x HTTP/1.1\r\n", JPEG, META_SRC, IMG_SRC, AppId.GRINDR)

    def test_unknown_image_magic_kept(self):
        meta = b"GET http://cdn.example/x HTTP/1.1\r\n"
        entry = parse_picasso_pair(meta, b"garbage", META_SRC, IMG_SRC, AppId.GRINDR)
        assert entry.image.format == "unknown"

    def test_hash_reproducible_from_bytes(self):
        data = b"RIFF\x08\x00\x00\x00WEBPVP8 xx"
        assert classify_image_bytes(data) == "WebP"
        assert sha256_hex(data) == hashlib.sha256(data).hexdigest()

    def test_full_linkage_on_forged_corpus(self, canonical_corpus, canonical_bundle):
        _, manifest = canonical_corpus
        grindr_hashes = [
            p.image_hash for p in canonical_bundle.profiles
            if p.app is AppId.GRINDR and p.image_hash
        ]
        assert grindr_hashes
        urls = [e.request_url for e in canonical_bundle.picasso_entries]
        for image_hash in grindr_hashes:
            assert sum(1 for url in urls if image_hash in url) == 1


class TestVolley:
    def test_single_entry(self):
        data = b'{"match_id": "m1", "matched": true, "date": 1403136000}'
        events, warnings = parse_volley_match_cache(data, BLOB_SRC)
        assert warnings == []
        [event] = events
        assert event.match_id == "m1"
        assert event.matched is True
        assert event.occurred_at == normalize_epoch(1403136000)[0]

    def test_empty_file(self):
        events, warnings = parse_volley_match_cache(b"", BLOB_SRC)
        assert events == []
        assert len(warnings) == 1

    def test_two_concatenated_entries_in_order(self):
        data = (
            b'\x01\x02\x03binheader'
            b'{"match_id": "m1", "matched": false, "date": 1403136000}'
            b'{"match_id": "m2", "matched": true, "date": 1403136100}'
        )
        events, _ = parse_volley_match_cache(data, BLOB_SRC)
        assert [e.match_id for e in events] == ["m1", "m2"]
        assert [e.matched for e in events] == [False, True]

    def test_json_without_match_ids_warns(self):
        events, warnings = parse_volley_match_cache(b'{"results": []}', BLOB_SRC)
        assert events == []
        assert len(warnings) == 1

    def test_nested_match_objects_found(self):
        data = b'{"results": [{"match_id": "m7", "matched": true, "date": 1403136000}]}'
        events, _ = parse_volley_match_cache(data, BLOB_SRC)
        assert [e.match_id for e in events] == ["m7"]


class TestCarving:
    def test_single_record_all_fields(self):
        blob = b"\x01\x02alice\x00http://cdn.example/p.jpg\x00hey there\x00Adelaide\x03\x04"
        [preview] = carve_string_records(blob, BLOB_SRC)
        assert preview.username == "alice"
        assert preview.profile_pic_url == "http://cdn.example/p.jpg"
        assert preview.last_message == "hey there"
        assert preview.location_suburb == "Adelaide"
        start, length = preview.source.byte_range
        assert blob[start:start + 5] == b"alice"
        assert start + length <= len(blob)

    def test_all_binary_blob_is_empty(self):
        blob = bytes(range(0, 9)) * 30
        assert carve_string_records(blob, BLOB_SRC) == []

    def test_two_record_groups_in_offset_order(self):
        gap = b"\xf9" * 64
        blob = (
            gap
            + b"bruno\x00http://cdn.example/1.jpg\x00first msg\x00Norwood"
            + gap
            + b"carla\x00http://cdn.example/2.jpg\x00second msg\x00Glenelg"
            + gap
        )
        previews = carve_string_records(blob, BLOB_SRC)
        assert [p.username for p in previews] == ["bruno", "carla"]
        assert previews[0].source.byte_range[0] < previews[1].source.byte_range[0]

    def test_lone_url_is_not_a_record(self):
        gap = b"\xf9" * 64
        blob = gap + b"http://cdn.example/only.jpg" + gap
        assert carve_string_records(blob, BLOB_SRC) == []

    def test_runs_shorter_than_minimum_ignored(self):
        blob = b"ab\x00http://cdn.example/p.jpg\x00hi\x00yo"
        previews = carve_string_records(blob, BLOB_SRC, CarveGrammar(min_chars=3))
        assert previews == []  # neighbors all under 3 chars

    def test_byte_ranges_always_inside_file(self, canonical_corpus, canonical_bundle):
        for preview in canonical_bundle.previews:
            start, length = preview.source.byte_range
            blob_path = canonical_bundle.root / preview.source.file_path
            size = blob_path.stat().st_size
            assert 0 <= start and start + length <= size
