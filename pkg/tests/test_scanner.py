import io
import sqlite3

import pytest
from PIL import Image

from gsnforensics.model import AppId, FileKind
from gsnforensics.scanner import ScanError, classify_file, scan_root

SQLITE_HEADER = b"SQLite format 3\x00"


def _make_tree(root, layout="full"):
    base = root / "data" / "data" if layout == "full" else root
    grindr = base / "com.grindapp.android"
    (grindr / "databases").mkdir(parents=True)
    db = grindr / "databases" / "grindr.db"
    conn = sqlite3.connect(db)
    conn.execute("CREATE TABLE chat (messageID INTEGER)")
    conn.commit()
    conn.close()
    (grindr / "shared_prefs").mkdir()
    (grindr / "shared_prefs" / "Rules.xml").write_bytes(
        b"<?xml version='1.0'?><map><string name=\"t\">x</string></map>"
    )
    return db


class TestClassifyFile:
    def test_sqlite_header_from_real_database(self, tmp_path):
        db = tmp_path / "probe.db"
        conn = sqlite3.connect(db)
        conn.execute("CREATE TABLE t (a INTEGER)")
        conn.commit()
        conn.close()
        header = db.read_bytes()[:16]
        assert header == SQLITE_HEADER
        assert classify_file("databases/probe.db", header) is FileKind.SQLITE_DB

    def test_jpeg_magic_from_independent_encoder(self):
        buf = io.BytesIO()
        Image.new("RGB", (1, 1), (120, 30, 30)).save(buf, format="JPEG")
        header = buf.getvalue()[:16]
        assert header[:3] == b"\xff\xd8\xff"
        assert classify_file("cache/downloader/pic", header) is FileKind.JPEG

    def test_png_and_webp_magics(self):
        buf = io.BytesIO()
        Image.new("RGB", (1, 1)).save(buf, format="PNG")
        assert classify_file("x/y.bin", buf.getvalue()[:16]) is FileKind.PNG
        webp = b"RIFF\x10\x00\x00\x00WEBPVP8 "
        assert classify_file("x/y.bin", webp[:16]) is FileKind.WEBP

    def test_zero_length_file_is_opaque(self):
        assert classify_file("whatever/file", b"") is FileKind.OPAQUE

    def test_magic_beats_extension(self):
        # a database renamed .txt still classifies as a database
        assert classify_file("data/evil.txt", SQLITE_HEADER) is FileKind.SQLITE_DB
        assert classify_file("a/b.jpg", b"not an image at a") is FileKind.OPAQUE

    def test_picasso_meta_rule(self):
        header = b"GET http://x/y HTTP"
        assert (
            classify_file("data/data/app/cache/Picasso-cache/ab.o", header[:16])
            is FileKind.PICASSO_META
        )
        assert classify_file("data/data/app/other/ab.o", header[:16]) is FileKind.OPAQUE

    def test_prefs_rule_requires_shared_prefs_dir(self):
        header = b"<?xml version='1."
        assert classify_file("p/shared_prefs/a.xml", header[:16]) is FileKind.PREFS_XML
        assert classify_file("p/other/a.xml", header[:16]) is FileKind.OPAQUE

    def test_json_rule_requires_cache_dir(self):
        assert classify_file("p/cache/volley/e1", b'{"a": 1}') is FileKind.JSON
        assert classify_file("p/documents/e1", b'{"a": 1}') is FileKind.OPAQUE


class TestScanRoot:
    def test_grindr_install_detected(self, tmp_path):
        _make_tree(tmp_path)
        catalog = scan_root(tmp_path)
        assert len(catalog.installs) == 1
        install = catalog.installs[0]
        assert install.app is AppId.GRINDR
        assert install.package_path == "data/data/com.grindapp.android"
        kinds = {e.path: e.kind for e in catalog.entries}
        assert kinds["data/data/com.grindapp.android/databases/grindr.db"] is FileKind.SQLITE_DB
        assert all(e.app is AppId.GRINDR for e in catalog.entries)

    def test_empty_directory(self, tmp_path):
        catalog = scan_root(tmp_path)
        assert catalog.installs == []
        assert catalog.entries == []

    def test_four_documented_apps(self, tmp_path, canonical_corpus):
        root, _ = canonical_corpus
        catalog = scan_root(root / "evidence")
        documented = [
            i for i in catalog.installs
            if i.app in (AppId.BADOO, AppId.GRINDR, AppId.SKOUT, AppId.TINDER)
        ]
        assert len(documented) == 4
        assert all(not i.registry_extended for i in documented)

    def test_bare_layout_detected(self, tmp_path):
        _make_tree(tmp_path, layout="bare")
        catalog = scan_root(tmp_path)
        assert catalog.package_base == ""
        assert catalog.installs[0].package_path == "com.grindapp.android"

    def test_missing_root_raises(self, tmp_path):
        with pytest.raises(ScanError):
            scan_root(tmp_path / "nope")

    def test_rescan_is_byte_identical(self, tmp_path):
        _make_tree(tmp_path)
        first = scan_root(tmp_path).to_json()
        second = scan_root(tmp_path).to_json()
        assert first == second

    def test_unreadable_file_warns_and_continues(self, tmp_path, monkeypatch):
        db = _make_tree(tmp_path)
        import gsnforensics.scanner as scanner_mod

        real = scanner_mod._read_header

        def flaky(path):
            if path.name == "grindr.db":
                raise OSError("simulated I/O error")
            return real(path)

        monkeypatch.setattr(scanner_mod, "_read_header", flaky)
        catalog = scan_root(tmp_path)
        assert any("grindr.db" in w for w in catalog.warnings)
        assert any(e.path.endswith("grindr.db") for e in catalog.entries)

    def test_symlinks_not_followed(self, tmp_path):
        _make_tree(tmp_path)
        outside = tmp_path.parent / "outside.txt"
        outside.write_text("secret")
        (tmp_path / "link.txt").symlink_to(outside)
        catalog = scan_root(tmp_path)
        assert not any(e.path == "link.txt" for e in catalog.entries)

    def test_external_storage_note(self, tmp_path):
        _make_tree(tmp_path)
        (tmp_path / "external").mkdir()
        catalog = scan_root(tmp_path)
        assert any("external storage" in n for n in catalog.notes)
