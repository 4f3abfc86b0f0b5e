import json
import sqlite3

import pytest

from gsnforensics.forge import (
    AppPlan,
    ForgeError,
    ForgeSpec,
    LeakPlant,
    LogPlan,
    canonical_spec,
    forge_bundle,
    forge_corpus,
    forge_transaction_log,
)
from gsnforensics.model import AppId
from gsnforensics.netleak import LeakCategory, ingest_transactions
from gsnforensics.pipeline import extract_bundle, hash_tree


class TestForgeCorpus:
    def test_same_spec_twice_is_byte_identical(self, tmp_path):
        manifest_a = forge_corpus(canonical_spec(), tmp_path / "a")
        manifest_b = forge_corpus(canonical_spec(), tmp_path / "b")
        assert hash_tree(tmp_path / "a") == hash_tree(tmp_path / "b")
        assert manifest_a.to_dict() == manifest_b.to_dict()

    def test_different_seed_differs(self, tmp_path):
        spec = canonical_spec()
        forge_corpus(spec, tmp_path / "a")
        other = canonical_spec()
        other.seed = 43
        forge_corpus(other, tmp_path / "b")
        assert hash_tree(tmp_path / "a") != hash_tree(tmp_path / "b")

    def test_zero_counts_extract_to_empty_bundle(self, tmp_path):
        spec = ForgeSpec(seed=1, apps={app: AppPlan() for app in
                                       (AppId.GRINDR, AppId.SKOUT, AppId.TINDER)})
        forge_corpus(spec, tmp_path / "ev")
        bundle = extract_bundle(tmp_path / "ev")
        assert len(bundle.installs) == 3
        assert bundle.messages == []
        assert bundle.profiles == []
        assert bundle.tokens == []
        assert bundle.images == []

    def test_grindr_row_counts(self, canonical_corpus):
        root, _ = canonical_corpus
        db = root / "evidence/data/data/com.grindapp.android/databases/grindr.db"
        conn = sqlite3.connect(db)
        try:
            assert conn.execute("SELECT COUNT(*) FROM chat").fetchone()[0] == 5
            # 3 counterpart profiles plus the owner row
            assert conn.execute("SELECT COUNT(*) FROM profile").fetchone()[0] == 4
            owners = conn.execute("SELECT COUNT(*) FROM profile WHERE isCurrent=1").fetchone()[0]
            assert owners == 1
        finally:
            conn.close()

    def test_nonempty_outdir_refused(self, tmp_path):
        target = tmp_path / "full"
        target.mkdir()
        (target / "existing.txt").write_text("x")
        with pytest.raises(ForgeError):
            forge_corpus(canonical_spec(), target)

    def test_external_pii_refused(self, tmp_path):
        spec = canonical_spec()
        spec.extra_names = ("real.person@gmail.com",)
        with pytest.raises(ForgeError):
            forge_corpus(spec, tmp_path / "ev")
        spec.extra_names = ("+61 8 1234 5678",)
        with pytest.raises(ForgeError):
            forge_corpus(spec, tmp_path / "ev2")

    def test_spec_json_roundtrip(self, tmp_path):
        spec = canonical_spec()
        path = tmp_path / "spec.json"
        path.write_text(json.dumps(spec.to_dict()))
        loaded = ForgeSpec.from_json_file(path)
        assert loaded.to_dict() == spec.to_dict()

    def test_malformed_prefs_injection_warns_not_fails(self, tmp_path):
        spec = ForgeSpec(
            seed=3,
            apps={AppId.FULLCIRCLE: AppPlan(tokens=True), AppId.MEETME: AppPlan(messages=1)},
            inject_malformed={"prefs": True, "database": True},
        )
        forge_corpus(spec, tmp_path / "ev")
        bundle = extract_bundle(tmp_path / "ev")
        assert any("broken.xml" in w for w in bundle.warnings)
        assert any("corrupt.db" in w for w in bundle.warnings)
        # the clean artifacts still extract
        assert len(bundle.messages) == 1
        assert any(t.app is AppId.FULLCIRCLE for t in bundle.tokens)


class TestForgeTransactionLog:
    def test_planted_leak_manifest_indices(self):
        plan = LogPlan(
            plants=[
                LeakPlant(AppId.JAUMO, LeakCategory.LOCATION_IN_FILENAME),
                LeakPlant(AppId.FULLCIRCLE, LeakCategory.PLAINTEXT_MESSAGE),
            ],
            decoys=5,
        )
        body, manifest = forge_transaction_log(plan, seed=11)
        assert manifest["transactions"] == 7
        assert len(manifest["planted"]) == 2
        lines = body.decode().strip().splitlines()
        assert len(lines) == 7
        for plant in manifest["planted"]:
            doc = json.loads(lines[plant["index"]])
            assert doc["app"] == plant["app"]

    def test_zero_plants_only_decoys(self):
        body, manifest = forge_transaction_log(LogPlan(plants=[], decoys=10), seed=5)
        assert manifest["planted"] == []
        transactions, warnings = ingest_transactions(body.decode().splitlines())
        assert len(transactions) == 10
        assert warnings == []

    def test_log_determinism(self):
        plan = LogPlan(plants=[LeakPlant(AppId.GRINDR, LeakCategory.EXACT_LOCATION)], decoys=8)
        a, _ = forge_transaction_log(plan, seed=9)
        b, _ = forge_transaction_log(plan, seed=9)
        assert a == b

    def test_malformed_line_injection(self):
        plan = LogPlan(plants=[], decoys=3)
        body, _ = forge_transaction_log(plan, seed=2, inject_malformed=True)
        transactions, warnings = ingest_transactions(body.decode().splitlines())
        assert len(transactions) == 3
        assert len(warnings) == 1


class TestForgeBundle:
    def test_layout(self, tmp_path):
        forge_bundle(canonical_spec(), tmp_path / "bundle")
        assert (tmp_path / "bundle/evidence/data/data/com.tinder").is_dir()
        assert (tmp_path / "bundle/transactions.ndjson").is_file()
        manifest = json.loads((tmp_path / "bundle/manifest.json").read_text())
        assert manifest["log"]["planted"]
        assert manifest["installs"]
