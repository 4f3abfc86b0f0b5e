import json

import pytest

from gsnforensics.cli import main
from gsnforensics.forge import canonical_spec


@pytest.fixture(scope="module")
def forged(tmp_path_factory):
    outdir = tmp_path_factory.mktemp("cli")
    spec_path = outdir / "spec.json"
    spec_path.write_text(json.dumps(canonical_spec().to_dict()))
    assert main(["forge", str(spec_path), str(outdir / "bundle")]) == 0
    return outdir / "bundle"


class TestCli:
    def test_forge_layout(self, forged):
        assert (forged / "evidence").is_dir()
        assert (forged / "transactions.ndjson").is_file()
        assert (forged / "manifest.json").is_file()

    def test_forge_refuses_existing(self, forged, tmp_path, capsys):
        spec_path = tmp_path / "spec.json"
        spec_path.write_text(json.dumps(canonical_spec().to_dict()))
        assert main(["forge", str(spec_path), str(forged)]) == 1
        assert "error" in capsys.readouterr().err

    def test_scan(self, forged, capsys):
        assert main(["scan", str(forged / "evidence")]) == 0
        out = capsys.readouterr().out
        assert "installs (8)" in out
        assert "com.grindapp.android" in out

    def test_scan_json(self, forged, capsys):
        assert main(["scan", str(forged / "evidence"), "--json"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert len(doc["installs"]) == 8

    def test_scan_missing_root_fails(self, tmp_path, capsys):
        assert main(["scan", str(tmp_path / "nope")]) == 1

    def test_extract_to_file(self, forged, tmp_path, capsys):
        out = tmp_path / "report.json"
        assert main(["extract", str(forged / "evidence"), "--out", str(out)]) == 0
        doc = json.loads(out.read_text())
        assert doc["artifact_counts"]["Grindr"]["messages"] == 5
        assert doc["findings"] == []

    def test_extract_stdout_text(self, forged, capsys):
        assert main(["extract", str(forged / "evidence"), "--format", "text"]) == 0
        assert "summary of data retrieved" in capsys.readouterr().out

    def test_netscan(self, forged, tmp_path):
        out = tmp_path / "net.json"
        assert main([
            "netscan", str(forged / "evidence"),
            "--http-log", str(forged / "transactions.ndjson"),
            "--out", str(out),
        ]) == 0
        doc = json.loads(out.read_text())
        assert len(doc["findings"]) == 13
        assert "transaction_log_digest" in doc["meta"]

    def test_netscan_missing_log_fails(self, forged, capsys):
        assert main([
            "netscan", str(forged / "evidence"), "--http-log", "/nonexistent.ndjson",
        ]) == 1

    def test_correlate_contact(self, forged, capsys):
        # owner 1000000 exchanged Grindr messages with profile 1000001
        assert main([
            "correlate", str(forged / "evidence"),
            "--contact", "Grindr:1000000", "Grindr:1000001",
        ]) == 0
        out = capsys.readouterr().out
        doc = json.loads(out)
        assert doc["message_count"] >= 1

    def test_correlate_no_link(self, forged, capsys):
        assert main([
            "correlate", str(forged / "evidence"),
            "--contact", "Grindr:1000000", "Skout:2000001",
        ]) == 0
        assert "no contact evidence" in capsys.readouterr().out

    def test_verify_token_default_refuses_online(self, forged, capsys):
        assert main(["verify-token", str(forged / "evidence")]) == 0
        out = capsys.readouterr().out
        assert "online check disabled" in out
        assert "graph url: https://graph.facebook.com/me?access_token=" in out

    def test_custom_registry_flag(self, tmp_path, capsys):
        registry = tmp_path / "registry.tsv"
        registry.write_text("com.rebranded.jaumo\tJaumo\n")
        (tmp_path / "ev" / "data" / "data" / "com.rebranded.jaumo").mkdir(parents=True)
        assert main(["scan", str(tmp_path / "ev"), "--registry", str(registry)]) == 0
        out = capsys.readouterr().out
        assert "Jaumo" in out
        assert "[registry-extended]" in out

    def test_version(self, capsys):
        with pytest.raises(SystemExit) as excinfo:
            main(["--version"])
        assert excinfo.value.code == 0
