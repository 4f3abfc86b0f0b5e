import json
import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))  # calendar_oracle importable

from gsnforensics.forge import canonical_spec, forge_bundle
from gsnforensics.pipeline import extract_bundle
from gsnforensics.serialize import to_jsonable

settings.register_profile(
    "ci", deadline=None, derandomize=True, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("ci")


def record_multiset(items):
    """Order-insensitive canonical form for exact-equality comparisons."""
    return sorted(json.dumps(to_jsonable(item), sort_keys=True) for item in items)


@pytest.fixture(scope="session")
def canonical_corpus(tmp_path_factory):
    """Forged canonical corpus + transaction log + ground-truth manifest."""
    outdir = tmp_path_factory.mktemp("canonical")
    manifest = forge_bundle(canonical_spec(), outdir / "bundle")
    return outdir / "bundle", manifest


@pytest.fixture(scope="session")
def canonical_bundle(canonical_corpus):
    root, _manifest = canonical_corpus
    return extract_bundle(root / "evidence")
