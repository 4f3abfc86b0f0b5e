"""Forensic extraction and correlation toolkit for GeoSocial dating apps."""

__version__ = "0.1.0"

from .model import (  # noqa: F401
    AppId,
    AppInstall,
    ArtifactSource,
    AuthToken,
    CachedImage,
    CarvedMessagePreview,
    ChatMessage,
    Direction,
    EvidenceBundle,
    FileKind,
    LocationFix,
    MalformedTimestamp,
    MatchRecord,
    ProfileRecord,
    TokenProvider,
    VolleyMatchEvent,
    normalize_epoch,
)
from .appregistry import default_registry, lookup_app  # noqa: F401
from .scanner import classify_file, scan_root  # noqa: F401
from .pipeline import extract_bundle, hash_tree, sha256_file  # noqa: F401
from .netleak import build_leak_matrix, detect_leaks, ingest_transactions  # noqa: F401
from .correlate import (  # noqa: F401
    IdentityMap,
    build_timeline,
    contact_evidence,
    link_profile_images,
    location_history,
)
from .tokens import build_graph_request, classify_token, verify_token  # noqa: F401
from .report import build_report, emit_report, render_summary_matrix  # noqa: F401
from .forge import ForgeSpec, canonical_spec, forge_bundle, forge_corpus  # noqa: F401
