"""Token risk classification and (opt-in only) online verification.

No network activity happens unless the operator explicitly supplies a real
transport; the default transport refuses every request.  Posting on behalf
of recovered accounts is deliberately unsupported.
"""

from __future__ import annotations

import json
import urllib.parse
import urllib.request
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .model import AuthToken, TokenProvider

GRAPH_ME_PREFIX = "https://graph.facebook.com/me?access_token="

LINKAGE_NOTE = "Facebook token ties account identities together across services"
GRAPH_NOTE = "token can be submitted to the Graph endpoint to retrieve the holder's details"
DISABLED_NOTE = "online check disabled"


class EmptyTokenError(ValueError):
    pass


class NotApplicableError(ValueError):
    """The operation only applies to Facebook tokens."""


class TransportRefused(RuntimeError):
    """Raised by the default transport: no online checks without opt-in."""


class OnlineCheckFailed(RuntimeError):
    """Transport-level failure during an opted-in verification."""


@dataclass
class TokenAssessment:
    token: AuthToken
    graph_url: Optional[str] = None
    risk_notes: list = field(default_factory=list)
    verified_identity: Optional[tuple] = None  # (name, account id)


@dataclass(frozen=True)
class VerificationOutcome:
    identity: Optional[tuple]
    note: str


def build_graph_request(token: AuthToken) -> str:
    """The documented Graph lookup URL for a Facebook token, percent-encoded."""
    if token.provider is not TokenProvider.FACEBOOK:
        raise NotApplicableError(f"{token.provider.value} tokens have no Graph endpoint")
    if not token.token:
        raise EmptyTokenError("empty token")
    return GRAPH_ME_PREFIX + urllib.parse.quote(token.token, safe="")


def classify_token(
    token: AuthToken, peers: Optional[Sequence[AuthToken]] = None
) -> TokenAssessment:
    """Assess one token; peers enable cross-app reuse detection."""
    assessment = TokenAssessment(token=token)
    if token.provider is TokenProvider.FACEBOOK:
        assessment.graph_url = build_graph_request(token)
        assessment.risk_notes.append(LINKAGE_NOTE)
        assessment.risk_notes.append(GRAPH_NOTE)
    else:
        assessment.risk_notes.append(
            f"{token.provider.value} token grants access to the {token.app.value} account"
        )
    if peers:
        reused_in = sorted(
            {p.app.value for p in peers if p.token == token.token and p.app is not token.app}
        )
        if reused_in:
            assessment.risk_notes.append(
                "token value reused across apps: " + ", ".join(reused_in)
            )
    return assessment


def assess_tokens(tokens: Sequence[AuthToken]) -> list[TokenAssessment]:
    return [classify_token(t, peers=tokens) for t in tokens]


class RefusalTransport:
    """Default transport: records the attempt and refuses to go online."""

    def __init__(self):
        self.refused_urls: list[str] = []

    def request(self, url: str):
        self.refused_urls.append(url)
        raise TransportRefused(DISABLED_NOTE)


class UrllibTransport:
    """Real HTTP transport; construct only behind the explicit opt-in flag."""

    def __init__(self, timeout: float = 10.0):
        self.timeout = timeout

    def request(self, url: str):
        try:
            with urllib.request.urlopen(url, timeout=self.timeout) as resp:
                return resp.status, resp.read()
        except urllib.error.HTTPError as exc:  # error statuses are still answers
            return exc.code, exc.read()


def verify_token(token: AuthToken, transport) -> VerificationOutcome:
    """Submit a Facebook token through the given transport, if it allows it.

    Never raises for refusals or error responses; only a broken transport
    surfaces as OnlineCheckFailed so the pipeline can log and continue.
    """
    url = build_graph_request(token)
    try:
        status, body = transport.request(url)
    except TransportRefused:
        return VerificationOutcome(None, DISABLED_NOTE)
    except Exception as exc:
        raise OnlineCheckFailed(f"transport failure: {exc}") from exc
    if status != 200:
        return VerificationOutcome(None, f"graph endpoint returned status {status}")
    try:
        doc = json.loads(body.decode("utf-8", errors="replace"))
    except ValueError:
        return VerificationOutcome(None, "unparseable response body")
    name, account_id = doc.get("name"), doc.get("id")
    if name is None or account_id is None:
        return VerificationOutcome(None, "response lacked name/id fields")
    return VerificationOutcome((str(name), str(account_id)), "verified")
