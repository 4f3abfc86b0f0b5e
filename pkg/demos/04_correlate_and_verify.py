"""Contact evidence, owner location history, and token risk assessment.

Correlation answers the analyst questions directly: were these two
identities in contact before a given instant, where has the device owner
been, and what do the recovered credentials expose?  Online verification
of Facebook tokens stays disabled unless explicitly opted in.
"""

import tempfile
from datetime import timedelta
from pathlib import Path

from gsnforensics import (
    canonical_spec,
    contact_evidence,
    extract_bundle,
    forge_corpus,
    location_history,
    verify_token,
)
from gsnforensics.correlate import IdentityMap, describe_history
from gsnforensics.model import TokenProvider, iso_instant
from gsnforensics.tokens import RefusalTransport, assess_tokens

workdir = Path(tempfile.mkdtemp(prefix="gsnf_demo_"))
evidence = workdir / "evidence"
forge_corpus(canonical_spec(), evidence)
bundle = extract_bundle(evidence)

# ---------------------------------------------------------------------------
# Contact evidence between the Grindr owner and a counterpart profile.
# ---------------------------------------------------------------------------
owner = bundle.owners[next(iter(bundle.owners))]
counterpart = next(
    p.profile_id for p in bundle.profiles if p.app.value == "Grindr" and not p.is_owner
)
evidence_record = contact_evidence(bundle, ("Grindr", owner), ("Grindr", counterpart))
print(f"contact between Grindr:{owner} and Grindr:{counterpart}:")
print(f"  messages: {evidence_record.message_count}")
print(f"  first:    {iso_instant(evidence_record.first_contact)}")
print(f"  last:     {iso_instant(evidence_record.last_contact)}")

# Restricting to "before an event" answers the alibi-style question.
cutoff = evidence_record.first_contact + timedelta(minutes=1)
earlier = contact_evidence(bundle, ("Grindr", owner), ("Grindr", counterpart), before=cutoff)
count = earlier.message_count if earlier else 0
print(f"  before {iso_instant(cutoff)}: {count} message(s)")

# Cross-app identity equivalence is analyst-asserted, never inferred.
mapping = IdentityMap()
mapping.assert_same(("Skout", "2000001"), ("Grindr", counterpart))
print("\nanalyst asserted Skout:2000001 == Grindr:" + counterpart)

# ---------------------------------------------------------------------------
# Owner location history merges prefs, analytics and carved suburb fixes.
# ---------------------------------------------------------------------------
history = location_history(bundle)
print(f"\nowner location history ({len(history)} fixes, untimed last):")
for line in describe_history(history):
    print(f"  {line}")

# ---------------------------------------------------------------------------
# Token assessment is offline; the default transport refuses the network.
# ---------------------------------------------------------------------------
assessments = assess_tokens(bundle.tokens)
facebook = [a for a in assessments if a.token.provider is TokenProvider.FACEBOOK]
print(f"\n{len(assessments)} tokens assessed, {len(facebook)} Facebook tokens")
sample = facebook[0]
print(f"  graph lookup url: {sample.graph_url[:60]}...")
for note in sample.risk_notes:
    print(f"  note: {note}")

outcome = verify_token(sample.token, RefusalTransport())
print(f"  online verification without opt-in: {outcome.note}")
