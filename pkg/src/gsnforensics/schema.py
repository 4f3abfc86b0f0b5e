"""Per-app database schema registry.

Column sets were transcribed from the documented acquisition of each app
(Grindr 2.1.1, Skout 4.3.3, Tinder 3.2.1); semantic roles drive the
normalizers in dbextract.  The registry is read-only data.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import AppId


@dataclass(frozen=True)
class TableSpec:
    table_name: str
    columns: tuple  # (column name, semantic role) pairs

    @property
    def column_names(self) -> tuple:
        return tuple(name for name, _role in self.columns)


GRINDR_TABLES = (
    TableSpec("blocks", (
        ("profile", "profile id"),
        ("timeStamp", "epoch blocked at"),
        ("isBlocked", "bool"),
    )),
    TableSpec("bodyTypeField", (
        ("fieldID", "lookup id"),
        ("name", "body type descriptor"),
    )),
    TableSpec("broadcast", (
        ("messageID", "message id"),
        ("expirationDate", "display cutoff"),
    )),
    TableSpec("chat", (
        ("messageID", "message id"),
        ("Source", "sender profile id"),
        ("Target", "recipient profile id"),
        ("Timestamp", "epoch sent at"),
        ("Type", "display type"),
        ("Body", "text or image hash"),
        ("Unread", "bool"),
        ("Failed", "bool"),
    )),
    TableSpec("ethnicityField", (
        ("fieldID", "lookup id"),
        ("Name", "ethnicity"),
    )),
    TableSpec("flagReason", (
        ("fieldID", "lookup id"),
        ("Name", "report reason"),
    )),
    TableSpec("imageGallery", (
        ("messageID", "message id"),
        ("mediaHash", "image hash"),
        ("Profile", "profile id"),
    )),
    TableSpec("lookingFor", (
        ("Profile", "profile id"),
        ("lookingForId", "lookup id"),
    )),
    TableSpec("lookingForField", (
        ("fieldID", "lookup id"),
        ("Name", "looking-for category"),
    )),
    TableSpec("moderation", (
        ("messageID", "message id"),
        ("Message", "message content"),
        ("Type", "moderation type"),
        ("mediaHash", "image hash"),
        ("Unread", "bool"),
    )),
    TableSpec("profile", (
        ("profileID", "profile id"),
        ("about", "free text"),
        ("age", "years"),
        ("birthdate", "date"),
        ("isBlocked", "bool"),
        ("isBlocker", "bool"),
        ("bodyType", "fk bodyTypeField"),
        ("children", "count"),
        ("displayName", "display name"),
        ("ethnicity", "fk ethnicityField"),
        ("weight", "grams"),
        ("facebookID", "facebook handle"),
        ("headline", "free text"),
        ("headlineDate", "epoch"),
        ("height", "centimeters"),
        ("isCurrent", "owner marker"),
        ("isFave", "bool"),
        ("Version", "app version"),
        ("profileImageHash", "image hash, links to picasso cache"),
        ("relationshipStatus", "fk"),
        ("showAge", "bool"),
        ("showDistance", "bool"),
        ("twitterID", "twitter handle"),
        ("instagramID", "instagram handle"),
        ("lastSeen", "epoch last seen"),
        ("profileStatus", "empty"),
    )),
)

SKOUT_TABLES = (
    TableSpec("skoutUsersTable", (
        ("userID", "profile id"),
        ("userName", "display name"),
        ("picUrl", "profile image url"),
        ("userLastMessageID", "last message id"),
        ("lastMessageTimestamp", "epoch last message"),
    )),
    TableSpec("skoutMessages", (
        ("messageID", "message id"),
        ("Timestamp", "epoch sent at"),
        ("fromUserID", "sender id"),
        ("toUserID", "recipient id"),
        ("chatID", "thread id"),
        ("Type", "normal|picture|rich; rich only from admin accounts"),
        ("Message", "body"),
        ("addedFrom", "empty"),
        ("messageOrdered", "bool"),
    )),
)

TINDER_TABLES = (
    TableSpec("messages", (
        ("User_id", "chat partner id"),
        ("Match_id", "fk matches"),
        ("Client_created", "empty"),
        ("Created", "message timestamp"),
        ("Has_error", "bool"),
        ("Text", "body"),
        ("Viewed", "bool"),
    )),
    TableSpec("Analytic_Events", (
        ("timestamp", "event timestamp"),
        ("Name", "event name"),
        ("Params", "userID, latitude, longitude, network type, deviceId"),
    )),
    TableSpec("facebook_friends", (
        ("Id", "facebook user id"),
        ("Name", "display name"),
        ("Avatar_url", "profile image url"),
        ("State", "empty"),
        ("Tinder", "tinder id"),
    )),
    # Observed empty; its column layout was not recoverable.
    TableSpec("Match_requests", ()),
    TableSpec("matches", (
        ("Id", "match id"),
        ("User_id", "counterpart id"),
        ("Created", "match made at"),
        ("Last_activity", "last activity at"),
        ("Server_message_count", "empty"),
        ("Touched", "bool"),
        ("Viewed", "bool"),
        ("User_name", "counterpart name"),
        ("Draft_msg", "empty"),
        ("Reported_for", "report reason"),
        ("Gender", "0 or 1; assignment undocumented"),
        ("Following", "bool"),
    )),
    TableSpec("Moment_likes", (
        ("Date", "epoch"),
        ("Moment_id", "fk moments"),
        ("Liked_by_id", "profile id"),
        ("Thumb_url", "image url"),
        ("Has_been_viewed", "bool"),
        ("Mixed_id", "id"),
        ("By_user_id", "profile id"),
    )),
    TableSpec("moments", (
        ("Id", "moment id"),
        ("User_id", "author id"),
        ("Created", "created at"),
        ("Text", "caption"),
        ("Photo_id", "fk photos"),
        ("Filter", "image filter"),
        ("Text_alignment", "layout"),
        ("Text_size", "layout"),
        ("Text_height", "layout"),
        ("Is_pending", "bool"),
        ("Has_failed", "bool"),
        ("Rated_type", "rating"),
        ("Num_likes", "count"),
    )),
    TableSpec("photos", (
        ("Id", "photo id"),
        ("User_id", "owner id"),
        ("Image_url", "image url"),
        ("Origin_x", "crop"),
        ("Origin_y", "crop"),
        ("Height", "pixels"),
        ("Width", "pixels"),
        ("Xoffset_percent", "scaled"),
        ("Yoffset_percent", "scaled"),
        ("Xdistance_Percent", "scaled"),
        ("Ydistance_Percent", "scaled"),
        ("Photo_order", "index within photo set"),
    )),
    TableSpec("photo_moments", (
        ("Id", "photo moment id"),
        ("Large", "image url"),
        ("Med", "image url"),
        ("Orig", "image url"),
        ("Small", "image url"),
        ("thumb", "image url"),
    )),
)

SCHEMA_REGISTRY: dict[AppId, tuple[TableSpec, ...]] = {
    AppId.GRINDR: GRINDR_TABLES,
    AppId.SKOUT: SKOUT_TABLES,
    AppId.TINDER: TINDER_TABLES,
}

# Badoo stores no normalizable schema: google_analytics_v2.db holds user
# agreement data and is expected empty; webview/cookie databases are swept
# generically for email-like values.
BADOO_EXPECTED_EMPTY_DBS = frozenset({"google_analytics_v2.db"})

EXPECTED_TABLE_COUNTS = {AppId.GRINDR: 11, AppId.SKOUT: 2, AppId.TINDER: 9}


def registry_self_test() -> None:
    """Assert the transcription invariants; raises AssertionError on drift."""
    total = 0
    for app, expected in EXPECTED_TABLE_COUNTS.items():
        specs = SCHEMA_REGISTRY[app]
        assert len(specs) == expected, f"{app.value}: {len(specs)} != {expected}"
        names = [s.table_name for s in specs]
        assert len(set(names)) == len(names), f"{app.value}: duplicate table names"
        for spec in specs:
            cols = spec.column_names
            assert len(set(cols)) == len(cols), f"{spec.table_name}: duplicate columns"
        total += expected
    assert total == 22, f"registry holds {total} tables, expected 22"


def spec_for(app: AppId, table_name: str) -> TableSpec | None:
    for spec in SCHEMA_REGISTRY.get(app, ()):
        if spec.table_name == table_name:
            return spec
    return None
