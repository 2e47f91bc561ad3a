"""Relationship label system, record validation, coarse-label repair and dedup."""

from __future__ import annotations

import dataclasses
import unicodedata
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping

from .errors import EmptyName, InvalidEnum, MissingField

RECORD_FIELDS = ("character_1", "character_2", "affinity", "coarse_category", "fine_category")


class Affinity(str, Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    NEUTRAL = "neutral"


class CoarseCategory(str, Enum):
    SOCIAL = "social"
    PROFESSIONAL = "professional"
    FAMILIAL = "familial"


class FineCategory(str, Enum):
    # social
    FRIEND = "friend"
    ENEMY = "enemy"
    ACQUAINTANCE = "acquaintance"
    LOVERS = "lovers"
    UNREQUITED_LOVE_INTEREST = "unrequited love interest"
    RIVALS = "rivals"
    # professional
    EMPLOYER = "employer"
    EMPLOYEE = "employee"
    COLLEAGUE = "colleague"
    SERVANT = "servant"
    MASTER = "master"
    STUDENT = "student"
    TEACHER = "teacher"
    CLIENT = "client"
    SERVICE_PROVIDER = "person offering service to client"
    # familial
    HUSBAND = "husband"
    WIFE = "wife"
    BROTHER = "brother"
    SISTER = "sister"
    COUSIN = "cousin"
    UNCLE = "uncle"
    AUNT = "aunt"
    NIECE = "niece"
    NEPHEW = "nephew"
    CHILD = "child"
    PARENT = "parent"
    GRANDCHILD = "grandchild"
    GRANDPARENT = "grandparent"
    ORPHAN = "orphan"
    FOSTER_PARENT = "foster parent"
    STEP_CHILD = "step-child"
    STEP_PARENT = "step-parent"
    IN_LAW = "in-law relation"
    HALF_RELATION = "half relation"


_SOCIAL = {
    FineCategory.FRIEND,
    FineCategory.ENEMY,
    FineCategory.ACQUAINTANCE,
    FineCategory.LOVERS,
    FineCategory.UNREQUITED_LOVE_INTEREST,
    FineCategory.RIVALS,
}
_PROFESSIONAL = {
    FineCategory.EMPLOYER,
    FineCategory.EMPLOYEE,
    FineCategory.COLLEAGUE,
    FineCategory.SERVANT,
    FineCategory.MASTER,
    FineCategory.STUDENT,
    FineCategory.TEACHER,
    FineCategory.CLIENT,
    FineCategory.SERVICE_PROVIDER,
}

COARSE_OF: dict[FineCategory, CoarseCategory] = {
    fine: (
        CoarseCategory.SOCIAL
        if fine in _SOCIAL
        else CoarseCategory.PROFESSIONAL
        if fine in _PROFESSIONAL
        else CoarseCategory.FAMILIAL
    )
    for fine in FineCategory
}


def coarse_of(fine: FineCategory | str) -> CoarseCategory:
    """Canonical coarse category implied by a fine label."""
    return COARSE_OF[FineCategory(fine)]


@dataclass(frozen=True)
class RelationshipRecord:
    character_1: str
    character_2: str
    affinity: Affinity
    coarse_category: CoarseCategory
    fine_category: FineCategory

    @property
    def pair_key(self) -> tuple[str, str]:
        return canonical_pair(self.character_1, self.character_2)

    @property
    def is_consistent(self) -> bool:
        return self.coarse_category is coarse_of(self.fine_category)

    def to_dict(self) -> dict[str, str]:
        return {
            "character_1": self.character_1,
            "character_2": self.character_2,
            "affinity": self.affinity.value,
            "coarse_category": self.coarse_category.value,
            "fine_category": self.fine_category.value,
        }


@dataclass(frozen=True)
class CharacterNetwork:
    volume_id: str
    records: tuple[RelationshipRecord, ...] = ()

    def __post_init__(self):
        if not isinstance(self.records, tuple):
            object.__setattr__(self, "records", tuple(self.records))

    def to_dict(self) -> dict:
        return {"volume_id": self.volume_id, "records": [r.to_dict() for r in self.records]}

    @classmethod
    def from_dict(cls, obj: Mapping) -> "CharacterNetwork":
        return cls(str(obj["volume_id"]), tuple(parse_record(r) for r in obj["records"]))


def _parse_enum(enum_cls, field: str, value):
    if not isinstance(value, str):
        raise InvalidEnum(field, value)
    try:
        return enum_cls(value)
    except ValueError:
        raise InvalidEnum(field, value) from None


def _parse_name(field: str, value) -> str:
    if not isinstance(value, str):
        raise InvalidEnum(field, value)
    name = value.strip()
    if not name:
        raise EmptyName(f"{field} is blank")
    return name


def parse_record(raw: Mapping) -> RelationshipRecord:
    """Validate a raw field map against the record schema.

    Names are trimmed; enum values must match the schema spelling exactly.
    Extra keys are ignored.
    """
    for name in RECORD_FIELDS:
        if name not in raw:
            raise MissingField(name)
    return RelationshipRecord(
        character_1=_parse_name("character_1", raw["character_1"]),
        character_2=_parse_name("character_2", raw["character_2"]),
        affinity=_parse_enum(Affinity, "affinity", raw["affinity"]),
        coarse_category=_parse_enum(CoarseCategory, "coarse_category", raw["coarse_category"]),
        fine_category=_parse_enum(FineCategory, "fine_category", raw["fine_category"]),
    )


def repair(record: RelationshipRecord) -> RelationshipRecord:
    """Overwrite the coarse label with the one implied by the fine label."""
    coarse = coarse_of(record.fine_category)
    if record.coarse_category is coarse:
        return record
    return dataclasses.replace(record, coarse_category=coarse)


def normalize_name(name: str) -> str:
    return " ".join(unicodedata.normalize("NFC", name).casefold().split())


def canonical_pair(c1: str, c2: str) -> tuple[str, str]:
    """Order-insensitive key for a character pair."""
    a, b = normalize_name(c1), normalize_name(c2)
    if not a or not b:
        raise EmptyName()
    return (a, b) if a <= b else (b, a)


def repair_network(net: CharacterNetwork) -> tuple[CharacterNetwork, int]:
    """Repair every record; returns the network and how many records changed."""
    fixed = tuple(repair(r) for r in net.records)
    changed = sum(1 for old, new in zip(net.records, fixed) if old is not new)
    return CharacterNetwork(net.volume_id, fixed), changed


def dedupe_network(net: CharacterNetwork) -> tuple[CharacterNetwork, int]:
    """Keep the first record per unordered pair and drop self-pairs."""
    seen: set[tuple[str, str]] = set()
    kept = []
    for rec in net.records:
        key = rec.pair_key
        if key[0] == key[1] or key in seen:
            continue
        seen.add(key)
        kept.append(rec)
    return CharacterNetwork(net.volume_id, tuple(kept)), len(net.records) - len(kept)


def relationship_set(net: CharacterNetwork) -> frozenset:
    return frozenset((r.pair_key, r.affinity, r.fine_category) for r in net.records)


def dedupe_corpus(nets: Iterable[CharacterNetwork]) -> list[CharacterNetwork]:
    """Collapse networks with identical relationship sets to their first occurrence."""
    seen = set()
    out = []
    for net in nets:
        key = relationship_set(net)
        if key in seen:
            continue
        seen.add(key)
        out.append(net)
    return out
