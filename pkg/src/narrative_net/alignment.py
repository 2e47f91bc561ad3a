"""Catalog alignment by title/author edit-distance similarity."""

from __future__ import annotations

import string
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

THRESHOLD = 0.8

_PUNCT = string.punctuation + "\u2018\u2019\u201c\u201d\u2013\u2014"


@dataclass(frozen=True)
class VolumeMetadata:
    volume_id: str
    title: str = ""
    author: str = ""
    language: str = ""
    year: int | None = None
    is_fiction: bool | None = None

    @property
    def decade(self) -> int | None:
        return None if self.year is None else (self.year // 10) * 10


@dataclass(frozen=True)
class MatchCandidate:
    catalog_id: str
    title_similarity: float
    author_similarity: float
    catalog_index: int = -1

    @property
    def score(self) -> float:
        return self.title_similarity + self.author_similarity


def levenshtein(a: str, b: str) -> int:
    """Edit distance with unit-cost insert, delete and substitute (two-row DP)."""
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def normalize(s: str) -> str:
    """Case-fold, collapse whitespace, strip surrounding punctuation."""
    return " ".join(s.casefold().split()).strip(_PUNCT + " ")


def raw_similarity(a: str, b: str) -> float:
    longest = max(len(a), len(b))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein(a, b) / longest


def similarity(a: str, b: str) -> float:
    """1 - levenshtein / max length over normalized strings; 1.0 for two empties."""
    return raw_similarity(normalize(a), normalize(b))


def _exceeds(distance: int, longest: int, threshold: Fraction) -> bool:
    # exact rational comparison so a similarity of exactly 0.8 never passes 0.8
    if longest == 0:
        return 1 > threshold
    return Fraction(longest - distance, longest) > threshold


def _cannot_exceed(a: str, b: str, threshold: Fraction) -> bool:
    # distance >= |len(a) - len(b)|, which bounds the similarity from above
    return not _exceeds(abs(len(a) - len(b)), max(len(a), len(b)), threshold)


def passes(a: str, b: str, threshold: float = THRESHOLD) -> bool:
    """True when the normalized similarity of a and b strictly exceeds threshold."""
    a, b = normalize(a), normalize(b)
    return _exceeds(levenshtein(a, b), max(len(a), len(b)), Fraction(str(threshold)))


def best_match(volume: VolumeMetadata, catalog: Sequence[VolumeMetadata],
               threshold: float = THRESHOLD) -> MatchCandidate | None:
    """Closest catalog entry whose title and author similarities both exceed the threshold.

    Ranking uses the summed similarities; ties go to the lowest catalog index.
    """
    limit = Fraction(str(threshold))
    title, author = normalize(volume.title), normalize(volume.author)
    best = None
    for idx, entry in enumerate(catalog):
        ctitle, cauthor = normalize(entry.title), normalize(entry.author)
        if _cannot_exceed(title, ctitle, limit) or _cannot_exceed(author, cauthor, limit):
            continue
        dt = levenshtein(title, ctitle)
        lt = max(len(title), len(ctitle))
        if not _exceeds(dt, lt, limit):
            continue
        da = levenshtein(author, cauthor)
        la = max(len(author), len(cauthor))
        if not _exceeds(da, la, limit):
            continue
        cand = MatchCandidate(entry.volume_id, 1.0 - dt / lt if lt else 1.0,
                              1.0 - da / la if la else 1.0, idx)
        if best is None or cand.score > best.score:
            best = cand
    return best
