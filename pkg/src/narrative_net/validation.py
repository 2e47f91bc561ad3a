"""Per-attribute scoring of predicted relationship annotations against gold."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

from .alignment import THRESHOLD, passes, similarity
from .errors import NoMatches
from .taxonomy import CharacterNetwork, RelationshipRecord

ATTRIBUTES = ("affinity", "coarse_category", "fine_category")

MatchedPair = tuple[RelationshipRecord, RelationshipRecord]


@dataclass
class Alignment:
    matched: list[MatchedPair]
    unmatched_gold: int
    unmatched_pred: int


def _pair_similarity(g: RelationshipRecord, p: RelationshipRecord, threshold: float) -> float | None:
    """Combined name similarity in the better orientation, or None below threshold."""
    best = None
    for p1, p2 in ((p.character_1, p.character_2), (p.character_2, p.character_1)):
        if passes(g.character_1, p1, threshold) and passes(g.character_2, p2, threshold):
            score = similarity(g.character_1, p1) + similarity(g.character_2, p2)
            best = score if best is None else max(best, score)
    return best


def align_pairs(gold: CharacterNetwork, pred: CharacterNetwork, fuzzy: bool = False,
                threshold: float = THRESHOLD) -> Alignment:
    """Match records by canonical pair key, optionally falling back to fuzzy names."""
    by_key = {r.pair_key: r for r in pred.records}
    matched: list[MatchedPair] = []
    left_gold: list[RelationshipRecord] = []
    used: set[tuple[str, str]] = set()
    for g in gold.records:
        p = by_key.get(g.pair_key)
        if p is not None and g.pair_key not in used:
            matched.append((g, p))
            used.add(g.pair_key)
        else:
            left_gold.append(g)
    left_pred = [p for p in pred.records if p.pair_key not in used]
    if fuzzy and left_gold and left_pred:
        scored = []
        for gi, g in enumerate(left_gold):
            for pi, p in enumerate(left_pred):
                s = _pair_similarity(g, p, threshold)
                if s is not None:
                    scored.append((-s, gi, pi))
        scored.sort()
        taken_g: set[int] = set()
        taken_p: set[int] = set()
        for _, gi, pi in scored:
            if gi in taken_g or pi in taken_p:
                continue
            taken_g.add(gi)
            taken_p.add(pi)
            matched.append((left_gold[gi], left_pred[pi]))
        left_gold = [g for i, g in enumerate(left_gold) if i not in taken_g]
        left_pred = [p for i, p in enumerate(left_pred) if i not in taken_p]
    return Alignment(matched, len(left_gold), len(left_pred))


def _labels(pairs: Sequence[MatchedPair], attribute: str) -> list[tuple[str, str]]:
    if attribute not in ATTRIBUTES:
        raise ValueError(f"unknown attribute {attribute!r}")
    # coarse labels are scored as annotated, before any repair
    return [(getattr(g, attribute).value, getattr(p, attribute).value) for g, p in pairs]


def attribute_accuracy(pairs: Sequence[MatchedPair], attribute: str) -> float:
    if not pairs:
        raise NoMatches()
    labels = _labels(pairs, attribute)
    return sum(a == b for a, b in labels) / len(labels)


def cohen_kappa(pairs: Sequence[MatchedPair], attribute: str) -> float:
    """Chance-corrected agreement between gold and predicted labels."""
    if not pairs:
        raise NoMatches()
    labels = _labels(pairs, attribute)
    n = len(labels)
    po = sum(a == b for a, b in labels) / n
    if po == 1.0:
        return 1.0
    gold_counts = Counter(a for a, _ in labels)
    pred_counts = Counter(b for _, b in labels)
    pe = sum(gold_counts[k] * pred_counts[k] for k in gold_counts) / (n * n)
    return (po - pe) / (1.0 - pe)


@dataclass
class AttributeScore:
    attribute: str
    matched: int
    correct: int
    accuracy: float | None
    kappa: float | None
    unmatched_gold: int
    unmatched_pred: int


def score(alignment: Alignment) -> list[AttributeScore]:
    out = []
    for attr in ATTRIBUTES:
        pairs = alignment.matched
        correct = sum(a == b for a, b in _labels(pairs, attr))
        out.append(AttributeScore(
            attr, len(pairs), correct,
            attribute_accuracy(pairs, attr) if pairs else None,
            cohen_kappa(pairs, attr) if pairs else None,
            alignment.unmatched_gold, alignment.unmatched_pred,
        ))
    return out


def score_corpus(gold: Iterable[CharacterNetwork], pred: Iterable[CharacterNetwork],
                 fuzzy: bool = False) -> tuple[dict[str, list[AttributeScore]], list[AttributeScore]]:
    """Per-volume scores for shared volume ids, plus a pooled aggregate."""
    pred_by_id = {n.volume_id: n for n in pred}
    per_volume: dict[str, list[AttributeScore]] = {}
    pooled = Alignment([], 0, 0)
    for g in gold:
        p = pred_by_id.get(g.volume_id)
        if p is None:
            continue
        al = align_pairs(g, p, fuzzy=fuzzy)
        per_volume[g.volume_id] = score(al)
        pooled.matched.extend(al.matched)
        pooled.unmatched_gold += al.unmatched_gold
        pooled.unmatched_pred += al.unmatched_pred
    if not per_volume:
        raise NoMatches()
    return per_volume, score(pooled)
