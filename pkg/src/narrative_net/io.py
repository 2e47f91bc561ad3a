"""File formats: network JSONL, metadata/catalog CSV, corpus directories, report CSVs."""

from __future__ import annotations

import csv
import json
import logging
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .alignment import VolumeMetadata
from .errors import RecordError
from .taxonomy import CharacterNetwork, parse_record

log = logging.getLogger(__name__)

METADATA_HEADER = ["volume_id", "title", "author", "language", "year", "is_fiction"]

_TRUE = {"1", "true", "t", "yes", "y", "fiction"}
_FALSE = {"0", "false", "f", "no", "n", "nonfiction", "non-fiction"}


class FormatError(ValueError):
    """An input file does not have the expected structure."""


def network_from_obj(obj: Mapping) -> tuple[CharacterNetwork, int]:
    """Parse one JSONL object; invalid records are dropped and counted."""
    if not isinstance(obj, Mapping) or "volume_id" not in obj or not isinstance(obj.get("records"), list):
        raise FormatError("expected an object with volume_id and a records array")
    records = []
    dropped = 0
    for raw in obj["records"]:
        try:
            if not isinstance(raw, Mapping):
                raise RecordError("record is not an object")
            records.append(parse_record(raw))
        except RecordError:
            dropped += 1
    return CharacterNetwork(str(obj["volume_id"]), tuple(records)), dropped


def read_networks(path) -> tuple[list[CharacterNetwork], int, list[tuple[int, str]]]:
    """Read a network JSONL file.

    Returns (networks, invalid records dropped, [(line number, error)] for bad lines).
    """
    nets: list[CharacterNetwork] = []
    bad: list[tuple[int, str]] = []
    dropped = 0
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                net, n = network_from_obj(json.loads(line))
            except (json.JSONDecodeError, FormatError) as exc:
                log.warning("%s:%d: skipping bad line (%s)", path, lineno, exc)
                bad.append((lineno, str(exc)))
                continue
            nets.append(net)
            dropped += n
    return nets, dropped, bad


def dumps_network(net: CharacterNetwork) -> str:
    return json.dumps(net.to_dict(), ensure_ascii=False)


def write_networks(path, nets: Iterable[CharacterNetwork]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for net in nets:
            fh.write(dumps_network(net) + "\n")


def _parse_flag(value: str | None) -> bool | None:
    if value is None or not value.strip():
        return None
    v = value.strip().lower()
    if v in _TRUE:
        return True
    if v in _FALSE:
        return False
    raise FormatError(f"cannot read fiction flag {value!r}")


def _require_header(reader: csv.DictReader, required: Sequence[str], path) -> None:
    missing = [h for h in required if h not in (reader.fieldnames or [])]
    if missing:
        raise FormatError(f"{path}: missing columns {', '.join(missing)}")


def read_metadata(path, required: Sequence[str] = ("volume_id",)) -> list[VolumeMetadata]:
    """Load catalog/metadata rows. Only ``required`` columns must be present."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        _require_header(reader, required, path)
        out = []
        for row in reader:
            year = (row.get("year") or "").strip()
            out.append(VolumeMetadata(
                volume_id=row["volume_id"],
                title=row.get("title") or "",
                author=row.get("author") or "",
                language=row.get("language") or "",
                year=int(float(year)) if year else None,
                is_fiction=_parse_flag(row.get("is_fiction")),
            ))
    return out


def read_corpus(corpus_dir=None, manifest=None) -> list[tuple[str, str]]:
    """(volume_id, text) pairs from a directory of .txt files or a volume_id,path CSV.

    Directory volumes are ordered by filename; manifest volumes keep row order.
    """
    if (corpus_dir is None) == (manifest is None):
        raise ValueError("give exactly one of corpus_dir or manifest")
    if corpus_dir is not None:
        files = sorted(p for p in Path(corpus_dir).iterdir() if p.is_file() and not p.name.startswith("."))
        return [(p.stem, p.read_text(encoding="utf-8", errors="replace")) for p in files]
    base = Path(manifest).parent
    with open(manifest, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        _require_header(reader, ("volume_id", "path"), manifest)
        rows = list(reader)
    out = []
    for row in rows:
        p = Path(row["path"])
        if not p.is_absolute():
            p = base / p
        out.append((row["volume_id"], p.read_text(encoding="utf-8", errors="replace")))
    return out


def _cell(value) -> object:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return value


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence | Mapping]) -> None:
    """Write rows (sequences or mappings keyed by header); None becomes an empty cell."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            if isinstance(row, Mapping):
                row = [row.get(h) for h in header]
            writer.writerow([_cell(v) for v in row])


def read_csv(path) -> list[dict[str, str]]:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))
