"""
Record sources: line-JSON or CSV files and open text streams
"""

from __future__ import annotations

import csv
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, TextIO

from pydantic import ValidationError as PydanticValidationError

from app.core.exceptions import InputFormatError, SourceReadError, ValidationError
from app.core.logging import get_logger
from app.models.record import AisRecord
from app.schemas.record import RecordLine

logger = get_logger(__name__)

MALFORMED_LIMIT = 0.5
STREAM_GAP_S = 400


@dataclass
class ReadStats:
    lines: int = 0
    records: int = 0
    malformed: int = 0
    stream_gaps: int = 0
    largest_gap_s: int = 0


class RecordReader:
    """
    Iterate AisRecords from a source in file order

    Malformed lines are counted and skipped. Once the source is exhausted,
    more than half of the non-blank lines being malformed is an error.
    """

    def __init__(self, source: Path | str | TextIO, gap_threshold_s: int = STREAM_GAP_S) -> None:
        self.source = source
        self.gap_threshold_s = gap_threshold_s
        self.stats = ReadStats()
        self._last_time: int | None = None

    def __iter__(self) -> Iterator[AisRecord]:
        if isinstance(self.source, (str, Path)):
            try:
                with open(self.source, encoding="utf-8", newline="") as handle:
                    yield from self._read(handle)
            except OSError as exc:
                raise SourceReadError(f"cannot read {self.source}: {exc}") from exc
        else:
            yield from self._read(self.source)

        if self.stats.lines and self.stats.malformed / self.stats.lines > MALFORMED_LIMIT:
            raise InputFormatError(
                f"{self.stats.malformed} of {self.stats.lines} lines malformed in {self._name}"
            )
        logger.info(
            "records_read",
            source=self._name,
            records=self.stats.records,
            malformed=self.stats.malformed,
            stream_gaps=self.stats.stream_gaps,
            largest_gap_s=self.stats.largest_gap_s,
        )

    @property
    def _name(self) -> str:
        return str(self.source) if isinstance(self.source, (str, Path)) else "<stream>"

    def _read(self, handle: TextIO) -> Iterator[AisRecord]:
        lines = (line for line in handle if line.strip())
        first = next(lines, None)
        if first is None:
            return
        if first.lstrip().startswith("{"):
            for line in _chain(first, lines):
                yield from self._accept(self._parse_json(line))
        else:
            header = next(csv.reader([first]))
            for row in csv.DictReader(lines, fieldnames=[name.strip() for name in header]):
                yield from self._accept(self._parse_csv(row))

    def _accept(self, record: AisRecord | None) -> Iterator[AisRecord]:
        self.stats.lines += 1
        if record is None:
            self.stats.malformed += 1
            return
        self.stats.records += 1
        self._watch_gap(record.time)
        yield record

    def _watch_gap(self, time: int) -> None:
        if self._last_time is not None and time > self._last_time:
            gap = time - self._last_time
            if gap > self.stats.largest_gap_s:
                self.stats.largest_gap_s = gap
            if gap > self.gap_threshold_s:
                self.stats.stream_gaps += 1
                logger.warning("stream_gap", start=self._last_time, end=time, gap_s=gap)
        if self._last_time is None or time > self._last_time:
            self._last_time = time

    @staticmethod
    def _parse_json(line: str) -> AisRecord | None:
        try:
            return RecordLine.model_validate_json(line).to_record()
        except (PydanticValidationError, ValidationError):
            return None

    @staticmethod
    def _parse_csv(row: dict[str | None, str | None]) -> AisRecord | None:
        if None in row:
            return None
        values = {key: value for key, value in row.items() if value not in (None, "")}
        try:
            return RecordLine.model_validate(values).to_record()
        except (PydanticValidationError, ValidationError):
            return None


def _chain(first: str, rest: Iterator[str]) -> Iterator[str]:
    yield first
    yield from rest


def read_records(source: Path | str | TextIO) -> RecordReader:
    """
    Open a record source

    Args:
        source: path to a .jsonl/.csv file, or an open text stream

    Raises:
        SourceReadError: the path does not exist
    """
    if isinstance(source, (str, Path)) and not Path(source).is_file():
        raise SourceReadError(f"record source not found: {source}")
    return RecordReader(source)


def group_by_vessel(records: Iterable[AisRecord]) -> tuple[dict[int, list[AisRecord]], int]:
    """
    Split records per MMSI, time-sorted, without exact replays

    Returns:
        (records per MMSI in ascending MMSI order, number of duplicates dropped)
    """
    grouped: dict[int, list[AisRecord]] = defaultdict(list)
    seen: set[tuple] = set()
    duplicates = 0
    for record in records:
        key = record.identity
        if key in seen:
            duplicates += 1
            continue
        seen.add(key)
        grouped[record.mmsi].append(record)
    for vessel_records in grouped.values():
        vessel_records.sort(key=lambda r: r.time)
    if duplicates:
        logger.info("replayed_records_dropped", duplicates=duplicates)
    return {mmsi: grouped[mmsi] for mmsi in sorted(grouped)}, duplicates


def read_gross_tonnage(path: Path | str) -> dict[int, float]:
    """
    Load the MMSI to gross tonnage lookup (CSV with `mmsi,gross_tonnage` header)

    Raises:
        SourceReadError: file missing or unreadable
        InputFormatError: header lacks the expected columns
    """
    try:
        with open(path, encoding="utf-8", newline="") as handle:
            reader = csv.DictReader(handle)
            if not reader.fieldnames or not {"mmsi", "gross_tonnage"} <= set(reader.fieldnames):
                raise InputFormatError(f"{path} needs mmsi,gross_tonnage columns")
            lookup: dict[int, float] = {}
            skipped = 0
            for row in reader:
                try:
                    lookup[int(row["mmsi"])] = float(row["gross_tonnage"])
                except (TypeError, ValueError):
                    skipped += 1
    except OSError as exc:
        raise SourceReadError(f"cannot read {path}: {exc}") from exc
    logger.info("gross_tonnage_loaded", path=str(path), vessels=len(lookup), skipped=skipped)
    return lookup
