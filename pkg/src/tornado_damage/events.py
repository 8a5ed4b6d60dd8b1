"""Event file ingestion.

Events arrive as delimited text with header::

    event_id,begin_lat,begin_lon,begin_datetime,duration_s,length,width,damage_usd,narrative

begin_datetime is ISO 8601 (YYYY-MM-DDTHH:MM[:SS]). Length and width stay in
their source units; damage is as-reported dollars. Malformed rows go to a
reject report instead of being silently dropped.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from datetime import date, datetime
from pathlib import Path

from .errors import EmptyFile, SchemaMismatch

EVENT_COLUMNS = [
    "event_id", "begin_lat", "begin_lon", "begin_datetime",
    "duration_s", "length", "width", "damage_usd", "narrative",
]

DEFAULT_STUDY_WINDOW = (date(1997, 1, 1), date(2018, 12, 31))


@dataclass(frozen=True)
class TornadoEvent:
    event_id: str
    begin_lat: float
    begin_lon: float
    begin_time: datetime
    duration_s: float
    length: float
    width: float
    damage_usd: float
    narrative: str

    @property
    def year(self) -> int:
        return self.begin_time.year

    @property
    def day_of_year(self) -> int:
        return self.begin_time.timetuple().tm_yday

    @property
    def minutes_since_midnight(self) -> float:
        return self.begin_time.hour * 60 + self.begin_time.minute + self.begin_time.second / 60.0


@dataclass(frozen=True)
class RejectedRow:
    line: int
    event_id: str
    reason: str


def _validate(row: dict[str, str], study_window: tuple[date, date]) -> TornadoEvent | str:
    try:
        lat = float(row["begin_lat"])
        lon = float(row["begin_lon"])
        duration = float(row["duration_s"])
        length = float(row["length"])
        width = float(row["width"])
        damage = float(row["damage_usd"])
    except ValueError as exc:
        return f"non-numeric field: {exc}"
    try:
        begin = datetime.fromisoformat(row["begin_datetime"])
    except ValueError:
        return f"bad datetime {row['begin_datetime']!r}"
    if not -90 <= lat <= 90:
        return "lat out of range"
    if not -180 <= lon <= 180:
        return "lon out of range"
    if damage < 0:
        return "negative damage"
    if duration < 0:
        return "negative duration"
    if length < 0 or width < 0:
        return "negative path dimension"
    if not study_window[0] <= begin.date() <= study_window[1]:
        return f"date outside study window {study_window[0]}..{study_window[1]}"
    return TornadoEvent(
        event_id=row["event_id"],
        begin_lat=lat,
        begin_lon=lon,
        begin_time=begin,
        duration_s=duration,
        length=length,
        width=width,
        damage_usd=damage,
        narrative=row["narrative"],
    )


def ingest_events(
    path: str | Path,
    study_window: tuple[date, date] = DEFAULT_STUDY_WINDOW,
) -> tuple[list[TornadoEvent], list[RejectedRow]]:
    """Read and validate an events file. Returns (events, rejects)."""
    path = Path(path)
    events: list[TornadoEvent] = []
    rejects: list[RejectedRow] = []
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise EmptyFile(f"{path} is empty")
        if list(reader.fieldnames) != EVENT_COLUMNS:
            raise SchemaMismatch(
                f"{path}: header {reader.fieldnames} does not match {EVENT_COLUMNS}"
            )
        for lineno, row in enumerate(reader, start=2):
            if any(row.get(c) is None for c in EVENT_COLUMNS):
                rejects.append(RejectedRow(lineno, row.get("event_id") or "?", "wrong column count"))
                continue
            result = _validate(row, study_window)
            if isinstance(result, str):
                rejects.append(RejectedRow(lineno, row.get("event_id") or "?", result))
            else:
                events.append(result)
    if not events and not rejects:
        raise EmptyFile(f"{path} has a header but no data rows")
    return events, rejects


def write_reject_report(rejects: list[RejectedRow], path: str | Path) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["line", "event_id", "reason"])
        for r in rejects:
            writer.writerow([r.line, r.event_id, r.reason])
