"""Monthly CPI series and inflation adjustment to Jan-2018 dollars."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

from .errors import MissingCpiMonth, SchemaMismatch

REFERENCE_MONTH = (2018, 1)


@dataclass
class CpiSeries:
    values: dict[tuple[int, int], float] = field(default_factory=dict)

    def __post_init__(self):
        for key, v in self.values.items():
            if v <= 0:
                raise ValueError(f"CPI value for {key} must be positive, got {v}")

    def get(self, year: int, month: int) -> float:
        try:
            return self.values[(year, month)]
        except KeyError:
            raise MissingCpiMonth(f"CPI series lacks {year:04d}-{month:02d}") from None


def load_cpi(path: str | Path) -> CpiSeries:
    """Two-column delimited text: YYYY-MM, index value. Header optional."""
    values: dict[tuple[int, int], float] = {}
    with Path(path).open(newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or row[0].strip().startswith("#"):
                continue
            if len(row) != 2:
                raise SchemaMismatch(f"{path}:{lineno}: expected 2 columns, got {len(row)}")
            key = row[0].strip()
            if lineno == 1 and not key[:1].isdigit():
                continue  # header line
            try:
                year, month = key.split("-")
                values[(int(year), int(month))] = float(row[1])
            except ValueError as exc:
                raise SchemaMismatch(f"{path}:{lineno}: cannot parse {row!r}") from exc
    return CpiSeries(values=values)


def adjust_inflation(amount_usd: float, event_month: tuple[int, int], cpi: CpiSeries) -> float:
    """Rescale dollars from the event month to Jan-2018 dollars."""
    if amount_usd < 0:
        raise ValueError(f"amount must be nonnegative, got {amount_usd}")
    ref = cpi.get(*REFERENCE_MONTH)
    at_event = cpi.get(*event_month)
    return amount_usd * ref / at_event
