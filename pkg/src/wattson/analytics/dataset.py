"""Appliance-level interval energy datasets and the CSV loader.

CSV schema: header ``timestamp,<appliance>[,<appliance>...]``, ISO-8601
local timestamps at uniform spacing, cells are kWh consumed in the
interval ending at the timestamp. A column named ``solar_generation`` is
reserved for solar output and excluded from consumption statistics.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from datetime import datetime, timedelta
from pathlib import Path

from wattson.analytics.errors import EmptyRange, ParseError, UnknownAppliance

SOLAR_SERIES = "solar_generation"


@dataclass(frozen=True)
class TimeRange:
    """Half-open interval [start, end)."""

    start: datetime
    end: datetime

    def __post_init__(self) -> None:
        if self.start >= self.end:
            raise ValueError(f"time range start {self.start} must be before end {self.end}")

    @classmethod
    def parse(cls, payload: dict) -> "TimeRange":
        return cls(
            start=datetime.fromisoformat(str(payload["start"])),
            end=datetime.fromisoformat(str(payload["end"])),
        )

    def contains(self, instant: datetime) -> bool:
        return self.start <= instant < self.end


@dataclass
class EnergyDataset:
    appliances: list[str]  # column order, including solar when present
    timestamps: list[datetime]
    series: dict[str, list[float]]
    interval: timedelta

    @property
    def date_range(self) -> tuple[datetime, datetime]:
        return self.timestamps[0], self.timestamps[-1]

    @property
    def tracked_appliances(self) -> list[str]:
        return [a for a in self.appliances if a != SOLAR_SERIES]

    @property
    def has_solar(self) -> bool:
        return SOLAR_SERIES in self.series

    def indices_in(self, time_range: TimeRange | None) -> range:
        """Sample indices covered by the range (all samples when None)."""
        if time_range is None:
            return range(len(self.timestamps))
        lo = 0
        while lo < len(self.timestamps) and self.timestamps[lo] < time_range.start:
            lo += 1
        hi = lo
        while hi < len(self.timestamps) and self.timestamps[hi] < time_range.end:
            hi += 1
        if lo == hi:
            raise EmptyRange(
                f"no samples in [{time_range.start.isoformat()}, {time_range.end.isoformat()})"
            )
        return range(lo, hi)

    def require_appliance(self, name: str) -> list[float]:
        if name not in self.series:
            raise UnknownAppliance(
                f"unknown appliance {name!r}; dataset has {sorted(self.series)}"
            )
        return self.series[name]

    def whole_home(self, index: int) -> float:
        """Consumption across all tracked appliances at one sample (kWh)."""
        return sum(self.series[a][index] for a in self.tracked_appliances)

    def metadata(self) -> dict:
        first, last = self.date_range
        return {
            "appliances": list(self.appliances),
            "tracked_appliances": self.tracked_appliances,
            "has_solar": self.has_solar,
            "samples": len(self.timestamps),
            "interval_hours": self.interval.total_seconds() / 3600.0,
            "date_range": {"start": first.isoformat(), "end": last.isoformat()},
        }


def load_energy_csv(path: str | Path) -> EnergyDataset:
    """Parse and validate an energy CSV; row numbers are 1-based incl. header."""
    csv_path = Path(path)
    if not csv_path.is_file():
        raise ParseError(f"energy data file not found: {csv_path}")
    with csv_path.open(encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{csv_path.name}: empty file") from None
        if not header or header[0] != "timestamp":
            raise ParseError(f"{csv_path.name}: first header column must be 'timestamp'")
        appliances = header[1:]
        if not appliances:
            raise ParseError(f"{csv_path.name}: no appliance columns")
        if len(set(appliances)) != len(appliances):
            raise ParseError(f"{csv_path.name}: duplicate appliance columns")

        timestamps: list[datetime] = []
        series: dict[str, list[float]] = {a: [] for a in appliances}
        for row_number, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ParseError(f"{csv_path.name} row {row_number}: expected {len(header)} cells, got {len(row)}")
            try:
                stamp = datetime.fromisoformat(row[0])
            except ValueError:
                raise ParseError(f"{csv_path.name} row {row_number}: bad timestamp {row[0]!r}") from None
            timestamps.append(stamp)
            for name, cell in zip(appliances, row[1:]):
                try:
                    value = float(cell)
                except ValueError:
                    raise ParseError(f"{csv_path.name} row {row_number}: bad kWh value {cell!r}") from None
                if value < 0:
                    raise ParseError(f"{csv_path.name} row {row_number}: negative kWh {value} for {name}")
                series[name].append(value)

    if len(timestamps) < 2:
        raise ParseError(f"{csv_path.name}: need at least 2 rows to detect the sampling interval")
    interval = timestamps[1] - timestamps[0]
    if interval <= timedelta(0):
        raise ParseError(f"{csv_path.name} row 3: timestamps must be strictly increasing")
    for index in range(1, len(timestamps)):
        step = timestamps[index] - timestamps[index - 1]
        if step != interval:
            raise ParseError(
                f"{csv_path.name} row {index + 2}: non-uniform timestamp spacing "
                f"({step} after {interval})"
            )
    return EnergyDataset(
        appliances=appliances,
        timestamps=timestamps,
        series=series,
        interval=interval,
    )
