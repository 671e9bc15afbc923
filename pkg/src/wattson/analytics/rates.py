"""Utility rate schedules: flat or time-of-use with day-class periods.

A TOU schedule resolves every (hour, day-class) slot to exactly one rate:
the single matching period, or the default rate when no period covers the
hour. Periods with day_class "all" apply to both weekdays and weekends,
so overlap checking happens per effective day class.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path

from wattson.analytics.errors import OverlappingPeriods, ParseError

DAY_CLASSES = ("weekday", "weekend", "all")


@dataclass(frozen=True)
class TouPeriod:
    label: str
    day_class: str
    start_hour: int
    end_hour: int  # exclusive
    rate_per_kwh: float

    def __post_init__(self) -> None:
        if self.day_class not in DAY_CLASSES:
            raise ParseError(f"period {self.label!r}: day_class must be one of {DAY_CLASSES}")
        if not 0 <= self.start_hour < self.end_hour <= 24:
            raise ParseError(
                f"period {self.label!r}: need 0 <= start_hour < end_hour <= 24, "
                f"got [{self.start_hour}, {self.end_hour})"
            )
        if self.rate_per_kwh < 0:
            raise ParseError(f"period {self.label!r}: rate must be >= 0")

    def covers(self, hour: int, is_weekend: bool) -> bool:
        if self.day_class == "weekday" and is_weekend:
            return False
        if self.day_class == "weekend" and not is_weekend:
            return False
        return self.start_hour <= hour < self.end_hour


@dataclass(frozen=True)
class RateSchedule:
    name: str
    type: str  # flat | tou
    flat_rate: float | None = None
    periods: tuple[TouPeriod, ...] = ()
    default_rate: float | None = None

    def __post_init__(self) -> None:
        if self.type == "flat":
            if self.flat_rate is None or self.flat_rate < 0:
                raise ParseError(f"rate {self.name!r}: flat schedules need rate_per_kwh >= 0")
        elif self.type == "tou":
            if self.default_rate is None or self.default_rate < 0:
                raise ParseError(f"rate {self.name!r}: TOU schedules need default_rate_per_kwh >= 0")
            if not self.periods:
                raise ParseError(f"rate {self.name!r}: TOU schedules need at least one period")
            self._check_overlaps()
        else:
            raise ParseError(f"rate {self.name!r}: type must be 'flat' or 'tou'")

    def _check_overlaps(self) -> None:
        for concrete in ("weekday", "weekend"):
            active = [p for p in self.periods if p.day_class in (concrete, "all")]
            for hour in range(24):
                matches = [p for p in active if p.start_hour <= hour < p.end_hour]
                if len(matches) > 1:
                    labels = [p.label for p in matches]
                    raise OverlappingPeriods(
                        f"rate {self.name!r}: periods {labels} overlap at {concrete} hour {hour}"
                    )

    def resolve(self, instant: datetime) -> tuple[float, str]:
        """Rate and period label applying to the given instant."""
        return self.resolve_slot(instant.hour, instant.weekday() >= 5)

    def resolve_slot(self, hour: int, is_weekend: bool) -> tuple[float, str]:
        if self.type == "flat":
            assert self.flat_rate is not None
            return self.flat_rate, "flat"
        for period in self.periods:
            if period.covers(hour, is_weekend):
                return period.rate_per_kwh, period.label
        assert self.default_rate is not None
        return self.default_rate, "default"

    def all_rates(self) -> list[float]:
        if self.type == "flat":
            assert self.flat_rate is not None
            return [self.flat_rate]
        assert self.default_rate is not None
        return [p.rate_per_kwh for p in self.periods] + [self.default_rate]

    def to_payload(self) -> dict:
        if self.type == "flat":
            return {"name": self.name, "type": "flat", "rate_per_kwh": self.flat_rate}
        return {
            "name": self.name,
            "type": "tou",
            "periods": [
                {
                    "label": p.label,
                    "day_class": p.day_class,
                    "start_hour": p.start_hour,
                    "end_hour": p.end_hour,
                    "rate_per_kwh": p.rate_per_kwh,
                }
                for p in self.periods
            ],
            "default_rate_per_kwh": self.default_rate,
        }


def parse_rate_schedule(document: dict, name_hint: str = "rate") -> RateSchedule:
    name = str(document.get("name", name_hint))
    rate_type = document.get("type")
    if rate_type == "flat":
        if "rate_per_kwh" not in document:
            raise ParseError(f"rate {name!r}: flat schedule missing rate_per_kwh")
        return RateSchedule(name=name, type="flat", flat_rate=float(document["rate_per_kwh"]))
    if rate_type == "tou":
        raw_periods = document.get("periods")
        if not isinstance(raw_periods, list) or not raw_periods:
            raise ParseError(f"rate {name!r}: TOU schedule needs a nonempty periods list")
        periods = []
        for raw in raw_periods:
            try:
                periods.append(
                    TouPeriod(
                        label=str(raw["label"]),
                        day_class=str(raw.get("day_class", "all")),
                        start_hour=int(raw["start_hour"]),
                        end_hour=int(raw["end_hour"]),
                        rate_per_kwh=float(raw["rate_per_kwh"]),
                    )
                )
            except KeyError as exc:
                raise ParseError(f"rate {name!r}: period missing field {exc}") from None
        if "default_rate_per_kwh" not in document:
            raise ParseError(f"rate {name!r}: TOU schedule missing default_rate_per_kwh")
        return RateSchedule(
            name=name,
            type="tou",
            periods=tuple(periods),
            default_rate=float(document["default_rate_per_kwh"]),
        )
    raise ParseError(f"rate {name!r}: type must be 'flat' or 'tou', got {rate_type!r}")


def load_rate_schedule(path: str | Path) -> RateSchedule:
    rate_path = Path(path)
    if not rate_path.is_file():
        raise ParseError(f"rate file not found: {rate_path}")
    try:
        document = json.loads(rate_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{rate_path.name}: invalid JSON ({exc})") from None
    if not isinstance(document, dict):
        raise ParseError(f"{rate_path.name}: expected a JSON object")
    return parse_rate_schedule(document, name_hint=rate_path.stem)
