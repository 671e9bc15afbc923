"""Deterministic synthetic household: 90 days of hourly appliance data.

Every profile is a documented closed form of the day index ``d`` (0-89),
hour ``h`` (0-23), and weekend flag, so a second, independent
implementation of the same formulas can serve as an oracle. No RNG is
involved; values are rounded to 4 decimals when written to CSV.

Profiles (kWh per hour):

* hvac            0.25 + 1.7 * sin(pi*(h-10)/12) for 10 <= h < 22 (else base only),
                  scaled by (1 + 0.25*sin(2*pi*d/90)) and 1.15 on weekends
* water_heater    1.3 at hours {6,7} weekdays / {8,9} weekends;
                  0.9 at hours {19,20}; 0.05 otherwise
* refrigerator    0.12, plus 0.03 defrost bump when h % 6 == 0
* ev_charger      7.2 at hours {1,2,3} on even days, else 0
* pool_pump       1.1 for 10 <= h < 16, else 0
* solar_generation 3.4 * sin(pi*(h-6)/12) for 6 <= h <= 18, else 0;
                  scaled by 0.35 on cloudy days (d % 7 == 3)
"""

from __future__ import annotations

import csv
import math
from datetime import datetime, timedelta
from pathlib import Path

START = datetime(2025, 3, 1, 0, 0)
DAYS = 90
HOURS = DAYS * 24
APPLIANCES = ("hvac", "water_heater", "refrigerator", "ev_charger", "pool_pump")
SOLAR = "solar_generation"
COLUMNS = APPLIANCES + (SOLAR,)
DECIMALS = 4


def hvac_kwh(d: int, h: int, weekend: bool) -> float:
    base = 0.25
    afternoon = math.sin(math.pi * (h - 10) / 12) if 10 <= h < 22 else 0.0
    seasonal = 1.0 + 0.25 * math.sin(2 * math.pi * d / 90)
    weekend_factor = 1.15 if weekend else 1.0
    return base + 1.7 * afternoon * seasonal * weekend_factor


def water_heater_kwh(d: int, h: int, weekend: bool) -> float:
    morning = (8, 9) if weekend else (6, 7)
    if h in morning:
        return 1.3
    if h in (19, 20):
        return 0.9
    return 0.05


def refrigerator_kwh(d: int, h: int, weekend: bool) -> float:
    return 0.12 + (0.03 if h % 6 == 0 else 0.0)


def ev_charger_kwh(d: int, h: int, weekend: bool) -> float:
    return 7.2 if d % 2 == 0 and h in (1, 2, 3) else 0.0


def pool_pump_kwh(d: int, h: int, weekend: bool) -> float:
    return 1.1 if 10 <= h < 16 else 0.0


def solar_kwh(d: int, h: int, weekend: bool) -> float:
    if not 6 <= h <= 18:
        return 0.0
    output = 3.4 * math.sin(math.pi * (h - 6) / 12)
    if d % 7 == 3:
        output *= 0.35
    return output


PROFILES = {
    "hvac": hvac_kwh,
    "water_heater": water_heater_kwh,
    "refrigerator": refrigerator_kwh,
    "ev_charger": ev_charger_kwh,
    "pool_pump": pool_pump_kwh,
    SOLAR: solar_kwh,
}


def sample(column: str, d: int, h: int) -> float:
    """One rounded sample, exactly as written to the CSV."""
    stamp = START + timedelta(days=d)
    weekend = stamp.weekday() >= 5
    return round(PROFILES[column](d, h, weekend), DECIMALS)


def write_household_csv(path: str | Path) -> dict:
    """Write the 90-day household CSV and return its manifest."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    totals = {column: 0.0 for column in COLUMNS}
    with target.open("w", encoding="utf-8", newline="\n") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(("timestamp",) + COLUMNS)
        for index in range(HOURS):
            stamp = START + timedelta(hours=index)
            d, h = index // 24, index % 24
            row = [stamp.isoformat()]
            for column in COLUMNS:
                value = sample(column, d, h)
                totals[column] += value
                row.append(f"{value:.{DECIMALS}f}")
            writer.writerow(row)
    return manifest(totals)


def manifest(totals: dict[str, float] | None = None) -> dict:
    """Expected loader output for the generated CSV."""
    if totals is None:
        totals = {
            column: sum(sample(column, i // 24, i % 24) for i in range(HOURS))
            for column in COLUMNS
        }
    return {
        "start": START.isoformat(),
        "samples": HOURS,
        "interval_hours": 1.0,
        "appliances": list(COLUMNS),
        "tracked_appliances": list(APPLIANCES),
        "has_solar": True,
        "total_kwh": {column: round(totals[column], DECIMALS) for column in COLUMNS},
    }
