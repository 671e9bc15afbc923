"""Brute-force reference implementations used to check the analytics engine.

Everything here is written independently of wattson.analytics: plain csv
parsing and explicit loops, so the production code is checked against a
second implementation rather than against itself.
"""

from __future__ import annotations

import csv
import math
from datetime import datetime
from pathlib import Path

SOLAR = "solar_generation"


def load(csv_path: Path) -> tuple[list[datetime], dict[str, list[float]]]:
    timestamps: list[datetime] = []
    series: dict[str, list[float]] = {}
    with csv_path.open(encoding="utf-8", newline="") as handle:
        reader = csv.DictReader(handle)
        names = [n for n in (reader.fieldnames or []) if n != "timestamp"]
        for name in names:
            series[name] = []
        for row in reader:
            timestamps.append(datetime.fromisoformat(row["timestamp"]))
            for name in names:
                series[name].append(float(row[name]))
    return timestamps, series


def tracked(series: dict[str, list[float]]) -> list[str]:
    return [name for name in series if name != SOLAR]


def home_series(series: dict[str, list[float]]) -> list[float]:
    names = tracked(series)
    length = len(next(iter(series.values())))
    return [sum(series[n][i] for n in names) for i in range(length)]


def in_range(timestamps, start=None, end=None) -> list[int]:
    out = []
    for i, stamp in enumerate(timestamps):
        if start is not None and stamp < start:
            continue
        if end is not None and stamp >= end:
            continue
        out.append(i)
    return out


def hourly_profile(values, timestamps, indices) -> list[float | None]:
    sums = [0.0] * 24
    counts = [0] * 24
    for i in indices:
        sums[timestamps[i].hour] += values[i]
        counts[timestamps[i].hour] += 1
    return [sums[h] / counts[h] if counts[h] else None for h in range(24)]


def daily_totals(values, timestamps, indices) -> dict[str, float]:
    out: dict[str, float] = {}
    for i in indices:
        key = timestamps[i].date().isoformat()
        out[key] = out.get(key, 0.0) + values[i]
    return out


def population_stats(values) -> tuple[float, float]:
    mean = sum(values) / len(values)
    sigma = math.sqrt(sum((v - mean) ** 2 for v in values) / len(values))
    return mean, sigma


def rolling_mean(values, window) -> list[float | None]:
    out: list[float | None] = []
    for i in range(len(values)):
        if i + 1 < window:
            out.append(None)
        else:
            out.append(sum(values[i + 1 - window : i + 1]) / window)
    return out


def slope(points) -> float:
    n = len(points)
    if n < 2:
        return 0.0
    mean_x = (n - 1) / 2
    mean_y = sum(points) / n
    num = sum((i - mean_x) * (points[i] - mean_y) for i in range(n))
    den = sum((i - mean_x) ** 2 for i in range(n))
    return num / den


def run_lengths(values, threshold) -> list[int]:
    events = []
    current = 0
    for value in values:
        if value > threshold:
            current += 1
        elif current:
            events.append(current)
            current = 0
    if current:
        events.append(current)
    return events


def resolve_rate(rate_doc: dict, stamp: datetime) -> float:
    if rate_doc["type"] == "flat":
        return rate_doc["rate_per_kwh"]
    weekend = stamp.weekday() >= 5
    matched = []
    for period in rate_doc["periods"]:
        day_class = period.get("day_class", "all")
        if day_class == "weekday" and weekend:
            continue
        if day_class == "weekend" and not weekend:
            continue
        if period["start_hour"] <= stamp.hour < period["end_hour"]:
            matched.append(period)
    assert len(matched) <= 1, f"overlapping periods at {stamp}"
    if matched:
        return matched[0]["rate_per_kwh"]
    return rate_doc["default_rate_per_kwh"]
