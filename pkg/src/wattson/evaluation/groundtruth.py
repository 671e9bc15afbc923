"""Independent ground-truth quantities for claim verification.

Deliberately does NOT import the analytics or device modules: everything
here is a second, brute-force implementation over the raw workspace
files, so verified claims are checked against an oracle rather than
against the system under test.
"""

from __future__ import annotations

import csv
import json
import math
from datetime import datetime
from pathlib import Path

SHIFTABLE_FRACTION = 0.3

# Bundled rebate program amounts (USD), as stated in the corpus documents.
REBATE_AMOUNTS = {
    "rebate_heat_pump_usd": 1000.0,
    "rebate_heat_pump_cold_climate_usd": 1500.0,
    "rebate_hpwh_usd": 500.0,
    "rebate_smart_thermostat_usd": 75.0,
    "rebate_weatherization_max_usd": 1200.0,
    "rebate_ev_charger_usd": 250.0,
    "rebate_ev_charger_managed_usd": 500.0,
}


def compute_ground_truth(data_dir: str | Path, home_config: str | Path | None = None) -> dict[str, float]:
    """Brute-force pass over the energy CSV, rate files, and home config."""
    directory = Path(data_dir)
    truth: dict[str, float] = dict(REBATE_AMOUNTS)

    csv_files = sorted(directory.glob("*.csv"))
    if csv_files:
        truth.update(_energy_truth(csv_files[0], directory))
    if home_config is not None:
        truth.update(_home_truth(Path(home_config)))
    return truth


def _energy_truth(csv_path: Path, directory: Path) -> dict[str, float]:
    timestamps: list[datetime] = []
    columns: dict[str, list[float]] = {}
    with csv_path.open(encoding="utf-8", newline="") as handle:
        reader = csv.DictReader(handle)
        names = [n for n in (reader.fieldnames or []) if n != "timestamp"]
        for name in names:
            columns[name] = []
        for row in reader:
            timestamps.append(datetime.fromisoformat(row["timestamp"]))
            for name in names:
                columns[name].append(float(row[name]))

    tracked = [n for n in columns if n != "solar_generation"]
    totals = {name: sum(columns[name]) for name in tracked}
    home_total = sum(totals.values())
    top_name = max(tracked, key=lambda n: totals[n])

    truth: dict[str, float] = {"home_total_kwh": home_total}
    for name in tracked:
        truth[f"{name}_total_kwh"] = totals[name]
    truth["appliance_top_total_kwh"] = totals[top_name]
    if home_total > 0:
        truth["appliance_top_share_pct"] = totals[top_name] / home_total * 100.0

    # daily totals and weekday/weekend means
    daily: dict[str, float] = {}
    for i, stamp in enumerate(timestamps):
        key = stamp.date().isoformat()
        daily[key] = daily.get(key, 0.0) + sum(columns[n][i] for n in tracked)
    values = list(daily.values())
    truth["daily_max_kwh"] = max(values)
    truth["daily_min_kwh"] = min(values)
    weekday = [total for key, total in daily.items() if datetime.fromisoformat(key).weekday() < 5]
    weekend = [total for key, total in daily.items() if datetime.fromisoformat(key).weekday() >= 5]
    if weekday:
        truth["weekday_mean_daily_kwh"] = sum(weekday) / len(weekday)
    if weekend:
        truth["weekend_mean_daily_kwh"] = sum(weekend) / len(weekend)

    # coefficient of variation per appliance (population sigma)
    for name in tracked:
        series = columns[name]
        mean = sum(series) / len(series)
        if mean > 0:
            sigma = math.sqrt(sum((v - mean) ** 2 for v in series) / len(series))
            truth[f"{name}_cv"] = sigma / mean

    # rate-dependent quantities
    tou = _load_rate(directory, "tou")
    flat = _load_rate(directory, "flat")
    if flat is not None:
        truth["flat_rate_usd"] = flat["rate_per_kwh"]
        truth["flat_total_cost_usd"] = home_total * flat["rate_per_kwh"]
    if tou is not None:
        rates = [p["rate_per_kwh"] for p in tou["periods"]] + [tou["default_rate_per_kwh"]]
        peak_rate = max(rates)
        cheapest = min(rates)
        truth["peak_rate_usd"] = peak_rate
        truth["cheapest_rate_usd"] = cheapest
        truth["default_rate_usd"] = tou["default_rate_per_kwh"]
        for period in tou["periods"]:
            truth[f"rate_{period['label']}_usd"] = period["rate_per_kwh"]
        total_cost = 0.0
        hvac_cost = 0.0
        peak_kwh = 0.0
        for i, stamp in enumerate(timestamps):
            rate = _resolve(tou, stamp)
            interval_kwh = sum(columns[n][i] for n in tracked)
            total_cost += interval_kwh * rate
            if "hvac" in columns:
                hvac_cost += columns["hvac"][i] * rate
            if rate == peak_rate:
                peak_kwh += interval_kwh
        truth["tou_total_cost_usd"] = total_cost
        truth["peak_window_kwh"] = peak_kwh
        savings = SHIFTABLE_FRACTION * peak_kwh * (peak_rate - cheapest)
        truth["peak_shift_savings_usd"] = savings
        truth["peak_shift_savings_monthly_usd"] = savings / 3.0  # 90-day dataset
        if "hvac" in columns:
            truth["hvac_tou_cost_usd"] = hvac_cost
            truth["hvac_fifth_cost_usd"] = hvac_cost * 0.2
    return truth


def _load_rate(directory: Path, kind: str) -> dict | None:
    for path in sorted(directory.glob("*.json")):
        try:
            document = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError:
            continue
        if isinstance(document, dict) and document.get("type") == kind:
            return document
    return None


def _resolve(tou: dict, stamp: datetime) -> float:
    is_weekend = stamp.weekday() >= 5
    for period in tou["periods"]:
        day_class = period.get("day_class", "all")
        if day_class == "weekday" and is_weekend:
            continue
        if day_class == "weekend" and not is_weekend:
            continue
        if period["start_hour"] <= stamp.hour < period["end_hour"]:
            return period["rate_per_kwh"]
    return tou["default_rate_per_kwh"]


def _home_truth(config_path: Path) -> dict[str, float]:
    truth: dict[str, float] = {}
    document = json.loads(config_path.read_text(encoding="utf-8"))
    for device in document.get("devices", []):
        device_id = device.get("device_id", "")
        truth[f"{device_id}_draw_w"] = float(device.get("draw_watts", 0.0))
        for key, setting in (device.get("settings") or {}).items():
            truth[f"{device_id}_{key}_min"] = float(setting["min"])
            truth[f"{device_id}_{key}_max"] = float(setting["max"])
    return truth
