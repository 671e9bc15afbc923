"""Session-scoped analytics over a loaded energy dataset.

Every statistic is defined so an independent brute-force pass over the
raw samples reproduces it. Deterministic conventions used throughout:
peak ties break toward the earliest interval, standard deviations are
population sigma, percent deltas are null on zero denominators, and
samples bucket by their own timestamp (hour/day/ISO-week/month).
"""

from __future__ import annotations

import json
import math
from datetime import date, datetime
from pathlib import Path
from typing import Any

from wattson.analytics.dataset import SOLAR_SERIES, EnergyDataset, TimeRange, load_energy_csv
from wattson.analytics.errors import (
    EmptyRange,
    FlatRateNoPeaks,
    InsufficientCoverage,
    MissingDirectory,
    MissingThreshold,
    NoDatasetLoaded,
    NoSolarData,
    ParseError,
    UnknownAppliance,
    WindowTooLarge,
)
from wattson.analytics.rates import RateSchedule, load_rate_schedule

AGGREGATIONS = ("none", "hourly", "daily", "weekly", "monthly")
DEFAULT_ROW_LIMIT = 200
DEFAULT_SHIFTABLE_FRACTION = 0.3
TREND_SLOPE_THRESHOLD = 1e-6  # kWh/interval below which a trend counts as flat
THRESHOLDS_FILENAME = "thresholds.json"


class AnalyticsEngine:
    """Holds one session's dataset plus a digest of findings produced so far."""

    def __init__(self, data_dir: str | Path | None = None, row_limit: int = DEFAULT_ROW_LIMIT):
        self.data_dir = Path(data_dir) if data_dir is not None else None
        self.row_limit = row_limit
        self.dataset: EnergyDataset | None = None
        self._findings: dict[str, str] = {}
        # Session context consumed by the knowledge agent's get_user_context.
        self.last_rate_type: str | None = None
        self.top_consumer: str | None = None

    # ── data loading ────────────────────────────────────────────────────

    def load_energy_data(self, path: str) -> dict:
        resolved = self._resolve(path)
        self.dataset = load_energy_csv(resolved)
        meta = self.dataset.metadata()
        self._record(
            "load_energy_data",
            f"loaded {meta['samples']} samples for {len(meta['tracked_appliances'])} appliances "
            f"({meta['date_range']['start']} to {meta['date_range']['end']})",
        )
        return meta

    def list_available_data(self) -> dict:
        if self.data_dir is None or not self.data_dir.is_dir():
            raise MissingDirectory(f"data directory not found: {self.data_dir}")
        entries = []
        for child in sorted(self.data_dir.iterdir()):
            if not child.is_file():
                continue  # non-recursive by design
            entries.append(
                {"name": child.name, "size_bytes": child.stat().st_size, "kind": _classify(child)}
            )
        return {"directory": str(self.data_dir), "files": entries}

    def get_tracked_appliances(self) -> dict:
        data = self._require_dataset()
        return {"appliances": data.tracked_appliances, "has_solar": data.has_solar}

    # ── consumption and period analysis ─────────────────────────────────

    def analyze_consumption(self, time_range: TimeRange | None = None) -> dict:
        data = self._require_dataset()
        indices = data.indices_in(time_range)
        totals = [data.whole_home(i) for i in indices]
        total = sum(totals)
        peak_offset = max(range(len(totals)), key=lambda i: (totals[i], -i))
        peak_index = indices[peak_offset]
        hourly = _hourly_profile(data, indices)
        daily = _daily_totals(data, indices)
        result = {
            "total_kwh": total,
            "mean_kwh_per_interval": total / len(totals),
            "max_kwh_per_interval": totals[peak_offset],
            "peak_interval": {
                "timestamp": data.timestamps[peak_index].isoformat(),
                "kwh": totals[peak_offset],
            },
            "hourly_profile": hourly,
            "daily_profile": [{"date": d.isoformat(), "kwh": v} for d, v in daily],
            "samples": len(totals),
            "note": "whole-home sum across tracked appliances (solar excluded); peak ties break earliest",
        }
        self._record(
            "analyze_consumption",
            f"total {total:.2f} kWh over {len(totals)} intervals; "
            f"peak {totals[peak_offset]:.2f} kWh at {data.timestamps[peak_index].isoformat()}",
        )
        return result

    def analyze_appliances(self, time_range: TimeRange | None = None) -> dict:
        data = self._require_dataset()
        indices = data.indices_in(time_range)
        totals = {
            name: sum(data.series[name][i] for i in indices) for name in data.tracked_appliances
        }
        grand = sum(totals.values())
        ranking = sorted(totals.items(), key=lambda kv: (-kv[1], kv[0]))
        rows = [
            {
                "appliance": name,
                "total_kwh": value,
                "share_percent": (value / grand * 100.0) if grand > 0 else None,
            }
            for name, value in ranking
        ]
        result = {"ranking": rows, "total_kwh": grand}
        if rows:
            top = rows[0]
            self.top_consumer = top["appliance"]
            self._record(
                "analyze_appliances",
                f"top consumer {top['appliance']} at {top['total_kwh']:.2f} kWh"
                + (f" ({top['share_percent']:.1f}% of total)" if top["share_percent"] is not None else ""),
            )
        return result

    def query_energy_data(
        self,
        time_range: TimeRange | None = None,
        appliances: list[str] | None = None,
        aggregation: str = "none",
    ) -> dict:
        data = self._require_dataset()
        if aggregation not in AGGREGATIONS:
            raise ValueError(f"aggregation must be one of {AGGREGATIONS}")
        names = self._select_appliances(appliances)
        indices = data.indices_in(time_range)
        if aggregation == "none":
            rows = []
            for i in indices:
                if len(rows) >= self.row_limit:
                    break
                row = {"timestamp": data.timestamps[i].isoformat()}
                row.update({name: data.series[name][i] for name in names})
                rows.append(row)
            return {
                "rows": rows,
                "truncated": len(indices) > self.row_limit,
                "row_limit": self.row_limit,
            }
        buckets = _aggregate(data, indices, names, aggregation)
        return {"aggregation": aggregation, "buckets": buckets}

    def compare_energy_periods(self, period_one: TimeRange, period_two: TimeRange) -> dict:
        data = self._require_dataset()
        first = data.indices_in(period_one)
        second = data.indices_in(period_two)
        per_appliance = []
        for name in data.tracked_appliances:
            a = sum(data.series[name][i] for i in first)
            b = sum(data.series[name][i] for i in second)
            per_appliance.append(
                {
                    "appliance": name,
                    "period_one_kwh": a,
                    "period_two_kwh": b,
                    "delta_kwh": b - a,
                    "delta_percent": ((b - a) / a * 100.0) if a > 0 else None,
                }
            )
        total_a = sum(row["period_one_kwh"] for row in per_appliance)
        total_b = sum(row["period_two_kwh"] for row in per_appliance)
        result = {
            "appliances": per_appliance,
            "total": {
                "period_one_kwh": total_a,
                "period_two_kwh": total_b,
                "delta_kwh": total_b - total_a,
                "delta_percent": ((total_b - total_a) / total_a * 100.0) if total_a > 0 else None,
            },
        }
        self._record(
            "compare_energy_periods",
            f"total changed {total_a:.2f} -> {total_b:.2f} kWh ({total_b - total_a:+.2f})",
        )
        return result

    def analyze_energy_period(
        self,
        period: TimeRange,
        aggregation: str = "daily",
        appliances: list[str] | None = None,
    ) -> dict:
        data = self._require_dataset()
        if aggregation not in AGGREGATIONS or aggregation == "none":
            raise ValueError("aggregation must be hourly, daily, weekly, or monthly")
        names = self._select_appliances(appliances)
        indices = data.indices_in(period)
        grouped: dict[str, list[float]] = {}
        order: list[str] = []
        for i in indices:
            key = _bucket_key(data.timestamps[i], aggregation)
            if key not in grouped:
                grouped[key] = []
                order.append(key)
            grouped[key].append(sum(data.series[name][i] for name in names))
        buckets = []
        for key in order:
            values = grouped[key]
            buckets.append(
                {
                    "bucket": key,
                    "total_kwh": sum(values),
                    "mean_kwh": sum(values) / len(values),
                    "min_kwh": min(values),
                    "max_kwh": max(values),
                    "intervals": len(values),
                }
            )
        total = sum(b["total_kwh"] for b in buckets)
        self._record(
            "analyze_energy_period",
            f"{len(buckets)} {aggregation} buckets totaling {total:.2f} kWh",
        )
        return {"aggregation": aggregation, "buckets": buckets, "total_kwh": total}

    # ── pattern and trend analysis ──────────────────────────────────────

    def calculate_rolling_average(self, window: int, appliance: str | None = None) -> dict:
        data = self._require_dataset()
        if appliance is not None:
            values = list(data.require_appliance(appliance))
            label = appliance
        else:
            values = [data.whole_home(i) for i in range(len(data.timestamps))]
            label = "whole_home"
        if window < 1:
            raise ValueError("window must be >= 1")
        if window > len(values):
            raise WindowTooLarge(f"window {window} exceeds series length {len(values)}")
        smoothed: list[float | None] = [None] * (window - 1)
        running = sum(values[:window])
        smoothed.append(running / window)
        for i in range(window, len(values)):
            running += values[i] - values[i - window]
            smoothed.append(running / window)
        slope = _least_squares_slope([v for v in smoothed if v is not None])
        if abs(slope) < TREND_SLOPE_THRESHOLD:
            trend = "flat"
        elif slope > 0:
            trend = "rising"
        else:
            trend = "falling"
        self._record(
            "calculate_rolling_average",
            f"{label} window-{window} trend {trend} (slope {slope:.3e} kWh/interval)",
        )
        return {
            "series": label,
            "window": window,
            "smoothed": [
                {"timestamp": data.timestamps[i].isoformat(), "kwh": smoothed[i]}
                for i in range(len(smoothed))
            ],
            "trend": trend,
            "slope_kwh_per_interval": slope,
        }

    def compare_weekday_weekend(self) -> dict:
        data = self._require_dataset()
        day_totals: dict[date, dict[str, float]] = {}
        for i, stamp in enumerate(data.timestamps):
            bucket = day_totals.setdefault(stamp.date(), {name: 0.0 for name in data.tracked_appliances})
            for name in data.tracked_appliances:
                bucket[name] += data.series[name][i]
        weekday_days = [d for d in day_totals if d.weekday() < 5]
        weekend_days = [d for d in day_totals if d.weekday() >= 5]
        if not weekday_days or not weekend_days:
            raise InsufficientCoverage(
                f"need at least one weekday and one weekend day; got "
                f"{len(weekday_days)} weekday(s), {len(weekend_days)} weekend day(s)"
            )
        per_appliance = []
        for name in data.tracked_appliances:
            wd = sum(day_totals[d][name] for d in weekday_days) / len(weekday_days)
            we = sum(day_totals[d][name] for d in weekend_days) / len(weekend_days)
            per_appliance.append(
                {
                    "appliance": name,
                    "weekday_mean_daily_kwh": wd,
                    "weekend_mean_daily_kwh": we,
                    "difference_percent": ((we - wd) / wd * 100.0) if wd > 0 else None,
                }
            )
        total_wd = sum(row["weekday_mean_daily_kwh"] for row in per_appliance)
        total_we = sum(row["weekend_mean_daily_kwh"] for row in per_appliance)
        result = {
            "weekday_days": len(weekday_days),
            "weekend_days": len(weekend_days),
            "appliances": per_appliance,
            "total": {
                "weekday_mean_daily_kwh": total_wd,
                "weekend_mean_daily_kwh": total_we,
                "difference_percent": ((total_we - total_wd) / total_wd * 100.0) if total_wd > 0 else None,
            },
        }
        self._record(
            "compare_weekday_weekend",
            f"weekday {total_wd:.2f} vs weekend {total_we:.2f} kWh/day",
        )
        return result

    def analyze_peak_hours(
        self,
        rate_name: str | None = None,
        shiftable_fraction: float = DEFAULT_SHIFTABLE_FRACTION,
    ) -> dict:
        data = self._require_dataset()
        if not 0.0 <= shiftable_fraction <= 1.0:
            raise ValueError("shiftable_fraction must lie in [0, 1]")
        schedule = self._load_rate(rate_name)
        if schedule.type != "tou":
            raise FlatRateNoPeaks()
        peak_rate = max(schedule.all_rates())
        cheapest_rate = min(schedule.all_rates())
        peak_kwh = offpeak_kwh = peak_cost = offpeak_cost = 0.0
        for i, stamp in enumerate(data.timestamps):
            kwh = data.whole_home(i)
            rate, _ = schedule.resolve(stamp)
            if rate == peak_rate:
                peak_kwh += kwh
                peak_cost += kwh * rate
            else:
                offpeak_kwh += kwh
                offpeak_cost += kwh * rate
        savings = shiftable_fraction * peak_kwh * (peak_rate - cheapest_rate)
        result = {
            "rate": schedule.name,
            "peak_rate_per_kwh": peak_rate,
            "cheapest_rate_per_kwh": cheapest_rate,
            "peak_kwh": peak_kwh,
            "off_peak_kwh": offpeak_kwh,
            "peak_cost_usd": peak_cost,
            "off_peak_cost_usd": offpeak_cost,
            "shiftable_fraction": shiftable_fraction,
            "estimated_savings_usd": savings,
            "note": (
                "peak windows are the intervals resolving to the schedule's highest rate; "
                f"savings assume shifting {shiftable_fraction:.0%} of peak kWh to the cheapest rate"
            ),
        }
        self._record(
            "analyze_peak_hours",
            f"{peak_kwh:.2f} kWh in peak windows; shifting {shiftable_fraction:.0%} "
            f"saves about ${savings:.2f}",
        )
        return result

    def analyze_usage_frequency(self, appliance: str) -> dict:
        data = self._require_dataset()
        values = data.require_appliance(appliance)
        threshold = self._threshold_for(appliance)
        events: list[tuple[int, int]] = []  # (start index, length)
        run_start: int | None = None
        for i, value in enumerate(values):
            if value > threshold:
                if run_start is None:
                    run_start = i
            elif run_start is not None:
                events.append((run_start, i - run_start))
                run_start = None
        if run_start is not None:
            events.append((run_start, len(values) - run_start))
        days = len({stamp.date() for stamp in data.timestamps})
        histogram = [0] * 24
        for i, value in enumerate(values):
            if value > threshold:
                histogram[data.timestamps[i].hour] += 1
        result = {
            "appliance": appliance,
            "threshold_kwh": threshold,
            "event_count": len(events),
            "events_per_day": len(events) / days,
            "mean_event_intervals": (sum(length for _, length in events) / len(events)) if events else None,
            "on_hours_histogram": histogram,
            "days_covered": days,
        }
        self._record(
            "analyze_usage_frequency",
            f"{appliance}: {len(events)} on-events over {days} days",
        )
        return result

    def analyze_usage_variability(self) -> dict:
        data = self._require_dataset()
        rows = []
        for name in data.tracked_appliances:
            values = data.series[name]
            mean = sum(values) / len(values)
            sigma = math.sqrt(sum((v - mean) ** 2 for v in values) / len(values))
            cv = (sigma / mean) if mean > 0 else None
            rows.append(
                {
                    "appliance": name,
                    "mean_kwh_per_interval": mean,
                    "std_dev_kwh": sigma,
                    "coefficient_of_variation": cv,
                }
            )
        self._record(
            "analyze_usage_variability",
            "variability (population sigma) computed for "
            + ", ".join(r["appliance"] for r in rows),
        )
        return {"appliances": rows, "note": "population sigma; CV null when mean is 0"}

    # ── rates, solar, summary ───────────────────────────────────────────

    def get_utility_rate(self, name: str | None = None) -> dict:
        schedule = self._load_rate(name)
        self.last_rate_type = schedule.type
        self._record(
            "get_utility_rate",
            f"rate {schedule.name} ({schedule.type})",
        )
        return schedule.to_payload()

    def analyze_utility_rate(
        self, rate_name: str | None = None, time_range: TimeRange | None = None
    ) -> dict:
        data = self._require_dataset()
        schedule = self._load_rate(rate_name)
        self.last_rate_type = schedule.type
        indices = data.indices_in(time_range)
        period_kwh: dict[str, float] = {}
        period_cost: dict[str, float] = {}
        appliance_kwh = {name: 0.0 for name in data.tracked_appliances}
        appliance_cost = {name: 0.0 for name in data.tracked_appliances}
        for i in indices:
            stamp = data.timestamps[i]
            rate, label = schedule.resolve(stamp)
            kwh = data.whole_home(i)
            period_kwh[label] = period_kwh.get(label, 0.0) + kwh
            period_cost[label] = period_cost.get(label, 0.0) + kwh * rate
            for name in data.tracked_appliances:
                appliance_kwh[name] += data.series[name][i]
                appliance_cost[name] += data.series[name][i] * rate
        total_kwh = sum(period_kwh.values())
        total_cost = sum(period_cost.values())
        result = {
            "rate": schedule.name,
            "rate_type": schedule.type,
            "total_kwh": total_kwh,
            "total_cost_usd": total_cost,
            "periods": [
                {"label": label, "kwh": period_kwh[label], "cost_usd": period_cost[label]}
                for label in sorted(period_kwh)
            ],
            "appliances": [
                {"appliance": name, "kwh": appliance_kwh[name], "cost_usd": appliance_cost[name]}
                for name in data.tracked_appliances
            ],
        }
        self._record(
            "analyze_utility_rate",
            f"{total_kwh:.2f} kWh costs ${total_cost:.2f} under rate {schedule.name}",
        )
        return result

    def analyze_solar_availability(self) -> dict:
        data = self._require_dataset()
        if not data.has_solar:
            raise NoSolarData()
        values = data.series[SOLAR_SERIES]
        indices = range(len(values))
        total = sum(values)
        peak_offset = max(indices, key=lambda i: (values[i], -i))
        hourly = _profile_of(values, data, indices)
        generating_hours = [h for h in range(24) if hourly[h] is not None and hourly[h] > 0]
        daily: dict[date, float] = {}
        order: list[date] = []
        for i in indices:
            day = data.timestamps[i].date()
            if day not in daily:
                daily[day] = 0.0
                order.append(day)
            daily[day] += values[i]
        result = {
            "total_kwh": total,
            "peak_interval": {
                "timestamp": data.timestamps[peak_offset].isoformat(),
                "kwh": values[peak_offset],
            },
            "hourly_profile": hourly,
            "generating_hours": generating_hours,
            "daily_profile": [{"date": d.isoformat(), "kwh": daily[d]} for d in order],
        }
        self._record(
            "analyze_solar_availability",
            f"solar generated {total:.2f} kWh; peak at {data.timestamps[peak_offset].isoformat()}",
        )
        return result

    def analyze_solar_alignment(self, appliance: str) -> dict:
        data = self._require_dataset()
        if not data.has_solar:
            raise NoSolarData()
        if appliance == SOLAR_SERIES:
            raise UnknownAppliance("solar_generation is not a consuming appliance")
        values = data.require_appliance(appliance)
        solar = data.series[SOLAR_SERIES]
        overlap = sum(values[i] for i in range(len(values)) if solar[i] > 0)
        total = sum(values)
        score = (overlap / total) if total > 0 else None
        profile = [0.0] * 24
        for i in range(len(values)):
            if solar[i] > 0:
                profile[data.timestamps[i].hour] += values[i]
        result = {
            "appliance": appliance,
            "alignment_score": score,
            "overlap_kwh": overlap,
            "appliance_total_kwh": total,
            "overlap_by_hour_kwh": profile,
            "note": "score = appliance kWh during solar-generating intervals / appliance total kWh",
        }
        self._record(
            "analyze_solar_alignment",
            f"{appliance} solar alignment "
            + (f"{score:.2f}" if score is not None else "undefined (no usage)"),
        )
        return result

    def get_analysis_summary(self) -> dict:
        return {
            "findings": [
                {"tool": tool, "finding": text} for tool, text in self._findings.items()
            ]
        }

    # ── internals ───────────────────────────────────────────────────────

    def _require_dataset(self) -> EnergyDataset:
        if self.dataset is None:
            raise NoDatasetLoaded()
        return self.dataset

    def _record(self, tool: str, finding: str) -> None:
        # Latest result per tool kind wins; insertion order otherwise kept.
        self._findings[tool] = finding

    def _resolve(self, path: str) -> Path:
        candidate = Path(path)
        if candidate.is_absolute() or self.data_dir is None:
            return candidate
        return self.data_dir / candidate

    def _select_appliances(self, appliances: list[str] | None) -> list[str]:
        data = self._require_dataset()
        if not appliances:
            return data.tracked_appliances
        for name in appliances:
            data.require_appliance(name)
        return list(appliances)

    def _threshold_for(self, appliance: str) -> float:
        if self.data_dir is None:
            raise MissingThreshold("no data directory configured, thresholds unavailable")
        thresholds_path = self.data_dir / THRESHOLDS_FILENAME
        if not thresholds_path.is_file():
            raise MissingThreshold(f"thresholds file not found: {thresholds_path}")
        try:
            table = json.loads(thresholds_path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ParseError(f"{thresholds_path.name}: invalid JSON ({exc})") from None
        if appliance not in table:
            raise MissingThreshold(f"no on-threshold configured for {appliance!r}")
        threshold = float(table[appliance])
        if threshold <= 0:
            raise ParseError(f"threshold for {appliance!r} must be > 0")
        return threshold

    def _load_rate(self, name: str | None) -> RateSchedule:
        if self.data_dir is None or not self.data_dir.is_dir():
            raise MissingDirectory(f"data directory not found: {self.data_dir}")
        if name is not None:
            direct = self.data_dir / f"{name}.json"
            if direct.is_file():
                return load_rate_schedule(direct)
            raise ParseError(f"rate file not found: {direct}")
        candidates = [
            child
            for child in sorted(self.data_dir.glob("*.json"))
            if _classify(child) == "rate"
        ]
        if not candidates:
            raise ParseError(f"no rate files in {self.data_dir}")
        return load_rate_schedule(candidates[0])


# ── module helpers (shared with the period/profile computations) ────────


def _classify(path: Path) -> str:
    if path.suffix == ".csv":
        return "energy"
    if path.suffix == ".json":
        try:
            document = json.loads(path.read_text(encoding="utf-8"))
        except (json.JSONDecodeError, OSError):
            return "other"
        if isinstance(document, dict) and document.get("type") in ("flat", "tou"):
            return "rate"
        if isinstance(document, dict) and all(
            isinstance(v, (int, float)) for v in document.values()
        ) and document:
            return "thresholds"
    return "other"


def _hourly_profile(data: EnergyDataset, indices: range) -> list[float | None]:
    values = [data.whole_home(i) for i in indices]
    return _profile_from(values, [data.timestamps[i].hour for i in indices])


def _profile_of(values: list[float], data: EnergyDataset, indices: range) -> list[float | None]:
    return _profile_from([values[i] for i in indices], [data.timestamps[i].hour for i in indices])


def _profile_from(values: list[float], hours: list[int]) -> list[float | None]:
    sums = [0.0] * 24
    counts = [0] * 24
    for value, hour in zip(values, hours):
        sums[hour] += value
        counts[hour] += 1
    return [(sums[h] / counts[h]) if counts[h] else None for h in range(24)]


def _daily_totals(data: EnergyDataset, indices: range) -> list[tuple[date, float]]:
    totals: dict[date, float] = {}
    order: list[date] = []
    for i in indices:
        day = data.timestamps[i].date()
        if day not in totals:
            totals[day] = 0.0
            order.append(day)
        totals[day] += data.whole_home(i)
    return [(day, totals[day]) for day in order]


def _bucket_key(stamp: datetime, aggregation: str) -> str:
    if aggregation == "hourly":
        return stamp.strftime("%Y-%m-%dT%H:00")
    if aggregation == "daily":
        return stamp.date().isoformat()
    if aggregation == "weekly":
        year, week, _ = stamp.isocalendar()
        return f"{year}-W{week:02d}"
    if aggregation == "monthly":
        return f"{stamp.year}-{stamp.month:02d}"
    raise ValueError(f"unknown aggregation {aggregation!r}")


def _aggregate(
    data: EnergyDataset, indices: range, names: list[str], aggregation: str
) -> list[dict[str, Any]]:
    grouped: dict[str, dict[str, float]] = {}
    order: list[str] = []
    for i in indices:
        key = _bucket_key(data.timestamps[i], aggregation)
        if key not in grouped:
            grouped[key] = {name: 0.0 for name in names}
            order.append(key)
        for name in names:
            grouped[key][name] += data.series[name][i]
    buckets = []
    for key in order:
        per_appliance = grouped[key]
        buckets.append(
            {
                "bucket": key,
                "total_kwh": sum(per_appliance.values()),
                "appliances": dict(per_appliance),
            }
        )
    return buckets


def _least_squares_slope(values: list[float]) -> float:
    n = len(values)
    if n < 2:
        return 0.0
    mean_x = (n - 1) / 2.0
    mean_y = sum(values) / n
    numerator = sum((i - mean_x) * (values[i] - mean_y) for i in range(n))
    denominator = sum((i - mean_x) ** 2 for i in range(n))
    return numerator / denominator
