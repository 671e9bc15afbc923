"""Weather lookups: live Open-Meteo queries or recorded fixture replay.

Both modes return identically-shaped documents. Fixture mode resolves
``<location>_<kind>.json`` files from the fixture directory, keyed by a
normalized location name, so the whole suite runs offline.
"""

from __future__ import annotations

import json
import re
from datetime import date, datetime, timedelta
from pathlib import Path
from typing import Callable

import httpx

FORECAST_MIN_DAYS = 1
FORECAST_MAX_DAYS = 7
COOLING_THRESHOLD_F = 85.0
HEATING_THRESHOLD_F = 50.0
IMPACT_HORIZON_DAYS = 3

OPEN_METEO_FORECAST = "https://api.open-meteo.com/v1/forecast"
OPEN_METEO_ARCHIVE = "https://archive-api.open-meteo.com/v1/archive"

_WMO_CONDITIONS = {
    0: "clear",
    1: "mostly clear",
    2: "partly cloudy",
    3: "overcast",
    45: "fog",
    51: "drizzle",
    61: "rain",
    63: "rain",
    65: "heavy rain",
    71: "snow",
    80: "showers",
    95: "thunderstorm",
}


class WeatherUnavailable(Exception):
    pass


class InvalidDays(Exception):
    def __init__(self, days: int) -> None:
        super().__init__(f"forecast days must be {FORECAST_MIN_DAYS}-{FORECAST_MAX_DAYS}, got {days}")


class FutureRange(Exception):
    pass


class WeatherClient:
    def __init__(
        self,
        mode: str = "fixture",
        fixture_dir: str | Path | None = None,
        default_location: str = "tucson",
        locations: dict[str, tuple[float, float]] | None = None,
        now_fn: Callable[[], datetime] = datetime.now,
        http_client: httpx.Client | None = None,
    ) -> None:
        if mode not in ("fixture", "live"):
            raise ValueError("weather mode must be 'fixture' or 'live'")
        self.mode = mode
        self.fixture_dir = Path(fixture_dir) if fixture_dir else None
        self.default_location = default_location
        self.locations = locations or {}
        self._now = now_fn
        self._http = http_client

    # ── public lookups ──────────────────────────────────────────────────

    def current(self, location: str | None = None) -> dict:
        place = location or self.default_location
        if self.mode == "fixture":
            return self._fixture(place, "current")
        latitude, longitude = self._coordinates(place)
        data = self._get(
            OPEN_METEO_FORECAST,
            {
                "latitude": latitude,
                "longitude": longitude,
                "current": "temperature_2m,relative_humidity_2m,wind_speed_10m,cloud_cover",
                "temperature_unit": "fahrenheit",
                "wind_speed_unit": "mph",
            },
        )
        current = data.get("current") or {}
        return {
            "location": place,
            "temperature_f": current.get("temperature_2m"),
            "humidity_percent": current.get("relative_humidity_2m"),
            "wind_mph": current.get("wind_speed_10m"),
            "cloud_cover_percent": current.get("cloud_cover"),
            "timestamp": current.get("time"),
        }

    def forecast(self, location: str | None = None, days: int = 3) -> dict:
        if not FORECAST_MIN_DAYS <= days <= FORECAST_MAX_DAYS:
            raise InvalidDays(days)
        place = location or self.default_location
        if self.mode == "fixture":
            recorded = self._fixture(place, "forecast")
            available = recorded.get("days", [])
            if len(available) < days:
                raise WeatherUnavailable(
                    f"fixture for {place!r} holds only {len(available)} forecast day(s)"
                )
            return {"location": recorded.get("location", place), "days": available[:days]}
        latitude, longitude = self._coordinates(place)
        data = self._get(
            OPEN_METEO_FORECAST,
            {
                "latitude": latitude,
                "longitude": longitude,
                "daily": "temperature_2m_max,temperature_2m_min,precipitation_sum,weather_code",
                "forecast_days": days,
                "temperature_unit": "fahrenheit",
                "precipitation_unit": "inch",
            },
        )
        daily = data.get("daily") or {}
        entries = []
        for i, day in enumerate(daily.get("time", [])[:days]):
            entries.append(
                {
                    "date": day,
                    "min_temp_f": _at(daily, "temperature_2m_min", i),
                    "max_temp_f": _at(daily, "temperature_2m_max", i),
                    "condition": _WMO_CONDITIONS.get(_at(daily, "weather_code", i), "unknown"),
                    "precipitation_in": _at(daily, "precipitation_sum", i),
                }
            )
        if len(entries) != days:
            raise WeatherUnavailable(f"provider returned {len(entries)} of {days} forecast days")
        return {"location": place, "days": entries}

    def historical(self, start: date, end: date, location: str | None = None) -> dict:
        """Daily records for [start, end], both dates in the past."""
        if start > end:
            raise FutureRange(f"range start {start} is after end {end}")
        today = self._now().date()
        if end >= today:
            raise FutureRange(f"historical range must end before today ({today})")
        place = location or self.default_location
        if self.mode == "fixture":
            recorded = self._fixture(place, "historical")
            matching = [
                day
                for day in recorded.get("days", [])
                if start <= date.fromisoformat(day["date"]) <= end
            ]
            if not matching:
                raise WeatherUnavailable(f"no recorded history for {place!r} in {start}..{end}")
            return {"location": recorded.get("location", place), "days": matching}
        latitude, longitude = self._coordinates(place)
        data = self._get(
            OPEN_METEO_ARCHIVE,
            {
                "latitude": latitude,
                "longitude": longitude,
                "start_date": start.isoformat(),
                "end_date": end.isoformat(),
                "daily": "temperature_2m_max,temperature_2m_min,precipitation_sum,weather_code",
                "temperature_unit": "fahrenheit",
                "precipitation_unit": "inch",
            },
        )
        daily = data.get("daily") or {}
        entries = [
            {
                "date": day,
                "min_temp_f": _at(daily, "temperature_2m_min", i),
                "max_temp_f": _at(daily, "temperature_2m_max", i),
                "condition": _WMO_CONDITIONS.get(_at(daily, "weather_code", i), "unknown"),
                "precipitation_in": _at(daily, "precipitation_sum", i),
            }
            for i, day in enumerate(daily.get("time", []))
        ]
        if not entries:
            raise WeatherUnavailable(f"no archive data for {place!r} in {start}..{end}")
        return {"location": place, "days": entries}

    def energy_impact(self, location: str | None = None) -> dict:
        """Qualitative load assessment from the next few forecast days."""
        forecast = self.forecast(location, days=IMPACT_HORIZON_DAYS)
        highs = [day["max_temp_f"] for day in forecast["days"] if day["max_temp_f"] is not None]
        lows = [day["min_temp_f"] for day in forecast["days"] if day["min_temp_f"] is not None]
        if not highs or not lows:
            raise WeatherUnavailable("forecast lacks temperature bounds")
        peak_high = max(highs)
        peak_low = min(lows)
        impacts: list[str] = []
        if peak_high > COOLING_THRESHOLD_F:
            impacts.append(
                f"cooling load expected: forecast high {peak_high:.0f}F exceeds {COOLING_THRESHOLD_F:.0f}F"
            )
        if peak_low < HEATING_THRESHOLD_F:
            impacts.append(
                f"heating load expected: forecast low {peak_low:.0f}F is below {HEATING_THRESHOLD_F:.0f}F"
            )
        if not impacts:
            impacts.append("neutral: forecast temperatures sit in the low-load band")
        return {
            "location": forecast["location"],
            "horizon_days": IMPACT_HORIZON_DAYS,
            "forecast_high_f": peak_high,
            "forecast_low_f": peak_low,
            "impacts": impacts,
        }

    # ── internals ───────────────────────────────────────────────────────

    def _fixture(self, location: str, kind: str) -> dict:
        if self.fixture_dir is None:
            raise WeatherUnavailable("fixture mode selected but no fixture directory configured")
        path = self.fixture_dir / f"{normalize_location(location)}_{kind}.json"
        if not path.is_file():
            raise WeatherUnavailable(f"no recorded {kind} weather for location {location!r}")
        return json.loads(path.read_text(encoding="utf-8"))

    def _coordinates(self, location: str) -> tuple[float, float]:
        key = normalize_location(location)
        if key in self.locations:
            return self.locations[key]
        match = re.fullmatch(r"(-?\d+(?:\.\d+)?),(-?\d+(?:\.\d+)?)", location.strip())
        if match:
            return float(match.group(1)), float(match.group(2))
        raise WeatherUnavailable(
            f"location {location!r} is not configured and is not a lat,lon pair"
        )

    def _get(self, url: str, params: dict) -> dict:
        client = self._http or httpx.Client()
        try:
            response = client.get(url, params=params, timeout=20.0)
            if response.status_code != 200:
                raise WeatherUnavailable(f"weather API returned HTTP {response.status_code}")
            return response.json()
        except httpx.HTTPError as exc:
            raise WeatherUnavailable(f"weather API unreachable: {exc}") from exc
        finally:
            if self._http is None:
                client.close()


def normalize_location(location: str) -> str:
    return re.sub(r"[^a-z0-9]+", "_", location.strip().lower()).strip("_")


def _at(table: dict, key: str, index: int):
    values = table.get(key) or []
    return values[index] if index < len(values) else None
