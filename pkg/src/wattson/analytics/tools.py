"""The analysis agent's tool registry: 18 tools over the analytics engine."""

from __future__ import annotations

from wattson.analytics.dataset import TimeRange
from wattson.analytics.engine import AnalyticsEngine
from wattson.tools import ParamSpec, ToolRegistry, ToolSpec

_RANGE = ParamSpec(
    name="time_range",
    type="time-range",
    description="Optional half-open range {start, end} of ISO timestamps",
    required=False,
)


def build_analysis_registry(engine: AnalyticsEngine) -> ToolRegistry:
    registry = ToolRegistry()

    registry.register(
        ToolSpec(
            name="load_energy_data",
            description="Load appliance-level energy consumption CSV file",
            parameters=(
                ParamSpec(
                    name="path",
                    type="string",
                    description="CSV file name (relative to the data directory) or absolute path",
                ),
            ),
        ),
        lambda path: engine.load_energy_data(path),
    )
    registry.register(
        ToolSpec(
            name="list_available_data",
            description="List all available energy data files and rate files",
        ),
        lambda: engine.list_available_data(),
    )
    registry.register(
        ToolSpec(
            name="get_tracked_appliances",
            description="List all appliances being monitored in dataset",
        ),
        lambda: engine.get_tracked_appliances(),
    )
    registry.register(
        ToolSpec(
            name="analyze_consumption",
            description="Overall consumption patterns (daily/hourly profiles, peak times, statistics)",
            parameters=(_RANGE,),
        ),
        lambda time_range=None: engine.analyze_consumption(_range(time_range)),
    )
    registry.register(
        ToolSpec(
            name="analyze_appliances",
            description="Appliance-level breakdown; rank by energy usage",
            parameters=(_RANGE,),
        ),
        lambda time_range=None: engine.analyze_appliances(_range(time_range)),
    )
    registry.register(
        ToolSpec(
            name="query_energy_data",
            description="Query energy data with flexible time ranges and filters",
            parameters=(
                _RANGE,
                ParamSpec(
                    name="appliances",
                    type="string",
                    description="Comma-separated appliance names; omit for all",
                    required=False,
                ),
                ParamSpec(
                    name="aggregation",
                    type="enum",
                    description="Bucket size for sums; 'none' returns raw rows",
                    required=False,
                    choices=("none", "hourly", "daily", "weekly", "monthly"),
                ),
            ),
        ),
        lambda time_range=None, appliances=None, aggregation="none": engine.query_energy_data(
            _range(time_range), _names(appliances), aggregation
        ),
    )
    registry.register(
        ToolSpec(
            name="compare_energy_periods",
            description="Compare consumption between two time periods; calculate differences",
            parameters=(
                ParamSpec(
                    name="period_one",
                    type="time-range",
                    description="First period {start, end} of ISO timestamps",
                ),
                ParamSpec(
                    name="period_two",
                    type="time-range",
                    description="Second period {start, end} of ISO timestamps",
                ),
            ),
        ),
        lambda period_one, period_two: engine.compare_energy_periods(
            TimeRange.parse(period_one), TimeRange.parse(period_two)
        ),
    )
    registry.register(
        ToolSpec(
            name="analyze_energy_period",
            description="Analyze consumption for any time period with flexible aggregation",
            parameters=(
                ParamSpec(
                    name="period",
                    type="time-range",
                    description="Period {start, end} of ISO timestamps",
                ),
                ParamSpec(
                    name="aggregation",
                    type="enum",
                    description="Bucket size for the period statistics",
                    required=False,
                    choices=("hourly", "daily", "weekly", "monthly"),
                ),
            ),
        ),
        lambda period, aggregation="daily": engine.analyze_energy_period(
            TimeRange.parse(period), aggregation
        ),
    )
    registry.register(
        ToolSpec(
            name="calculate_rolling_average",
            description="Calculate rolling average consumption with trend analysis",
            parameters=(
                ParamSpec(
                    name="window",
                    type="integer",
                    description="Trailing window length in intervals",
                    minimum=1,
                ),
                ParamSpec(
                    name="appliance",
                    type="string",
                    description="Appliance name; omit for the whole-home series",
                    required=False,
                ),
            ),
        ),
        lambda window, appliance=None: engine.calculate_rolling_average(window, appliance),
    )
    registry.register(
        ToolSpec(
            name="compare_weekday_weekend",
            description="Compare weekday vs. weekend energy consumption patterns",
        ),
        lambda: engine.compare_weekday_weekend(),
    )
    registry.register(
        ToolSpec(
            name="analyze_peak_hours",
            description="Analyze peak vs. off-peak consumption with savings estimates",
            parameters=(
                ParamSpec(
                    name="rate_name",
                    type="string",
                    description="Rate file stem; omit for the first rate file in the data directory",
                    required=False,
                ),
                ParamSpec(
                    name="shiftable_fraction",
                    type="number",
                    description="Fraction of peak usage assumed shiftable (default 0.3)",
                    required=False,
                    minimum=0.0,
                    maximum=1.0,
                ),
            ),
        ),
        lambda rate_name=None, shiftable_fraction=0.3: engine.analyze_peak_hours(
            rate_name, shiftable_fraction
        ),
    )
    registry.register(
        ToolSpec(
            name="analyze_usage_frequency",
            description="Identify appliance usage frequency patterns",
            parameters=(
                ParamSpec(name="appliance", type="string", description="Appliance name"),
            ),
        ),
        lambda appliance: engine.analyze_usage_frequency(appliance),
    )
    registry.register(
        ToolSpec(
            name="analyze_usage_variability",
            description="Analyze appliance usage variability using coefficient of variation",
        ),
        lambda: engine.analyze_usage_variability(),
    )
    registry.register(
        ToolSpec(
            name="get_utility_rate",
            description="Retrieve utility rate structure (flat or time-of-use)",
            parameters=(
                ParamSpec(
                    name="name",
                    type="string",
                    description="Rate file stem; omit for the first rate file in the data directory",
                    required=False,
                ),
            ),
        ),
        lambda name=None: engine.get_utility_rate(name),
    )
    registry.register(
        ToolSpec(
            name="analyze_utility_rate",
            description="Analyze energy usage relative to rate structure (TOU or flat)",
            parameters=(
                ParamSpec(
                    name="rate_name",
                    type="string",
                    description="Rate file stem; omit for the first rate file in the data directory",
                    required=False,
                ),
                _RANGE,
            ),
        ),
        lambda rate_name=None, time_range=None: engine.analyze_utility_rate(
            rate_name, _range(time_range)
        ),
    )
    registry.register(
        ToolSpec(
            name="analyze_solar_availability",
            description="Analyze solar power generation patterns and availability",
        ),
        lambda: engine.analyze_solar_availability(),
    )
    registry.register(
        ToolSpec(
            name="analyze_solar_alignment",
            description="Measure appliance usage alignment with solar generation",
            parameters=(
                ParamSpec(name="appliance", type="string", description="Appliance name"),
            ),
        ),
        lambda appliance: engine.analyze_solar_alignment(appliance),
    )
    registry.register(
        ToolSpec(
            name="get_analysis_summary",
            description="Generate comprehensive summary of all analysis results",
        ),
        lambda: engine.get_analysis_summary(),
    )
    return registry


def _range(payload: dict | None) -> TimeRange | None:
    return TimeRange.parse(payload) if payload else None


def _names(joined: str | None) -> list[str] | None:
    if not joined:
        return None
    return [name.strip() for name in joined.split(",") if name.strip()]
