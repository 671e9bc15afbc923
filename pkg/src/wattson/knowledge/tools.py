"""The knowledge agent's tool registry: 8 tools for retrieval and weather."""

from __future__ import annotations

from datetime import date

from wattson.analytics.engine import AnalyticsEngine
from wattson.knowledge.service import KnowledgeService, user_context
from wattson.knowledge.weather import FORECAST_MAX_DAYS, FORECAST_MIN_DAYS, WeatherClient
from wattson.tools import ParamSpec, ToolRegistry, ToolSpec

_LOCATION = ParamSpec(
    name="location",
    type="string",
    description="Location name or lat,lon pair; omit for the configured default",
    required=False,
)


def build_knowledge_registry(
    service: KnowledgeService,
    weather: WeatherClient,
    engine: AnalyticsEngine,
) -> ToolRegistry:
    registry = ToolRegistry()

    registry.register(
        ToolSpec(
            name="energy_knowledge",
            description="Explain energy concepts, best practices, tips (TOU, heat pumps, solar, etc.)",
            parameters=(
                ParamSpec(name="topic", type="string", description="Concept or question to explain"),
            ),
        ),
        lambda topic: service.knowledge(topic),
    )
    registry.register(
        ToolSpec(
            name="search_energy_documents",
            description="Search indexed documents (DOE guides, ENERGY STAR, rebate info)",
            parameters=(
                ParamSpec(name="query", type="string", description="Search query"),
                ParamSpec(
                    name="k",
                    type="integer",
                    description="Number of results to return",
                    required=False,
                    minimum=1,
                    maximum=20,
                ),
            ),
        ),
        lambda query, k=4: service.search(query, k),
    )
    registry.register(
        ToolSpec(
            name="get_knowledge_base_status",
            description="Check RAG knowledge base status and available sources",
        ),
        lambda: service.status(),
    )
    registry.register(
        ToolSpec(
            name="get_current_weather",
            description="Retrieve current weather conditions (temperature, humidity, wind, cloud)",
            parameters=(_LOCATION,),
        ),
        lambda location=None: weather.current(location),
    )
    registry.register(
        ToolSpec(
            name="get_weather_forecast",
            description="Provide 1-7 day forecast with temperature, conditions, precipitation",
            parameters=(
                _LOCATION,
                ParamSpec(
                    name="days",
                    type="integer",
                    description=f"Forecast horizon, {FORECAST_MIN_DAYS}-{FORECAST_MAX_DAYS} days",
                    minimum=FORECAST_MIN_DAYS,
                    maximum=FORECAST_MAX_DAYS,
                ),
            ),
        ),
        lambda days, location=None: weather.forecast(location, days),
    )
    registry.register(
        ToolSpec(
            name="get_weather_energy_impact",
            description="Analyze how current and forecasted weather affects energy usage",
            parameters=(_LOCATION,),
        ),
        lambda location=None: weather.energy_impact(location),
    )
    registry.register(
        ToolSpec(
            name="get_historical_weather",
            description="Retrieve historical weather data for past date ranges",
            parameters=(
                _LOCATION,
                ParamSpec(name="start_date", type="date", description="First day, ISO date"),
                ParamSpec(name="end_date", type="date", description="Last day, ISO date"),
            ),
        ),
        lambda start_date, end_date, location=None: weather.historical(
            date.fromisoformat(start_date[:10]), date.fromisoformat(end_date[:10]), location
        ),
    )
    registry.register(
        ToolSpec(
            name="get_user_context",
            description="Get current user's energy data context for personalized advice",
        ),
        lambda: user_context(engine),
    )
    return registry
