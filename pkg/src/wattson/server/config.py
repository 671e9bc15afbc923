"""Single-document service configuration.

One JSON file declares the provider cascade and every content path the
service needs. The config path comes from the CLI or the WATTSON_CONFIG
environment variable; relative paths resolve against the config file's
directory. Paths left unset fall back to the packaged assets, so a
config containing only a provider cascade is enough to boot.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from wattson.gateway import ProviderCascade, ProviderConfig

CONFIG_ENV_VAR = "WATTSON_CONFIG"


def asset_root() -> Path:
    return Path(str(resources.files("wattson"))) / "assets"


@dataclass
class AppConfig:
    providers: list[ProviderConfig]
    data_dir: Path
    corpus_dir: Path
    home_config: Path
    prompts_dir: Path
    weather_mode: str = "fixture"
    weather_fixture_dir: Path = field(default_factory=lambda: asset_root() / "weather")
    default_location: str = "tucson"
    weather_locations: dict[str, tuple[float, float]] = field(default_factory=dict)
    ui_origin: str = "http://localhost:5173"
    persistence_path: Path | None = None  # None = in-memory sessions
    host: str = "127.0.0.1"
    port: int = 8000

    def cascade(self) -> ProviderCascade:
        return ProviderCascade(providers=tuple(self.providers))


def default_config(providers: list[ProviderConfig] | None = None) -> AppConfig:
    """Config over the packaged assets; defaults to a demo scripted provider."""
    assets = asset_root()
    if providers is None:
        providers = [
            ProviderConfig(
                name="demo",
                kind="scripted",
                fixture_path=str(assets / "demo_responses.jsonl"),
            )
        ]
    return AppConfig(
        providers=providers,
        data_dir=assets / "rates",
        corpus_dir=assets / "corpus",
        home_config=assets / "home" / "default_home.json",
        prompts_dir=assets / "prompts",
    )


def load_config(path: str | Path | None = None) -> AppConfig:
    if path is None:
        path = os.environ.get(CONFIG_ENV_VAR)
    if path is None:
        raise ValueError(
            f"no config file given; pass --config or set {CONFIG_ENV_VAR}"
        )
    config_path = Path(path)
    document = json.loads(config_path.read_text(encoding="utf-8"))
    base = config_path.parent
    assets = asset_root()

    def resolve(key: str, fallback: Path) -> Path:
        raw = document.get(key)
        if raw is None:
            return fallback
        candidate = Path(raw)
        return candidate if candidate.is_absolute() else base / candidate

    providers = []
    for raw in document.get("providers", []):
        fixture = raw.get("fixture_path")
        if fixture is not None and not Path(fixture).is_absolute():
            fixture = str(base / fixture)
        providers.append(
            ProviderConfig(
                name=raw["name"],
                kind=raw.get("kind", "http"),
                endpoint=raw.get("endpoint", ""),
                model=raw.get("model", ""),
                credential_ref=raw.get("credential_ref", ""),
                price_in=float(raw.get("price_in", 0.0)),
                price_out=float(raw.get("price_out", 0.0)),
                timeout=float(raw.get("timeout", 60.0)),
                fixture_path=fixture,
            )
        )
    if not providers:
        raise ValueError(f"{config_path}: config must declare at least one provider")

    persistence = document.get("persistence_path")
    locations = {
        name: (float(coords[0]), float(coords[1]))
        for name, coords in (document.get("weather_locations") or {}).items()
    }
    return AppConfig(
        providers=providers,
        data_dir=resolve("data_dir", assets / "rates"),
        corpus_dir=resolve("corpus_dir", assets / "corpus"),
        home_config=resolve("home_config", assets / "home" / "default_home.json"),
        prompts_dir=resolve("prompts_dir", assets / "prompts"),
        weather_mode=document.get("weather_mode", "fixture"),
        weather_fixture_dir=resolve("weather_fixture_dir", assets / "weather"),
        default_location=document.get("default_location", "tucson"),
        weather_locations=locations,
        ui_origin=document.get("ui_origin", "http://localhost:5173"),
        persistence_path=(base / persistence if persistence and not Path(persistence).is_absolute() else Path(persistence)) if persistence else None,
        host=document.get("host", "127.0.0.1"),
        port=int(document.get("port", 8000)),
    )
