import csv
import json
from pathlib import Path

import pytest

from wattson.analytics.synthetic import write_household_csv
from wattson.gateway import Gateway, ProviderCascade, ProviderConfig
from wattson.server.config import asset_root


@pytest.fixture(scope="session")
def assets() -> Path:
    return asset_root()


@pytest.fixture(scope="session")
def workspace(tmp_path_factory) -> Path:
    """Data directory holding the synthetic dataset, rates, and thresholds."""
    directory = tmp_path_factory.mktemp("workspace")
    write_household_csv(directory / "household.csv")
    for bundled in sorted((asset_root() / "rates").iterdir()):
        (directory / bundled.name).write_bytes(bundled.read_bytes())
    return directory


def make_csv(path: Path, header: list[str], rows: list[list]) -> Path:
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    return path


def scripted_gateway(responses: list[dict], name: str = "scripted", **kwargs) -> Gateway:
    cascade = ProviderCascade.of(ProviderConfig(name=name, kind="scripted", fixture_path="inline"))
    return Gateway(cascade, scripted_responses={name: responses}, **kwargs)


def write_json(path: Path, document) -> Path:
    path.write_text(json.dumps(document, indent=2), encoding="utf-8")
    return path
