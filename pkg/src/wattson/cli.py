"""Command-line entry points: serve, index build, eval run, data init."""

from __future__ import annotations

import json
import shutil
import sys
from pathlib import Path

import click

from wattson.evaluation.personas import load_personas, load_scenarios
from wattson.evaluation.runner import run_evaluation
from wattson.knowledge.index import build_index
from wattson.server.config import asset_root, load_config


@click.group()
def main() -> None:
    """Conversational assistant for home energy analysis, education, and control."""


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None,
              help="Config file (falls back to $WATTSON_CONFIG)")
@click.option("--host", default=None, help="Bind address (overrides config)")
@click.option("--port", default=None, type=int, help="Port (overrides config)")
def serve(config_path: str | None, host: str | None, port: int | None) -> None:
    """Start the HTTP API server."""
    import uvicorn

    from wattson.server.app import create_app
    from wattson.server.service import ChatService

    config = load_config(config_path)
    service = ChatService(config)
    app = create_app(service)
    uvicorn.run(app, host=host or config.host, port=port or config.port)


@main.group()
def index() -> None:
    """Knowledge-index maintenance."""


@index.command("build")
@click.option("--corpus", "corpus_dir", type=click.Path(exists=True, file_okay=False),
              default=None, help="Corpus directory (default: bundled corpus)")
def index_build(corpus_dir: str | None) -> None:
    """Build the retrieval index and print its manifest."""
    directory = Path(corpus_dir) if corpus_dir else asset_root() / "corpus"
    manifest = build_index(directory).manifest()
    click.echo(json.dumps(manifest, indent=2))


@main.group("eval")
def eval_group() -> None:
    """Simulated-user evaluation."""


@eval_group.command("run")
@click.option("--personas", "personas_path", type=click.Path(exists=True), default=None,
              help="Personas JSON (default: bundled 3)")
@click.option("--scenarios", "scenarios_path", type=click.Path(exists=True), default=None,
              help="Scenarios JSON (default: bundled 7)")
@click.option("--reps", default=1, show_default=True, help="Repetitions per combination")
@click.option("--mode", type=click.Choice(["scripted", "live"]), default="scripted",
              show_default=True)
@click.option("--out", "out_dir", type=click.Path(), default="eval_out", show_default=True,
              help="Output directory for runs, report, tables, figures")
@click.option("--config", "config_path", type=click.Path(exists=True), default=None,
              help="Service config (required for live mode)")
def eval_run(
    personas_path: str | None,
    scenarios_path: str | None,
    reps: int,
    mode: str,
    out_dir: str,
    config_path: str | None,
) -> None:
    """Run persona x scenario conversations and compute the 23 metrics."""
    assets = asset_root() / "eval"
    personas = load_personas(personas_path or assets / "personas.json")
    scenarios = load_scenarios(scenarios_path or assets / "scenarios.json")
    live_config = None
    if mode == "live":
        if config_path is None:
            raise click.UsageError("--config is required for live mode")
        live_config = load_config(config_path)
    batch = run_evaluation(
        personas,
        scenarios,
        reps=reps,
        mode=mode,
        out_dir=out_dir,
        live_config=live_config,
        progress=click.echo,
    )
    achieved = sum(1 for run in batch["runs"] if run["goal_achieved"])
    click.echo(f"{achieved}/{batch['total_runs']} runs achieved their goal")
    failed = [run for run in batch["runs"] if not run["goal_achieved"]]
    for run in failed:
        click.echo(f"  not achieved: {run['scenario']} x {run['persona']} ({run['stop_reason']})")
    if failed:
        sys.exit(1)


@main.group()
def data() -> None:
    """Workspace data management."""


@data.command("init")
@click.option("--out", "out_dir", type=click.Path(), default="workspace", show_default=True)
def data_init(out_dir: str) -> None:
    """Materialize the bundled dataset, rates, home config, and a starter config."""
    from wattson.analytics.synthetic import write_household_csv

    workspace = Path(out_dir)
    data_dir = workspace / "data"
    data_dir.mkdir(parents=True, exist_ok=True)
    manifest = write_household_csv(data_dir / "household.csv")
    assets = asset_root()
    for bundled in sorted((assets / "rates").iterdir()):
        shutil.copy(bundled, data_dir / bundled.name)
    shutil.copy(assets / "home" / "default_home.json", workspace / "home.json")
    starter = {
        "providers": [
            {
                "name": "openai",
                "kind": "http",
                "endpoint": "https://api.openai.com/v1/chat/completions",
                "model": "gpt-4o-mini",
                "credential_ref": "OPENAI_API_KEY",
                "price_in": 0.15,
                "price_out": 0.60,
            },
            {
                "name": "ollama",
                "kind": "http",
                "endpoint": "http://localhost:11434/v1/chat/completions",
                "model": "llama3.1",
                "credential_ref": "OLLAMA_API_KEY",
            },
        ],
        "data_dir": "data",
        "home_config": "home.json",
        "weather_mode": "fixture",
        "default_location": "tucson",
        "persistence_path": "sessions.sqlite",
    }
    config_path = workspace / "config.json"
    config_path.write_text(json.dumps(starter, indent=2) + "\n", encoding="utf-8")
    click.echo(f"workspace ready at {workspace}")
    click.echo(f"  dataset: {manifest['samples']} samples, appliances {manifest['tracked_appliances']}")
    click.echo(f"  edit {config_path} and export the provider credential, then: wattson serve --config {config_path}")


if __name__ == "__main__":
    main()
