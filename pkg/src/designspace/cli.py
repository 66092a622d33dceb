"""Batch CLI: headless space generation and the HTTP service entry point."""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click

from .errors import DesignSpaceError, PreconditionError
from .model import GenerationConfig
from .pipeline import GenerationPipeline
from .provider import (
    CompletionProvider,
    FixtureDirProvider,
    HttpCompletionProvider,
)
from .store import DEFAULT_STORE_PATH, ENV_STORE_PATH, SpaceStore

ENV_PORT = "DSE_PORT"

EXIT_OK = 0
EXIT_ABORT = 1
EXIT_USAGE = 2


def _load_config(config_file: str | None, responses: int | None, seed: int | None) -> GenerationConfig:
    data: dict = {}
    if config_file:
        data = json.loads(Path(config_file).read_text(encoding="utf-8"))
    if responses is not None:
        data["response_count"] = responses
    if seed is not None:
        data["rng_seed"] = seed
    try:
        return GenerationConfig.from_dict(data)
    except (TypeError, ValueError) as exc:
        raise PreconditionError(f"invalid configuration: {exc}") from exc


def _build_provider(fixtures: str | None, config: GenerationConfig) -> CompletionProvider:
    if fixtures:
        return FixtureDirProvider(fixtures, max_in_flight=config.max_concurrent_calls)
    return HttpCompletionProvider.from_env(max_in_flight=config.max_concurrent_calls)


def _store_path(store: str | None) -> str:
    return store or os.environ.get(ENV_STORE_PATH, DEFAULT_STORE_PATH)


@click.group()
def main() -> None:
    """Dimension-guided generation and exploration of LLM response spaces."""


@main.command()
@click.option("--prompt", required=True, help="Generation prompt.")
@click.option(
    "--context-file",
    type=click.Path(exists=True, dir_okay=False),
    default=None,
    help="File whose contents become the editor context.",
)
@click.option("--responses", type=int, default=None, help="Response count override.")
@click.option("--seed", type=int, default=None, help="RNG seed for reproducible runs.")
@click.option(
    "--fixtures",
    type=click.Path(exists=True, file_okay=False),
    default=None,
    help="Replay completions from a fixture directory instead of calling an API.",
)
@click.option("--store", "store_path", type=click.Path(), default=None, help="Store file path.")
@click.option(
    "--config",
    "config_file",
    type=click.Path(exists=True, dir_okay=False),
    default=None,
    help="JSON file of generation settings.",
)
def generate(
    prompt: str,
    context_file: str | None,
    responses: int | None,
    seed: int | None,
    fixtures: str | None,
    store_path: str | None,
    config_file: str | None,
) -> None:
    """Generate a design space headlessly and write the store file."""
    try:
        config = _load_config(config_file, responses, seed)
        provider = _build_provider(fixtures, config)
        context = (
            Path(context_file).read_text(encoding="utf-8") if context_file else ""
        )
        store = SpaceStore()
        pipeline = GenerationPipeline(provider, store, config)
        space, stats = pipeline.generate_space(prompt, context=context)
    except DesignSpaceError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_USAGE)

    if stats.error is not None:
        click.echo(f"error: {stats.error}", err=True)
        sys.exit(EXIT_ABORT)

    target = store.save(_store_path(store_path))
    click.echo(
        json.dumps(
            {
                "spaceId": space.space_id,
                "store": str(target),
                "nodes": stats.produced,
                "failures": stats.failed,
                "calls": stats.calls,
            }
        )
    )
    if stats.failed or stats.notes:
        click.echo(
            f"warning: {stats.failed} node(s) failed; notes: {list(stats.notes)}", err=True
        )
    sys.exit(EXIT_OK)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=None, help=f"Defaults to ${ENV_PORT} or 8000.")
@click.option(
    "--fixtures",
    type=click.Path(exists=True, file_okay=False),
    default=None,
    help="Serve against a fixture directory instead of a live API.",
)
@click.option("--store", "store_path", type=click.Path(), default=None, help="Store file path.")
@click.option(
    "--config",
    "config_file",
    type=click.Path(exists=True, dir_okay=False),
    default=None,
    help="JSON file of generation settings.",
)
@click.option(
    "--ui",
    "ui_dir",
    type=click.Path(exists=True, file_okay=False),
    default=None,
    help="Also serve a built browser UI from this directory.",
)
def serve(
    host: str,
    port: int | None,
    fixtures: str | None,
    store_path: str | None,
    config_file: str | None,
    ui_dir: str | None,
) -> None:
    """Run the HTTP service consumed by the browser UI."""
    import uvicorn

    from .gateway import create_app

    try:
        config = _load_config(config_file, None, None)
        provider = _build_provider(fixtures, config)
    except DesignSpaceError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_USAGE)

    store = SpaceStore()
    path = _store_path(store_path)
    if Path(path).is_file():
        store.adopt(SpaceStore.load(path))
        click.echo(f"loaded store from {path}")
    pipeline = GenerationPipeline(provider, store, config)
    app = create_app(pipeline, default_store_path=path, ui_dir=ui_dir)
    resolved_port = port if port is not None else int(os.environ.get(ENV_PORT, "8000"))
    uvicorn.run(app, host=host, port=resolved_port)


if __name__ == "__main__":
    main()
