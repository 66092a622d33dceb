"""Shared fixtures: deterministic pipelines, canned spaces, golden loading."""

from __future__ import annotations

from pathlib import Path

import pytest

from designspace import (
    Dimension,
    GenerationConfig,
    GenerationPipeline,
    MockProvider,
    Requirement,
    ResponseNode,
    SpaceStore,
    SummaryBundle,
)
from designspace.testing import synthetic_completion

GOLDEN_DIR = Path(__file__).parent / "golden"


def load_golden(name: str) -> str:
    return (GOLDEN_DIR / f"{name}.txt").read_text(encoding="utf-8")


def make_pipeline(
    seed: int = 11,
    handler=synthetic_completion,
    script=None,
    fixtures=None,
    delay: float = 0.0,
    **config_overrides,
) -> GenerationPipeline:
    config = GenerationConfig(rng_seed=seed, **config_overrides)
    provider = MockProvider(
        handler=handler,
        script=script,
        fixtures=fixtures,
        delay=delay,
        max_in_flight=config.max_concurrent_calls,
    )
    return GenerationPipeline(provider, SpaceStore(), config)


def make_bundle(title: str = "A Plain Tale") -> SummaryBundle:
    return SummaryBundle(
        keywords=("rabbit", "journey"),
        summary="A rabbit goes on a journey.",
        structure="Start-Middle-End",
        title=title,
    )


def make_space_with_nodes(store: SpaceStore, labels_per_node: list[dict[str, str]]):
    """A space whose dimensions cover the given per-node label maps."""
    values: dict[str, list[str]] = {}
    for labels in labels_per_node:
        for name, label in labels.items():
            values.setdefault(name, [])
            if label not in values[name]:
                values[name].append(label)
    dims = []
    for name, labels in values.items():
        padded = labels + [f"{name} filler"] if len(labels) < 2 else labels
        dims.append(Dimension.nominal(name, padded))
    space = store.create_space("prompt under test", dimensions=dims)
    for labels in labels_per_node:
        node_id, seq = store.reserve_node_slot(space.space_id)
        store.append_node(
            space.space_id,
            ResponseNode(
                id=node_id,
                full_text=f"text of {node_id}",
                bundle=make_bundle(),
                requirement=Requirement.of(
                    [(d.name, labels[d.name]) for d in dims]
                ),
                created_at=seq,
            ),
        )
    return store.get_space(space.space_id)


@pytest.fixture
def pipeline() -> GenerationPipeline:
    return make_pipeline()
