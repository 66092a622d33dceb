"""
Generating a design space from one prompt
=========================================

One prompt fans out into task-relevant dimensions and a batch of candidate
responses generated under sampled requirements. Everything below runs against
the deterministic synthetic backend, so no API key is needed.
"""

from designspace import EventKind, GenerationConfig, GenerationPipeline, SpaceStore
from designspace.testing import synthetic_provider

config = GenerationConfig(response_count=8, rng_seed=7)
pipeline = GenerationPipeline(synthetic_provider(), SpaceStore(), config)

# Kick the run off asynchronously and watch the event stream: dimensions land
# first, then each node as its two completions (generate + summarize) finish.
run = pipeline.start_space_run("write a story about a rabbit")
for event in run.events():
    if event.kind is EventKind.DIMENSIONS_READY:
        print("dimensions:", ", ".join(d.name for d in event.payload))
    elif event.kind is EventKind.NODE_READY:
        node = event.payload
        print(f"  node {node.id}: {node.bundle.title!r}")
    elif event.kind is EventKind.DONE:
        stats = event.payload
        print(f"done: {stats.produced}/{stats.requested} nodes, {stats.calls} calls")

space = pipeline.store.get_space(run.space_id)

# Each node carries the exact requirement that generated it.
first = space.nodes[0]
print("\nrequirement of", first.id)
for name, label in first.requirement.items():
    print(f"  {name}: {label}")

# Call accounting: 2 dimension calls + 2 calls per node, nothing hidden.
totals = pipeline.provider.ledger.totals()
print(f"\nledger: attempted={totals.attempted} failed={totals.failed}")
assert totals.attempted == 2 + 2 * len(space.nodes)
