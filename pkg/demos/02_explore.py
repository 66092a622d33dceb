"""
Exploring a space: search, filter, layout, semantic zoom
========================================================

Exploration is a pure algebra over an immutable space snapshot: keyword
search partitions nodes, filters select subspaces, layouts pin nodes to
their label columns, and the zoom scale picks how much of each node to show.
"""

from designspace import (
    AxisSelection,
    GenerationConfig,
    GenerationPipeline,
    SpaceStore,
    SubspaceFilter,
    Viewport,
    assign_layout,
    filter_nodes,
    level_payload,
    resolve_level,
    search_keyword,
)
from designspace.testing import synthetic_provider

pipeline = GenerationPipeline(
    synthetic_provider(), SpaceStore(), GenerationConfig(response_count=12, rng_seed=3)
)
space, _ = pipeline.generate_space("write a story about a rabbit")

# Keyword search dims non-matching nodes instead of hiding them.
partition = search_keyword(space, "triumph")
print(f"search 'triumph': {len(partition.matched)} matched, {len(partition.dimmed)} dimmed")

# Dimension-value filters select a subspace by requirement labels.
genre = space.dimensions[0]
flt = SubspaceFilter.of({genre.name: [genre.labels[0]]})
matched = filter_nodes(space, flt)
print(f"filter {genre.name}={genre.labels[0]}: {sorted(matched)}")

viewport = Viewport(width=1200, height=800)

# No axes: one centered cluster.
cluster = assign_layout(space, AxisSelection(), viewport, seed=1)
print("\ncluster position of n1:", cluster.position_of("n1"))

# One axis: a labeled column per value; node x is pinned to its label's tick.
one_d = assign_layout(space, AxisSelection(x=genre.name), viewport, seed=1)
print(f"{genre.name} ticks:", [(label, round(x)) for label, x in one_d.x_ticks])

# Two axes: nodes sit exactly on their (x label, y label) grid cell.
tone = space.dimensions[1]
two_d = assign_layout(space, AxisSelection(x=genre.name, y=tone.name), viewport, seed=1)
print("grid position of n1:", two_d.position_of("n1"))

# Semantic zoom: the same node renders five ways depending on scale.
node = space.nodes[0]
print()
for scale in (0.1, 0.3, 0.6, 1.0, 2.0):
    level = resolve_level(scale)
    print(f"scale {scale:4} -> {level.name:9}", level_payload(node, level))
