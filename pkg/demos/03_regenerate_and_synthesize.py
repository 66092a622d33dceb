"""
Steering regeneration and synthesizing text
===========================================

Three ways to grow a space: clone a node's requirement ("more like this"),
add nodes constrained to a filtered subspace, or add a whole new dimension
that revises every existing response. Selected nodes land in the editor as
a pending highlighted block until the writer edits them.
"""

from designspace import (
    GenerationConfig,
    GenerationPipeline,
    SpaceStore,
    SubspaceFilter,
)
from designspace.testing import synthetic_provider

store = SpaceStore()
pipeline = GenerationPipeline(
    synthetic_provider(), store, GenerationConfig(response_count=6, rng_seed=11)
)
space, _ = pipeline.generate_space("write a story about a rabbit")
sid = space.space_id

# More like this: five clones of one node's exact requirement.
source = space.nodes[2]
similar = pipeline.generate_similar(sid, source.id, k=5)
print(f"more-like-this added {len(similar)} nodes, all labeled like {source.id}")

# Add more inside a filtered subspace: new nodes satisfy the filter by
# construction, pinning a sampled label from each accepted set.
genre = space.dimensions[0]
flt = SubspaceFilter.of({genre.name: [genre.labels[1]]})
added = pipeline.generate_in_subspace(sid, flt, k=3)
print(f"subspace add-more: {[n.requirement.as_dict()[genre.name] for n in added]}")

# A user-defined dimension generates values, then revises every node to
# carry one of them.
result = pipeline.add_user_dimension(sid, "Time Period")
print(f"added {result.dimension.name}: {', '.join(result.dimension.labels)}")
print(f"revised {len(result.revised)} nodes with {result.calls} calls")

# Synthesis: selecting a node highlights its text in the editor; selecting
# another swaps the pending block; editing commits it as the writer's own.
final = store.get_space(sid)
first = store.select_node(sid, final.nodes[0].id)
second = store.select_node(sid, final.nodes[1].id)
print(f"\npending block swapped in place: {first.block_id == second.block_id}")
store.edit_block(second.block_id, "My own opening, grown from the suggestion.")
third = store.select_node(sid, final.nodes[2].id)
blocks = store.get_document().blocks
print(f"after an edit, selection appends: {len(blocks)} blocks, kinds "
      f"{[b.kind.value for b in blocks]}")

# The whole session persists to one diffable JSON document.
path = store.save("/tmp/designspace_demo_store.json")
print(f"\nsaved store to {path}")
