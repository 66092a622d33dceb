"""
Driving the HTTP service
========================

The gateway exposes the whole engine under /api/v1. This demo mounts the app
in-process; `dse serve --fixtures ./fixtures` runs the same thing over a
real socket for the browser UI.
"""

import json

from fastapi.testclient import TestClient

from designspace import GenerationConfig, GenerationPipeline, SpaceStore
from designspace.gateway import create_app
from designspace.testing import synthetic_provider

pipeline = GenerationPipeline(
    synthetic_provider(), SpaceStore(), GenerationConfig(response_count=4, rng_seed=5)
)
client = TestClient(create_app(pipeline))

# Long-running generation answers 202 immediately with a run id.
accepted = client.post(
    "/api/v1/spaces", json={"prompt": "write a poem about ocean"}
).json()
print("accepted:", accepted)

# Progress streams as server-sent events with full replay for late joiners.
pipeline.get_run(accepted["runId"]).wait(timeout=10)
with client.stream("GET", f"/api/v1/runs/{accepted['runId']}/events") as stream:
    for line in stream.iter_lines():
        if line.startswith("event: "):
            print("sse", line)

space_id = accepted["spaceId"]

# Reads are plain GETs; `scale` resolves per-node semantic-zoom payloads.
detail = client.get(f"/api/v1/spaces/{space_id}", params={"scale": 0.3}).json()
print("level at scale 0.3:", detail["level"])

# Exploration endpoints mirror the engine operations one to one.
dimension = detail["space"]["dimensions"][0]
layout = client.post(
    f"/api/v1/spaces/{space_id}/layout",
    json={"selection": {"x": dimension["name"]}, "viewport": {"width": 900, "height": 600}},
).json()
print("x ticks:", [label for label, _ in layout["xTicks"]])

node_id = detail["space"]["nodes"][0]["id"]
selected = client.post(f"/api/v1/spaces/{space_id}/nodes/{node_id}/select").json()
print("editor blocks:", len(selected["document"]["blocks"]))

saved = client.post("/api/v1/store/save", json={"path": "/tmp/designspace_api_store.json"}).json()
print("saved:", json.dumps(saved))
