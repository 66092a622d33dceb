"""HTTP service exposing every engine capability under /api/v1.

Long-running generation endpoints return 202 with a run id; progress is
streamed as server-sent events with replay-from-start semantics. Reads never
mutate the store. All bodies are JSON with a schema version response header.
"""

from __future__ import annotations

import json
import re
from typing import Iterator

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, StreamingResponse
from pydantic import BaseModel
from starlette.exceptions import HTTPException as StarletteHTTPException

from .errors import (
    ExhaustionError,
    IntegrityError,
    NotFoundError,
    PreconditionError,
    TransportError,
)
from .explorer import (
    AxisSelection,
    LayoutAssignment,
    LEVEL_WIRE_NAMES,
    Viewport,
    assign_layout,
    filter_nodes,
    level_payload,
    resolve_level,
    search_keyword,
)
from .model import DesignSpace, Dimension, ResponseNode, SubspaceFilter
from .pipeline import (
    EventKind,
    GenerationEvent,
    GenerationPipeline,
    NodeFailure,
    RunStats,
)
from .store import (
    Block,
    BlockKind,
    BlockLink,
    DEFAULT_STORE_PATH,
    ENV_STORE_PATH,
    EditorDocument,
    ExplorationState,
    SpaceStore,
)

SCHEMA_VERSION_HEADER = "X-Schema-Version"
SCHEMA_VERSION = "1"
API_PREFIX = "/api/v1"

# Operation inventory: every public pipeline/store/explorer operation and the
# single endpoint through which it is reachable. Checked by a coverage test.
OPERATION_ENDPOINTS: dict[str, tuple[str, str]] = {
    "pipeline.generate_space": ("POST", "/api/v1/spaces"),
    "pipeline.generate_dimensions": ("POST", "/api/v1/spaces"),
    "pipeline.sample_requirement": ("POST", "/api/v1/spaces"),
    "pipeline.generate_node": ("POST", "/api/v1/spaces"),
    "pipeline.generate_similar": (
        "POST",
        "/api/v1/spaces/{space_id}/nodes/{node_id}/similar",
    ),
    "pipeline.generate_in_subspace": ("POST", "/api/v1/spaces/{space_id}/subspace-generate"),
    "pipeline.add_user_dimension": ("POST", "/api/v1/spaces/{space_id}/dimensions"),
    "pipeline.suggest_new_dimension": (
        "POST",
        "/api/v1/spaces/{space_id}/dimensions/suggest",
    ),
    "gateway.stream_run": ("GET", "/api/v1/runs/{run_id}/events"),
    "store.create_space": ("POST", "/api/v1/spaces"),
    "store.switch_space": ("POST", "/api/v1/spaces/{space_id}/active"),
    "store.select_node": ("POST", "/api/v1/spaces/{space_id}/nodes/{node_id}/select"),
    "store.toggle_bookmark": ("POST", "/api/v1/spaces/{space_id}/nodes/{node_id}/bookmark"),
    "store.get_document": ("GET", "/api/v1/document"),
    "store.put_document": ("PUT", "/api/v1/document"),
    "store.save": ("POST", "/api/v1/store/save"),
    "store.load": ("POST", "/api/v1/store/load"),
    "explorer.search_keyword": ("GET", "/api/v1/spaces/{space_id}/search"),
    "explorer.filter_nodes": ("POST", "/api/v1/spaces/{space_id}/filter"),
    "explorer.assign_layout": ("POST", "/api/v1/spaces/{space_id}/layout"),
    "explorer.resolve_level": ("GET", "/api/v1/spaces/{space_id}"),
    "explorer.level_payload": ("GET", "/api/v1/spaces/{space_id}"),
}


# -- wire serialization (camelCase, mirrors the documented field names) -----


def dimension_wire(dim: Dimension) -> dict:
    return {
        "name": dim.name,
        "kind": dim.kind.value,
        "origin": dim.origin.value,
        "values": [
            {"label": v.label, **({"rank": v.rank} if v.rank is not None else {})}
            for v in dim.values
        ],
    }


def node_wire(node: ResponseNode) -> dict:
    return {
        "id": node.id,
        "fullText": node.full_text,
        "bundle": {
            "keywords": list(node.bundle.keywords),
            "summary": node.bundle.summary,
            "structure": node.bundle.structure,
            "title": node.bundle.title,
        },
        "requirement": [[name, label] for name, label in node.requirement.items()],
        "bookmarked": node.bookmarked,
        "provenance": node.provenance.value,
        "createdAt": node.created_at,
    }


def space_wire(space: DesignSpace) -> dict:
    return {
        "spaceId": space.space_id,
        "prompt": space.prompt,
        "contextSnapshot": space.context_snapshot,
        "highlightSnapshot": space.highlight_snapshot,
        "parentSpaceId": space.parent_space_id,
        "dimensions": [dimension_wire(d) for d in space.dimensions],
        "nodes": [node_wire(n) for n in space.nodes],
    }


def exploration_wire(state: ExplorationState) -> dict:
    return {
        "xAxis": state.x_axis,
        "yAxis": state.y_axis,
        "filter": {
            "selections": {name: list(labels) for name, labels in state.filter.selections},
            "bookmarkedOnly": state.filter.bookmarked_only,
        },
        "searchQuery": state.search_query,
        "zoomScale": state.zoom_scale,
        "selectedNodeId": state.selected_node_id,
    }


def block_wire(block: Block) -> dict:
    return {
        "id": block.id,
        "kind": block.kind.value,
        "text": block.text,
        "link": (
            {"spaceId": block.link.space_id, "nodeId": block.link.node_id}
            if block.link
            else None
        ),
        "highlighted": block.highlighted,
    }


def document_wire(document: EditorDocument) -> dict:
    return {"blocks": [block_wire(b) for b in document.blocks]}


def layout_wire(assignment: LayoutAssignment) -> dict:
    return {
        "positions": {nid: [x, y] for nid, (x, y) in assignment.positions},
        "xTicks": [[label, coord] for label, coord in assignment.x_ticks],
        "yTicks": [[label, coord] for label, coord in assignment.y_ticks],
    }


def stats_wire(stats: RunStats) -> dict:
    return {
        "requested": stats.requested,
        "produced": stats.produced,
        "failed": stats.failed,
        "calls": stats.calls,
        "error": stats.error,
        "notes": list(stats.notes),
    }


def event_wire(event: GenerationEvent) -> dict:
    if event.kind is EventKind.DIMENSIONS_READY:
        return {"dimensions": [dimension_wire(d) for d in event.payload]}
    if event.kind is EventKind.NODE_READY:
        return {"node": node_wire(event.payload)}
    if event.kind is EventKind.NODE_FAILED:
        failure: NodeFailure = event.payload
        return {
            "failure": {
                "nodeId": failure.node_id,
                "stage": failure.stage,
                "message": failure.message,
            }
        }
    return {"stats": stats_wire(event.payload)}


def _camel_to_snake(name: str) -> str:
    return re.sub(r"(?<!^)(?=[A-Z])", "_", name).lower()


def config_overrides_from_wire(config: dict | None) -> dict | None:
    if not config:
        return None
    return {_camel_to_snake(key): value for key, value in config.items()}


def filter_from_wire(data: "FilterBody | None") -> SubspaceFilter:
    if data is None:
        return SubspaceFilter()
    return SubspaceFilter.of(
        selections=data.selections, bookmarked_only=data.bookmarkedOnly
    )


def block_from_wire(data: "BlockBody") -> Block:
    link = None
    if data.link is not None:
        link = BlockLink(space_id=data.link.spaceId, node_id=data.link.nodeId)
    return Block(
        id=data.id,
        kind=BlockKind(data.kind),
        text=data.text,
        link=link,
        highlighted=data.highlighted,
    )


# -- request bodies ----------------------------------------------------------


class SpaceCreateBody(BaseModel):
    prompt: str
    context: str | None = None
    highlight: str | None = None
    config: dict | None = None


class SimilarBody(BaseModel):
    k: int | None = None


class FilterBody(BaseModel):
    selections: dict[str, list[str]] = {}
    bookmarkedOnly: bool = False


class SubspaceGenerateBody(BaseModel):
    filter: FilterBody
    k: int


class DimensionBody(BaseModel):
    name: str


class SelectionBody(BaseModel):
    x: str | None = None
    y: str | None = None


class ViewportBody(BaseModel):
    width: float
    height: float


class LayoutBody(BaseModel):
    selection: SelectionBody = SelectionBody()
    visible: list[str] | None = None
    viewport: ViewportBody = ViewportBody(width=1000.0, height=800.0)
    seed: int = 0


class FilterRequestBody(BaseModel):
    filter: FilterBody


class LinkBody(BaseModel):
    spaceId: int
    nodeId: str


class BlockBody(BaseModel):
    id: str
    kind: str
    text: str
    link: LinkBody | None = None
    highlighted: bool = False


class DocumentBody(BaseModel):
    blocks: list[BlockBody]


class SaveBody(BaseModel):
    path: str | None = None


class LoadBody(BaseModel):
    path: str


# -- app factory ---------------------------------------------------------------


def _error_response(status: int, code: str, message: str, detail: str = "") -> JSONResponse:
    return JSONResponse(
        status_code=status,
        content={"code": code, "message": message, "detail": detail},
        headers={SCHEMA_VERSION_HEADER: SCHEMA_VERSION},
    )


def create_app(
    pipeline: GenerationPipeline,
    default_store_path: str | None = None,
    ui_dir: str | None = None,
) -> FastAPI:
    app = FastAPI(title="designspace", docs_url=None, redoc_url=None, openapi_url=None)
    store = pipeline.store

    @app.middleware("http")
    async def schema_version_header(request: Request, call_next):
        response = await call_next(request)
        response.headers[SCHEMA_VERSION_HEADER] = SCHEMA_VERSION
        return response

    @app.exception_handler(PreconditionError)
    async def precondition_handler(request: Request, exc: PreconditionError):
        return _error_response(400, "badRequest", str(exc))

    @app.exception_handler(NotFoundError)
    async def not_found_handler(request: Request, exc: NotFoundError):
        return _error_response(404, "notFound", str(exc))

    @app.exception_handler(ExhaustionError)
    async def exhaustion_handler(request: Request, exc: ExhaustionError):
        return _error_response(502, "providerFailure", str(exc))

    @app.exception_handler(TransportError)
    async def transport_handler(request: Request, exc: TransportError):
        return _error_response(502, "providerFailure", str(exc))

    @app.exception_handler(IntegrityError)
    async def integrity_handler(request: Request, exc: IntegrityError):
        return _error_response(409, "integrity", str(exc))

    @app.exception_handler(ValueError)
    async def value_error_handler(request: Request, exc: ValueError):
        return _error_response(400, "badRequest", str(exc))

    @app.exception_handler(RequestValidationError)
    async def validation_handler(request: Request, exc: RequestValidationError):
        return _error_response(400, "badRequest", "invalid request body", str(exc))

    @app.exception_handler(StarletteHTTPException)
    async def http_exception_handler(request: Request, exc: StarletteHTTPException):
        code = "notFound" if exc.status_code == 404 else "badRequest"
        return _error_response(exc.status_code, code, str(exc.detail))

    # -- generation -----------------------------------------------------------

    @app.post(f"{API_PREFIX}/spaces", status_code=202)
    def create_space(body: SpaceCreateBody) -> JSONResponse:
        run = pipeline.start_space_run(
            body.prompt,
            context=body.context or "",
            highlight=body.highlight or "",
            overrides=config_overrides_from_wire(body.config),
        )
        return JSONResponse(
            status_code=202, content={"runId": run.run_id, "spaceId": run.space_id}
        )

    @app.get(f"{API_PREFIX}/runs/{{run_id}}/events")
    def stream_run(run_id: int) -> StreamingResponse:
        run = pipeline.get_run(run_id)

        def feed() -> Iterator[str]:
            for event in run.events():
                payload = json.dumps(event_wire(event), ensure_ascii=False)
                yield f"event: {event.kind.value}\ndata: {payload}\n\n"

        return StreamingResponse(feed(), media_type="text/event-stream")

    @app.post(f"{API_PREFIX}/spaces/{{space_id}}/nodes/{{node_id}}/similar", status_code=202)
    def generate_similar(space_id: int, node_id: str, body: SimilarBody) -> JSONResponse:
        run = pipeline.start_similar_run(space_id, node_id, body.k)
        return JSONResponse(
            status_code=202, content={"runId": run.run_id, "spaceId": run.space_id}
        )

    @app.post(f"{API_PREFIX}/spaces/{{space_id}}/subspace-generate", status_code=202)
    def generate_in_subspace(space_id: int, body: SubspaceGenerateBody) -> JSONResponse:
        run = pipeline.start_subspace_run(space_id, filter_from_wire(body.filter), body.k)
        return JSONResponse(
            status_code=202, content={"runId": run.run_id, "spaceId": run.space_id}
        )

    @app.post(f"{API_PREFIX}/spaces/{{space_id}}/dimensions", status_code=202)
    def add_dimension(space_id: int, body: DimensionBody) -> JSONResponse:
        run = pipeline.start_add_dimension_run(space_id, body.name)
        return JSONResponse(
            status_code=202, content={"runId": run.run_id, "spaceId": run.space_id}
        )

    @app.post(f"{API_PREFIX}/spaces/{{space_id}}/dimensions/suggest")
    def suggest_dimension(space_id: int) -> dict:
        return {"name": pipeline.suggest_new_dimension(space_id)}

    # -- spaces ------------------------------------------------------------------

    @app.get(f"{API_PREFIX}/spaces")
    def list_spaces() -> dict:
        return {
            "activeSpaceId": store.active_space_id,
            "spaces": [space_wire(s) for s in store.list_spaces()],
        }

    @app.get(f"{API_PREFIX}/spaces/{{space_id}}")
    def get_space(space_id: int, scale: float | None = None) -> dict:
        space = store.get_space(space_id)
        result = {
            "space": space_wire(space),
            "exploration": exploration_wire(store.get_exploration(space_id)),
        }
        if scale is not None:
            level = resolve_level(scale)
            result["level"] = LEVEL_WIRE_NAMES[level]
            result["payloads"] = {n.id: level_payload(n, level) for n in space.nodes}
        return result

    @app.post(f"{API_PREFIX}/spaces/{{space_id}}/active")
    def switch_space(space_id: int) -> dict:
        result = store.switch_space(space_id)
        return {
            "activeSpaceId": result.active_space_id,
            "exploration": exploration_wire(result.exploration),
            "changed": result.changed,
        }

    # -- exploration ----------------------------------------------------------------

    @app.get(f"{API_PREFIX}/spaces/{{space_id}}/search")
    def search(space_id: int, q: str = "") -> dict:
        partition = search_keyword(store.get_space(space_id), q)
        return {
            "matched": sorted(partition.matched),
            "dimmed": sorted(partition.dimmed),
        }

    @app.post(f"{API_PREFIX}/spaces/{{space_id}}/filter")
    def apply_filter(space_id: int, body: FilterRequestBody) -> dict:
        flt = filter_from_wire(body.filter)
        matched = filter_nodes(store.get_space(space_id), flt)
        store.update_exploration(space_id, filter=flt)
        return {"matched": sorted(matched)}

    @app.post(f"{API_PREFIX}/spaces/{{space_id}}/layout")
    def layout(space_id: int, body: LayoutBody) -> dict:
        space = store.get_space(space_id)
        selection = AxisSelection(x=body.selection.x, y=body.selection.y)
        assignment = assign_layout(
            space,
            selection,
            Viewport(width=body.viewport.width, height=body.viewport.height),
            visible=body.visible,
            seed=body.seed,
        )
        store.update_exploration(space_id, x_axis=body.selection.x, y_axis=body.selection.y)
        return layout_wire(assignment)

    # -- nodes ------------------------------------------------------------------------

    @app.post(f"{API_PREFIX}/spaces/{{space_id}}/nodes/{{node_id}}/bookmark")
    def bookmark(space_id: int, node_id: str) -> dict:
        return {"bookmarked": store.toggle_bookmark(space_id, node_id)}

    @app.post(f"{API_PREFIX}/spaces/{{space_id}}/nodes/{{node_id}}/select")
    def select(space_id: int, node_id: str) -> dict:
        result = store.select_node(space_id, node_id)
        return {
            "document": document_wire(result.document),
            "blockId": result.block_id,
            "replaced": result.replaced,
        }

    # -- document ----------------------------------------------------------------------

    @app.get(f"{API_PREFIX}/document")
    def get_document() -> dict:
        return document_wire(store.get_document())

    @app.put(f"{API_PREFIX}/document")
    def put_document(body: DocumentBody) -> dict:
        blocks = [block_from_wire(b) for b in body.blocks]
        return document_wire(store.put_document(blocks))

    # -- persistence --------------------------------------------------------------------

    def _default_path() -> str:
        import os

        return default_store_path or os.environ.get(ENV_STORE_PATH, DEFAULT_STORE_PATH)

    @app.post(f"{API_PREFIX}/store/save")
    def save_store(body: SaveBody) -> dict:
        path = store.save(body.path or _default_path())
        return {"path": str(path)}

    @app.post(f"{API_PREFIX}/store/load")
    def load_store(body: LoadBody) -> dict:
        loaded = SpaceStore.load(body.path)
        store.adopt(loaded)
        return {
            "activeSpaceId": store.active_space_id,
            "spaceIds": [s.space_id for s in store.list_spaces()],
        }

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
