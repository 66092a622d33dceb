"""Mutable state owner: spaces, the editor document, per-space exploration
state, and persistence with referential-integrity checks.

Single-writer, multi-reader: every mutation runs under one lock, so commands
apply in a total order. Reads hand out frozen value objects.
"""

from __future__ import annotations

import hashlib
import json
import threading
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping

from .errors import IntegrityError, NotFoundError, PreconditionError
from .model import (
    DesignSpace,
    Dimension,
    DimensionKind,
    DimensionOrigin,
    DimensionValue,
    Provenance,
    Requirement,
    ResponseNode,
    SubspaceFilter,
    SummaryBundle,
    validate_requirement,
)

SCHEMA_VERSION = 1

ENV_STORE_PATH = "DSE_STORE_PATH"
DEFAULT_STORE_PATH = "designspace_store.json"


class BlockKind(str, Enum):
    USER_TEXT = "userText"
    AI_LINKED = "aiLinked"


@dataclass(frozen=True, slots=True)
class BlockLink:
    space_id: int
    node_id: str


@dataclass(frozen=True, slots=True)
class Block:
    id: str
    kind: BlockKind
    text: str
    link: BlockLink | None = None
    highlighted: bool = False

    def __post_init__(self) -> None:
        if self.kind is BlockKind.AI_LINKED and self.link is None:
            raise ValueError("aiLinked blocks must carry a link")


@dataclass(frozen=True, slots=True)
class EditorDocument:
    blocks: tuple[Block, ...] = ()

    def __post_init__(self) -> None:
        ids = [b.id for b in self.blocks]
        if len(set(ids)) != len(ids):
            raise ValueError("block ids must be unique")
        if sum(1 for b in self.blocks if b.highlighted) > 1:
            raise ValueError("at most one block may be highlighted")

    def block(self, block_id: str) -> Block | None:
        for block in self.blocks:
            if block.id == block_id:
                return block
        return None

    def highlighted_block(self) -> Block | None:
        for block in self.blocks:
            if block.highlighted:
                return block
        return None


@dataclass(frozen=True, slots=True)
class ExplorationState:
    """Per-space view state, restored when switching back to the space."""

    x_axis: str | None = None
    y_axis: str | None = None
    filter: SubspaceFilter = SubspaceFilter()
    search_query: str = ""
    zoom_scale: float = 1.0
    selected_node_id: str | None = None


@dataclass(frozen=True, slots=True)
class SwitchResult:
    active_space_id: int
    exploration: ExplorationState
    changed: bool


@dataclass(frozen=True, slots=True)
class SelectResult:
    document: EditorDocument
    block_id: str
    replaced: bool


@dataclass(frozen=True, slots=True)
class StoreSnapshot:
    spaces: tuple[DesignSpace, ...]
    active_space_id: int | None
    document: EditorDocument
    exploration: tuple[tuple[int, ExplorationState], ...]
    next_space_id: int
    node_seqs: tuple[tuple[int, int], ...]
    next_block_seq: int


class SpaceStore:
    """In-memory store for all design spaces and the editor document."""

    def __init__(self) -> None:
        self._lock = threading.RLock()
        self._spaces: dict[int, DesignSpace] = {}
        self._exploration: dict[int, ExplorationState] = {}
        self._active_space_id: int | None = None
        self._document = EditorDocument()
        self._next_space_id = 1
        self._node_seqs: dict[int, int] = {}
        self._next_block_seq = 1

    # -- space lifecycle ---------------------------------------------------

    def create_space(
        self,
        prompt: str,
        context_snapshot: str = "",
        highlight_snapshot: str = "",
        dimensions: Iterable[Dimension] = (),
        parent_space_id: int | None = None,
    ) -> DesignSpace:
        """Store a new space under a fresh monotonic id and make it active."""
        with self._lock:
            if parent_space_id is not None and parent_space_id not in self._spaces:
                raise NotFoundError(f"parent space {parent_space_id} does not exist")
            space_id = self._next_space_id
            self._next_space_id += 1
            space = DesignSpace(
                space_id=space_id,
                prompt=prompt,
                context_snapshot=context_snapshot,
                highlight_snapshot=highlight_snapshot,
                dimensions=tuple(dimensions),
                parent_space_id=parent_space_id,
            )
            self._spaces[space_id] = space
            self._node_seqs[space_id] = 1
            self._exploration[space_id] = ExplorationState()
            self._active_space_id = space_id
            return space

    def get_space(self, space_id: int) -> DesignSpace:
        with self._lock:
            space = self._spaces.get(space_id)
            if space is None:
                raise NotFoundError(f"space {space_id} does not exist")
            return space

    def list_spaces(self) -> tuple[DesignSpace, ...]:
        with self._lock:
            return tuple(self._spaces[sid] for sid in sorted(self._spaces))

    @property
    def active_space_id(self) -> int | None:
        with self._lock:
            return self._active_space_id

    def switch_space(self, space_id: int) -> SwitchResult:
        """Make a space active, restoring its retained exploration state."""
        with self._lock:
            if space_id not in self._spaces:
                raise NotFoundError(f"space {space_id} does not exist")
            changed = space_id != self._active_space_id
            self._active_space_id = space_id
            return SwitchResult(
                active_space_id=space_id,
                exploration=self._exploration[space_id],
                changed=changed,
            )

    # -- dimensions and nodes ----------------------------------------------

    def set_dimensions(self, space_id: int, dimensions: Iterable[Dimension]) -> DesignSpace:
        with self._lock:
            space = self.get_space(space_id)
            if space.nodes:
                raise PreconditionError("cannot replace dimensions once nodes exist")
            updated = space.with_dimensions(tuple(dimensions))
            self._spaces[space_id] = updated
            return updated

    def reserve_node_slot(self, space_id: int) -> tuple[str, int]:
        """Mint the next (node id, creation sequence) pair for a space.

        Reserved slots may go unused when generation fails; sequence numbers
        are never reused either way.
        """
        with self._lock:
            self.get_space(space_id)
            seq = self._node_seqs[space_id]
            self._node_seqs[space_id] = seq + 1
            return f"n{seq}", seq

    def append_node(self, space_id: int, node: ResponseNode) -> ResponseNode:
        """Insert a node, keeping nodes ordered by creation sequence.

        Concurrent generation completes out of order; ordering by the
        reserved sequence keeps the stored space reproducible.
        """
        with self._lock:
            space = self.get_space(space_id)
            if space.node(node.id) is not None:
                raise IntegrityError(f"node id {node.id} already present")
            verdict = validate_requirement(space, node.requirement)
            if not verdict.ok:
                raise IntegrityError(
                    f"node {node.id} requirement invalid: {'; '.join(verdict.violations)}"
                )
            nodes = tuple(
                sorted(space.nodes + (node,), key=lambda n: n.created_at)
            )
            self._spaces[space_id] = space.with_nodes(nodes)
            return node

    def add_dimension_and_extend(
        self, space_id: int, dimension: Dimension, labels: Mapping[str, str]
    ) -> DesignSpace:
        """Append a dimension and extend every node's requirement atomically.

        `labels` must assign one of the dimension's values to every node, so
        requirement coverage never breaks in any observable state.
        """
        with self._lock:
            space = self.get_space(space_id)
            if space.find_dimension(dimension.name) is not None:
                raise PreconditionError(f"duplicate dimension name {dimension.name!r}")
            missing = [n.id for n in space.nodes if n.id not in labels]
            if missing:
                raise PreconditionError(f"missing labels for nodes: {missing}")
            members = set(dimension.labels)
            nodes = []
            for node in space.nodes:
                label = labels[node.id]
                if label not in members:
                    raise PreconditionError(
                        f"label {label!r} is not a value of {dimension.name!r}"
                    )
                nodes.append(
                    replace(node, requirement=node.requirement.extended(dimension.name, label))
                )
            updated = replace(
                space,
                dimensions=space.dimensions + (dimension,),
                nodes=tuple(nodes),
            )
            self._spaces[space_id] = updated
            return updated

    def apply_revision(
        self, space_id: int, node_id: str, full_text: str, bundle: SummaryBundle
    ) -> ResponseNode:
        with self._lock:
            space = self.get_space(space_id)
            node = space.node(node_id)
            if node is None:
                raise NotFoundError(f"node {node_id} does not exist in space {space_id}")
            revised = replace(
                node, full_text=full_text, bundle=bundle, provenance=Provenance.REVISION
            )
            nodes = tuple(revised if n.id == node_id else n for n in space.nodes)
            self._spaces[space_id] = space.with_nodes(nodes)
            return revised

    def toggle_bookmark(self, space_id: int, node_id: str) -> bool:
        with self._lock:
            space = self.get_space(space_id)
            node = space.node(node_id)
            if node is None:
                raise NotFoundError(f"node {node_id} does not exist in space {space_id}")
            toggled = replace(node, bookmarked=not node.bookmarked)
            nodes = tuple(toggled if n.id == node_id else n for n in space.nodes)
            self._spaces[space_id] = space.with_nodes(nodes)
            return toggled.bookmarked

    # -- editor document ----------------------------------------------------

    def get_document(self) -> EditorDocument:
        with self._lock:
            return self._document

    def select_node(self, space_id: int, node_id: str) -> SelectResult:
        """Put a node's full text into the editor as the pending yellow block.

        Replaces the currently highlighted linked block if one exists;
        otherwise appends a new highlighted block.
        """
        with self._lock:
            space = self.get_space(space_id)
            node = space.node(node_id)
            if node is None:
                raise NotFoundError(f"node {node_id} does not exist in space {space_id}")
            link = BlockLink(space_id=space_id, node_id=node_id)
            pending = self._document.highlighted_block()
            if pending is not None and pending.kind is BlockKind.AI_LINKED:
                updated = replace(pending, text=node.full_text, link=link)
                blocks = tuple(
                    updated if b.id == pending.id else b for b in self._document.blocks
                )
                self._document = EditorDocument(blocks=blocks)
                self._set_selected(space_id, node_id)
                return SelectResult(self._document, updated.id, replaced=True)
            block = Block(
                id=self._mint_block_id(),
                kind=BlockKind.AI_LINKED,
                text=node.full_text,
                link=link,
                highlighted=True,
            )
            self._document = EditorDocument(blocks=self._document.blocks + (block,))
            self._set_selected(space_id, node_id)
            return SelectResult(self._document, block.id, replaced=False)

    def edit_block(self, block_id: str, text: str) -> EditorDocument:
        """A user edit: linked blocks lose their highlight and become user text."""
        with self._lock:
            block = self._document.block(block_id)
            if block is None:
                raise NotFoundError(f"block {block_id} does not exist")
            edited = replace(
                block, text=text, kind=BlockKind.USER_TEXT, highlighted=False
            )
            blocks = tuple(edited if b.id == block_id else b for b in self._document.blocks)
            self._document = EditorDocument(blocks=blocks)
            return self._document

    def put_document(self, blocks: Iterable[Block]) -> EditorDocument:
        """Replace the document wholesale, normalizing edited linked blocks."""
        with self._lock:
            normalized = []
            for block in blocks:
                previous = self._document.block(block.id)
                if (
                    previous is not None
                    and previous.kind is BlockKind.AI_LINKED
                    and block.text != previous.text
                ):
                    block = replace(
                        block, kind=BlockKind.USER_TEXT, highlighted=False
                    )
                normalized.append(block)
            document = EditorDocument(blocks=tuple(normalized))
            self._check_links(document)
            self._document = document
            self._bump_block_seq(document)
            return document

    def _set_selected(self, space_id: int, node_id: str) -> None:
        state = self._exploration[space_id]
        self._exploration[space_id] = replace(state, selected_node_id=node_id)

    def _mint_block_id(self) -> str:
        existing = {b.id for b in self._document.blocks}
        while True:
            candidate = f"b{self._next_block_seq}"
            self._next_block_seq += 1
            if candidate not in existing:
                return candidate

    def _bump_block_seq(self, document: EditorDocument) -> None:
        for block in document.blocks:
            if block.id.startswith("b") and block.id[1:].isdigit():
                self._next_block_seq = max(self._next_block_seq, int(block.id[1:]) + 1)

    def _check_links(self, document: EditorDocument) -> None:
        for block in document.blocks:
            if block.link is None:
                continue
            space = self._spaces.get(block.link.space_id)
            if space is None or space.node(block.link.node_id) is None:
                raise IntegrityError(
                    f"block {block.id} links to missing node "
                    f"{block.link.space_id}/{block.link.node_id}"
                )

    # -- exploration state ---------------------------------------------------

    def get_exploration(self, space_id: int) -> ExplorationState:
        with self._lock:
            self.get_space(space_id)
            return self._exploration[space_id]

    def update_exploration(self, space_id: int, **changes) -> ExplorationState:
        with self._lock:
            self.get_space(space_id)
            state = replace(self._exploration[space_id], **changes)
            self._exploration[space_id] = state
            return state

    # -- snapshots and persistence -------------------------------------------

    def snapshot(self) -> StoreSnapshot:
        with self._lock:
            return StoreSnapshot(
                spaces=self.list_spaces(),
                active_space_id=self._active_space_id,
                document=self._document,
                exploration=tuple(sorted(self._exploration.items())),
                next_space_id=self._next_space_id,
                node_seqs=tuple(sorted(self._node_seqs.items())),
                next_block_seq=self._next_block_seq,
            )

    def space_digest(self, space_id: int) -> str:
        """Content hash of one space; used to assert cross-space isolation."""
        payload = json.dumps(space_to_dict(self.get_space(space_id)), sort_keys=True)
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()

    def save(self, path: Path | str) -> Path:
        """Write the whole store as one canonical, diffable JSON document."""
        with self._lock:
            payload = {
                "schema": SCHEMA_VERSION,
                "active_space_id": self._active_space_id,
                "next_space_id": self._next_space_id,
                "next_block_seq": self._next_block_seq,
                "spaces": [
                    {
                        **space_to_dict(space),
                        "next_node_seq": self._node_seqs[space.space_id],
                        "exploration": exploration_to_dict(
                            self._exploration[space.space_id]
                        ),
                    }
                    for space in self.list_spaces()
                ],
                "document": document_to_dict(self._document),
                "tombstones": [],
            }
        target = Path(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        text = json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
        target.write_text(text, encoding="utf-8")
        return target

    def adopt(self, other: "SpaceStore") -> None:
        """Replace this store's contents with another's, keeping references valid."""
        with self._lock, other._lock:
            self._spaces = dict(other._spaces)
            self._exploration = dict(other._exploration)
            self._active_space_id = other._active_space_id
            self._document = other._document
            self._next_space_id = other._next_space_id
            self._node_seqs = dict(other._node_seqs)
            self._next_block_seq = other._next_block_seq

    @classmethod
    def load(cls, path: Path | str) -> "SpaceStore":
        source = Path(path)
        try:
            payload = json.loads(source.read_text(encoding="utf-8"))
        except OSError as exc:
            raise IntegrityError(f"cannot read store file: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise IntegrityError(f"store file is not valid JSON: {exc.msg}") from exc
        if not isinstance(payload, dict) or payload.get("schema") != SCHEMA_VERSION:
            raise IntegrityError(
                f"unsupported store schema: {payload.get('schema')!r}"
                if isinstance(payload, dict)
                else "store file is not an object"
            )

        store = cls()
        try:
            for entry in payload["spaces"]:
                space = space_from_dict(entry)
                store._spaces[space.space_id] = space
                store._node_seqs[space.space_id] = int(entry["next_node_seq"])
                store._exploration[space.space_id] = exploration_from_dict(
                    entry.get("exploration", {})
                )
            store._active_space_id = payload["active_space_id"]
            store._next_space_id = int(payload["next_space_id"])
            store._next_block_seq = int(payload.get("next_block_seq", 1))
            store._document = document_from_dict(payload["document"])
        except (KeyError, TypeError, ValueError) as exc:
            raise IntegrityError(f"store file is structurally invalid: {exc}") from exc

        store._verify_integrity()
        return store

    def _verify_integrity(self) -> None:
        if self._active_space_id is not None and self._active_space_id not in self._spaces:
            raise IntegrityError(f"active space {self._active_space_id} does not exist")
        for space in self._spaces.values():
            if space.parent_space_id is not None and space.parent_space_id not in self._spaces:
                raise IntegrityError(
                    f"space {space.space_id} references missing parent {space.parent_space_id}"
                )
            if space.space_id >= self._next_space_id:
                raise IntegrityError("space id counter is behind stored spaces")
            seq = self._node_seqs.get(space.space_id, 0)
            for node in space.nodes:
                verdict = validate_requirement(space, node.requirement)
                if not verdict.ok:
                    raise IntegrityError(
                        f"node {node.id} in space {space.space_id} fails validation: "
                        f"{'; '.join(verdict.violations)}"
                    )
                if node.created_at >= seq:
                    raise IntegrityError("node seq counter is behind stored nodes")
            state = self._exploration[space.space_id]
            if state.selected_node_id is not None and space.node(state.selected_node_id) is None:
                raise IntegrityError(
                    f"exploration state of space {space.space_id} selects a missing node"
                )
        self._check_links(self._document)


# -- serialization ---------------------------------------------------------


def dimension_to_dict(dim: Dimension) -> dict:
    return {
        "name": dim.name,
        "kind": dim.kind.value,
        "origin": dim.origin.value,
        "values": [
            {"label": v.label, **({"rank": v.rank} if v.rank is not None else {})}
            for v in dim.values
        ],
    }


def dimension_from_dict(data: Mapping) -> Dimension:
    values = tuple(
        DimensionValue(label=v["label"], rank=v.get("rank")) for v in data["values"]
    )
    return Dimension(
        name=data["name"],
        kind=DimensionKind(data["kind"]),
        values=values,
        origin=DimensionOrigin(data["origin"]),
    )


def bundle_to_dict(bundle: SummaryBundle) -> dict:
    return {
        "keywords": list(bundle.keywords),
        "summary": bundle.summary,
        "structure": bundle.structure,
        "title": bundle.title,
    }


def bundle_from_dict(data: Mapping) -> SummaryBundle:
    return SummaryBundle(
        keywords=tuple(data["keywords"]),
        summary=data["summary"],
        structure=data["structure"],
        title=data["title"],
    )


def node_to_dict(node: ResponseNode) -> dict:
    return {
        "id": node.id,
        "full_text": node.full_text,
        "bundle": bundle_to_dict(node.bundle),
        "requirement": [[name, label] for name, label in node.requirement.items()],
        "bookmarked": node.bookmarked,
        "provenance": node.provenance.value,
        "created_at": node.created_at,
    }


def node_from_dict(data: Mapping) -> ResponseNode:
    return ResponseNode(
        id=data["id"],
        full_text=data["full_text"],
        bundle=bundle_from_dict(data["bundle"]),
        requirement=Requirement.of([(n, v) for n, v in data["requirement"]]),
        bookmarked=bool(data["bookmarked"]),
        provenance=Provenance(data["provenance"]),
        created_at=int(data["created_at"]),
    )


def space_to_dict(space: DesignSpace) -> dict:
    return {
        "space_id": space.space_id,
        "prompt": space.prompt,
        "context_snapshot": space.context_snapshot,
        "highlight_snapshot": space.highlight_snapshot,
        "parent_space_id": space.parent_space_id,
        "dimensions": [dimension_to_dict(d) for d in space.dimensions],
        "nodes": [node_to_dict(n) for n in space.nodes],
    }


def space_from_dict(data: Mapping) -> DesignSpace:
    return DesignSpace(
        space_id=int(data["space_id"]),
        prompt=data["prompt"],
        context_snapshot=data.get("context_snapshot", ""),
        highlight_snapshot=data.get("highlight_snapshot", ""),
        dimensions=tuple(dimension_from_dict(d) for d in data["dimensions"]),
        nodes=tuple(node_from_dict(n) for n in data["nodes"]),
        parent_space_id=data.get("parent_space_id"),
    )


def filter_to_dict(flt: SubspaceFilter) -> dict:
    return {
        "selections": {name: sorted(labels) for name, labels in flt.selections},
        "bookmarked_only": flt.bookmarked_only,
    }


def filter_from_dict(data: Mapping) -> SubspaceFilter:
    return SubspaceFilter.of(
        selections=data.get("selections", {}),
        bookmarked_only=bool(data.get("bookmarked_only", False)),
    )


def exploration_to_dict(state: ExplorationState) -> dict:
    return {
        "x_axis": state.x_axis,
        "y_axis": state.y_axis,
        "filter": filter_to_dict(state.filter),
        "search_query": state.search_query,
        "zoom_scale": state.zoom_scale,
        "selected_node_id": state.selected_node_id,
    }


def exploration_from_dict(data: Mapping) -> ExplorationState:
    return ExplorationState(
        x_axis=data.get("x_axis"),
        y_axis=data.get("y_axis"),
        filter=filter_from_dict(data.get("filter", {})),
        search_query=data.get("search_query", ""),
        zoom_scale=float(data.get("zoom_scale", 1.0)),
        selected_node_id=data.get("selected_node_id"),
    )


def block_to_dict(block: Block) -> dict:
    return {
        "id": block.id,
        "kind": block.kind.value,
        "text": block.text,
        "link": (
            {"space_id": block.link.space_id, "node_id": block.link.node_id}
            if block.link
            else None
        ),
        "highlighted": block.highlighted,
    }


def block_from_dict(data: Mapping) -> Block:
    link_data = data.get("link")
    return Block(
        id=data["id"],
        kind=BlockKind(data["kind"]),
        text=data["text"],
        link=(
            BlockLink(space_id=int(link_data["space_id"]), node_id=link_data["node_id"])
            if link_data
            else None
        ),
        highlighted=bool(data.get("highlighted", False)),
    )


def document_to_dict(document: EditorDocument) -> dict:
    return {"blocks": [block_to_dict(b) for b in document.blocks]}


def document_from_dict(data: Mapping) -> EditorDocument:
    return EditorDocument(blocks=tuple(block_from_dict(b) for b in data["blocks"]))
