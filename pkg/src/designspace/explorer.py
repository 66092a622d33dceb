"""Pure query and layout algebra over a design space.

Everything here reads immutable snapshots and returns new values; nothing
mutates the store. All positions are deterministic for a given
(space, selection, visible set, viewport, seed).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from enum import IntEnum
from typing import Iterable

from .errors import PreconditionError
from .model import DesignSpace, ResponseNode, SubspaceFilter, validate_filter

CLUSTER_RADIUS_FACTOR = 0.25
COLUMN_SPREAD_FACTOR = 0.8
STACK_JITTER_FACTOR = 0.25


class SemanticLevel(IntEnum):
    """The five detail levels, totally ordered from coarsest to finest."""

    DOT = 0
    TITLE = 1
    KEYWORD = 2
    SUMMARY = 3
    FULL_TEXT = 4


LEVEL_WIRE_NAMES = {
    SemanticLevel.DOT: "dot",
    SemanticLevel.TITLE: "title",
    SemanticLevel.KEYWORD: "keyword",
    SemanticLevel.SUMMARY: "summary",
    SemanticLevel.FULL_TEXT: "fullText",
}

# Zoom bands; the wide middle band keeps Summary the default working level.
ZOOM_BANDS = (
    (0.25, SemanticLevel.DOT),
    (0.5, SemanticLevel.TITLE),
    (0.75, SemanticLevel.KEYWORD),
    (1.5, SemanticLevel.SUMMARY),
)


def resolve_level(zoom_scale: float) -> SemanticLevel:
    """Map a zoom scale onto a semantic level; monotone and total for scale > 0."""
    if zoom_scale <= 0:
        raise PreconditionError("zoom scale must be positive")
    for upper, level in ZOOM_BANDS:
        if zoom_scale < upper:
            return level
    return SemanticLevel.FULL_TEXT


def level_payload(node: ResponseNode, level: SemanticLevel) -> dict:
    """The display record a node renders at the given level."""
    if level is SemanticLevel.DOT:
        return {"id": node.id}
    if level is SemanticLevel.TITLE:
        return {"id": node.id, "title": node.bundle.title}
    if level is SemanticLevel.KEYWORD:
        return {"id": node.id, "keywords": list(node.bundle.keywords)}
    if level is SemanticLevel.SUMMARY:
        return {
            "id": node.id,
            "summary": node.bundle.summary,
            "tags": [f"{name}: {label}" for name, label in node.requirement.items()],
        }
    return {"id": node.id, "fullText": node.full_text}


@dataclass(frozen=True, slots=True)
class SearchPartition:
    matched: frozenset[str]
    dimmed: frozenset[str]


def search_keyword(space: DesignSpace, query: str) -> SearchPartition:
    """Case-insensitive substring match over node full text.

    An empty query matches everything. matched and dimmed always partition
    the space's node ids.
    """
    needle = query.casefold()
    matched = frozenset(
        node.id for node in space.nodes if needle in node.full_text.casefold()
    )
    dimmed = frozenset(node.id for node in space.nodes) - matched
    return SearchPartition(matched=matched, dimmed=dimmed)


def filter_nodes(space: DesignSpace, flt: SubspaceFilter) -> frozenset[str]:
    """Ids of nodes whose requirement labels pass every filtered dimension."""
    validate_filter(space, flt)
    accepted = {
        space.find_dimension(name).name: set(labels) for name, labels in flt.selections
    }
    result = []
    for node in space.nodes:
        if flt.bookmarked_only and not node.bookmarked:
            continue
        labels = node.requirement.as_dict()
        if all(labels.get(dim) in values for dim, values in accepted.items()):
            result.append(node.id)
    return frozenset(result)


@dataclass(frozen=True, slots=True)
class AxisSelection:
    x: str | None = None
    y: str | None = None


@dataclass(frozen=True, slots=True)
class Viewport:
    width: float
    height: float

    def __post_init__(self) -> None:
        if self.width <= 0 or self.height <= 0:
            raise PreconditionError("viewport must have positive extent")


@dataclass(frozen=True, slots=True)
class LayoutAssignment:
    positions: tuple[tuple[str, tuple[float, float]], ...]
    x_ticks: tuple[tuple[str, float], ...] = ()
    y_ticks: tuple[tuple[str, float], ...] = ()

    def position_of(self, node_id: str) -> tuple[float, float]:
        for nid, pos in self.positions:
            if nid == node_id:
                return pos
        raise KeyError(node_id)

    def as_dict(self) -> dict[str, tuple[float, float]]:
        return dict(self.positions)


def _resolve_axes(space: DesignSpace, selection: AxisSelection) -> tuple[str | None, str | None]:
    resolved = []
    for axis in (selection.x, selection.y):
        if axis is None:
            resolved.append(None)
            continue
        dim = space.find_dimension(axis)
        if dim is None:
            raise PreconditionError(f"unknown dimension on axis: {axis!r}")
        resolved.append(dim.name)
    x, y = resolved
    if x is not None and x == y:
        raise PreconditionError("x and y must select different dimensions")
    return x, y


def _tick_coords(count: int, extent: float) -> list[float]:
    return [(index + 0.5) * extent / count for index in range(count)]


def assign_layout(
    space: DesignSpace,
    selection: AxisSelection,
    viewport: Viewport,
    visible: Iterable[str] | None = None,
    seed: int = 0,
) -> LayoutAssignment:
    """Deterministic positions for the visible nodes under an axis selection.

    No axes: one centered cluster inside a seeded jitter disk. One axis:
    a column per value label, nodes stacked within their label's column,
    x pinned to the tick coordinate. Two axes: nodes pinned to their
    (x label, y label) grid cell coordinates.
    """
    x_dim_name, y_dim_name = _resolve_axes(space, selection)
    if visible is None:
        nodes = list(space.nodes)
    else:
        wanted = set(visible)
        unknown = wanted - {n.id for n in space.nodes}
        if unknown:
            raise PreconditionError(f"unknown node ids in visible set: {sorted(unknown)}")
        nodes = [n for n in space.nodes if n.id in wanted]

    rng = random.Random(seed)
    center_x, center_y = viewport.width / 2, viewport.height / 2

    if x_dim_name is None and y_dim_name is None:
        radius = CLUSTER_RADIUS_FACTOR * min(viewport.width, viewport.height)
        positions = []
        for node in nodes:
            r = radius * math.sqrt(rng.random())
            theta = 2 * math.pi * rng.random()
            positions.append(
                (node.id, (center_x + r * math.cos(theta), center_y + r * math.sin(theta)))
            )
        return LayoutAssignment(positions=tuple(positions))

    if x_dim_name is not None and y_dim_name is not None:
        x_labels = list(space.find_dimension(x_dim_name).labels)
        y_labels = list(space.find_dimension(y_dim_name).labels)
        x_ticks = tuple(zip(x_labels, _tick_coords(len(x_labels), viewport.width)))
        y_ticks = tuple(zip(y_labels, _tick_coords(len(y_labels), viewport.height)))
        x_of, y_of = dict(x_ticks), dict(y_ticks)
        positions = []
        for node in nodes:
            labels = node.requirement.as_dict()
            positions.append(
                (node.id, (x_of[labels[x_dim_name]], y_of[labels[y_dim_name]]))
            )
        return LayoutAssignment(
            positions=tuple(positions), x_ticks=x_ticks, y_ticks=y_ticks
        )

    # One axis: a column (or row) per label; nodes stack along the free axis.
    along_x = x_dim_name is not None
    primary = x_dim_name if along_x else y_dim_name
    labels_in_order = list(space.find_dimension(primary).labels)
    axis_extent = viewport.width if along_x else viewport.height
    free_extent = viewport.height if along_x else viewport.width
    free_center = center_y if along_x else center_x
    ticks = tuple(zip(labels_in_order, _tick_coords(len(labels_in_order), axis_extent)))
    coord_of = dict(ticks)

    groups: dict[str, list[ResponseNode]] = {label: [] for label in labels_in_order}
    for node in nodes:
        groups[node.requirement.label_for(primary)].append(node)
    positions = []
    spread = COLUMN_SPREAD_FACTOR * free_extent
    for label in labels_in_order:
        members = groups[label]
        count = len(members)
        step = spread / max(count, 1)
        for index, node in enumerate(members):
            offset = (index - (count - 1) / 2) * step
            jitter = (rng.random() - 0.5) * step * STACK_JITTER_FACTOR
            free_coord = free_center + offset + jitter
            if along_x:
                positions.append((node.id, (coord_of[label], free_coord)))
            else:
                positions.append((node.id, (free_coord, coord_of[label])))
    if along_x:
        return LayoutAssignment(positions=tuple(positions), x_ticks=ticks)
    return LayoutAssignment(positions=tuple(positions), y_ticks=ticks)
