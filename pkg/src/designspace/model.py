"""Immutable domain types for dimension-guided design spaces.

Everything here is a frozen value object. Mutation happens only through the
space store, which swaps whole instances; values can be shared freely across
threads.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterable, Iterator, Mapping

ORDINAL_LEVELS: tuple[str, ...] = ("least", "less", "neutral", "more", "most")


class DimensionKind(str, Enum):
    NOMINAL = "nominal"
    ORDINAL = "ordinal"


class DimensionOrigin(str, Enum):
    GENERATED = "generated"
    USER_DEFINED = "user-defined"


class Provenance(str, Enum):
    INITIAL = "initial"
    MORE_LIKE_THIS = "more-like-this"
    SUBSPACE = "subspace"
    REVISION = "revision"


def word_count(text: str) -> int:
    """Number of whitespace-separated tokens."""
    return len(text.split())


def truncate_words(text: str, limit: int) -> str:
    """First `limit` whitespace-separated tokens, joined by single spaces."""
    words = text.split()
    if len(words) <= limit:
        return text.strip()
    return " ".join(words[:limit])


@dataclass(frozen=True, slots=True)
class DimensionValue:
    """One categorical option; ordinal values carry their canonical rank."""

    label: str
    rank: int | None = None

    def __post_init__(self) -> None:
        if not self.label or not self.label.strip():
            raise ValueError("dimension value label must be nonempty")
        if self.rank is not None and not 0 <= self.rank <= 4:
            raise ValueError(f"ordinal rank out of range: {self.rank}")


def canonical_ordinal_values() -> tuple[DimensionValue, ...]:
    return tuple(DimensionValue(label, rank) for rank, label in enumerate(ORDINAL_LEVELS))


@dataclass(frozen=True, slots=True)
class Dimension:
    """A named axis of the design space with its ordered value labels."""

    name: str
    kind: DimensionKind
    values: tuple[DimensionValue, ...]
    origin: DimensionOrigin = DimensionOrigin.GENERATED

    def __post_init__(self) -> None:
        if not self.name or not self.name.strip():
            raise ValueError("dimension name must be nonempty")
        if self.kind is DimensionKind.ORDINAL:
            if self.values != canonical_ordinal_values():
                raise ValueError(
                    f"ordinal dimension {self.name!r} must carry the canonical "
                    f"levels {list(ORDINAL_LEVELS)} with ranks 0..4"
                )
        else:
            if len(self.values) < 2:
                raise ValueError(
                    f"nominal dimension {self.name!r} needs at least 2 values"
                )
            lowered = [v.label.casefold() for v in self.values]
            if len(set(lowered)) != len(lowered):
                raise ValueError(f"duplicate value labels in dimension {self.name!r}")
            if any(v.rank is not None for v in self.values):
                raise ValueError("nominal values must not carry ranks")

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(v.label for v in self.values)

    @classmethod
    def nominal(
        cls,
        name: str,
        labels: Iterable[str],
        origin: DimensionOrigin = DimensionOrigin.GENERATED,
    ) -> "Dimension":
        values = tuple(DimensionValue(label) for label in labels)
        return cls(name=name, kind=DimensionKind.NOMINAL, values=values, origin=origin)

    @classmethod
    def ordinal(
        cls, name: str, origin: DimensionOrigin = DimensionOrigin.GENERATED
    ) -> "Dimension":
        return cls(
            name=name,
            kind=DimensionKind.ORDINAL,
            values=canonical_ordinal_values(),
            origin=origin,
        )


@dataclass(frozen=True, slots=True)
class Requirement:
    """One value label per dimension; the generation contract for one response.

    Assignment order is the dimension declaration order of the owning space
    and is preserved through prompt rendering and persistence.
    """

    assignments: tuple[tuple[str, str], ...]

    @classmethod
    def of(cls, pairs: Mapping[str, str] | Iterable[tuple[str, str]]) -> "Requirement":
        items = pairs.items() if isinstance(pairs, Mapping) else pairs
        return cls(assignments=tuple((str(n), str(v)) for n, v in items))

    def items(self) -> Iterator[tuple[str, str]]:
        return iter(self.assignments)

    def as_dict(self) -> dict[str, str]:
        return dict(self.assignments)

    def label_for(self, dimension_name: str) -> str | None:
        for name, label in self.assignments:
            if name == dimension_name:
                return label
        return None

    def extended(self, dimension_name: str, label: str) -> "Requirement":
        if self.label_for(dimension_name) is not None:
            raise ValueError(f"requirement already assigns {dimension_name!r}")
        return Requirement(assignments=self.assignments + ((dimension_name, label),))

    def __len__(self) -> int:
        return len(self.assignments)


@dataclass(frozen=True, slots=True)
class SummaryBundle:
    """Per-response abstractions rendered at the intermediate zoom levels."""

    keywords: tuple[str, ...]
    summary: str
    structure: str
    title: str

    KEYWORD_CAP = 5
    SUMMARY_WORD_CAP = 20
    TITLE_WORD_CAP = 5

    def __post_init__(self) -> None:
        if not self.keywords or len(self.keywords) > self.KEYWORD_CAP:
            raise ValueError(f"keywords must number 1..{self.KEYWORD_CAP}")
        if any(not k.strip() for k in self.keywords):
            raise ValueError("keywords must be nonempty")
        if not self.summary.strip() or word_count(self.summary) > self.SUMMARY_WORD_CAP:
            raise ValueError(f"summary must be 1..{self.SUMMARY_WORD_CAP} words")
        if not self.title.strip() or word_count(self.title) > self.TITLE_WORD_CAP:
            raise ValueError(f"title must be 1..{self.TITLE_WORD_CAP} words")
        if not self.structure.strip():
            raise ValueError("structure must be nonempty")

    @property
    def parts(self) -> tuple[str, ...]:
        return tuple(p for p in self.structure.split("-") if p)


@dataclass(frozen=True, slots=True)
class ResponseNode:
    """One generated artifact with its abstractions and requirement labels."""

    id: str
    full_text: str
    bundle: SummaryBundle
    requirement: Requirement
    bookmarked: bool = False
    provenance: Provenance = Provenance.INITIAL
    created_at: int = 0


@dataclass(frozen=True, slots=True)
class DesignSpace:
    """A prompt, its context snapshots, its dimensions, and its nodes."""

    space_id: int
    prompt: str
    context_snapshot: str = ""
    highlight_snapshot: str = ""
    dimensions: tuple[Dimension, ...] = ()
    nodes: tuple[ResponseNode, ...] = ()
    parent_space_id: int | None = None

    def __post_init__(self) -> None:
        names = [d.name.casefold() for d in self.dimensions]
        if len(set(names)) != len(names):
            raise ValueError("dimension names must be unique (case-insensitive)")
        ids = [n.id for n in self.nodes]
        if len(set(ids)) != len(ids):
            raise ValueError("node ids must be unique within a space")

    def find_dimension(self, name: str) -> Dimension | None:
        """Case-insensitive dimension lookup."""
        wanted = name.casefold()
        for dim in self.dimensions:
            if dim.name.casefold() == wanted:
                return dim
        return None

    def node(self, node_id: str) -> ResponseNode | None:
        for node in self.nodes:
            if node.id == node_id:
                return node
        return None

    def with_dimensions(self, dimensions: tuple[Dimension, ...]) -> "DesignSpace":
        return replace(self, dimensions=dimensions)

    def with_nodes(self, nodes: tuple[ResponseNode, ...]) -> "DesignSpace":
        return replace(self, nodes=nodes)


@dataclass(frozen=True, slots=True)
class SubspaceFilter:
    """Accepted value labels per dimension, plus an optional bookmark gate.

    An empty selections map passes every node (modulo the bookmark gate).
    """

    selections: tuple[tuple[str, tuple[str, ...]], ...] = ()
    bookmarked_only: bool = False

    @classmethod
    def of(
        cls,
        selections: Mapping[str, Iterable[str]] | None = None,
        bookmarked_only: bool = False,
    ) -> "SubspaceFilter":
        pairs: list[tuple[str, tuple[str, ...]]] = []
        for name, labels in (selections or {}).items():
            deduped = dict.fromkeys(str(v) for v in labels)
            pairs.append((str(name), tuple(sorted(deduped))))
        pairs.sort(key=lambda item: item[0])
        return cls(selections=tuple(pairs), bookmarked_only=bookmarked_only)

    def as_dict(self) -> dict[str, tuple[str, ...]]:
        return dict(self.selections)

    def is_empty(self) -> bool:
        return not self.selections and not self.bookmarked_only


def validate_filter(space: DesignSpace, flt: SubspaceFilter) -> None:
    """Raise PreconditionError unless every filtered dimension and label exists."""
    from .errors import PreconditionError

    for name, labels in flt.selections:
        dim = space.find_dimension(name)
        if dim is None:
            raise PreconditionError(f"unknown dimension in filter: {name!r}")
        if not labels:
            raise PreconditionError(f"empty accepted set for dimension {name!r}")
        members = set(dim.labels)
        for label in labels:
            if label not in members:
                raise PreconditionError(
                    f"label {label!r} is not a value of dimension {dim.name!r}"
                )


@dataclass(frozen=True, slots=True)
class ValidationResult:
    """Verdict of a requirement check; a verdict, never a failure."""

    violations: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_requirement(space: DesignSpace, req: Requirement) -> ValidationResult:
    """Check that `req` covers exactly the space's dimensions with member labels."""
    violations: list[str] = []
    assigned = req.as_dict()
    declared = {d.name: d for d in space.dimensions}

    for name in declared:
        if name not in assigned:
            violations.append(f"missing dimension {name}")
    for name, label in req.items():
        dim = declared.get(name)
        if dim is None:
            violations.append(f"unknown dimension {name}")
        elif label not in dim.labels:
            violations.append(f"label not in dimension {name}: {label}")
    return ValidationResult(violations=tuple(violations))


@dataclass(frozen=True, slots=True)
class GenerationConfig:
    """Tunable caps and sampling parameters for the generation pipeline."""

    nominal_count: int = 5
    nominal_value_cap: int = 8
    ordinal_count: int = 3
    response_count: int = 40
    word_limit: int = 150
    similar_count: int = 5
    retry_limit: int = 3
    rng_seed: int | None = None
    sampling_temperature: float = 0.7
    max_concurrent_calls: int = 8

    def __post_init__(self) -> None:
        for name in (
            "nominal_count",
            "ordinal_count",
            "response_count",
            "word_limit",
            "similar_count",
            "retry_limit",
            "max_concurrent_calls",
        ):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.nominal_value_cap < 2:
            raise ValueError("nominal_value_cap must be >= 2")

    @classmethod
    def from_dict(cls, data: Mapping[str, object]) -> "GenerationConfig":
        known = {f.name for f in cls.__dataclass_fields__.values()}  # type: ignore[attr-defined]
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)  # type: ignore[arg-type]
