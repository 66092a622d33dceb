"""Parsers for the structured outputs the prompts demand.

All parsers raise ParseFailure on bad input; they never abort the process.
The provider retry loop treats each ParseFailure as one failed attempt.
"""

from __future__ import annotations

import json
from typing import Iterable, Sequence

from ..errors import ParseFailure
from ..model import (
    Dimension,
    DimensionKind,
    DimensionOrigin,
    SummaryBundle,
    truncate_words,
)

SUMMARY_FIELDS = ("Key Words", "Summary", "Structure", "Title")


def extract_object_text(raw: str) -> str:
    """Strip everything outside the outermost brace pair.

    Tolerates code fences and leading/trailing prose from chatty models; a
    missing brace pair is still a parse failure.
    """
    start = raw.find("{")
    end = raw.rfind("}")
    if start == -1 or end == -1 or end < start:
        raise ParseFailure("malformed object: no brace pair found", raw=raw)
    return raw[start : end + 1]


def _load_object(raw: str) -> dict:
    try:
        value = json.loads(extract_object_text(raw))
    except json.JSONDecodeError as exc:
        raise ParseFailure(f"malformed object: {exc.msg}", raw=raw) from exc
    if not isinstance(value, dict):
        raise ParseFailure("malformed object: not a JSON object", raw=raw)
    return value


def _dedupe_labels(labels: Iterable[str]) -> list[str]:
    """Case-insensitive de-duplication, first occurrence wins."""
    seen: set[str] = set()
    out: list[str] = []
    for label in labels:
        key = label.casefold()
        if key and key not in seen:
            seen.add(key)
            out.append(label)
    return out


def parse_dimension_object(
    raw: str,
    kind: DimensionKind,
    expected_count: int,
    value_cap: int,
    origin: DimensionOrigin = DimensionOrigin.GENERATED,
) -> tuple[Dimension, ...]:
    """Parse `{name: [values, ...], ...}` into dimensions of the given kind.

    Fewer entries than expected is a parse failure; surplus entries are
    dropped beyond `expected_count` (the configured cap wins over model
    oversupply). Ordinal value lists are discarded in favor of the canonical
    five levels. Nominal values are de-duplicated case-insensitively and
    truncated to `value_cap`.
    """
    obj = _load_object(raw)

    entries: list[tuple[str, object]] = []
    seen_names: set[str] = set()
    for key, value in obj.items():
        name = str(key).strip()
        if not name or name.casefold() in seen_names:
            continue
        seen_names.add(name.casefold())
        entries.append((name, value))

    if len(entries) < expected_count:
        raise ParseFailure(
            f"expected {expected_count} entries, got {len(entries)}", raw=raw
        )
    entries = entries[:expected_count]

    dimensions: list[Dimension] = []
    for name, value in entries:
        if kind is DimensionKind.ORDINAL:
            dimensions.append(Dimension.ordinal(name, origin=origin))
            continue
        if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
            raise ParseFailure(f"values of {name!r} must be a text array", raw=raw)
        labels = _dedupe_labels(v.strip() for v in value)[:value_cap]
        if len(labels) < 2:
            raise ParseFailure(
                f"dimension {name!r} needs at least 2 distinct values", raw=raw
            )
        dimensions.append(Dimension.nominal(name, labels, origin=origin))
    return tuple(dimensions)


def serialize_dimension_object(dimensions: Sequence[Dimension]) -> str:
    """Inverse of parse_dimension_object for round-trip checks and fixtures."""
    return json.dumps(
        {dim.name: list(dim.labels) for dim in dimensions}, indent=2, ensure_ascii=False
    )


def parse_summary_object(raw: str) -> SummaryBundle:
    """Parse the four-field summary object, truncating over-cap fields."""
    obj = _load_object(raw)
    for field_name in SUMMARY_FIELDS:
        if field_name not in obj:
            raise ParseFailure(f"missing field {field_name}", raw=raw)

    keywords_raw = obj["Key Words"]
    if not isinstance(keywords_raw, list) or not all(
        isinstance(k, str) for k in keywords_raw
    ):
        raise ParseFailure("Key Words must be a text array", raw=raw)
    keywords = tuple(k.strip() for k in keywords_raw if k.strip())[
        : SummaryBundle.KEYWORD_CAP
    ]

    def _text_field(name: str) -> str:
        value = obj[name]
        if not isinstance(value, str) or not value.strip():
            raise ParseFailure(f"field {name} must be nonempty text", raw=raw)
        return value.strip()

    try:
        return SummaryBundle(
            keywords=keywords,
            summary=truncate_words(_text_field("Summary"), SummaryBundle.SUMMARY_WORD_CAP),
            structure=_text_field("Structure"),
            title=truncate_words(_text_field("Title"), SummaryBundle.TITLE_WORD_CAP),
        )
    except ValueError as exc:
        raise ParseFailure(str(exc), raw=raw) from exc


def parse_response_text(raw: str) -> str:
    """Free-text completion: anything nonempty, stripped."""
    text = raw.strip()
    if not text:
        raise ParseFailure("empty completion", raw=raw)
    return text


def parse_dimension_name(raw: str, existing_names: Iterable[str]) -> str:
    """A bare dimension name; collisions with existing names are failures."""
    text = raw.strip().strip('"').strip("'").strip("`").strip()
    if not text:
        raise ParseFailure("empty dimension name", raw=raw)
    name = text.splitlines()[0].strip()
    if not name:
        raise ParseFailure("empty dimension name", raw=raw)
    taken = {n.casefold() for n in existing_names}
    if name.casefold() in taken:
        raise ParseFailure(f"dimension name {name!r} already exists", raw=raw)
    return name
