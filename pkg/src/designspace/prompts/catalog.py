"""Template loading, prompt constants, and the rendered-prompt value type.

Templates live as plain UTF-8 files next to this module, one file per
constant or template, with named placeholders in double braces.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from pathlib import Path

TEMPLATE_DIR = Path(__file__).parent / "templates"

_PLACEHOLDER_RE = re.compile(r"\{\{([a-z_]+)\}\}")


class PromptKind(str, Enum):
    NOMINAL_DIMS = "nominalDims"
    ORDINAL_DIMS = "ordinalDims"
    RESPONSE = "response"
    NEW_DIMENSION = "newDimension"
    SUMMARIZATION = "summarization"


class ExpectedShape(str, Enum):
    """Schema tag telling the caller which parser the completion needs."""

    DIMENSION_OBJECT = "dimension_object"
    SUMMARY_OBJECT = "summary_object"
    DIMENSION_NAME = "dimension_name"
    FREE_TEXT = "free_text"


@dataclass(frozen=True, slots=True)
class RenderedPrompt:
    kind: PromptKind
    text: str
    expected_shape: ExpectedShape

    def __post_init__(self) -> None:
        leftover = _PLACEHOLDER_RE.search(self.text)
        if leftover:
            raise ValueError(f"unresolved placeholder {leftover.group(0)}")


@lru_cache(maxsize=None)
def load_template(name: str) -> str:
    return (TEMPLATE_DIR / f"{name}.txt").read_text(encoding="utf-8")


def fill(template: str, **values: str) -> str:
    """Substitute {{name}} placeholders; unknown names are left for the caller."""
    out = template
    for key, val in values.items():
        out = out.replace("{{" + key + "}}", val)
    return out


def word_limit_text(word_count: int) -> str:
    return fill(load_template("word_limit"), word_count=str(word_count))


def _composed(body_name: str) -> str:
    return "\n".join(
        (
            load_template("dimension_def"),
            load_template(body_name),
            load_template("dimension_conclusion"),
        )
    )


def prompt_constants() -> dict[str, str]:
    """The five pinned prompt constants, keyed by their catalog names."""
    return {
        "dimensionDef": load_template("dimension_def"),
        "dimensionConclusion": load_template("dimension_conclusion"),
        "nominalDimensionDef": _composed("nominal_dimension_body"),
        "ordinalDimensionDef": _composed("ordinal_dimension_body"),
        "wordLimit": word_limit_text(150),
    }


def normalize_whitespace(text: str) -> str:
    """Canonical whitespace form used for golden-file comparison.

    Per line: collapse internal whitespace runs to one space and strip the
    ends; drop lines left empty. Rendered prompts are already in this form,
    so normalization is idempotent on them.
    """
    lines = []
    for line in text.splitlines():
        collapsed = " ".join(line.split())
        if collapsed:
            lines.append(collapsed)
    return "\n".join(lines)
