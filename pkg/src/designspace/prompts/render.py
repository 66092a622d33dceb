"""Prompt renderers for every completion call the pipeline issues."""

from __future__ import annotations

from typing import Iterable, Sequence

from ..errors import PreconditionError
from ..model import Dimension, Requirement
from .catalog import (
    ExpectedShape,
    PromptKind,
    RenderedPrompt,
    fill,
    load_template,
    word_limit_text,
)


def render_context_prefix(background: str) -> str:
    return fill(load_template("context_prefix"), background=background)


def format_dimension_lines(dimensions: Iterable[Dimension]) -> str:
    """Render dimensions as `Name(Kind):[v1, v2, ...]`, one per line."""
    lines = []
    for dim in dimensions:
        kind = dim.kind.value.capitalize()
        lines.append(f"{dim.name}({kind}):[{', '.join(dim.labels)}]")
    return "\n".join(lines)


def merge_context(context: str | None, highlight: str | None) -> str | None:
    """Editor context with any highlighted selection appended to it."""
    parts = [p for p in (context, highlight) if p]
    return "\n".join(parts) if parts else None


def _nominal_format_block(cat_num: int, val_num: int) -> str:
    first = f'"<dimension name #1>":[<{val_num} values for this dimension>]'
    if cat_num == 1:
        rows = [first]
    else:
        rows = [first + ","]
        if cat_num > 2:
            rows.append("...,")
        rows.append(f'"<dimension name #{cat_num}>" : [<{val_num} values for this dimension>]')
    return "{\n" + "\n".join(rows) + "\n}"


def _with_optional_context(body: str, context: str | None) -> str:
    if context is None:
        return body
    return render_context_prefix(context) + "\n" + body


def render_nominal_dims(
    prompt: str, cat_num: int, val_num: int, context: str | None = None
) -> RenderedPrompt:
    if cat_num < 1:
        raise PreconditionError("cat_num must be >= 1")
    if val_num < 2:
        raise PreconditionError("val_num must be >= 2")
    body = fill(
        load_template("nominal_dimensions"),
        nominal_dimension_def=_composed_def("nominal"),
        cat_num=str(cat_num),
        val_num=str(val_num),
        prompt=prompt,
        format_block=_nominal_format_block(cat_num, val_num),
    )
    return RenderedPrompt(
        kind=PromptKind.NOMINAL_DIMS,
        text=_with_optional_context(body, context),
        expected_shape=ExpectedShape.DIMENSION_OBJECT,
    )


def render_ordinal_dims(
    prompt: str, cat_num: int, context: str | None = None
) -> RenderedPrompt:
    if cat_num < 1:
        raise PreconditionError("cat_num must be >= 1")
    body = fill(
        load_template("ordinal_dimensions"),
        ordinal_dimension_def=_composed_def("ordinal"),
        cat_num=str(cat_num),
        prompt=prompt,
    )
    return RenderedPrompt(
        kind=PromptKind.ORDINAL_DIMS,
        text=_with_optional_context(body, context),
        expected_shape=ExpectedShape.DIMENSION_OBJECT,
    )


def render_response(
    prompt: str,
    requirement: Requirement,
    context: str | None = None,
    highlight: str | None = None,
    word_count: int = 150,
) -> RenderedPrompt:
    if len(requirement) == 0:
        raise PreconditionError("requirement must be nonempty")
    template = load_template("response")
    merged = merge_context(context, highlight)
    if merged is None:
        template = template.replace("{{context_prefix}}\n####\n", "")
    requirements_block = "\n".join(f"{name}: {label}" for name, label in requirement.items())
    text = fill(
        template,
        word_limit=word_limit_text(word_count),
        context_prefix=render_context_prefix(merged) if merged is not None else "",
        prompt=prompt,
        requirements=requirements_block,
    )
    return RenderedPrompt(
        kind=PromptKind.RESPONSE, text=text, expected_shape=ExpectedShape.FREE_TEXT
    )


def render_new_dimension(
    prompt: str, existing: Sequence[Dimension], context: str | None = None
) -> RenderedPrompt:
    if not existing:
        raise PreconditionError("at least one existing dimension is required")
    template = load_template("new_dimension")
    if context is None:
        template = template.replace("{{context_prefix}}\n####\n", "")
    text = fill(
        template,
        context_prefix=render_context_prefix(context) if context is not None else "",
        prompt=prompt,
        existing_dimensions_prefix=fill(
            load_template("existing_dimensions_prefix"),
            current_dimensions=format_dimension_lines(existing),
        ),
    )
    return RenderedPrompt(
        kind=PromptKind.NEW_DIMENSION, text=text, expected_shape=ExpectedShape.DIMENSION_NAME
    )


def render_summarization(full_text: str) -> RenderedPrompt:
    if not full_text.strip():
        raise PreconditionError("text to summarize must be nonempty")
    text = fill(load_template("summarization"), text=full_text)
    return RenderedPrompt(
        kind=PromptKind.SUMMARIZATION, text=text, expected_shape=ExpectedShape.SUMMARY_OBJECT
    )


def render_dimension_values(
    prompt: str, name: str, val_num: int, context: str | None = None
) -> RenderedPrompt:
    """Value generation for a user-named dimension.

    Reuses the nominal-dimension template at cat_num=1 with the instruction
    specialized to the requested name, so the output shape stays parseable
    by the dimension-object parser.
    """
    if val_num < 2:
        raise PreconditionError("val_num must be >= 2")
    if not name.strip():
        raise PreconditionError("dimension name must be nonempty")
    body = fill(
        load_template("nominal_dimensions"),
        nominal_dimension_def=_composed_def("nominal"),
        cat_num="1",
        val_num=str(val_num),
        prompt=prompt,
        format_block=_nominal_format_block(1, val_num),
    )
    body = body.replace(
        "list 1 nominal dimensions and associated",
        f'list 1 nominal dimensions named "{name}" and associated',
        1,
    )
    return RenderedPrompt(
        kind=PromptKind.NOMINAL_DIMS,
        text=_with_optional_context(body, context),
        expected_shape=ExpectedShape.DIMENSION_OBJECT,
    )


def render_revision(
    current_text: str, dimension_name: str, label: str, word_count: int = 150
) -> RenderedPrompt:
    """Minimal-delta revision of an existing response for one new assignment."""
    if not current_text.strip():
        raise PreconditionError("current text must be nonempty")
    text = fill(
        load_template("revision"),
        word_limit=word_limit_text(word_count),
        context_prefix=render_context_prefix(current_text),
        new_requirement=f"{dimension_name}: {label}",
    )
    return RenderedPrompt(
        kind=PromptKind.RESPONSE, text=text, expected_shape=ExpectedShape.FREE_TEXT
    )


def _composed_def(which: str) -> str:
    from .catalog import prompt_constants

    key = "nominalDimensionDef" if which == "nominal" else "ordinalDimensionDef"
    return prompt_constants()[key]
