"""Prompt templates, renderers, and structured-output parsers."""

from .catalog import (
    ExpectedShape,
    PromptKind,
    RenderedPrompt,
    TEMPLATE_DIR,
    load_template,
    normalize_whitespace,
    prompt_constants,
    word_limit_text,
)
from .parse import (
    extract_object_text,
    parse_dimension_name,
    parse_dimension_object,
    parse_response_text,
    parse_summary_object,
    serialize_dimension_object,
)
from .render import (
    format_dimension_lines,
    render_context_prefix,
    render_dimension_values,
    render_new_dimension,
    render_nominal_dims,
    render_ordinal_dims,
    render_response,
    render_revision,
    render_summarization,
)

__all__ = [
    "ExpectedShape",
    "PromptKind",
    "RenderedPrompt",
    "TEMPLATE_DIR",
    "extract_object_text",
    "format_dimension_lines",
    "load_template",
    "normalize_whitespace",
    "parse_dimension_name",
    "parse_dimension_object",
    "parse_response_text",
    "parse_summary_object",
    "prompt_constants",
    "render_context_prefix",
    "render_dimension_values",
    "render_new_dimension",
    "render_nominal_dims",
    "render_ordinal_dims",
    "render_response",
    "render_revision",
    "render_summarization",
    "serialize_dimension_object",
    "word_limit_text",
]
