"""Deterministic completion backends and canned fixtures for tests and demos.

The synthetic handler answers every request tag the pipeline issues with
output derived only from the request text, so any run against it is fully
reproducible. The canned rabbit-story fixtures exercise the exact example
inputs and outputs the prompt templates were pinned against.
"""

from __future__ import annotations

import hashlib
import json
import re
from pathlib import Path

from .model import GenerationConfig
from .provider import (
    CompletionRequest,
    MockProvider,
    write_default_fixture,
    write_fixture,
)
from .prompts import render_nominal_dims, render_ordinal_dims

RABBIT_PROMPT = "write a story about a rabbit"

RABBIT_NOMINAL_COMPLETION = """{
"Genre": ["Fantasy", "Adventure", "Romance", "Mystery", "Comedy", "Drama"],
"Tone": ["Lighthearted", "Humorous", "Moody", "Frightening", "Hopeful", "Suspenseful"],
"Setting": ["Modern Day", "Medieval Times", "Western Era", "Futuristic World", "Mythical Realm", "Urban City"],
"Style": ["Narrative Poem", "Dialogue Driven Story", "Traditional Fable Tale", "Nonlinear Prose Piece", "Epic Saga", "Short Story"],
"Perspective": ["First-Person POV (Protagonist)", "Third-Person Limited (Protagonist)", "Third-Person Omniscient (Narrator)", "Second-Person POV (Reader, Audience)", "Multiple Perspectives/Voices", "Objective/Impersonal Narrator"]
}"""

RABBIT_ORDINAL_COMPLETION = """{
"Creativity": ["least", "less", "neutral", "more", "most"],
"Imagination": ["least", "less", "neutral", "more", "most"],
"Grammatical Accuracy": ["least", "less", "neutral", "more", "most"],
"Originality": ["least", "less", "neutral", "more", "most"],
"Presentation Style": ["least", "less", "neutral", "more", "most"]
}"""

FLOPSY_STORY = (
    "Once upon a time, in a far away kingdom, there lived a brave rabbit named "
    "Flopsy. Flopsy was determined to prove himself as the bravest rabbit in the "
    "land. One day, he decided to venture into the dark and mysterious forest "
    "that surrounded his home. As he ventured deeper into the forest, he "
    "encountered all sorts of frightening creatures and obstacles. He eventually "
    "came across an old castle with an eerie presence. He cautiously entered and "
    "soon found himself face-to-face with a giant dragon! The dragon roared and "
    "Flopsy trembled in fear but he stood his ground and bravely faced off "
    "against the beast. After a long battle, Flopsy emerged victorious! He had "
    "saved his kingdom from certain destruction and was hailed as a hero by all "
    "who heard of his courageous deed."
)

FUTURISTIC_RABBIT_TEXT = (
    "Once upon a time, in a futuristic world, there lived a rabbit. He was an "
    "adventurous soul who loved to explore the unknown. One day, he decided to "
    "take a journey and see what the world had to offer. As he hopped along his "
    "way, he encountered many strange and wonderful things. He met robots that "
    "could talk and fly, creatures that could swim in the air, and even plants "
    "that glowed in the dark! Despite all these wonders, nothing compared to the "
    "joy of discovering new places and meeting new people. The rabbit's journey "
    "was full of laughter and fun as he made his way through this strange yet "
    "exciting world. In the end, he returned home with stories of his travels "
    "that would be told for generations to come!"
)

RABBIT_SUMMARY_COMPLETION = """{
"Key Words": ["Brave", "Adventure", "Journey", "Creatures", "Love"],
"Summary": "A brave rabbit embarks on a journey to explore the world and finds true love in a magical kingdom.",
"Structure": "Once upon a time-Journey-Encounter creatures-Finds true love-Becomes ruler of kingdom",
"Title": "Rabbit's Journey"
}"""

NOMINAL_NAME_POOL = (
    "Genre",
    "Tone",
    "Setting",
    "Style",
    "Perspective",
    "Plot",
    "Character Type",
    "Mood",
    "Pacing",
    "Theme",
)

ORDINAL_NAME_POOL = (
    "Creativity",
    "Imagination",
    "Suspense",
    "Originality",
    "Depth",
    "Whimsy",
    "Realism",
)

VALUE_POOL = (
    "Fantasy",
    "Adventure",
    "Romance",
    "Mystery",
    "Comedy",
    "Drama",
    "Folklore",
    "Satire",
    "Epic",
    "Noir",
    "Whimsical",
    "Gothic",
)

NEW_DIMENSION_POOL = ("Time Period", "Color Palette", "Narrative Distance", "Soundscape")

NAMED_VALUE_SETS = {
    "time period": ("Victorian", "Medieval", "Colonial", "Apocalyptic"),
}

_NOMINAL_RE = re.compile(r"list (\d+) nominal dimensions and associated (\d+) possible values")
_NAMED_RE = re.compile(r'list 1 nominal dimensions named "([^"]+)" and associated (\d+)')
_ORDINAL_RE = re.compile(r"list (\d+) ordinal dimensions")
_TEXT_RE = re.compile(r"Text is: (.*?)(?:\n####|\Z)", re.DOTALL)
_REQUIREMENTS_RE = re.compile(r"Requirements: (.*)\Z", re.DOTALL)
_REVISION_RE = re.compile(
    r"Revise the text to satisfy the following additional requirement\n(.+?): (.+)\Z",
    re.DOTALL,
)
_CONTEXT_RE = re.compile(r"This is the context: (.*?)\n---end context ---", re.DOTALL)


def _sha8(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:8]


def synthetic_completion(request: CompletionRequest) -> str:
    """Deterministic completion for any request the pipeline can issue."""
    tag, prompt = request.request_tag, request.prompt

    if tag == "nominal_dims":
        match = _NOMINAL_RE.search(prompt)
        cat_num, val_num = int(match.group(1)), int(match.group(2))
        obj = {}
        for index in range(cat_num):
            name = NOMINAL_NAME_POOL[index % len(NOMINAL_NAME_POOL)]
            values = [
                VALUE_POOL[(index + offset) % len(VALUE_POOL)] for offset in range(val_num)
            ]
            obj[name] = values
        return json.dumps(obj)

    if tag == "ordinal_dims":
        match = _ORDINAL_RE.search(prompt)
        cat_num = int(match.group(1))
        levels = ["least", "less", "neutral", "more", "most"]
        return json.dumps(
            {ORDINAL_NAME_POOL[i % len(ORDINAL_NAME_POOL)]: levels for i in range(cat_num)}
        )

    if tag == "dimension_values":
        match = _NAMED_RE.search(prompt)
        name, val_num = match.group(1), int(match.group(2))
        canned = NAMED_VALUE_SETS.get(name.casefold())
        if canned is None:
            canned = tuple(f"{name} {suffix}" for suffix in ("Alpha", "Beta", "Gamma", "Delta"))
        return json.dumps({name: list(canned[: max(val_num, 2)])})

    if tag in ("response", "revise"):
        revision = _REVISION_RE.search(prompt)
        if tag == "revise" and revision:
            original = _CONTEXT_RE.search(prompt).group(1)
            name, label = revision.group(1), revision.group(2).strip()
            return f"{original} In this telling, {name.lower()} settles on {label}."
        requirements = _REQUIREMENTS_RE.search(prompt)
        labels = requirements.group(1).strip().splitlines() if requirements else []
        traits = ", ".join(line.strip() for line in labels)
        return (
            f"Once upon a time, take {_sha8(prompt)}, a curious rabbit set out across "
            f"the meadow. The telling honors {traits}. Friends joined, trouble "
            f"found them, and the journey ended in quiet triumph."
        )

    if tag == "summarize":
        text = _TEXT_RE.search(prompt).group(1).strip()
        words = text.split()
        keywords = []
        for word in words:
            cleaned = word.strip(".,!?'\"").capitalize()
            if len(cleaned) > 4 and cleaned not in keywords:
                keywords.append(cleaned)
            if len(keywords) == 5:
                break
        if not keywords:
            keywords = ["Story"]
        return json.dumps(
            {
                "Key Words": keywords,
                "Summary": " ".join(words[:18]),
                "Structure": "Opening-Complication-Resolution",
                "Title": f"Tale {_sha8(text)}",
            }
        )

    if tag == "new_dimension":
        pool_index = int(_sha8(prompt), 16) % len(NEW_DIMENSION_POOL)
        return NEW_DIMENSION_POOL[pool_index]

    raise AssertionError(f"unhandled request tag: {tag}")


def synthetic_provider(max_in_flight: int = 8, delay: float = 0.0) -> MockProvider:
    return MockProvider(handler=synthetic_completion, max_in_flight=max_in_flight, delay=delay)


def build_demo_fixtures(
    directory: Path | str, prompt: str = RABBIT_PROMPT, config: GenerationConfig | None = None
) -> Path:
    """Populate a fixture directory that can replay a full generation run.

    Dimension calls get exact-match files carrying the canned rabbit outputs;
    response, summarization, revision, and value calls get per-tag defaults
    keyed off the prompt hash, so any seed and response count replays cleanly.
    """
    cfg = config or GenerationConfig()
    directory = Path(directory)
    nominal = render_nominal_dims(prompt, cfg.nominal_count, cfg.nominal_value_cap)
    ordinal = render_ordinal_dims(prompt, cfg.ordinal_count)
    write_fixture(directory, "nominal_dims", nominal.text, RABBIT_NOMINAL_COMPLETION)
    write_fixture(directory, "ordinal_dims", ordinal.text, RABBIT_ORDINAL_COMPLETION)
    write_default_fixture(
        directory,
        "response",
        (
            "Once upon a time, in telling {{PROMPT_SHA8}}, a determined rabbit set "
            "out from the warren to chart the wide world. Odd companions joined the "
            "road, dangers rose and fell, and the rabbit returned home carrying "
            "stories enough for a lifetime."
        ),
    )
    write_default_fixture(
        directory,
        "summarize",
        json.dumps(
            {
                "Key Words": ["Rabbit", "Journey", "Companions", "Dangers", "Home"],
                "Summary": "A determined rabbit charts the wide world and returns home with stories.",
                "Structure": "Departure-Road-Return",
                "Title": "Warren Tale {{PROMPT_SHA8}}",
            }
        ),
    )
    write_default_fixture(
        directory,
        "revise",
        (
            "Once upon a time, in revision {{PROMPT_SHA8}}, the rabbit's tale was "
            "retold to honor a newly added requirement while keeping its shape."
        ),
    )
    write_default_fixture(
        directory, "dimension_values", json.dumps({"Added": ["One", "Two", "Three", "Four"]})
    )
    write_default_fixture(directory, "new_dimension", "Time Period")
    return directory
