"""Structured-output parsing: canned example outputs, failures, round-trips."""

import json
import random

import pytest

from designspace import Dimension, DimensionKind, ORDINAL_LEVELS, ParseFailure
from designspace.prompts import (
    parse_dimension_name,
    parse_dimension_object,
    parse_response_text,
    parse_summary_object,
    serialize_dimension_object,
)
from designspace.testing import (
    RABBIT_NOMINAL_COMPLETION,
    RABBIT_ORDINAL_COMPLETION,
    RABBIT_SUMMARY_COMPLETION,
)

NOMINAL = DimensionKind.NOMINAL
ORDINAL = DimensionKind.ORDINAL


class TestParseDimensionObject:
    def test_rabbit_nominal_example(self):
        dims = parse_dimension_object(RABBIT_NOMINAL_COMPLETION, NOMINAL, 5, 8)
        assert [d.name for d in dims] == ["Genre", "Tone", "Setting", "Style", "Perspective"]
        assert all(d.kind is NOMINAL for d in dims)
        assert all(len(d.values) == 6 for d in dims)
        assert dims[0].labels == ("Fantasy", "Adventure", "Romance", "Mystery", "Comedy", "Drama")

    def test_rabbit_ordinal_example(self):
        dims = parse_dimension_object(RABBIT_ORDINAL_COMPLETION, ORDINAL, 5, 8)
        assert len(dims) == 5
        assert all(d.labels == ORDINAL_LEVELS for d in dims)

    def test_unclosed_brace_is_malformed(self):
        with pytest.raises(ParseFailure, match="malformed object"):
            parse_dimension_object("{ unclosed", NOMINAL, 1, 8)

    def test_no_brace_pair_is_malformed(self):
        with pytest.raises(ParseFailure, match="malformed object"):
            parse_dimension_object("sure, here you go!", NOMINAL, 1, 8)

    def test_undersupply_fails(self):
        raw = json.dumps({"Genre": ["A", "B"]})
        with pytest.raises(ParseFailure, match="expected 2 entries"):
            parse_dimension_object(raw, NOMINAL, 2, 8)

    def test_oversupply_truncates_to_expected_count(self):
        raw = json.dumps({f"D{i}": ["A", "B"] for i in range(5)})
        dims = parse_dimension_object(raw, NOMINAL, 3, 8)
        assert [d.name for d in dims] == ["D0", "D1", "D2"]

    def test_values_deduped_case_insensitively_first_wins(self):
        raw = json.dumps({"Genre": ["Fantasy", "fantasy", "Drama", "FANTASY", "Noir"]})
        dims = parse_dimension_object(raw, NOMINAL, 1, 8)
        assert dims[0].labels == ("Fantasy", "Drama", "Noir")

    def test_values_truncated_to_cap_after_dedup(self):
        raw = json.dumps({"Genre": ["A", "a", "B", "C", "D"]})
        dims = parse_dimension_object(raw, NOMINAL, 1, 3)
        assert dims[0].labels == ("A", "B", "C")

    def test_single_distinct_value_fails(self):
        raw = json.dumps({"Genre": ["Same", "same", "SAME"]})
        with pytest.raises(ParseFailure, match="at least 2 distinct values"):
            parse_dimension_object(raw, NOMINAL, 1, 8)

    def test_non_string_values_fail(self):
        raw = json.dumps({"Genre": ["A", 3]})
        with pytest.raises(ParseFailure, match="text array"):
            parse_dimension_object(raw, NOMINAL, 1, 8)

    def test_ordinal_values_forced_canonical(self):
        raw = json.dumps({"Suspense": ["low", "high"]})
        dims = parse_dimension_object(raw, ORDINAL, 1, 8)
        assert dims[0].labels == ORDINAL_LEVELS

    def test_code_fence_wrapping_tolerated(self):
        raw = "Here you go:\n```json\n" + json.dumps({"Genre": ["A", "B"]}) + "\n```"
        dims = parse_dimension_object(raw, NOMINAL, 1, 8)
        assert dims[0].name == "Genre"

    def test_duplicate_keys_case_insensitive_first_wins(self):
        raw = '{"Genre": ["A", "B"], "genre": ["C", "D"], "Tone": ["X", "Y"]}'
        dims = parse_dimension_object(raw, NOMINAL, 2, 8)
        assert [d.name for d in dims] == ["Genre", "Tone"]
        assert dims[0].labels == ("A", "B")

    def test_round_trip_over_random_dimension_lists(self):
        rng = random.Random(5150)
        alphabet = [f"Val{i}" for i in range(20)]
        for _ in range(50):
            count = rng.randint(1, 5)
            dims = []
            for index in range(count):
                labels = rng.sample(alphabet, rng.randint(2, 8))
                dims.append(Dimension.nominal(f"Dim{index}", labels))
            parsed = parse_dimension_object(
                serialize_dimension_object(dims), NOMINAL, count, 8
            )
            assert parsed == tuple(dims)

    def test_ordinal_round_trip_is_canonicalizing(self):
        dims = (Dimension.ordinal("Depth"), Dimension.ordinal("Suspense"))
        parsed = parse_dimension_object(serialize_dimension_object(dims), ORDINAL, 2, 8)
        assert parsed == dims


class TestParseSummaryObject:
    def test_rabbit_example(self):
        bundle = parse_summary_object(RABBIT_SUMMARY_COMPLETION)
        assert bundle.keywords == ("Brave", "Adventure", "Journey", "Creatures", "Love")
        assert bundle.title == "Rabbit's Journey"
        assert bundle.summary.startswith("A brave rabbit embarks")
        assert bundle.parts[0] == "Once upon a time"

    def test_missing_title_fails(self):
        raw = json.dumps({"Key Words": ["a"], "Summary": "s", "Structure": "x-y"})
        with pytest.raises(ParseFailure, match="missing field Title"):
            parse_summary_object(raw)

    def test_over_cap_summary_truncated_to_first_twenty_words(self):
        words = [f"w{i}" for i in range(25)]
        raw = json.dumps(
            {
                "Key Words": ["a"],
                "Summary": " ".join(words),
                "Structure": "x-y",
                "Title": "t",
            }
        )
        bundle = parse_summary_object(raw)
        # Oracle: apply the truncation rule by hand to the 25-word sentence.
        assert bundle.summary == " ".join(words[:20])

    def test_over_cap_keywords_truncated_to_five(self):
        raw = json.dumps(
            {
                "Key Words": ["a", "b", "c", "d", "e", "f", "g"],
                "Summary": "s",
                "Structure": "x-y",
                "Title": "t",
            }
        )
        assert parse_summary_object(raw).keywords == ("a", "b", "c", "d", "e")

    def test_over_cap_title_truncated_to_five_words(self):
        raw = json.dumps(
            {
                "Key Words": ["a"],
                "Summary": "s",
                "Structure": "x-y",
                "Title": "one two three four five six seven",
            }
        )
        assert parse_summary_object(raw).title == "one two three four five"

    def test_empty_keywords_fail(self):
        raw = json.dumps(
            {"Key Words": [], "Summary": "s", "Structure": "x-y", "Title": "t"}
        )
        with pytest.raises(ParseFailure):
            parse_summary_object(raw)

    def test_non_string_summary_fails(self):
        raw = json.dumps(
            {"Key Words": ["a"], "Summary": 7, "Structure": "x-y", "Title": "t"}
        )
        with pytest.raises(ParseFailure, match="Summary"):
            parse_summary_object(raw)


class TestParseResponseText:
    def test_strips_and_returns(self):
        assert parse_response_text("  hello there \n") == "hello there"

    def test_empty_fails(self):
        with pytest.raises(ParseFailure, match="empty completion"):
            parse_response_text("   \n ")


class TestParseDimensionName:
    def test_plain_name(self):
        assert parse_dimension_name("Tone\n", ["Genre"]) == "Tone"

    def test_quoted_name_unwrapped(self):
        assert parse_dimension_name('"Time Period"', []) == "Time Period"

    def test_collision_fails_case_insensitively(self):
        with pytest.raises(ParseFailure, match="already exists"):
            parse_dimension_name("tone", ["Tone", "Genre"])

    def test_empty_fails(self):
        with pytest.raises(ParseFailure):
            parse_dimension_name("  \n", [])
