"""Acceptance suite: one test per criterion, run against the deterministic
mock provider with the canned example fixtures. Each test prints a pass line
once its assertions hold."""

import json
import math
import random

import pytest

from designspace import (
    AxisSelection,
    Dimension,
    GenerationConfig,
    GenerationPipeline,
    IntegrityError,
    MockProvider,
    ORDINAL_LEVELS,
    Requirement,
    ResponseNode,
    SpaceStore,
    SubspaceFilter,
    Viewport,
    assign_layout,
    filter_nodes,
    resolve_level,
    search_keyword,
    validate_requirement,
)
from designspace.explorer import SemanticLevel
from designspace.prompts import (
    normalize_whitespace,
    render_context_prefix,
    render_new_dimension,
    render_nominal_dims,
    render_ordinal_dims,
    render_response,
    render_summarization,
)
from designspace.testing import (
    FUTURISTIC_RABBIT_TEXT,
    RABBIT_PROMPT,
    synthetic_completion,
)

from conftest import load_golden, make_bundle, make_pipeline
from test_prompts_render import (
    EXAMPLE_BACKGROUND,
    EXAMPLE_EXISTING_DIMS,
    EXAMPLE_REQUIREMENT,
)


def passline(number: int, text: str) -> None:
    print(f"PASS criterion {number}: {text}")


class TestCriterion1CallAccounting:
    @pytest.mark.parametrize("n", [1, 3, 40])
    def test_clean_run_makes_exactly_two_plus_two_n_calls(self, n):
        pipeline = make_pipeline(seed=100 + n, response_count=n)
        space, stats = pipeline.generate_space("p")
        totals = pipeline.provider.ledger.totals()
        assert totals.attempted == 2 + 2 * n
        assert totals.failed == 0
        assert len(space.nodes) == n
        assert stats.calls == 2 + 2 * n
        passline(1, f"N={n} clean run used exactly {2 + 2 * n} provider calls")


class TestCriterion2ConfigurationCaps:
    def test_oversupplied_fixtures_respect_all_caps(self):
        oversupplied_nominal = json.dumps(
            {
                f"Dim{i}": [f"v{j}" for j in range(12)] + ["v0", "V1"]
                for i in range(9)
            }
        )
        oversupplied_ordinal = json.dumps(
            {f"Ord{i}": ["max", "min", "mid"] for i in range(7)}
        )

        def handler(request):
            if request.request_tag == "nominal_dims":
                return oversupplied_nominal
            if request.request_tag == "ordinal_dims":
                return oversupplied_ordinal
            return synthetic_completion(request)

        cfg = GenerationConfig(
            rng_seed=2, nominal_count=5, nominal_value_cap=8, ordinal_count=3, response_count=2
        )
        pipeline = GenerationPipeline(MockProvider(handler=handler), SpaceStore(), cfg)
        space, stats = pipeline.generate_space("p")
        assert stats.error is None
        nominal = [d for d in space.dimensions if d.kind.value == "nominal"]
        ordinal = [d for d in space.dimensions if d.kind.value == "ordinal"]
        assert len(nominal) == 5
        assert len(ordinal) == 3
        assert all(len(d.values) <= 8 for d in nominal)
        assert all(d.labels == ORDINAL_LEVELS for d in ordinal)
        passline(2, "caps hold: 5 nominal dims, 8 values, 3 ordinal dims, canonical levels")


class TestCriterion3RequirementCoverage:
    def test_hundred_randomized_op_sequences_keep_every_node_valid(self):
        rng = random.Random(31337)
        for case in range(100):
            pipeline = make_pipeline(seed=rng.randrange(2**31), response_count=3)
            space, stats = pipeline.generate_space(f"prompt {case}")
            assert stats.error is None
            sid = space.space_id
            added_dims = 0
            for _ in range(rng.randint(1, 3)):
                current = pipeline.store.get_space(sid)
                op = rng.choice(("similar", "subspace", "add_dimension"))
                if op == "similar" and current.nodes:
                    source = rng.choice(current.nodes)
                    pipeline.generate_similar(sid, source.id, k=rng.randint(1, 3))
                elif op == "subspace":
                    dim = rng.choice(current.dimensions)
                    count = rng.randint(1, len(dim.labels))
                    accepted = rng.sample(list(dim.labels), count)
                    pipeline.generate_in_subspace(
                        sid, SubspaceFilter.of({dim.name: accepted}), k=rng.randint(1, 3)
                    )
                else:
                    added_dims += 1
                    pipeline.add_user_dimension(sid, f"Added Dim {added_dims}")
            final = pipeline.store.get_space(sid)
            for node in final.nodes:
                verdict = validate_requirement(final, node.requirement)
                assert verdict.ok, f"case {case}: {verdict.violations}"
        passline(3, "100 randomized op sequences, 100% of nodes pass validation")


class TestCriterion4TemplateFidelity:
    def test_rendered_prompts_match_pinned_golden_files(self):
        pairs = [
            (render_nominal_dims(RABBIT_PROMPT, 5, 6).text, "nominal_dimensions_rabbit"),
            (render_ordinal_dims(RABBIT_PROMPT, 5).text, "ordinal_dimensions_rabbit"),
            (render_response(RABBIT_PROMPT, EXAMPLE_REQUIREMENT).text, "response_rabbit"),
            (
                render_new_dimension(RABBIT_PROMPT, EXAMPLE_EXISTING_DIMS).text,
                "new_dimension_rabbit",
            ),
            (render_summarization(FUTURISTIC_RABBIT_TEXT).text, "summarization_futuristic_rabbit"),
            (render_context_prefix(EXAMPLE_BACKGROUND), "context_prefix_example"),
        ]
        for rendered, golden in pairs:
            assert normalize_whitespace(rendered) == normalize_whitespace(load_golden(golden)), golden
        passline(4, f"{len(pairs)} rendered prompts byte-equal their golden files")


class TestCriterion5RetrySemantics:
    @pytest.mark.parametrize("k", [0, 1, 2])
    def test_k_malformed_outputs_still_succeed(self, k):
        from designspace.prompts import parse_summary_object

        valid = json.dumps(
            {"Key Words": ["a"], "Summary": "s", "Structure": "x-y", "Title": "t"}
        )
        provider = MockProvider(script={"summarize": ["{bad"] * k + [valid]})
        from designspace import CompletionRequest

        request = CompletionRequest(
            prompt="p", max_tokens=64, temperature=0.0, request_tag="summarize"
        )
        bundle = provider.complete_validated(request, parse_summary_object, retry_limit=3)
        assert bundle.title == "t"
        counts = provider.ledger.counts("summarize")
        assert counts.failed == k
        assert counts.succeeded == 1
        passline(5, f"k={k} malformed outputs recovered; ledger failed={k}")

    def test_k_equal_to_retry_limit_exhausts(self):
        from designspace import CompletionRequest, ExhaustionError
        from designspace.prompts import parse_summary_object

        provider = MockProvider(script={"summarize": ["{bad"] * 3})
        request = CompletionRequest(
            prompt="p", max_tokens=64, temperature=0.0, request_tag="summarize"
        )
        with pytest.raises(ExhaustionError):
            provider.complete_validated(request, parse_summary_object, retry_limit=3)
        assert provider.ledger.counts("summarize").failed == 3
        passline(5, "k=retryLimit=3 exhausts with ledger failed=3")


class TestCriterion6SubspaceSoundness:
    def test_all_outputs_satisfy_filter_and_sampling_is_uniform(self):
        pipeline = make_pipeline(seed=606, response_count=1)
        space, _ = pipeline.generate_space("p")
        dim = space.dimensions[0]
        accepted = list(dim.labels[:3])
        flt = SubspaceFilter.of({dim.name: accepted})
        added = pipeline.generate_in_subspace(space.space_id, flt, k=1000)
        assert len(added) == 1000
        final = pipeline.store.get_space(space.space_id)
        matched = filter_nodes(final, flt)
        assert all(node.id in matched for node in added)
        counts = {label: 0 for label in accepted}
        for node in added:
            counts[node.requirement.as_dict()[dim.name]] += 1
        p = 1 / len(accepted)
        sigma = math.sqrt(1000 * p * (1 - p))
        for label, count in counts.items():
            assert abs(count - 1000 * p) <= 4 * sigma, (label, count)
        passline(6, "1000 subspace draws all satisfy the filter, uniform within 4 sigma")


class TestCriterion7LayoutSoundness:
    def build_space(self, node_count):
        rng = random.Random(node_count)
        store = SpaceStore()
        dims = [
            Dimension.nominal("Mood", ["Romantic", "Somber", "Cheerful", "Vengeful"]),
            Dimension.nominal("Tone", ["Motivating", "Hopeful", "Inspiring", "Peaceful"]),
        ]
        space = store.create_space("p", dimensions=dims)
        for _ in range(node_count):
            node_id, seq = store.reserve_node_slot(space.space_id)
            store.append_node(
                space.space_id,
                ResponseNode(
                    id=node_id,
                    full_text="t",
                    bundle=make_bundle(),
                    requirement=Requirement.of(
                        {
                            "Mood": rng.choice(dims[0].labels),
                            "Tone": rng.choice(dims[1].labels),
                        }
                    ),
                    created_at=seq,
                ),
            )
        return store.get_space(space.space_id)

    @pytest.mark.parametrize("node_count", [4, 17, 50])
    def test_group_by_oracle_and_determinism(self, node_count):
        space = self.build_space(node_count)
        viewport = Viewport(width=1200.0, height=900.0)

        one_d = assign_layout(space, AxisSelection(x="Mood"), viewport, seed=9)
        ticks = dict(one_d.x_ticks)
        for node in space.nodes:
            assert one_d.position_of(node.id)[0] == ticks[node.requirement.as_dict()["Mood"]]

        two_d = assign_layout(space, AxisSelection(x="Mood", y="Tone"), viewport, seed=9)
        x_ticks, y_ticks = dict(two_d.x_ticks), dict(two_d.y_ticks)
        for node in space.nodes:
            labels = node.requirement.as_dict()
            assert two_d.position_of(node.id) == (
                x_ticks[labels["Mood"]],
                y_ticks[labels["Tone"]],
            )

        assert one_d == assign_layout(space, AxisSelection(x="Mood"), viewport, seed=9)
        assert two_d == assign_layout(space, AxisSelection(x="Mood", y="Tone"), viewport, seed=9)
        passline(7, f"{node_count}-node layouts match the group-by oracle and repeat exactly")


class TestCriterion8SearchFilterLaws:
    def test_partition_laws_hold_for_thousand_queries(self):
        pipeline = make_pipeline(seed=808, response_count=10)
        space, _ = pipeline.generate_space("p")
        all_ids = {n.id for n in space.nodes}
        rng = random.Random(17)
        alphabet = "rabbit meadow journey friends trouble quiet triumph xyz"
        for _ in range(1000):
            length = rng.randint(0, 12)
            query = "".join(rng.choice(alphabet) for _ in range(length))
            partition = search_keyword(space, query)
            assert partition.matched | partition.dimmed == all_ids
            assert not partition.matched & partition.dimmed

        for _ in range(100):
            selections = {}
            for dim in space.dimensions:
                if rng.random() < 0.5:
                    count = rng.randint(1, len(dim.labels))
                    selections[dim.name] = rng.sample(list(dim.labels), count)
            flt = SubspaceFilter.of(selections, bookmarked_only=rng.random() < 0.3)
            brute = set()
            for node in space.nodes:
                labels = node.requirement.as_dict()
                if flt.bookmarked_only and not node.bookmarked:
                    continue
                if all(labels[d] in set(v) for d, v in selections.items()):
                    brute.add(node.id)
            assert filter_nodes(space, flt) == brute
        passline(8, "1000 search partitions and 100 filters match the brute-force oracle")


class TestCriterion9SemanticZoom:
    def test_resolution_is_total_monotone_and_reaches_all_levels(self):
        scales = [10 ** (-2 + 4 * i / 9999) for i in range(10000)]
        levels = [resolve_level(s) for s in scales]
        assert len(levels) == 10000
        assert all(a <= b for a, b in zip(levels, levels[1:]))
        assert set(levels) == {
            SemanticLevel.DOT,
            SemanticLevel.TITLE,
            SemanticLevel.KEYWORD,
            SemanticLevel.SUMMARY,
            SemanticLevel.FULL_TEXT,
        }
        passline(9, "10^4-point sweep is total, monotone, and reaches all five levels")


class TestCriterion10Persistence:
    def random_store(self, rng):
        pipeline = make_pipeline(seed=rng.randrange(2**31), response_count=rng.randint(1, 5))
        store = pipeline.store
        for _ in range(rng.randint(1, 3)):
            space, _ = pipeline.generate_space(f"prompt {rng.random():.6f}")
            for node in space.nodes:
                if rng.random() < 0.4:
                    store.toggle_bookmark(space.space_id, node.id)
            if space.nodes and rng.random() < 0.6:
                store.select_node(space.space_id, rng.choice(space.nodes).id)
                if rng.random() < 0.5:
                    document = store.get_document()
                    block = document.blocks[-1]
                    store.edit_block(block.id, block.text + " edited")
            if rng.random() < 0.5:
                dim = rng.choice(space.dimensions)
                store.update_exploration(
                    space.space_id,
                    x_axis=dim.name,
                    zoom_scale=rng.choice([0.2, 1.0, 2.0]),
                    filter=SubspaceFilter.of({dim.name: [dim.labels[0]]}),
                )
        return store

    def test_round_trip_equality_over_randomized_stores(self, tmp_path):
        rng = random.Random(1010)
        for case in range(100):
            store = self.random_store(rng)
            path = tmp_path / f"store_{case}.json"
            store.save(path)
            loaded = SpaceStore.load(path)
            assert loaded.snapshot() == store.snapshot(), f"case {case}"
        passline(10, "100 randomized stores round-trip with structural equality")

    def test_injected_dangling_links_raise_integrity_errors(self, tmp_path):
        rng = random.Random(2020)
        store = self.random_store(rng)
        space = store.list_spaces()[0]
        if not space.nodes:
            pytest.skip("random store produced no nodes")
        store.select_node(space.space_id, space.nodes[0].id)
        path = tmp_path / "tamper.json"
        store.save(path)

        payload = json.loads(path.read_text())
        payload["document"]["blocks"][-1]["link"] = {"space_id": 999, "node_id": "n1"}
        broken = tmp_path / "broken_space.json"
        broken.write_text(json.dumps(payload))
        with pytest.raises(IntegrityError):
            SpaceStore.load(broken)

        payload = json.loads(path.read_text())
        payload["document"]["blocks"][-1]["link"]["node_id"] = "n99999"
        broken = tmp_path / "broken_node.json"
        broken.write_text(json.dumps(payload))
        with pytest.raises(IntegrityError):
            SpaceStore.load(broken)
        passline(10, "dangling space and node links are rejected as integrity errors")


class TestCriterion11AddDimension:
    @pytest.mark.parametrize("n", [0, 1, 4])
    def test_every_node_gains_one_label_and_ledger_delta_is_exact(self, n):
        pipeline = make_pipeline(seed=1100 + n, response_count=max(n, 1))
        if n == 0:
            space = pipeline.store.create_space("fresh prompt")
            pipeline.store.set_dimensions(
                space.space_id, [Dimension.nominal("Genre", ["A", "B"])]
            )
            sid = space.space_id
        else:
            space, _ = pipeline.generate_space("p")
            sid = space.space_id
        before = pipeline.provider.ledger.totals().attempted
        result = pipeline.add_user_dimension(sid, "Time Period")
        delta = pipeline.provider.ledger.totals().attempted - before
        assert delta == 1 + 2 * n
        final = pipeline.store.get_space(sid)
        for node in final.nodes:
            labels = [
                label
                for name, label in node.requirement.items()
                if name == "Time Period"
            ]
            assert len(labels) == 1
            assert labels[0] in result.dimension.labels
        passline(11, f"n={n}: one new label per node, ledger delta {1 + 2 * n}")
