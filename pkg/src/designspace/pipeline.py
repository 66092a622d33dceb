"""The two-stage generation pipeline and dimension-driven regeneration.

A run emits an ordered event stream: one dimensionsReady, then nodeReady /
nodeFailed events in completion order, then exactly one done carrying the
run stats. Requirements are sampled sequentially up front from a per-run
seeded RNG, then node generation fans out concurrently, bounded by the
configured in-flight cap; node ids and creation order are reserved before
fan-out so the resulting space content does not depend on completion order.
"""

from __future__ import annotations

import itertools
import logging
import random
import threading
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterator, Mapping, Sequence

from .errors import (
    DesignSpaceError,
    ExhaustionError,
    NotFoundError,
    PreconditionError,
)
from .model import (
    DesignSpace,
    Dimension,
    DimensionKind,
    DimensionOrigin,
    GenerationConfig,
    Provenance,
    Requirement,
    ResponseNode,
    SubspaceFilter,
    validate_filter,
)
from .prompts import (
    parse_dimension_name,
    parse_dimension_object,
    parse_response_text,
    parse_summary_object,
    render_dimension_values,
    render_new_dimension,
    render_nominal_dims,
    render_ordinal_dims,
    render_response,
    render_revision,
    render_summarization,
)
from .prompts.render import merge_context
from .provider import CallMeter, CompletionProvider, CompletionRequest
from .store import SpaceStore

logger = logging.getLogger(__name__)

TAG_NOMINAL_DIMS = "nominal_dims"
TAG_ORDINAL_DIMS = "ordinal_dims"
TAG_RESPONSE = "response"
TAG_SUMMARIZE = "summarize"
TAG_NEW_DIMENSION = "new_dimension"
TAG_DIMENSION_VALUES = "dimension_values"
TAG_REVISE = "revise"

DIMENSION_MAX_TOKENS = 1024
SUMMARY_MAX_TOKENS = 256
NAME_MAX_TOKENS = 16
SUMMARY_TEMPERATURE = 0.0
# Word-to-token inflation safety margin for free-text generation.
TOKENS_PER_WORD = 2


class EventKind(str, Enum):
    DIMENSIONS_READY = "dimensionsReady"
    NODE_READY = "nodeReady"
    NODE_FAILED = "nodeFailed"
    DONE = "done"


@dataclass(frozen=True, slots=True)
class GenerationEvent:
    kind: EventKind
    payload: object


@dataclass(frozen=True, slots=True)
class NodeFailure:
    node_id: str
    stage: str
    message: str


@dataclass(frozen=True, slots=True)
class RunStats:
    requested: int
    produced: int
    failed: int
    calls: int
    error: str | None = None
    notes: tuple[str, ...] = ()

    @property
    def aborted(self) -> bool:
        return self.error is not None


@dataclass(frozen=True, slots=True)
class DimensionStageResult:
    """Both dimension calls, possibly degraded to the successful half."""

    dimensions: tuple[Dimension, ...]
    failures: tuple[str, ...] = ()


@dataclass(frozen=True, slots=True)
class AddDimensionResult:
    dimension: Dimension
    revised: tuple[str, ...]
    unrevised: tuple[str, ...]
    calls: int


class GenerationRun:
    """Ordered, replayable event feed for one pipeline run."""

    def __init__(self, run_id: int, kind: str, space_id: int):
        self.run_id = run_id
        self.kind = kind
        self.space_id = space_id
        self._cond = threading.Condition()
        self._events: list[GenerationEvent] = []
        self._finished = False
        self._stats: RunStats | None = None

    def emit(self, kind: EventKind, payload: object) -> None:
        with self._cond:
            if self._finished:
                raise RuntimeError("run already finished")
            self._events.append(GenerationEvent(kind=kind, payload=payload))
            self._cond.notify_all()

    def finish(self, stats: RunStats) -> None:
        with self._cond:
            if self._finished:
                return
            self._events.append(GenerationEvent(kind=EventKind.DONE, payload=stats))
            self._stats = stats
            self._finished = True
            self._cond.notify_all()

    @property
    def finished(self) -> bool:
        with self._cond:
            return self._finished

    def events(self) -> Iterator[GenerationEvent]:
        """Replay history, then tail live events until the run is done."""
        index = 0
        while True:
            with self._cond:
                while index >= len(self._events) and not self._finished:
                    self._cond.wait()
                if index >= len(self._events):
                    return
                event = self._events[index]
            index += 1
            yield event

    def wait(self, timeout: float | None = None) -> RunStats:
        with self._cond:
            if not self._cond.wait_for(lambda: self._finished, timeout):
                raise TimeoutError(f"run {self.run_id} still in progress")
            assert self._stats is not None
            return self._stats


def sample_requirement(
    dimensions: Sequence[Dimension],
    pinned: Mapping[str, str] | None = None,
    rng: random.Random | None = None,
) -> Requirement:
    """One uniformly random label per dimension, honoring pinned assignments.

    Deterministic for a given RNG state. Ordinal dimensions participate
    exactly like nominal ones.
    """
    if not dimensions:
        raise PreconditionError("cannot sample from zero dimensions")
    rng = rng if rng is not None else random.Random()
    declared = {d.name.casefold(): d for d in dimensions}
    resolved_pins: dict[str, str] = {}
    for name, label in (pinned or {}).items():
        dim = declared.get(name.casefold())
        if dim is None:
            raise PreconditionError(f"pinned dimension {name!r} does not exist")
        if label not in dim.labels:
            raise PreconditionError(
                f"pinned label {label!r} is not a value of {dim.name!r}"
            )
        resolved_pins[dim.name] = label
    pairs = []
    for dim in dimensions:
        label = resolved_pins.get(dim.name) or rng.choice(dim.labels)
        pairs.append((dim.name, label))
    return Requirement.of(pairs)


class GenerationPipeline:
    """Orchestrates dimension generation, response fan-out, and regeneration."""

    def __init__(
        self,
        provider: CompletionProvider,
        store: SpaceStore,
        config: GenerationConfig | None = None,
    ):
        self.provider = provider
        self.store = store
        self.config = config or GenerationConfig()
        self._rng_lock = threading.Lock()
        self._base_rng = random.Random(self.config.rng_seed)
        self._run_seq = itertools.count(1)
        self._runs: dict[int, GenerationRun] = {}
        self._runs_lock = threading.Lock()

    # -- run registry --------------------------------------------------------

    def get_run(self, run_id: int) -> GenerationRun:
        with self._runs_lock:
            run = self._runs.get(run_id)
        if run is None:
            raise NotFoundError(f"run {run_id} does not exist")
        return run

    def runs(self) -> tuple[GenerationRun, ...]:
        with self._runs_lock:
            return tuple(self._runs.values())

    def _new_run(self, kind: str, space_id: int) -> GenerationRun:
        with self._runs_lock:
            run = GenerationRun(next(self._run_seq), kind, space_id)
            self._runs[run.run_id] = run
            return run

    def _child_rng(self) -> random.Random:
        with self._rng_lock:
            return random.Random(self._base_rng.getrandbits(63))

    def _spawn(self, run: GenerationRun, target, *args) -> GenerationRun:
        def guarded() -> None:
            try:
                target(run, *args)
            except DesignSpaceError as exc:
                logger.debug("run %d ended with error: %s", run.run_id, exc)

        thread = threading.Thread(target=guarded, daemon=True)
        thread.start()
        return run

    # -- provider plumbing ----------------------------------------------------

    def _validated(self, text, tag, parse, cfg, meter, max_tokens, temperature):
        request = CompletionRequest(
            prompt=text,
            max_tokens=max_tokens,
            temperature=temperature,
            request_tag=tag,
        )
        return self.provider.complete_validated(
            request, parse, cfg.retry_limit, meter=meter
        )

    # -- dimension stage --------------------------------------------------------

    def generate_dimensions(
        self,
        prompt: str,
        context: str | None = None,
        cfg: GenerationConfig | None = None,
        meter: CallMeter | None = None,
    ) -> DimensionStageResult:
        """Run the nominal and ordinal dimension calls concurrently.

        Partial success degrades to the successful half with the failure
        recorded; total failure raises the exhaustion error.
        """
        if not prompt.strip():
            raise PreconditionError("prompt must be nonempty")
        cfg = cfg or self.config
        meter = meter or CallMeter()

        def nominal_call() -> tuple[Dimension, ...]:
            rendered = render_nominal_dims(
                prompt, cfg.nominal_count, cfg.nominal_value_cap, context
            )
            return self._validated(
                rendered.text,
                TAG_NOMINAL_DIMS,
                lambda raw: parse_dimension_object(
                    raw, DimensionKind.NOMINAL, cfg.nominal_count, cfg.nominal_value_cap
                ),
                cfg,
                meter,
                DIMENSION_MAX_TOKENS,
                cfg.sampling_temperature,
            )

        def ordinal_call() -> tuple[Dimension, ...]:
            rendered = render_ordinal_dims(prompt, cfg.ordinal_count, context)
            return self._validated(
                rendered.text,
                TAG_ORDINAL_DIMS,
                lambda raw: parse_dimension_object(
                    raw, DimensionKind.ORDINAL, cfg.ordinal_count, cfg.nominal_value_cap
                ),
                cfg,
                meter,
                DIMENSION_MAX_TOKENS,
                cfg.sampling_temperature,
            )

        with ThreadPoolExecutor(max_workers=2) as pool:
            nominal_future = pool.submit(nominal_call)
            ordinal_future = pool.submit(ordinal_call)
            outcomes = {}
            errors: dict[str, ExhaustionError] = {}
            for label, future in (("nominal", nominal_future), ("ordinal", ordinal_future)):
                try:
                    outcomes[label] = future.result()
                except ExhaustionError as exc:
                    errors[label] = exc

        if len(errors) == 2:
            raise errors["nominal"]

        dimensions = list(outcomes.get("nominal", ()))
        taken = {d.name.casefold() for d in dimensions}
        for dim in outcomes.get("ordinal", ()):
            if dim.name.casefold() in taken:
                continue
            taken.add(dim.name.casefold())
            dimensions.append(dim)
        failures = tuple(f"{label} dimension call failed: {exc}" for label, exc in errors.items())
        return DimensionStageResult(dimensions=tuple(dimensions), failures=failures)

    # -- node generation ---------------------------------------------------------

    def _generate_one_node(
        self,
        space: DesignSpace,
        requirement: Requirement,
        node_id: str,
        created_at: int,
        provenance: Provenance,
        cfg: GenerationConfig,
        meter: CallMeter,
    ) -> ResponseNode:
        rendered = render_response(
            space.prompt,
            requirement,
            context=space.context_snapshot or None,
            highlight=space.highlight_snapshot or None,
            word_count=cfg.word_limit,
        )
        full_text = self._validated(
            rendered.text,
            TAG_RESPONSE,
            parse_response_text,
            cfg,
            meter,
            cfg.word_limit * TOKENS_PER_WORD,
            cfg.sampling_temperature,
        )
        bundle = self._validated(
            render_summarization(full_text).text,
            TAG_SUMMARIZE,
            parse_summary_object,
            cfg,
            meter,
            SUMMARY_MAX_TOKENS,
            SUMMARY_TEMPERATURE,
        )
        return ResponseNode(
            id=node_id,
            full_text=full_text,
            bundle=bundle,
            requirement=requirement,
            provenance=provenance,
            created_at=created_at,
        )

    def _run_node_jobs(
        self,
        space: DesignSpace,
        jobs: Sequence[tuple[str, int, Requirement]],
        provenance: Provenance,
        cfg: GenerationConfig,
        run: GenerationRun,
        meter: CallMeter,
    ) -> tuple[list[ResponseNode], int]:
        """Fan node generation out, append successes, and emit node events."""
        produced: list[ResponseNode] = []
        failed = 0
        if not jobs:
            return produced, failed
        with ThreadPoolExecutor(max_workers=cfg.max_concurrent_calls) as pool:
            futures = {
                pool.submit(
                    self._generate_one_node,
                    space,
                    requirement,
                    node_id,
                    created_at,
                    provenance,
                    cfg,
                    meter,
                ): node_id
                for node_id, created_at, requirement in jobs
            }
            for future in as_completed(futures):
                node_id = futures[future]
                try:
                    node = future.result()
                except DesignSpaceError as exc:
                    failed += 1
                    run.emit(
                        EventKind.NODE_FAILED,
                        NodeFailure(node_id=node_id, stage="generation", message=str(exc)),
                    )
                    continue
                self.store.append_node(space.space_id, node)
                produced.append(node)
                run.emit(EventKind.NODE_READY, node)
        produced.sort(key=lambda n: n.created_at)
        return produced, failed

    # -- full space runs ------------------------------------------------------

    def start_space_run(
        self,
        prompt: str,
        context: str = "",
        highlight: str = "",
        overrides: Mapping[str, object] | None = None,
    ) -> GenerationRun:
        if not prompt.strip():
            raise PreconditionError("prompt must be nonempty")
        cfg = replace(self.config, **overrides) if overrides else self.config
        space = self.store.create_space(
            prompt, context_snapshot=context, highlight_snapshot=highlight
        )
        run = self._new_run("space", space.space_id)
        return self._spawn(run, self._execute_space_run, space, cfg, self._child_rng())

    def generate_space(
        self,
        prompt: str,
        context: str = "",
        highlight: str = "",
        overrides: Mapping[str, object] | None = None,
    ) -> tuple[DesignSpace, RunStats]:
        """Synchronous space generation; check stats.error for aborts."""
        if not prompt.strip():
            raise PreconditionError("prompt must be nonempty")
        cfg = replace(self.config, **overrides) if overrides else self.config
        space = self.store.create_space(
            prompt, context_snapshot=context, highlight_snapshot=highlight
        )
        run = self._new_run("space", space.space_id)
        self._execute_space_run(run, space, cfg, self._child_rng())
        return self.store.get_space(space.space_id), run.wait(timeout=0)

    def _execute_space_run(
        self,
        run: GenerationRun,
        space: DesignSpace,
        cfg: GenerationConfig,
        rng: random.Random,
    ) -> None:
        meter = CallMeter()
        context = merge_context(space.context_snapshot or None, space.highlight_snapshot or None)
        try:
            stage = self.generate_dimensions(space.prompt, context, cfg, meter)
        except ExhaustionError as exc:
            run.finish(
                RunStats(
                    requested=cfg.response_count,
                    produced=0,
                    failed=0,
                    calls=meter.count,
                    error=f"dimension generation failed: {exc}",
                )
            )
            return
        self.store.set_dimensions(space.space_id, stage.dimensions)
        space = self.store.get_space(space.space_id)
        run.emit(EventKind.DIMENSIONS_READY, stage.dimensions)

        requirements = [
            sample_requirement(stage.dimensions, rng=rng)
            for _ in range(cfg.response_count)
        ]
        jobs = []
        for requirement in requirements:
            node_id, created_at = self.store.reserve_node_slot(space.space_id)
            jobs.append((node_id, created_at, requirement))
        produced, failed = self._run_node_jobs(
            space, jobs, Provenance.INITIAL, cfg, run, meter
        )
        run.finish(
            RunStats(
                requested=cfg.response_count,
                produced=len(produced),
                failed=failed,
                calls=meter.count,
                notes=stage.failures,
            )
        )

    # -- more-like-this ----------------------------------------------------------

    def start_similar_run(self, space_id: int, node_id: str, k: int | None = None) -> GenerationRun:
        jobs_args = self._prepare_similar(space_id, node_id, k)
        run = self._new_run("similar", space_id)
        return self._spawn(run, self._execute_node_batch, *jobs_args)

    def generate_similar(
        self, space_id: int, node_id: str, k: int | None = None
    ) -> list[ResponseNode]:
        """K new nodes carrying the source node's requirement verbatim."""
        jobs_args = self._prepare_similar(space_id, node_id, k)
        run = self._new_run("similar", space_id)
        return self._execute_node_batch(run, *jobs_args)

    def _prepare_similar(self, space_id: int, node_id: str, k: int | None):
        space = self.store.get_space(space_id)
        source = space.node(node_id)
        if source is None:
            raise NotFoundError(f"node {node_id} does not exist in space {space_id}")
        count = self.config.similar_count if k is None else k
        if count < 0:
            raise PreconditionError("k must be >= 0")
        requirements = [source.requirement for _ in range(count)]
        return space, requirements, Provenance.MORE_LIKE_THIS, self.config

    # -- filtered subspace ---------------------------------------------------------

    def start_subspace_run(
        self, space_id: int, flt: SubspaceFilter, k: int
    ) -> GenerationRun:
        jobs_args = self._prepare_subspace(space_id, flt, k)
        run = self._new_run("subspace", space_id)
        return self._spawn(run, self._execute_node_batch, *jobs_args)

    def generate_in_subspace(
        self, space_id: int, flt: SubspaceFilter, k: int
    ) -> list[ResponseNode]:
        """K new nodes whose requirements satisfy the filter by construction."""
        jobs_args = self._prepare_subspace(space_id, flt, k)
        run = self._new_run("subspace", space_id)
        return self._execute_node_batch(run, *jobs_args)

    def _prepare_subspace(self, space_id: int, flt: SubspaceFilter, k: int):
        space = self.store.get_space(space_id)
        if flt.bookmarked_only:
            raise PreconditionError(
                "bookmark filters define no generative constraint"
            )
        validate_filter(space, flt)
        if k < 0:
            raise PreconditionError("k must be >= 0")
        rng = self._child_rng()
        accepted_by_dim: dict[str, list[str]] = {}
        for name, labels in flt.selections:
            dim = space.find_dimension(name)
            wanted = set(labels)
            # Keep the dimension's declared value order for determinism.
            accepted_by_dim[dim.name] = [v for v in dim.labels if v in wanted]
        requirements = []
        for _ in range(k):
            pins = {
                name: rng.choice(accepted) for name, accepted in accepted_by_dim.items()
            }
            requirements.append(sample_requirement(space.dimensions, pins, rng))
        return space, requirements, Provenance.SUBSPACE, self.config

    def _execute_node_batch(
        self,
        run: GenerationRun,
        space: DesignSpace,
        requirements: Sequence[Requirement],
        provenance: Provenance,
        cfg: GenerationConfig,
    ) -> list[ResponseNode]:
        meter = CallMeter()
        run.emit(EventKind.DIMENSIONS_READY, space.dimensions)
        jobs = []
        for requirement in requirements:
            node_id, created_at = self.store.reserve_node_slot(space.space_id)
            jobs.append((node_id, created_at, requirement))
        produced, failed = self._run_node_jobs(space, jobs, provenance, cfg, run, meter)
        run.finish(
            RunStats(
                requested=len(requirements),
                produced=len(produced),
                failed=failed,
                calls=meter.count,
            )
        )
        return produced

    # -- user-defined dimensions ---------------------------------------------------

    def start_add_dimension_run(self, space_id: int, name: str) -> GenerationRun:
        self._check_new_dimension_name(space_id, name)
        run = self._new_run("add-dimension", space_id)
        return self._spawn(
            run, self._execute_add_dimension, space_id, name, self.config, self._child_rng()
        )

    def add_user_dimension(self, space_id: int, name: str) -> AddDimensionResult:
        """Add a named dimension, generate its values, and revise every node.

        Value-generation failure aborts with the space unchanged. Per-node
        revision failures leave those nodes labeled but unrevised.
        """
        self._check_new_dimension_name(space_id, name)
        run = self._new_run("add-dimension", space_id)
        return self._execute_add_dimension(run, space_id, name, self.config, self._child_rng())

    def _check_new_dimension_name(self, space_id: int, name: str) -> None:
        space = self.store.get_space(space_id)
        if not name.strip():
            raise PreconditionError("dimension name must be nonempty")
        if space.find_dimension(name) is not None:
            raise PreconditionError(f"duplicate dimension name {name!r}")

    def _execute_add_dimension(
        self,
        run: GenerationRun,
        space_id: int,
        name: str,
        cfg: GenerationConfig,
        rng: random.Random,
    ) -> AddDimensionResult:
        space = self.store.get_space(space_id)
        meter = CallMeter()
        context = merge_context(space.context_snapshot or None, space.highlight_snapshot or None)

        def parse_values(raw: str) -> Dimension:
            parsed = parse_dimension_object(
                raw, DimensionKind.NOMINAL, 1, cfg.nominal_value_cap
            )[0]
            return Dimension.nominal(
                name, parsed.labels, origin=DimensionOrigin.USER_DEFINED
            )

        try:
            dimension = self._validated(
                render_dimension_values(
                    space.prompt, name, cfg.nominal_value_cap, context
                ).text,
                TAG_DIMENSION_VALUES,
                parse_values,
                cfg,
                meter,
                DIMENSION_MAX_TOKENS,
                cfg.sampling_temperature,
            )
        except ExhaustionError as exc:
            run.finish(
                RunStats(
                    requested=len(space.nodes),
                    produced=0,
                    failed=0,
                    calls=meter.count,
                    error=f"value generation failed: {exc}",
                )
            )
            raise

        labels = {node.id: rng.choice(dimension.labels) for node in space.nodes}
        self.store.add_dimension_and_extend(space_id, dimension, labels)
        run.emit(EventKind.DIMENSIONS_READY, (dimension,))

        revised: list[str] = []
        failed: list[str] = []
        space = self.store.get_space(space_id)
        if space.nodes:
            with ThreadPoolExecutor(max_workers=cfg.max_concurrent_calls) as pool:
                futures = {
                    pool.submit(
                        self._revise_node, node, dimension.name, labels[node.id], cfg, meter
                    ): node.id
                    for node in space.nodes
                }
                for future in as_completed(futures):
                    node_id = futures[future]
                    try:
                        full_text, bundle = future.result()
                    except DesignSpaceError as exc:
                        failed.append(node_id)
                        run.emit(
                            EventKind.NODE_FAILED,
                            NodeFailure(node_id=node_id, stage="revision", message=str(exc)),
                        )
                        continue
                    node = self.store.apply_revision(space_id, node_id, full_text, bundle)
                    revised.append(node_id)
                    run.emit(EventKind.NODE_READY, node)
        stats = RunStats(
            requested=len(labels),
            produced=len(revised),
            failed=len(failed),
            calls=meter.count,
            notes=tuple(f"unrevised node {node_id}" for node_id in sorted(failed)),
        )
        run.finish(stats)
        return AddDimensionResult(
            dimension=dimension,
            revised=tuple(sorted(revised)),
            unrevised=tuple(sorted(failed)),
            calls=meter.count,
        )

    def _revise_node(
        self,
        node: ResponseNode,
        dimension_name: str,
        label: str,
        cfg: GenerationConfig,
        meter: CallMeter,
    ):
        """Revise one node's text for the new assignment, then re-summarize.

        Both calls must succeed; otherwise the node keeps its old text and
        bundle so they stay mutually consistent.
        """
        full_text = self._validated(
            render_revision(node.full_text, dimension_name, label, cfg.word_limit).text,
            TAG_REVISE,
            parse_response_text,
            cfg,
            meter,
            cfg.word_limit * TOKENS_PER_WORD,
            cfg.sampling_temperature,
        )
        bundle = self._validated(
            render_summarization(full_text).text,
            TAG_SUMMARIZE,
            parse_summary_object,
            cfg,
            meter,
            SUMMARY_MAX_TOKENS,
            SUMMARY_TEMPERATURE,
        )
        return full_text, bundle

    # -- dimension suggestion ---------------------------------------------------

    def suggest_new_dimension(self, space_id: int) -> str:
        """A fresh dimension name orthogonal to the space's existing ones."""
        space = self.store.get_space(space_id)
        if not space.dimensions:
            raise PreconditionError("space has no dimensions to extend")
        context = merge_context(space.context_snapshot or None, space.highlight_snapshot or None)
        rendered = render_new_dimension(space.prompt, space.dimensions, context)
        existing = [d.name for d in space.dimensions]
        return self._validated(
            rendered.text,
            TAG_NEW_DIMENSION,
            lambda raw: parse_dimension_name(raw, existing),
            self.config,
            None,
            NAME_MAX_TOKENS,
            self.config.sampling_temperature,
        )
