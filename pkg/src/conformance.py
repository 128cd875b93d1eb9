"""
Symbolic conformance checking on zone graphs.

`check` explores the suspension span traces of the specification breadth-first
and compares out-sets of implementation and specification after every prefix.
"""
import logging
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from src.errors import AlphabetMismatch
from src.settings import DEFAULT_CHECK_DEPTH
from src.spans import QUIESCENCE_SPAN, Span, merge_spans, refine, span_leq
from src.traces import (
    LTIOCO_FLAVORS,
    Quiescence,
    SpanStep,
    SpanTrace,
    StateSet,
    StepLabel,
    initial_states,
    label_spans,
    quiescent_subset,
    refinement_bound,
    step_spans,
    successor_fn,
    successors,
    visible_labels,
)
from src.zonegraph import IOLZG, SymbolicState, check_independent_progress, check_input_enabled, classify_quiescence

logger = logging.getLogger(__name__)


class ConformanceRelation(str, Enum):
    LTIOCO = "ltioco"
    TIOCO_DELTA = "tioco-delta"

    @property
    def flavors(self) -> Tuple[Quiescence, ...]:
        if self is ConformanceRelation.LTIOCO:
            return LTIOCO_FLAVORS
        return (Quiescence.CLASSIC,)


# -------------------------------------- Out-sets ----------------------------------------

def _priority(label: StepLabel):
    # quiescence mismatches are reported before output mismatches
    if label is Quiescence.SAFE:
        return (0, "")
    if isinstance(label, Quiescence):
        return (1, label.value)
    return (2, label.name)


@dataclass(frozen=True)
class OutEntry:
    span: Span
    label: StepLabel

    def sort_key(self):
        return (_priority(self.label), self.span.sort_key())

    def render(self) -> str:
        return f"({self.span.render()}, {self.label.render()})"


@dataclass(frozen=True)
class OutSet:
    entries: FrozenSet[OutEntry] = frozenset()

    @classmethod
    def of(cls, entries: Iterable[Tuple[Span, StepLabel]]) -> "OutSet":
        return cls(frozenset(OutEntry(span, label) for span, label in merge_spans(entries)))

    def covered(self, entry: OutEntry) -> bool:
        return any(e.label == entry.label and span_leq(entry.span, e.span) for e in self.entries)

    def offending(self, other: "OutSet") -> List[OutEntry]:
        """Entries of self with no containing entry in `other`, in reporting order."""
        return sorted((e for e in self.entries if not other.covered(e)), key=OutEntry.sort_key)

    def leq(self, other: "OutSet") -> bool:
        return not self.offending(other)

    def sorted(self) -> List[OutEntry]:
        return sorted(self.entries, key=OutEntry.sort_key)

    def render(self) -> str:
        return "{" + ", ".join(e.render() for e in self.sorted()) + "}"


def out_set(states: Iterable[SymbolicState], g: IOLZG,
            mode: ConformanceRelation = ConformanceRelation.LTIOCO) -> OutSet:
    states = list(states)
    entries: List[Tuple[Span, StepLabel]] = []
    for label in g.automaton.output_labels:
        entries.extend((span, label) for span in label_spans(states, label, g))
    classes = [classify_quiescence(s, g) for s in states]
    if mode is ConformanceRelation.LTIOCO:
        if any(c.safe for c in classes):
            entries.append((QUIESCENCE_SPAN, Quiescence.SAFE))
        if any(c.enforced for c in classes):
            entries.append((QUIESCENCE_SPAN, Quiescence.ENFORCED))
    elif any(c.enforced for c in classes):
        entries.append((QUIESCENCE_SPAN, Quiescence.CLASSIC))
    return OutSet.of(entries)


def after(states: Iterable[SymbolicState], step: SpanStep, g: IOLZG) -> StateSet:
    if isinstance(step.label, Quiescence):
        return quiescent_subset(states, step.label, g)
    return successors(states, step.label, step.span, g)


# -------------------------------------- Verdicts ----------------------------------------

@dataclass(frozen=True)
class CheckConfig:
    depth: int = DEFAULT_CHECK_DEPTH
    relation: ConformanceRelation = ConformanceRelation.LTIOCO
    semantics: str = "weak"

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError("depth must be at least 1")
        if self.semantics != "weak":
            raise ValueError("only weak semantics is supported")


@dataclass
class CheckStats:
    states_explored: int = 0
    traces_expanded: int = 0

    def as_dict(self) -> dict:
        return {"states_explored": self.states_explored, "traces_expanded": self.traces_expanded}


@dataclass(frozen=True)
class Witness:
    trace: SpanTrace
    offending: OutEntry
    impl_out: OutSet
    spec_out: OutSet

    def as_dict(self) -> dict:
        return {
            "trace": [{"span": s.span.render(), "label": s.label.render()} for s in self.trace.steps],
            "offending": {"span": self.offending.span.render(), "label": self.offending.label.render()},
            "impl_out": [e.render() for e in self.impl_out.sorted()],
            "spec_out": [e.render() for e in self.spec_out.sorted()],
        }


@dataclass(frozen=True)
class Verdict:
    passed: bool
    relation: ConformanceRelation
    witness: Optional[Witness] = None
    stats: CheckStats = field(default_factory=CheckStats)

    def as_dict(self) -> dict:
        return {
            "pass": self.passed,
            "relation": self.relation.value,
            "witness": self.witness.as_dict() if self.witness else None,
            "stats": self.stats.as_dict(),
        }


def _check_alphabets(impl: IOLZG, spec: IOLZG):
    if impl.inputs != spec.inputs or impl.outputs != spec.outputs:
        raise AlphabetMismatch(
            f"alphabets differ: {impl.automaton.name} has inputs {sorted(impl.inputs)} / outputs "
            f"{sorted(impl.outputs)}, {spec.automaton.name} has inputs {sorted(spec.inputs)} / "
            f"outputs {sorted(spec.outputs)}"
        )


def _children(impl: IOLZG, spec: IOLZG, impl_set: StateSet, spec_set: StateSet,
              last: Optional[StepLabel], flavors: Sequence[Quiescence], bound: int):
    # spans are cut until both after-sets are the same at every delay of a span
    for label in visible_labels(spec):
        impl_at, spec_at = successor_fn(impl_set, label, impl), successor_fn(spec_set, label, spec)
        for span, _ in step_spans(spec_set, label, spec):
            for piece, (impl_next, spec_next) in refine(span, bound, lambda p: (impl_at(p), spec_at(p))):
                if spec_next:
                    yield SpanStep(piece, label), impl_next, spec_next
    for flavor in flavors:
        if flavor == last:
            continue
        spec_next = quiescent_subset(spec_set, flavor, spec)
        if spec_next:
            yield SpanStep(QUIESCENCE_SPAN, flavor), quiescent_subset(impl_set, flavor, impl), spec_next


def check(impl: IOLZG, spec: IOLZG, cfg: Optional[CheckConfig] = None) -> Verdict:
    """
    Decide whether `impl` conforms to `spec` up to `cfg.depth` steps.

    Specification spans are cut into unit pieces up to the refinement bound of
    both graphs and joined back where neither after-set changes, so a witness
    span reaches the same states at every delay it contains. The first failing
    trace in breadth-first, sorted order is reported as witness.
    """
    cfg = cfg or CheckConfig()
    _check_alphabets(impl, spec)
    check_input_enabled(impl)
    check_independent_progress(impl)

    relation = cfg.relation
    flavors = relation.flavors
    bound = refinement_bound(impl, spec)
    stats = CheckStats()
    root = (initial_states(impl), initial_states(spec))
    visited: Set[Tuple[StateSet, StateSet]] = {root}
    queue = deque([(root[0], root[1], SpanTrace(), None)])
    while queue:
        impl_set, spec_set, trace, last = queue.popleft()
        stats.traces_expanded += 1
        impl_out = out_set(impl_set, impl, relation)
        spec_out = out_set(spec_set, spec, relation)
        bad = impl_out.offending(spec_out)
        if bad:
            stats.states_explored = len(visited)
            witness = Witness(trace, bad[0], impl_out, spec_out)
            logger.info(f"{relation.value} FAIL after {trace.render()}: {bad[0].render()} not allowed")
            return Verdict(False, relation, witness, stats)
        if len(trace) >= cfg.depth or not impl_set:
            continue
        for step, impl_next, spec_next in _children(impl, spec, impl_set, spec_set, last, flavors, bound):
            key = (impl_next, spec_next)
            if key in visited:
                continue
            visited.add(key)
            queue.append((impl_next, spec_next, trace.extend(step), step.label))

    stats.states_explored = len(visited)
    logger.info(f"{relation.value} PASS: {impl.automaton.name} vs {spec.automaton.name} "
                f"({stats.states_explored} state pairs, depth {cfg.depth})")
    return Verdict(True, relation, None, stats)


@dataclass(frozen=True)
class TraceCheck:
    impl_states: StateSet
    spec_states: StateSet
    impl_out: OutSet
    spec_out: OutSet
    offending: Tuple[OutEntry, ...]

    @property
    def passed(self) -> bool:
        return not self.offending


def check_trace(impl: IOLZG, spec: IOLZG, trace: SpanTrace,
                relation: ConformanceRelation = ConformanceRelation.LTIOCO) -> TraceCheck:
    """Compare the out-sets of both graphs after one given trace."""
    _check_alphabets(impl, spec)
    impl_set, spec_set = initial_states(impl), initial_states(spec)
    for step in trace.steps:
        impl_set = after(impl_set, step, impl)
        spec_set = after(spec_set, step, spec)
    impl_out = out_set(impl_set, impl, relation)
    spec_out = out_set(spec_set, spec, relation)
    return TraceCheck(impl_set, spec_set, impl_out, spec_out, tuple(impl_out.offending(spec_out)))


def explain(v: Verdict) -> str:
    lines: List[str] = []
    lines.append("=" * 60)
    lines.append(f"{v.relation.value}: {'PASS' if v.passed else 'FAIL'}")
    lines.append("=" * 60)
    if v.witness is not None:
        w = v.witness
        lines.append(f"Trace:      {w.trace.render()}")
        lines.append(f"Impl out:   {w.impl_out.render()}")
        lines.append(f"Spec out:   {w.spec_out.render()}")
        kind = "quiescence" if isinstance(w.offending.label, Quiescence) else "output"
        lines.append(f"Violation:  {kind} {w.offending.render()} of the implementation "
                     f"is not contained in any specification entry labelled {w.offending.label.render()}")
    lines.append(f"States explored: {v.stats.states_explored}, traces expanded: {v.stats.traces_expanded}")
    return "\n".join(lines)
