"""
Span steps and (suspension) span traces over a zone graph.

A span step fires one visible label after a delay taken from a span; the delay is
measured since the previous visible step. Quiescence observations are steps that
keep the current set of states and carry the conventional span QUIESCENCE_SPAN.

Successor sets of a maximal span join states reached at different delays. Refined
steps cut spans into unit pieces until each piece reaches one set of states, which
keeps later spans tied to the delay that was actually taken.
"""
from dataclasses import dataclass
from enum import Enum
from functools import partial
from typing import Callable, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple, Union

from src import dbm
from src.errors import UnknownLabel
from src.model import ActionKind, ActionLabel, Switch, delay_horizon
from src.spans import QUIESCENCE_SPAN, Span, merge_spans, partition, refine, span_leq  # noqa: F401
from src.zonegraph import (
    DELAY_CLOCK,
    IOLZG,
    ClosureEntry,
    SymbolicState,
    classify_quiescence,
    closure_entries,
    fire,
    project,
    zero_time_closure,
)

__all__ = [
    "Quiescence", "SpanStep", "SpanTrace", "StateSet", "span_leq", "merge_spans", "step_spans",
    "successors", "successor_fn", "refined_step_spans", "refinement_bound", "label_spans", "quiescent_subset",
    "initial_states", "enumerate_span_traces", "visible_labels",
]

StateSet = FrozenSet[SymbolicState]


class Quiescence(str, Enum):
    SAFE = "delta_S"
    ENFORCED = "delta_E"
    CLASSIC = "delta"

    def render(self) -> str:
        return self.value

    def __str__(self) -> str:
        return self.value


StepLabel = Union[ActionLabel, Quiescence]


def _label_key(label: StepLabel):
    if isinstance(label, Quiescence):
        return (1, label.value, "")
    return (0, label.name, label.kind.value)


@dataclass(frozen=True)
class SpanStep:
    span: Span
    label: StepLabel

    @property
    def is_quiescence(self) -> bool:
        return isinstance(self.label, Quiescence)

    def sort_key(self):
        return (_label_key(self.label), self.span.sort_key())

    def render(self) -> str:
        return f"{self.span.render()} {self.label.render()}"


@dataclass(frozen=True)
class SpanTrace:
    steps: Tuple[SpanStep, ...] = ()

    def __len__(self) -> int:
        return len(self.steps)

    def extend(self, step: SpanStep) -> "SpanTrace":
        return SpanTrace(self.steps + (step,))

    def sort_key(self):
        return (len(self.steps), tuple(s.sort_key() for s in self.steps))

    def render(self) -> str:
        if not self.steps:
            return "<empty>"
        return ", ".join(step.render() for step in self.steps)

    def __str__(self) -> str:
        return self.render()


def visible_labels(g: IOLZG) -> List[ActionLabel]:
    a = g.automaton
    return sorted(a.input_labels + a.output_labels, key=_label_key)


def _check_label(label: ActionLabel, g: IOLZG):
    if label.kind is ActionKind.INPUT:
        known = label.name in g.inputs
    elif label.kind is ActionKind.OUTPUT:
        known = label.name in g.outputs
    else:
        known = False
    if not known:
        raise UnknownLabel(f"{label.render()} is not a visible action of {g.automaton.name}")


def _label_edges(states: Iterable[SymbolicState], label: ActionLabel,
                 g: IOLZG) -> List[Tuple[Span, Tuple[ClosureEntry, Switch]]]:
    """Every (closure entry, switch) pair firing `label`, with its delay span."""
    edges = []
    for state in sorted(states, key=SymbolicState.sort_key):
        for entry in closure_entries(state, g):
            for sw in g.automaton.switches_from(entry.location):
                if sw.action != label:
                    continue
                target = fire(g, entry, sw)
                if target is not None:
                    edges.append((dbm.span_of_clock(target, DELAY_CLOCK), (entry, sw)))
    return edges


def label_spans(states: Iterable[SymbolicState], label: ActionLabel, g: IOLZG) -> List[Span]:
    """Raw delay spans of every firing of `label`, unmerged."""
    return [span for span, _ in _label_edges(states, label, g)]


def _fire_within(edges: Sequence[Tuple[Span, Tuple[ClosureEntry, Switch]]], span: Span, g: IOLZG) -> StateSet:
    reached = set()
    for _, (entry, sw) in edges:
        target = fire(g, entry, sw, within=span)
        if target is not None:
            reached.add(project(g, sw.target, target))
    return zero_time_closure(reached, g)


def successors(states: Iterable[SymbolicState], label: ActionLabel, span: Span, g: IOLZG) -> StateSet:
    """States reached by `label` after some delay in `span`, closed under zero-time tau moves."""
    return _fire_within(_label_edges(states, label, g), span, g)


def successor_fn(states: Iterable[SymbolicState], label: ActionLabel, g: IOLZG) -> Callable[[Span], StateSet]:
    """`successors` with the firing edges of `states` computed once."""
    return partial(_fire_within, _label_edges(states, label, g), g=g)


def step_spans(states: Iterable[SymbolicState], label: ActionLabel, g: IOLZG) -> List[Tuple[Span, StateSet]]:
    """
    Delay spans at which `label` fires from `states`, each with its successor set.

    Spans are maximal intervals on which the set of firing (closure state, switch)
    pairs does not change; every span is nonempty.
    """
    _check_label(label, g)
    edges = _label_edges(states, label, g)
    result = []
    for span, _ in partition([(span, i) for i, (span, _) in enumerate(edges)]):
        succ = _fire_within(edges, span, g)
        if succ:
            result.append((span, succ))
    return result


def refinement_bound(*graphs: IOLZG) -> int:
    """Delay above which successor sets no longer depend on the exact delay."""
    return max(delay_horizon(g.automaton, g.ceiling + 1) for g in graphs)


def refined_step_spans(states: Iterable[SymbolicState], label: ActionLabel, g: IOLZG,
                       bound: Optional[int] = None) -> List[Tuple[Span, StateSet]]:
    """
    Like `step_spans`, but every span is cut where the successor set changes with
    the delay: each returned span reaches the same states at all of its delays.
    """
    bound = refinement_bound(g) if bound is None else bound
    states = list(states)
    fire_at = successor_fn(states, label, g)
    result = []
    for span, _ in step_spans(states, label, g):
        result.extend((piece, succ) for piece, succ in refine(span, bound, fire_at) if succ)
    return result


def quiescent_subset(states: Iterable[SymbolicState], flavor: Quiescence, g: IOLZG) -> StateSet:
    if flavor is Quiescence.SAFE:
        return frozenset(s for s in states if classify_quiescence(s, g).safe)
    return frozenset(s for s in states if classify_quiescence(s, g).enforced)


def initial_states(g: IOLZG) -> StateSet:
    return zero_time_closure([g.initial], g)


LTIOCO_FLAVORS = (Quiescence.SAFE, Quiescence.ENFORCED)


def enumerate_span_traces(g: IOLZG, depth: int, with_quiescence: bool = False,
                          flavors: Sequence[Quiescence] = LTIOCO_FLAVORS,
                          refined: bool = False) -> FrozenSet[SpanTrace]:
    """
    All (suspension) span traces of length at most `depth`.

    With `refined`, spans are cut as in `refined_step_spans`, so every delay vector
    drawn from the spans of a trace is realizable.
    """
    labels = visible_labels(g)
    bound = refinement_bound(g)
    found: Set[SpanTrace] = set()

    def steps(states: StateSet, label: ActionLabel):
        if refined:
            return refined_step_spans(states, label, g, bound)
        return step_spans(states, label, g)

    def walk(states: StateSet, trace: SpanTrace, last: Optional[StepLabel]):
        found.add(trace)
        if len(trace) >= depth:
            return
        for label in labels:
            for span, succ in steps(states, label):
                walk(succ, trace.extend(SpanStep(span, label)), label)
        if with_quiescence:
            for flavor in flavors:
                if flavor == last:
                    continue
                quiet = quiescent_subset(states, flavor, g)
                if quiet:
                    walk(quiet, trace.extend(SpanStep(QUIESCENCE_SPAN, flavor)), flavor)

    walk(initial_states(g), SpanTrace(), None)
    return frozenset(found)
