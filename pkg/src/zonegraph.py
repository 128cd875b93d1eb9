"""
The k-normalized input/output labelled zone graph (IOLZG) of an automaton, plus
classification of its symbolic states.

Delays are measured with an auxiliary clock (DELAY_CLOCK) that is appended to a
zone while its delay closure is explored and projected away afterwards.
"""
import logging
from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple, Union

import networkx as nx

from src import dbm
from src.dbm import Zone
from src.errors import DiagonalConstraint, EmptyZone, ExplorationLimitExceeded, InvalidCeiling
from src.model import TIOA, ActionKind, ActionLabel, Switch, max_constant
from src.settings import ITERATION_CAP
from src.spans import Span, covers_all, merge_intervals, span_leq

logger = logging.getLogger(__name__)

DELAY_CLOCK = "~t"


class Epsilon(Enum):
    EPS = "eps"

    def render(self) -> str:
        return self.value


EPSILON = Epsilon.EPS
EdgeLabel = Union[ActionLabel, Epsilon]


@dataclass(frozen=True)
class SymbolicState:
    location: str
    zone: Zone

    def sort_key(self):
        return (self.location, self.zone.entries or ())

    def render(self) -> str:
        return f"{self.location} | {dbm.zone_to_string(self.zone)}"

    def __str__(self) -> str:
        return self.render()


@dataclass(frozen=True)
class ZGEdge:
    source: SymbolicState
    label: EdgeLabel
    target: SymbolicState


@dataclass(frozen=True)
class ClosureEntry:
    """A state of a delay closure, its zone extended with the delay clock."""
    location: str
    zone: Zone

    @property
    def span(self) -> Span:
        return dbm.span_of_clock(self.zone, DELAY_CLOCK)


@dataclass(frozen=True)
class QuiescenceClass:
    state: SymbolicState
    safe: bool
    enforced: bool


@dataclass(frozen=True)
class StateViolation:
    state: SymbolicState
    message: str


@dataclass(frozen=True)
class StateReport:
    ok: bool
    violations: Tuple[StateViolation, ...] = ()

    def as_dict(self) -> dict:
        return {
            "ok": self.ok,
            "violations": [{"state": v.state.render(), "message": v.message} for v in self.violations],
        }


class IOLZG:
    """
    Zone graph of one automaton. Nodes of `graph` are symbolic states; every edge
    carries its label under the `label` attribute and uses the label as its key.
    """

    def __init__(self, automaton: TIOA, ceiling: int, initial: SymbolicState, graph: nx.MultiDiGraph):
        self.automaton = automaton
        self.ceiling = ceiling
        self.initial = initial
        self.graph = graph
        self._closures: Dict[Tuple[SymbolicState, bool], Tuple[ClosureEntry, ...]] = {}
        self._quiescence: Dict[SymbolicState, QuiescenceClass] = {}

    @property
    def clocks(self) -> Tuple[str, ...]:
        return self.automaton.clock_names

    @property
    def inputs(self) -> FrozenSet[str]:
        return self.automaton.inputs

    @property
    def outputs(self) -> FrozenSet[str]:
        return self.automaton.outputs

    @property
    def states(self) -> FrozenSet[SymbolicState]:
        return frozenset(self.graph.nodes)

    @property
    def edges(self) -> FrozenSet[ZGEdge]:
        return frozenset(
            ZGEdge(src, data["label"], dst) for src, dst, data in self.graph.edges(data=True)
        )

    def sorted_states(self) -> List[SymbolicState]:
        return sorted(self.graph.nodes, key=SymbolicState.sort_key)

    def successors(self, state: SymbolicState) -> List[Tuple[EdgeLabel, SymbolicState]]:
        return [(data["label"], dst) for _, dst, data in self.graph.out_edges(state, data=True)]

    def normalize(self, location: str, zone: Zone) -> SymbolicState:
        return SymbolicState(location, dbm.k_normalize(zone, self.ceiling))

    def __repr__(self) -> str:
        return (f"IOLZG({self.automaton.name!r}, k={self.ceiling}, "
                f"states={self.graph.number_of_nodes()}, edges={self.graph.number_of_edges()})")


# -------------------------------------- Construction ------------------------------------

def _successor(a: TIOA, zone: Zone, sw: Switch) -> Optional[Zone]:
    """R(D and g) and I(target), or None when empty."""
    z = dbm.constrain(zone, sw.guard)
    if z.is_empty:
        return None
    z = dbm.constrain(dbm.reset(z, sw.resets), a.invariant(sw.target))
    return None if z.is_empty else z


def build_iolzg(a: TIOA, k: Optional[int] = None) -> IOLZG:
    """
    Explore the zone graph of `a` from its initial state.

    Args:
        a: a diagonal-free automaton.
        k: clock ceiling; defaults to the largest constant of `a`.

    Returns:
        The finished (immutable) IOLZG.
    """
    largest = max_constant(a)
    if k is None:
        k = largest
    if k < largest:
        raise InvalidCeiling(f"ceiling {k} is below the largest constant {largest} of {a.name}")
    diagonal = next((c for c in a.constraints() if c.is_diagonal), None)
    if diagonal is not None:
        raise DiagonalConstraint(f"{a.name}: diagonal constraint {diagonal.render()} is not supported")

    clocks = a.clock_names
    start = dbm.constrain(dbm.origin(clocks), a.invariant(a.initial))
    if start.is_empty:
        raise EmptyZone(f"{a.name}: the initial location's invariant excludes the all-zero valuation")

    initial = SymbolicState(a.initial, dbm.k_normalize(start, k))
    graph = nx.MultiDiGraph()
    graph.add_node(initial)
    queue = deque([initial])
    while queue:
        if graph.number_of_nodes() > ITERATION_CAP:
            raise ExplorationLimitExceeded(f"{a.name}: zone graph exceeds {ITERATION_CAP} states")
        state = queue.popleft()
        targets: List[Tuple[EdgeLabel, SymbolicState]] = []
        closed = dbm.k_normalize(dbm.constrain(dbm.up(state.zone), a.invariant(state.location)), k)
        targets.append((EPSILON, SymbolicState(state.location, closed)))
        for sw in a.switches_from(state.location):
            z = _successor(a, state.zone, sw)
            if z is not None:
                targets.append((sw.action, SymbolicState(sw.target, dbm.k_normalize(z, k))))
        for label, target in targets:
            if target not in graph:
                graph.add_node(target)
                queue.append(target)
            graph.add_edge(state, target, key=label, label=label)

    logger.info(f"Built IOLZG of {a.name}: {graph.number_of_nodes()} states, "
                f"{graph.number_of_edges()} edges (k={k})")
    return IOLZG(a, k, initial, graph)


# --------------------------------------- Closures ---------------------------------------

def closure_entries(state: SymbolicState, g: IOLZG, weak: bool = True) -> Tuple[ClosureEntry, ...]:
    """
    States occupied from `state` by letting time pass and, when `weak`, taking tau
    switches; zones carry the delay clock, reset at `state`.
    """
    key = (state, weak)
    cached = g._closures.get(key)
    if cached is not None:
        return cached

    a = g.automaton
    seen: Dict[str, List[Zone]] = {}
    entries: List[ClosureEntry] = []
    queue = deque([(state.location, dbm.extend(state.zone, DELAY_CLOCK))])
    steps = 0
    while queue:
        steps += 1
        if steps > ITERATION_CAP:
            raise ExplorationLimitExceeded(f"delay closure of {state} exceeds {ITERATION_CAP} steps")
        location, zone = queue.popleft()
        closed = dbm.constrain(dbm.up(zone), a.invariant(location))
        if closed.is_empty:
            continue
        known = seen.setdefault(location, [])
        if any(dbm.includes(z, closed) for z in known):
            continue
        known.append(closed)
        entries.append(ClosureEntry(location, closed))
        if not weak:
            break
        for sw in a.switches_from(location):
            if sw.action.is_tau:
                target = _successor(a, closed, sw)
                if target is not None:
                    queue.append((sw.target, target))

    result = tuple(entries)
    g._closures[key] = result
    return result


def fire(g: IOLZG, entry: ClosureEntry, sw: Switch, within: Optional[Span] = None) -> Optional[Zone]:
    """Target zone (delay clock kept) of `sw` taken from `entry`, optionally at delays in `within`."""
    zone = entry.zone if within is None else dbm.restrict(entry.zone, DELAY_CLOCK, within)
    if zone.is_empty:
        return None
    return _successor(g.automaton, zone, sw)


def project(g: IOLZG, location: str, zone: Zone) -> SymbolicState:
    return g.normalize(location, dbm.project_out(zone, DELAY_CLOCK))


def delay_closure(state: SymbolicState, g: IOLZG) -> FrozenSet[Tuple[SymbolicState, Span]]:
    return frozenset(
        (project(g, e.location, e.zone), e.span) for e in closure_entries(state, g)
    )


def zero_time_closure(states: Iterable[SymbolicState], g: IOLZG) -> FrozenSet[SymbolicState]:
    """States reachable through tau switches without letting time pass."""
    a = g.automaton
    result = set(states)
    queue = deque(result)
    while queue:
        if len(result) > ITERATION_CAP:
            raise ExplorationLimitExceeded(f"tau closure exceeds {ITERATION_CAP} states")
        state = queue.popleft()
        for sw in a.switches_from(state.location):
            if not sw.action.is_tau:
                continue
            z = _successor(a, state.zone, sw)
            if z is None:
                continue
            target = g.normalize(sw.target, z)
            if target not in result:
                result.add(target)
                queue.append(target)
    return frozenset(result)


# ------------------------------------ Classification ------------------------------------

def _fire_spans(g: IOLZG, entries: Iterable[ClosureEntry], kind: ActionKind,
                name: Optional[str] = None) -> List[Span]:
    spans = []
    for entry in entries:
        for sw in g.automaton.switches_from(entry.location):
            if sw.action.kind is not kind or (name is not None and sw.action.name != name):
                continue
            target = fire(g, entry, sw)
            if target is not None:
                spans.append(dbm.span_of_clock(target, DELAY_CLOCK))
    return spans


def classify_quiescence(state: SymbolicState, g: IOLZG) -> QuiescenceClass:
    cached = g._quiescence.get(state)
    if cached is not None:
        return cached
    entries = closure_entries(state, g)
    enforced = not _fire_spans(g, entries, ActionKind.OUTPUT)
    safe = covers_all(e.span for e in entries)
    result = QuiescenceClass(state, safe=safe, enforced=enforced)
    g._quiescence[state] = result
    return result


def check_input_enabled(g: IOLZG, weak: bool = True) -> StateReport:
    """Every input must be accepted at every delay at which a state can be occupied."""
    violations = []
    for state in g.sorted_states():
        entries = closure_entries(state, g, weak=weak)
        occupied = merge_intervals(e.span for e in entries)
        for name in sorted(g.inputs):
            accepted = merge_intervals(_fire_spans(g, entries, ActionKind.INPUT, name))
            gap = next((s for s in occupied if not any(span_leq(s, acc) for acc in accepted)), None)
            if gap is not None:
                violations.append(StateViolation(state, f"input {name} not accepted for delays in {gap}"))
                break
    if violations:
        logger.warning(f"{g.automaton.name}: {len(violations)} state(s) not input-enabled")
    return StateReport(not violations, tuple(violations))


def check_independent_progress(g: IOLZG, weak: bool = True) -> StateReport:
    """Each state can either wait forever or eventually produce an output."""
    violations = []
    for state in g.sorted_states():
        entries = closure_entries(state, g, weak=weak)
        if covers_all(e.span for e in entries):
            continue
        if _fire_spans(g, entries, ActionKind.OUTPUT):
            continue
        violations.append(StateViolation(state, "cannot wait forever and no output is reachable"))
    if violations:
        logger.warning(f"{g.automaton.name}: {len(violations)} state(s) without independent progress")
    return StateReport(not violations, tuple(violations))


# ----------------------------------------- DOT ------------------------------------------

def _gvquote(s: str) -> str:
    return '"{}"'.format(s.replace("\\", "\\\\").replace('"', '\\"'))


def export_dot(g: IOLZG) -> str:
    states = sorted(g.graph.nodes, key=lambda s: (s.location, dbm.zone_to_string(s.zone), s.sort_key()))
    ids = {state: f"n{i}" for i, state in enumerate(states)}
    lines = [f"digraph {_gvquote(g.automaton.name)} {{", "  rankdir=LR;"]
    for state in states:
        extra = ", peripheries=2" if state == g.initial else ""
        lines.append(f"  {ids[state]} [label={_gvquote(state.render())}{extra}];")
    edges = sorted(
        (ids[src], ids[dst], data["label"].render())
        for src, dst, data in g.graph.edges(data=True)
    )
    for src, dst, label in edges:
        lines.append(f"  {src} -> {dst} [label={_gvquote(label)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
