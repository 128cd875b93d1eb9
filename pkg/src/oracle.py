"""
Discrete-time reference semantics.

Explicit transition systems over integer clock valuations (values above the
ceiling collapse to ceiling + 1), weak closure, suspension traces and brute-force
versions of the conformance relations. Everything here enumerates concrete
states, so it is only meant for small models and for cross-checking the
symbolic checker.
"""
import logging
from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple, Union

import networkx as nx

from src.errors import AlphabetMismatch, ExplorationLimitExceeded, InvalidCeiling, StrictConstraintRejected
from src.model import TAU, TIOA, ActionKind, ActionLabel, ClockConstraint, delay_horizon, is_closed, max_constant
from src.settings import DEFAULT_ORACLE_LENGTH, ITERATION_CAP
from src.traces import Quiescence

logger = logging.getLogger(__name__)


# -------------------------------------- Data types --------------------------------------

@dataclass(frozen=True, order=True)
class ConcreteState:
    location: str
    values: Tuple[int, ...]

    def render(self, clocks: Sequence[str]) -> str:
        vals = ", ".join(f"{c}={v}" for c, v in zip(clocks, self.values))
        return f"<{self.location}, {vals}>" if vals else f"<{self.location}>"


@dataclass(frozen=True)
class OracleConfig:
    trace_length: int = DEFAULT_ORACLE_LENGTH
    max_delay: Optional[int] = None
    closed_only: bool = True
    ceiling: Optional[int] = None

    def __post_init__(self):
        if self.trace_length < 0:
            raise ValueError("trace_length must be non-negative")
        if self.max_delay is not None and self.max_delay < 1:
            raise ValueError("max_delay must be positive")


class Delay(Enum):
    """Bare delay observation of the delay-observing relation."""
    DELAY = "delay"

    def render(self) -> str:
        return self.value


ObsLabel = Union[ActionLabel, Quiescence, Delay]
Observation = Tuple[int, ObsLabel]


def _obs_key(obs: Observation):
    delay, label = obs
    if label is Quiescence.SAFE:
        return (0, "", delay)
    if isinstance(label, Quiescence):
        return (1, label.value, delay)
    if isinstance(label, Delay):
        return (2, "", delay)
    return (3, label.name, delay)


def render_observation(obs: Observation) -> str:
    return f"({obs[0]}, {obs[1].render()})"


@dataclass(frozen=True)
class TimedTrace:
    steps: Tuple[Tuple[int, Union[ActionLabel, Quiescence]], ...] = ()

    def __len__(self) -> int:
        return len(self.steps)

    def extend(self, delay: int, label: Union[ActionLabel, Quiescence]) -> "TimedTrace":
        return TimedTrace(self.steps + ((delay, label),))

    def render(self) -> str:
        if not self.steps:
            return "<empty>"
        return ", ".join(f"{d} {label.render()}" for d, label in self.steps)

    def __str__(self) -> str:
        return self.render()


# ---------------------------------- Transition systems ----------------------------------

class ExplicitTS:
    """
    Common part of the explicit transition systems: weak closure, delay frontiers
    and quiescence predicates on top of `delay` (one time unit) and `moves`.
    """

    name: str
    inputs: FrozenSet[str]
    outputs: FrozenSet[str]
    initial: object
    max_delay: int

    def __init__(self):
        self._tau: Dict[object, FrozenSet] = {}
        self._safe: Dict[object, bool] = {}
        self._enforced: Dict[object, bool] = {}

    def delay(self, s) -> Optional[object]:
        raise NotImplementedError

    def moves(self, s) -> Tuple[Tuple[ActionLabel, object], ...]:
        raise NotImplementedError

    def render_state(self, s) -> str:
        return str(s)

    @property
    def visible_labels(self) -> List[ActionLabel]:
        labels = [ActionLabel(i, ActionKind.INPUT) for i in self.inputs]
        labels += [ActionLabel(o, ActionKind.OUTPUT) for o in self.outputs]
        return sorted(labels, key=lambda lab: (lab.name, lab.kind.value))

    def tau_closure(self, states: Iterable) -> FrozenSet:
        """States reachable through tau moves only (no time passes)."""
        result: Set = set()
        for s in states:
            cached = self._tau.get(s)
            if cached is None:
                seen = {s}
                queue = deque([s])
                while queue:
                    cur = queue.popleft()
                    for label, nxt in self.moves(cur):
                        if label.is_tau and nxt not in seen:
                            seen.add(nxt)
                            queue.append(nxt)
                cached = frozenset(seen)
                self._tau[s] = cached
            result |= cached
        return frozenset(result)

    def frontiers(self, states: Iterable, horizon: int) -> List[FrozenSet]:
        """frontiers[d] = states weakly reachable with total delay exactly d."""
        current = self.tau_closure(states)
        result = [current]
        for _ in range(horizon):
            nxt = (self.delay(s) for s in current)
            current = self.tau_closure(s for s in nxt if s is not None)
            result.append(current)
        return result

    def strong_chain(self, s, horizon: int) -> List:
        chain = [s]
        while len(chain) <= horizon:
            nxt = self.delay(chain[-1])
            if nxt is None:
                break
            chain.append(nxt)
        return chain

    def after(self, states: Iterable, delay: int, label: ActionLabel,
              frontiers: Optional[List[FrozenSet]] = None) -> FrozenSet:
        if frontiers is None:
            frontiers = self.frontiers(states, delay)
        reached = [nxt for s in frontiers[delay] for lab, nxt in self.moves(s) if lab == label]
        return self.tau_closure(reached)

    # quiescence ----------------------------------------------------------------------------

    def _classify(self, s):
        graph = nx.DiGraph()
        graph.add_node(s)
        queue = deque([s])
        outputs_enabled = set()
        while queue:
            cur = queue.popleft()
            if len(graph) > ITERATION_CAP:
                raise ExplorationLimitExceeded(f"quiescence exploration from {s} exceeds {ITERATION_CAP} states")
            succ = []
            nxt = self.delay(cur)
            if nxt is not None:
                succ.append((nxt, True))
            for label, target in self.moves(cur):
                if label.is_tau:
                    succ.append((target, False))
                elif label.kind is ActionKind.OUTPUT:
                    outputs_enabled.add(cur)
            for target, timed in succ:
                if target not in graph:
                    graph.add_node(target)
                    queue.append(target)
                if graph.has_edge(cur, target):
                    graph[cur][target]["timed"] |= timed
                else:
                    graph.add_edge(cur, target, timed=timed)

        # a state can wait forever iff it reaches a cycle containing a delay edge
        divergent = set()
        for component in nx.strongly_connected_components(graph):
            sub = graph.subgraph(component)
            if any(data["timed"] for _, _, data in sub.edges(data=True)):
                divergent |= component
        can_wait = _backward(graph, divergent)
        can_output = _backward(graph, outputs_enabled)
        for node in graph.nodes:
            self._safe[node] = node in can_wait
            self._enforced[node] = node not in can_output

    def is_safe(self, s) -> bool:
        if s not in self._safe:
            self._classify(s)
        return self._safe[s]

    def is_enforced(self, s) -> bool:
        if s not in self._enforced:
            self._classify(s)
        return self._enforced[s]

    def reachable_states(self) -> FrozenSet:
        seen = {self.initial}
        queue = deque([self.initial])
        while queue:
            if len(seen) > ITERATION_CAP:
                raise ExplorationLimitExceeded(f"{self.name}: more than {ITERATION_CAP} concrete states")
            s = queue.popleft()
            succ = [target for _, target in self.moves(s)]
            nxt = self.delay(s)
            if nxt is not None:
                succ.append(nxt)
            for target in succ:
                if target not in seen:
                    seen.add(target)
                    queue.append(target)
        return frozenset(seen)


def _backward(graph: nx.DiGraph, sources: Iterable) -> Set:
    """`sources` together with every node that reaches one of them."""
    seen = set(sources)
    stack = list(seen)
    while stack:
        for pred in graph.predecessors(stack.pop()):
            if pred not in seen:
                seen.add(pred)
                stack.append(pred)
    return seen


def _holds(c: ClockConstraint, clocks: Tuple[str, ...], values: Tuple[int, ...]) -> bool:
    return c.holds(dict(zip(clocks, values)))


class TIOLTS(ExplicitTS):
    """Integer-time semantics of one automaton; clock values above `ceiling` read as ceiling + 1."""

    def __init__(self, automaton: TIOA, ceiling: int, max_delay: int):
        super().__init__()
        self.automaton = automaton
        self.name = automaton.name
        self.inputs = automaton.inputs
        self.outputs = automaton.outputs
        self.ceiling = ceiling
        self.cap = ceiling + 1
        self.max_delay = max_delay
        self.clocks = automaton.clock_names
        self.initial = ConcreteState(automaton.initial, (0,) * len(self.clocks))
        self._delay: Dict[ConcreteState, Optional[ConcreteState]] = {}
        self._moves: Dict[ConcreteState, Tuple[Tuple[ActionLabel, ConcreteState], ...]] = {}

    def render_state(self, s: ConcreteState) -> str:
        return s.render(self.clocks)

    def delay(self, s: ConcreteState) -> Optional[ConcreteState]:
        if s in self._delay:
            return self._delay[s]
        values = tuple(min(v + 1, self.cap) for v in s.values)
        nxt = None
        if _holds(self.automaton.invariant(s.location), self.clocks, values):
            nxt = ConcreteState(s.location, values)
        self._delay[s] = nxt
        return nxt

    def moves(self, s: ConcreteState) -> Tuple[Tuple[ActionLabel, ConcreteState], ...]:
        cached = self._moves.get(s)
        if cached is not None:
            return cached
        a = self.automaton
        result = []
        for sw in a.switches_from(s.location):
            if not _holds(sw.guard, self.clocks, s.values):
                continue
            values = tuple(0 if c in sw.resets else v for c, v in zip(self.clocks, s.values))
            if _holds(a.invariant(sw.target), self.clocks, values):
                result.append((sw.action, ConcreteState(sw.target, values)))
        cached = tuple(result)
        self._moves[s] = cached
        return cached


class ProductTS(ExplicitTS):
    """
    State-level parallel product of two transition systems: independent moves on
    non-shared actions and tau, synchronization of shared actions into tau, and
    joint delays.
    """

    def __init__(self, left: ExplicitTS, right: ExplicitTS):
        super().__init__()
        self.left = left
        self.right = right
        self.name = f"{left.name}||{right.name}"
        self.shared = (left.inputs | left.outputs) & (right.inputs | right.outputs)
        self.inputs = (left.inputs | right.inputs) - (left.outputs | right.outputs)
        self.outputs = (left.outputs | right.outputs) - (left.inputs | right.inputs)
        self.initial = (left.initial, right.initial)
        self.max_delay = left.max_delay + right.max_delay

    def render_state(self, s) -> str:
        return f"({self.left.render_state(s[0])}, {self.right.render_state(s[1])})"

    def delay(self, s):
        l_next = self.left.delay(s[0])
        r_next = self.right.delay(s[1])
        if l_next is None or r_next is None:
            return None
        return (l_next, r_next)

    def moves(self, s):
        left, right = s
        result = []
        for label, nxt in self.left.moves(left):
            if label.is_tau or label.name not in self.shared:
                result.append((label, (nxt, right)))
        for label, nxt in self.right.moves(right):
            if label.is_tau or label.name not in self.shared:
                result.append((label, (left, nxt)))
        for l_label, l_next in self.left.moves(left):
            if l_label.is_tau or l_label.name not in self.shared:
                continue
            for r_label, r_next in self.right.moves(right):
                if r_label.name == l_label.name and not r_label.is_tau and r_label.kind != l_label.kind:
                    result.append((TAU, (l_next, r_next)))
        return tuple(result)


def build_tiolts(a: TIOA, cfg: Optional[OracleConfig] = None) -> TIOLTS:
    cfg = cfg or OracleConfig()
    if cfg.closed_only and not is_closed(a):
        raise StrictConstraintRejected(
            f"{a.name} has strict constraints; integer delays only decide closed models"
        )
    largest = max_constant(a)
    ceiling = largest if cfg.ceiling is None else cfg.ceiling
    if ceiling < largest:
        raise InvalidCeiling(f"ceiling {ceiling} is below the largest constant {largest} of {a.name}")
    horizon = cfg.max_delay if cfg.max_delay is not None else delay_horizon(a, ceiling)
    logger.debug(f"Oracle for {a.name}: ceiling {ceiling}, delays up to {horizon}")
    return TIOLTS(a, ceiling, horizon)


# ------------------------------------ Proposition checks --------------------------------

@dataclass(frozen=True)
class Prop1Report:
    semantics: str
    time_add: bool
    time_reflex: bool
    time_determ: bool
    states_checked: int

    @property
    def ok(self) -> bool:
        return self.time_add and self.time_reflex and self.time_determ

    def as_dict(self) -> dict:
        return {
            "semantics": self.semantics,
            "time_add": self.time_add,
            "time_reflex": self.time_reflex,
            "time_determ": self.time_determ,
            "states_checked": self.states_checked,
        }


def check_prop1(ts: ExplicitTS, semantics: str = "strong", max_delay: Optional[int] = None) -> Prop1Report:
    """
    Check additivity, zero-delay identity and determinism of delays over all
    reachable states, for every delay up to `max_delay` (default: ceiling + 1).
    """
    if semantics not in ("strong", "weak"):
        raise ValueError(f"unknown semantics {semantics!r}")
    bound = max_delay if max_delay is not None else getattr(ts, "cap", ts.max_delay)
    states = sorted(ts.reachable_states(), key=repr)

    def delays(s) -> List[FrozenSet]:
        if semantics == "strong":
            chain = ts.strong_chain(s, bound)
            return [frozenset([chain[d]]) if d < len(chain) else frozenset() for d in range(bound + 1)]
        return ts.frontiers([s], bound)

    table = {s: delays(s) for s in states}

    def lookup(s) -> List[FrozenSet]:
        if s not in table:
            table[s] = delays(s)
        return table[s]

    time_add = time_reflex = time_determ = True
    for s in states:
        row = table[s]
        if row[0] != frozenset([s]):
            time_reflex = False
        if any(len(row[d]) > 1 for d in range(1, bound + 1)):
            time_determ = False
        if not time_add:
            continue
        for d1 in range(bound + 1):
            for d2 in range(bound + 1 - d1):
                composed = frozenset(t for mid in row[d1] for t in lookup(mid)[d2])
                if composed != row[d1 + d2]:
                    time_add = False
                    break
            if not time_add:
                break
    report = Prop1Report(semantics, time_add, time_reflex, time_determ, len(states))
    logger.debug(f"Time properties of {ts.name} ({semantics}): {report.as_dict()}")
    return report


# ------------------------------------- Conformance --------------------------------------

class OracleRelation(str, Enum):
    LTIOCO = "ltioco"
    TIOCO_DELTA = "tioco-delta"
    TIOCO_DELAYS = "tioco-Delta"

    @property
    def flavors(self) -> Tuple[Quiescence, ...]:
        if self is OracleRelation.LTIOCO:
            return (Quiescence.SAFE, Quiescence.ENFORCED)
        if self is OracleRelation.TIOCO_DELTA:
            return (Quiescence.CLASSIC,)
        return ()


@dataclass(frozen=True)
class OracleWitness:
    trace: TimedTrace
    offending: Observation
    impl_out: FrozenSet[Observation]
    spec_out: FrozenSet[Observation]

    def as_dict(self) -> dict:
        return {
            "trace": [{"delay": d, "label": label.render()} for d, label in self.trace.steps],
            "offending": render_observation(self.offending),
            "impl_out": [render_observation(o) for o in sorted(self.impl_out, key=_obs_key)],
            "spec_out": [render_observation(o) for o in sorted(self.spec_out, key=_obs_key)],
        }


@dataclass(frozen=True)
class OracleVerdict:
    passed: bool
    relation: OracleRelation
    witness: Optional[OracleWitness] = None
    pairs_explored: int = 0

    def as_dict(self) -> dict:
        return {
            "pass": self.passed,
            "relation": self.relation.value,
            "witness": self.witness.as_dict() if self.witness else None,
            "stats": {"pairs_explored": self.pairs_explored},
        }


def _quiescent(ts: ExplicitTS, states: Iterable, flavor: Quiescence) -> FrozenSet:
    if flavor is Quiescence.SAFE:
        return frozenset(s for s in states if ts.is_safe(s))
    return frozenset(s for s in states if ts.is_enforced(s))


def out_set(ts: ExplicitTS, states: Iterable, relation: OracleRelation = OracleRelation.LTIOCO,
            horizon: Optional[int] = None, frontiers: Optional[List[FrozenSet]] = None) -> FrozenSet[Observation]:
    """
    Observations after `states`: (d, o) for outputs weakly enabled after delay d,
    quiescence entries (delay 0) for the quiescence relations, and bare strong
    delays plus immediate outputs for the delay-observing relation.
    """
    states = frozenset(states)
    horizon = ts.max_delay if horizon is None else horizon
    if frontiers is None:
        frontiers = ts.frontiers(states, horizon)
    result: Set[Observation] = set()
    if relation is OracleRelation.TIOCO_DELAYS:
        for s in frontiers[0]:
            result.update((0, label) for label, _ in ts.moves(s) if label.kind is ActionKind.OUTPUT)
        longest = max((len(ts.strong_chain(s, horizon)) - 1 for s in states), default=0)
        result.update((d, Delay.DELAY) for d in range(1, longest + 1))
        return frozenset(result)
    for d, frontier in enumerate(frontiers):
        for s in frontier:
            result.update((d, label) for label, _ in ts.moves(s) if label.kind is ActionKind.OUTPUT)
    if relation is OracleRelation.LTIOCO:
        if any(ts.is_safe(s) for s in states):
            result.add((0, Quiescence.SAFE))
        if any(ts.is_enforced(s) for s in states):
            result.add((0, Quiescence.ENFORCED))
    elif any(ts.is_enforced(s) for s in states):
        result.add((0, Quiescence.CLASSIC))
    return frozenset(result)


def _check_alphabets(impl: ExplicitTS, spec: ExplicitTS):
    if impl.inputs != spec.inputs or impl.outputs != spec.outputs:
        raise AlphabetMismatch(f"alphabets of {impl.name} and {spec.name} differ")


def check_conformance(impl: ExplicitTS, spec: ExplicitTS, n: int,
                      relation: OracleRelation = OracleRelation.LTIOCO,
                      horizon: Optional[int] = None) -> OracleVerdict:
    """
    Brute-force conformance over spec traces of length at most `n` with integer
    delays up to `horizon` (default: the larger delay bound of the two systems).
    Quiescence steps take no time.
    """
    _check_alphabets(impl, spec)
    horizon = max(impl.max_delay, spec.max_delay) if horizon is None else horizon
    labels = spec.visible_labels
    flavors = relation.flavors
    root = (impl.tau_closure([impl.initial]), spec.tau_closure([spec.initial]))
    visited = {root}
    queue = deque([(root[0], root[1], TimedTrace(), None)])
    while queue:
        impl_set, spec_set, trace, last = queue.popleft()
        impl_front = impl.frontiers(impl_set, horizon)
        spec_front = spec.frontiers(spec_set, horizon)
        impl_out = out_set(impl, impl_set, relation, horizon, impl_front)
        spec_out = out_set(spec, spec_set, relation, horizon, spec_front)
        bad = sorted(impl_out - spec_out, key=_obs_key)
        if bad:
            logger.info(f"oracle {relation.value} FAIL after {trace.render()}: {render_observation(bad[0])}")
            witness = OracleWitness(trace, bad[0], impl_out, spec_out)
            return OracleVerdict(False, relation, witness, len(visited))
        if len(trace) >= n or not impl_set:
            continue
        children = []
        for label in labels:
            for d in range(horizon + 1):
                spec_next = spec.after(spec_set, d, label, spec_front)
                if spec_next:
                    children.append((d, label, impl.after(impl_set, d, label, impl_front), spec_next))
        for flavor in flavors:
            if flavor == last:
                continue
            spec_next = _quiescent(spec, spec_set, flavor)
            if spec_next:
                children.append((0, flavor, _quiescent(impl, impl_set, flavor), spec_next))
        for d, label, impl_next, spec_next in children:
            key = (impl_next, spec_next)
            if key in visited:
                continue
            visited.add(key)
            queue.append((impl_next, spec_next, trace.extend(d, label), label))
        if len(visited) > ITERATION_CAP:
            raise ExplorationLimitExceeded(f"oracle exploration exceeds {ITERATION_CAP} state-set pairs")

    logger.info(f"oracle {relation.value} PASS: {impl.name} vs {spec.name} ({len(visited)} pairs, length {n})")
    return OracleVerdict(True, relation, None, len(visited))


def check_ltioco_s(impl: ExplicitTS, spec: ExplicitTS, n: int, horizon: Optional[int] = None) -> OracleVerdict:
    return check_conformance(impl, spec, n, OracleRelation.LTIOCO, horizon)


def check_tioco_delta(impl: ExplicitTS, spec: ExplicitTS, n: int, horizon: Optional[int] = None) -> OracleVerdict:
    return check_conformance(impl, spec, n, OracleRelation.TIOCO_DELTA, horizon)


def check_tioco_delays(impl: ExplicitTS, spec: ExplicitTS, n: int, horizon: Optional[int] = None) -> OracleVerdict:
    """Conformance observing bare delays; no quiescence."""
    return check_conformance(impl, spec, n, OracleRelation.TIOCO_DELAYS, horizon)


def explain(v: OracleVerdict) -> str:
    lines = ["=" * 60, f"oracle {v.relation.value}: {'PASS' if v.passed else 'FAIL'}", "=" * 60]
    if v.witness is not None:
        w = v.witness

        def render_set(obs):
            return "{" + ", ".join(render_observation(o) for o in sorted(obs, key=_obs_key)) + "}"

        lines.append(f"Trace:      {w.trace.render()}")
        lines.append(f"Impl out:   {render_set(w.impl_out)}")
        lines.append(f"Spec out:   {render_set(w.spec_out)}")
        lines.append(f"Violation:  {render_observation(w.offending)} is not allowed by the specification")
    lines.append(f"State-set pairs explored: {v.pairs_explored}")
    return "\n".join(lines)


# ---------------------------------------- Traces ----------------------------------------

def tstraces_l(ts: ExplicitTS, n: int, horizon: Optional[int] = None,
               flavors: Sequence[Quiescence] = (Quiescence.SAFE, Quiescence.ENFORCED)) -> FrozenSet[TimedTrace]:
    """All suspension traces of length at most `n`; quiescence steps have delay 0."""
    horizon = ts.max_delay if horizon is None else horizon
    labels = ts.visible_labels
    found: Set[TimedTrace] = set()

    def walk(states: FrozenSet, trace: TimedTrace, last):
        found.add(trace)
        if len(trace) >= n:
            return
        front = ts.frontiers(states, horizon)
        for label in labels:
            for d in range(horizon + 1):
                nxt = ts.after(states, d, label, front)
                if nxt:
                    walk(nxt, trace.extend(d, label), label)
        for flavor in flavors:
            if flavor != last:
                quiet = _quiescent(ts, states, flavor)
                if quiet:
                    walk(quiet, trace.extend(0, flavor), flavor)

    walk(ts.tau_closure([ts.initial]), TimedTrace(), None)
    return frozenset(found)


def weak_traces(ts: ExplicitTS, n: int, horizon: Optional[int] = None) -> FrozenSet[TimedTrace]:
    """Visible timed traces without quiescence observations."""
    return tstraces_l(ts, n, horizon, flavors=())


@dataclass(frozen=True)
class InclusionResult:
    included: bool
    witness: Optional[TimedTrace] = None


def check_trace_inclusion(impl: ExplicitTS, spec: ExplicitTS, n: int,
                          horizon: Optional[int] = None) -> InclusionResult:
    """Is every weak timed trace of `impl` up to length `n` also one of `spec`?"""
    horizon = max(impl.max_delay, spec.max_delay) if horizon is None else horizon
    labels = sorted(set(impl.visible_labels) | set(spec.visible_labels), key=lambda lab: (lab.name, lab.kind.value))
    root = (impl.tau_closure([impl.initial]), spec.tau_closure([spec.initial]))
    visited = {root}
    queue = deque([(root[0], root[1], TimedTrace())])
    while queue:
        impl_set, spec_set, trace = queue.popleft()
        if len(trace) >= n:
            continue
        impl_front = impl.frontiers(impl_set, horizon)
        spec_front = spec.frontiers(spec_set, horizon)
        for label in labels:
            for d in range(horizon + 1):
                impl_next = impl.after(impl_set, d, label, impl_front)
                if not impl_next:
                    continue
                spec_next = spec.after(spec_set, d, label, spec_front)
                if not spec_next:
                    return InclusionResult(False, trace.extend(d, label))
                key = (impl_next, spec_next)
                if key not in visited:
                    visited.add(key)
                    queue.append((impl_next, spec_next, trace.extend(d, label)))
    return InclusionResult(True)


def traces_equivalent(ts1: ExplicitTS, ts2: ExplicitTS, n: int, horizon: Optional[int] = None) -> bool:
    return (check_trace_inclusion(ts1, ts2, n, horizon).included
            and check_trace_inclusion(ts2, ts1, n, horizon).included)


# ------------------------------------- Premises -----------------------------------------

@dataclass(frozen=True)
class PremiseReport:
    ok: bool
    violations: Tuple[str, ...] = ()


def check_input_enabled(ts: ExplicitTS) -> PremiseReport:
    """Every reachable state accepts every input, possibly after tau moves."""
    violations = []
    inputs = [lab for lab in ts.visible_labels if lab.kind is ActionKind.INPUT]
    for s in sorted(ts.reachable_states(), key=repr):
        closure = ts.tau_closure([s])
        accepted = {label for t in closure for label, _ in ts.moves(t)}
        missing = [lab.render() for lab in inputs if lab not in accepted]
        if missing:
            violations.append(f"{ts.render_state(s)} refuses {', '.join(missing)}")
    return PremiseReport(not violations, tuple(violations))


def check_independent_progress(ts: ExplicitTS) -> PremiseReport:
    """Every reachable state can wait forever or eventually produce an output."""
    violations = [
        f"{ts.render_state(s)} can neither wait forever nor produce an output"
        for s in sorted(ts.reachable_states(), key=repr)
        if not ts.is_safe(s) and ts.is_enforced(s)
    ]
    return PremiseReport(not violations, tuple(violations))
