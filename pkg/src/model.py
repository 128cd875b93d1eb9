"""
Timed I/O automata: the data model, static validation and parallel composition.

All model values are immutable; every operation returns a new automaton.
"""
import logging
from collections import deque
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import cached_property
from typing import Dict, FrozenSet, List, Mapping, Optional, Tuple

import networkx as nx

from src.errors import NotComposable

logger = logging.getLogger(__name__)

TAU_NAME = "tau"


# ---------------------------------- Clocks and labels -----------------------------------

@dataclass(frozen=True, order=True)
class ClockId:
    index: int
    name: str

    def __post_init__(self):
        if self.index < 1:
            raise ValueError(f"clock {self.name!r}: index 0 is reserved for the zero clock")


class ActionKind(str, Enum):
    INPUT = "input"
    OUTPUT = "output"
    TAU = "tau"


@dataclass(frozen=True, order=True)
class ActionLabel:
    name: str
    kind: ActionKind

    @property
    def is_tau(self) -> bool:
        return self.kind is ActionKind.TAU

    def render(self) -> str:
        if self.kind is ActionKind.INPUT:
            return f"?{self.name}"
        if self.kind is ActionKind.OUTPUT:
            return f"!{self.name}"
        return TAU_NAME

    def __str__(self) -> str:
        return self.render()


TAU = ActionLabel(TAU_NAME, ActionKind.TAU)


def input_label(name: str) -> ActionLabel:
    return ActionLabel(name, ActionKind.INPUT)


def output_label(name: str) -> ActionLabel:
    return ActionLabel(name, ActionKind.OUTPUT)


# ------------------------------------- Constraints --------------------------------------

class Relation(str, Enum):
    LT = "<"
    LE = "<="
    EQ = "=="
    GE = ">="
    GT = ">"

    @property
    def is_strict(self) -> bool:
        return self in (Relation.LT, Relation.GT)

    @property
    def is_upper(self) -> bool:
        return self in (Relation.LT, Relation.LE)

    def holds(self, left, right) -> bool:
        if self is Relation.LT:
            return left < right
        if self is Relation.LE:
            return left <= right
        if self is Relation.EQ:
            return left == right
        if self is Relation.GE:
            return left >= right
        return left > right


@dataclass(frozen=True)
class AtomicConstraint:
    """`clock ~ bound`, or the diagonal `clock - other ~ bound` when `other` is set."""
    clock: str
    relation: Relation
    bound: int
    other: Optional[str] = None

    @property
    def is_diagonal(self) -> bool:
        return self.other is not None

    def clocks(self) -> Tuple[str, ...]:
        return (self.clock,) if self.other is None else (self.clock, self.other)

    def holds(self, valuation: Mapping[str, float]) -> bool:
        left = valuation[self.clock]
        if self.other is not None:
            left = left - valuation[self.other]
        return self.relation.holds(left, self.bound)

    def render(self) -> str:
        left = self.clock if self.other is None else f"{self.clock} - {self.other}"
        return f"{left} {self.relation.value} {self.bound}"


@dataclass(frozen=True)
class ClockConstraint:
    conjuncts: Tuple[AtomicConstraint, ...] = ()

    @property
    def is_true(self) -> bool:
        return not self.conjuncts

    def holds(self, valuation: Mapping[str, float]) -> bool:
        return all(atom.holds(valuation) for atom in self.conjuncts)

    def clocks(self) -> FrozenSet[str]:
        return frozenset(c for atom in self.conjuncts for c in atom.clocks())

    def __and__(self, other: "ClockConstraint") -> "ClockConstraint":
        return ClockConstraint(self.conjuncts + other.conjuncts)

    def render(self) -> str:
        if self.is_true:
            return "true"
        return " & ".join(atom.render() for atom in self.conjuncts)

    def __str__(self) -> str:
        return self.render()


TRUE = ClockConstraint()


def atom(clock: str, relation: str, bound: int) -> AtomicConstraint:
    return AtomicConstraint(clock, Relation(relation), bound)


def conj(*atoms: AtomicConstraint) -> ClockConstraint:
    return ClockConstraint(tuple(atoms))


# --------------------------------------- Automata ---------------------------------------

@dataclass(frozen=True)
class Switch:
    source: str
    guard: ClockConstraint
    action: ActionLabel
    resets: FrozenSet[str]
    target: str

    def render(self) -> str:
        resets = ",".join(sorted(self.resets)) or "-"
        return f"{self.source} -[{self.guard} / {self.action} / {resets}]-> {self.target}"


@dataclass(frozen=True)
class TIOA:
    name: str
    locations: Tuple[str, ...]
    initial: str
    clocks: Tuple[ClockId, ...] = ()
    inputs: FrozenSet[str] = frozenset()
    outputs: FrozenSet[str] = frozenset()
    switches: Tuple[Switch, ...] = ()
    invariants: Dict[str, ClockConstraint] = field(default_factory=dict)

    @cached_property
    def clock_names(self) -> Tuple[str, ...]:
        return tuple(c.name for c in sorted(self.clocks))

    @cached_property
    def _outgoing(self) -> Dict[str, Tuple[Switch, ...]]:
        table: Dict[str, List[Switch]] = {loc: [] for loc in self.locations}
        for sw in self.switches:
            table.setdefault(sw.source, []).append(sw)
        return {loc: tuple(sws) for loc, sws in table.items()}

    def switches_from(self, location: str) -> Tuple[Switch, ...]:
        return self._outgoing.get(location, ())

    def invariant(self, location: str) -> ClockConstraint:
        return self.invariants.get(location, TRUE)

    @property
    def alphabet(self) -> FrozenSet[str]:
        return self.inputs | self.outputs

    def label(self, name: str) -> ActionLabel:
        if name == TAU_NAME:
            return TAU
        if name in self.inputs:
            return input_label(name)
        if name in self.outputs:
            return output_label(name)
        raise KeyError(name)

    @cached_property
    def output_labels(self) -> Tuple[ActionLabel, ...]:
        return tuple(output_label(o) for o in sorted(self.outputs))

    @cached_property
    def input_labels(self) -> Tuple[ActionLabel, ...]:
        return tuple(input_label(i) for i in sorted(self.inputs))

    def constraints(self):
        for loc in self.locations:
            yield from self.invariant(loc).conjuncts
        for sw in self.switches:
            yield from sw.guard.conjuncts


def make_clocks(*names: str) -> Tuple[ClockId, ...]:
    return tuple(ClockId(i, name) for i, name in enumerate(names, start=1))


# -------------------------------------- Validation --------------------------------------

@dataclass(frozen=True)
class Problem:
    severity: str  # "error" | "warning"
    message: str
    element: str

    def render(self) -> str:
        return f"[{self.severity}] {self.element}: {self.message}"


@dataclass(frozen=True)
class ValidationReport:
    diagonal_free: bool
    invariants_downward_closed: bool
    max_constant: int
    tau_cycle_free: bool
    problems: Tuple[Problem, ...] = ()

    @property
    def ok(self) -> bool:
        return not any(p.severity == "error" for p in self.problems)

    def as_dict(self) -> dict:
        return {
            "diagonal_free": self.diagonal_free,
            "invariants_downward_closed": self.invariants_downward_closed,
            "max_constant": self.max_constant,
            "tau_cycle_free": self.tau_cycle_free,
            "ok": self.ok,
            "problems": [
                {"severity": p.severity, "message": p.message, "element": p.element}
                for p in self.problems
            ],
        }


def max_constant(a: TIOA) -> int:
    return max((c.bound for c in a.constraints()), default=0)


def is_closed(a: TIOA) -> bool:
    return not any(c.relation.is_strict for c in a.constraints())


def tau_graph(a: TIOA) -> nx.DiGraph:
    graph = nx.DiGraph()
    graph.add_nodes_from(a.locations)
    graph.add_edges_from((sw.source, sw.target) for sw in a.switches if sw.action.is_tau)
    return graph


def delay_horizon(a: TIOA, ceiling: int) -> int:
    """
    Largest delay worth observing between two visible steps: one unit past the
    ceiling for every delay segment a chain of tau switches can split it into.
    """
    graph = tau_graph(a)
    if nx.is_directed_acyclic_graph(graph):
        segments = nx.dag_longest_path_length(graph) + 1
    else:
        segments = len(a.locations)
    return segments * (ceiling + 1)


def validate(a: TIOA, escalate_tau_cycles: bool = False) -> ValidationReport:
    """
    Check the structural assumptions on an automaton.

    Args:
        a: the automaton.
        escalate_tau_cycles: report syntactic tau cycles as errors instead of warnings.

    Returns:
        A ValidationReport; problems are listed rather than raised.
    """
    problems: List[Problem] = []

    def error(message: str, element: str):
        problems.append(Problem("error", message, element))

    locations = set(a.locations)
    if len(locations) != len(a.locations):
        error("duplicate location names", a.name)
    if a.initial not in locations:
        error(f"initial location {a.initial!r} is not declared", a.name)

    clock_names = [c.name for c in a.clocks]
    if len(set(clock_names)) != len(clock_names):
        error("duplicate clock names", a.name)
    if sorted(c.index for c in a.clocks) != list(range(1, len(a.clocks) + 1)):
        error("clock indices must be 1..n", a.name)
    declared_clocks = set(clock_names)

    overlap = a.inputs & a.outputs
    if overlap:
        error(f"actions declared both input and output: {sorted(overlap)}", a.name)
    if TAU_NAME in a.alphabet:
        error(f"{TAU_NAME!r} is reserved for internal switches", a.name)

    diagonal_free = True
    downward_closed = True

    def check_constraint(c: ClockConstraint, element: str):
        nonlocal diagonal_free
        for at in c.conjuncts:
            if at.is_diagonal:
                diagonal_free = False
                error(f"diagonal constraint {at.render()} is not supported", element)
            if at.bound < 0:
                error(f"negative bound in {at.render()}", element)
            for clock in at.clocks():
                if clock not in declared_clocks:
                    error(f"undeclared clock {clock!r}", element)

    for loc, inv in a.invariants.items():
        element = f"location {loc}"
        if loc not in locations:
            error("invariant of undeclared location", element)
        check_constraint(inv, element)
        for at in inv.conjuncts:
            if not at.relation.is_upper:
                downward_closed = False
                error(f"invariant atom {at.render()} is not downward-closed", element)

    for sw in a.switches:
        element = f"switch {sw.render()}"
        for end in (sw.source, sw.target):
            if end not in locations:
                error(f"undeclared location {end!r}", element)
        check_constraint(sw.guard, element)
        for clock in sw.resets:
            if clock not in declared_clocks:
                error(f"reset of undeclared clock {clock!r}", element)
        act = sw.action
        if act.kind is ActionKind.INPUT and act.name not in a.inputs:
            error(f"undeclared input {act.name!r}", element)
        elif act.kind is ActionKind.OUTPUT and act.name not in a.outputs:
            error(f"undeclared output {act.name!r}", element)
        elif act.kind is ActionKind.TAU and act.name != TAU_NAME:
            error(f"internal switch must be labeled {TAU_NAME!r}", element)

    tau_cycle_free = nx.is_directed_acyclic_graph(tau_graph(a))
    if not tau_cycle_free:
        severity = "error" if escalate_tau_cycles else "warning"
        problems.append(Problem(severity, "tau switches form a cycle (strong convergence not guaranteed)", a.name))

    return ValidationReport(
        diagonal_free=diagonal_free,
        invariants_downward_closed=downward_closed,
        max_constant=max_constant(a),
        tau_cycle_free=tau_cycle_free,
        problems=tuple(problems),
    )


# ------------------------------------ Transformations -----------------------------------

def _rename_constraint(c: ClockConstraint, mapping: Mapping[str, str]) -> ClockConstraint:
    return ClockConstraint(tuple(
        replace(at, clock=mapping.get(at.clock, at.clock),
                other=None if at.other is None else mapping.get(at.other, at.other))
        for at in c.conjuncts
    ))


def rename_clocks(a: TIOA, mapping: Mapping[str, str]) -> TIOA:
    if not mapping:
        return a
    return replace(
        a,
        clocks=tuple(ClockId(c.index, mapping.get(c.name, c.name)) for c in a.clocks),
        switches=tuple(
            replace(sw, guard=_rename_constraint(sw.guard, mapping),
                    resets=frozenset(mapping.get(r, r) for r in sw.resets))
            for sw in a.switches
        ),
        invariants={loc: _rename_constraint(inv, mapping) for loc, inv in a.invariants.items()},
    )


def _scale_constraint(c: ClockConstraint, factor: int) -> ClockConstraint:
    return ClockConstraint(tuple(replace(at, bound=at.bound * factor) for at in c.conjuncts))


def scale(a: TIOA, factor: int) -> TIOA:
    """Multiply every constant by `factor` (rational models are scaled to integers this way)."""
    if factor < 1:
        raise ValueError("scale factor must be a positive integer")
    return replace(
        a,
        switches=tuple(replace(sw, guard=_scale_constraint(sw.guard, factor)) for sw in a.switches),
        invariants={loc: _scale_constraint(inv, factor) for loc, inv in a.invariants.items()},
    )


# -------------------------------------- Composition -------------------------------------

def _clock_renaming(a1: TIOA, a2: TIOA) -> Dict[str, str]:
    taken = set(a1.clock_names) | set(a2.clock_names)
    mapping: Dict[str, str] = {}
    for name in a2.clock_names:
        if name in a1.clock_names:
            fresh = f"{name}_2"
            while fresh in taken:
                fresh += "_2"
            taken.add(fresh)
            mapping[name] = fresh
    return mapping


def composable(a1: TIOA, a2: TIOA) -> Tuple[bool, str]:
    shared_inputs = a1.inputs & a2.inputs
    shared_outputs = a1.outputs & a2.outputs
    reasons = []
    if shared_inputs:
        reasons.append(f"shared inputs: {', '.join(sorted(shared_inputs))}")
    if shared_outputs:
        reasons.append(f"shared outputs: {', '.join(sorted(shared_outputs))}")
    if reasons:
        return False, "; ".join(reasons)
    renaming = _clock_renaming(a1, a2)
    if renaming:
        pairs = ", ".join(f"{old}->{new}" for old, new in sorted(renaming.items()))
        return True, f"clock names clashed; second operand renamed ({pairs})"
    return True, "alphabets and clocks disjoint"


def product_location(l1: str, l2: str) -> str:
    return f"{l1}.{l2}"


def compose(a1: TIOA, a2: TIOA) -> TIOA:
    """
    Parallel composition of two automata.

    Only product locations reachable from the pair of initial locations through
    syntactically present switches are built. Shared actions synchronize into tau
    switches with conjoined guards and unified resets; guards are not checked for
    satisfiability here.
    """
    ok, reason = composable(a1, a2)
    if not ok:
        raise NotComposable(f"{a1.name} and {a2.name} are not composable: {reason}")

    a2 = rename_clocks(a2, _clock_renaming(a1, a2))
    sigma1, sigma2 = a1.alphabet, a2.alphabet
    shared = sigma1 & sigma2

    start = (a1.initial, a2.initial)
    seen = {start}
    order = [start]
    queue = deque([start])
    switches: List[Switch] = []

    def visit(pair: Tuple[str, str]):
        if pair not in seen:
            seen.add(pair)
            order.append(pair)
            queue.append(pair)

    while queue:
        l1, l2 = queue.popleft()
        source = product_location(l1, l2)
        # (1) moves of the first operand alone
        for sw in a1.switches_from(l1):
            if sw.action.is_tau or sw.action.name not in sigma2:
                switches.append(replace(sw, source=source, target=product_location(sw.target, l2)))
                visit((sw.target, l2))
        # (2) moves of the second operand alone
        for sw in a2.switches_from(l2):
            if sw.action.is_tau or sw.action.name not in sigma1:
                switches.append(replace(sw, source=source, target=product_location(l1, sw.target)))
                visit((l1, sw.target))
        # (3) synchronization on shared actions
        for sw1 in a1.switches_from(l1):
            if sw1.action.is_tau or sw1.action.name not in shared:
                continue
            for sw2 in a2.switches_from(l2):
                if sw2.action.is_tau or sw2.action.name != sw1.action.name:
                    continue
                switches.append(Switch(
                    source=source,
                    guard=sw1.guard & sw2.guard,
                    action=TAU,
                    resets=sw1.resets | sw2.resets,
                    target=product_location(sw1.target, sw2.target),
                ))
                visit((sw1.target, sw2.target))

    named: Dict[str, Tuple[str, str]] = {}
    for pair in order:
        clash = named.setdefault(product_location(*pair), pair)
        if clash != pair:
            raise NotComposable(
                f"{a1.name} and {a2.name} are not composable: locations {clash} and {pair} "
                f"both name {product_location(*pair)!r}"
            )

    invariants = {}
    for l1, l2 in order:
        inv = a1.invariant(l1) & a2.invariant(l2)
        if not inv.is_true:
            invariants[product_location(l1, l2)] = inv

    clocks = a1.clocks + tuple(
        ClockId(len(a1.clocks) + i, name) for i, name in enumerate(a2.clock_names, start=1)
    )
    composed = TIOA(
        name=f"{a1.name}.{a2.name}",
        locations=tuple(product_location(l1, l2) for l1, l2 in order),
        initial=product_location(*start),
        clocks=clocks,
        inputs=frozenset((a1.inputs | a2.inputs) - (a1.outputs | a2.outputs)),
        outputs=frozenset((a1.outputs | a2.outputs) - (a1.inputs | a2.inputs)),
        switches=tuple(switches),
        invariants=invariants,
    )
    logger.debug(f"Composed {a1.name} || {a2.name}: {len(order)} locations, {len(switches)} switches")
    return composed
