from fractions import Fraction
from itertools import product

import pytest

from src import dbm
from src.dbm import Bound
from src.errors import DiagonalConstraint, EmptyZone, InvalidCeiling
from src.model import (
    TIOA,
    AtomicConstraint,
    Relation,
    Switch,
    atom,
    compose,
    conj,
    input_label,
    make_clocks,
    output_label,
    scale,
)
from src.oracle import ConcreteState, build_tiolts
from src.scripts.random_models import generate_model
from src.spans import Span
from src.zonegraph import (
    EPSILON,
    SymbolicState,
    build_iolzg,
    check_independent_progress,
    check_input_enabled,
    classify_quiescence,
    closure_entries,
    delay_closure,
    export_dot,
    zero_time_closure,
)
from tests.conftest import graph, load


XY = ("x", "y")


def _single(invariant=None, switches=(), inputs=(), outputs=()) -> TIOA:
    return TIOA(
        name="single",
        locations=("l",),
        initial="l",
        clocks=make_clocks("x"),
        inputs=frozenset(inputs),
        outputs=frozenset(outputs),
        switches=tuple(switches),
        invariants={"l": invariant} if invariant is not None else {},
    )


class TestBuild:
    def test_idle_zone(self, machine_graph):
        expected = dbm.intersect(dbm.up(dbm.origin(XY)), dbm.from_constraint(conj(atom("x", "<=", 20)), XY))
        assert SymbolicState("idle", expected) in machine_graph.states
        assert SymbolicState("idle", expected).render() == "idle | x<=20 & x==y"

    def test_initial_state(self, machine_graph):
        assert machine_graph.initial == SymbolicState("idle", dbm.origin(XY))
        assert machine_graph.ceiling == 20

    def test_clipped_sugar_zone(self):
        le0, inf = Bound(0), Bound.infinity()
        rows = [
            [le0, le0, le0],
            [Bound(10), le0, Bound(-10)],
            [Bound(20), inf, le0],
        ]
        expected = dbm.canonicalize(dbm.from_matrix(XY, rows))
        g = graph("machine_clipped")
        assert SymbolicState("add_sugar", expected) in g.states
        assert dbm.zone_to_string(expected) == "y<=20 & x-y<=-10"

    def test_single_location(self):
        g = build_iolzg(_single())
        assert len(g.states) == 2
        assert g.graph.number_of_edges() == 2
        closed = SymbolicState("l", dbm.up(dbm.origin(("x",))))
        assert (EPSILON, closed) in g.successors(g.initial)
        assert g.successors(closed) == [(EPSILON, closed)]

    def test_ceiling_defaults_to_max_constant(self):
        assert graph("f5_a4").ceiling == 3
        assert build_iolzg(load("f5_a4"), 7).ceiling == 7

    def test_ceiling_below_max_constant(self, machine):
        with pytest.raises(InvalidCeiling):
            build_iolzg(machine, 10)

    def test_diagonal(self):
        a = _single(invariant=conj(AtomicConstraint("x", Relation.LE, 1, other="x")))
        with pytest.raises(DiagonalConstraint):
            build_iolzg(a)

    def test_empty_initial_zone(self):
        a = TIOA("bad", ("l",), "l", make_clocks("x"), invariants={"l": conj(atom("x", "<", 0))})
        with pytest.raises(EmptyZone):
            build_iolzg(a)

    def test_unsatisfiable_synchronization_pruned(self, machine):
        g = build_iolzg(compose(machine, load("customer")))
        late = [sw for sw in g.automaton.switches_from("preparing_coffee.add_sugar") if "y > 15" in sw.guard.render()]
        assert len(late) == 1
        states = [s for s in g.states if s.location == "preparing_coffee.add_sugar"]
        assert states
        for s in states:
            assert dbm.constrain(s.zone, late[0].guard).is_empty


class TestDelayClosure:
    def test_machine_initial(self, machine_graph):
        closure = delay_closure(machine_graph.initial, machine_graph)
        spans = {(state.location, span) for state, span in closure}
        assert spans == {("idle", Span.closed(0, 20)), ("off", Span.closed(20, None))}

    def test_no_tau_no_invariant(self):
        g = build_iolzg(_single())
        assert {span for _, span in delay_closure(g.initial, g)} == {Span.closed(0, None)}

    def test_invariant_zero(self):
        g = build_iolzg(_single(invariant=conj(atom("x", "<=", 0))))
        assert {span for _, span in delay_closure(g.initial, g)} == {Span.point(0)}

    def test_strong_closure_stays_put(self, machine_graph):
        entries = closure_entries(machine_graph.initial, machine_graph, weak=False)
        assert [e.location for e in entries] == ["idle"]

    def test_zero_time_closure(self):
        g = graph("tau_delay_spec")
        initial = zero_time_closure([g.initial], g)
        assert {s.location for s in initial} == {"l0"}
        done = graph("machine")
        done_state = next(s for s in done.states if s.location == "done")
        assert "idle" in {s.location for s in zero_time_closure([done_state], done)}

    def test_zero_time_closure_idempotent(self, rng):
        for n in range(40):
            g = build_iolzg(generate_model(rng, f"t{n}"))
            closed = zero_time_closure(g.states, g)
            assert zero_time_closure(closed, g) == closed
            for state in g.sorted_states():
                once = zero_time_closure([state], g)
                assert zero_time_closure(once, g) == once


class TestQuiescence:
    @pytest.mark.parametrize("name,safe,enforced", [
        ("f5_a1", True, True),
        ("f5_a2", True, False),
        ("f5_a3", True, False),
        ("f5_a4", False, False),
        ("f5_a5", False, False),
        ("enforced_without_safe", False, True),
    ])
    def test_initial_classes(self, name, safe, enforced):
        g = graph(name)
        cls = classify_quiescence(g.initial, g)
        assert (cls.safe, cls.enforced) == (safe, enforced)

    @pytest.mark.parametrize("name", ["f5_a2", "f5_a3", "f5_a4", "f5_a5", "f3_a0", "f3_a4"])
    def test_sink_is_quiescent(self, name):
        g = graph(name)
        sinks = [s for s in g.states if s.location == "m"]
        assert sinks
        for s in sinks:
            cls = classify_quiescence(s, g)
            assert cls.safe and cls.enforced

    def test_machine_idle(self, machine_graph):
        cls = classify_quiescence(machine_graph.initial, machine_graph)
        assert cls.safe and cls.enforced

    def test_machine_prime_add_sugar(self):
        g = graph("machine_prime")
        states = [s for s in g.states if s.location == "add_sugar"]
        assert states
        assert not any(classify_quiescence(s, g).safe for s in states)


def _enforced_only(state: SymbolicState, g) -> bool:
    cls = classify_quiescence(state, g)
    return cls.enforced and not cls.safe


class TestPremises:
    def test_machine_not_input_enabled(self, machine_graph):
        report = check_input_enabled(machine_graph)
        assert not report.ok
        assert any(v.state.location == "off" for v in report.violations)

    def test_self_loops_are_input_enabled(self):
        assert check_input_enabled(graph("enforced_without_safe")).ok
        assert check_input_enabled(graph("server_impl")).ok

    def test_no_inputs(self):
        assert check_input_enabled(graph("f5_a1")).ok

    def test_machine_independent_progress(self, machine_graph):
        assert check_independent_progress(machine_graph).ok

    def test_waiting_for_input_only(self):
        a = _single(invariant=conj(atom("x", "<=", 5)),
                    switches=[Switch("l", conj(), input_label("a"), frozenset(), "l")], inputs=["a"])
        report = check_independent_progress(build_iolzg(a))
        assert not report.ok
        assert report.as_dict()["violations"]

    def test_output_at_deadline(self):
        a = _single(invariant=conj(atom("x", "<=", 5)),
                    switches=[Switch("l", conj(atom("x", "==", 5)), output_label("o"), frozenset({"x"}), "l")],
                    outputs=["o"])
        assert check_independent_progress(build_iolzg(a)).ok

    def test_enforced_without_safe(self):
        assert not check_independent_progress(graph("enforced_without_safe")).ok

    def test_progress_excludes_enforced_only_states(self, rng):
        for n in range(40):
            g = build_iolzg(generate_model(rng, f"p{n}", progress=True))
            assert check_independent_progress(g).ok
            assert all(not _enforced_only(s, g) for s in g.sorted_states())

    def test_independent_progress_excludes_enforced_only_states(self, rng):
        for n in range(60):
            g = build_iolzg(generate_model(rng, f"q{n}", intervals=True))
            if check_independent_progress(g).ok:
                assert all(not _enforced_only(s, g) for s in g.sorted_states()), g.automaton


class TestExportDot:
    def test_contents(self, machine_graph):
        text = export_dot(machine_graph)
        assert text.startswith('digraph "machine" {')
        assert '"idle | x<=20 & x==y"' in text
        assert "peripheries=2" in text
        assert '[label="?press"]' in text

    def test_deterministic(self):
        assert export_dot(graph("machine")) == export_dot(graph("machine"))

    def test_empty_alphabet(self):
        text = export_dot(build_iolzg(_single()))
        assert text.count("->") == 2
        assert '[label="eps"]' in text


# Single-clock closed fixtures: scaling by 2 lets integer delays of the oracle
# reach every half-integer valuation.
SCALABLE = ["f5_a2", "f5_a3", "f5_a4", "f5_a5", "f3_a0", "f3_a1", "f3_a3", "f3_a4", "f3_a5",
            "weak_tau", "server_spec", "client_spec", "tau_delay_spec"]


class TestAgainstConcreteStates:
    @pytest.mark.parametrize("name", SCALABLE)
    def test_every_concrete_state_is_covered(self, name):
        a = load(name)
        g = build_iolzg(a)
        ts = build_tiolts(scale(a, 2))
        for s in ts.reachable_states():
            if any(v > 2 * g.ceiling for v in s.values):
                continue
            u = {c: Fraction(v, 2) for c, v in zip(g.clocks, s.values)}
            assert any(z.location == s.location and dbm.member(u, z.zone) for z in g.states), s

    @pytest.mark.parametrize("name", SCALABLE)
    def test_every_zone_point_is_reachable(self, name):
        a = load(name)
        g = build_iolzg(a)
        reachable = build_tiolts(scale(a, 2)).reachable_states()
        grid = range(0, 2 * g.ceiling + 1)
        for state in g.states:
            for values in product(grid, repeat=len(g.clocks)):
                u = {c: Fraction(v, 2) for c, v in zip(g.clocks, values)}
                if dbm.member(u, state.zone):
                    assert ConcreteState(state.location, tuple(values)) in reachable, (state, values)
