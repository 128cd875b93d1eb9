import pytest

from src.errors import NotComposable
from src.model import (
    TAU,
    TIOA,
    AtomicConstraint,
    Relation,
    Switch,
    atom,
    composable,
    compose,
    conj,
    input_label,
    is_closed,
    make_clocks,
    max_constant,
    output_label,
    scale,
    validate,
)
from tests.conftest import load


def _tau_cycle() -> TIOA:
    return TIOA(
        name="cyc",
        locations=("a", "b"),
        initial="a",
        clocks=make_clocks("x"),
        switches=(
            Switch("a", conj(), TAU, frozenset(), "b"),
            Switch("b", conj(), TAU, frozenset(), "a"),
        ),
    )


class TestValidate:
    def test_machine(self, machine):
        report = validate(machine)
        assert report.ok
        assert report.diagonal_free
        assert report.invariants_downward_closed
        assert report.tau_cycle_free
        assert report.max_constant == 20

    def test_empty_automaton(self):
        report = validate(TIOA("e", ("l0",), "l0"))
        assert report.ok
        assert report.max_constant == 0

    def test_tau_cycle_is_warning_by_default(self):
        report = validate(_tau_cycle())
        assert not report.tau_cycle_free
        assert report.ok
        assert report.problems[0].severity == "warning"

    def test_tau_cycle_escalated(self):
        report = validate(_tau_cycle(), escalate_tau_cycles=True)
        assert not report.ok

    def test_invariant_not_downward_closed(self):
        a = TIOA("up", ("l0",), "l0", make_clocks("x"), invariants={"l0": conj(atom("x", ">=", 1))})
        report = validate(a)
        assert not report.invariants_downward_closed
        assert not report.ok

    def test_diagonal(self):
        guard = conj(AtomicConstraint("x", Relation.LE, 3, other="y"))
        a = TIOA("d", ("l0",), "l0", make_clocks("x", "y"),
                 outputs=frozenset({"o"}),
                 switches=(Switch("l0", guard, output_label("o"), frozenset(), "l0"),))
        report = validate(a)
        assert not report.diagonal_free
        assert not report.ok

    def test_undeclared_action(self):
        a = TIOA("u", ("l0",), "l0", switches=(Switch("l0", conj(), input_label("a"), frozenset(), "l0"),))
        assert not validate(a).ok

    def test_as_dict(self, machine):
        d = validate(machine).as_dict()
        assert d["ok"] is True
        assert d["problems"] == []


class TestConstants:
    def test_max_constant(self):
        guard = conj(atom("x", "<=", 3), atom("y", ">", 7))
        a = TIOA("g", ("l0",), "l0", make_clocks("x", "y"), switches=(Switch("l0", guard, TAU, frozenset(), "l0"),))
        assert max_constant(a) == 7

    def test_closed(self, machine):
        assert not is_closed(machine)
        assert is_closed(load("customer"))

    def test_scale(self, machine):
        doubled = scale(machine, 2)
        assert max_constant(doubled) == 40
        assert doubled.invariant("idle").render() == "x <= 40"

    def test_scale_rejects_zero(self, machine):
        with pytest.raises(ValueError):
            scale(machine, 0)


class TestComposable:
    def test_machine_and_customer(self, machine):
        ok, reason = composable(machine, load("customer"))
        assert ok
        assert reason == "alphabets and clocks disjoint"

    def test_shared_inputs(self, machine):
        ok, reason = composable(machine, machine)
        assert not ok
        assert "shared inputs" in reason

    def test_clock_clash_is_renamed(self):
        other = TIOA("b", ("b0",), "b0", make_clocks("x"), inputs=frozenset({"q"}))
        ok, reason = composable(load("f5_a4"), other)
        assert ok
        assert "x->x_2" in reason
        assert compose(load("f5_a4"), other).clock_names == ("x", "x_2")

    def test_compose_raises(self, machine):
        with pytest.raises(NotComposable):
            compose(machine, machine)

    def test_clashing_product_names(self):
        left = TIOA("left", ("a", "a.b"), "a", outputs=frozenset({"p"}),
                    switches=(Switch("a", conj(), output_label("p"), frozenset(), "a.b"),))
        right = TIOA("right", ("b.c", "c"), "b.c", outputs=frozenset({"q"}),
                     switches=(Switch("b.c", conj(), output_label("q"), frozenset(), "c"),))
        with pytest.raises(NotComposable, match="'a.b.c'"):
            compose(left, right)

    def test_dotted_names_without_clash(self):
        left = TIOA("left", ("a.b",), "a.b", outputs=frozenset({"p"}))
        right = TIOA("right", ("c",), "c", outputs=frozenset({"q"}))
        assert compose(left, right).locations == ("a.b.c",)


class TestCompose:
    @pytest.fixture
    def composed(self, machine):
        return compose(machine, load("customer"))

    def test_alphabets(self, composed):
        assert composed.name == "machine.customer"
        assert composed.inputs == frozenset()
        assert composed.outputs == {"proceed"}
        assert composed.clock_names == ("x", "y", "z")
        assert composed.initial == "idle.idle"

    def test_press_synchronizes(self, composed):
        press = [sw for sw in composed.switches_from("idle.idle") if sw.target == "add_sugar.add_sugar"]
        assert len(press) == 1
        assert press[0].action == TAU
        assert press[0].resets == {"x", "y", "z"}

    def test_proceed_stays_output(self, composed):
        proceed = [sw for sw in composed.switches if sw.action == output_label("proceed")]
        assert [sw.target for sw in proceed] == ["preparing_coffee.add_sugar"]

    def test_coffee_branches_become_tau(self, composed):
        coffee = [sw for sw in composed.switches_from("preparing_coffee.add_sugar") if sw.target == "done.idle"]
        assert len(coffee) == 2
        assert all(sw.action == TAU for sw in coffee)
        assert {sw.guard.render() for sw in coffee} == {"y < 15 & z <= 10", "y > 15 & z <= 10"}

    def test_invariants_conjoined(self, composed):
        assert composed.invariant("idle.idle").render() == "x <= 20"
        assert validate(composed).invariants_downward_closed

    def test_max_constant(self, composed):
        assert max_constant(composed) == 20

    def test_with_empty_automaton(self, machine):
        empty = TIOA("e", ("e0",), "e0")
        composed = compose(machine, empty)
        assert len(composed.locations) == len(machine.locations)
        assert len(composed.switches) == len(machine.switches)
        assert composed.inputs == machine.inputs
        assert composed.outputs == machine.outputs

    def test_commutative_up_to_naming(self, machine):
        customer = load("customer")
        ab = compose(machine, customer)
        ba = compose(customer, machine)
        assert {tuple(reversed(loc.split("."))) for loc in ab.locations} == {tuple(loc.split(".")) for loc in ba.locations}
        assert len(ab.switches) == len(ba.switches)
        assert ab.inputs == ba.inputs
        assert ab.outputs == ba.outputs
