import random
from fractions import Fraction
from itertools import product

import pytest

from src import dbm
from src.dbm import Bound
from src.errors import ClockMismatch, DiagonalConstraint, EmptyZone, UnknownClock
from src.model import AtomicConstraint, ClockConstraint, Relation, atom, conj
from src.spans import Span

XY = ("x", "y")
LE0 = Bound(0)
INF = Bound.infinity()


def _box() -> ClockConstraint:
    # 1 <= x <= 2 and y <= 2
    return conj(atom("x", ">=", 1), atom("x", "<=", 2), atom("y", "<=", 2))


def _zone(*atoms) -> dbm.Zone:
    return dbm.from_constraint(conj(*atoms), XY)


def _valid(z: dbm.Zone) -> bool:
    for i in range(z.dim):
        if z.raw(i, i) != dbm.LE_ZERO:
            return False
        for j in range(z.dim):
            for k in range(z.dim):
                if z.bound(i, j) > z.bound(i, k) + z.bound(k, j):
                    return False
    return True


def _random_zone(rng: random.Random) -> dbm.Zone:
    atoms = []
    for clock in XY:
        if rng.random() < 0.6:
            atoms.append(atom(clock, rng.choice(["<", "<=", ">", ">=", "=="]), rng.randint(0, 6)))
    z = _zone(*atoms)
    for _ in range(rng.randint(0, 3)):
        if z.is_empty:
            break
        op = rng.choice(["up", "reset", "constrain"])
        if op == "up":
            z = dbm.up(z)
        elif op == "reset":
            z = dbm.reset(z, [rng.choice(XY)])
        else:
            z = dbm.constrain(z, conj(atom(rng.choice(XY), rng.choice(["<=", ">="]), rng.randint(0, 6))))
    return z


BELOW_CEILING = [Fraction(v, 2) for v in range(0, 7)]


class TestBound:
    def test_order(self):
        assert Bound(2, True) < Bound(2)
        assert Bound(2) < Bound(3, True)
        assert Bound(100) < INF

    def test_add(self):
        assert Bound(1) + Bound(2, True) == Bound(3, True)
        assert Bound(1) + Bound(-1) == Bound(0)
        assert Bound(1) + INF == INF

    def test_render(self):
        assert Bound(-1).render() == "(-1, <=)"
        assert Bound(3, True).render() == "(3, <)"
        assert INF.render() == "inf"


class TestConstraintMatrix:
    def test_entries(self):
        m = dbm.constraint_matrix(_box(), XY)
        assert m.rows() == [
            [LE0, Bound(-1), LE0],
            [Bound(2), LE0, INF],
            [Bound(2), INF, LE0],
        ]

    def test_canonical_form(self):
        z = dbm.from_constraint(_box(), XY)
        assert z.bound(1, 2) == Bound(2)
        assert z.bound(2, 1) == Bound(1)
        assert _valid(z)

    def test_render_matrix(self):
        text = dbm.render_matrix(dbm.constraint_matrix(_box(), XY))
        assert text.splitlines()[0].split() == ["|", "0_C", "|", "x", "|", "y"]
        assert "(-1, <=)" in text

    def test_from_matrix(self):
        rows = dbm.constraint_matrix(_box(), XY).rows()
        assert dbm.canonicalize(dbm.from_matrix(XY, rows)) == dbm.from_constraint(_box(), XY)

    def test_from_matrix_shape(self):
        with pytest.raises(ClockMismatch):
            dbm.from_matrix(XY, [[LE0]])

    def test_diagonal_rejected(self):
        c = conj(AtomicConstraint("x", Relation.LE, 1, other="y"))
        with pytest.raises(DiagonalConstraint):
            dbm.from_constraint(c, XY)


class TestEmptiness:
    def test_contradiction(self):
        assert dbm.is_empty(_zone(atom("x", "<=", 2), atom("x", ">=", 3)))

    def test_negative_clock(self):
        assert dbm.is_empty(_zone(atom("x", "<", 0)))

    def test_point_strict(self):
        assert dbm.is_empty(_zone(atom("x", "<", 2), atom("x", ">=", 2)))
        assert not dbm.is_empty(_zone(atom("x", "<=", 2), atom("x", ">=", 2)))

    def test_operations_require_nonempty(self):
        empty = dbm.empty_zone(XY)
        with pytest.raises(EmptyZone):
            dbm.up(empty)
        with pytest.raises(EmptyZone):
            dbm.reset(empty, ["x"])


class TestUp:
    def test_box(self):
        z = dbm.up(dbm.from_constraint(_box(), XY))
        assert z.bound(1, 0) == INF
        assert z.bound(2, 0) == INF
        assert z.bound(0, 1) == Bound(-1)
        assert z.bound(0, 2) == LE0
        assert z.bound(1, 2) == Bound(2)
        assert z.bound(2, 1) == Bound(1)

    def test_origin(self):
        z = dbm.up(dbm.origin(XY))
        assert z.bound(1, 2) == LE0 == z.bound(2, 1)
        assert dbm.zone_to_string(z) == "x==y"

    def test_idempotent(self):
        z = dbm.up(dbm.from_constraint(_box(), XY))
        assert dbm.up(z) == z


class TestReset:
    def test_box(self):
        z = dbm.reset(dbm.from_constraint(_box(), XY), ["y"])
        assert z.bound(2, 0) == LE0 == z.bound(0, 2)
        assert z.bound(1, 2) == Bound(2)
        assert z.bound(2, 1) == Bound(-1)
        assert z.bound(1, 0) == Bound(2)

    def test_nothing(self):
        z = dbm.from_constraint(_box(), XY)
        assert dbm.reset(z, []) == z

    def test_everything(self):
        assert dbm.reset(dbm.from_constraint(_box(), XY), XY) == dbm.origin(XY)

    def test_unknown_clock(self):
        with pytest.raises(UnknownClock):
            dbm.reset(dbm.origin(XY), ["z"])


class TestIntersectAndIncludes:
    def test_intersect(self):
        z = dbm.intersect(_zone(atom("x", "<=", 5)), _zone(atom("x", ">=", 3)))
        assert z == _zone(atom("x", ">=", 3), atom("x", "<=", 5))

    def test_universe_is_neutral(self):
        z = dbm.from_constraint(_box(), XY)
        assert dbm.intersect(z, dbm.universe(XY)) == z

    def test_diagonal_after_delay(self):
        z = dbm.intersect(dbm.up(dbm.origin(XY)), _zone(atom("x", "<=", 20)))
        assert dbm.zone_to_string(z) == "x<=20 & x==y"

    def test_mismatched_clocks(self):
        with pytest.raises(ClockMismatch):
            dbm.intersect(dbm.origin(XY), dbm.origin(("x",)))

    def test_includes(self):
        box = dbm.from_constraint(_box(), XY)
        assert dbm.includes(dbm.up(box), box)
        assert not dbm.includes(box, dbm.up(box))
        assert dbm.includes(box, dbm.empty_zone(XY))
        assert not dbm.includes(dbm.empty_zone(XY), box)


class TestKNormalize:
    def test_lowers_large_lower_bound(self):
        z = dbm.from_constraint(conj(atom("x", ">", 25)), ("x",))
        assert dbm.k_normalize(z, 20) == dbm.from_constraint(conj(atom("x", ">", 20)), ("x",))

    def test_drops_large_upper_bound(self):
        z = dbm.from_constraint(conj(atom("x", "<=", 25)), ("x",))
        assert dbm.k_normalize(z, 20) == dbm.universe(("x",))

    def test_small_bounds_unchanged(self):
        z = dbm.from_constraint(_box(), XY)
        assert dbm.k_normalize(z, 2) == z

    def test_idempotent(self):
        rng = random.Random(7)
        for _ in range(200):
            z = _random_zone(rng)
            once = dbm.k_normalize(z, 3)
            assert dbm.k_normalize(once, 3) == once

    def test_membership_below_ceiling_preserved(self):
        rng = random.Random(11)
        k = 3
        for _ in range(100):
            z = _random_zone(rng)
            norm = dbm.k_normalize(z, k)
            for vx, vy in product(BELOW_CEILING, BELOW_CEILING):
                u = {"x": vx, "y": vy}
                assert dbm.member(u, norm) == dbm.member(u, z)


class TestCanonicalInvariant:
    def test_random_operation_sequences(self):
        rng = random.Random(3)
        for _ in range(300):
            z = _random_zone(rng)
            if not z.is_empty:
                assert _valid(z)


class TestDelayClock:
    def test_extend_then_project(self):
        z = dbm.from_constraint(_box(), XY)
        assert dbm.project_out(dbm.extend(z, "t"), "t") == z

    def test_extend_starts_at_zero(self):
        z = dbm.extend(dbm.from_constraint(_box(), XY), "t")
        assert dbm.span_of_clock(z, "t") == Span.point(0)
        assert dbm.span_of_clock(dbm.up(z), "t") == Span.closed(0, None)

    def test_extend_twice(self):
        with pytest.raises(ClockMismatch):
            dbm.extend(dbm.origin(XY), "x")


class TestSpans:
    def test_span_of_clock(self):
        z = dbm.from_constraint(_box(), XY)
        assert dbm.span_of_clock(z, "x") == Span.closed(1, 2)
        assert dbm.span_of_clock(z, "y") == Span.closed(0, 2)

    def test_span_of_origin(self):
        assert dbm.span_of_clock(dbm.origin(XY), "x") == Span.point(0)

    def test_span_of_zone(self):
        assert dbm.span_of_zone(dbm.from_constraint(_box(), XY)) == Span.closed(1, 2)
        disjoint = _zone(atom("x", ">=", 5), atom("y", "<=", 2))
        assert dbm.span_of_zone(disjoint).is_empty

    def test_restrict(self):
        z = dbm.restrict(dbm.up(dbm.origin(("x",))), "x", Span(2, True, 4, False))
        assert dbm.zone_to_string(z) == "x>2 & x<=4"

    def test_strict_upper(self):
        z = _zone(atom("x", "<", 3))
        assert dbm.span_of_clock(z, "x") == Span(0, False, 3, True)


class TestMember:
    def test_box(self):
        z = dbm.from_constraint(_box(), XY)
        assert dbm.member({"x": Fraction(3, 2), "y": 2}, z)
        assert not dbm.member({"x": 0, "y": 0}, z)

    def test_empty(self):
        assert not dbm.member({"x": 0, "y": 0}, dbm.empty_zone(XY))

    def test_clock_mismatch(self):
        with pytest.raises(ClockMismatch):
            dbm.member({"x": 0}, dbm.origin(XY))


class TestZoneToString:
    def test_special_cases(self):
        assert dbm.zone_to_string(dbm.empty_zone(XY)) == "false"
        assert dbm.zone_to_string(dbm.universe(XY)) == "true"

    def test_point(self):
        assert dbm.zone_to_string(dbm.origin(XY)) == "x<=0 & y<=0"

    def test_box(self):
        assert dbm.zone_to_string(dbm.from_constraint(_box(), XY)) == "x>=1 & x<=2 & y<=2"
