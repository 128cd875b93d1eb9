import pytest

from src.spans import (
    QUIESCENCE_SPAN,
    UNBOUNDED,
    Span,
    covers_all,
    merge_intervals,
    merge_spans,
    partition,
    refine,
    span_leq,
    unit_pieces,
)


class TestSpan:
    def test_render(self):
        assert QUIESCENCE_SPAN.render() == "(0,inf)"
        assert UNBOUNDED.render() == "[0,inf)"
        assert Span.closed(10, 20).render() == "[10,20]"
        assert Span(0, False, 20, True).render() == "[0,20)"

    def test_negative_lower_end(self):
        with pytest.raises(ValueError):
            Span(-1)

    def test_infinity_is_open(self):
        assert Span(3, False, None, False) == Span.closed(3, None)

    def test_contains(self):
        span = Span(1, True, 3, False)
        assert not span.contains(1)
        assert span.contains(3)
        assert Span.closed(5, None).contains(10 ** 9)

    def test_empty(self):
        assert Span(2, True, 2, False).is_empty
        assert Span(3, False, 2, False).is_empty
        assert not Span.point(2).is_empty

    def test_intersect(self):
        assert Span.closed(0, 20).intersect(Span.closed(20, None)) == Span.point(20)
        assert Span(0, False, 20, True).intersect(Span.closed(20, None)).is_empty


class TestSpanLeq:
    def test_containment(self):
        assert span_leq(Span.closed(1, 2), Span.closed(0, 3))
        assert not span_leq(Span.closed(0, 3), Span.closed(1, 2))

    def test_strict_ends(self):
        assert span_leq(Span(0, False, 20, True), Span.closed(0, 20))
        assert not span_leq(Span.closed(0, 20), Span(0, False, 20, True))
        assert not span_leq(Span.closed(0, 1), Span(0, True, 1, False))

    def test_unbounded(self):
        assert span_leq(Span.closed(5, 9), Span.closed(3, None))
        assert not span_leq(Span.closed(3, None), Span.closed(3, 100))

    def test_empty_is_below_everything(self):
        assert span_leq(Span(2, True, 2, True), Span.point(7))


class TestMerge:
    def test_touching_closed(self):
        merged = merge_spans([(Span.closed(1, 3), "o"), (Span.closed(3, 5), "o")])
        assert merged == {(Span.closed(1, 5), "o")}

    def test_gap_at_shared_open_end(self):
        entries = [(Span(1, False, 3, True), "o"), (Span(3, True, 5, False), "o")]
        assert merge_spans(entries) == set(entries)

    def test_labels_kept_apart(self):
        entries = [(Span.closed(1, 3), "o"), (Span.closed(2, 5), "p")]
        assert merge_spans(entries) == set(entries)

    def test_overlap_with_unbounded(self):
        assert merge_intervals([Span.closed(0, 4), Span.closed(2, None)]) == [UNBOUNDED]

    def test_empty_spans_dropped(self):
        assert merge_intervals([Span(1, True, 1, True)]) == []


class TestCoversAll:
    def test_covers(self):
        assert covers_all([Span.closed(0, 20), Span.closed(20, None)])
        assert covers_all([UNBOUNDED])

    def test_gaps(self):
        assert not covers_all([Span.closed(0, 20)])
        assert not covers_all([Span(0, False, 20, True), Span(20, True, None, True)])
        assert not covers_all([Span.closed(1, None)])
        assert not covers_all([])


class TestPartition:
    def test_overlapping(self):
        pieces = partition([(Span.closed(0, 20), "idle"), (Span.closed(20, None), "off")])
        assert pieces == [
            (Span(0, False, 20, True), {"idle"}),
            (Span.point(20), {"idle", "off"}),
            (Span(20, True, None, True), {"off"}),
        ]

    def test_single(self):
        assert partition([(Span.closed(10, None), 0)]) == [(Span.closed(10, None), {0})]

    def test_points(self):
        pieces = partition([(Span.point(1), "a"), (Span.point(3), "b")])
        assert pieces == [(Span.point(1), {"a"}), (Span.point(3), {"b"})]

    def test_nested(self):
        pieces = partition([(Span.closed(0, 10), "a"), (Span.closed(2, 4), "b")])
        assert [keys for _, keys in pieces] == [{"a"}, {"a", "b"}, {"a"}]
        assert pieces[1][0] == Span.closed(2, 4)

    def test_empty(self):
        assert partition([]) == []


def _rendered(spans):
    return [s.render() for s in spans]


class TestUnitPieces:
    def test_closed(self):
        assert _rendered(unit_pieces(Span.closed(1, 3), 10)) == ["[1,1]", "(1,2)", "[2,2]", "(2,3)", "[3,3]"]

    def test_open_ends(self):
        assert _rendered(unit_pieces(Span(0, True, 2, True), 10)) == ["(0,1)", "[1,1]", "(1,2)"]

    def test_tail_above_bound(self):
        assert _rendered(unit_pieces(Span(1, True, None, True), 3)) == ["(1,2)", "[2,2]", "(2,3)", "[3,3]", "(3,inf)"]
        assert _rendered(unit_pieces(Span.closed(2, 5), 3)) == ["[2,2]", "(2,3)", "[3,3]", "(3,5]"]

    def test_starts_above_bound(self):
        assert unit_pieces(Span.closed(7, None), 3) == [Span.closed(7, None)]

    def test_point_and_empty(self):
        assert unit_pieces(Span.point(4), 10) == [Span.point(4)]
        assert unit_pieces(Span(2, True, 2, True), 10) == []


class TestRefine:
    def test_joins_equal_neighbours(self):
        pieces = refine(Span.closed(0, None), 4, lambda s: s.lo >= 2)
        assert pieces == [(Span(0, False, 2, True), False), (Span.closed(2, None), True)]

    def test_keeps_distinct_values(self):
        pieces = refine(Span.closed(0, 1), 5, Span.render)
        assert [value for _, value in pieces] == ["[0,0]", "(0,1)", "[1,1]"]
