"""
Delay intervals with strictness flags.

A Span is the interval of delays (measured since the last visible step) at which
something can happen. The upper end is `None` for infinity.
"""
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, FrozenSet, Hashable, Iterable, List, Optional, Sequence, Tuple, TypeVar

K = TypeVar("K", bound=Hashable)


@dataclass(frozen=True)
class Span:
    lo: int
    lo_strict: bool = False
    up: Optional[int] = None
    up_strict: bool = False

    def __post_init__(self):
        if self.lo < 0:
            raise ValueError(f"span lower end must be non-negative, got {self.lo}")
        if self.up is None and not self.up_strict:
            # infinity is never attained
            object.__setattr__(self, "up_strict", True)

    @classmethod
    def closed(cls, lo: int, up: Optional[int]) -> "Span":
        return cls(lo, False, up, up is None)

    @classmethod
    def point(cls, value: int) -> "Span":
        return cls(value, False, value, False)

    @property
    def bounded(self) -> bool:
        return self.up is not None

    @property
    def is_empty(self) -> bool:
        if self.up is None:
            return False
        return self.lo > self.up or (self.lo == self.up and (self.lo_strict or self.up_strict))

    def contains(self, d) -> bool:
        if d < self.lo or (d == self.lo and self.lo_strict):
            return False
        if self.up is None:
            return True
        return d < self.up or (d == self.up and not self.up_strict)

    def intersect(self, other: "Span") -> "Span":
        if (self.lo, not self.lo_strict) >= (other.lo, not other.lo_strict):
            lo, lo_strict = self.lo, self.lo_strict
        else:
            lo, lo_strict = other.lo, other.lo_strict
        if self.up is None:
            up, up_strict = other.up, other.up_strict
        elif other.up is None or (self.up, not self.up_strict) <= (other.up, not other.up_strict):
            up, up_strict = self.up, self.up_strict
        else:
            up, up_strict = other.up, other.up_strict
        return Span(lo, lo_strict, up, up_strict)

    def sort_key(self):
        return (self.lo, self.lo_strict, self.up is None, self.up or 0, self.up_strict)

    def render(self) -> str:
        left = "(" if self.lo_strict else "["
        if self.up is None:
            return f"{left}{self.lo},inf)"
        right = ")" if self.up_strict else "]"
        return f"{left}{self.lo},{self.up}{right}"

    def __str__(self) -> str:
        return self.render()


UNBOUNDED = Span.closed(0, None)
# Conventional span of quiescence observations: reached after a positive, unbounded wait.
QUIESCENCE_SPAN = Span(0, True, None, True)


def span_leq(a: Span, b: Span) -> bool:
    """True iff every delay in `a` lies in `b`."""
    if a.is_empty:
        return True
    if a.lo < b.lo or (a.lo == b.lo and b.lo_strict and not a.lo_strict):
        return False
    if b.up is None:
        return True
    if a.up is None:
        return False
    return a.up < b.up or (a.up == b.up and (a.up_strict or not b.up_strict))


def _mergeable(left: Span, right: Span) -> bool:
    """`left` starts no later than `right`; their union is an interval."""
    if left.up is None or right.lo < left.up:
        return True
    if right.lo == left.up:
        return not (left.up_strict and right.lo_strict)
    return False


def _hull(left: Span, right: Span) -> Span:
    if left.up is None or right.up is None:
        return Span(left.lo, left.lo_strict, None, True)
    if (right.up, not right.up_strict) > (left.up, not left.up_strict):
        return Span(left.lo, left.lo_strict, right.up, right.up_strict)
    return left


def merge_intervals(spans: Iterable[Span]) -> List[Span]:
    ordered = sorted((s for s in spans if not s.is_empty), key=lambda s: (s.lo, s.lo_strict))
    merged: List[Span] = []
    for span in ordered:
        if merged and _mergeable(merged[-1], span):
            merged[-1] = _hull(merged[-1], span)
        else:
            merged.append(span)
    return merged


def merge_spans(entries: Iterable[Tuple[Span, K]]) -> FrozenSet[Tuple[Span, K]]:
    """Coalesce overlapping or touching spans per label into maximal intervals."""
    by_label: Dict[K, List[Span]] = {}
    for span, label in entries:
        by_label.setdefault(label, []).append(span)
    return frozenset(
        (span, label)
        for label, spans in by_label.items()
        for span in merge_intervals(spans)
    )


def covers_all(spans: Iterable[Span]) -> bool:
    """True iff the union of `spans` is exactly [0, inf)."""
    merged = merge_intervals(spans)
    return len(merged) == 1 and merged[0] == UNBOUNDED


def partition(items: Sequence[Tuple[Span, K]]) -> List[Tuple[Span, FrozenSet[K]]]:
    """
    Common refinement of labelled spans.

    Splits the union of the spans into maximal intervals on which the set of keys
    whose span contains the delay is constant. Intervals are returned in order.
    """
    points = sorted({s.lo for s, _ in items} | {s.up for s, _ in items if s.up is not None})
    if not points:
        return []
    pieces: List[Tuple[Span, Fraction]] = []
    for i, p in enumerate(points):
        pieces.append((Span.point(p), Fraction(p)))
        if i + 1 < len(points):
            q = points[i + 1]
            pieces.append((Span(p, True, q, True), Fraction(p + q, 2)))
    pieces.append((Span(points[-1], True, None, True), Fraction(points[-1] + 1)))

    result: List[Tuple[Span, FrozenSet[K]]] = []
    for piece, witness in pieces:
        keys = frozenset(key for span, key in items if span.contains(witness))
        if not keys:
            continue
        if result and result[-1][1] == keys and _mergeable(result[-1][0], piece):
            result[-1] = (_hull(result[-1][0], piece), keys)
        else:
            result.append((piece, keys))
    return result


def unit_pieces(span: Span, bound: int) -> List[Span]:
    """
    Split `span` into integer points and open unit intervals up to `bound`.

    The part of `span` above `bound` is kept as one piece. Span ends must be integers.
    """
    if span.is_empty:
        return []
    if span.lo >= bound:
        return [span]
    pieces: List[Span] = []
    n = span.lo
    if span.contains(n):
        pieces.append(Span.point(n))
    while n < bound and (span.up is None or n < span.up):
        pieces.append(Span(n, True, n + 1, True))
        n += 1
        if span.contains(n):
            pieces.append(Span.point(n))
    if n == bound and (span.up is None or span.up > bound):
        pieces.append(Span(bound, True, span.up, span.up_strict))
    return pieces


def refine(span: Span, bound: int, evaluate: Callable[[Span], K]) -> List[Tuple[Span, K]]:
    """
    Unit pieces of `span`, each with `evaluate(piece)`; neighbouring pieces with
    equal values are joined again.
    """
    result: List[Tuple[Span, K]] = []
    for piece in unit_pieces(span, bound):
        value = evaluate(piece)
        if result and result[-1][1] == value:
            result[-1] = (_hull(result[-1][0], piece), value)
        else:
            result.append((piece, value))
    return result
