"""
Difference Bound Matrices and the zone algebra built on them.

Entry (i, j) of a matrix bounds the difference x_i - x_j, index 0 being the zero
clock. Bounds are stored as raw integers: value * 2 + 1 for non-strict, value * 2
for strict, and INF for infinity, so that the natural integer order coincides with
the bound order and addition is a couple of bit operations.
"""
from dataclasses import dataclass
from functools import total_ordering
from typing import Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from src.errors import ClockMismatch, DiagonalConstraint, EmptyZone, UnknownClock
from src.model import AtomicConstraint, ClockConstraint, Relation
from src.spans import Span

INF = 1 << 62
LE_ZERO = 1


def raw_bound(value: int, strict: bool) -> int:
    return value * 2 + (0 if strict else 1)


def _add(a: int, b: int) -> int:
    if a >= INF or b >= INF:
        return INF
    return ((a & ~1) + (b & ~1)) | (a & b & 1)


# ----------------------------------------- Bound ----------------------------------------

@total_ordering
@dataclass(frozen=True)
class Bound:
    """Finite(value, strict) when `value` is set, Infinity when it is None."""
    value: Optional[int]
    strict: bool = False

    @classmethod
    def infinity(cls) -> "Bound":
        return cls(None, True)

    @classmethod
    def from_raw(cls, raw: int) -> "Bound":
        if raw >= INF:
            return cls.infinity()
        return cls(raw >> 1, not raw & 1)

    @property
    def is_infinite(self) -> bool:
        return self.value is None

    @property
    def raw(self) -> int:
        if self.value is None:
            return INF
        return raw_bound(self.value, self.strict)

    def __lt__(self, other: "Bound") -> bool:
        return self.raw < other.raw

    def __add__(self, other: "Bound") -> "Bound":
        return Bound.from_raw(_add(self.raw, other.raw))

    def render(self) -> str:
        if self.value is None:
            return "inf"
        return f"({self.value}, {'<' if self.strict else '<='})"

    def __str__(self) -> str:
        return self.render()


# ------------------------------------- Matrix types -------------------------------------

@dataclass(frozen=True)
class DBM:
    """A square bound matrix, not necessarily canonical."""
    clocks: Tuple[str, ...]
    entries: Tuple[int, ...]

    @property
    def dim(self) -> int:
        return len(self.clocks) + 1

    def raw(self, i: int, j: int) -> int:
        return self.entries[i * self.dim + j]

    def bound(self, i: int, j: int) -> Bound:
        return Bound.from_raw(self.raw(i, j))

    def rows(self) -> List[List[Bound]]:
        return [[self.bound(i, j) for j in range(self.dim)] for i in range(self.dim)]


@dataclass(frozen=True)
class Zone:
    """A canonical DBM, or the unique empty zone over `clocks` when `entries` is None."""
    clocks: Tuple[str, ...]
    entries: Optional[Tuple[int, ...]]

    @property
    def dim(self) -> int:
        return len(self.clocks) + 1

    @property
    def is_empty(self) -> bool:
        return self.entries is None

    @property
    def dbm(self) -> Optional[DBM]:
        return None if self.entries is None else DBM(self.clocks, self.entries)

    def index(self, clock: str) -> int:
        try:
            return self.clocks.index(clock) + 1
        except ValueError:
            raise UnknownClock(f"unknown clock {clock!r} (zone clocks: {', '.join(self.clocks)})") from None

    def raw(self, i: int, j: int) -> int:
        return self.entries[i * self.dim + j]

    def bound(self, i: int, j: int) -> Bound:
        return Bound.from_raw(self.raw(i, j))

    def __str__(self) -> str:
        return zone_to_string(self)


def _matrix(dim: int, entries: Sequence[int]) -> List[List[int]]:
    return [list(entries[i * dim:(i + 1) * dim]) for i in range(dim)]


def _flatten(m: List[List[int]]) -> Tuple[int, ...]:
    return tuple(v for row in m for v in row)


def _unconstrained(dim: int) -> List[List[int]]:
    m = [[INF] * dim for _ in range(dim)]
    for i in range(dim):
        m[i][i] = LE_ZERO
        m[0][i] = LE_ZERO
    return m


def _close(m: List[List[int]]) -> bool:
    """Floyd-Warshall in place; False when the matrix has a negative cycle."""
    dim = len(m)
    for k in range(dim):
        row_k = m[k]
        for i in range(dim):
            m_ik = m[i][k]
            if m_ik >= INF:
                continue
            row_i = m[i]
            for j in range(dim):
                m_kj = row_k[j]
                if m_kj >= INF:
                    continue
                s = _add(m_ik, m_kj)
                if s < row_i[j]:
                    row_i[j] = s
        if m[k][k] < LE_ZERO:
            return False
    return all(m[i][i] >= LE_ZERO for i in range(dim))


def _zone(clocks: Tuple[str, ...], m: List[List[int]]) -> Zone:
    return Zone(clocks, _flatten(m))


def empty_zone(clocks: Sequence[str]) -> Zone:
    return Zone(tuple(clocks), None)


def _require(z: Zone):
    if z.is_empty:
        raise EmptyZone("operation requires a nonempty zone")


def _same_clocks(z1: Zone, z2: Zone):
    if z1.clocks != z2.clocks:
        raise ClockMismatch(f"clock orderings differ: {z1.clocks} vs {z2.clocks}")


# ---------------------------------------- Builders --------------------------------------

def _apply_atoms(m: List[List[int]], clocks: Tuple[str, ...], c: ClockConstraint):
    index = {name: i for i, name in enumerate(clocks, start=1)}
    for at in c.conjuncts:
        if at.is_diagonal:
            raise DiagonalConstraint(f"diagonal constraint {at.render()} is not supported")
        if at.clock not in index:
            raise UnknownClock(f"unknown clock {at.clock!r}")
        i = index[at.clock]
        rel = at.relation
        if rel in (Relation.LT, Relation.LE, Relation.EQ):
            m[i][0] = min(m[i][0], raw_bound(at.bound, rel is Relation.LT))
        if rel in (Relation.GT, Relation.GE, Relation.EQ):
            m[0][i] = min(m[0][i], raw_bound(-at.bound, rel is Relation.GT))


def constraint_matrix(c: ClockConstraint, clocks: Sequence[str]) -> DBM:
    """The matrix of `c` plus clock non-negativity, before closure."""
    clocks = tuple(clocks)
    m = _unconstrained(len(clocks) + 1)
    _apply_atoms(m, clocks, c)
    return DBM(clocks, _flatten(m))


def from_matrix(clocks: Sequence[str], rows: Sequence[Sequence[Bound]]) -> DBM:
    clocks = tuple(clocks)
    dim = len(clocks) + 1
    if len(rows) != dim or any(len(r) != dim for r in rows):
        raise ClockMismatch(f"expected a {dim}x{dim} matrix")
    return DBM(clocks, tuple(b.raw for r in rows for b in r))


def canonicalize(z: Union[Zone, DBM]) -> Zone:
    if isinstance(z, Zone) and z.is_empty:
        return z
    m = _matrix(z.dim, z.entries)
    for i in range(1, z.dim):
        m[0][i] = min(m[0][i], LE_ZERO)
    if not _close(m):
        return empty_zone(z.clocks)
    return _zone(z.clocks, m)


def from_constraint(c: ClockConstraint, clocks: Sequence[str]) -> Zone:
    return canonicalize(constraint_matrix(c, clocks))


def universe(clocks: Sequence[str]) -> Zone:
    return from_constraint(ClockConstraint(), clocks)


def origin(clocks: Sequence[str]) -> Zone:
    clocks = tuple(clocks)
    dim = len(clocks) + 1
    return _zone(clocks, [[LE_ZERO] * dim for _ in range(dim)])


# --------------------------------------- Operations -------------------------------------

def is_empty(z: Zone) -> bool:
    return z.is_empty


def up(z: Zone) -> Zone:
    _require(z)
    m = _matrix(z.dim, z.entries)
    for i in range(1, z.dim):
        m[i][0] = INF
    return _zone(z.clocks, m)


def reset(z: Zone, clocks: Iterable[str]) -> Zone:
    _require(z)
    m = _matrix(z.dim, z.entries)
    for name in sorted(set(clocks)):
        x = z.index(name)
        for j in range(z.dim):
            m[x][j] = m[0][j]
            m[j][x] = m[j][0]
        m[x][x] = LE_ZERO
    return _zone(z.clocks, m)


def intersect(z1: Zone, z2: Zone) -> Zone:
    _same_clocks(z1, z2)
    if z1.is_empty:
        return z1
    if z2.is_empty:
        return z2
    m = _matrix(z1.dim, [min(a, b) for a, b in zip(z1.entries, z2.entries)])
    if not _close(m):
        return empty_zone(z1.clocks)
    return _zone(z1.clocks, m)


def constrain(z: Zone, c: ClockConstraint) -> Zone:
    """Conjoin a (diagonal-free) constraint over a subset of the zone's clocks."""
    if z.is_empty or c.is_true:
        return z
    m = _matrix(z.dim, z.entries)
    _apply_atoms(m, z.clocks, c)
    if not _close(m):
        return empty_zone(z.clocks)
    return _zone(z.clocks, m)


def includes(z1: Zone, z2: Zone) -> bool:
    """True iff every valuation of z2 lies in z1."""
    _same_clocks(z1, z2)
    if z2.is_empty:
        return True
    if z1.is_empty:
        return False
    return all(b <= a for a, b in zip(z1.entries, z2.entries))


def k_normalize(z: Zone, k: int) -> Zone:
    """
    Classical k-normalization followed by closure.

    The result is idempotent: closure only tightens, so normalizing the closed
    matrix again cannot loosen anything beyond the first normalization.
    """
    if z.is_empty:
        return z
    upper_limit = raw_bound(k, False)
    lower_limit = raw_bound(-k, True)
    m = _matrix(z.dim, z.entries)
    for i in range(z.dim):
        row = m[i]
        for j in range(z.dim):
            if i == j or row[j] >= INF:
                continue
            if row[j] > upper_limit:
                row[j] = INF
            elif row[j] < lower_limit:
                row[j] = lower_limit
    _close(m)
    return _zone(z.clocks, m)


def extend(z: Zone, name: str) -> Zone:
    """Add clock `name` as the last dimension, equal to the zero clock."""
    if name in z.clocks:
        raise ClockMismatch(f"clock {name!r} already present")
    clocks = z.clocks + (name,)
    if z.is_empty:
        return empty_zone(clocks)
    old = _matrix(z.dim, z.entries)
    dim = z.dim + 1
    m = [row + [row[0]] for row in old]
    m.append(list(old[0]) + [LE_ZERO])
    m[dim - 1][dim - 1] = LE_ZERO
    return _zone(clocks, m)


def project_out(z: Zone, name: str) -> Zone:
    x = z.index(name)
    clocks = z.clocks[:x - 1] + z.clocks[x:]
    if z.is_empty:
        return empty_zone(clocks)
    m = _matrix(z.dim, z.entries)
    kept = [i for i in range(z.dim) if i != x]
    return _zone(clocks, [[m[i][j] for j in kept] for i in kept])


# ----------------------------------------- Spans ----------------------------------------

def _span_from(lower_raw: int, upper_raw: int) -> Span:
    # entry (0, x) bounds 0 - x, so it carries the negated lower end
    lower = Bound.from_raw(lower_raw)
    upper = Bound.from_raw(upper_raw)
    return Span(-lower.value, lower.strict, upper.value, upper.strict)


def span_of_clock(z: Zone, clock: str) -> Span:
    _require(z)
    x = z.index(clock)
    return _span_from(z.raw(0, x), z.raw(x, 0))


def span_of_zone(z: Zone) -> Span:
    """Intersection of the per-clock spans; may be an empty interval."""
    _require(z)
    if not z.clocks:
        raise ValueError("span_of_zone needs at least one clock")
    lower = min(z.raw(0, x) for x in range(1, z.dim))
    upper = min(z.raw(x, 0) for x in range(1, z.dim))
    return _span_from(lower, upper)


def restrict(z: Zone, clock: str, span: Span) -> Zone:
    """Conjoin `clock` in `span`."""
    atoms = []
    if span.lo > 0 or span.lo_strict:
        atoms.append(AtomicConstraint(clock, Relation.GT if span.lo_strict else Relation.GE, span.lo))
    if span.up is not None:
        atoms.append(AtomicConstraint(clock, Relation.LT if span.up_strict else Relation.LE, span.up))
    return constrain(z, ClockConstraint(tuple(atoms)))


def member(u: Mapping[str, float], z: Zone) -> bool:
    if set(u) != set(z.clocks):
        raise ClockMismatch(f"valuation clocks {sorted(u)} do not match zone clocks {list(z.clocks)}")
    if z.is_empty:
        return False
    values = [0] + [u[c] for c in z.clocks]
    for i in range(z.dim):
        for j in range(z.dim):
            raw = z.raw(i, j)
            if raw >= INF:
                continue
            b = Bound.from_raw(raw)
            diff = values[i] - values[j]
            if diff > b.value or (b.strict and diff == b.value):
                return False
    return True


# --------------------------------------- Rendering --------------------------------------

def render_matrix(m: Union[DBM, Zone]) -> str:
    """Matrix table, zero clock first, then the clocks in declaration order."""
    if isinstance(m, Zone):
        if m.is_empty:
            return "empty"
        m = m.dbm
    names = ["0_C", *m.clocks]
    cells = [[""] + names]
    cells += [[names[i]] + [m.bound(i, j).render() for j in range(m.dim)] for i in range(m.dim)]
    width = max(len(c) for row in cells for c in row)
    return "\n".join(" | ".join(c.ljust(width) for c in row).rstrip() for row in cells)


def _atoms(z: Zone) -> List[Tuple[int, int]]:
    """Non-trivial canonical entries in rendering order: clock bounds, then differences."""
    atoms = []
    for x in range(1, z.dim):
        if z.raw(x, 0) < INF:
            atoms.append((x, 0))
        if z.raw(0, x) != LE_ZERO:
            atoms.append((0, x))
    for x in range(1, z.dim):
        for y in range(x + 1, z.dim):
            if z.raw(x, y) < INF:
                atoms.append((x, y))
            if z.raw(y, x) < INF:
                atoms.append((y, x))
    return atoms


def _implied(z: Zone, kept: List[Tuple[int, int]]) -> bool:
    m = _unconstrained(z.dim)
    for i, j in kept:
        m[i][j] = min(m[i][j], z.raw(i, j))
    _close(m)
    return _flatten(m) == z.entries


def _op(strict: bool, upper: bool) -> str:
    if upper:
        return "<" if strict else "<="
    return ">" if strict else ">="


def zone_to_string(z: Zone) -> str:
    """Conjunction of canonical constraints with redundant ones dropped greedily."""
    if z.is_empty:
        return "false"
    kept = _atoms(z)
    for candidate in reversed(list(kept)):
        rest = [a for a in kept if a != candidate]
        if _implied(z, rest):
            kept = rest
    kept_set = set(kept)
    names = ("0",) + z.clocks
    parts = []
    for x in range(1, z.dim):
        upper = z.bound(x, 0) if (x, 0) in kept_set else None
        lower = z.bound(0, x) if (0, x) in kept_set else None
        if upper and lower and not upper.strict and not lower.strict and upper.value == -lower.value:
            parts.append(f"{names[x]}=={upper.value}")
            continue
        if lower:
            parts.append(f"{names[x]}{_op(lower.strict, False)}{-lower.value}")
        if upper:
            parts.append(f"{names[x]}{_op(upper.strict, True)}{upper.value}")
    for x in range(1, z.dim):
        for y in range(x + 1, z.dim):
            upper = z.bound(x, y) if (x, y) in kept_set else None
            lower = z.bound(y, x) if (y, x) in kept_set else None
            diff = f"{names[x]}-{names[y]}"
            if upper and lower and not upper.strict and not lower.strict and upper.value == -lower.value:
                parts.append(f"{names[x]}=={names[y]}" if upper.value == 0 else f"{diff}=={upper.value}")
                continue
            if lower:
                parts.append(f"{diff}{_op(lower.strict, False)}{-lower.value}")
            if upper:
                parts.append(f"{diff}{_op(upper.strict, True)}{upper.value}")
    return " & ".join(parts) if parts else "true"
