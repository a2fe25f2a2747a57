"""Finite groupoids given by multiplication tables.

A finite Hausdorff space is discrete, so every finite groupoid is étale and
"open", "dense" and "interior" reduce to their set-theoretic versions: the
interior of the isotropy is the isotropy itself and a dense set of units is
all of them.

Elements are identified with ``0..n-1``; that order is the canonical order
used for sorting every set-valued output.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Hashable, Iterable, Sequence

import numpy as np

from .errors import AxiomViolation, NotComposable, NotSubgroupoid

NONE = -1  # marks a non-composable pair in ``mul``


@dataclass(frozen=True, eq=False)
class FiniteGroupoid:
    n: int
    units: tuple[int, ...]
    r: np.ndarray
    s: np.ndarray
    inv: np.ndarray
    mul: np.ndarray  # (n, n), NONE where s(a) != r(b)
    labels: tuple[Hashable, ...] = ()
    name: str = ""
    parent_ids: tuple[int, ...] | None = None  # set by restrict_to_open_subgroupoid

    def __post_init__(self):
        for arr in (self.r, self.s, self.inv, self.mul):
            arr.setflags(write=False)
        if not self.labels:
            object.__setattr__(self, "labels", tuple(range(self.n)))

    def __repr__(self):
        return f"FiniteGroupoid({self.name or '?'}, n={self.n}, units={len(self.units)})"

    @property
    def is_unit(self) -> np.ndarray:
        mask = np.zeros(self.n, dtype=bool)
        mask[list(self.units)] = True
        return mask

    @cached_property
    def composable_pairs(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Arrays ``(a, b, ab)`` over all composable pairs."""
        a, b = np.nonzero(self.mul != NONE)
        return a, b, self.mul[a, b]

    @cached_property
    def is_group_bundle(self) -> bool:
        return bool(np.all(self.r == self.s))

    def source_fiber(self, u: int) -> np.ndarray:
        """Sorted ids of 𝒢u = s⁻¹(u)."""
        return np.flatnonzero(self.s == u)

    def range_fiber(self, u: int) -> np.ndarray:
        return np.flatnonzero(self.r == u)

    def isotropy_group(self, u: int) -> np.ndarray:
        return np.flatnonzero((self.s == u) & (self.r == u))


def build_groupoid(
    n: int,
    units: Iterable[int],
    r: Sequence[int],
    s: Sequence[int],
    inv: Sequence[int],
    mul: Iterable[Sequence[int]] | np.ndarray,
    *,
    labels: Sequence[Hashable] = (),
    name: str = "",
) -> FiniteGroupoid:
    """Validate raw tables and return a groupoid.

    ``mul`` is either an ``(n, n)`` array with ``-1`` for non-composable pairs or
    an iterable of ``(a, b, ab)`` triples. Every axiom is checked exhaustively.
    """
    units = tuple(sorted(int(u) for u in units))
    r = np.asarray(r, dtype=np.int64)
    s = np.asarray(s, dtype=np.int64)
    inv = np.asarray(inv, dtype=np.int64)
    for nm, arr in (("r", r), ("s", s), ("inv", inv)):
        if arr.shape != (n,):
            raise IndexError(f"{nm} must have length {n}, got shape {arr.shape}")
        if n and (arr.min() < 0 or arr.max() >= n):
            raise IndexError(f"{nm} contains an id outside 0..{n - 1}")
    for u in units:
        if not 0 <= u < n:
            raise IndexError(f"unit id {u} outside 0..{n - 1}")
    if len(set(units)) != len(units):
        raise AxiomViolation("duplicate unit id")

    if isinstance(mul, np.ndarray) and mul.ndim == 2:
        table = np.array(mul, dtype=np.int64)
        if table.shape != (n, n):
            raise IndexError(f"mul table must be {n}x{n}")
    else:
        table = np.full((n, n), NONE, dtype=np.int64)
        for trip in mul:
            a, b, c = (int(x) for x in trip)
            for x in (a, b, c):
                if not 0 <= x < n:
                    raise IndexError(f"mul entry {trip} has id outside 0..{n - 1}")
            if table[a, b] != NONE and table[a, b] != c:
                raise AxiomViolation("conflicting products", (a, b))
            table[a, b] = c
    if n and (table.min() < NONE or table.max() >= n):
        raise IndexError("mul table contains an id out of range")

    g = FiniteGroupoid(n, units, r, s, inv, table, labels=tuple(labels), name=name)
    _validate(g)
    return g


def _validate(g: FiniteGroupoid) -> None:
    n, r, s, inv, mul = g.n, g.r, g.s, g.inv, g.mul
    is_unit = g.is_unit
    for u in g.units:
        if r[u] != u or s[u] != u:
            raise AxiomViolation("unit not fixed by r and s", (u,))
    for x in range(n):
        if not is_unit[r[x]] or not is_unit[s[x]]:
            raise AxiomViolation("r or s does not land in the unit space", (x,))

    # composability is exactly s(a) == r(b)
    should = s[:, None] == r[None, :]
    defined = mul != NONE
    bad = np.argwhere(should != defined)
    if len(bad):
        a, b = bad[0]
        raise AxiomViolation("product defined iff s(a) = r(b) fails", (int(a), int(b)))

    a, b = np.nonzero(defined)
    c = mul[a, b]
    bad = np.flatnonzero((r[c] != r[a]) | (s[c] != s[b]))
    if len(bad):
        i = bad[0]
        raise AxiomViolation("r(ab) = r(a), s(ab) = s(b) fails", (int(a[i]), int(b[i])))

    for x in range(n):
        if mul[r[x], x] != x or mul[x, s[x]] != x:
            raise AxiomViolation("unit law fails", (x,))

    if np.any(inv[inv] != np.arange(n)):
        x = int(np.flatnonzero(inv[inv] != np.arange(n))[0])
        raise AxiomViolation("inversion is not involutive", (x,))
    for x in range(n):
        if r[inv[x]] != s[x]:
            raise AxiomViolation("r(x⁻¹) = s(x) fails", (x,))
        if mul[x, inv[x]] != r[x] or mul[inv[x], x] != s[x]:
            raise AxiomViolation("x·x⁻¹ = r(x), x⁻¹·x = s(x) fails", (x,))

    # associativity over all composable triples: (ab)c = a(bc)
    for x, y in zip(a, b):
        xy = mul[x, y]
        zs = np.flatnonzero(mul[y] != NONE)
        if len(zs) == 0:
            continue
        lhs = mul[xy, zs]
        rhs = mul[x, mul[y, zs]]
        wrong = np.flatnonzero(lhs != rhs)
        if len(wrong):
            raise AxiomViolation("associativity fails", (int(x), int(y), int(zs[wrong[0]])))


def compose(g: FiniteGroupoid, a: int, b: int) -> int:
    c = g.mul[a, b]
    if c == NONE:
        raise NotComposable(f"s({g.labels[a]}) != r({g.labels[b]})")
    return int(c)


# -- presets -------------------------------------------------------------------


def pair_groupoid(m: int) -> FiniteGroupoid:
    """The pair groupoid on ``m`` points: arrows (i, j) with (i, j)(j, k) = (i, k)."""
    pairs = [(i, i) for i in range(m)] + [(i, j) for i in range(m) for j in range(m) if i != j]
    idx = {p: k for k, p in enumerate(pairs)}
    r = [i for i, _ in pairs]
    s = [j for _, j in pairs]
    inv = [idx[(j, i)] for i, j in pairs]
    mul = [(idx[(i, j)], idx[(j, k)], idx[(i, k)]) for (i, j) in pairs for k in range(m)]
    return build_groupoid(len(pairs), range(m), r, s, inv, mul, labels=pairs, name=f"pair:{m}")


def group_groupoid(table, names: Sequence[Hashable] = (), name: str = "") -> FiniteGroupoid:
    """A group (Cayley table with identity at index 0) as a one-unit groupoid."""
    table = np.asarray(table, dtype=np.int64)
    k = len(table)
    inv = [int(np.flatnonzero(table[x] == 0)[0]) for x in range(k)]
    zeros = [0] * k
    return build_groupoid(k, [0], zeros, zeros, inv, table, labels=tuple(names), name=name)


def disjoint_union(*parts: FiniteGroupoid, name: str = "") -> FiniteGroupoid:
    """Disjoint union, relabelled so all units come first (in part order)."""
    old = [(p, x) for p, g in enumerate(parts) for x in range(g.n)]
    order = sorted(range(len(old)), key=lambda k: (not parts[old[k][0]].is_unit[old[k][1]], k))
    new_of = {old[k]: i for i, k in enumerate(order)}
    n = len(old)
    r = np.empty(n, dtype=np.int64)
    s = np.empty(n, dtype=np.int64)
    inv = np.empty(n, dtype=np.int64)
    mul = np.full((n, n), NONE, dtype=np.int64)
    labels = []
    for i, k in enumerate(order):
        p, x = old[k]
        g = parts[p]
        r[i] = new_of[(p, int(g.r[x]))]
        s[i] = new_of[(p, int(g.s[x]))]
        inv[i] = new_of[(p, int(g.inv[x]))]
        labels.append((p, g.labels[x]))
    for p, g in enumerate(parts):
        a, b, c = g.composable_pairs
        for x, y, z in zip(a, b, c):
            mul[new_of[(p, int(x))], new_of[(p, int(y))]] = new_of[(p, int(z))]
    units = [new_of[(p, u)] for p, g in enumerate(parts) for u in g.units]
    name = name or " + ".join(g.name or "?" for g in parts)
    return build_groupoid(n, units, r, s, inv, mul, labels=labels, name=name)


# -- orbits and isotropy ---------------------------------------------------------


@dataclass(frozen=True)
class OrbitPartition:
    orbit_of: dict[int, int]  # unit -> orbit index, orbits numbered by least unit
    count: int

    def orbit(self, k: int) -> list[int]:
        return sorted(u for u, o in self.orbit_of.items() if o == k)


def invariant_closure(g: FiniteGroupoid, units: Iterable[int]) -> frozenset[int]:
    """Least superset of ``units`` closed under X ↦ X ∪ r(s⁻¹(X))."""
    closed = set(int(u) for u in units)
    frontier = list(closed)
    while frontier:
        u = frontier.pop()
        for v in g.r[g.s == u]:
            v = int(v)
            if v not in closed:
                closed.add(v)
                frontier.append(v)
    return frozenset(closed)


def orbits(g: FiniteGroupoid) -> OrbitPartition:
    orbit_of: dict[int, int] = {}
    count = 0
    for u in g.units:
        if u in orbit_of:
            continue
        for v in invariant_closure(g, [u]):
            orbit_of[v] = count
        count += 1
    return OrbitPartition(dict(sorted(orbit_of.items())), count)


def is_minimal(g: FiniteGroupoid) -> bool:
    return orbits(g).count == 1


@dataclass(frozen=True)
class IsotropyData:
    groups: dict[int, tuple[int, ...]]  # unit -> element ids of u𝒢u
    tables: dict[int, np.ndarray]  # unit -> Cayley table on positions within groups[u]
    is_group_bundle: bool

    def order(self, u: int) -> int:
        return len(self.groups[u])


def isotropy(g: FiniteGroupoid) -> IsotropyData:
    groups, tables = {}, {}
    for u in g.units:
        ids = g.isotropy_group(u)
        pos = {int(x): i for i, x in enumerate(ids)}
        tables[u] = np.array([[pos[int(g.mul[x, y])] for y in ids] for x in ids], dtype=np.int64)
        groups[u] = tuple(int(x) for x in ids)
    return IsotropyData(groups, tables, g.is_group_bundle)


def is_topologically_principal(g: FiniteGroupoid) -> bool:
    return all(len(g.isotropy_group(u)) == 1 for u in g.units)


def isotropy_ids(g: FiniteGroupoid) -> list[int]:
    return [int(x) for x in np.flatnonzero(g.r == g.s)]


def restrict_to_open_subgroupoid(g: FiniteGroupoid, ids: Iterable[int]) -> FiniteGroupoid:
    """Restrict the tables to a subgroupoid; singletons are open, so any subgroupoid is open.

    The result lists the units first; ``parent_ids`` maps its ids back into ``g``.
    """
    sub = sorted(set(int(x) for x in ids))
    members = set(sub)
    for x in sub:
        if not 0 <= x < g.n:
            raise IndexError(f"element id {x} outside 0..{g.n - 1}")
        if int(g.inv[x]) not in members:
            raise NotSubgroupoid(f"missing inverse of {g.labels[x]}")
        for u in (int(g.r[x]), int(g.s[x])):
            if u not in members:
                raise NotSubgroupoid(f"missing unit {g.labels[u]} of {g.labels[x]}")
    for x in sub:
        for y in sub:
            z = g.mul[x, y]
            if z != NONE and int(z) not in members:
                raise NotSubgroupoid(f"not closed under product: {g.labels[x]}·{g.labels[y]}")
    is_unit = g.is_unit
    sub.sort(key=lambda x: (not is_unit[x], x))
    new = {x: i for i, x in enumerate(sub)}
    r = [new[int(g.r[x])] for x in sub]
    s = [new[int(g.s[x])] for x in sub]
    inv = [new[int(g.inv[x])] for x in sub]
    mul = [
        (new[x], new[y], new[int(g.mul[x, y])])
        for x in sub
        for y in sub
        if g.mul[x, y] != NONE
    ]
    units = [new[x] for x in sub if is_unit[x]]
    out = build_groupoid(
        len(sub), units, r, s, inv, mul,
        labels=[g.labels[x] for x in sub], name=f"{g.name}|sub",
    )
    object.__setattr__(out, "parent_ids", tuple(sub))
    return out


def interior_isotropy(g: FiniteGroupoid) -> FiniteGroupoid:
    """IntIso(𝒢); equal to Iso(𝒢) because the topology is discrete."""
    out = restrict_to_open_subgroupoid(g, isotropy_ids(g))
    object.__setattr__(out, "name", f"IntIso({g.name})")
    return out


def generated_subgroupoid(g: FiniteGroupoid, seeds: Iterable[int]) -> list[int]:
    """Least subgroupoid containing ``seeds`` (sorted ids)."""
    members = set()
    todo = list(int(x) for x in seeds)
    while todo:
        x = todo.pop()
        if x in members:
            continue
        members.add(x)
        todo.extend(int(y) for y in (g.inv[x], g.r[x], g.s[x]) if int(y) not in members)
        for y in list(members):
            for z in (g.mul[x, y], g.mul[y, x]):
                if z != NONE and int(z) not in members:
                    todo.append(int(z))
    return sorted(members)
