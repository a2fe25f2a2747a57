"""Finite groups as Cayley tables, plus a small built-in catalog.

Every group here keeps its identity at index 0.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import AxiomViolation


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    table: np.ndarray
    names: tuple[str, ...] = ()
    name: str = ""
    identity: int = 0

    def __post_init__(self):
        table = np.asarray(self.table, dtype=np.int64)
        table.setflags(write=False)
        object.__setattr__(self, "table", table)
        if not self.names:
            object.__setattr__(self, "names", tuple(str(i) for i in range(len(table))))
        _check_group(table, self.identity)

    @property
    def order(self) -> int:
        return len(self.table)

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    @property
    def inverses(self) -> np.ndarray:
        return np.argmax(self.table == self.identity, axis=1)

    def inv(self, a: int) -> int:
        return int(self.inverses[a])

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != self.identity:
            x = self.mul(x, a)
            k += 1
        return k

    def is_abelian(self) -> bool:
        return bool(np.all(self.table == self.table.T))

    def generators(self) -> list[int]:
        """A small generating set, chosen greedily by decreasing element order."""
        gens: list[int] = []
        span = {self.identity}
        for a in sorted(range(self.order), key=lambda x: (-self.element_order(x), x)):
            if a in span:
                continue
            gens.append(a)
            span = self.closure(gens)
            if len(span) == self.order:
                break
        return gens

    def closure(self, elements) -> set[int]:
        span = {self.identity}
        frontier = [self.identity]
        while frontier:
            x = frontier.pop()
            for a in elements:
                y = self.mul(x, a)
                if y not in span:
                    span.add(y)
                    frontier.append(y)
        return span

    def __repr__(self):
        return f"FiniteGroup({self.name or '?'}, order={self.order})"


def _check_group(table: np.ndarray, e: int) -> None:
    k = len(table)
    if table.shape != (k, k):
        raise AxiomViolation("Cayley table must be square")
    if k == 0:
        raise AxiomViolation("empty group")
    if table.min() < 0 or table.max() >= k:
        raise IndexError("Cayley table entry out of range")
    if np.any(table[e] != np.arange(k)) or np.any(table[:, e] != np.arange(k)):
        raise AxiomViolation("identity law fails", (e,))
    for a in range(k):
        if sorted(table[a]) != list(range(k)):
            raise AxiomViolation("row is not a permutation (no inverses)", (a,))
    lhs = table[table[:, :, None], np.arange(k)[None, None, :]]  # (ab)c
    rhs = table[np.arange(k)[:, None, None], table[None, :, :]]  # a(bc)
    bad = np.argwhere(lhs != rhs)
    if len(bad):
        raise AxiomViolation("associativity fails", tuple(int(x) for x in bad[0]))


def compose_perm(p: tuple[int, ...], q: tuple[int, ...]) -> tuple[int, ...]:
    """(p∘q)(x) = p(q(x))."""
    return tuple(p[x] for x in q)


def from_permutations(gens, name: str = "") -> FiniteGroup:
    """The permutation group generated by ``gens`` (tuples), identity first."""
    gens = [tuple(g) for g in gens]
    degree = len(gens[0]) if gens else 1
    ident = tuple(range(degree))
    elems = [ident]
    seen = {ident: 0}
    i = 0
    while i < len(elems):
        for g in gens:
            h = compose_perm(elems[i], g)
            if h not in seen:
                seen[h] = len(elems)
                elems.append(h)
        i += 1
    table = [[seen[compose_perm(a, b)] for b in elems] for a in elems]
    return FiniteGroup(np.array(table), names=tuple(str(p) for p in elems), name=name)


def cyclic(n: int) -> FiniteGroup:
    table = (np.arange(n)[:, None] + np.arange(n)[None, :]) % n
    return FiniteGroup(table, names=tuple(f"g^{i}" for i in range(n)), name=f"Z{n}")


def direct_product(g: FiniteGroup, h: FiniteGroup, name: str = "") -> FiniteGroup:
    pairs = list(itertools.product(range(g.order), range(h.order)))
    idx = {p: i for i, p in enumerate(pairs)}
    table = [[idx[(g.mul(a, c), h.mul(b, d))] for (c, d) in pairs] for (a, b) in pairs]
    names = tuple(f"({g.names[a]},{h.names[b]})" for a, b in pairs)
    return FiniteGroup(np.array(table), names=names, name=name or f"{g.name}x{h.name}")


def dihedral(n: int) -> FiniteGroup:
    """Symmetries of the n-gon, order 2n."""
    rot = tuple((i + 1) % n for i in range(n))
    ref = tuple((-i) % n for i in range(n))
    return from_permutations([rot, ref], name=f"D{n}")


def symmetric(n: int) -> FiniteGroup:
    if n == 1:
        return from_permutations([(0,)], name="S1")
    gens = [tuple([1, 0] + list(range(2, n))), tuple(list(range(1, n)) + [0])]
    return from_permutations(gens, name=f"S{n}")


def klein_four() -> FiniteGroup:
    return from_permutations([(1, 0, 3, 2), (2, 3, 0, 1)], name="V4")


def quaternion() -> FiniteGroup:
    # left regular action of Q8 written on ±1, ±i, ±j, ±k = 0..7
    i = (2, 3, 1, 0, 7, 6, 4, 5)
    j = (4, 5, 6, 7, 1, 0, 3, 2)
    return from_permutations([i, j], name="Q8")


def _catalog() -> dict[str, FiniteGroup]:
    z2 = cyclic(2)
    groups = {f"Z{n}": cyclic(n) for n in range(1, 9)}
    groups.update(
        V4=klein_four(),
        S3=symmetric(3),
        D4=dihedral(4),
        Q8=quaternion(),
        Z2xZ4=direct_product(z2, cyclic(4), name="Z2xZ4"),
        Z2xZ2xZ2=direct_product(z2, direct_product(z2, z2), name="Z2xZ2xZ2"),
        D5=dihedral(5),
        D6=dihedral(6),
        A4=from_permutations([(1, 2, 0, 3), (1, 0, 3, 2)], name="A4"),
        S4=symmetric(4),
    )
    groups["Z2xZ2"] = groups["V4"]
    groups["D3"] = groups["S3"]
    groups["D2"] = groups["V4"]
    groups["S2"] = groups["Z2"]
    groups["S1"] = groups["Z1"]
    return groups


_CATALOG: dict[str, FiniteGroup] | None = None


def get_group(name: str) -> FiniteGroup:
    """Look up a catalog group by name (``Z<n>`` works for any n)."""
    global _CATALOG
    if _CATALOG is None:
        _CATALOG = _catalog()
    if name in _CATALOG:
        return _CATALOG[name]
    if name.startswith("Z") and name[1:].isdigit():
        return cyclic(int(name[1:]))
    if name.startswith("D") and name[1:].isdigit():
        return dihedral(int(name[1:]))
    if name.startswith("S") and name[1:].isdigit():
        return symmetric(int(name[1:]))
    raise KeyError(f"unknown group preset {name!r}")


def groups_up_to(order: int) -> list[FiniteGroup]:
    """One representative per isomorphism class available in the catalog, by order then name."""
    get_group("Z1")
    names = [
        "Z1", "Z2", "Z3", "Z4", "V4", "Z5", "Z6", "S3", "Z7",
        "Z8", "Z2xZ4", "Z2xZ2xZ2", "D4", "Q8",
    ]
    out = [get_group(nm) for nm in names]
    extra = [get_group(f"Z{n}") for n in range(9, order + 1)]
    extra += [get_group(f"D{n}") for n in range(5, order // 2 + 1)]
    if order >= 12:
        extra.append(get_group("A4"))
    if order >= 24:
        extra.append(get_group("S4"))
    out += extra
    return sorted((g for g in out if g.order <= order), key=lambda g: (g.order, g.name))
