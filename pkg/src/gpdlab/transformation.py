"""Finite group actions, transformation groupoids G×Q and the crossed-product dictionary."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import AxiomViolation
from .groupoid import FiniteGroupoid, build_groupoid
from .groups import FiniteGroup


@dataclass(frozen=True, eq=False)
class GroupAction:
    group: FiniteGroup
    act: np.ndarray  # act[g, q] = g·q
    name: str = ""

    def __post_init__(self):
        act = np.asarray(self.act, dtype=np.int64)
        act.setflags(write=False)
        object.__setattr__(self, "act", act)
        G = self.group
        if act.ndim != 2 or act.shape[0] != G.order:
            raise AxiomViolation(f"action table must have one row per group element ({G.order})")
        m = act.shape[1]
        if m == 0:
            raise AxiomViolation("empty space")
        if act.min() < 0 or act.max() >= m:
            raise IndexError("action image outside the space")
        if np.any(act[G.identity] != np.arange(m)):
            raise AxiomViolation("identity does not act trivially")
        for a in range(G.order):
            for b in range(G.order):
                if np.any(act[a][act[b]] != act[G.mul(a, b)]):
                    raise AxiomViolation("g·(h·q) = (gh)·q fails", (a, b))

    @property
    def space(self) -> int:
        return self.act.shape[1]

    def __repr__(self):
        return f"GroupAction({self.name or self.group.name}, |Q|={self.space})"


def trivial_action(group: FiniteGroup, m: int) -> GroupAction:
    return GroupAction(group, np.tile(np.arange(m), (group.order, 1)), name=f"{group.name}~triv/{m}")


def action_from_homomorphism(group: FiniteGroup, images: dict[int, tuple[int, ...]], m: int, name=""):
    """Extend generator images in Sym(m) to an action, or return None if they define no homomorphism."""
    gens = sorted(images)
    ident = tuple(range(m))
    rows: dict[int, tuple[int, ...]] = {group.identity: ident}
    frontier = [group.identity]
    while frontier:
        g = frontier.pop()
        for x in gens:
            h = group.mul(g, x)
            img = tuple(rows[g][i] for i in images[x])  # φ(gx) = φ(g)∘φ(x)
            if h in rows:
                if rows[h] != img:
                    return None
            else:
                rows[h] = img
                frontier.append(h)
    if len(rows) != group.order:
        return None
    # edge consistency over the whole Cayley graph makes φ multiplicative
    return GroupAction(group, np.array([rows[g] for g in range(group.order)]), name=name)


def all_actions(group: FiniteGroup, m: int) -> list[GroupAction]:
    """All actions on {0..m-1} up to relabelling of the points, in canonical order."""
    gens = group.generators()
    perms = list(itertools.permutations(range(m)))
    seen: dict[tuple, GroupAction] = {}
    for imgs in itertools.product(perms, repeat=len(gens)):
        a = action_from_homomorphism(group, dict(zip(gens, imgs)), m)
        if a is None:
            continue
        key = _canonical_key(a.act, perms)
        if key not in seen:
            seen[key] = a
    out = []
    for k, key in enumerate(sorted(seen)):
        act = np.array(key, dtype=np.int64).reshape(group.order, m)
        out.append(GroupAction(group, act, name=f"{group.name}~{m}.{k}"))
    return out


def _canonical_key(act: np.ndarray, perms) -> tuple:
    best = None
    for sigma in perms:
        sigma = np.array(sigma)
        relabel = np.empty_like(act)
        relabel[:, sigma] = sigma[act]  # σ(g·σ⁻¹(q))
        key = tuple(relabel.ravel().tolist())
        if best is None or key < best:
            best = key
    return best


def orbit_count(a: GroupAction) -> int:
    seen, count = set(), 0
    for q in range(a.space):
        if q not in seen:
            seen.update(int(x) for x in a.act[:, q])
            count += 1
    return count


# -- transformation groupoid -------------------------------------------------------


@dataclass(frozen=True, eq=False)
class TransformationGroupoid:
    groupoid: FiniteGroupoid
    action: GroupAction
    pairs: tuple[tuple[int, int], ...]  # element id -> (g, q)

    @cached_property
    def index(self) -> dict[tuple[int, int], int]:
        return {p: i for i, p in enumerate(self.pairs)}

    def id_of(self, g: int, q: int) -> int:
        return self.index[(g, q)]


def transformation_groupoid(a: GroupAction) -> TransformationGroupoid:
    """G×Q with s(g,q) = q, r(g,q) = gq and (g₁, g₂q)(g₂, q) = (g₁g₂, q)."""
    G, m, e = a.group, a.space, a.group.identity
    pairs = [(e, q) for q in range(m)]
    pairs += [(g, q) for g in range(G.order) if g != e for q in range(m)]
    idx = {p: i for i, p in enumerate(pairs)}
    r = [idx[(e, int(a.act[g, q]))] for g, q in pairs]
    s = [idx[(e, q)] for _, q in pairs]
    inv = [idx[(G.inv(g), int(a.act[g, q]))] for g, q in pairs]
    mul = []
    for g2, q in pairs:
        q1 = int(a.act[g2, q])
        for g1 in range(G.order):
            mul.append((idx[(g1, q1)], idx[(g2, q)], idx[(G.mul(g1, g2), q)]))
    labels = [(G.names[g], q) for g, q in pairs]
    gpd = build_groupoid(len(pairs), range(m), r, s, inv, mul, labels=labels,
                         name=f"{a.name or G.name}⋉{m}")
    return TransformationGroupoid(gpd, a, tuple(pairs))


def fixed_point_set(a: GroupAction, g: int) -> frozenset[int]:
    return frozenset(int(q) for q in np.flatnonzero(a.act[g] == np.arange(a.space)))


def stabilizer(a: GroupAction, q: int) -> list[int]:
    return [int(g) for g in np.flatnonzero(a.act[:, q] == q)]


def set_stabilizer(a: GroupAction, V) -> list[int]:
    V = sorted(V)
    return [int(g) for g in range(a.group.order) if np.all(a.act[g, V] == V)]


def interior_stabilizer(a: GroupAction, q: int) -> list[int]:
    """Union of the set stabilizers G_V over open V ∋ q (every subset is open here)."""
    others = [p for p in range(a.space) if p != q]
    out: set[int] = set()
    for k in range(len(others) + 1):
        for rest in itertools.combinations(others, k):
            out.update(set_stabilizer(a, (q, *rest)))
    return sorted(out)


def interior_isotropy_subalgebra_support(a: GroupAction) -> list[tuple[int, frozenset[int]]]:
    """Pairs (g, Int(Q^g)) with nonempty support: the summands of the subalgebra Σ C(Int Q^g)u_g."""
    out = []
    for g in range(a.group.order):
        fixed = fixed_point_set(a, g)
        if fixed:
            out.append((g, fixed))
    return out


# -- Υ and the crossed-product *-algebra C(Q)[G] ----------------------------------


def upsilon(t: TransformationGroupoid, f: np.ndarray) -> np.ndarray:
    """Coefficient table a[g, q] = f(g, g⁻¹q)."""
    a = t.action
    G = a.group
    f = np.asarray(f)
    out = np.zeros(f.shape[:-1] + (G.order, a.space), dtype=complex)
    for g in range(G.order):
        ginv = G.inv(g)
        for q in range(a.space):
            out[..., g, q] = f[..., t.id_of(g, int(a.act[ginv, q]))]
    return out


def upsilon_inverse(t: TransformationGroupoid, table: np.ndarray) -> np.ndarray:
    a = t.action
    table = np.asarray(table)
    out = np.zeros(table.shape[:-2] + (t.groupoid.n,), dtype=complex)
    for i, (g, q) in enumerate(t.pairs):
        out[..., i] = table[..., g, int(a.act[g, q])]
    return out


def crossed_product_multiply(a: GroupAction, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """(x×y)_g(q) = Σ_{g₁g₂=g} x_{g₁}(q) y_{g₂}(g₁⁻¹q)."""
    G = a.group
    out = np.zeros(np.broadcast_shapes(x.shape, y.shape), dtype=complex)
    for g1 in range(G.order):
        back = a.act[G.inv(g1)]
        for g2 in range(G.order):
            out[..., G.mul(g1, g2), :] += x[..., g1, :] * y[..., g2, back]
    return out


def crossed_product_involution(a: GroupAction, x: np.ndarray) -> np.ndarray:
    """(x*)_g(q) = conj(x_{g⁻¹}(g⁻¹q))."""
    G = a.group
    out = np.zeros_like(x, dtype=complex)
    for g in range(G.order):
        ginv = G.inv(g)
        out[..., g, :] = np.conj(x[..., ginv, a.act[ginv]])
    return out
