"""Deterministic desk-scale corpus of finite groupoids."""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field

from .errors import BoundTooLarge
from .groupoid import FiniteGroupoid, disjoint_union, group_groupoid, pair_groupoid
from .groups import FiniteGroup, get_group, groups_up_to
from .transformation import GroupAction, TransformationGroupoid, all_actions, transformation_groupoid

log = logging.getLogger(__name__)

HARD_CAP = 10_000
UNION_GROUP_ORDER = 4


@dataclass(frozen=True)
class CorpusSpec:
    group_bound: int = 8
    space_bound: int = 4
    bundle_bound: int = 3
    pair_bound: int = 4
    samples: int = 100
    seed: int = 0xC57A

    def __post_init__(self):
        for name in ("group_bound", "space_bound", "bundle_bound", "pair_bound", "samples"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")


@dataclass(frozen=True, eq=False)
class Instance:
    id: str
    kind: str  # action | bundle | pair | union
    groupoid: FiniteGroupoid
    transformation: TransformationGroupoid | None = None

    @property
    def action(self) -> GroupAction | None:
        return self.transformation.action if self.transformation else None


def bundle(fibers: list[FiniteGroup]) -> FiniteGroupoid:
    parts = [group_groupoid(G.table, name=G.name) for G in fibers]
    return disjoint_union(*parts, name="bundle:" + ",".join(G.name for G in fibers))


def _union_atoms(spec: CorpusSpec) -> list[tuple[str, FiniteGroupoid]]:
    atoms = [(f"pair:{m}", pair_groupoid(m)) for m in range(2, spec.pair_bound + 1)]
    for G in groups_up_to(min(spec.group_bound, UNION_GROUP_ORDER)):
        if G.order > 1:
            atoms.append((f"group:{G.name}", group_groupoid(G.table, name=G.name)))
    return atoms


def estimate_size(spec: CorpusSpec) -> int:
    groups = groups_up_to(spec.group_bound)
    n_bundles = sum(
        _multisets(len(groups), p) for p in range(1, spec.bundle_bound + 1)
    )
    # actions are at least one per (group, size); bundles dominate the growth
    n_actions = len(groups) * spec.space_bound
    atoms = len(_union_atoms(spec)) if spec.pair_bound * spec.group_bound < 10_000 else 0
    return n_bundles + n_actions + spec.pair_bound + atoms * (atoms + 3) // 2


def _multisets(n: int, k: int) -> int:
    from math import comb

    return comb(n + k - 1, k)


def enumerate_corpus(spec: CorpusSpec = CorpusSpec()) -> list[Instance]:
    """Actions (up to relabelling), group bundles, pair groupoids and depth-2 disjoint unions.

    Overlaps are removed: a bundle with identical fibers over at most
    ``space_bound`` points is the trivial action, and pair:1 is the point.
    """
    if estimate_size(spec) > HARD_CAP:
        raise BoundTooLarge(f"corpus for {spec} would exceed {HARD_CAP} instances")
    groups = groups_up_to(spec.group_bound)
    out: list[Instance] = []

    for G in groups:
        for m in range(1, spec.space_bound + 1):
            for a in all_actions(G, m):
                t = transformation_groupoid(a)
                out.append(Instance(f"action/{a.name}", "action", t.groupoid, t))
                if len(out) > HARD_CAP:
                    raise BoundTooLarge(f"more than {HARD_CAP} instances")

    for p in range(1, spec.bundle_bound + 1):
        for fibers in itertools.combinations_with_replacement(groups, p):
            if len({G.name for G in fibers}) == 1 and p <= spec.space_bound:
                continue
            g = bundle(list(fibers))
            out.append(Instance(f"bundle/{','.join(G.name for G in fibers)}", "bundle", g))

    for m in range(2, spec.pair_bound + 1):
        out.append(Instance(f"pair/{m}", "pair", pair_groupoid(m)))

    atoms = _union_atoms(spec)
    point = ("point", pair_groupoid(1))
    for (na, a), (nb, b) in itertools.chain(
        ((x, point) for x in atoms), itertools.combinations_with_replacement(atoms, 2)
    ):
        out.append(Instance(f"union/{na}+{nb}", "union", disjoint_union(a, b, name=f"{na}+{nb}")))

    if len(out) > HARD_CAP:
        raise BoundTooLarge(f"{len(out)} instances exceed the cap of {HARD_CAP}")
    log.info("corpus: %d instances (%s)", len(out), spec)
    return out
