import numpy as np
import pytest
from hypothesis import given

from conftest import groupoid_names, label_index, small, swap_action
from gpdlab.errors import AxiomViolation, NotComposable, NotSubgroupoid
from gpdlab.groupoid import (
    NONE,
    build_groupoid,
    compose,
    disjoint_union,
    interior_isotropy,
    invariant_closure,
    is_minimal,
    is_topologically_principal,
    isotropy,
    isotropy_ids,
    orbits,
    pair_groupoid,
    restrict_to_open_subgroupoid,
)
from gpdlab.groups import get_group
from gpdlab.transformation import transformation_groupoid, trivial_action


def raw_tables(g):
    return dict(n=g.n, units=list(g.units), r=g.r.tolist(), s=g.s.tolist(), inv=g.inv.tolist(),
                mul=g.mul.copy())


def test_pair_groupoid_on_two_units():
    g = pair_groupoid(2)
    assert g.n == 4 and len(g.units) == 2


def test_z2_as_one_unit_groupoid():
    g = small("Z2")
    assert g.n == 2 and g.units == (0,)


def test_corrupted_mul_entry_raises_axiom_violation():
    g = pair_groupoid(3)
    t = raw_tables(g)
    L = label_index(g)
    a, b = L[(0, 1)], L[(1, 2)]
    t["mul"][a, b] = L[(0, 1)]  # should be (0, 2)
    with pytest.raises(AxiomViolation) as err:
        build_groupoid(**t)
    assert err.value.where is not None


def test_out_of_range_ids_raise_index_error():
    g = pair_groupoid(2)
    t = raw_tables(g)
    t["inv"][0] = 7
    with pytest.raises(IndexError):
        build_groupoid(**t)


def test_triples_and_table_agree():
    g = pair_groupoid(3)
    a, b, c = g.composable_pairs
    h = build_groupoid(g.n, g.units, g.r, g.s, g.inv, zip(a, b, c))
    assert np.array_equal(h.mul, g.mul)


def test_compose_in_pair_groupoid():
    g = pair_groupoid(3)
    L = label_index(g)
    assert compose(g, L[(0, 1)], L[(1, 2)]) == L[(0, 2)]
    assert compose(g, L[(1, 1)], L[(1, 1)]) == L[(1, 1)]
    with pytest.raises(NotComposable):
        compose(g, L[(0, 1)], L[(0, 2)])


def test_invariant_closure():
    g = pair_groupoid(3)
    assert invariant_closure(g, [0]) == {0, 1, 2}
    assert invariant_closure(g, []) == frozenset()
    two = disjoint_union(pair_groupoid(1), pair_groupoid(1))
    assert invariant_closure(two, [0]) == {0}


def test_minimality():
    assert all(is_minimal(pair_groupoid(m)) for m in range(1, 5))
    assert not is_minimal(disjoint_union(pair_groupoid(1), pair_groupoid(1)))
    assert is_minimal(small("swap"))
    assert orbits(small("pair2+point")).count == 2


def test_interior_isotropy():
    assert interior_isotropy(pair_groupoid(3)).n == 3
    b = small("bundle Z2,Z3")
    assert interior_isotropy(b).n == b.n
    t = transformation_groupoid(trivial_action(get_group("Z2"), 2))
    iso = interior_isotropy(t.groupoid)
    assert iso.n == 4 and iso.is_group_bundle
    assert [isotropy(iso).order(u) for u in iso.units] == [2, 2]


def test_topological_principality():
    assert is_topologically_principal(pair_groupoid(3))
    assert not is_topologically_principal(disjoint_union(pair_groupoid(2), small("Z2")))
    assert is_topologically_principal(small("swap"))


def test_restrict_to_open_subgroupoid():
    g = small("pair2+Z2")
    units = restrict_to_open_subgroupoid(g, g.units)
    assert units.n == len(g.units) and all(units.is_unit)
    assert restrict_to_open_subgroupoid(g, isotropy_ids(g)).is_group_bundle
    L = label_index(g)
    with pytest.raises(NotSubgroupoid):
        restrict_to_open_subgroupoid(g, list(g.units) + [L[(0, (0, 1))]])


@given(groupoid_names)
def test_structural_identities(name):
    g = small(name)
    assert np.array_equal(g.inv[g.inv], np.arange(g.n))
    assert np.array_equal(g.r[g.inv], g.s)
    a, b, c = g.composable_pairs
    assert np.all(g.s[a] == g.r[b]) and np.all(g.r[c] == g.r[a]) and np.all(g.s[c] == g.s[b])
    # arrows with r = s are exactly the isotropy
    assert sorted(isotropy_ids(g)) == sorted(np.flatnonzero(g.r == g.s).tolist())
    # orbit sizes × isotropy orders: |𝒢| = Σ_orbits |orbit|² · |isotropy|
    part = orbits(g)
    total = sum(len(part.orbit(k)) ** 2 * len(g.isotropy_group(part.orbit(k)[0])) for k in range(part.count))
    assert total == g.n
    assert np.all((g.mul == NONE) == (g.s[:, None] != g.r[None, :]))
