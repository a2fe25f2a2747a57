import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import label_index, swap_action
from gpdlab.algebra import StarAlgebra
from gpdlab.errors import AxiomViolation
from gpdlab.groupoid import is_minimal, is_topologically_principal, isotropy
from gpdlab.groups import get_group, groups_up_to
from gpdlab.spectral import block_decomposition
from gpdlab.transformation import (
    GroupAction,
    action_from_homomorphism,
    all_actions,
    crossed_product_involution,
    crossed_product_multiply,
    fixed_point_set,
    interior_isotropy_subalgebra_support,
    interior_stabilizer,
    orbit_count,
    stabilizer,
    transformation_groupoid,
    trivial_action,
    upsilon,
    upsilon_inverse,
)


def z4_through_swap():
    G = get_group("Z4")
    gen = next(x for x in range(4) if G.element_order(x) == 4)
    return action_from_homomorphism(G, {gen: (1, 0)}, 2), gen


def test_swap_transformation_groupoid_is_m2():
    g = transformation_groupoid(swap_action()).groupoid
    assert g.n == 4 and is_minimal(g) and is_topologically_principal(g)
    assert block_decomposition(StarAlgebra(g)).dims == (2,)


def test_trivial_group_gives_trivial_groupoid():
    g = transformation_groupoid(trivial_action(get_group("Z1"), 3)).groupoid
    assert g.n == 3 and all(g.is_unit)


def test_z2_on_point_is_z2():
    g = transformation_groupoid(trivial_action(get_group("Z2"), 1)).groupoid
    assert g.n == 2 and len(g.units) == 1 and g.is_group_bundle


def test_fixed_points_and_stabilizers():
    a = swap_action()
    assert fixed_point_set(a, 1) == frozenset()
    t = trivial_action(get_group("S3"), 3)
    assert all(stabilizer(t, q) == list(range(6)) for q in range(3))


def test_z4_through_swap_stabilizers():
    a, gen = z4_through_swap()
    G = a.group
    sq = G.mul(gen, gen)
    for q in range(2):
        assert stabilizer(a, q) == sorted({G.identity, sq})
        # discrete space: the interior stabilizer is the stabilizer
        assert interior_stabilizer(a, q) == stabilizer(a, q)


def test_bad_action_rejected():
    with pytest.raises(AxiomViolation):
        GroupAction(get_group("Z3"), np.array([[0, 1], [1, 0], [0, 1]]))
    # an order-3 generator cannot act as a transposition
    assert action_from_homomorphism(get_group("Z3"), {1: (1, 0)}, 2) is None


# number of G-sets of size m up to isomorphism, counted by hand from transitive types
@pytest.mark.parametrize("name, m, count", [
    ("Z1", 3, 1), ("Z2", 3, 2), ("Z2", 4, 3), ("Z3", 3, 2), ("Z4", 4, 4),
    ("V4", 2, 4), ("V4", 4, 11), ("S3", 3, 3), ("S3", 4, 4), ("Z6", 3, 3),
])
def test_action_counts(name, m, count):
    acts = all_actions(get_group(name), m)
    assert len(acts) == count
    assert len({a.name for a in acts}) == count


def test_upsilon_on_deltas():
    t = transformation_groupoid(swap_action())
    G = t.action.group
    for (g, q), i in t.index.items():
        f = np.zeros(t.groupoid.n)
        f[i] = 1
        a = upsilon(t, f)
        expect = np.zeros((G.order, 2))
        expect[g, t.action.act[g, q]] = 1.0  # a_g supported at gq
        assert np.allclose(a, expect)


def test_contributing_elements():
    a = swap_action()
    assert [g for g, _ in interior_isotropy_subalgebra_support(a)] == [0]
    triv = trivial_action(get_group("S3"), 2)
    assert all(s == {0, 1} for _, s in interior_isotropy_subalgebra_support(triv))
    assert len(interior_isotropy_subalgebra_support(triv)) == 6


def test_klein_four_one_swap_one_trivial():
    G = get_group("V4")
    g1, g2 = G.generators()[:2]
    a = action_from_homomorphism(G, {g1: (1, 0), g2: (0, 1)}, 2)
    contributing = {g for g, supp in interior_isotropy_subalgebra_support(a)}
    assert contributing == G.closure([g2])  # kernel of the swap character
    assert all(supp == {0, 1} for _, supp in interior_isotropy_subalgebra_support(a))


ACTIONS = [a for G in groups_up_to(6) for m in (1, 2, 3) for a in all_actions(G, m)]


@given(st.sampled_from(ACTIONS), st.integers(0, 2**32 - 1))
def test_upsilon_is_star_isomorphism(a, seed):
    t = transformation_groupoid(a)
    alg = StarAlgebra(t.groupoid)
    rng = np.random.default_rng(seed)
    x, y = alg.random(rng, 4), alg.random(rng, 4)
    ux, uy = upsilon(t, x), upsilon(t, y)
    assert np.allclose(upsilon(t, alg.conv(x, y)), crossed_product_multiply(a, ux, uy))
    assert np.allclose(upsilon(t, alg.star(x)), crossed_product_involution(a, ux))
    assert np.allclose(upsilon_inverse(t, ux), x)


@given(st.sampled_from(ACTIONS))
def test_transformation_groupoid_invariants(a):
    g = transformation_groupoid(a).groupoid
    assert g.n == a.group.order * a.space
    assert (orbit_count(a) == 1) == is_minimal(g)
    iso = isotropy(g)
    assert [iso.order(u) for u in g.units] == [len(stabilizer(a, q)) for q in range(a.space)]
