import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import label_index, seeds, small, swap_action
from gpdlab import criteria as C
from gpdlab import spectral as S
from gpdlab.algebra import StarAlgebra, elementary_normalizers
from gpdlab.corpus import bundle
from gpdlab.errors import (
    NotANormalizer,
    NotGroupBundle,
    NotPositiveDefinite,
    NotRegularInclusion,
    NotSubgroupoid,
)
from gpdlab.groupoid import (
    disjoint_union,
    group_groupoid,
    invariant_closure,
    isotropy_ids,
    pair_groupoid,
)
from gpdlab.groups import get_group
from gpdlab.transformation import transformation_groupoid, trivial_action


def alg_of(name):
    return StarAlgebra(small(name))


def two_points():
    return StarAlgebra(disjoint_union(pair_groupoid(1), pair_groupoid(1)))


def unit_ideal_of_C(inc, vanish_on):
    """C_{0,X}(Q) as an ideal of B = C(units)."""
    g = inc.algebra.groupoid
    keep = [u for u in g.units if u not in set(vanish_on)]
    blocks = inc.sub.support(inc.algebra.basis(keep)) if keep else frozenset()
    return inc.sub.ideal(blocks)


# -- intersections and essentiality ------------------------------------------------


def test_intersection_extremes():
    alg = alg_of("pair2+Z2")
    inc = C.diagonal_inclusion(alg)
    assert C.intersect_ideal_with_subalgebra(inc, inc.ambient.whole()).dim == inc.sub.dim
    assert C.intersect_ideal_with_subalgebra(inc, inc.ambient.zero()).dim == 0


def test_scalars_meet_single_block_trivially():
    z2 = alg_of("Z2")
    inc = C.scalar_inclusion(z2)
    for i in range(2):
        assert C.intersect_ideal_with_subalgebra(inc, inc.ambient.ideal([i])).dim == 0


def test_essential_examples():
    assert C.is_essential(C.diagonal_inclusion(StarAlgebra(pair_groupoid(2))))
    assert not C.is_essential(C.scalar_inclusion(alg_of("Z2")))
    assert C.is_essential(C.whole_inclusion(alg_of("S3")))


def test_degenerate_inclusion_rejected():
    alg = StarAlgebra(pair_groupoid(2))
    with pytest.raises(ValueError):
        C.make_inclusion(alg, alg.basis([0]))


# -- dominance ---------------------------------------------------------------------


def test_dominance_examples():
    alg = alg_of("pair2+point")
    inc = C.diagonal_inclusion(alg)
    assert C.is_dominant(inc, inc.ambient.whole())
    whole = C.whole_inclusion(alg)
    assert C.is_dominant(whole, whole.ambient.zero())
    point = next(u for u in alg.groupoid.units if len(invariant_closure(alg.groupoid, [u])) == 1)
    J = S.unif_ideal(alg, point)
    dec = inc.ambient
    assert [dec.dims[i] for i in J.blocks] == [2]  # J is the M2 block, A/J ≅ ℂ
    assert C.is_dominant(inc, J)


def test_non_dominant_witness():
    z2 = alg_of("Z2")
    inc = C.scalar_inclusion(z2)
    w = C.dominance_witness(inc, inc.ambient.ideal([0]))
    assert w is not None and not w.blocks <= {0}


def brute_dominant(inc, J):
    meet_J = C.intersect_ideal_with_subalgebra(inc, J)
    for L in S.all_ideals(inc.ambient):
        if C.intersect_ideal_with_subalgebra(inc, L) <= meet_J and not L <= J:
            return False
    return True


CASES = ["pair2+point", "pair2+Z2", "Z2 trivial on 2", "bundle Z2,Z3", "bundle Z1,S3", "S3 on 3", "Z4 on 3"]


@pytest.mark.parametrize("name", CASES)
def test_dominance_matches_brute_force(name):
    alg = alg_of(name)
    for inc in (C.diagonal_inclusion(alg), C.isotropy_inclusion(alg), C.scalar_inclusion(alg)):
        for J in S.all_ideals(inc.ambient):
            assert C.is_dominant(inc, J) == brute_dominant(inc, J)


def test_atom_reduction_matches_exhaustive(monkeypatch):
    alg = alg_of("bundle Z2,Z3")
    inc = C.diagonal_inclusion(alg)
    exhaustive = [C.is_dominant(inc, J) for J in S.all_ideals(inc.ambient)]
    monkeypatch.setattr(C, "EXHAUSTIVE_MAX_BLOCKS", 0)
    assert [C.is_dominant(inc, J) for J in S.all_ideals(inc.ambient)] == exhaustive


# -- normalizers and minimality ------------------------------------------------------


def test_meets_are_fully_normalized():
    for name in CASES:
        alg = alg_of(name)
        inc = C.diagonal_inclusion(alg)
        ns = elementary_normalizers(alg)
        for L in S.all_ideals(inc.ambient):
            assert C.is_fully_normalized(inc, C.intersect_ideal_with_subalgebra(inc, L), ns)


def test_invariant_unit_sets_give_normalized_ideals():
    alg = alg_of("pair2+Z2")
    g = alg.groupoid
    inc = C.diagonal_inclusion(alg)
    ns = elementary_normalizers(alg)
    for r in range(len(g.units) + 1):
        for X in itertools.combinations(g.units, r):
            invariant = invariant_closure(g, X) == set(X)
            assert C.is_fully_normalized(inc, unit_ideal_of_C(inc, X), ns) == invariant


def test_pair2_ideal_vanishing_at_one_unit_not_normalized():
    alg = StarAlgebra(pair_groupoid(2))
    inc = C.diagonal_inclusion(alg)
    assert not C.is_fully_normalized(inc, unit_ideal_of_C(inc, [0]), elementary_normalizers(alg))


def test_not_a_normalizer():
    alg = StarAlgebra(pair_groupoid(2))
    L = label_index(alg.groupoid)
    n = alg.delta(L[(0, 0)]) + alg.delta(L[(0, 1)])
    inc = C.diagonal_inclusion(alg)
    with pytest.raises(NotANormalizer) as err:
        C.is_fully_normalized(inc, inc.sub.whole(), [alg.delta(0), n])
    assert err.value.index == 1


def test_inclusion_minimality_examples():
    p = StarAlgebra(pair_groupoid(3))
    assert C.is_inclusion_minimal(C.diagonal_inclusion(p), elementary_normalizers(p))
    two = two_points()
    assert not C.is_inclusion_minimal(C.diagonal_inclusion(two), elementary_normalizers(two))
    sw = StarAlgebra(transformation_groupoid(swap_action()).groupoid)
    assert C.is_inclusion_minimal(C.isotropy_inclusion(sw), elementary_normalizers(sw))


def brute_minimal(inc, ns):
    k = inc.sub.k
    for r in range(1, k):
        for blocks in itertools.combinations(range(k), r):
            if C.is_fully_normalized(inc, inc.sub.ideal(blocks), ns):
                return False
    return True


@pytest.mark.parametrize("name", CASES + ["swap", "pair3", "V4 on 4"])
def test_minimality_matches_brute_force(name, monkeypatch):
    alg = alg_of(name)
    ns = elementary_normalizers(alg)
    for inc in (C.diagonal_inclusion(alg), C.isotropy_inclusion(alg)):
        expect = brute_minimal(inc, ns)
        assert C.is_inclusion_minimal(inc, ns) == expect
        with monkeypatch.context() as m:
            m.setattr(C, "EXHAUSTIVE_MAX_BLOCKS", 0)  # reachability path
            assert C.is_inclusion_minimal(inc, ns) == expect


# -- verifiers ---------------------------------------------------------------------


def test_reg_simple_examples():
    p = StarAlgebra(pair_groupoid(2))
    c = C.verify_reg_simple(C.diagonal_inclusion(p), elementary_normalizers(p))
    assert c.passed and c.values == {"simple": True, "essential": True, "minimal": True}
    z2 = alg_of("Z2")
    c = C.verify_reg_simple(C.diagonal_inclusion(z2), elementary_normalizers(z2))
    assert c.passed and not c.values["simple"] and c.values["minimal"] and not c.values["essential"]
    two = two_points()
    c = C.verify_reg_simple(C.diagonal_inclusion(two), elementary_normalizers(two))
    assert c.passed and not c.values["simple"] and not c.values["minimal"]


def test_reg_simple_needs_generating_normalizers():
    p = StarAlgebra(pair_groupoid(2))
    with pytest.raises(NotRegularInclusion):
        C.verify_reg_simple(C.diagonal_inclusion(p), [])


@pytest.mark.parametrize("make, verdict", [
    (lambda: transformation_groupoid(swap_action()).groupoid, True),
    (lambda: transformation_groupoid(trivial_action(get_group("Z2"), 1)).groupoid, False),
    (lambda: disjoint_union(pair_groupoid(2), pair_groupoid(1)), False),
])
def test_simplicity_theorem_examples(make, verdict):
    equiv, cert = C.verify_simplicity_theorems(make())
    assert equiv.passed and cert.passed
    assert equiv.values == {"simple": verdict, "minimal_and_top_principal": verdict, "intiso_minimal": verdict}


def test_augmentation_ideal_examples():
    units_only = two_points()
    assert C.augmentation_ideal(units_only).dim == 0
    assert all(c.passed for c in C.verify_aug_ideal(units_only))
    z2 = alg_of("Z2")
    V = C.augmentation_ideal(z2)
    assert V.dim == 1 and V.contains(np.array([1.0, -1.0]))
    two = StarAlgebra(bundle([get_group("Z2"), get_group("Z2")]))
    checks = C.verify_aug_ideal(two, np.random.default_rng(0))
    assert all(c.passed for c in checks)
    assert C.augmentation_ideal(two).dim == 2  # one sign block per point
    with pytest.raises(NotGroupBundle):
        C.verify_aug_ideal(StarAlgebra(pair_groupoid(2)))


@pytest.mark.parametrize("name", CASES + ["swap", "S3", "Q8", "pair3"])
def test_central_norm_ideal(name):
    assert C.verify_central_norm_ideal(alg_of(name)).passed


def test_simple_dom_with_simple_points():
    alg = StarAlgebra(bundle([get_group("Z1"), get_group("Z1"), get_group("S3")]))
    assert len(C.unif_simple_points(alg)) == 2
    checks = C.verify_simple_dom(alg)
    assert [c.name for c in checks] == ["simple_dom", "simple_essential"]
    assert all(c.passed for c in checks)
    assert checks[0].values["subsets_checked"] == 3


# -- positive definite functions and subgroupoid isometry ------------------------------


def test_eta_delta_e():
    alg = alg_of("S3")
    theta = C.positive_definite_function(alg.groupoid, 0, [1, 0, 0, 0, 0, 0])
    rng = np.random.default_rng(1)
    f = alg.random(rng)
    ff = alg.conv(alg.star(f), f)
    assert C.eta_theta(alg, theta) @ ff == pytest.approx(ff[0])
    assert (C.eta_theta(alg, theta) @ ff).real > 0


def test_eta_constant_one_is_trivial_character():
    alg = alg_of("Q8")
    theta = C.positive_definite_function(alg.groupoid, 0, np.ones(8))
    f = alg.random(np.random.default_rng(2))
    ff = alg.conv(alg.star(f), f)
    assert C.eta_theta(alg, theta) @ ff == pytest.approx(abs(f.sum()) ** 2)


@given(seeds)
def test_random_positive_definite_on_z3_bundle(seed):
    alg = StarAlgebra(bundle([get_group("Z3"), get_group("Z3")]))
    rng = np.random.default_rng(seed)
    thetas = [C.random_positive_definite(alg.groupoid, u, rng) for u in alg.groupoid.units for _ in range(5)]
    assert C.verify_eta_positivity(alg, thetas).passed


def test_not_positive_definite():
    g = small("Z2")
    with pytest.raises(NotPositiveDefinite):
        C.positive_definite_function(g, 0, [1.0, 2.0])  # Gram [[1,2],[2,1]] has eigenvalue -1
    with pytest.raises(NotPositiveDefinite):
        C.positive_definite_function(g, 0, [-1.0, 0.0])


def test_subgroupoid_isometry_examples(rng):
    alg = alg_of("pair3")
    g = alg.groupoid
    assert C.verify_open_subgroupoid_isometry(alg, g.units, rng).passed
    assert C.verify_open_subgroupoid_isometry(alg, range(g.n), rng).passed
    mixed = disjoint_union(
        transformation_groupoid(trivial_action(get_group("Z2"), 2)).groupoid,
        transformation_groupoid(swap_action()).groupoid,
    )
    m = StarAlgebra(mixed)
    c = C.verify_open_subgroupoid_isometry(m, isotropy_ids(mixed), rng, samples=100)
    assert c.passed and c.values["subgroupoid_size"] == 6
    with pytest.raises(NotSubgroupoid):
        C.verify_open_subgroupoid_isometry(alg, [0, 3], rng)


@given(st.sampled_from(CASES), seeds)
def test_units_subalgebra_norm_is_sup_norm(name, seed):
    alg = alg_of(name)
    rng = np.random.default_rng(seed)
    f = alg.random(rng, 5, support=alg.groupoid.units)
    assert np.allclose(S.norm_array(alg, f), np.abs(f).max(axis=-1))
