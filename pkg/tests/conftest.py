import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

from gpdlab.corpus import bundle
from gpdlab.groupoid import disjoint_union, group_groupoid, pair_groupoid
from gpdlab.groups import get_group
from gpdlab.transformation import GroupAction, all_actions, transformation_groupoid, trivial_action

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def label_index(g):
    return {lab: i for i, lab in enumerate(g.labels)}


def swap_action():
    return GroupAction(get_group("Z2"), np.array([[0, 1], [1, 0]]), name="swap")


def z2_group():
    G = get_group("Z2")
    return group_groupoid(G.table, name="Z2")


# a spread of small groupoids of every corpus kind, built lazily by name
def _small_groupoids():
    out = {
        "point": lambda: pair_groupoid(1),
        "pair2": lambda: pair_groupoid(2),
        "pair3": lambda: pair_groupoid(3),
        "Z2": z2_group,
        "S3": lambda: group_groupoid(get_group("S3").table, name="S3"),
        "Q8": lambda: group_groupoid(get_group("Q8").table, name="Q8"),
        "bundle Z2,Z3": lambda: bundle([get_group("Z2"), get_group("Z3")]),
        "bundle Z1,S3": lambda: bundle([get_group("Z1"), get_group("S3")]),
        "pair2+point": lambda: disjoint_union(pair_groupoid(2), pair_groupoid(1)),
        "pair2+Z2": lambda: disjoint_union(pair_groupoid(2), z2_group()),
        "swap": lambda: transformation_groupoid(swap_action()).groupoid,
        "Z2 trivial on 2": lambda: transformation_groupoid(trivial_action(get_group("Z2"), 2)).groupoid,
        "S3 on 3": lambda: transformation_groupoid(all_actions(get_group("S3"), 3)[-1]).groupoid,
        "Z4 on 3": lambda: transformation_groupoid(all_actions(get_group("Z4"), 3)[1]).groupoid,
        "V4 on 4": lambda: transformation_groupoid(all_actions(get_group("V4"), 4)[3]).groupoid,
    }
    return out


SMALL = _small_groupoids()
_CACHE = {}


def small(name):
    if name not in _CACHE:
        _CACHE[name] = SMALL[name]()
    return _CACHE[name]


groupoid_names = st.sampled_from(sorted(SMALL))
seeds = st.integers(0, 2**32 - 1)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
