"""The backward propagation kernel and its derived predicates.

Expected values for the worked examples are recomputed here through the
brute-force oracle, so the two implementations vouch for each other.
"""

from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ctrldep import (
    Cfg,
    color_all_paths_contain,
    first_before_on_all,
    oracle_exists_maximal_avoiding,
    oracle_first_before,
    vp_sets,
)
from ctrldep.coloring import Coloring

from conftest import small_cfgs


def oracle_color(g: Cfg, target: str) -> frozenset[str]:
    return frozenset(
        m for m in g.labels if not oracle_exists_maximal_avoiding(g, m, target)
    )


def test_color_fig3_target_5(fig3):
    expected = oracle_color(fig3, "5")
    assert expected == {"2", "3", "4", "5"}
    assert color_all_paths_contain(fig3, ["5"]) == expected


def test_color_isolated_target():
    g = Cfg(["n", "m"], [])
    assert color_all_paths_contain(g, ["n"]) == {"n"}


def test_color_fig1_target_e(fig1):
    # b, c, d can all diverge into the self-loop on d and never reach e.
    expected = oracle_color(fig1, "e")
    assert expected == {"e"}
    assert color_all_paths_contain(fig1, ["e"]) == expected


def test_color_rejects_empty_targets(fig3):
    with pytest.raises(ValueError, match="empty target set"):
        color_all_paths_contain(fig3, [])


def test_color_multi_target_seed_set(fig3):
    # From 1 every maximal path reaches 6; seeding {5, 6} must cover everything.
    assert color_all_paths_contain(fig3, ["5", "6"]) == set(fig3.labels)


@settings(max_examples=120, deadline=None)
@given(small_cfgs(max_nodes=8))
def test_color_matches_oracle(g):
    for target in g.labels:
        got = color_all_paths_contain(g, [target])
        for m in g.labels:
            assert (m in got) == (not oracle_exists_maximal_avoiding(g, m, target))


@settings(max_examples=60, deadline=None)
@given(small_cfgs(max_nodes=7), st.data())
def test_seed_monotonicity(g, data):
    labels = list(g.labels)
    t2 = data.draw(st.sets(st.sampled_from(labels), min_size=1))
    t1 = data.draw(st.sets(st.sampled_from(sorted(t2)), min_size=1))
    assert color_all_paths_contain(g, t1) <= color_all_paths_contain(g, t2)


def test_vp_sets_fig3(fig3):
    vp = vp_sets(fig3)
    assert vp["1"] == {"1", "6"}
    assert vp["2"] == {"2", "5", "6"}
    assert vp["3"] == {"3", "5", "6"}
    assert vp["4"] == {"4", "5", "6"}
    assert vp["5"] == {"5", "6"}
    assert vp["6"] == {"6"}


def test_vp_sets_edgeless():
    g = Cfg(["x", "y"], [])
    vp = vp_sets(g)
    assert vp["x"] == {"x"} and vp["y"] == {"y"}


def test_vp_sets_fig4(fig4):
    vp = vp_sets(fig4)
    assert vp["a"] == {"a", "b", "c"}
    assert vp["b"] == {"b", "c"}
    assert vp["c"] == {"b", "c"}


@settings(max_examples=80, deadline=None)
@given(small_cfgs(max_nodes=8))
def test_vp_sets_match_oracle(g):
    vp = vp_sets(g)
    for n in g.labels:
        assert n in vp[n]
        expected = {
            m for m in g.labels if not oracle_exists_maximal_avoiding(g, n, m)
        }
        assert vp[n] == expected


def test_first_before_fig5(fig5):
    assert first_before_on_all(fig5, "a", "a", "b") is True
    assert first_before_on_all(fig5, "b", "b", "a") is True
    assert oracle_first_before(fig5, "a", "a", "b") is True


def test_first_before_fig3(fig3):
    # the branch through 4 misses 3 entirely
    assert first_before_on_all(fig3, "2", "3", "5") is False


def test_first_before_rejects_equal_nodes(fig3):
    with pytest.raises(ValueError):
        first_before_on_all(fig3, "1", "5", "5")


@settings(max_examples=60, deadline=None)
@given(small_cfgs(max_nodes=6))
def test_first_before_matches_oracle(g):
    labels = g.labels
    for s in labels:
        for a in labels:
            for b in labels:
                if a == b:
                    continue
                assert first_before_on_all(g, s, a, b) == oracle_first_before(g, s, a, b)


@settings(max_examples=80, deadline=None)
@given(small_cfgs(max_nodes=10))
def test_each_coloring_visits_each_edge_at_most_once(g):
    eng = Coloring(g)
    for i in range(len(g)):
        eng.run((i,))
        assert eng.edge_visits() <= g.n_edges
