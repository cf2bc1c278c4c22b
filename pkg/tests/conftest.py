"""Shared fixtures: the worked-example graphs and small test oracles."""

from __future__ import annotations

from collections import defaultdict

import pytest
from hypothesis import strategies as st

from ctrldep import Cfg


@pytest.fixture
def fig1() -> Cfg:
    """Branch into a convergent diamond with a possibly diverging self-loop."""
    return Cfg(
        ["a", "b", "c", "d", "e"],
        [("a", "b"), ("a", "c"), ("c", "d"), ("d", "e"), ("b", "c"), ("d", "d"), ("b", "e")],
    )


@pytest.fixture
def fig3() -> Cfg:
    """The worklist counterexample: two nested branches joining before the sink."""
    return Cfg(
        ["1", "2", "3", "4", "5", "6"],
        [("1", "2"), ("1", "6"), ("2", "3"), ("2", "4"), ("3", "5"), ("4", "5"), ("5", "6")],
    )


@pytest.fixture
def fig4() -> Cfg:
    """Irreducible two-node loop entered from both sides of a branch."""
    return Cfg(["a", "b", "c"], [("a", "b"), ("a", "c"), ("b", "c"), ("c", "b")])


@pytest.fixture
def fig5() -> Cfg:
    """The formula counterexample: the loop can be left for a sink."""
    return Cfg(
        ["p", "a", "b", "c"],
        [("p", "a"), ("p", "b"), ("b", "c"), ("a", "b"), ("b", "a")],
    )


@pytest.fixture
def fig7() -> Cfg:
    """An 8-cycle fed through two intermediate branches, so each branch
    class has two first-reachable cycle nodes."""
    n = [f"n{i}" for i in range(1, 9)]
    edges = [("p", "u1"), ("p", "u2"), ("u1", "n1"), ("u1", "n7"), ("u2", "n2"), ("u2", "n5")]
    edges += [(n[i], n[(i + 1) % 8]) for i in range(8)]
    return Cfg(["p", "u1", "u2"] + n, edges)


@pytest.fixture
def fig4_with_start() -> Cfg:
    """fig4 behind a start node, so the whole graph is start-reachable."""
    return Cfg(
        ["s", "a", "b", "c"],
        [("s", "a"), ("a", "b"), ("a", "c"), ("b", "c"), ("c", "b")],
    )


FIG3_NTSCD = frozenset({("1", "2"), ("1", "5"), ("2", "3"), ("2", "4")})
FIG3_NTSCD_FIFO = frozenset({("1", "2"), ("1", "6"), ("2", "3"), ("2", "4")})
FIG1_NTSCD = frozenset(
    {
        ("a", "b"),
        ("a", "c"),
        ("a", "d"),
        ("b", "c"),
        ("b", "d"),
        ("b", "e"),
        ("d", "d"),
        ("d", "e"),
    }
)


def reduces_to_single_node(g: Cfg) -> bool:
    """Reducibility oracle: repeatedly delete self-loops and merge
    single-predecessor nodes; reducible graphs end as one edgeless node."""
    succ: dict[int, set[int]] = {i: set(g.succs[i]) for i in range(len(g))}
    while True:
        for v, ts in succ.items():
            ts.discard(v)
        preds: dict[int, set[int]] = defaultdict(set)
        for v, ts in succ.items():
            for t in ts:
                preds[t].add(v)
        merged = False
        for v in list(succ):
            ps = preds[v]
            if len(ps) == 1:
                (u,) = ps
                succ[u].discard(v)
                succ[u] |= succ[v]
                del succ[v]
                merged = True
                break
        if not merged:
            break
    return len(succ) == 1 and not any(succ.values())


@st.composite
def small_cfgs(draw, max_nodes: int = 8):
    """Arbitrary graphs with out-degree at most two."""
    n = draw(st.integers(1, max_nodes))
    labels = [f"n{i}" for i in range(n)]
    edges = []
    for i in range(n):
        for _ in range(draw(st.integers(0, 2))):
            edges.append((labels[i], labels[draw(st.integers(0, n - 1))]))
    return Cfg(labels, edges)
