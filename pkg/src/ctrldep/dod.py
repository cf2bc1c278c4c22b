"""Decisive order dependence.

``dod_new`` is the projection-cycle algorithm: for each predicate it
projects the graph onto the nodes lying on all maximal paths from the
predicate, checks that the projection is a cycle fed by the predicate,
classifies the cycle nodes by which branch reaches them first, and reads
the dependent pairs off the two class-crossing cycle segments.

``dod_formula`` is the classic pairwise formula, in its original form
(plain reachability, known to over-approximate) and the repaired form
(membership on all maximal paths).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import groupby
from typing import Iterable

from .cfg import Cfg, predicate_indices, sccs
from .coloring import VpMap, _reach_avoiding, vp_sets
from .ntscd import NtscdRelation, ntscd_from_vp

DodRelation = frozenset[tuple[str, str, str]]


class ProjectionStructureError(RuntimeError):
    """The projection graph violates the cycle shape implied by a correct
    path set; this signals an internal bug, not bad input."""


@dataclass
class ProjectionGraph:
    """Projection of the graph onto a node set: edges are the paths whose
    interior stays outside the set."""

    p: str
    nodes: tuple[str, ...]
    succ: dict[str, tuple[str, ...]]

    @property
    def edges(self) -> frozenset[tuple[str, str]]:
        return frozenset((a, b) for a, ts in self.succ.items() for b in ts)


@dataclass
class SuccessorClasses:
    """Cycle nodes split by which branch of the predicate reaches them first."""

    v1: frozenset[str]
    v2: frozenset[str]
    u: frozenset[str]


@dataclass
class StripSegments:
    """The two class-crossing cycle segments; every pair drawn across them
    is order-dependent on the predicate."""

    m_segment: tuple[str, ...]
    o_segment: tuple[str, ...]


def build_ap(g: Cfg, p: str, vp_of_p: Iterable[str]) -> ProjectionGraph:
    """Projection graph over ``vp_of_p``: edge (n, m) iff some path n...m
    keeps all interior nodes outside the set.

    Built by one depth-first search per member, stopping whenever a member
    is found.
    """
    vp_idx = {g.index[x] for x in vp_of_p}
    labels = g.labels
    succ: dict[str, tuple[str, ...]] = {}
    for v in sorted(vp_idx, key=lambda i: labels[i]):
        hits: set[int] = set()
        seen: set[int] = set()
        stack = list(g.succs[v])
        while stack:
            x = stack.pop()
            if x in vp_idx:
                hits.add(x)
                continue
            if x in seen:
                continue
            seen.add(x)
            stack.extend(g.succs[x])
        succ[labels[v]] = tuple(sorted(labels[h] for h in hits))
    return ProjectionGraph(p=p, nodes=tuple(sorted(labels[i] for i in vp_idx)), succ=succ)


def compute_v1_v2(g: Cfg, p: str, vp_of_p: Iterable[str]) -> SuccessorClasses:
    """Classify members by which successor of ``p`` first reaches them via
    nodes outside the set.  A successor that is itself a member is its own
    (only) first hit."""
    pi = g.index[p]
    targets = g.succs[pi]
    if len(targets) != 2 or targets[0] == targets[1]:
        raise ValueError(f"{p!r} is not a predicate")
    vp_idx = {g.index[x] for x in vp_of_p}
    labels = g.labels

    def first_hits(s: int) -> frozenset[str]:
        if s in vp_idx:
            return frozenset((labels[s],))
        hits: set[int] = set()
        seen = {s}
        stack = [s]
        while stack:
            for t in g.succs[stack.pop()]:
                if t in vp_idx:
                    hits.add(t)
                elif t not in seen:
                    seen.add(t)
                    stack.append(t)
        return frozenset(labels[h] for h in hits)

    v1 = first_hits(targets[0])
    v2 = first_hits(targets[1])
    u = frozenset(labels[i] for i in vp_idx) - {p} - v1 - v2
    return SuccessorClasses(v1=v1, v2=v2, u=u)


def unfold_cycle(ap: ProjectionGraph, v1: Iterable[str]) -> tuple[str, ...]:
    """Walk the cycle of non-``p`` nodes once, starting at the smallest
    labelled node of ``v1``.  Raises ProjectionStructureError when the
    non-``p`` nodes do not form a single cycle."""
    starts = set(v1)
    if not starts:
        raise ValueError("empty start class")
    cycle_count = sum(1 for x in ap.nodes if x != ap.p)
    start = min(starts)
    seq = [start]
    seen = {start}
    cur = start
    while True:
        nxt = ap.succ.get(cur, ())
        if len(nxt) != 1 or nxt[0] == ap.p:
            raise ProjectionStructureError(f"node {cur!r} does not continue the cycle")
        cur = nxt[0]
        if cur == start:
            break
        if cur in seen:
            raise ProjectionStructureError(f"cycle revisits {cur!r}")
        seen.add(cur)
        seq.append(cur)
    if len(seq) != cycle_count:
        raise ProjectionStructureError("cycle does not cover all non-predicate nodes")
    return tuple(seq)


def _class_word(seq: Iterable[str], classes: SuccessorClasses) -> list[int]:
    word = []
    for x in seq:
        if x in classes.v1:
            word.append(1)
        elif x in classes.v2:
            word.append(2)
        elif x in classes.u:
            word.append(0)
        else:
            raise ValueError(f"node {x!r} belongs to no class")
    return word


def match_unfolding_pattern(seq: Iterable[str], classes: SuccessorClasses) -> bool:
    """Does the unfolding read, ignoring unclassified nodes, as a block of
    first-branch nodes, then a block of second-branch nodes, then possibly
    first-branch nodes again (one alternation around the cycle)?

    Two-state linear scan; the sequence must start with a ``v1`` node and
    the classes must be disjoint.
    """
    seq = tuple(seq)
    if classes.v1 & classes.v2:
        raise ValueError("classes must be disjoint")
    if not seq or seq[0] not in classes.v1:
        raise ValueError("sequence must start with a node of the first class")
    runs = [k for k, _ in groupby(c for c in _class_word(seq, classes) if c)]
    return runs in ([1, 2], [1, 2, 1])


def extract_segments(seq: Iterable[str], classes: SuccessorClasses) -> StripSegments:
    """Cut out the unique v1->v2 and v2->v1 crossing segments of the cycle.

    The second crossing may wrap past the end of the unfolding; each
    segment excludes its final (opposite-class) node.
    """
    seq = tuple(seq)
    if not match_unfolding_pattern(seq, classes):
        raise ValueError("unfolding does not match the one-alternation pattern")
    word = _class_word(seq, classes)
    first_v2 = word.index(2)
    last_v1_before = max(i for i in range(first_v2) if word[i] == 1)
    last_v2 = len(word) - 1 - word[::-1].index(2)
    trailing_v1 = [i for i in range(last_v2 + 1, len(word)) if word[i] == 1]
    next_v1 = trailing_v1[0] if trailing_v1 else len(word)  # wraps to seq[0]
    return StripSegments(
        m_segment=seq[last_v1_before:first_v2],
        o_segment=seq[last_v2:next_v1],
    )


def _assert_projection_shape(ap: ProjectionGraph, classes: SuccessorClasses) -> None:
    """Invariants that hold whenever the predicate keeps two or more
    projection successors: the predicate has no incoming edges, its
    successors are exactly the first-hit classes, and every other node
    continues the cycle."""
    for a, ts in ap.succ.items():
        if ap.p in ts:
            raise ProjectionStructureError(f"projection edge ({a!r}, {ap.p!r}) enters the predicate")
        if a != ap.p and len(ts) != 1:
            raise ProjectionStructureError(f"cycle node {a!r} has {len(ts)} successors")
    if set(ap.succ[ap.p]) != set(classes.v1 | classes.v2):
        raise ProjectionStructureError("projection successors disagree with the branch classes")


def _dod_for_predicate(
    g: Cfg,
    p: str,
    vp_of_p: frozenset[str],
    unfold_start: str | None = None,
) -> set[tuple[str, str, str]]:
    # Dependent pairs are distinct members other than p, so fewer than
    # three members means the answer is empty with no graph walk at all.
    if len(vp_of_p) < 3:
        return set()
    ap = build_ap(g, p, vp_of_p)
    if len(ap.succ[p]) <= 1:
        return set()
    classes = compute_v1_v2(g, p, vp_of_p)
    _assert_projection_shape(ap, classes)
    if classes.v1 & classes.v2:
        return set()
    seq = unfold_cycle(ap, classes.v1 if unfold_start is None else (unfold_start,))
    if not match_unfolding_pattern(seq, classes):
        return set()
    segments = extract_segments(seq, classes)
    out = set()
    for a in segments.m_segment:
        for b in segments.o_segment:
            out.add((p, a, b) if a < b else (p, b, a))
    return out


def dod_new(g: Cfg) -> DodRelation:
    """Projection-cycle DOD; O(|V|^3) overall and output-optimal."""
    vp = vp_sets(g)
    return _dod_from_vp(g, vp)


def _dod_from_vp(g: Cfg, vp: VpMap) -> DodRelation:
    labels = g.labels
    out: set[tuple[str, str, str]] = set()
    for p in predicate_indices(g):
        p_lab = labels[p]
        vp_of_p = frozenset(labels[i] for i in vp.index_sets[p])
        out |= _dod_for_predicate(g, p_lab, vp_of_p)
    return frozenset(out)


def dod_and_ntscd(g: Cfg) -> tuple[DodRelation, NtscdRelation]:
    """Both relations from a single path-set computation."""
    vp = vp_sets(g)
    return _dod_from_vp(g, vp), ntscd_from_vp(g, vp)


def dod_formula(g: Cfg, variant: str = "original") -> DodRelation:
    """Pairwise-formula DOD: for every predicate p and pair {a, b}, require
    mutual reachability and opposite first-occurrence orders from the two
    branches.

    ``variant`` selects the mutual-reachability test: "original" uses plain
    reachability (which over-approximates the true relation), "fixed" uses
    membership on all maximal paths.
    """
    if variant not in ("original", "fixed"):
        raise ValueError(f"unknown variant {variant!r}; expected 'original' or 'fixed'")
    n = len(g.labels)
    labels = g.labels
    if n == 0:
        return frozenset()
    vp = vp_sets(g)
    vsets = vp.index_sets
    if variant == "original":
        part = sccs(g)
        comp_mask = [0] * len(part.members)
        for cid, mem in enumerate(part.members):
            mask = 0
            for i in mem:
                mask |= 1 << i
            comp_mask[cid] = mask
        mutual = [comp_mask[part.component_of[i]] & ~(1 << i) for i in range(n)]
    else:
        mutual = [0] * n
        for a in range(n):
            mask = 0
            for b in vsets[a]:
                if b != a and a in vsets[b]:
                    mask |= 1 << b
            mutual[a] = mask

    all_bits = (1 << n) - 1
    first_masks: dict[tuple[int, int], int] = {}

    def first_mask(s: int, a: int) -> int:
        # Bits over b: every maximal path from s contains a before any b.
        # Callers guard the "a on all maximal paths from s" conjunct.
        key = (s, a)
        got = first_masks.get(key)
        if got is None:
            if s == a:
                got = all_bits & ~(1 << a)
            else:
                reached = 0
                for x in _reach_avoiding(g, s, a):
                    reached |= 1 << x
                got = all_bits & ~reached & ~(1 << a)
            first_masks[key] = got
        return got

    out: set[tuple[str, str, str]] = set()
    for p in predicate_indices(g):
        s1, s2 = g.succs[p]
        in1 = vsets[s1]
        in2 = vsets[s2]
        not_p = all_bits & ~(1 << p)
        p_lab = labels[p]
        for a in range(n):
            if a == p:
                continue
            mm = mutual[a] & not_p
            if not mm:
                continue
            if a in in1:
                cand = mm & first_mask(s1, a)
                while cand:
                    low = cand & -cand
                    cand ^= low
                    b = low.bit_length() - 1
                    if b in in2 and (first_mask(s2, b) >> a) & 1:
                        x, y = labels[a], labels[b]
                        out.add((p_lab, x, y) if x < y else (p_lab, y, x))
            if a in in2:
                cand = mm & first_mask(s2, a)
                while cand:
                    low = cand & -cand
                    cand ^= low
                    b = low.bit_length() - 1
                    if b in in1 and (first_mask(s1, b) >> a) & 1:
                        x, y = labels[a], labels[b]
                        out.add((p_lab, x, y) if x < y else (p_lab, y, x))
    return frozenset(out)
