"""Control flow graph model, text formats, and basic graph machinery.

Graphs are finite, directed, and have at most two out-edges per node.
Node labels are strings at the API boundary; internally every node is a
dense index into ``labels``.  Edge order is semantically relevant (the
worklist algorithms iterate successors in declaration order), so both the
node order and the per-node out-edge order are preserved exactly as given.
Graphs carry no distinguished start or exit node; operations that need one
take it as an argument.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

FORMATS = ("json", "edgelist")


class ParseError(ValueError):
    """Malformed graph input; the message carries line/position context."""


class Cfg:
    """Immutable directed graph with ordered out-edges (at most two per node).

    Attributes:
        labels: node labels in declaration order.
        index:  label -> dense index.
        succs:  per-node tuple of successor indices, in edge order.
        preds:  per-node tuple of predecessor indices (exact transpose of
                ``succs``, duplicates preserved).
    """

    __slots__ = ("labels", "index", "succs", "preds")

    def __init__(self, labels: Sequence[str], edges: Sequence[tuple[str, str]]) -> None:
        self.labels = tuple(labels)
        index: dict[str, int] = {}
        for lab in self.labels:
            if lab in index:
                raise ValueError(f"duplicate node label {lab!r}")
            index[lab] = len(index)
        succ_lists: list[list[int]] = [[] for _ in self.labels]
        pred_lists: list[list[int]] = [[] for _ in self.labels]
        for src, dst in edges:
            if src not in index:
                raise ValueError(f"edge endpoint {src!r} is not a declared node")
            if dst not in index:
                raise ValueError(f"edge endpoint {dst!r} is not a declared node")
            s, d = index[src], index[dst]
            if len(succ_lists[s]) == 2:
                raise ValueError(f"out-degree exceeds 2 for node {src!r}")
            succ_lists[s].append(d)
            pred_lists[d].append(s)
        self.index = index
        self.succs = tuple(tuple(t) for t in succ_lists)
        self.preds = tuple(tuple(t) for t in pred_lists)

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def n_edges(self) -> int:
        return sum(len(s) for s in self.succs)

    def edges(self) -> list[tuple[str, str]]:
        """All edges as label pairs, nodes in order, out-edges in edge order."""
        labels = self.labels
        return [(labels[i], labels[t]) for i in range(len(labels)) for t in self.succs[i]]

    def successors(self, label: str) -> tuple[str, ...]:
        return tuple(self.labels[t] for t in self.succs[self.index[label]])

    def predecessors(self, label: str) -> tuple[str, ...]:
        return tuple(self.labels[t] for t in self.preds[self.index[label]])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Cfg):
            return NotImplemented
        return self.labels == other.labels and self.succs == other.succs

    def __repr__(self) -> str:
        return f"Cfg(nodes={len(self.labels)}, edges={self.n_edges})"


def predicate_indices(g: Cfg) -> list[int]:
    """Indices of nodes with exactly two out-edges to distinct targets, in node order."""
    return [i for i, ss in enumerate(g.succs) if len(ss) == 2 and ss[0] != ss[1]]


def predicates(g: Cfg) -> frozenset[str]:
    """Predicate nodes: exactly two out-edges with distinct targets.

    A node with both out-edges to the same target is not a predicate; its
    branch can never separate maximal paths.
    """
    return frozenset(g.labels[i] for i in predicate_indices(g))


def reachable_set(g: Cfg, label: str) -> frozenset[str]:
    """All nodes reachable from ``label``, including itself."""
    start = g.index[label]
    seen = {start}
    stack = [start]
    while stack:
        for t in g.succs[stack.pop()]:
            if t not in seen:
                seen.add(t)
                stack.append(t)
    return frozenset(g.labels[i] for i in seen)


@dataclass(frozen=True)
class SccPartition:
    """Strongly connected components with trivial/terminal flags.

    A component is trivial when it is a singleton inducing no edge (so a
    self-loop makes a singleton nontrivial) and terminal when no edge
    leaves it.
    """

    labels: tuple[str, ...]
    component_of: tuple[int, ...]
    members: tuple[tuple[int, ...], ...]
    trivial: tuple[bool, ...]
    terminal: tuple[bool, ...]

    def component_id(self, label: str) -> int:
        return self.component_of[self.labels.index(label)]

    def component(self, label: str) -> frozenset[str]:
        cid = self.component_id(label)
        return frozenset(self.labels[i] for i in self.members[cid])

    def components(self) -> list[frozenset[str]]:
        return [frozenset(self.labels[i] for i in mem) for mem in self.members]


def sccs(g: Cfg) -> SccPartition:
    """Partition nodes by mutual reachability (iterative Tarjan)."""
    n = len(g.labels)
    order = [-1] * n
    low = [0] * n
    on_stack = bytearray(n)
    stack: list[int] = []
    component_of = [-1] * n
    members: list[tuple[int, ...]] = []
    counter = 0
    for root in range(n):
        if order[root] != -1:
            continue
        order[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = 1
        frames: list[tuple[int, int]] = [(root, 0)]
        while frames:
            v, i = frames.pop()
            if i < len(g.succs[v]):
                frames.append((v, i + 1))
                w = g.succs[v][i]
                if order[w] == -1:
                    order[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = 1
                    frames.append((w, 0))
                elif on_stack[w] and order[w] < low[v]:
                    low[v] = order[w]
            else:
                if frames and low[v] < low[frames[-1][0]]:
                    low[frames[-1][0]] = low[v]
                if low[v] == order[v]:
                    comp: list[int] = []
                    while True:
                        w = stack.pop()
                        on_stack[w] = 0
                        component_of[w] = len(members)
                        comp.append(w)
                        if w == v:
                            break
                    members.append(tuple(comp))
    trivial = []
    terminal = []
    for cid, mem in enumerate(members):
        mem_set = set(mem)
        has_inner = any(t in mem_set for v in mem for t in g.succs[v])
        leaves = any(t not in mem_set for v in mem for t in g.succs[v])
        trivial.append(len(mem) == 1 and not has_inner)
        terminal.append(not leaves)
    return SccPartition(
        labels=g.labels,
        component_of=tuple(component_of),
        members=tuple(members),
        trivial=tuple(trivial),
        terminal=tuple(terminal),
    )


def parse_cfg(text: str, fmt: str = "json") -> Cfg:
    """Parse a graph from ``text`` in the given format ("json" or "edgelist").

    Edge order in the input is preserved.  Raises ParseError with
    line/position context for malformed input, duplicate labels,
    undeclared edge endpoints, or out-degree above two.
    """
    if fmt == "json":
        return _parse_json(text)
    if fmt == "edgelist":
        return _parse_edgelist(text)
    raise ValueError(f"unknown format {fmt!r}; expected one of {FORMATS}")


def _parse_json(text: str) -> Cfg:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise ParseError("top-level value must be an object with 'nodes' and 'edges'")
    nodes = data.get("nodes")
    edges = data.get("edges")
    if not isinstance(nodes, list) or not all(isinstance(x, str) for x in nodes):
        raise ParseError("'nodes' must be an array of strings")
    if not isinstance(edges, list):
        raise ParseError("'edges' must be an array of [src, dst] pairs")
    declared: set[str] = set()
    for lab in nodes:
        if lab in declared:
            raise ParseError(f"duplicate node label {lab!r}")
        declared.add(lab)
    out_deg: dict[str, int] = {}
    pairs: list[tuple[str, str]] = []
    for k, item in enumerate(edges):
        if not (isinstance(item, list) and len(item) == 2 and all(isinstance(x, str) for x in item)):
            raise ParseError(f"edge #{k}: expected a [src, dst] pair of strings")
        src, dst = item
        if src not in declared:
            raise ParseError(f"edge #{k}: endpoint {src!r} is not a declared node")
        if dst not in declared:
            raise ParseError(f"edge #{k}: endpoint {dst!r} is not a declared node")
        deg = out_deg.get(src, 0)
        if deg == 2:
            raise ParseError(f"edge #{k}: out-degree exceeds 2 for node {src!r}")
        out_deg[src] = deg + 1
        pairs.append((src, dst))
    return Cfg(nodes, pairs)


def _parse_edgelist(text: str) -> Cfg:
    """One 'src dst' pair per line; a bare token declares an isolated node.

    Nodes are implicitly declared at first mention, in order of appearance.
    '#' starts a comment.
    """
    labels: list[str] = []
    seen: set[str] = set()
    out_deg: dict[str, int] = {}
    pairs: list[tuple[str, str]] = []

    def declare(tok: str) -> None:
        if tok not in seen:
            seen.add(tok)
            labels.append(tok)

    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if len(tokens) == 1:
            if tokens[0] in seen:
                raise ParseError(f"line {ln}: duplicate node label {tokens[0]!r}")
            declare(tokens[0])
        elif len(tokens) == 2:
            src, dst = tokens
            declare(src)
            declare(dst)
            deg = out_deg.get(src, 0)
            if deg == 2:
                raise ParseError(f"line {ln}: out-degree exceeds 2 for node {src!r}")
            out_deg[src] = deg + 1
            pairs.append((src, dst))
        else:
            raise ParseError(f"line {ln}: expected 'src dst', got {len(tokens)} fields")
    return Cfg(labels, pairs)


def serialize_cfg(g: Cfg, fmt: str = "json") -> str:
    """Serialize so that ``parse_cfg(serialize_cfg(g), fmt) == g``.

    Node order and per-node edge order round-trip exactly.
    """
    if fmt == "json":
        return json.dumps(
            {"nodes": list(g.labels), "edges": [[a, b] for a, b in g.edges()]},
            separators=(",", ":"),
        )
    if fmt == "edgelist":
        for lab in g.labels:
            if not lab or "#" in lab or lab.split() != [lab]:
                raise ValueError(f"label {lab!r} cannot be written in edgelist format")
        lines = list(g.labels)
        lines.extend(f"{a} {b}" for a, b in g.edges())
        return "\n".join(lines) + ("\n" if lines else "")
    raise ValueError(f"unknown format {fmt!r}; expected one of {FORMATS}")
