"""Refinement of an RSM matrix and enumeration of maximal communities.

Thresholding an RSM at a community parameter epsilon keeps the vertex pairs
related in both directions at strength <= epsilon and forgets weights and
directions; the survivors form the effective edge graph. A community is any
vertex set inducing a complete subgraph there, so the maximal communities
are exactly the maximal cliques.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import NegativeEpsilonError, TooLargeError, UnknownVertexError
from .rsm import RsmMatrix

#: Default additive slack for the g <= epsilon comparisons.
REFINE_TOL = 1e-9


@dataclass(frozen=True)
class EffectiveEdgeGraph:
    """Undirected unweighted graph of vertex pairs surviving refinement.

    Edges are stored as (u, v) pairs with u < v. epsilon and rsm_tag record
    which thresholding produced the graph.
    """

    vertex_count: int
    edges: frozenset[tuple[int, int]]
    epsilon: float
    rsm_tag: str

    def __post_init__(self):
        n = self.vertex_count
        if not isinstance(n, int) or n < 1:
            raise ValueError(f"vertex_count must be a positive integer, got {n!r}")
        canon = set()
        for pair in self.edges:
            u, v = pair
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-pair {pair} is not a valid edge")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge {pair} out of range for {n} vertices")
            canon.add((min(u, v), max(u, v)))
        object.__setattr__(self, "edges", frozenset(canon))
        object.__setattr__(self, "epsilon", float(self.epsilon))
        object.__setattr__(self, "rsm_tag", str(self.rsm_tag))

    def adjacency(self) -> list[set[int]]:
        adj: list[set[int]] = [set() for _ in range(self.vertex_count)]
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return adj


@dataclass(frozen=True)
class Community:
    """A vertex set whose members are all pairwise related at the recorded epsilon."""

    members: frozenset[int]
    maximal: bool
    epsilon: float
    rsm_tag: str

    def __post_init__(self):
        members = frozenset(int(v) for v in self.members)
        if not members:
            raise ValueError("a community has at least one member")
        object.__setattr__(self, "members", members)


def refine(m: RsmMatrix, epsilon: float, tol: float = REFINE_TOL) -> EffectiveEdgeGraph:
    """Threshold an RSM matrix into its effective edge graph.

    Edge {u, v} survives iff m[u][v] <= epsilon + tol and m[v][u] <= epsilon
    + tol. +inf entries never pass, so cross-component pairs can never share
    a community.
    """
    epsilon = float(epsilon)
    if math.isnan(epsilon) or epsilon < 0:
        raise NegativeEpsilonError(f"epsilon must be >= 0, got {epsilon}")
    if not math.isfinite(epsilon):
        raise ValueError("epsilon must be finite")
    tol = float(tol)
    if not (math.isfinite(tol) and tol >= 0):
        raise ValueError(f"tol must be a nonnegative finite real, got {tol}")
    vals = m.values
    keep = (vals <= epsilon + tol) & (vals.T <= epsilon + tol)
    keep &= np.triu(np.ones(vals.shape, dtype=bool), k=1)
    edges = frozenset((int(i), int(j)) for i, j in zip(*np.nonzero(keep)))
    return EffectiveEdgeGraph(
        vertex_count=m.n, edges=edges, epsilon=epsilon, rsm_tag=m.source_rsm
    )


def is_community(members: Iterable[int], eeg: EffectiveEdgeGraph) -> bool:
    """True iff the induced subgraph on ``members`` is complete.

    The empty set and singletons count as communities.
    """
    ms = sorted({int(v) for v in members})
    for v in ms:
        if not 0 <= v < eeg.vertex_count:
            raise UnknownVertexError(f"vertex {v} not in graph of size {eeg.vertex_count}")
    for i, u in enumerate(ms):
        for v in ms[i + 1:]:
            if (u, v) not in eeg.edges:
                return False
    return True


def _bron_kerbosch(adj: list[set[int]], r: set[int], p: set[int], x: set[int],
                   out: list[frozenset[int]]) -> None:
    if not p and not x:
        out.append(frozenset(r))
        return
    pivot = max(sorted(p | x), key=lambda v: len(adj[v] & p))
    for v in sorted(p - adj[pivot]):
        _bron_kerbosch(adj, r | {v}, p & adj[v], x & adj[v], out)
        p.discard(v)
        x.add(v)


def _degeneracy_order(adj: list[set[int]]) -> list[int]:
    n = len(adj)
    degree = [len(a) for a in adj]
    buckets: list[set[int]] = [set() for _ in range(n)]
    for v, d in enumerate(degree):
        buckets[d].add(v)
    removed = [False] * n
    order = []
    d = 0
    while len(order) < n:
        while d < n and not buckets[d]:
            d += 1
        v = min(buckets[d])
        buckets[d].discard(v)
        removed[v] = True
        order.append(v)
        for nb in adj[v]:
            if not removed[nb]:
                buckets[degree[nb]].discard(nb)
                degree[nb] -= 1
                buckets[degree[nb]].add(nb)
        d = max(d - 1, 0)
    return order


def _canonical(cliques: Iterable[frozenset[int]], eeg: EffectiveEdgeGraph) -> list[Community]:
    ordered = sorted(tuple(sorted(c)) for c in cliques)
    return [
        Community(members=frozenset(c), maximal=True, epsilon=eeg.epsilon, rsm_tag=eeg.rsm_tag)
        for c in ordered
    ]


def enumerate_maximal_communities(eeg: EffectiveEdgeGraph) -> list[Community]:
    """All maximal communities of an effective edge graph.

    These are exactly the maximal cliques, found by Bron-Kerbosch with a
    max-degree pivot; isolated vertices come out as singletons. Output is
    canonically ordered (members ascending, communities lexicographic) so
    runs and implementations can be compared as plain lists.
    """
    adj = eeg.adjacency()
    n = eeg.vertex_count
    out: list[frozenset[int]] = []
    if n > 1000:
        # keeps recursion depth near the degeneracy instead of n
        order = _degeneracy_order(adj)
        seen_pos = {v: i for i, v in enumerate(order)}
        for v in order:
            later = {nb for nb in adj[v] if seen_pos[nb] > seen_pos[v]}
            earlier = adj[v] - later
            _bron_kerbosch(adj, {v}, later, earlier, out)
    else:
        _bron_kerbosch(adj, set(), set(range(n)), set(), out)
    return _canonical(out, eeg)


def brute_force_maximal_communities(eeg: EffectiveEdgeGraph) -> list[Community]:
    """Exhaustive-subset reference implementation of maximal-community search.

    Checks every nonempty vertex subset for completeness and keeps the ones
    no single vertex can extend (extension by one vertex is enough: adding v
    keeps a community a community iff v is adjacent to every member).
    Intended as a test oracle; refuses graphs with more than 20 vertices.
    """
    n = eeg.vertex_count
    if n > 20:
        raise TooLargeError(f"exhaustive search over {n} vertices (limit 20)")
    adj_bits = [0] * n
    for u, v in eeg.edges:
        adj_bits[u] |= 1 << v
        adj_bits[v] |= 1 << u
    complete = np.zeros(1 << n, dtype=bool)
    complete[0] = True
    for s in range(1, 1 << n):
        v = (s & -s).bit_length() - 1
        rest = s & (s - 1)
        complete[s] = complete[rest] and (rest & ~adj_bits[v]) == 0
    found = []
    for s in range(1, 1 << n):
        if not complete[s]:
            continue
        extendable = any(
            not (s >> v) & 1 and (s & ~adj_bits[v]) == 0 for v in range(n)
        )
        if not extendable:
            found.append(frozenset(v for v in range(n) if (s >> v) & 1))
    return _canonical(found, eeg)


# ---------------------------------------------------------------------------
# Output formats
# ---------------------------------------------------------------------------

def _label_table(n: int, labels: Sequence[str] | None) -> list[str]:
    if labels is None:
        return [str(i) for i in range(n)]
    if len(labels) < n:
        raise ValueError(f"{len(labels)} label(s) for {n} vertices")
    return [str(s) for s in labels[:n]]


def communities_to_json(communities: Sequence[Community],
                        labels: Sequence[str] | None = None) -> str:
    """JSON document {"epsilon":, "rsm":, "communities": [[labels...], ...]}."""
    if not communities:
        raise ValueError("no communities to serialize")
    n = max(max(c.members) for c in communities) + 1
    table = _label_table(n, labels)
    doc = {
        "epsilon": communities[0].epsilon,
        "rsm": communities[0].rsm_tag,
        "communities": [[table[v] for v in sorted(c.members)] for c in communities],
    }
    return json.dumps(doc, indent=2) + "\n"


def communities_to_csv(communities: Sequence[Community],
                       labels: Sequence[str] | None = None) -> str:
    """One line per community: comma-separated member labels, ascending."""
    if not communities:
        raise ValueError("no communities to serialize")
    n = max(max(c.members) for c in communities) + 1
    table = _label_table(n, labels)
    lines = [",".join(table[v] for v in sorted(c.members)) for c in communities]
    return "\n".join(lines) + "\n"


_PALETTE = (
    "#e41a1c", "#377eb8", "#ffff33", "#4daf4a", "#984ea3", "#ff7f00",
    "#a65628", "#f781bf", "#999999", "#66c2a5", "#fc8d62", "#8da0cb",
)


def communities_to_dot(eeg: EffectiveEdgeGraph, communities: Sequence[Community],
                       labels: Sequence[str] | None = None) -> str:
    """Graphviz rendering with nodes colored by community membership.

    Community i gets palette color i (cycling); a vertex in several maximal
    communities is drawn wedged with one color per membership.
    """
    table = _label_table(eeg.vertex_count, labels)

    def quoted(s: str) -> str:
        return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'

    colors_of: list[list[str]] = [[] for _ in range(eeg.vertex_count)]
    for i, c in enumerate(communities):
        for v in c.members:
            colors_of[v].append(_PALETTE[i % len(_PALETTE)])

    lines = ["graph communities {", "  node [style=filled];"]
    for v in range(eeg.vertex_count):
        colors = colors_of[v]
        if not colors:
            attrs = 'fillcolor="white"'
        elif len(colors) == 1:
            attrs = f'fillcolor="{colors[0]}"'
        else:
            attrs = f'fillcolor="{":".join(colors)}" style=wedged'
        lines.append(f"  {quoted(table[v])} [{attrs}];")
    for u, v in sorted(eeg.edges):
        lines.append(f"  {quoted(table[u])} -- {quoted(table[v])};")
    lines.append("}")
    return "\n".join(lines) + "\n"
