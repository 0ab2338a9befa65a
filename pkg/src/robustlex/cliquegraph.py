"""Graph of significant neighborhoods, exact (quasi-)cliques, glutton
decomposition and spectral seriation of a stability matrix.

Vertex sets are returned as ascending tuples of vertex indices. Whenever
several maximum solutions exist the lexicographically smallest tuple wins.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import UnknownLabel
from .stability import CriticalBounds, StabilityMatrix

QUASI_CLIQUE_MIN_SIZE = 4


@dataclass(frozen=True, eq=False)
class NeighborGraph:
    vertices: tuple[str, ...]
    adjacency: np.ndarray
    weights: np.ndarray | None = None

    def __post_init__(self):
        adj = np.array(self.adjacency, dtype=bool, copy=True)
        k = len(self.vertices)
        if adj.shape != (k, k):
            raise ValueError(f"adjacency shape {adj.shape} does not match {k} vertices")
        if np.any(np.diag(adj)):
            raise ValueError("self-loops are not allowed")
        if not np.array_equal(adj, adj.T):
            raise ValueError("adjacency must be symmetric")
        adj.setflags(write=False)
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "adjacency", adj)
        if self.weights is not None:
            w = np.array(self.weights, dtype=np.float64, copy=True)
            w.setflags(write=False)
            object.__setattr__(self, "weights", w)

    @property
    def order(self) -> int:
        return len(self.vertices)

    def edges(self) -> list[tuple[int, int]]:
        i, j = np.nonzero(np.triu(self.adjacency, 1))
        return list(zip(i.tolist(), j.tolist()))

    def labels_of(self, vertex_set: Iterable[int]) -> list[str]:
        return [self.vertices[v] for v in vertex_set]

    def induced(self, keep: Sequence[int]) -> "NeighborGraph":
        keep = list(keep)
        w = None if self.weights is None else self.weights[np.ix_(keep, keep)]
        return NeighborGraph(
            tuple(self.vertices[v] for v in keep), self.adjacency[np.ix_(keep, keep)], w
        )

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], labels=None) -> "NeighborGraph":
        adj = np.zeros((n, n), dtype=bool)
        for u, v in edges:
            if u != v:
                adj[u, v] = adj[v, u] = True
        labels = tuple(labels) if labels is not None else tuple(str(k) for k in range(n))
        return cls(labels, adj)


@dataclass(frozen=True)
class QuasiCliquePartition:
    parts: tuple[tuple[int, ...], ...]
    remainder: tuple[int, ...]

    def labeled(self, g: NeighborGraph) -> dict:
        return {
            "parts": [g.labels_of(p) for p in self.parts],
            "remainder": g.labels_of(self.remainder),
        }


# -- graph construction ------------------------------------------------------

def build_graph(
    m: StabilityMatrix, b: CriticalBounds, subset: Iterable[str] | None = None
) -> NeighborGraph:
    """Edge between two items iff their stability index is strictly above
    the upper critical bound. ``subset`` keeps the items in matrix order."""
    if subset is None:
        keep = list(range(len(m.items)))
    else:
        wanted = set(subset)
        unknown = wanted - set(m.items)
        if unknown:
            raise UnknownLabel(f"not in the stability matrix: {sorted(unknown)}")
        keep = [p for p, lab in enumerate(m.items) if lab in wanted]
    values = m.values[np.ix_(keep, keep)]
    adj = values > b.upper
    np.fill_diagonal(adj, False)
    return NeighborGraph(tuple(m.items[p] for p in keep), adj, values)


def is_quasi_clique(g: NeighborGraph, k: Iterable[int]) -> bool:
    """At most one pair of ``k`` is missing an edge."""
    k = sorted(set(k))
    internal = int(np.triu(g.adjacency[np.ix_(k, k)], 1).sum()) if k else 0
    return internal >= len(k) * (len(k) - 1) // 2 - 1


# -- exact maximum clique ----------------------------------------------------

def _bit_adjacency(adj: np.ndarray) -> list[int]:
    out = []
    for row in adj:
        mask = 0
        for v in np.flatnonzero(row):
            mask |= 1 << int(v)
        out.append(mask)
    return out


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _clique_search(adj: list[int], candidates: int, floor: int = 0) -> tuple[int, ...]:
    """Lexicographically first clique of maximum size among ``candidates``,
    provided that size exceeds ``floor``; otherwise ``()``.

    Depth-first over vertices in ascending order, so cliques are visited in
    lexicographic order, pruned by greedy-coloring bounds. Keeping only
    strictly larger cliques therefore ends on the lexicographically first
    maximum one.
    """
    best: list[tuple[int, ...]] = [()]
    best_size = [floor]

    def expand(clique: list[int], cand: int) -> None:
        verts = list(_bits(cand))
        # greedy coloring from the top gives, for each v, a bound on any
        # clique inside {w in cand : w >= v}
        bound = {}
        classes: list[int] = []
        for v in reversed(verts):
            for c, members in enumerate(classes):
                if not members & adj[v]:
                    classes[c] = members | (1 << v)
                    break
            else:
                classes.append(1 << v)
            bound[v] = len(classes)
        for v in verts:
            if len(clique) + bound[v] <= best_size[0]:
                return
            clique.append(v)
            if len(clique) > best_size[0]:
                best_size[0] = len(clique)
                best[0] = tuple(clique)
            rest = cand & adj[v] & ~((1 << (v + 1)) - 1)
            if rest:
                expand(clique, rest)
            clique.pop()

    if candidates:
        expand([], candidates)
    return best[0]


def max_clique(g: NeighborGraph) -> tuple[int, ...]:
    adj = _bit_adjacency(g.adjacency)
    return _clique_search(adj, (1 << g.order) - 1)


def _better(a: tuple[int, ...], b: tuple[int, ...]) -> bool:
    return len(a) > len(b) or (len(a) == len(b) and a < b)


def max_quasi_clique(g: NeighborGraph) -> tuple[int, ...]:
    """Maximum set missing at most one edge: the best clique of ``G`` or of
    ``G`` plus one of its missing edges."""
    n = g.order
    adj = _bit_adjacency(g.adjacency)
    everything = (1 << n) - 1
    k = _clique_search(adj, everything)
    for u in range(n):
        for v in range(u + 1, n):
            if adj[u] >> v & 1:
                continue
            adj[u] |= 1 << v
            adj[v] |= 1 << u
            cand = _clique_search(adj, everything, floor=len(k) - 1)
            adj[u] &= ~(1 << v)
            adj[v] &= ~(1 << u)
            if cand and _better(cand, k):
                k = cand
    return k


def glutton_decomposition(g: NeighborGraph) -> QuasiCliquePartition:
    """Peel off maximum quasi-cliques of size >= 4 until none is left."""
    remaining = list(range(g.order))
    parts = []
    while remaining:
        sub = g.induced(remaining)
        k = max_quasi_clique(sub)
        if len(k) < QUASI_CLIQUE_MIN_SIZE:
            break
        part = tuple(remaining[v] for v in k)
        parts.append(part)
        taken = set(part)
        remaining = [v for v in remaining if v not in taken]
    return QuasiCliquePartition(tuple(parts), tuple(remaining))


# -- seriation ---------------------------------------------------------------

def _components(w: np.ndarray) -> list[list[int]]:
    n = len(w)
    linked = (w > 0) | (w.T > 0)
    seen = [False] * n
    comps = []
    for s in range(n):
        if seen[s]:
            continue
        stack, comp = [s], []
        seen[s] = True
        while stack:
            u = stack.pop()
            comp.append(u)
            for v in np.flatnonzero(linked[u]):
                if not seen[v]:
                    seen[v] = True
                    stack.append(int(v))
        comps.append(sorted(comp))
    return comps


def _fiedler_order(w: np.ndarray, members: list[int], labels: Sequence[str]) -> list[int]:
    if len(members) <= 2:
        return sorted(members, key=lambda p: labels[p])
    sub = w[np.ix_(members, members)]
    lap = np.diag(sub.sum(axis=1)) - sub
    _, vecs = np.linalg.eigh(lap)
    f = vecs[:, 1]
    if f[int(np.argmax(np.abs(f)))] < 0:
        f = -f
    f = np.round(f, 10)
    order = sorted(range(len(members)), key=lambda k: (f[k], labels[members[k]]))
    return [members[k] for k in order]


def bertin_seriation(matrix, labels: Sequence[str]) -> list[int]:
    """One permutation for both axes of a symmetric matrix that brings
    strongly linked items together.

    Items are ordered by the Fiedler vector of the Laplacian of the matrix
    read as weighted adjacency (diagonal ignored). Disconnected groups are
    ordered separately and concatenated by their first label.
    """
    w = np.array(matrix, dtype=np.float64, copy=True)
    if w.ndim != 2 or w.shape[0] != w.shape[1] or w.shape[0] != len(labels):
        raise ValueError("need a square matrix with one label per row")
    np.fill_diagonal(w, 0.0)
    w = 0.5 * (w + w.T)
    comps = _components(w)
    comps.sort(key=lambda c: min(labels[p] for p in c))
    order: list[int] = []
    for comp in comps:
        order.extend(_fiedler_order(w, comp, labels))
    return order

