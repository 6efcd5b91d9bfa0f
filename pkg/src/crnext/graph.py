"""Linkage classes, strongly connected components and weak reversibility.

Class ids are always assigned in order of the smallest vertex index a class
contains, so every result is independent of the order edges are listed in.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .model import ReactionNetwork


@dataclass(frozen=True)
class Partition:
    class_of: tuple[int, ...]
    classes: tuple[tuple[int, ...], ...]

    @classmethod
    def from_groups(cls, n: int, groups: Iterable[Iterable[int]]) -> "Partition":
        classes = sorted((tuple(sorted(g)) for g in groups), key=lambda c: c[0])
        class_of = [-1] * n
        for cid, members in enumerate(classes):
            for v in members:
                class_of[v] = cid
        return cls(tuple(class_of), tuple(classes))

    def __len__(self):
        return len(self.classes)


@dataclass(frozen=True)
class SccDecomposition:
    partition: Partition
    terminal_flags: tuple[bool, ...]

    @property
    def classes(self) -> tuple[tuple[int, ...], ...]:
        return self.partition.classes

    @property
    def class_of(self) -> tuple[int, ...]:
        return self.partition.class_of

    def terminal_ids(self) -> list[int]:
        return [i for i, t in enumerate(self.terminal_flags) if t]


def undirected_components(n: int, pairs: Iterable[tuple[int, int]], vertices: Sequence[int] | None = None) -> list[list[int]]:
    """Connected components of the undirected graph on ``vertices`` (default all)."""
    keep = set(range(n)) if vertices is None else set(vertices)
    parent = {v: v for v in keep}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for a, b in pairs:
        if a in keep and b in keep:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    groups: dict[int, list[int]] = {}
    for v in sorted(keep):
        groups.setdefault(find(v), []).append(v)
    return sorted(groups.values(), key=lambda g: g[0])


def linkage_classes(net: ReactionNetwork) -> Partition:
    return Partition.from_groups(net.n_vertices, undirected_components(net.n_vertices, net.edges))


def _tarjan(n: int, succ: list[list[int]]) -> list[list[int]]:
    # iterative version; recursion depth is not bounded by the network size otherwise
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    sccs: list[list[int]] = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, i = work[-1]
            if i < len(succ[v]):
                work[-1] = (v, i + 1)
                w = succ[v][i]
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                elif on_stack[w]:
                    low[v] = min(low[v], index[w])
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                sccs.append(comp)
    return sccs


def strongly_connected_components(net: ReactionNetwork) -> SccDecomposition:
    n = net.n_vertices
    succ: list[list[int]] = [[] for _ in range(n)]
    for e in net.edges:
        succ[e.source].append(e.target)
    part = Partition.from_groups(n, _tarjan(n, succ))
    terminal = [True] * len(part)
    for e in net.edges:
        if part.class_of[e.source] != part.class_of[e.target]:
            terminal[part.class_of[e.source]] = False
    return SccDecomposition(part, tuple(terminal))


def terminal_sccs(net: ReactionNetwork) -> list[int]:
    """Ids of the strongly connected components with no outgoing edge."""
    return strongly_connected_components(net).terminal_ids()


def is_weakly_reversible(net: ReactionNetwork) -> bool:
    return len(strongly_connected_components(net).partition) == len(linkage_classes(net))
