"""Finite and oracle-presented bipartite graphs, and induced ball subgraphs.

Both sides of every bipartite graph here are (subsets of) the natural
numbers; a vertex is a (side, index) pair and indices are never renumbered,
so matchings extracted from local subgraphs are stated in global indices.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Callable, Iterable, Mapping

from .errors import BallBudgetExceeded, OracleError, ParityError, ParseError


class Side(Enum):
    LEFT = "L"
    RIGHT = "R"

    def opposite(self) -> "Side":
        return Side.RIGHT if self is Side.LEFT else Side.LEFT


@dataclass(frozen=True)
class Vertex:
    side: Side
    index: int

    def __post_init__(self) -> None:
        if self.index < 0:
            raise ValueError(f"vertex index must be >= 0, got {self.index}")

    def __repr__(self) -> str:
        return f"{self.side.value}{self.index}"


@dataclass(frozen=True)
class BipartiteOracle:
    """A bipartite graph given by procedures.

    ``neighbors`` maps a vertex to the sorted tuple of opposite-side indices
    adjacent to it; ``degree`` must agree with the length of that tuple.
    Oracles must be pure: repeated calls return identical answers.

    ``left_support``/``right_support`` are None for graphs living on all of
    the naturals; finite graphs wrapped as oracles declare their vertex sets
    so lazy consumers know when a side is exhausted.
    """

    neighbors: Callable[[Vertex], tuple[int, ...]]
    degree: Callable[[Vertex], int]
    name: str = "oracle"
    left_support: tuple[int, ...] | None = None
    right_support: tuple[int, ...] | None = None

    def support(self, side: Side) -> tuple[int, ...] | None:
        return self.left_support if side is Side.LEFT else self.right_support


@dataclass(frozen=True, eq=True)
class FiniteBipartiteGraph:
    """An explicit finite bipartite graph.

    ``adjacency`` maps a left index to the sorted tuple of its right
    neighbors.  Isolated vertices on either side are allowed: they appear in
    ``left_ids``/``right_ids`` with no incident edge.  Treat instances as
    immutable.
    """

    left_ids: tuple[int, ...]
    right_ids: tuple[int, ...]
    adjacency: Mapping[int, tuple[int, ...]]

    def __post_init__(self) -> None:
        _check_sorted_unique(self.left_ids, "left_ids")
        _check_sorted_unique(self.right_ids, "right_ids")
        right_set = set(self.right_ids)
        left_set = set(self.left_ids)
        for a, row in self.adjacency.items():
            if a not in left_set:
                raise ValueError(f"adjacency key {a} not in left_ids")
            _check_sorted_unique(row, f"adjacency[{a}]")
            if not right_set.issuperset(row):
                raise ValueError(f"adjacency[{a}] mentions unknown right ids")

    @staticmethod
    def from_adjacency(
        adjacency: Mapping[int, Iterable[int]],
        left_ids: Iterable[int] | None = None,
        right_ids: Iterable[int] | None = None,
    ) -> "FiniteBipartiteGraph":
        adj = {a: tuple(sorted(set(row))) for a, row in adjacency.items()}
        lefts = set(adj) if left_ids is None else set(left_ids) | set(adj)
        rights = set() if right_ids is None else set(right_ids)
        for row in adj.values():
            rights.update(row)
        return FiniteBipartiteGraph(tuple(sorted(lefts)), tuple(sorted(rights)), adj)

    def neighbors_left(self, i: int) -> tuple[int, ...]:
        return self.adjacency.get(i, ())

    def neighbors_right(self, j: int) -> tuple[int, ...]:
        return self.right_adjacency.get(j, ())

    @cached_property
    def right_adjacency(self) -> dict[int, tuple[int, ...]]:
        radj: dict[int, list[int]] = {}
        for a in self.left_ids:
            for b in self.adjacency.get(a, ()):
                radj.setdefault(b, []).append(a)
        return {b: tuple(row) for b, row in radj.items()}

    @property
    def edge_count(self) -> int:
        return sum(len(row) for row in self.adjacency.values())

    def has_edge(self, a: int, b: int) -> bool:
        return b in self.adjacency.get(a, ())

    def as_oracle(self, name: str = "finite") -> BipartiteOracle:
        def neighbors(v: Vertex) -> tuple[int, ...]:
            if v.side is Side.LEFT:
                return self.neighbors_left(v.index)
            return self.neighbors_right(v.index)

        return BipartiteOracle(
            neighbors=neighbors,
            degree=lambda v: len(neighbors(v)),
            name=name,
            left_support=self.left_ids,
            right_support=self.right_ids,
        )


@dataclass(frozen=True, eq=True)
class BallSubgraph:
    """The induced subgraph within a fixed path-distance of a pivot vertex.

    ``shell_right`` holds the right vertices at exactly the extraction
    radius; every other vertex of the subgraph is strictly closer to the
    pivot.  Radius parity forces the outermost layer onto the right side:
    odd radii pair with left pivots, even radii with right pivots.
    """

    graph: FiniteBipartiteGraph
    pivot: Vertex
    radius: int
    shell_right: frozenset[int]

    @property
    def interior_right(self) -> frozenset[int]:
        return frozenset(self.graph.right_ids) - self.shell_right


def extract_ball(
    oracle: BipartiteOracle,
    removed_left: Iterable[int],
    removed_right: Iterable[int],
    pivot: Vertex,
    radius: int,
    max_vertices: int | None = None,
) -> BallSubgraph:
    """Breadth-first extraction of the induced ball around ``pivot``.

    Removed vertices are invisible: they are neither visited nor traversed,
    so the result is the ball of the residual graph.  Raises ParityError on
    a radius/side mismatch, OracleError if the oracle's answers are not
    sorted, contradict its degree procedure, or fail symmetry on the pairs
    queried in both directions, and BallBudgetExceeded past ``max_vertices``.
    """
    if radius < 1:
        raise ValueError("radius must be >= 1")
    if pivot.side is Side.LEFT and radius % 2 == 0:
        raise ParityError(f"left pivot needs an odd radius, got {radius}")
    if pivot.side is Side.RIGHT and radius % 2 == 1:
        raise ParityError(f"right pivot needs an even radius, got {radius}")
    rm_left = frozenset(removed_left)
    rm_right = frozenset(removed_right)
    rm_home = rm_left if pivot.side is Side.LEFT else rm_right
    if pivot.index in rm_home:
        raise ValueError(f"pivot {pivot!r} is a removed vertex")

    dist: dict[tuple[Side, int], int] = {(pivot.side, pivot.index): 0}
    queried: dict[tuple[Side, int], tuple[int, ...]] = {}
    queue: deque[tuple[Side, int, int]] = deque([(pivot.side, pivot.index, 0)])
    while queue:
        side, i, d = queue.popleft()
        if d == radius:
            continue
        nbrs = oracle.neighbors(Vertex(side, i))
        if any(x >= y for x, y in zip(nbrs, nbrs[1:])):
            raise OracleError(f"{oracle.name}: neighbors({side.value}{i}) not strictly sorted")
        if oracle.degree(Vertex(side, i)) != len(nbrs):
            raise OracleError(f"{oracle.name}: degree({side.value}{i}) != len(neighbors)")
        queried[(side, i)] = nbrs
        other = side.opposite()
        skip = rm_left if other is Side.LEFT else rm_right
        for j in nbrs:
            if j in skip or (other, j) in dist:
                continue
            dist[(other, j)] = d + 1
            if max_vertices is not None and len(dist) > max_vertices:
                raise BallBudgetExceeded(
                    f"ball around {pivot!r} exceeds {max_vertices} vertices"
                )
            queue.append((other, j, d + 1))

    for (side, i), nbrs in queried.items():
        other = side.opposite()
        for j in nbrs:
            back = queried.get((other, j))
            if back is not None and i not in back:
                pair = (i, j) if side is Side.LEFT else (j, i)
                raise OracleError(f"{oracle.name}: asymmetric edge at {pair}")

    left_ids = tuple(sorted(i for (s, i) in dist if s is Side.LEFT))
    right_set = {i for (s, i) in dist if s is Side.RIGHT}
    right_ids = tuple(sorted(right_set))
    # Every left vertex of the ball is strictly inside, so its full residual
    # neighborhood was queried; restrict it to the ball's right vertices.
    adjacency = {
        a: tuple(j for j in queried[(Side.LEFT, a)] if j in right_set)
        for a in left_ids
    }
    graph = FiniteBipartiteGraph(left_ids, right_ids, adjacency)
    shell = frozenset(j for j in right_ids if dist[(Side.RIGHT, j)] == radius)
    return BallSubgraph(graph=graph, pivot=pivot, radius=radius, shell_right=shell)


def check_symmetry(oracle: BipartiteOracle, bound: int) -> list[tuple[int, int]]:
    """Report all (i, j) with i, j <= bound adjacent in one direction only."""
    if bound < 0:
        raise ValueError("bound must be >= 0")
    violations: list[tuple[int, int]] = []
    left_rows = {i: oracle.neighbors(Vertex(Side.LEFT, i)) for i in range(bound + 1)}
    right_rows = {j: oracle.neighbors(Vertex(Side.RIGHT, j)) for j in range(bound + 1)}
    for i in range(bound + 1):
        for j in range(bound + 1):
            if (j in left_rows[i]) != (i in right_rows[j]):
                violations.append((i, j))
    return violations


def parse_bg(text: str | bytes) -> tuple[FiniteBipartiteGraph, int | None]:
    """Parse the .bg text format; returns the graph and the optional header k.

    Format: UTF-8 lines; ``#`` starts a comment; an optional ``k <int>``
    header may precede the data; data lines read ``A <i>: <j1> <j2> ...``
    with strictly increasing i across lines and strictly increasing j within
    a line.  The right vertex set is the union of the listed j.  Blank
    lines are ignored.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    k: int | None = None
    adjacency: dict[int, tuple[int, ...]] = {}
    last_left = -1
    seen_data = False
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("k "):
            if seen_data:
                raise ParseError(line_no, "k header must precede data lines")
            if k is not None:
                raise ParseError(line_no, "duplicate k header")
            try:
                k = int(line[2:].strip())
            except ValueError:
                raise ParseError(line_no, f"bad k header: {line!r}") from None
            if k < 1:
                raise ParseError(line_no, "k must be >= 1")
            continue
        if not line.startswith("A "):
            raise ParseError(line_no, f"unrecognized line: {line!r}")
        head, sep, tail = line[2:].partition(":")
        if not sep:
            raise ParseError(line_no, "missing ':' in data line")
        try:
            i = int(head.strip())
        except ValueError:
            raise ParseError(line_no, f"bad left index: {head.strip()!r}") from None
        if i <= last_left:
            raise ParseError(line_no, f"left index {i} not strictly increasing")
        try:
            row = tuple(int(tok) for tok in tail.split())
        except ValueError:
            raise ParseError(line_no, "bad right index") from None
        if any(j < 0 for j in row):
            raise ParseError(line_no, "right indices must be >= 0")
        if any(x >= y for x, y in zip(row, row[1:])):
            raise ParseError(line_no, "right indices not strictly increasing")
        adjacency[i] = row
        last_left = i
        seen_data = True
    rights: set[int] = set()
    for row in adjacency.values():
        rights.update(row)
    graph = FiniteBipartiteGraph(
        tuple(sorted(adjacency)), tuple(sorted(rights)), adjacency
    )
    return graph, k


def load_finite_graph(text: str | bytes) -> FiniteBipartiteGraph:
    """Parse a .bg document, discarding the optional k header."""
    return parse_bg(text)[0]


def dump_bg(graph: FiniteBipartiteGraph, k: int | None = None) -> str:
    """Serialize a finite graph to the .bg format (inverse of parse_bg)."""
    lines = []
    if k is not None:
        lines.append(f"k {k}")
    for a in graph.left_ids:
        row = " ".join(str(j) for j in graph.adjacency.get(a, ()))
        lines.append(f"A {a}: {row}".rstrip())
    return "\n".join(lines) + ("\n" if lines else "")


def _check_sorted_unique(seq: tuple[int, ...], label: str) -> None:
    if any(x >= y for x, y in zip(seq, seq[1:])):
        raise ValueError(f"{label} must be strictly increasing")
    if any(x < 0 for x in seq):
        raise ValueError(f"{label} must be non-negative")
