"""Erdos-Renyi interaction graphs with flat adjacency storage.

Graphs are undirected, simple (no self-loops or duplicate edges) and
immutable once built.  Adjacency is stored as one contiguous neighbor
array plus per-node offsets, so neighbor lookup and a uniform neighbor
draw are O(1) and cache-friendly inside the event loop.

Generation uses the binomial G(n, p) model with p = avg_degree / (n - 1):
every unordered pair is included independently, which keeps degree
statistics exactly binomial.  Isolated nodes are kept as generated; the
dynamics layer defines their behavior.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import IO, Iterator, NamedTuple

import numpy as np

from . import _kernels
from .errors import ParamError, ParseError
from .rng import Xoshiro256StarStar


@dataclass
class Graph:
    """Undirected graph over nodes 0..node_count-1 in compressed form.

    ``neighbors[offsets[u]:offsets[u + 1]]`` lists the neighbors of u; each
    edge appears in both endpoint lists.
    """

    node_count: int
    offsets: np.ndarray = field(repr=False)  # int64[node_count + 1]
    neighbors: np.ndarray = field(repr=False)  # int64[2 * edge_count]

    @property
    def edge_count(self) -> int:
        return len(self.neighbors) // 2

    def degree(self, u: int) -> int:
        return int(self.offsets[u + 1] - self.offsets[u])

    def neighbors_of(self, u: int) -> np.ndarray:
        if not 0 <= u < self.node_count:
            raise IndexError(f"node {u} out of range [0, {self.node_count})")
        return self.neighbors[self.offsets[u]:self.offsets[u + 1]]

    def edges(self) -> Iterator[tuple[int, int]]:
        """Yield each edge once as (u, v) with u < v, ordered by u then v."""
        for u in range(self.node_count):
            block = np.sort(self.neighbors_of(u))
            for v in block[block > u]:
                yield u, int(v)


class DegreeStats(NamedTuple):
    mean: float
    min: int
    max: int
    isolated_count: int


def from_edge_pairs(node_count: int, us: np.ndarray, vs: np.ndarray) -> Graph:
    """Build the compressed adjacency from edge endpoint arrays (u < v)."""
    us = np.asarray(us, dtype=np.int64)
    vs = np.asarray(vs, dtype=np.int64)
    src = np.concatenate([us, vs])
    dst = np.concatenate([vs, us])
    degrees = np.bincount(src, minlength=node_count)
    offsets = np.zeros(node_count + 1, dtype=np.int64)
    np.cumsum(degrees, out=offsets[1:])
    order = np.argsort(src, kind="stable")
    neighbors = np.ascontiguousarray(dst[order])
    return Graph(node_count=node_count, offsets=offsets, neighbors=neighbors)


def generate_er(n: int, avg_degree: float, rng: Xoshiro256StarStar) -> Graph:
    """Sample a binomial G(n, p) graph with p = avg_degree / (n - 1).

    The realized mean degree is a random variable with expectation
    ``avg_degree``.  Deterministic for a fixed (n, avg_degree, rng state).
    """
    if n < 2:
        raise ParamError(f"node count {n} must be at least 2")
    if avg_degree < 0:
        raise ParamError(f"average degree {avg_degree} must be non-negative")
    if avg_degree > n - 1:
        raise ParamError(
            f"average degree {avg_degree} exceeds {n - 1}; edge probability > 1"
        )
    p_edge = avg_degree / (n - 1)
    if p_edge == 0.0:
        empty = np.empty(0, dtype=np.int64)
        return from_edge_pairs(n, empty, empty)
    if p_edge == 1.0:
        us, vs = np.triu_indices(n, k=1)
        return from_edge_pairs(n, us, vs)

    mean_edges = n * (n - 1) / 2 * p_edge
    cap = int(mean_edges + 12.0 * np.sqrt(mean_edges) + 64)
    start_state = rng.state_array()
    while True:
        us = np.empty(cap, dtype=np.int64)
        vs = np.empty(cap, dtype=np.int64)
        state = start_state.copy()
        count = _kernels.er_pairs(n, p_edge, us, vs, state)
        if count >= 0:
            break
        cap *= 2  # buffer overflow is ~12-sigma rare; retry, same stream
    rng.set_state_array(state)
    return from_edge_pairs(n, us[:count], vs[:count])


def random_neighbor(g: Graph, u: int, rng: Xoshiro256StarStar) -> int | None:
    """Uniform draw from u's neighbors; None when u is isolated."""
    if not 0 <= u < g.node_count:
        raise IndexError(f"node {u} out of range [0, {g.node_count})")
    lo = int(g.offsets[u])
    deg = int(g.offsets[u + 1]) - lo
    if deg == 0:
        return None
    return int(g.neighbors[lo + rng.randbelow(deg)])


def degree_stats(g: Graph) -> DegreeStats:
    """Exact degree statistics over the adjacency lists."""
    degrees = np.diff(g.offsets)
    if g.node_count == 0:
        return DegreeStats(0.0, 0, 0, 0)
    return DegreeStats(
        mean=float(degrees.mean()),
        min=int(degrees.min()),
        max=int(degrees.max()),
        isolated_count=int(np.count_nonzero(degrees == 0)),
    )


def write_edge_list(g: Graph, sink: IO[str]) -> None:
    """Write the text edge list: `# nodes=<N>` header, then `u,v` with u < v."""
    sink.write(f"# nodes={g.node_count}\n")
    for u, v in g.edges():
        sink.write(f"{u},{v}\n")


def read_edge_list(source: IO[str]) -> Graph:
    """Parse the edge-list format back into a Graph.

    Round-trips ``write_edge_list`` output up to neighbor ordering.  Raises
    ``ParseError`` with the offending line number on malformed input.
    """
    node_count = None
    us: list[int] = []
    vs: list[int] = []
    seen: set[tuple[int, int]] = set()
    for lineno, raw in enumerate(source, start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("nodes="):
                try:
                    node_count = int(body[len("nodes="):])
                except ValueError:
                    raise ParseError(f"bad node count {body!r}", lineno) from None
            continue
        if node_count is None:
            raise ParseError("edge before mandatory '# nodes=<N>' header", lineno)
        parts = line.split(",")
        if len(parts) != 2:
            raise ParseError(f"expected 'u,v', got {line!r}", lineno)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"non-integer endpoint in {line!r}", lineno) from None
        if u == v:
            raise ParseError(f"self-loop {u},{v}", lineno)
        if not (0 <= u < v < node_count):
            raise ParseError(
                f"endpoints {u},{v} must satisfy 0 <= u < v < {node_count}", lineno
            )
        if (u, v) in seen:
            raise ParseError(f"duplicate edge {u},{v}", lineno)
        seen.add((u, v))
        us.append(u)
        vs.append(v)
    if node_count is None:
        raise ParseError("missing mandatory '# nodes=<N>' header", 1)
    return from_edge_pairs(node_count, np.array(us, dtype=np.int64),
                           np.array(vs, dtype=np.int64))
