"""Construction, validation and persistence of dense host graphs.

The host graph is the fixed graph whose edges are later revealed one at a
time by the random process, or sampled independently. Generators return
simple graphs; a host built to satisfy a minimum-degree fraction carries
that fraction as a tag so downstream checks can recover it.
"""

from __future__ import annotations

import math
from typing import Iterable, Optional

import numpy as np

from .exceptions import GenerationFailedError, InvalidParameterError, ParseError

SWITCH_ROUNDS = 3  # degree-preserving switches per edge when randomizing


def min_degree_floor(n: int, beta: float) -> int:
    """Degree floor used everywhere: ceiling, never rounding down."""
    return math.ceil(beta * n)


class HostGraph:
    """Simple undirected graph on vertices 0..n-1 with O(1) adjacency queries.

    Immutable after construction and safe to share across trial workers.
    ``edge_list`` is sorted lexicographically and is the canonical index
    order used by process traces.
    """

    def __init__(self, n: int, edges: Iterable[tuple[int, int]], dirac_beta: Optional[float] = None):
        if n < 1:
            raise InvalidParameterError(f"need at least one vertex, got n={n}")
        norm = set()
        for u, v in edges:
            if u == v:
                raise InvalidParameterError(f"loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise InvalidParameterError(f"edge ({u},{v}) out of range for n={n}")
            norm.add((u, v) if u < v else (v, u))
        self.n = n
        self.edge_list = tuple(sorted(norm))
        self.edge_set = frozenset(self.edge_list)
        self.m = len(self.edge_list)
        adjacency = [set() for _ in range(n)]
        for u, v in self.edge_list:
            adjacency[u].add(v)
            adjacency[v].add(u)
        self.adjacency = tuple(adjacency)
        self.degrees = np.array([len(a) for a in adjacency], dtype=np.int64)
        self.dirac_beta = dirac_beta
        self._edge_array = None

    @property
    def edge_array(self) -> np.ndarray:
        """(m, 2) vertex-pair array in canonical edge order (cached)."""
        if self._edge_array is None:
            self._edge_array = np.array(self.edge_list, dtype=np.int64).reshape(self.m, 2)
        return self._edge_array

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adjacency[u]

    def neighbors(self, v: int):
        return self.adjacency[v]

    def min_degree(self) -> int:
        return int(self.degrees.min()) if self.n else 0

    def __repr__(self):
        tag = f", dirac({self.dirac_beta})" if self.dirac_beta is not None else ""
        return f"HostGraph(n={self.n}, m={self.m}{tag})"


def validate_min_degree(g: HostGraph, beta: float) -> bool:
    """True iff every vertex has degree at least ceil(beta * n)."""
    return g.min_degree() >= min_degree_floor(g.n, beta)


def generate_complete(n: int) -> HostGraph:
    """K_n; rejects n < 3 since the process needs minimum degree 2."""
    if n < 3:
        raise InvalidParameterError(f"complete host needs n >= 3, got {n}")
    edges = [(u, v) for u in range(n) for v in range(u + 1, n)]
    return HostGraph(n, edges, dirac_beta=(n - 1) / n)


def _circulant_edges(n: int, d: int) -> set[tuple[int, int]]:
    """d-regular circulant: offsets 1..d//2, plus the antipode when d is odd."""
    edges = set()
    for j in range(1, d // 2 + 1):
        for v in range(n):
            u = (v + j) % n
            edges.add((u, v) if u < v else (v, u))
    if d % 2 == 1:
        # n is even here (n*d even), so the antipodal matching exists
        half = n // 2
        for v in range(half):
            edges.add((v, v + half))
    return edges


def _switch_randomize(edges: set[tuple[int, int]], rng: np.random.Generator,
                      rounds: int = SWITCH_ROUNDS) -> set[tuple[int, int]]:
    """Shuffle a simple graph by random degree-preserving double-edge switches.

    Proposals creating loops or duplicate edges are rejected, so the result
    stays simple with the exact same degree sequence.
    """
    lst = list(edges)
    eset = set(edges)
    m = len(lst)
    if m < 2:
        return eset
    for _ in range(rounds * m):
        i = int(rng.integers(m))
        j = int(rng.integers(m))
        if i == j:
            continue
        a, b = lst[i]
        c, d = lst[j]
        if len({a, b, c, d}) < 4:
            continue
        if rng.integers(2):
            p1, p2 = (min(a, d), max(a, d)), (min(c, b), max(c, b))
        else:
            p1, p2 = (min(a, c), max(a, c)), (min(b, d), max(b, d))
        if p1 in eset or p2 in eset:
            continue
        eset.discard(lst[i])
        eset.discard(lst[j])
        eset.add(p1)
        eset.add(p2)
        lst[i] = p1
        lst[j] = p2
    return eset


def generate_regular(n: int, d: int, seed: int) -> HostGraph:
    """Random simple d-regular graph on n vertices, deterministic per seed.

    Starts from a circulant and randomizes by edge switching. The sample is
    not uniform over d-regular graphs; any simple d-regular output is
    acceptable for the degree-hypothesis experiments.
    """
    if n < 1 or d < 0 or d >= n:
        raise InvalidParameterError(f"need 0 <= d < n, got n={n}, d={d}")
    if (n * d) % 2 != 0:
        raise InvalidParameterError(f"n*d must be even, got n={n}, d={d}")
    rng = np.random.default_rng(seed)
    edges = _circulant_edges(n, d)
    edges = _switch_randomize(edges, rng)
    beta = d / n if d / n > 0.5 else None
    return HostGraph(n, edges, dirac_beta=beta)


def _havel_hakimi(targets: list[int]) -> set[tuple[int, int]]:
    """Realize a degree sequence as a simple graph (largest-first greedy)."""
    remaining = [(t, v) for v, t in enumerate(targets) if t > 0]
    edges = set()
    while remaining:
        remaining.sort(reverse=True)
        t, v = remaining[0]
        rest = remaining[1:]
        if t > len(rest):
            raise GenerationFailedError(
                f"degree sequence not realizable: vertex {v} needs {t} partners, "
                f"only {len(rest)} available")
        for idx in range(t):
            tu, u = rest[idx]
            edges.add((u, v) if u < v else (v, u))
            rest[idx] = (tu - 1, u)
        remaining = [x for x in rest if x[0] > 0]
    return edges


def generate_dirac_profile(n: int, beta: float, eps_frac: float, seed: int) -> HostGraph:
    """Host with minimum degree exactly ceil(beta*n) hit by a quota of vertices.

    At least ceil(eps_frac*n) vertices end up with degree exactly the floor
    and no vertex falls below it. Built as K_n minus a randomized removal
    graph whose degree sequence encodes the quota.
    """
    if not 0.5 < beta < 1:
        raise InvalidParameterError(f"need 1/2 < beta < 1, got {beta}")
    if not 0 < eps_frac <= 1:
        raise InvalidParameterError(f"need 0 < eps_frac <= 1, got {eps_frac}")
    if n < 4:
        raise InvalidParameterError(f"need n >= 4, got {n}")
    floor = min_degree_floor(n, beta)
    if floor > n - 1:
        raise InvalidParameterError(f"degree floor {floor} exceeds n-1={n - 1}")
    r = n - 1 - floor  # removals per at-minimum vertex
    if r == 0:
        return generate_complete(n)

    quota = math.ceil(eps_frac * n)
    rng = np.random.default_rng(seed)
    order = rng.permutation(n)
    targets = [0] * n
    for v in order[:quota]:
        targets[int(v)] = r
    if quota - 1 < r:
        # too few quota vertices to absorb the removals among themselves;
        # pull everyone down to the floor (still "at least" the quota)
        targets = [r] * n
    if sum(targets) % 2 == 1:
        flexible = [int(v) for v in order[quota:]]
        if not flexible:
            raise GenerationFailedError(
                f"odd removal mass with every vertex at the floor (n={n}, beta={beta})")
        targets[flexible[0]] = 1 if targets[flexible[0]] == 0 else targets[flexible[0]] - 1
    removal = _havel_hakimi(targets)
    removal = _switch_randomize(removal, rng)
    edges = [(u, v) for u in range(n) for v in range(u + 1, n)
             if (u, v) not in removal]
    g = HostGraph(n, edges, dirac_beta=beta)
    if g.min_degree() != floor:
        raise GenerationFailedError(
            f"construction missed the floor: min degree {g.min_degree()} != {floor}")
    if int((g.degrees == floor).sum()) < quota:
        raise GenerationFailedError("at-minimum quota not met")
    return g


def save_edge_list(g: HostGraph, path) -> None:
    """Write the host as 'n m' header plus one 'u v' line per edge."""
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"{g.n} {g.m}\n")
        for u, v in g.edge_list:
            fh.write(f"{u} {v}\n")


def load_edge_list(path) -> HostGraph:
    """Parse the edge-list format; malformed input raises ParseError."""
    with open(path, "r", encoding="ascii") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise ParseError("empty file", line=1)
    head = lines[0].split()
    if len(head) != 2:
        raise ParseError(f"expected 'n m' header, got {lines[0]!r}", line=1)
    try:
        n, m = int(head[0]), int(head[1])
    except ValueError:
        raise ParseError(f"non-integer header {lines[0]!r}", line=1) from None
    edges = set()
    for lineno, raw in enumerate(lines[1:], start=2):
        if not raw.strip():
            continue
        parts = raw.split()
        if len(parts) != 2:
            raise ParseError(f"expected 'u v', got {raw!r}", line=lineno)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"non-integer endpoints {raw!r}", line=lineno) from None
        if u == v:
            raise ParseError(f"loop at vertex {u}", line=lineno)
        if not (0 <= u < v < n):
            raise ParseError(f"expected 0 <= u < v < n, got {raw!r}", line=lineno)
        if (u, v) in edges:
            raise ParseError(f"duplicate edge {u} {v}", line=lineno)
        edges.add((u, v))
    if len(edges) != m:
        raise ParseError(f"header claims {m} edges, found {len(edges)}", line=1)
    return HostGraph(n, edges)
