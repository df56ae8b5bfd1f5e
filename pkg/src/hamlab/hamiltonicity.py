"""Longest-path and Hamilton-cycle search by rotation-extension.

The search machinery follows the classic recipe: grow a path greedily,
and when stuck compute the closure of reachable endpoints under rotations
with one end fixed, looking for an extension, a cycle closure, or a way to
re-open a short cycle through an outside vertex. A bitmask dynamic program
over (vertex subset, endpoint) states provides exact ground truth at small n.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .exceptions import (InvalidParameterError, InvalidRotationError,
                         InvalidStateError, OracleUnavailableError)

DEFAULT_ORACLE_LIMIT = 18
BUDGET_PER_VERTEX = 50  # rotation cap per restart is this times n


@dataclass
class HamCertificate:
    """A Hamilton cycle as a vertex sequence of length n."""

    cycle: list[int]

    def validate(self, graph) -> bool:
        n = graph.n
        c = self.cycle
        if len(c) != n or len(set(c)) != n:
            return False
        return all(graph.has_edge(c[i], c[(i + 1) % n]) for i in range(n))

    def serialize(self) -> str:
        return "HAM: " + " ".join(str(v) for v in self.cycle)

    @classmethod
    def parse(cls, line: str) -> "HamCertificate":
        if not line.startswith("HAM: "):
            raise InvalidParameterError(f"not a certificate line: {line!r}")
        return cls([int(tok) for tok in line[5:].split()])


def rotate(path: Sequence[int], i: int, graph) -> list[int]:
    """Pósa rotation at pivot i with the start fixed.

    (v0,...,vl) with chord {vl, vi} becomes (v0,...,vi, vl, vl-1,...,vi+1);
    the vertex set and length are unchanged and vi+1 is the new endpoint.
    """
    ell = len(path) - 1
    if i < 0 or i > ell - 2:
        raise InvalidRotationError(f"pivot {i} out of range for path of length {ell}")
    if not graph.has_edge(path[-1], path[i]):
        raise InvalidRotationError(f"chord ({path[-1]},{path[i]}) not active")
    path = list(path)
    return path[:i + 1] + path[:i:-1]


@dataclass
class EndpointClosure:
    """Endpoints reachable by rotations with ``anchor`` fixed.

    ``witness`` maps each endpoint to one path realizing it (anchor first);
    ``derivation`` maps it to (previous endpoint, pivot index), forming the
    rotation pointer chain back to the unrotated input path.
    """

    anchor: int
    endpoints: frozenset[int]
    witness: dict[int, tuple[int, ...]]
    derivation: dict[int, Optional[tuple[int, int]]]


def endpoint_set(graph, path: Sequence[int], v0: Optional[int] = None) -> EndpointClosure:
    """Closure of reachable endpoints under zero or more rotations, v0 fixed.

    Breadth-first over newly discovered endpoints, pivot ties broken by
    ascending index, so derivations are reproducible. The unrotated endpoint
    is a member (zero rotations). The input should be a maximal path;
    off-path neighbors are ignored here.
    """
    path = list(path)
    if v0 is not None and path[-1] == v0 and path[0] != v0:
        path.reverse()
    if v0 is not None and path[0] != v0:
        raise InvalidParameterError(f"v0={v0} is not an endpoint of the path")
    adj = graph.adjacency
    root = tuple(path)
    witness = {root[-1]: root}
    derivation: dict[int, Optional[tuple[int, int]]] = {root[-1]: None}
    queue = deque([root])
    while queue:
        cur = queue.popleft()
        y = cur[-1]
        pos = {v: i for i, v in enumerate(cur)}
        top = len(cur) - 3
        pivots = sorted(pos[u] for u in adj[y] if u in pos and pos[u] <= top)
        for i in pivots:
            new_end = cur[i + 1]
            if new_end in witness:
                continue
            rotated = cur[:i + 1] + cur[:i:-1]
            witness[new_end] = rotated
            derivation[new_end] = (y, i)
            queue.append(rotated)
    return EndpointClosure(root[0], frozenset(witness), witness, derivation)


class PathSystem:
    """A path with lazily computed endpoint closures for either end."""

    def __init__(self, graph, path: Sequence[int]):
        path = list(path)
        if len(set(path)) != len(path):
            raise InvalidParameterError("path repeats a vertex")
        for a, b in zip(path, path[1:]):
            if not graph.has_edge(a, b):
                raise InvalidParameterError(f"({a},{b}) is not an active edge")
        self.graph = graph
        self.path = tuple(path)
        self._closures: dict[int, EndpointClosure] = {}

    def closure(self, v0: Optional[int] = None) -> EndpointClosure:
        if v0 is None:
            v0 = self.path[0]
        if v0 not in (self.path[0], self.path[-1]):
            raise InvalidParameterError(f"{v0} is not an endpoint of this path")
        if v0 not in self._closures:
            self._closures[v0] = endpoint_set(self.graph, self.path, v0)
        return self._closures[v0]

    def ep(self, v0: Optional[int] = None) -> frozenset[int]:
        return self.closure(v0).endpoints

    def rotate(self, i: int) -> list[int]:
        return rotate(self.path, i, self.graph)

    @property
    def order(self) -> int:
        return len(self.path)


@dataclass
class FinderResult:
    certificate: Optional[HamCertificate]
    best_path: list[int]
    restarts_used: int
    rotations: int
    disconnected: bool = False
    component_sizes: Optional[list[int]] = None

    def path_system(self, graph) -> PathSystem:
        return PathSystem(graph, self.best_path)


def _components(adj, n):
    seen = bytearray(n)
    comps = []
    for s in range(n):
        if seen[s]:
            continue
        seen[s] = 1
        comp = [s]
        stack = [s]
        while stack:
            v = stack.pop()
            for u in adj[v]:
                if not seen[u]:
                    seen[u] = 1
                    comp.append(u)
                    stack.append(u)
        comps.append(comp)
    return comps


def _grow(path, on_path, adj_lists, rng):
    v = path[-1]
    while True:
        cands = [w for w in adj_lists[v] if not on_path[w]]
        if not cands:
            return
        v = cands[rng.randrange(len(cands))]
        path.append(v)
        on_path[v] = 1


def _reopen(cur, adj_lists, on_path):
    # cur closes into a cycle; open it through any edge to an outside vertex
    for idx in range(len(cur)):
        for w in adj_lists[cur[idx]]:
            if not on_path[w]:
                return [w] + list(cur[idx::-1]) + list(cur[:idx:-1])
    return None


def _bfs_round(cur_path, on_path, adj_sets, adj_lists, n, rot_left):
    """One rotation closure with the start of cur_path fixed.

    Returns (kind, payload, rot_left) with kind in 'extend', 'ham',
    'reopen', 'saturated', 'exhausted'.
    """
    v0 = cur_path[0]
    root = tuple(cur_path)
    witness = {root[-1]: root}
    queue = deque([root])
    while queue:
        cur = queue.popleft()
        y = cur[-1]
        for u in adj_lists[y]:
            if not on_path[u]:
                return "extend", list(cur) + [u], rot_left
        if v0 in adj_sets[y]:
            if len(cur) == n:
                return "ham", list(cur), rot_left
            reopened = _reopen(cur, adj_lists, on_path)
            if reopened is not None:
                return "reopen", reopened, rot_left
            # the cycle spans a whole component; keep rotating
        pos = {v: i for i, v in enumerate(cur)}
        top = len(cur) - 3
        pivots = sorted(pos[u] for u in adj_lists[y] if pos.get(u, n) <= top)
        for i in pivots:
            new_end = cur[i + 1]
            if new_end in witness:
                continue
            if rot_left <= 0:
                return "exhausted", witness, 0
            rot_left -= 1
            rotated = cur[:i + 1] + cur[:i:-1]
            witness[new_end] = rotated
            queue.append(rotated)
    return "saturated", witness, rot_left


MAX_ANCHOR_FLIPS = 8  # per restart, before giving up on the current path


def find_hamilton(graph, *, seed, restarts: int = 20, budget: Optional[int] = None) -> FinderResult:
    """Randomized rotation-extension search for a Hamilton cycle.

    One-sided: a returned certificate is always a valid cycle; returning
    none proves nothing. On failure the longest path encountered is
    reported. Deterministic given the seed.
    """
    n = graph.n
    if n == 0:
        raise InvalidParameterError("empty graph")
    if budget is None:
        budget = BUDGET_PER_VERTEX * n
    rng = random.Random(seed if isinstance(seed, int) else hash(seed))
    adj_sets = graph.adjacency
    adj_lists = [sorted(s) for s in adj_sets]
    comps = _components(adj_lists, n)
    disconnected = len(comps) > 1
    if disconnected:
        restarts = min(restarts, 1)  # no cycle exists; one pass for a best path

    best: list[int] = []
    rotations = 0
    comp_sizes = [len(c) for c in comps] if disconnected else None
    for attempt in range(max(restarts, 1)):
        rot_left = budget
        start = rng.randrange(n)
        path = [start]
        on_path = bytearray(n)
        on_path[start] = 1
        _grow(path, on_path, adj_lists, rng)
        flips = 0
        while True:
            if len(path) > len(best):
                best = list(path)
            kind, payload, rot_left = _bfs_round(path, on_path, adj_sets, adj_lists, n, rot_left)
            if kind == "ham":
                rotations += budget - rot_left
                cert = HamCertificate(payload)
                if not cert.validate(graph):
                    raise AssertionError("finder produced an invalid cycle")
                return FinderResult(cert, payload, attempt + 1, rotations,
                                    disconnected, comp_sizes)
            if kind in ("extend", "reopen"):
                path = payload
                on_path[path[0] if kind == "reopen" else path[-1]] = 1
                _grow(path, on_path, adj_lists, rng)
                continue
            if kind == "saturated" and flips < MAX_ANCHOR_FLIPS:
                flips += 1
                ends = sorted(payload)
                pick = payload[ends[rng.randrange(len(ends))]]
                path = list(reversed(pick))
                continue
            break  # exhausted budget or out of anchor flips
        if len(path) > len(best):
            best = list(path)
        rotations += budget - rot_left
    return FinderResult(None, best, max(restarts, 1), rotations,
                        disconnected, comp_sizes)


def _adjacency_masks(graph):
    amask = [0] * graph.n
    for v in range(graph.n):
        for u in graph.adjacency[v]:
            amask[v] |= 1 << u
    return amask


def exact_hamiltonian(graph, limit: int = DEFAULT_ORACLE_LIMIT):
    """Exact Hamiltonicity decision by subset/endpoint dynamic programming.

    Returns (decision, cycle-or-None). Raises beyond the size limit; the
    state table is 2^n ints.
    """
    n = graph.n
    if n > limit:
        raise OracleUnavailableError(f"n={n} exceeds oracle limit {limit}")
    if n < 3:
        return False, None
    if graph.min_degree() < 2:
        return False, None
    amask = _adjacency_masks(graph)
    dp = [0] * (1 << n)
    dp[1] = 1
    for mask in range(1, 1 << n, 2):  # paths are rooted at vertex 0
        ends = dp[mask]
        while ends:
            bit = ends & (-ends)
            ends ^= bit
            v = bit.bit_length() - 1
            ext = amask[v] & ~mask
            while ext:
                bu = ext & (-ext)
                ext ^= bu
                dp[mask | bu] |= bu
    full = (1 << n) - 1
    closers = dp[full] & amask[0] & ~1
    if not closers:
        return False, None
    v = (closers & (-closers)).bit_length() - 1
    mask = full
    tail = [v]
    while mask != 1:
        prev_mask = mask ^ (1 << v)
        cands = dp[prev_mask] & amask[v]
        bit = cands & (-cands)
        v = bit.bit_length() - 1
        tail.append(v)
        mask = prev_mask
    return True, list(reversed(tail))


def exact_longest_path(graph, limit: int = DEFAULT_ORACLE_LIMIT) -> list[int]:
    """One maximum-order path, by the same dynamic program over all roots."""
    n = graph.n
    if n > limit:
        raise OracleUnavailableError(f"n={n} exceeds oracle limit {limit}")
    if n == 0:
        return []
    amask = _adjacency_masks(graph)
    dp = [0] * (1 << n)
    for v in range(n):
        dp[1 << v] = 1 << v
    best_count, best_mask, best_v = 1, 1, 0
    for mask in range(1, 1 << n):
        ends = dp[mask]
        if not ends:
            continue
        count = mask.bit_count()
        if count > best_count:
            best_count = count
            best_mask = mask
            best_v = (ends & (-ends)).bit_length() - 1
        t = ends
        while t:
            bit = t & (-t)
            t ^= bit
            v = bit.bit_length() - 1
            ext = amask[v] & ~mask
            while ext:
                bu = ext & (-ext)
                ext ^= bu
                dp[mask | bu] |= bu
    mask, v = best_mask, best_v
    tail = [v]
    while mask.bit_count() > 1:
        prev_mask = mask ^ (1 << v)
        cands = dp[prev_mask] & amask[v]
        bit = cands & (-cands)
        v = bit.bit_length() - 1
        tail.append(v)
        mask = prev_mask
    return list(reversed(tail))


def _is_connected(graph) -> bool:
    n = graph.n
    if n == 0:
        return True
    return len(_components(graph.adjacency, n)) == 1


def _validate_path(graph, path) -> None:
    if len(set(path)) != len(path):
        raise InvalidParameterError("path repeats a vertex")
    for a, b in zip(path, path[1:]):
        if not graph.has_edge(a, b):
            raise InvalidParameterError(f"({a},{b}) is not an active edge")


def booster_pairs(host, graph, longest: Sequence[int]) -> set[tuple[int, int]]:
    """Host-edge endpoint pairs witnessed by the alternating rotation closure.

    Anchors start at both ends of the supplied path; each newly discovered
    endpoint is later expanded as an anchor of its own witness path, until
    no anchor is left. Every returned pair {x, y} is realized by an explicit
    path of the same order with endpoints x and y.
    """
    path = tuple(longest)
    _validate_path(graph, path)
    if not _is_connected(graph):
        raise InvalidStateError("booster count requires a connected graph")
    n = graph.n
    agenda = deque([path, tuple(reversed(path))])
    closures: dict[int, EndpointClosure] = {}
    while agenda:
        witness = agenda.popleft()
        anchor = witness[0]
        if anchor in closures:
            continue
        closure = endpoint_set(graph, witness)
        closures[anchor] = closure
        for y, wit in closure.witness.items():
            if y not in closures:
                agenda.append(tuple(reversed(wit)))
    if len(path) == n:
        for anchor, closure in closures.items():
            if any(graph.has_edge(anchor, y) for y in closure.endpoints):
                raise InvalidStateError("graph is Hamiltonian; booster count undefined")
    pairs = set()
    for anchor, closure in closures.items():
        for y in closure.endpoints:
            if y != anchor and host.has_edge(anchor, y):
                pairs.add((anchor, y) if anchor < y else (y, anchor))
    return pairs


def count_boosters(host, graph, longest: Sequence[int]) -> int:
    """Number of host edges joining rotation-reachable endpoint pairs.

    Each counted edge, added to a connected non-Hamiltonian graph, closes a
    cycle through the vertex set of a maximum path and therefore lengthens
    the longest path or completes a Hamilton cycle.
    """
    return len(booster_pairs(host, graph, longest))


def verify_posa_condition(graph, longest: Sequence[int], v0: int) -> bool:
    """Check |N(EP(v0))| < 2|EP(v0)| for a maximum-length path.

    This inequality always holds on connected non-Hamiltonian graphs when
    the input path really is maximum-length, so a False return flags a bug
    or a non-maximal input.
    """
    closure = endpoint_set(graph, longest, v0)
    ep = closure.endpoints
    nbhd = set()
    for y in ep:
        nbhd |= graph.adjacency[y]
    nbhd -= ep
    return len(nbhd) < 2 * len(ep)
