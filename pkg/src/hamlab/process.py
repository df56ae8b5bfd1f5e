"""Edge-permutation process with red/blue coloring, snapshots and hitting times.

A trace fixes one run of the process: a uniform permutation of the host's
edges plus an independent red mark per edge. Snapshots are prefix graphs
of the permutation, Bernoulli subgraphs, or color-filtered subsets.
"""

from __future__ import annotations

import math
from typing import Optional

import numpy as np

from . import hamiltonicity
from .exceptions import (FinderFailureError, InvalidParameterError,
                         NoHittingTimeError, ParseError)
from .hostgraph import HostGraph


def default_omega(n: int) -> float:
    """Slowly growing color/window parameter: logloglog n clipped to [1, loglog n]."""
    if n < 16:
        return 1.0
    lll = math.log(max(math.log(math.log(n)), 1.0000001))
    return float(min(max(lll, 1.0), math.log(math.log(n))))


class ProcessTrace:
    """One sampled run: edge permutation plus per-edge red/blue marks.

    ``order`` holds indices into ``host.edge_list``; ``red[i]`` is the mark
    of the edge inserted at step i+1. Immutable after sampling.
    """

    def __init__(self, host: HostGraph, order: np.ndarray, red: np.ndarray,
                 q: float, seed=None):
        order = np.asarray(order, dtype=np.int64)
        red = np.asarray(red, dtype=bool)
        if order.shape != (host.m,) or sorted(order.tolist()) != list(range(host.m)):
            raise InvalidParameterError("order must be a permutation of range(m)")
        if red.shape != (host.m,):
            raise InvalidParameterError("need exactly one color mark per edge")
        self.host = host
        self.order = order
        self.red = red
        self.q = q
        self.seed = seed
        # endpoints of the edge inserted at each step, in process order
        self.step_pairs = host.edge_array[order]

    @property
    def m(self) -> int:
        return self.host.m


def sample_trace(host: HostGraph, q: float, seed) -> ProcessTrace:
    """Uniform edge permutation (Fisher-Yates) with Bernoulli(q) red marks."""
    if not 0 <= q < 1:
        raise InvalidParameterError(f"need 0 <= q < 1, got {q}")
    rng = np.random.default_rng(seed)
    order = rng.permutation(host.m)
    red = rng.random(host.m) < q
    return ProcessTrace(host, order, red, q, seed=seed)


class SnapshotGraph:
    """Subgraph of the host given by a subset of edge indices.

    Degree counts are computed eagerly; adjacency sets are built lazily the
    first time a neighborhood query arrives, which keeps bulk Monte Carlo
    sampling cheap.
    """

    def __init__(self, host: HostGraph, active_index: np.ndarray):
        self.host = host
        self.n = host.n
        self.active_index = np.asarray(active_index, dtype=np.int64)
        self.m_active = int(self.active_index.size)
        if self.m_active:
            pairs = host.edge_array[self.active_index]
            self.degrees = np.bincount(pairs.ravel(), minlength=host.n)
        else:
            self.degrees = np.zeros(host.n, dtype=np.int64)
        self._adjacency = None
        self._edge_set = None

    @property
    def adjacency(self):
        if self._adjacency is None:
            adj = [set() for _ in range(self.n)]
            for u, v in self.edge_pairs():
                adj[u].add(v)
                adj[v].add(u)
            self._adjacency = adj
        return self._adjacency

    @property
    def edge_set(self):
        if self._edge_set is None:
            self._edge_set = {self.host.edge_list[i] for i in self.active_index.tolist()}
        return self._edge_set

    def edge_pairs(self):
        return [self.host.edge_list[i] for i in self.active_index.tolist()]

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adjacency[u]

    def min_degree(self) -> int:
        return int(self.degrees.min()) if self.n else 0

    def add_edge_index(self, idx: int) -> None:
        """O(1)-amortized incremental insertion keeping all views consistent."""
        u, v = self.host.edge_list[idx]
        self.active_index = np.append(self.active_index, idx)
        self.m_active += 1
        self.degrees[u] += 1
        self.degrees[v] += 1
        if self._adjacency is not None:
            self._adjacency[u].add(v)
            self._adjacency[v].add(u)
        if self._edge_set is not None:
            self._edge_set.add((u, v) if u < v else (v, u))

    def __repr__(self):
        return f"SnapshotGraph(n={self.n}, active={self.m_active}/{self.host.m})"


def snapshot(trace: ProcessTrace, t: int) -> SnapshotGraph:
    """Prefix graph after the first t insertions."""
    if not 0 <= t <= trace.m:
        raise InvalidParameterError(f"step index {t} out of range [0, {trace.m}]")
    return SnapshotGraph(trace.host, trace.order[:t])


def sample_gnp(host: HostGraph, p: float, seed) -> SnapshotGraph:
    """Bernoulli subgraph: each host edge retained independently with prob p."""
    if not 0 <= p <= 1:
        raise InvalidParameterError(f"need 0 <= p <= 1, got {p}")
    rng = np.random.default_rng(seed)
    mask = rng.random(host.m) < p
    return SnapshotGraph(host, np.flatnonzero(mask))


def blue_subgraph(trace: ProcessTrace, t: int) -> SnapshotGraph:
    """Blue edges among the first t insertions."""
    if not 0 <= t <= trace.m:
        raise InvalidParameterError(f"step index {t} out of range [0, {trace.m}]")
    prefix = trace.order[:t]
    return SnapshotGraph(trace.host, prefix[~trace.red[:t]])


def build_auxiliary(trace: ProcessTrace, t: int, medium) -> SnapshotGraph:
    """Blue edges of the prefix plus red edges touching the given vertex set.

    With t at the degree-2 hitting time and the medium classes from the blue
    snapshot this is the auxiliary graph the booster argument runs on.
    """
    if not 0 <= t <= trace.m:
        raise InvalidParameterError(f"step index {t} out of range [0, {trace.m}]")
    prefix = trace.order[:t]
    red = trace.red[:t]
    med_mask = np.zeros(trace.host.n, dtype=bool)
    for v in medium:
        med_mask[v] = True
    pairs = trace.step_pairs[:t]
    keep = ~red | med_mask[pairs[:, 0]] | med_mask[pairs[:, 1]]
    return SnapshotGraph(trace.host, prefix[keep])


def hitting_time_min_degree(trace: ProcessTrace, k: int) -> int:
    """Smallest t with min degree >= k, by one pass over the insertion order.

    Maintains the count of vertices still below k; the scan stops as soon as
    that count reaches zero.
    """
    host = trace.host
    if k <= 0:
        return 0
    if host.min_degree() < k:
        raise NoHittingTimeError(
            f"host min degree {host.min_degree()} < k={k}: no finite hitting time")
    deg = [0] * host.n
    below = host.n
    us = trace.step_pairs[:, 0].tolist()
    vs = trace.step_pairs[:, 1].tolist()
    for t in range(host.m):
        for w in (us[t], vs[t]):
            deg[w] += 1
            if deg[w] == k:
                below -= 1
        if below == 0:
            return t + 1
    raise AssertionError("unreachable: host min degree was checked")


class HamHittingResult:
    """Upper bound on the Hamiltonicity hitting time plus its certificate."""

    def __init__(self, tau_h: int, certificate, exactness: str, tau2: int):
        self.tau_h = tau_h
        self.certificate = certificate
        self.exactness = exactness  # "exact" | "upper-bound"
        self.tau2 = tau2


def hitting_time_hamiltonian(trace: ProcessTrace, *, seed, restarts: int = 20,
                             budget: Optional[int] = None, oracle_limit: int = 18,
                             tau2: Optional[int] = None) -> HamHittingResult:
    """Monotone binary search for the first prefix the finder certifies.

    Probes start at the degree-2 hitting time, since Hamiltonicity cannot
    occur earlier. Heuristic probes have one-sided error, so the result is
    always a valid upper bound; it is exact when it equals tau_2 or when the
    exact oracle serves as fallback (n within its limit).
    """
    host = trace.host
    if tau2 is None:
        tau2 = hitting_time_min_degree(trace, 2)
    exact_probe = host.n <= oracle_limit

    def probe(t: int):
        graph = snapshot(trace, t)
        res = hamiltonicity.find_hamilton(
            graph, seed=np.random.SeedSequence((seed, t)).entropy, restarts=restarts,
            budget=budget)
        if res.certificate is not None:
            return res.certificate
        if exact_probe:
            ok, cycle = hamiltonicity.exact_hamiltonian(graph, limit=oracle_limit)
            if ok:
                return hamiltonicity.HamCertificate(cycle)
        return None

    cert = probe(tau2)
    if cert is not None:
        return HamHittingResult(tau2, cert, "exact", tau2)
    cert_hi = probe(host.m)
    if cert_hi is None:
        raise FinderFailureError(
            f"no Hamilton cycle found in the full host (n={host.n}, m={host.m}); "
            f"restarts={restarts}")
    lo, hi = tau2, host.m
    while hi - lo > 1:
        mid = (lo + hi) // 2
        cert = probe(mid)
        if cert is not None:
            hi, cert_hi = mid, cert
        else:
            lo = mid
    exactness = "exact" if (exact_probe or hi == tau2) else "upper-bound"
    return HamHittingResult(hi, cert_hi, exactness, tau2)


def save_trace(trace: ProcessTrace, path) -> None:
    """Persist as a 'seed q' header plus one 'edge_index color_bit' line per step."""
    with open(path, "w", encoding="ascii") as fh:
        seed = trace.seed if trace.seed is not None else -1
        fh.write(f"{seed} {trace.q!r}\n")
        for idx, red in zip(trace.order.tolist(), trace.red.tolist()):
            fh.write(f"{idx} {1 if red else 0}\n")


def load_trace(host: HostGraph, path) -> ProcessTrace:
    with open(path, "r", encoding="ascii") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise ParseError("empty trace file", line=1)
    head = lines[0].split()
    if len(head) != 2:
        raise ParseError(f"expected 'seed q' header, got {lines[0]!r}", line=1)
    try:
        seed = int(head[0])
        q = float(head[1])
    except ValueError:
        raise ParseError(f"bad header {lines[0]!r}", line=1) from None
    order, red = [], []
    for lineno, raw in enumerate(lines[1:], start=2):
        if not raw.strip():
            continue
        parts = raw.split()
        if len(parts) != 2 or parts[1] not in ("0", "1"):
            raise ParseError(f"expected 'edge_index color_bit', got {raw!r}", line=lineno)
        try:
            order.append(int(parts[0]))
        except ValueError:
            raise ParseError(f"bad edge index {raw!r}", line=lineno) from None
        red.append(parts[1] == "1")
    if len(order) != host.m:
        raise ParseError(f"expected {host.m} steps, found {len(order)}", line=1)
    return ProcessTrace(host, np.array(order), np.array(red), q,
                        seed=None if seed == -1 else seed)
