"""Shared fixtures and brute-force oracles for the test suite."""

import numpy as np
import pytest

from hamlab.hostgraph import HostGraph
from hamlab.process import ProcessTrace, SnapshotGraph
from hamlab.structure import check_connected


def random_host(n, m, rng):
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    idx = rng.choice(len(pairs), size=m, replace=False)
    return HostGraph(n, [pairs[i] for i in idx])


def full_snapshot(host):
    return SnapshotGraph(host, np.arange(host.m))


def snapshot_from_edges(n, edges):
    host = HostGraph(n, edges)
    return full_snapshot(host)


def is_connected(graph) -> bool:
    return check_connected(graph)[0]


def forced_trace(host, order, red, q=0.0):
    return ProcessTrace(host, np.asarray(order), np.asarray(red, dtype=bool), q)


def all_max_paths(adj, n):
    """Every maximum-order simple path, one orientation each (DFS oracle)."""
    best = [1]
    out = []

    def dfs(path, on):
        nonlocal out
        if len(path) > best[0]:
            best[0] = len(path)
            out = []
        if len(path) == best[0]:
            out.append(tuple(path))
        for u in adj[path[-1]]:
            if not on[u]:
                on[u] = True
                path.append(u)
                dfs(path, on)
                path.pop()
                on[u] = False

    for s in range(n):
        on = [False] * n
        on[s] = True
        dfs([s], on)
    return [p for p in out if p[0] <= p[-1]]


def brute_longest_path_order(adj, n) -> int:
    best = [1]

    def dfs(path, on):
        best[0] = max(best[0], len(path))
        for u in adj[path[-1]]:
            if not on[u]:
                on[u] = True
                path.append(u)
                dfs(path, on)
                path.pop()
                on[u] = False

    for s in range(n):
        on = [False] * n
        on[s] = True
        dfs([s], on)
    return best[0]


def random_connected_graphs(rng, count, n_lo, n_hi, density=(1.0, 1.9)):
    """Yields connected random snapshot graphs with their (n, m)."""
    made = 0
    while made < count:
        n = int(rng.integers(n_lo, n_hi + 1))
        m = int(rng.integers(int(density[0] * n), int(density[1] * n) + 1))
        m = min(m, n * (n - 1) // 2)
        g = random_host(n, m, rng)
        snap = full_snapshot(g)
        if not is_connected(snap):
            continue
        made += 1
        yield snap


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240809)
