"""Pilot: finder soundness/completeness + booster closure vs brute force at small n."""
import itertools
import time

import numpy as np

import hamlab
from hamlab.process import SnapshotGraph
from hamlab.hostgraph import HostGraph
from hamlab import hamiltonicity


def random_graph(n, m, rng):
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    idx = rng.choice(len(pairs), size=m, replace=False)
    return HostGraph(n, [pairs[i] for i in idx])


def as_snapshot(host):
    return SnapshotGraph(host, np.arange(host.m))


def connected(g):
    from hamlab.structure import check_connected
    return check_connected(as_snapshot(g))[0]


def all_max_paths(adj, n):
    """All maximum-order simple paths, canonical orientation."""
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


rng = np.random.default_rng(42)

# --- finder vs oracle on random connected graphs, n=10
t0 = time.time()
mism = 0
count = 0
ham_count = 0
while count < 300:
    n = 10
    m = int(rng.integers(10, 26))
    g = random_graph(n, m, rng)
    if not connected(g):
        continue
    count += 1
    snap = as_snapshot(g)
    exact, _ = hamiltonicity.exact_hamiltonian(snap)
    res = hamiltonicity.find_hamilton(snap, seed=int(rng.integers(2**60)), restarts=50)
    found = res.certificate is not None
    ham_count += exact
    if found != exact:
        mism += 1
        print("MISMATCH", exact, found, g.edge_list)
print(f"finder vs oracle: {count} graphs, {ham_count} hamiltonian, {mism} mismatches, {time.time()-t0:.1f}s")

# --- booster closure vs brute force over all max paths
t0 = time.time()
agree = 0
total = 0
under = 0
for trial in range(300):
    n = 9
    m = int(rng.integers(9, 17))
    g = random_graph(n, m, rng)
    if not connected(g):
        continue
    snap = as_snapshot(g)
    exact, _ = hamiltonicity.exact_hamiltonian(snap)
    if exact:
        continue
    total += 1
    longest = hamiltonicity.exact_longest_path(snap)
    pairs_closure = hamiltonicity.booster_pairs(g, snap, longest)
    allp = all_max_paths(snap.adjacency, n)
    pairs_true = set()
    for p in allp:
        x, y = p[0], p[-1]
        if g.has_edge(x, y):
            pairs_true.add((min(x, y), max(x, y)))
    if pairs_closure == pairs_true:
        agree += 1
    else:
        under += 1
        if not pairs_closure <= pairs_true:
            print("UNSOUND!", sorted(pairs_closure - pairs_true), g.edge_list)
print(f"boosters: {total} non-ham instances, {agree} equal, {under} strict-subset, {time.time()-t0:.1f}s")
