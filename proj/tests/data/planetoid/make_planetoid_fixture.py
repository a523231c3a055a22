"""Writes a 12-node dataset in the planetoid pickle layout (ind.tiny.*).

Nodes 0-7 are in allx/ally (0-2 also in x/y), nodes 8-11 are the test rows,
stored shuffled as tx/ty with ind.tiny.test.index giving their ids.
Run from this directory: python3 make_planetoid_fixture.py
"""
import collections
import pickle

import numpy as np
import scipy.sparse as sp

N, F, C = 12, 5, 3
labels = [0, 1, 2, 0, 1, 2, 0, 1, 2, 0, 1, 2]
features = np.zeros((N, F))
for v in range(N):
    features[v, v % F] = 1.0
    features[v, (v + 2) % F] = 0.5
onehot = np.eye(C)[labels]

test_ids = [10, 8, 11, 9]
graph = collections.defaultdict(list)
edges = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 8),
         (8, 9), (9, 10), (10, 11), (11, 0), (0, 6), (1, 1)]
for a, b in edges:
    graph[a].append(b)
    graph[b].append(a)
graph[2].append(3)  # duplicate edge, collapses on load


def dump(obj, suffix):
    with open(f"ind.tiny.{suffix}", "wb") as f:
        pickle.dump(obj, f, protocol=2)


dump(sp.csr_matrix(features[:3]), "x")
dump(onehot[:3], "y")
dump(sp.csr_matrix(features[:8]), "allx")
dump(onehot[:8], "ally")
dump(sp.csr_matrix(features[test_ids]), "tx")
dump(onehot[test_ids], "ty")
dump(graph, "graph")
with open("ind.tiny.test.index", "w") as f:
    f.write("".join(f"{i}\n" for i in test_ids))
