"""
Density clustering on a distance matrix
=======================================

Runs the clustering stack bottom-up on a tiny planted dataset: core
distances, mutual reachability, the minimum spanning tree, the condensed
tree, and finally stability-selected flat labels with noise marked -1.
"""

import numpy as np
from scipy.spatial.distance import pdist, squareform

from trendpulse.cluster import (
    ClusterParams,
    build_mst,
    cluster_distance_matrix,
    core_distances,
    dump_condensed_tree,
    mutual_reachability,
)

## Two tight blobs and one far-away straggler
rng = np.random.default_rng(0)
points = np.vstack(
    [
        rng.normal((0.0, 0.0), 0.05, size=(12, 2)),
        rng.normal((4.0, 0.0), 0.05, size=(12, 2)),
        [[2.0, 6.0]],
    ]
)
distances = squareform(pdist(points))
params = ClusterParams(min_cluster_size=5, min_samples=3)

## Core distances: how far to each point's 3rd-nearest neighbor
core = core_distances(distances, params.effective_min_samples)
print("core distance range in blobs :", core[:24].min().round(4), "-", core[:24].max().round(4))
print("core distance of straggler   :", core[24].round(3))

## Mutual reachability inflates short links between sparse points
reach = mutual_reachability(distances, core)
print("raw vs reachable for straggler:", distances[24, 0].round(3), "->", reach[24, 0].round(3))

## The spanning tree orders every merge by reachability weight
edges = build_mst(reach)
weights = np.array([edge.weight for edge in edges])
print("\nmst edges:", len(edges), "| cheapest", weights.min().round(4), "| priciest", weights.max().round(3))

## Condensed tree and flat extraction
result = cluster_distance_matrix(distances, params)
print("\ncondensed tree:")
print(dump_condensed_tree(result.tree))
print("labels:", result.labels.tolist())
print("clusters found:", result.n_clusters, "| noise points:", int((result.labels == -1).sum()))
