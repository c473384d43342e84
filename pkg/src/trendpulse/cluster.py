"""Density clustering on a precomputed distance matrix.

The pipeline is the classic mutual-reachability construction: k-core
distances -> mutual reachability -> minimum spanning tree -> single-linkage
dendrogram -> condensed tree -> excess-of-mass cluster selection. Points
never captured by a selected cluster get the noise label -1.

Everything here is deterministic: MST ties break on (weight, a, b), the
condensed tree is traversed in a fixed order, and final labels are
renumbered by (descending size, smallest member index).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

__all__ = [
    "ClusterParams",
    "MstEdge",
    "CondensedRow",
    "CondensedTree",
    "ClusterResult",
    "core_distances",
    "mutual_reachability",
    "build_mst",
    "condense_tree",
    "cluster_stabilities",
    "extract_clusters",
    "cluster_distance_matrix",
    "hdbscan_labels",
    "dump_condensed_tree",
]

_NOISE = -1


@dataclass(frozen=True)
class ClusterParams:
    """Knobs for the density clusterer.

    ``min_samples`` defaults to ``min_cluster_size`` when unset.
    """

    min_cluster_size: int = 10
    min_samples: int | None = None

    def __post_init__(self) -> None:
        if self.min_cluster_size < 2:
            raise ValueError(f"min_cluster_size must be >= 2, got {self.min_cluster_size}")
        if self.min_samples is not None and self.min_samples < 1:
            raise ValueError(f"min_samples must be >= 1, got {self.min_samples}")

    @property
    def effective_min_samples(self) -> int:
        return self.min_samples if self.min_samples is not None else self.min_cluster_size


def _check_distance_matrix(distances: np.ndarray) -> np.ndarray:
    mat = np.asarray(distances, dtype=np.float64)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError(f"distance matrix must be square, got shape {mat.shape}")
    return mat


def core_distances(distances: np.ndarray, min_samples: int) -> np.ndarray:
    """Distance to each point's min_samples-th nearest OTHER point.

    Points with fewer than ``min_samples`` other points get +inf.
    """
    mat = _check_distance_matrix(distances)
    n = mat.shape[0]
    if min_samples < 1:
        raise ValueError(f"min_samples must be >= 1, got {min_samples}")
    if n - 1 < min_samples:
        return np.full(n, np.inf)
    others = mat.copy()
    np.fill_diagonal(others, np.inf)
    return np.partition(others, min_samples - 1, axis=1)[:, min_samples - 1]


def mutual_reachability(distances: np.ndarray, core: np.ndarray) -> np.ndarray:
    """max(core_i, core_j, d_ij) for every pair; diagonal forced to zero."""
    mat = _check_distance_matrix(distances)
    reach = np.maximum(mat, np.maximum(core[:, None], core[None, :]))
    np.fill_diagonal(reach, 0.0)
    return reach


@dataclass(frozen=True)
class MstEdge:
    """An undirected MST edge with endpoints ordered a < b."""

    a: int
    b: int
    weight: float


def build_mst(reach: np.ndarray) -> list[MstEdge]:
    """Kruskal's algorithm over the mutual-reachability graph.

    Candidate edges are scanned in ascending (weight, a, b) order, which
    fixes the result under ties; the returned n-1 edges keep that order.
    """
    mat = _check_distance_matrix(reach)
    n = mat.shape[0]
    if n < 2:
        raise ValueError(f"need at least 2 points to span, got {n}")
    ai, bi = np.triu_indices(n, k=1)
    weights = mat[ai, bi]
    order = np.lexsort((bi, ai, weights))

    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    edges: list[MstEdge] = []
    chunk = 262144
    for start in range(0, order.size, chunk):
        idx = order[start : start + chunk]
        for a, b, w in zip(ai[idx].tolist(), bi[idx].tolist(), weights[idx].tolist()):
            ra, rb = find(a), find(b)
            if ra == rb:
                continue
            parent[rb] = ra
            edges.append(MstEdge(a, b, w))
            if len(edges) == n - 1:
                return edges
    return edges


def _single_linkage(edges: Sequence[MstEdge], n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Dendrogram from MST edges already sorted by ascending weight.

    Internal nodes get ids n..2n-2; returns (left, right, height, size)
    arrays indexed by internal node id minus n.
    """
    merges = len(edges)
    left = np.zeros(merges, dtype=np.int64)
    right = np.zeros(merges, dtype=np.int64)
    height = np.zeros(merges, dtype=np.float64)
    size = np.zeros(merges, dtype=np.int64)

    parent = list(range(n))
    node_of = list(range(n))
    node_size = [1] * n

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for k, edge in enumerate(edges):
        ra, rb = find(edge.a), find(edge.b)
        la, lb = node_of[ra], node_of[rb]
        left[k], right[k] = min(la, lb), max(la, lb)
        height[k] = edge.weight
        size[k] = node_size[ra] + node_size[rb]
        parent[rb] = ra
        node_of[ra] = n + k
        node_size[ra] = size[k]
    return left, right, height, size


@dataclass(frozen=True)
class CondensedRow:
    """One departure event: ``child`` leaves ``parent`` at density ``lam``.

    ``child`` is a point index when ``child_is_cluster`` is False,
    otherwise a cluster id born at ``lam``.
    """

    parent: int
    child: int
    lam: float
    size: int
    child_is_cluster: bool


@dataclass(frozen=True)
class CondensedTree:
    """Hierarchy pruned to clusters holding >= min_cluster_size points."""

    n_points: int
    min_cluster_size: int
    rows: tuple[CondensedRow, ...]
    parent: dict[int, int | None]
    birth: dict[int, float]
    cluster_size: dict[int, int]
    children: dict[int, tuple[int, ...]]

    @property
    def cluster_ids(self) -> tuple[int, ...]:
        return tuple(sorted(self.parent))

    def subtree(self, cluster_id: int) -> Iterator[int]:
        stack = [cluster_id]
        while stack:
            current = stack.pop()
            yield current
            stack.extend(reversed(self.children[current]))


def _leaf_points(node: int, left: np.ndarray, right: np.ndarray, n: int) -> list[int]:
    points: list[int] = []
    stack = [node]
    while stack:
        current = stack.pop()
        if current < n:
            points.append(current)
        else:
            stack.append(left[current - n])
            stack.append(right[current - n])
    points.sort()
    return points


def condense_tree(edges: Sequence[MstEdge], n_points: int, min_cluster_size: int) -> CondensedTree:
    """Collapse the dendrogram into clusters of >= min_cluster_size points.

    Walking top-down, a split whose sides both hold min_cluster_size
    points births two child clusters at lam = 1/weight; a split with one
    small side peels those points out of the current cluster; a split
    with two small sides dissolves the cluster entirely. Zero-weight
    merges give lam = +inf; a both-big split at +inf also dissolves (its
    points persist at every density, and a cluster born at infinite
    density would have undefined stability).
    """
    if min_cluster_size < 2:
        raise ValueError(f"min_cluster_size must be >= 2, got {min_cluster_size}")
    if n_points < 1:
        raise ValueError("need at least one point")

    rows: list[CondensedRow] = []
    parent: dict[int, int | None] = {0: None}
    birth: dict[int, float] = {0: 0.0}
    cluster_size: dict[int, int] = {0: n_points}
    children: dict[int, list[int]] = {0: []}

    if n_points >= 2 and edges:
        if len(edges) != n_points - 1:
            raise ValueError(f"expected {n_points - 1} MST edges, got {len(edges)}")
        left, right, height, size = _single_linkage(edges, n_points)

        def side_size(node: int) -> int:
            return 1 if node < n_points else int(size[node - n_points])

        next_id = 1
        stack: list[tuple[int, int]] = [(2 * n_points - 2, 0)]
        while stack:
            node, cid = stack.pop()
            weight = float(height[node - n_points])
            lam = math.inf if weight <= 0.0 else 1.0 / weight
            lo, hi = int(left[node - n_points]), int(right[node - n_points])
            sides = ((lo, side_size(lo)), (hi, side_size(hi)))
            big = [s >= min_cluster_size for _, s in sides]

            if all(big) and math.isfinite(lam):
                for side_node, side_points in sides:
                    parent[next_id] = cid
                    birth[next_id] = lam
                    cluster_size[next_id] = side_points
                    children[next_id] = []
                    children[cid].append(next_id)
                    rows.append(CondensedRow(cid, next_id, lam, side_points, True))
                    stack.append((side_node, next_id))
                    next_id += 1
            elif big[0] != big[1]:
                keep, shed = (sides[0], sides[1]) if big[0] else (sides[1], sides[0])
                for point in _leaf_points(shed[0], left, right, n_points):
                    rows.append(CondensedRow(cid, point, lam, 1, False))
                stack.append((keep[0], cid))
            else:
                for point in _leaf_points(node, left, right, n_points):
                    rows.append(CondensedRow(cid, point, lam, 1, False))

    return CondensedTree(
        n_points=n_points,
        min_cluster_size=min_cluster_size,
        rows=tuple(rows),
        parent=parent,
        birth=birth,
        cluster_size=cluster_size,
        children={cid: tuple(kids) for cid, kids in children.items()},
    )


def cluster_stabilities(tree: CondensedTree) -> dict[int, float]:
    """S(C) = sum over departures from C of (lam - lambda_birth(C)) * size."""
    stability = {cid: 0.0 for cid in tree.parent}
    for row in tree.rows:
        stability[row.parent] += (row.lam - tree.birth[row.parent]) * row.size
    return stability


def _selected_clusters(tree: CondensedTree) -> list[int]:
    """Excess-of-mass selection; the root is never selectable."""
    stability = cluster_stabilities(tree)
    chosen: dict[int, bool] = {}
    propagated: dict[int, float] = {}
    for cid in sorted(tree.parent, reverse=True):  # children have larger ids
        if cid == 0:
            continue
        from_children = sum(propagated[kid] for kid in tree.children[cid])
        if stability[cid] > from_children:
            chosen[cid] = True
            propagated[cid] = stability[cid]
        else:
            chosen[cid] = False
            propagated[cid] = from_children

    selected: list[int] = []
    stack = list(tree.children[0])
    while stack:
        cid = stack.pop()
        if chosen[cid]:
            selected.append(cid)
        else:
            stack.extend(tree.children[cid])
    return selected


def extract_clusters(tree: CondensedTree) -> tuple[np.ndarray, tuple[int, ...]]:
    """Final labels in [0, k) plus the selected condensed-tree cluster ids.

    A point belongs to the selected cluster whose subtree recorded its
    departure; points departing above every selected cluster are noise.
    Labels are renumbered by (descending member count, smallest member).
    """
    labels = np.full(tree.n_points, _NOISE, dtype=np.int64)
    selected = _selected_clusters(tree)
    if not selected:
        return labels, ()

    departures: dict[int, list[int]] = {cid: [] for cid in tree.parent}
    for row in tree.rows:
        if not row.child_is_cluster:
            departures[row.parent].append(row.child)

    member_sets: list[tuple[int, list[int]]] = []
    for cid in selected:
        members: list[int] = []
        for node in tree.subtree(cid):
            members.extend(departures[node])
        members.sort()
        member_sets.append((cid, members))

    member_sets.sort(key=lambda item: (-len(item[1]), item[1][0] if item[1] else tree.n_points))
    ordered_ids: list[int] = []
    for label, (cid, members) in enumerate(member_sets):
        ordered_ids.append(cid)
        for point in members:
            labels[point] = label
    return labels, tuple(ordered_ids)


@dataclass(frozen=True)
class ClusterResult:
    labels: np.ndarray
    tree: CondensedTree
    selected: tuple[int, ...]

    @property
    def n_clusters(self) -> int:
        return len(self.selected)


def cluster_distance_matrix(distances: np.ndarray, params: ClusterParams) -> ClusterResult:
    """Run the full pipeline on a precomputed distance matrix."""
    mat = _check_distance_matrix(distances)
    n = mat.shape[0]
    if n < 2:
        tree = condense_tree([], n, params.min_cluster_size)
        return ClusterResult(np.full(n, _NOISE, dtype=np.int64), tree, ())
    core = core_distances(mat, params.effective_min_samples)
    reach = mutual_reachability(mat, core)
    edges = build_mst(reach)
    tree = condense_tree(edges, n, params.min_cluster_size)
    labels, selected = extract_clusters(tree)
    return ClusterResult(labels, tree, selected)


def hdbscan_labels(distances: np.ndarray, params: ClusterParams) -> np.ndarray:
    return cluster_distance_matrix(distances, params).labels


def _format_lambda(lam: float) -> str:
    return "inf" if math.isinf(lam) else f"{lam:.6f}"


def dump_condensed_tree(tree: CondensedTree) -> str:
    """Readable indented dump of cluster nodes for debugging/fixtures."""
    lines: list[str] = []
    stack: list[tuple[int, int]] = [(0, 0)]
    while stack:
        cid, depth = stack.pop()
        parent_txt = "-" if tree.parent[cid] is None else str(tree.parent[cid])
        lines.append(
            "{}cluster {} parent={} lambda_birth={} size={}".format(
                "  " * depth,
                cid,
                parent_txt,
                _format_lambda(tree.birth[cid]),
                tree.cluster_size[cid],
            )
        )
        for kid in sorted(tree.children[cid], reverse=True):
            stack.append((kid, depth + 1))
    return "\n".join(lines) + "\n"
