"""Two-step contextual clustering of reduced frame embeddings.

BIRCH builds coarse groups by streaming frames through a CF-tree in
chronological order; agglomerative Ward merging then coalesces the
coarse clusters down to a count chosen by a clamped logistic rule.
Every step is deterministic: nearest-entry and linkage ties break on the
lowest index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .reduction import ReducedEmbedding

DEFAULT_BRANCHING_FACTOR = 50
DEFAULT_N_MAX = 10
DEFAULT_SIGMOID_STEEPNESS = 0.5
DEFAULT_SIGMOID_MIDPOINT = 10.0


@dataclass(frozen=True)
class CoarseLabels:
    """Preliminary per-frame cluster assignment from BIRCH."""

    labels: np.ndarray    # (T,) int, values in [0, n_coarse)
    n_coarse: int
    centroids: np.ndarray  # (n_coarse, d) member means


@dataclass(frozen=True)
class FineLabels:
    """Per-frame labels after Ward merging of the coarse clusters."""

    labels: np.ndarray  # (T,) int, values in [0, n_fine)
    n_fine: int
    merge_tree: tuple[tuple[int, int, float], ...]  # (a, b, linkage distance)


# --- BIRCH CF-tree ----------------------------------------------------------


class _CFEntry:
    __slots__ = ("n", "ls", "ss", "child")

    def __init__(self, n: int, ls: np.ndarray, ss: float, child=None):
        self.n = n
        self.ls = ls
        self.ss = ss
        self.child = child

    @classmethod
    def for_point(cls, x: np.ndarray) -> "_CFEntry":
        return cls(1, x.copy(), float(x @ x))

    @property
    def centroid(self) -> np.ndarray:
        return self.ls / self.n

    def radius_with(self, x: np.ndarray) -> float:
        n = self.n + 1
        ls = self.ls + x
        ss = self.ss + float(x @ x)
        r2 = ss / n - float(ls @ ls) / (n * n)
        return math.sqrt(max(r2, 0.0))

    def add_point(self, x: np.ndarray) -> None:
        self.n += 1
        self.ls = self.ls + x
        self.ss += float(x @ x)

    @classmethod
    def summarizing(cls, node: "_CFNode") -> "_CFEntry":
        n = sum(e.n for e in node.entries)
        ls = np.sum([e.ls for e in node.entries], axis=0)
        ss = sum(e.ss for e in node.entries)
        return cls(n, ls, float(ss), child=node)


class _CFNode:
    __slots__ = ("entries", "is_leaf")

    def __init__(self, is_leaf: bool):
        self.entries: list[_CFEntry] = []
        self.is_leaf = is_leaf


def _nearest_entry(entries: list[_CFEntry], x: np.ndarray) -> int:
    dists = [float(np.linalg.norm(e.centroid - x)) for e in entries]
    return int(np.argmin(dists))  # first minimum: lowest index wins ties

def _split_node(node: _CFNode) -> tuple[_CFEntry, _CFEntry]:
    """Split an overfull node around its farthest pair of entries."""
    entries = node.entries
    best = (0, 1)
    best_dist = -1.0
    for i in range(len(entries)):
        ci = entries[i].centroid
        for j in range(i + 1, len(entries)):
            d = float(np.linalg.norm(ci - entries[j].centroid))
            if d > best_dist:
                best_dist = d
                best = (i, j)
    seed_a, seed_b = best
    node_a = _CFNode(node.is_leaf)
    node_b = _CFNode(node.is_leaf)
    ca = entries[seed_a].centroid
    cb = entries[seed_b].centroid
    for k, entry in enumerate(entries):
        if k == seed_a:
            node_a.entries.append(entry)
        elif k == seed_b:
            node_b.entries.append(entry)
        else:
            da = float(np.linalg.norm(entry.centroid - ca))
            db = float(np.linalg.norm(entry.centroid - cb))
            (node_a if da <= db else node_b).entries.append(entry)
    return _CFEntry.summarizing(node_a), _CFEntry.summarizing(node_b)


class _CFTree:
    def __init__(self, threshold: float, branching_factor: int):
        self.threshold = threshold
        self.branching = branching_factor
        self.root = _CFNode(is_leaf=True)

    def insert(self, x: np.ndarray) -> None:
        if not self.root.entries:
            self.root.entries.append(_CFEntry.for_point(x))
            return
        split = self._insert(self.root, x)
        if split is not None:
            new_root = _CFNode(is_leaf=False)
            new_root.entries.extend(split)
            self.root = new_root

    def _insert(self, node: _CFNode, x: np.ndarray):
        """Returns a replacement entry pair when ``node`` split, else None.

        On a None return the caller must fold x into the entry it
        descended through; on a split the returned CFs already include x.
        """
        if node.is_leaf:
            i = _nearest_entry(node.entries, x)
            entry = node.entries[i]
            if entry.radius_with(x) <= self.threshold:
                entry.add_point(x)
                return None
            node.entries.append(_CFEntry.for_point(x))
            if len(node.entries) > self.branching:
                return _split_node(node)
            return None

        i = _nearest_entry(node.entries, x)
        entry = node.entries[i]
        split = self._insert(entry.child, x)
        if split is None:
            entry.add_point(x)
            return None
        node.entries[i:i + 1] = list(split)
        if len(node.entries) > self.branching:
            return _split_node(node)
        return None

    def leaf_entries(self) -> list[_CFEntry]:
        out: list[_CFEntry] = []

        def walk(node: _CFNode) -> None:
            if node.is_leaf:
                out.extend(node.entries)
            else:
                for e in node.entries:
                    walk(e.child)

        walk(self.root)
        return out


def birch_threshold_for(vectors: np.ndarray, seed: int = 0, subsample: int = 256) -> float:
    """Scale-adaptive default threshold: half the median pairwise distance
    of a seeded subsample."""
    n = vectors.shape[0]
    if n > subsample:
        rng = np.random.default_rng(seed)
        pick = np.sort(rng.choice(n, size=subsample, replace=False))
        sample = vectors[pick]
    else:
        sample = vectors
    if sample.shape[0] < 2:
        return 1e-12
    diffs = sample[:, None, :] - sample[None, :, :]
    dists = np.sqrt(np.sum(diffs * diffs, axis=-1))
    iu = np.triu_indices(sample.shape[0], k=1)
    median = float(np.median(dists[iu]))
    return max(0.5 * median, 1e-12)


def birch_coarse(
    reduced: ReducedEmbedding,
    threshold: float,
    branching_factor: int = DEFAULT_BRANCHING_FACTOR,
) -> CoarseLabels:
    """Cluster frames with a CF-tree, streaming them in frame order.

    Each frame is then assigned to the nearest leaf subcluster centroid
    and label ids are renumbered in order of first appearance.
    """
    x = np.asarray(reduced.vectors, dtype=np.float64)
    if x.shape[0] < 1:
        raise ParameterError("need at least one frame")
    if threshold <= 0:
        raise ParameterError("threshold must be > 0")
    if branching_factor < 2:
        raise ParameterError("branching_factor must be >= 2")

    tree = _CFTree(threshold, branching_factor)
    for row in x:
        tree.insert(row)
    centroids = np.array([e.centroid for e in tree.leaf_entries()])

    d2 = np.sum((x[:, None, :] - centroids[None, :, :]) ** 2, axis=-1)
    raw = np.argmin(d2, axis=1)

    remap: dict[int, int] = {}
    labels = np.empty(x.shape[0], dtype=np.int64)
    for i, sub in enumerate(raw):
        key = int(sub)
        if key not in remap:
            remap[key] = len(remap)
        labels[i] = remap[key]
    n_coarse = len(remap)
    member_means = np.array([x[labels == c].mean(axis=0) for c in range(n_coarse)])
    return CoarseLabels(labels=labels, n_coarse=n_coarse, centroids=member_means)


def sigmoid_target(
    n_coarse: int,
    n_max: int = DEFAULT_N_MAX,
    steepness_a: float = DEFAULT_SIGMOID_STEEPNESS,
    midpoint_b: float = DEFAULT_SIGMOID_MIDPOINT,
) -> int:
    """Fine-cluster count: clamped logistic of the coarse count.

    clamp(round(n_max / (1 + exp(-a*(n_coarse - b)))), 2, min(n_max, n_coarse))
    """
    if n_coarse < 1:
        raise ParameterError("n_coarse must be >= 1")
    if n_max < 2:
        raise ParameterError("n_max must be >= 2")
    raw = round(n_max / (1.0 + math.exp(-steepness_a * (n_coarse - midpoint_b))))
    upper = min(n_max, n_coarse)
    lower = min(2, upper)
    return int(max(lower, min(raw, upper)))


def _ward_cost(ca: np.ndarray, na: int, cb: np.ndarray, nb: int) -> float:
    diff = ca - cb
    return (na * nb) / (na + nb) * float(diff @ diff)


def hierarchical_merge(coarse: CoarseLabels, target: int) -> FineLabels:
    """Agglomerate coarse clusters with Ward linkage until ``target`` remain.

    Clusters are keyed by the smallest coarse id they contain; equal
    linkage breaks ties toward the smaller (a, b) pair.  The recorded
    linkage distance is sqrt(2 * merge cost), which is non-decreasing.
    """
    if not (1 <= target <= coarse.n_coarse):
        raise ParameterError(f"target must be in [1, {coarse.n_coarse}], got {target}")

    centroids = {i: coarse.centroids[i].astype(np.float64) for i in range(coarse.n_coarse)}
    sizes = {i: int(np.sum(coarse.labels == i)) for i in range(coarse.n_coarse)}
    resolve = {i: i for i in range(coarse.n_coarse)}
    merge_tree: list[tuple[int, int, float]] = []

    while len(centroids) > target:
        ids = sorted(centroids)
        best_pair = None
        best_cost = math.inf
        for i, a in enumerate(ids):
            for b in ids[i + 1:]:
                cost = _ward_cost(centroids[a], sizes[a], centroids[b], sizes[b])
                if cost < best_cost:
                    best_cost = cost
                    best_pair = (a, b)
        a, b = best_pair
        merge_tree.append((a, b, math.sqrt(2.0 * best_cost)))
        na, nb = sizes[a], sizes[b]
        centroids[a] = (na * centroids[a] + nb * centroids[b]) / (na + nb)
        sizes[a] = na + nb
        del centroids[b], sizes[b]
        for orig, rep in resolve.items():
            if rep == b:
                resolve[orig] = a

    remap: dict[int, int] = {}
    labels = np.empty_like(coarse.labels)
    for i, lab in enumerate(coarse.labels):
        rep = resolve[int(lab)]
        if rep not in remap:
            remap[rep] = len(remap)
        labels[i] = remap[rep]
    return FineLabels(labels=labels, n_fine=target, merge_tree=tuple(merge_tree))
