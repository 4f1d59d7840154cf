"""Part merging by density clustering over hybrid semantic+spatial features.

Each part contributes a unit-norm feature combining its (pre-normalized)
text embedding with a z-scored [center, size] spatial block, weighted by
``alpha``; DBSCAN over those features groups parts, and each group collapses
to the component-wise bounding box of its members. Sweeping the distance
threshold upward merges fine parts into progressively coarser components.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels
from .embeddings import EmbeddingTable
from .geometry import AABB, merge_aabbs

SIGMA_FLOOR = 1e-8


class ClusteringError(ValueError):
    pass


@dataclass(frozen=True)
class ClusterResult:
    """Partition of part indices plus one merged box per cluster.

    Noise parts are not dropped downstream: they count as singleton
    components, so ``component_count`` is ``len(clusters) + len(noise)``.
    """

    eps: float
    clusters: tuple[tuple[int, ...], ...]
    noise: tuple[int, ...]
    merged_boxes: tuple[AABB, ...]

    @property
    def component_count(self) -> int:
        return len(self.clusters) + len(self.noise)


def extract_features(
    parts: Sequence[tuple[AABB, str]],
    embeddings: EmbeddingTable,
    alpha: float,
) -> np.ndarray:
    """(n, D+6) unit-norm feature rows for the given (box, description) parts.

    The semantic block is the L2-normalized table vector scaled by (1-alpha);
    the spatial block is the per-dimension z-score (sigma floored at 1e-8) of
    [center, size] across this object's parts, scaled by alpha.
    """
    if not parts:
        raise ClusteringError("feature extraction needs at least one part")
    if not 0.0 <= alpha <= 1.0:
        raise ClusteringError(f"alpha must lie in [0, 1], got {alpha}")

    sem = np.empty((len(parts), embeddings.dim), dtype=np.float64)
    for i, (_, desc) in enumerate(parts):
        vec = embeddings.lookup(desc)
        norm = np.linalg.norm(vec)
        if norm <= 0 or not math.isfinite(norm):
            raise ClusteringError(f"embedding for {desc!r} has non-positive norm")
        sem[i] = vec / norm

    spatial = np.array(
        [[*box.center, *box.size] for box, _ in parts], dtype=np.float64
    )
    mean = spatial.mean(axis=0)
    sigma = np.maximum(spatial.std(axis=0), SIGMA_FLOOR)
    spatial_z = (spatial - mean) / sigma

    combined = np.hstack([(1.0 - alpha) * sem, alpha * spatial_z])
    norms = np.linalg.norm(combined, axis=1)
    bad = np.where(norms <= 0)[0]
    if bad.size:
        raise ClusteringError(
            f"part {bad[0]} has a zero combined feature vector (alpha={alpha})"
        )
    return combined / norms[:, None]


def dbscan(
    points: np.ndarray, eps: float, min_pts: int
) -> tuple[list[list[int]], list[int]]:
    """Deterministic DBSCAN under Euclidean distance.

    A point is core iff its closed eps-neighborhood (itself included) holds
    at least ``min_pts`` points. Seeds are scanned in index order and border
    points attach to the first cluster that reaches them, so the output is a
    pure function of the input order. Returns (clusters, noise) with every
    cluster sorted and clusters ordered by first discovery.
    """
    points = np.asarray(points, dtype=np.float64)
    if points.ndim != 2:
        raise ClusteringError(f"expected (n, d) feature array, got shape {points.shape}")
    if eps <= 0:
        raise ClusteringError(f"eps must be positive, got {eps}")
    if min_pts < 1:
        raise ClusteringError(f"min_pts must be >= 1, got {min_pts}")
    n = points.shape[0]
    if n == 0:
        return [], []

    within = kernels.pairwise_sq_dists(points) <= eps * eps
    neighbor_lists = [np.flatnonzero(row) for row in within]
    is_core = np.array([len(nb) >= min_pts for nb in neighbor_lists])

    UNASSIGNED = -1
    labels = np.full(n, UNASSIGNED, dtype=np.int64)
    clusters: list[list[int]] = []
    for seed in range(n):
        if labels[seed] != UNASSIGNED or not is_core[seed]:
            continue
        cid = len(clusters)
        labels[seed] = cid
        members = [seed]
        queue = list(neighbor_lists[seed])
        qi = 0
        while qi < len(queue):
            j = int(queue[qi])
            qi += 1
            if labels[j] != UNASSIGNED:
                continue
            labels[j] = cid
            members.append(j)
            if is_core[j]:
                queue.extend(neighbor_lists[j])
        clusters.append(sorted(members))
    noise = [int(i) for i in np.flatnonzero(labels == UNASSIGNED)]
    return clusters, noise


def merge_cluster_boxes(
    parts: Sequence[AABB], clusters: Sequence[Sequence[int]]
) -> list[AABB]:
    """Component-wise min/max box per cluster."""
    out = []
    for cluster in clusters:
        indices = list(cluster)
        if not indices:
            raise ClusteringError("cannot merge an empty cluster")
        if any(not 0 <= i < len(parts) for i in indices):
            raise ClusteringError(f"cluster index out of range in {indices}")
        out.append(merge_aabbs(parts[i] for i in indices))
    return out


def cluster_parts(
    parts: Sequence[tuple[AABB, str]],
    embeddings: EmbeddingTable,
    alpha: float,
    eps: float,
    min_pts: int,
) -> ClusterResult:
    features = extract_features(parts, embeddings, alpha)
    clusters, noise = dbscan(features, eps, min_pts)
    boxes = [box for box, _ in parts]
    merged = merge_cluster_boxes(boxes, clusters)
    return ClusterResult(
        eps=eps,
        clusters=tuple(tuple(c) for c in clusters),
        noise=tuple(noise),
        merged_boxes=tuple(merged),
    )


def granularity_sweep(
    parts: Sequence[tuple[AABB, str]],
    embeddings: EmbeddingTable,
    alpha: float,
    eps_schedule: Sequence[float],
    min_pts: int = 2,
) -> list[ClusterResult]:
    """One ClusterResult per eps, coarsening as the threshold grows."""
    schedule = [float(e) for e in eps_schedule]
    if not schedule:
        raise ClusteringError("eps schedule is empty")
    if any(b <= a for a, b in zip(schedule, schedule[1:])):
        raise ClusteringError(f"eps schedule must be strictly increasing, got {schedule}")
    features = extract_features(parts, embeddings, alpha)
    boxes = [box for box, _ in parts]
    results = []
    for eps in schedule:
        clusters, noise = dbscan(features, eps, min_pts)
        results.append(
            ClusterResult(
                eps=eps,
                clusters=tuple(tuple(c) for c in clusters),
                noise=tuple(noise),
                merged_boxes=tuple(merge_cluster_boxes(boxes, clusters)),
            )
        )
    return results
