"""Numpy implementations of the geometry hot kernels.

This is the fallback backend behind :mod:`partgram.kernels`; the compiled
backend in ``_ckernels.pyx`` must produce identical results (bit-identical
for the boolean/integer kernels, within float rounding for distances).
All box bounds are closed on both ends.
"""

from __future__ import annotations

import numpy as np


def points_in_boxes(points: np.ndarray, mins: np.ndarray, maxs: np.ndarray) -> np.ndarray:
    """(P, N) bool: point p lies inside box n (closed bounds)."""
    inside_lo = points[:, None, :] >= mins[None, :, :]
    inside_hi = points[:, None, :] <= maxs[None, :, :]
    return (inside_lo & inside_hi).all(axis=2)


def points_in_any_box(points: np.ndarray, mins: np.ndarray, maxs: np.ndarray) -> np.ndarray:
    """(P,) bool: point lies inside at least one box."""
    if mins.shape[0] == 0:
        return np.zeros(points.shape[0], dtype=bool)
    return points_in_boxes(points, mins, maxs).any(axis=1)


def box_occupancy(mins: np.ndarray, maxs: np.ndarray, resolution: int) -> np.ndarray:
    """(R, R, R) bool occupancy over [-1, 1]^3; cell centers inside any box.

    Index order is (x, y, z); cell i center is -1 + (i + 0.5) * 2/R.
    """
    centers = -1.0 + (np.arange(resolution, dtype=np.float64) + 0.5) * (2.0 / resolution)
    occ = np.zeros((resolution,) * 3, dtype=bool)
    for lo, hi in zip(mins, maxs):
        mask_x = (centers >= lo[0]) & (centers <= hi[0])
        mask_y = (centers >= lo[1]) & (centers <= hi[1])
        mask_z = (centers >= lo[2]) & (centers <= hi[2])
        occ |= mask_x[:, None, None] & mask_y[None, :, None] & mask_z[None, None, :]
    return occ


def pairwise_sq_dists(features: np.ndarray) -> np.ndarray:
    """(n, n) float64 matrix of squared Euclidean distances."""
    diff = features[:, None, :] - features[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


def resolve_face_labels(
    candidates: np.ndarray, contains: np.ndarray, precedence: np.ndarray
) -> np.ndarray:
    """Winning box index per face, -1 when the face has no candidate.

    ``contains[i, j]`` means box i strictly contains box j: any candidate
    strictly containing another candidate of the same face is eliminated,
    then the survivor with the smallest precedence rank wins.
    """
    cand = candidates.astype(bool)
    if cand.shape[1] == 0:
        return np.full(cand.shape[0], -1, dtype=np.int64)
    eliminated = (cand.astype(np.uint8) @ contains.T.astype(np.uint8)) > 0
    survivors = cand & ~eliminated
    rank = np.where(survivors, precedence[None, :], np.iinfo(np.int64).max)
    winners = rank.argmin(axis=1).astype(np.int64)
    winners[~survivors.any(axis=1)] = -1
    return winners
