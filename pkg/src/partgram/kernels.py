"""Geometry hot-kernel dispatch: compiled backend when built, numpy otherwise.

Set PARTGRAM_PURE=1 to force the numpy backend (used by the parity tests and
the kernel benchmark). ``BACKEND`` names the active implementation.
"""

from __future__ import annotations

import os

import numpy as np

from . import _kernels_np

_force_pure = os.environ.get("PARTGRAM_PURE", "") not in ("", "0")
try:
    if _force_pure:
        raise ImportError("PARTGRAM_PURE set")
    from . import _ckernels as _impl

    BACKEND = "compiled"
except ImportError:
    _impl = _kernels_np
    BACKEND = "numpy"

HAVE_COMPILED = BACKEND == "compiled"


def _as_points(arr) -> np.ndarray:
    out = np.ascontiguousarray(arr, dtype=np.float64)
    if out.ndim != 2 or out.shape[1] != 3:
        raise ValueError(f"expected an (n, 3) array, got shape {out.shape}")
    return out


def _as_bounds(mins, maxs) -> tuple[np.ndarray, np.ndarray]:
    lo = np.ascontiguousarray(mins, dtype=np.float64).reshape(-1, 3)
    hi = np.ascontiguousarray(maxs, dtype=np.float64).reshape(-1, 3)
    if lo.shape != hi.shape:
        raise ValueError("mins and maxs must have matching shapes")
    return lo, hi


def points_in_boxes(points, mins, maxs) -> np.ndarray:
    lo, hi = _as_bounds(mins, maxs)
    return np.asarray(_impl.points_in_boxes(_as_points(points), lo, hi), dtype=bool)


def points_in_any_box(points, mins, maxs) -> np.ndarray:
    lo, hi = _as_bounds(mins, maxs)
    return np.asarray(_impl.points_in_any_box(_as_points(points), lo, hi), dtype=bool)


def box_occupancy(mins, maxs, resolution: int) -> np.ndarray:
    if resolution < 1:
        raise ValueError(f"resolution must be >= 1, got {resolution}")
    lo, hi = _as_bounds(mins, maxs)
    return np.asarray(_impl.box_occupancy(lo, hi, int(resolution)), dtype=bool)


def pairwise_sq_dists(features) -> np.ndarray:
    arr = np.ascontiguousarray(features, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D feature array, got shape {arr.shape}")
    return np.asarray(_impl.pairwise_sq_dists(arr))


def resolve_face_labels(candidates, contains, precedence) -> np.ndarray:
    cand = np.ascontiguousarray(candidates, dtype=np.uint8)
    cont = np.ascontiguousarray(contains, dtype=np.uint8)
    prec = np.ascontiguousarray(precedence, dtype=np.int64)
    if cand.ndim != 2 or cont.shape != (cand.shape[1], cand.shape[1]):
        raise ValueError("candidate/containment shapes disagree")
    if prec.shape != (cand.shape[1],):
        raise ValueError("precedence length must match box count")
    return np.asarray(_impl.resolve_face_labels(cand, cont, prec), dtype=np.int64)
