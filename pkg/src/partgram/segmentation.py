"""Face-to-box assignment driven by decoding confidence.

Each decoded box carries the mean probability of its coordinate tokens. A
mesh face is a candidate for every box containing its centroid (closed
bounds); overlaps resolve by a two-tier rule: a candidate strictly containing
another candidate loses to the more specific one, and the remaining
incomparable candidates are ranked by confidence, then smaller volume, then
lower index — fully deterministic.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from . import kernels
from .geometry import AABB

CONFIDENCE_ATOL = 1e-9


class SegmentationError(ValueError):
    pass


def box_confidence(token_probs: Sequence[float]) -> float:
    """Arithmetic mean of the per-token decoding probabilities."""
    probs = [float(p) for p in token_probs]
    if not probs:
        raise SegmentationError("confidence needs at least one token probability")
    for p in probs:
        if not 0.0 <= p <= 1.0 or not math.isfinite(p):
            raise SegmentationError(f"token probability {p!r} outside [0, 1]")
    return sum(probs) / len(probs)


@dataclass(frozen=True)
class ScoredBox:
    box: AABB
    token_probs: tuple[float, ...]
    confidence: float | None = None  # derived from token_probs when omitted

    def __post_init__(self):
        object.__setattr__(self, "token_probs", tuple(float(p) for p in self.token_probs))
        expected = box_confidence(self.token_probs)
        if self.confidence is None:
            object.__setattr__(self, "confidence", expected)
        elif abs(self.confidence - expected) > CONFIDENCE_ATOL:
            raise SegmentationError(
                f"confidence {self.confidence} disagrees with mean token probability {expected}"
            )

    @classmethod
    def from_record(cls, record: dict) -> ScoredBox:
        """One JSONL record: {"box": [6 floats], "token_probs": [k floats]}."""
        return cls(box=AABB.from_flat(record["box"]), token_probs=tuple(record["token_probs"]))


@dataclass(frozen=True)
class TriMesh:
    vertices: np.ndarray  # (V, 3) float64
    faces: np.ndarray  # (F, 3) int64 vertex indices

    def __post_init__(self):
        verts = np.asarray(self.vertices, dtype=np.float64).reshape(-1, 3)
        faces = np.asarray(self.faces, dtype=np.int64).reshape(-1, 3)
        if faces.size and (faces.min() < 0 or faces.max() >= len(verts)):
            raise SegmentationError("face index out of range")
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "faces", faces)

    @property
    def centroids(self) -> np.ndarray:
        """(F, 3) mean of each face's three vertices."""
        return self.vertices[self.faces].mean(axis=1)


def load_obj(path: str | Path) -> TriMesh:
    """Minimal OBJ reader: only `v x y z` and triangle `f i j k` lines.

    Indices are 1-based (negative indices count back from the current vertex
    list); `i/j/k`-style attribute suffixes are stripped; every other line is
    ignored. Faces with a vertex count other than 3 are an error.
    """
    vertices: list[list[float]] = []
    faces: list[list[int]] = []
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            parts = raw.split()
            if not parts:
                continue
            if parts[0] == "v":
                if len(parts) < 4:
                    raise SegmentationError(f"{path}:{line_no}: vertex needs 3 coordinates")
                vertices.append([float(v) for v in parts[1:4]])
            elif parts[0] == "f":
                if len(parts) != 4:
                    raise SegmentationError(
                        f"{path}:{line_no}: only triangle faces are supported"
                    )
                idx = []
                for token in parts[1:]:
                    value = int(token.split("/")[0])
                    idx.append(value - 1 if value > 0 else len(vertices) + value)
                faces.append(idx)
    return TriMesh(np.asarray(vertices, dtype=np.float64), np.asarray(faces, dtype=np.int64))


@dataclass(frozen=True)
class FaceAssignment:
    """Per-face winning box index; None marks an uncovered face."""

    labels: tuple[int | None, ...]

    def face_counts(self, n_boxes: int) -> dict[str, int]:
        counts = {str(i): 0 for i in range(n_boxes)}
        unassigned = 0
        for label in self.labels:
            if label is None:
                unassigned += 1
            else:
                counts[str(label)] += 1
        counts["unassigned"] = unassigned
        return counts


def face_candidates(mesh: TriMesh, boxes: Sequence[ScoredBox]) -> list[list[int]]:
    """Per-face candidate box indices (centroid inside the box, closed bounds)."""
    return [list(np.flatnonzero(row)) for row in _candidate_matrix(mesh, boxes)]


def _candidate_matrix(mesh: TriMesh, boxes: Sequence[ScoredBox]) -> np.ndarray:
    if len(mesh.faces) == 0:
        return np.zeros((0, len(boxes)), dtype=bool)
    if not boxes:
        return np.zeros((len(mesh.faces), 0), dtype=bool)
    mins = np.array([b.box.min for b in boxes], dtype=np.float64)
    maxs = np.array([b.box.max for b in boxes], dtype=np.float64)
    return kernels.points_in_boxes(mesh.centroids, mins, maxs)


def _strict_containment(boxes: Sequence[ScoredBox]) -> np.ndarray:
    """(N, N) bool: contains[i, j] iff box i strictly contains box j (i != j)."""
    mins = np.array([b.box.min for b in boxes], dtype=np.float64)
    maxs = np.array([b.box.max for b in boxes], dtype=np.float64)
    lo_ok = (mins[:, None, :] <= mins[None, :, :]).all(axis=2)
    hi_ok = (maxs[:, None, :] >= maxs[None, :, :]).all(axis=2)
    equal = (mins[:, None, :] == mins[None, :, :]).all(axis=2) & (
        maxs[:, None, :] == maxs[None, :, :]
    ).all(axis=2)
    return lo_ok & hi_ok & ~equal


def _precedence(boxes: Sequence[ScoredBox]) -> np.ndarray:
    """Rank per box: higher confidence first, then smaller volume, then index."""
    order = sorted(
        range(len(boxes)),
        key=lambda i: (-boxes[i].confidence, boxes[i].box.volume, i),
    )
    rank = np.empty(len(boxes), dtype=np.int64)
    for position, index in enumerate(order):
        rank[index] = position
    return rank


def resolve_assignments(
    candidates: Sequence[Sequence[int]] | np.ndarray, boxes: Sequence[ScoredBox]
) -> FaceAssignment:
    n = len(boxes)
    if isinstance(candidates, np.ndarray) and candidates.ndim == 2:
        matrix = candidates.astype(bool)
    else:
        matrix = np.zeros((len(candidates), n), dtype=bool)
        for f, cand in enumerate(candidates):
            for i in cand:
                if not 0 <= i < n:
                    raise SegmentationError(f"candidate index {i} out of range")
                matrix[f, i] = True
    if n == 0:
        return FaceAssignment(labels=(None,) * matrix.shape[0])
    winners = kernels.resolve_face_labels(matrix, _strict_containment(boxes), _precedence(boxes))
    return FaceAssignment(labels=tuple(None if w < 0 else int(w) for w in winners))


def segment_mesh(mesh: TriMesh, boxes: Sequence[ScoredBox]) -> FaceAssignment:
    return resolve_assignments(_candidate_matrix(mesh, boxes), boxes)


def load_scored_boxes(path: str | Path) -> list[ScoredBox]:
    """JSONL of {"box": [...], "token_probs": [...]} records."""
    out = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                out.append(ScoredBox.from_record(json.loads(line)))
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise SegmentationError(f"{path}:{line_no}: bad scored-box record ({exc})") from None
    return out
