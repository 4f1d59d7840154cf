"""Reference execution of edit programs on labeled point sets.

Edit boxes act as cuboid masks: delete removes the points inside, modify
removes them and records a pending region for a geometry backend to fill,
add records a pending region without touching points. Everything outside the
edit boxes is preserved bit-exactly, which is the testable locality contract
a real synthesis backend must also honor. Program boxes are quantized, so
membership is tested against their dequantized bounds (closed).
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from . import kernels
from .grammar import EditAdd, EditDelete, EditModify, PlanProgram
from .geometry import AABB, QuantBox

logger = logging.getLogger(__name__)


class RegionKind(Enum):
    ADDED = "added"
    MODIFIED = "modified"


@dataclass(frozen=True)
class PendingRegion:
    box: AABB
    kind: RegionKind
    text: str

    def to_record(self) -> dict:
        return {"box": self.box.to_flat(), "kind": self.kind.value, "text": self.text}


@dataclass(frozen=True)
class PointScene:
    positions: np.ndarray  # (P, 3) float64 in [-1, 1]
    labels: np.ndarray  # (P,) int64
    regions: tuple[PendingRegion, ...] = field(default_factory=tuple)

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=np.float64).reshape(-1, 3)
        lab = np.asarray(self.labels, dtype=np.int64).reshape(-1)
        if len(pos) != len(lab):
            raise ValueError(f"{len(pos)} positions vs {len(lab)} labels")
        if pos.size and (np.abs(pos) > 1.0 + 1e-9).any():
            raise ValueError("point positions must lie in [-1, 1]^3")
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "labels", lab)

    def __len__(self) -> int:
        return len(self.positions)

    @classmethod
    def load_jsonl(cls, path: str | Path) -> PointScene:
        positions, labels = [], []
        with open(path, encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    rec = json.loads(line)
                    positions.append([float(v) for v in rec["pos"]])
                    labels.append(int(rec.get("label", 0)))
                except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                    raise ValueError(f"{path}:{line_no}: bad point record ({exc})") from None
        return cls(np.asarray(positions, dtype=np.float64).reshape(-1, 3), labels)

    def dump_jsonl(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for pos, label in zip(self.positions, self.labels):
                fh.write(json.dumps({"pos": list(pos), "label": int(label)}) + "\n")


def _mask_inside(scene: PointScene, boxes: list[AABB]) -> np.ndarray:
    if not boxes or len(scene) == 0:
        return np.zeros(len(scene), dtype=bool)
    mins = np.array([b.min for b in boxes], dtype=np.float64)
    maxs = np.array([b.max for b in boxes], dtype=np.float64)
    return kernels.points_in_any_box(scene.positions, mins, maxs)


def _dequantized(box: QuantBox) -> AABB:
    return box.dequantize()


def execute_program(scene: PointScene, program: PlanProgram) -> PointScene:
    """Apply edit statements in order; non-edit statements warn and no-op."""
    positions = scene.positions
    labels = scene.labels
    regions = list(scene.regions)
    for stmt in program.statements:
        if isinstance(stmt, EditDelete):
            boxes = [_dequantized(b) for b in stmt.boxes]
            keep = ~_mask_inside(PointScene(positions, labels, ()), boxes)
            positions = positions[keep]
            labels = labels[keep]
        elif isinstance(stmt, EditModify):
            box = _dequantized(stmt.box)
            keep = ~_mask_inside(PointScene(positions, labels, ()), [box])
            positions = positions[keep]
            labels = labels[keep]
            regions.append(PendingRegion(box=box, kind=RegionKind.MODIFIED, text=stmt.text))
        elif isinstance(stmt, EditAdd):
            regions.append(
                PendingRegion(box=_dequantized(stmt.box), kind=RegionKind.ADDED, text=stmt.text)
            )
        else:
            logger.warning("ignoring non-edit statement %s", type(stmt).__name__)
    return PointScene(positions, labels, tuple(regions))


@dataclass(frozen=True)
class SceneDiff:
    removed_positions: np.ndarray
    removed_labels: np.ndarray
    added_regions: tuple[PendingRegion, ...]
    untouched_count: int

    def to_record(self) -> dict:
        return {
            "removed": [
                {"pos": list(p), "label": int(l)}
                for p, l in zip(self.removed_positions, self.removed_labels)
            ],
            "added_regions": [r.to_record() for r in self.added_regions],
            "untouched": self.untouched_count,
        }


def diff_scenes(before: PointScene, after: PointScene) -> SceneDiff:
    """Exact report of what execution changed.

    Assumes ``after`` derives from ``before`` (points only removed, regions
    only appended); untouched points must match position-bit-exactly and by
    label.
    """
    remaining: dict[bytes, int] = {}
    for pos, label in zip(after.positions, after.labels):
        key = pos.tobytes() + int(label).to_bytes(8, "little", signed=True)
        remaining[key] = remaining.get(key, 0) + 1
    removed_pos, removed_lab = [], []
    for pos, label in zip(before.positions, before.labels):
        key = pos.tobytes() + int(label).to_bytes(8, "little", signed=True)
        if remaining.get(key, 0) > 0:
            remaining[key] -= 1
        else:
            removed_pos.append(pos)
            removed_lab.append(label)
    return SceneDiff(
        removed_positions=np.asarray(removed_pos, dtype=np.float64).reshape(-1, 3),
        removed_labels=np.asarray(removed_lab, dtype=np.int64),
        added_regions=tuple(after.regions[len(before.regions):]),
        untouched_count=len(before) - len(removed_pos),
    )
