"""Axis-aligned box types and the 128-bin coordinate quantizer.

Everything downstream (grammar serialization, clustering, segmentation,
execution, metrics) shares these value types. Coordinates are normalized to
[-1, 1] on every axis; quantized boxes store one bin index in [0, 127] per
coordinate, ordered (x_min, y_min, z_min, x_max, y_max, z_max).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

NUM_BINS = 128
COORD_TOLERANCE = 1e-9

_AXIS_NAMES = ("x", "y", "z")


class GeometryError(ValueError):
    """Domain error for out-of-range coordinates or malformed boxes."""


def quantize_coord(x: float, name: str = "coordinate") -> int:
    """Map a normalized coordinate in [-1, 1] to a bin index in [0, 127].

    Uses round-half-away-from-zero, so quantize_coord(0.0) == 64. Values
    within 1e-9 of the interval are clamped; anything further out raises.
    """
    if not math.isfinite(x) or abs(x) > 1.0 + COORD_TOLERANCE:
        raise GeometryError(f"{name} {x!r} outside [-1, 1]")
    x = min(1.0, max(-1.0, x))
    # (x+1)/2*(K-1) is always >= 0, so half-away-from-zero is floor(t+0.5)
    bin_index = int(math.floor((x + 1.0) / 2.0 * (NUM_BINS - 1) + 0.5))
    return min(NUM_BINS - 1, max(0, bin_index))


def dequantize_coord(bin_index: int) -> float:
    """Map a bin index back to the normalized coordinate 2*b/(K-1) - 1."""
    if not 0 <= bin_index <= NUM_BINS - 1:
        raise GeometryError(f"bin index {bin_index!r} outside [0, {NUM_BINS - 1}]")
    return 2.0 * bin_index / (NUM_BINS - 1) - 1.0


@dataclass(frozen=True)
class AABB:
    """Axis-aligned box with continuous corners in [-1, 1]^3.

    Degenerate boxes (min == max on an axis) are valid; quantization can
    collapse thin parts and voxelization treats them as one cell thick.
    """

    min: tuple[float, float, float]
    max: tuple[float, float, float]

    def __post_init__(self):
        if len(self.min) != 3 or len(self.max) != 3:
            raise GeometryError("AABB corners must be 3-vectors")
        object.__setattr__(self, "min", tuple(float(v) for v in self.min))
        object.__setattr__(self, "max", tuple(float(v) for v in self.max))
        for axis, (lo, hi) in enumerate(zip(self.min, self.max)):
            name = _AXIS_NAMES[axis]
            for bound, value in (("min", lo), ("max", hi)):
                if not math.isfinite(value) or abs(value) > 1.0 + COORD_TOLERANCE:
                    raise GeometryError(f"{name}_{bound} {value!r} outside [-1, 1]")
            if lo > hi:
                raise GeometryError(f"{name}_min {lo!r} exceeds {name}_max {hi!r}")

    @classmethod
    def from_flat(cls, values) -> AABB:
        """Build from the on-disk layout [x_min, y_min, z_min, x_max, y_max, z_max]."""
        vals = [float(v) for v in values]
        if len(vals) != 6:
            raise GeometryError(f"expected 6 box values, got {len(vals)}")
        return cls(min=tuple(vals[:3]), max=tuple(vals[3:]))

    def to_flat(self) -> list[float]:
        return [*self.min, *self.max]

    @property
    def center(self) -> tuple[float, float, float]:
        return tuple((lo + hi) / 2.0 for lo, hi in zip(self.min, self.max))

    @property
    def size(self) -> tuple[float, float, float]:
        return tuple(hi - lo for lo, hi in zip(self.min, self.max))

    @property
    def volume(self) -> float:
        return math.prod(self.size)

    def contains_point(self, point) -> bool:
        """Closed-boundary containment test."""
        return all(lo <= p <= hi for lo, p, hi in zip(self.min, point, self.max))

    def quantize(self) -> QuantBox:
        bins = tuple(
            quantize_coord(v, name=f"{_AXIS_NAMES[i % 3]}_{'min' if i < 3 else 'max'}")
            for i, v in enumerate(self.to_flat())
        )
        return QuantBox(bins=bins)


@dataclass(frozen=True)
class QuantBox:
    """Quantized box: six bin indices (x_min, y_min, z_min, x_max, y_max, z_max)."""

    bins: tuple[int, int, int, int, int, int]

    def __post_init__(self):
        object.__setattr__(self, "bins", tuple(int(b) for b in self.bins))
        if len(self.bins) != 6:
            raise GeometryError(f"expected 6 bins, got {len(self.bins)}")
        for b in self.bins:
            if not 0 <= b <= NUM_BINS - 1:
                raise GeometryError(f"bin {b!r} outside [0, {NUM_BINS - 1}]")
        for axis in range(3):
            if self.bins[axis] > self.bins[axis + 3]:
                name = _AXIS_NAMES[axis]
                raise GeometryError(
                    f"{name}_min bin {self.bins[axis]} exceeds {name}_max bin {self.bins[axis + 3]}"
                )

    def dequantize(self) -> AABB:
        vals = [dequantize_coord(b) for b in self.bins]
        return AABB(min=tuple(vals[:3]), max=tuple(vals[3:]))

    @property
    def sort_key(self) -> tuple[int, int, int]:
        """Deterministic part ordering key: (z_min, y_min, x_min) bins."""
        return (self.bins[2], self.bins[1], self.bins[0])


def merge_aabbs(boxes) -> AABB:
    """Smallest box containing every input box (component-wise min/max)."""
    boxes = list(boxes)
    if not boxes:
        raise GeometryError("cannot merge an empty box collection")
    lo = tuple(min(b.min[k] for b in boxes) for k in range(3))
    hi = tuple(max(b.max[k] for b in boxes) for k in range(3))
    return AABB(min=lo, max=hi)
