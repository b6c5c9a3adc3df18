"""Coordinate spaces a pixel coordinate can be expressed in.

Tags travel between three spaces: the native camera frame ("original"),
the resized single view that ends up as one grid cell ("per_view", fixed
896x448), and the full stitched composite ("concatenated", fixed 2688x896).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

PER_VIEW_W = 896
PER_VIEW_H = 448
CONCAT_W = 2688
CONCAT_H = 896


class SpaceKind(Enum):
    ORIGINAL = "original"
    PER_VIEW = "per_view"
    CONCATENATED = "concatenated"


@dataclass(frozen=True)
class CoordSpace:
    """A coordinate space with its pixel extent.

    Per-view and concatenated spaces have fixed dimensions; original spaces
    carry the native resolution of the camera they belong to.
    """

    kind: SpaceKind
    width: float
    height: float

    def __post_init__(self) -> None:
        if self.width <= 0 or self.height <= 0:
            raise ValueError(f"space dimensions must be positive, got {self.width}x{self.height}")
        if self.kind is SpaceKind.PER_VIEW and (self.width, self.height) != (PER_VIEW_W, PER_VIEW_H):
            raise ValueError(f"per-view space is fixed at {PER_VIEW_W}x{PER_VIEW_H}")
        if self.kind is SpaceKind.CONCATENATED and (self.width, self.height) != (CONCAT_W, CONCAT_H):
            raise ValueError(f"concatenated space is fixed at {CONCAT_W}x{CONCAT_H}")

    @classmethod
    def original(cls, native_w: float, native_h: float) -> CoordSpace:
        return cls(SpaceKind.ORIGINAL, native_w, native_h)

    @classmethod
    def per_view(cls) -> CoordSpace:
        return cls(SpaceKind.PER_VIEW, PER_VIEW_W, PER_VIEW_H)

    @classmethod
    def concatenated(cls) -> CoordSpace:
        return cls(SpaceKind.CONCATENATED, CONCAT_W, CONCAT_H)

    def contains(self, x: float, y: float, slack: float = 0.0) -> bool:
        """Whether (x, y) lies within this space's bounds, widened by slack."""
        return -slack <= x <= self.width + slack and -slack <= y <= self.height + slack

    def to_json(self) -> dict:
        return {"kind": self.kind.value, "width": self.width, "height": self.height}

    @classmethod
    def from_json(cls, obj: dict) -> CoordSpace:
        return cls(SpaceKind(obj["kind"]), float(obj["width"]), float(obj["height"]))
