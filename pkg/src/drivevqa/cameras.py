"""The six surround cameras and their slots in the stitched 3x2 grid."""

from __future__ import annotations

from enum import Enum


class UnknownCamera(ValueError):
    """Raised when a camera name cannot be mapped to one of the six views."""

    def __init__(self, raw: str) -> None:
        super().__init__(f"unknown camera name: {raw!r}")
        self.raw = raw


class CameraView(Enum):
    """One of the six surround views.

    Row 0 of the composite holds the front-facing cameras left to right,
    row 1 the back-facing ones.
    """

    FRONT_LEFT = "FRONT_LEFT"
    FRONT = "FRONT"
    FRONT_RIGHT = "FRONT_RIGHT"
    BACK_LEFT = "BACK_LEFT"
    BACK = "BACK"
    BACK_RIGHT = "BACK_RIGHT"

    @property
    def slot(self) -> tuple[int, int]:
        """(row, col) of this camera in the stitched grid."""
        return _SLOTS[self]

    @property
    def canonical_name(self) -> str:
        """Underscore spelling with the CAM_ prefix, e.g. ``CAM_FRONT_LEFT``."""
        return "CAM_" + self.value


_SLOTS: dict[CameraView, tuple[int, int]] = {
    CameraView.FRONT_LEFT: (0, 0),
    CameraView.FRONT: (0, 1),
    CameraView.FRONT_RIGHT: (0, 2),
    CameraView.BACK_LEFT: (1, 0),
    CameraView.BACK: (1, 1),
    CameraView.BACK_RIGHT: (1, 2),
}


def normalize_camera_name(raw: str) -> CameraView:
    """Map any accepted spelling to the camera enum.

    Accepts the spaced form ("CAM FRONT"), the underscore form ("cam_front")
    and the bare view name ("FRONT"), case-insensitively.

    Raises:
        UnknownCamera: if the string matches none of the six views.
    """
    key = raw.strip().upper().replace(" ", "_")
    if key.startswith("CAM_"):
        key = key[len("CAM_"):]
    try:
        return CameraView(key)
    except ValueError:
        raise UnknownCamera(raw) from None
