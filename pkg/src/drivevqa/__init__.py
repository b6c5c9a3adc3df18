"""drivevqa: data pipeline and evaluation toolkit for multi-view
driving-scene question answering.

The package covers four stages: composing six camera views into one
2688x896 input image, normalizing driving-QA datasets into a common record
schema, computing a combined text+location training loss over token/logit
streams, and scoring model outputs with the full metric suite.
"""

from .cameras import CameraView, UnknownCamera, normalize_camera_name
from .records import QARecord, QATurn
from .spaces import CoordSpace, SpaceKind
from .stitch import CoordinatePolicy, StitchLayout, compose_views, transform_point
from .tags import KeyObjectTag, parse_key_object_tags, render_key_object_tag

__version__ = "0.1.0"

__all__ = [
    "CameraView",
    "CoordSpace",
    "CoordinatePolicy",
    "KeyObjectTag",
    "QARecord",
    "QATurn",
    "SpaceKind",
    "StitchLayout",
    "UnknownCamera",
    "__version__",
    "compose_views",
    "normalize_camera_name",
    "parse_key_object_tags",
    "render_key_object_tag",
    "transform_point",
]
