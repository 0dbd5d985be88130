"""LiDAR-guided stereo matching toolkit.

Cost-volume retrieval, sparse guidance injection, depth pre-filling,
early fusion, sparsity simulation, diagnostics and metrics.
"""

from stereo_lab.errors import FormatError, PreconditionError, StereoLabError
from stereo_lab.geometry import CameraRig, Point3D, INVALID

__all__ = [
    "CameraRig",
    "FormatError",
    "INVALID",
    "Point3D",
    "PreconditionError",
    "StereoLabError",
]

__version__ = "0.1.0"
