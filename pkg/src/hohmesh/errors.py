"""Exception taxonomy for the mesh generation pipeline.

Every failure mode that should be survivable by a caller (the trainer
treats any of these as a failed episode) derives from MeshGenerationError
and carries the pipeline stage it occurred in.
"""

from __future__ import annotations


class MeshGenerationError(Exception):
    """Base class for all recoverable mesh generation failures."""

    stage = "unknown"

    def __init__(self, message: str = ""):
        super().__init__(message or self.__class__.__name__)


class InvalidShape(MeshGenerationError):
    """Blade camber or surface is geometrically invalid."""

    stage = "blade"


class BoundaryIntersectsBlade(MeshGenerationError):
    """Passage boundary crosses the blade surface."""

    stage = "passage"


class InfeasibleClustering(MeshGenerationError):
    """Requested first spacing exceeds the uniform spacing."""

    stage = "clustering"


class ExtrusionFailure(MeshGenerationError):
    """A surface normal ray found no usable outer-loop intersection."""

    stage = "omesh"


class InvalidMesh(MeshGenerationError):
    """Initial block violates a structural invariant (folding, pairing)."""

    stage = "omesh"


class FoldedMesh(MeshGenerationError):
    """Smoothing folded the grid and retries were exhausted."""

    stage = "smoothing"


class SingularMetric(MeshGenerationError):
    """Coordinate Jacobian vanished at a boundary node."""

    stage = "smoothing"


class InterfaceMismatch(MeshGenerationError):
    """Block interface nodes are not strictly monotone."""

    stage = "hmesh"


class DegenerateCell(MeshGenerationError):
    """A cell has a zero-length edge."""

    stage = "quality"


class SamplingExhausted(MeshGenerationError):
    """Rejection sampling failed too many times in a row."""

    stage = "sampling"


class UnknownVariable(KeyError):
    """Space lookup used a variable name that is not registered."""


class DimensionMismatch(ValueError):
    """Array argument has the wrong shape for the operation."""


class ConfigError(Exception):
    """A configuration file is missing or malformed. Carries the path."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")
