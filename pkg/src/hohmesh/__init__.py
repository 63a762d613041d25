"""Structured HOH meshing of blade passages with a learned policy.

The geometry pipeline turns a parametric blade section and passage
layout into a smoothed body-fitted O-block with H-block extensions,
scores the result, and the training loop learns to pick the meshing
decision variables from the task description alone.
"""

from ._version import __version__
from .blade import (
    BladeProfile,
    BladeShapeParams,
    build_camber,
    build_profile,
    read_blade_config,
    write_blade_config,
)
from .elliptic import SmootherSettings, SmoothResult, smooth
from .errors import (
    BoundaryIntersectsBlade,
    ConfigError,
    DegenerateCell,
    DimensionMismatch,
    ExtrusionFailure,
    FoldedMesh,
    InfeasibleClustering,
    InterfaceMismatch,
    InvalidMesh,
    InvalidShape,
    MeshGenerationError,
    SamplingExhausted,
    SingularMetric,
    UnknownVariable,
)
from .hblocks import MultiblockMesh, build_h_blocks
from .meshio import (
    condition_hash,
    read_mesh,
    read_plot3d,
    read_vtk,
    write_plot3d,
    write_report,
    write_vtk,
)
from .ogrid import (
    ClusterSpec,
    OuterLoop,
    RingNodes,
    StructuredBlock,
    distribute_surface_nodes,
    extrude_to_outer,
    min_cell_area,
    outer_loop_from_boundary,
)
from .passage import (
    MeshingParams,
    PassageBoundary,
    PassageCondition,
    build_boundary,
    read_condition_config,
)
from .pipeline import FAILURE_REWARD, PipelineResult, generate_mesh, reward
from .quality import (
    QualityReport,
    evaluate,
    evaluate_o_block,
    node_jacobians,
    wall_orthogonality_deviation,
)
from .spaces import (
    SpaceSpec,
    VariableSpec,
    apply_space_file,
    condition_from_values,
    condition_space,
    condition_values,
    decision_space,
    meshing_params_from_values,
    sample_condition,
)
from .training import (
    MeshPolicyAgent,
    OptimizeResult,
    ReplayBuffer,
    TrainHistory,
    TrainSettings,
    iterative_optimize,
    noise_sigma,
    train,
)

__all__ = [
    "__version__",
    "BladeProfile",
    "BladeShapeParams",
    "build_camber",
    "build_profile",
    "read_blade_config",
    "write_blade_config",
    "SmootherSettings",
    "SmoothResult",
    "smooth",
    "BoundaryIntersectsBlade",
    "ConfigError",
    "DegenerateCell",
    "DimensionMismatch",
    "ExtrusionFailure",
    "FoldedMesh",
    "InfeasibleClustering",
    "InterfaceMismatch",
    "InvalidMesh",
    "InvalidShape",
    "MeshGenerationError",
    "SamplingExhausted",
    "SingularMetric",
    "UnknownVariable",
    "MultiblockMesh",
    "build_h_blocks",
    "condition_hash",
    "read_mesh",
    "read_plot3d",
    "read_vtk",
    "write_plot3d",
    "write_report",
    "write_vtk",
    "ClusterSpec",
    "OuterLoop",
    "RingNodes",
    "StructuredBlock",
    "distribute_surface_nodes",
    "extrude_to_outer",
    "min_cell_area",
    "outer_loop_from_boundary",
    "MeshingParams",
    "PassageBoundary",
    "PassageCondition",
    "build_boundary",
    "read_condition_config",
    "FAILURE_REWARD",
    "PipelineResult",
    "generate_mesh",
    "reward",
    "QualityReport",
    "evaluate",
    "evaluate_o_block",
    "node_jacobians",
    "wall_orthogonality_deviation",
    "SpaceSpec",
    "VariableSpec",
    "apply_space_file",
    "condition_from_values",
    "condition_space",
    "condition_values",
    "decision_space",
    "meshing_params_from_values",
    "sample_condition",
    "MeshPolicyAgent",
    "OptimizeResult",
    "ReplayBuffer",
    "TrainHistory",
    "TrainSettings",
    "iterative_optimize",
    "noise_sigma",
    "train",
]
