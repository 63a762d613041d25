"""End-to-end mesh generation for one passage.

Chains the stages: blade profile, channel boundary, surface node
distribution, normal extrusion, elliptic smoothing, H-block stitching,
and quality scoring. Any stage may raise a MeshGenerationError subclass
whose ``stage`` attribute names where it happened; ``reward`` converts
that to the failure reward used in training.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .blade import build_profile
from .elliptic import SmootherSettings, smooth
from .errors import MeshGenerationError
from .hblocks import MultiblockMesh, build_h_blocks
from .ogrid import (
    ClusterSpec,
    distribute_surface_nodes,
    extrude_to_outer,
    outer_loop_from_boundary,
)
from .passage import MeshingParams, PassageCondition, build_boundary
from .quality import QualityReport, evaluate

__all__ = ["PipelineResult", "generate_mesh", "reward", "FAILURE_REWARD"]

FAILURE_REWARD = -1.0


@dataclass
class PipelineResult:
    mesh: MultiblockMesh
    report: QualityReport
    smoother_converged: bool
    smoother_sweeps: int
    smoother_residual: float
    residual_history: np.ndarray


def generate_mesh(
    cond: PassageCondition,
    params: MeshingParams,
    settings: SmootherSettings | None = None,
) -> PipelineResult:
    """Build, smooth, and score the HOH mesh of one passage."""
    cond.validate()
    params.validate()
    profile = build_profile(cond.bsp, n_samples=4 * params.n_t)
    boundary = build_boundary(cond, params, profile)
    spec = ClusterSpec.from_condition(cond, params)
    ring = distribute_surface_nodes(profile, spec)
    outer = outer_loop_from_boundary(boundary)
    block = extrude_to_outer(ring, outer, spec)
    result = smooth(block, settings)
    mesh = build_h_blocks(result.block, boundary, cond, params)
    report = evaluate(mesh)
    return PipelineResult(
        mesh=mesh,
        report=report,
        smoother_converged=result.converged,
        smoother_sweeps=result.sweeps,
        smoother_residual=float(result.residual_history[-1]),
        residual_history=result.residual_history,
    )


def reward(
    cond: PassageCondition,
    params: MeshingParams,
    settings: SmootherSettings | None = None,
) -> float:
    """Quality score of the generated mesh, or -1 when generation fails."""
    try:
        result = generate_mesh(cond, params, settings)
    except MeshGenerationError:
        return FAILURE_REWARD
    if result.report.folded:
        return FAILURE_REWARD
    return float(result.report.q)
