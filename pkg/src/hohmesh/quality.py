"""Mesh quality metrics on the O-block.

Two per-cell measures are combined: a Jacobian ratio Q_J (min over max
of the four corner-node Jacobians, so 1 is perfectly smooth sizing and
anything <= 0 means inversion) and an included-angle skewness Q_S (1 for
right angles, decreasing linearly as the extreme angles depart from 90
degrees). The scalar score is the mean of the minima and averages of
both fields over the O-block cells.

Node Jacobians use centered differences; one-sided second-order stencils
stand in at the blade wall and, when no neighbor data exists, at the
outer boundary. When H-block columns or periodic partners are available
they provide ghost nodes so outer-boundary Jacobians stay centered.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .errors import DegenerateCell
from .hblocks import MultiblockMesh
from .ogrid import StructuredBlock

__all__ = [
    "QualityReport",
    "node_jacobians",
    "cell_jacobian_quality",
    "cell_skewness_quality",
    "outer_ghosts",
    "evaluate_o_block",
    "evaluate",
    "wall_orthogonality_deviation",
]


@dataclass
class QualityReport:
    qj_min: float
    qj_avg: float
    qs_min: float
    qs_avg: float
    q: float
    worst_qj_cell: tuple[int, int]
    worst_qs_cell: tuple[int, int]
    n_cells: int
    folded: bool

    def to_text(self) -> str:
        lines = [
            f"qj_min = {self.qj_min!r}",
            f"qj_avg = {self.qj_avg!r}",
            f"qs_min = {self.qs_min!r}",
            f"qs_avg = {self.qs_avg!r}",
            f"q = {self.q!r}",
            f"worst_qj_cell = {self.worst_qj_cell[0]} {self.worst_qj_cell[1]}",
            f"worst_qs_cell = {self.worst_qs_cell[0]} {self.worst_qs_cell[1]}",
            f"n_cells = {self.n_cells}",
            f"folded = {'true' if self.folded else 'false'}",
        ]
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        return {
            "qj_min": self.qj_min,
            "qj_avg": self.qj_avg,
            "qs_min": self.qs_min,
            "qs_avg": self.qs_avg,
            "q": self.q,
            "worst_qj_cell": list(self.worst_qj_cell),
            "worst_qs_cell": list(self.worst_qs_cell),
            "n_cells": self.n_cells,
            "folded": self.folded,
        }

    def to_json(self, extra: dict | None = None) -> str:
        d = self.to_dict()
        if extra:
            d.update(extra)
        return json.dumps(d, indent=2, sort_keys=True) + "\n"


def _one_sided_start(f0, f1, f2):
    return (-3.0 * f0 + 4.0 * f1 - f2) / 2.0


def node_jacobians(
    block: StructuredBlock, ghosts: NDArray[np.float64] | None = None
) -> NDArray[np.float64]:
    """Coordinate Jacobian x_xi y_eta - x_eta y_xi at every node.

    ``ghosts`` is an optional (ni, 2) array of coordinates one step past
    the outer boundary (j = nj); rows with NaN fall back to the one-sided
    stencil there. The blade wall j = 0 always uses the one-sided
    stencil.
    """
    c = block.coords
    ni, nj = block.ni, block.nj
    if ni < 3 or nj < 3:
        raise ValueError("need at least 3 nodes in each direction")

    if block.wrap:
        d_xi = (np.roll(c, -1, axis=0) - np.roll(c, 1, axis=0)) / 2.0
    else:
        d_xi = np.empty_like(c)
        d_xi[1:-1] = (c[2:] - c[:-2]) / 2.0
        d_xi[0] = _one_sided_start(c[0], c[1], c[2])
        d_xi[-1] = -_one_sided_start(c[-1], c[-2], c[-3])

    d_eta = np.empty_like(c)
    d_eta[:, 1:-1] = (c[:, 2:] - c[:, :-2]) / 2.0
    d_eta[:, 0] = _one_sided_start(c[:, 0], c[:, 1], c[:, 2])
    d_eta[:, -1] = -_one_sided_start(c[:, -1], c[:, -2], c[:, -3])
    if ghosts is not None:
        g = np.asarray(ghosts, dtype=float)
        have = ~np.isnan(g).any(axis=1)
        d_eta[have, -1] = (g[have] - c[have, -2]) / 2.0

    return d_xi[..., 0] * d_eta[..., 1] - d_eta[..., 0] * d_xi[..., 1]


def _cell_corners(values: NDArray, wrap: bool):
    v = np.concatenate([values, values[:1]], axis=0) if wrap else values
    return v[:-1, :-1], v[1:, :-1], v[1:, 1:], v[:-1, 1:]


def cell_jacobian_quality(
    node_j: NDArray[np.float64], wrap: bool
) -> NDArray[np.float64]:
    """Per-cell min/max ratio of the four corner-node Jacobians.

    Cells whose largest corner Jacobian is zero get -inf.
    """
    a, b, cc, d = _cell_corners(node_j, wrap)
    stack = np.stack([a, b, cc, d])
    mn = stack.min(axis=0)
    mx = stack.max(axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        q = mn / mx
    q = np.where(mx == 0.0, -np.inf, q)
    return q


def cell_skewness_quality(block: StructuredBlock) -> NDArray[np.float64]:
    """Per-cell skewness from the extreme included angles.

    Q_S = 1 - max((90 - t_min)/90, (t_max - 90)/90) with angles in
    degrees at the four cell corners. Raises DegenerateCell on a
    zero-length cell edge.
    """
    a, b, cc, d = _cell_corners(block.coords, block.wrap)
    cycle = [(a, b, d), (b, cc, a), (cc, d, b), (d, a, cc)]

    edges = [b - a, cc - b, d - cc, a - d]
    for e in edges:
        ln = np.einsum("...k,...k->...", e, e)
        if np.any(ln == 0.0):
            i, j = np.unravel_index(int(np.argmax(ln == 0.0)), ln.shape)
            raise DegenerateCell(f"cell ({i}, {j}) has a zero-length edge")

    angles = []
    for v, nxt, prv in cycle:
        vn = nxt - v
        vp = prv - v
        cross = vn[..., 0] * vp[..., 1] - vn[..., 1] * vp[..., 0]
        dot = vn[..., 0] * vp[..., 0] + vn[..., 1] * vp[..., 1]
        ang = np.arctan2(cross, dot)
        ang = np.where(ang <= 0.0, ang + 2.0 * math.pi, ang)
        angles.append(np.degrees(ang))
    stack = np.stack(angles)
    t_min = stack.min(axis=0)
    t_max = stack.max(axis=0)
    return 1.0 - np.maximum((90.0 - t_min) / 90.0, (t_max - 90.0) / 90.0)


def outer_ghosts(mesh: MultiblockMesh) -> NDArray[np.float64]:
    """Ghost coordinates past the O-block outer boundary, NaN where none.

    Periodic wall nodes mirror their partner's first interior row
    shifted by the pitch; interface nodes continue into the neighboring
    H-block column. Corner nodes prefer the H-block ghost.
    """
    o = mesh.o_block
    c = o.coords
    ni, nj = o.ni, o.nj
    ghosts = np.full((ni, 2), np.nan)
    shift = np.array([0.0, mesh.pitch])

    pairs = o.periodic_pairs
    # first two pairs are the interface corners; they are handled below
    for lo, up in pairs[2:]:
        ghosts[lo] = c[up, nj - 2] - shift
        ghosts[up] = c[lo, nj - 2] + shift

    if o.pieces is not None:
        if mesh.inlet is not None:
            col = mesh.inlet.coords[mesh.inlet.ni - 2]
            for row, idx in enumerate(o.pieces["left"]):
                ghosts[idx] = col[row]
        if mesh.outlet is not None:
            col = mesh.outlet.coords[1]
            for row, idx in enumerate(o.pieces["right"]):
                ghosts[idx] = col[row]
    return ghosts


def evaluate_o_block(
    block: StructuredBlock, ghosts: NDArray[np.float64] | None = None
) -> QualityReport:
    """Quality report over the cells of one wrap block."""
    node_j = node_jacobians(block, ghosts)
    qj = cell_jacobian_quality(node_j, block.wrap)
    qs = cell_skewness_quality(block)

    qj_min = float(qj.min())
    qs_min = float(qs.min())
    qj_avg = float(qj.mean())
    qs_avg = float(qs.mean())
    q = (qj_min + qj_avg + qs_min + qs_avg) / 4.0
    worst_j = np.unravel_index(int(np.argmin(qj)), qj.shape)
    worst_s = np.unravel_index(int(np.argmin(qs)), qs.shape)
    folded = not math.isfinite(qj_min) or qj_min <= 0.0
    return QualityReport(
        qj_min=qj_min,
        qj_avg=qj_avg,
        qs_min=qs_min,
        qs_avg=qs_avg,
        q=q,
        worst_qj_cell=(int(worst_j[0]), int(worst_j[1])),
        worst_qs_cell=(int(worst_s[0]), int(worst_s[1])),
        n_cells=qj.size,
        folded=folded,
    )


def evaluate(mesh: MultiblockMesh) -> QualityReport:
    """Quality of the passage mesh, scored on the O-block cells."""
    ghosts = outer_ghosts(mesh) if mesh.o_block.pieces is not None else None
    return evaluate_o_block(mesh.o_block, ghosts)


def wall_orthogonality_deviation(block: StructuredBlock) -> NDArray[np.float64]:
    """Per-node deviation (degrees) from a right angle at the blade wall.

    Measures the angle between the first off-wall edge and the local
    wall tangent (centered along the ring).
    """
    wall = block.coords[:, 0, :]
    step = block.coords[:, 1, :] - wall
    tang = np.roll(wall, -1, axis=0) - np.roll(wall, 1, axis=0)
    dot = np.einsum("ij,ij->i", step, tang)
    den = np.linalg.norm(step, axis=1) * np.linalg.norm(tang, axis=1)
    cosang = np.clip(dot / np.maximum(den, 1e-300), -1.0, 1.0)
    return np.abs(np.degrees(np.arccos(cosang)) - 90.0)
