"""Inlet and outlet H-blocks, stitched watertight onto the O-block.

Each H block is a Cartesian-like patch between a domain end and the
matching interface line. Its interface column is copied verbatim from
the O-block outer boundary so the shared nodes are bit-identical, every
row keeps the y of its interface node, and columns are uniform in x.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from ._validation import round_half_up
from .errors import InterfaceMismatch
from .ogrid import StructuredBlock
from .passage import MeshingParams, PassageBoundary, PassageCondition

__all__ = ["MultiblockMesh", "build_h_block", "build_h_blocks"]


@dataclass
class MultiblockMesh:
    """O-block plus optional inlet/outlet H-blocks of one passage."""

    o_block: StructuredBlock
    inlet: StructuredBlock | None
    outlet: StructuredBlock | None
    pitch: float
    condition: PassageCondition | None = None
    params: MeshingParams | None = None

    @property
    def blocks(self) -> list[StructuredBlock]:
        return [b for _, b in self.roles]

    @property
    def roles(self) -> list[tuple[str, StructuredBlock]]:
        out = []
        if self.inlet is not None:
            out.append(("inlet", self.inlet))
        out.append(("o", self.o_block))
        if self.outlet is not None:
            out.append(("outlet", self.outlet))
        return out

    @property
    def n_nodes(self) -> int:
        return sum(b.ni * b.nj for b in self.blocks)


def build_h_block(
    interface_nodes: NDArray[np.float64],
    x_far: float,
    interface_side: str,
) -> StructuredBlock | None:
    """H block spanning from x_far to a column of interface nodes.

    ``interface_nodes`` is the (nj, 2) column shared with the O-block,
    ordered bottom to top; it is copied into the block verbatim.
    ``interface_side`` says which block edge carries it: "right" for an
    inlet block (domain end is to the left), "left" for an outlet block.
    Column count scales the streamwise spacing to the median spanwise
    interface spacing. Returns None when the block has no width.
    """
    nodes = np.asarray(interface_nodes, dtype=float)
    nj = nodes.shape[0]
    if nj < 2:
        raise InterfaceMismatch("interface needs at least two nodes")
    dy = np.diff(nodes[:, 1])
    if np.any(dy <= 0.0):
        j = int(np.argmax(dy <= 0.0))
        raise InterfaceMismatch(
            f"interface y values not strictly increasing at row {j}"
        )
    if interface_side not in ("left", "right"):
        raise ValueError("interface_side must be 'left' or 'right'")

    x_if = float(np.median(nodes[:, 0]))
    width = (x_if - x_far) if interface_side == "right" else (x_far - x_if)
    if width <= 0.0:
        return None

    cols = max(2, round_half_up(width / float(np.median(dy))))
    ni = cols + 1

    coords = np.empty((ni, nj, 2))
    for j in range(nj):
        fx, fy = nodes[j]
        if interface_side == "right":
            xs = np.linspace(x_far, fx, ni)
        else:
            xs = np.linspace(fx, x_far, ni)
        coords[:, j, 0] = xs
        coords[:, j, 1] = fy
    # the shared column must be the O-block nodes bit for bit
    if interface_side == "right":
        coords[-1, :, :] = nodes
    else:
        coords[0, :, :] = nodes

    pairs = np.stack([np.arange(ni), np.arange(ni)], axis=1)
    return StructuredBlock(coords=coords, wrap=False, periodic_pairs=pairs)


def build_h_blocks(
    o_block: StructuredBlock,
    boundary: PassageBoundary,
    cond: PassageCondition | None = None,
    params: MeshingParams | None = None,
) -> MultiblockMesh:
    """Attach inlet and outlet H blocks to a smoothed O-block.

    The interface columns are the O-block outer-boundary nodes on the
    left and right loop pieces (bottom to top). A side whose extension
    has zero width is omitted.
    """
    if o_block.pieces is None:
        raise InterfaceMismatch("O-block carries no outer-wall pieces")
    outer = o_block.coords[:, -1, :]
    left = outer[o_block.pieces["left"]]
    right = outer[o_block.pieces["right"]]
    inlet = build_h_block(left, boundary.x_start, "right")
    outlet = build_h_block(right, boundary.x_end, "left")
    return MultiblockMesh(
        o_block=o_block,
        inlet=inlet,
        outlet=outlet,
        pitch=boundary.pitch,
        condition=cond,
        params=params,
    )
