"""Which cells does _pin_corners_and_pair invert, and which movement
(corner snap vs pair averaging) does it."""
import numpy as np

import hohmesh.ogrid as og
from hohmesh.blade import build_profile
from hohmesh.errors import MeshGenerationError
from hohmesh.ogrid import (
    ClusterSpec,
    distribute_surface_nodes,
    outer_loop_from_boundary,
)
from hohmesh.passage import MeshingParams, build_boundary
from hohmesh.spaces import condition_space, sample_condition

rng = np.random.default_rng(1234)
space = condition_space()
params = MeshingParams(
    y_in=0.0, y_out=0.0, alpha_camber=1.0, beta_in=0.5, beta_out=0.5,
    n_t=300, gamma_le=2.0, gamma_te=2.0,
)

FAIL_KS = {23, 29, 46, 50, 58}


def cell_areas(coords):
    c = np.concatenate([coords, coords[:1]], axis=0)
    a, b = c[:-1, :-1], c[1:, :-1]
    cc, d = c[1:, 1:], c[:-1, 1:]
    return 0.5 * (
        (cc[..., 0] - a[..., 0]) * (d[..., 1] - b[..., 1])
        - (cc[..., 1] - a[..., 1]) * (d[..., 0] - b[..., 0])
    )


og_min = og.min_cell_area
og.min_cell_area = lambda b: 1.0  # let folded blocks through for inspection

for k in range(60):
    cond, _ = sample_condition(space, rng)
    if k not in FAIL_KS:
        continue
    try:
        profile = build_profile(cond.bsp, n_samples=4 * params.n_t)
        boundary = build_boundary(cond, params, profile)
        spec = ClusterSpec.from_condition(cond, params)
        ring = distribute_surface_nodes(profile, spec)
        outer = outer_loop_from_boundary(boundary)
        block = og.extrude_to_outer(ring, outer, spec)
    except MeshGenerationError as exc:
        print(f"[{k}] {exc.stage}: {exc}")
        continue

    areas = cell_areas(block.coords)
    neg = np.argwhere(areas <= 0.0)
    ni, nj = block.coords.shape[:2]
    runs = {n: set(np.asarray(v).tolist()) for n, v in block.pieces.items()}
    print(f"[{k}] {neg.shape[0]} folded cells (grid {ni}x{nj})")
    for i, j in neg[:8]:
        i = int(i)
        wall = [n for n, s in runs.items() if i in s or (i + 1) % ni in s]
        print(f"    cell ({i},{int(j)}) of j_max {nj - 2}  walls觸 {wall}")
        if int(j) >= nj - 2:
            f0 = block.coords[i, -1]
            f1 = block.coords[(i + 1) % ni, -1]
            fm = block.coords[(i - 1) % ni, -1]
            f2 = block.coords[(i + 2) % ni, -1]
            print(f"      feet around: ({fm[0]:+.5f},{fm[1]:+.5f}) "
                  f"({f0[0]:+.5f},{f0[1]:+.5f}) ({f1[0]:+.5f},{f1[1]:+.5f}) "
                  f"({f2[0]:+.5f},{f2[1]:+.5f})")
