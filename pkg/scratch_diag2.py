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

# instrument the rebalance step
real_rebalance = og._rebalance_periodic_feet
moved = {}


def spy_rebalance(feet, lam, outer, runs, stations):
    right, upper, left, lower = runs
    moved["d"] = abs(upper.size - lower.size)
    big = upper if upper.size > lower.size else lower
    d = moved["d"]
    dh = d // 2
    moved["nodes"] = np.concatenate([big[:dh], big[big.size - (d - dh):]])
    return real_rebalance(feet, lam, outer, runs, stations)


og._rebalance_periodic_feet = spy_rebalance

real_min_area = og.min_cell_area
og.min_cell_area = lambda b: 1.0


def cell_areas(coords):
    c = np.concatenate([coords, coords[:1]], axis=0)
    a, b = c[:-1, :-1], c[1:, :-1]
    cc, d = c[1:, 1:], c[:-1, 1:]
    return 0.5 * (
        (cc[..., 0] - a[..., 0]) * (d[..., 1] - b[..., 1])
        - (cc[..., 1] - a[..., 1]) * (d[..., 0] - b[..., 0])
    )


shown = 0
for k in range(14):
    cond, _ = sample_condition(space, rng)
    moved.clear()
    try:
        profile = build_profile(cond.bsp, n_samples=4 * params.n_t)
        boundary = build_boundary(cond, params, profile)
        spec = ClusterSpec.from_condition(cond, params)
        ring = distribute_surface_nodes(profile, spec)
        outer = outer_loop_from_boundary(boundary)
        block = og.extrude_to_outer(ring, outer, spec)
    except MeshGenerationError as exc:
        print(f"[{k:2d}] {exc.stage}: {str(exc)[:55]}")
        continue

    areas = cell_areas(block.coords)
    neg = np.argwhere(areas <= 0.0)
    d = moved.get("d", 0)
    if neg.size == 0:
        print(f"[{k:2d}] ok (rebalance d={d})")
        continue

    ni, nj = block.coords.shape[:2]
    outer_cols = sorted({int(i) for i, j in neg if j >= nj - 3})
    moved_set = set(moved.get("nodes", np.array([], dtype=int)).tolist())
    overlap = len(set(outer_cols) & moved_set) + len(
        {(c + 1) % ni for c in outer_cols} & moved_set
    )
    # order of feet around the loop vs ring order: count inversions of lam
    # along the ring for the outer row
    feet = block.coords[:, -1, :]

    print(
        f"[{k:2d}] FOLDED: {neg.shape[0]} cells, d={d}, "
        f"outer-fold cols={len(outer_cols)}, of which near moved nodes: "
        f"{overlap}"
    )
    if shown < 2:
        shown += 1
        runs = {n: np.asarray(v) for n, v in block.pieces.items()}
        for name in ("left", "right", "lower", "upper"):
            r = runs[name]
            print(f"     {name}: n={r.size} ring-ids {r[:6]}..{r[-6:]}")
        print(f"     moved nodes: {sorted(moved_set)[:20]}")
        print(f"     outer fold cols: {outer_cols[:24]}")
