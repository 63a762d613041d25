"""Map fold columns onto the rebalance reseat chains."""
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


og.min_cell_area = lambda b: 1.0

trace = {}

cases = {}
for k in range(60):
    cond, _ = sample_condition(space, rng)
    if k in FAIL_KS:
        cases[k] = cond

for k, cond in cases.items():
    trace.clear()
    profile = build_profile(cond.bsp, n_samples=4 * params.n_t)
    boundary = build_boundary(cond, params, profile)
    spec = ClusterSpec.from_condition(cond, params)
    ring = distribute_surface_nodes(profile, spec)
    outer = outer_loop_from_boundary(boundary)
    try:
        block = og.extrude_to_outer(ring, outer, spec)
    except MeshGenerationError as exc:
        print(f"[{k}] raises {exc.stage}: {str(exc)[:50]}")
        continue
    areas = cell_areas(block.coords)
    neg = np.argwhere(areas <= 0.0)
    print(f"=== case {k}: {neg.shape[0]} folded cells")
    if trace:
        runs = trace["runs"]
        sizes = {n: len(v) for n, v in runs.items()}
        print(f"    run sizes {sizes}  corners in {trace['corners_in']}"
              f" out {trace['corners_out']}")
        mv = trace["moved"]
        print(f"    moved nodes ({len(mv)}): {mv}")
    if neg.size:
        cols = sorted({int(i) for i, _ in neg})
        js = sorted({int(j) for _, j in neg})
        print(f"    fold cols {cols}")
        print(f"    fold j range {js[0]}..{js[-1]}")
        # which run do the fold cols belong to
        if trace:
            for name, ids in trace["runs"].items():
                hit = sorted(set(cols) & set(ids))
                if hit:
                    print(f"    cols in {name}: {hit}")
