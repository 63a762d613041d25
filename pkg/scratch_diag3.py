"""Zoom on the residual 2-column folds at rebalance batch junctions."""
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

real_rebalance = og._rebalance_periodic_feet
cap = {}


def spy_rebalance(feet, lam, outer, runs, corner_nodes):
    before = lam.copy()
    out = real_rebalance(feet, lam, outer, runs, corner_nodes)
    cap["moved"] = np.flatnonzero(before != lam)
    cap["lam_before"] = before
    cap["lam_after"] = lam.copy()
    cap["stations"] = tuple(float(a) for a in outer.corner_arcs[1:])
    return out


og._rebalance_periodic_feet = spy_rebalance
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
    cap.clear()
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
    if neg.size == 0:
        print(f"[{k:2d}] ok")
        continue

    ni, nj = block.coords.shape[:2]
    outer_cols = sorted({int(i) for i, j in neg if j >= nj - 3})
    moved = set(cap.get("moved", np.array([], int)).tolist())
    total = outer.total_length
    lam_a = cap.get("lam_after")
    lam_b = cap.get("lam_before")
    print(f"[{k:2d}] FOLDED {neg.shape[0]} cells, outer cols {outer_cols[:8]}")
    if shown >= 2 or lam_a is None:
        continue
    shown += 1
    stations = cap["stations"]
    print(f"     stations lam_rt={stations[0]:.4f} lam_lt={stations[1]:.4f} "
          f"lam_lb={stations[2]:.4f} total={total:.4f}")
    for c in outer_cols[:4]:
        print(f"     --- col {c} (cell between ring {c} and {(c + 1) % ni}):")
        for i in range((c - 3) % ni, (c - 3) % ni + 7):
            i %= ni
            tag = "MOVED" if i in moved else "     "
            print(f"       ring {i:4d} {tag} lam_before={lam_b[i]:9.5f} "
                  f"lam_after={lam_a[i]:9.5f}")
