"""Is the residual folding caused by the feet distribution or by
corner snapping / periodic pair averaging?"""
import numpy as np

import hohmesh.ogrid as og
from hohmesh.blade import build_profile
from hohmesh.errors import MeshGenerationError
from hohmesh.ogrid import (
    ClusterSpec,
    StructuredBlock,
    distribute_surface_nodes,
    outer_loop_from_boundary,
)
from hohmesh.clustering import wall_cluster_many
from hohmesh.passage import MeshingParams, build_boundary
from hohmesh.spaces import condition_space, sample_condition

rng = np.random.default_rng(1234)
space = condition_space()
params = MeshingParams(
    y_in=0.0, y_out=0.0, alpha_camber=1.0, beta_in=0.5, beta_out=0.5,
    n_t=300, gamma_le=2.0, gamma_te=2.0,
)

FAIL_KS = {23, 29, 39, 46, 50, 52, 58}


def bare_block(surf, feet, spec):
    lengths = np.linalg.norm(feet - surf, axis=1)
    t = wall_cluster_many(spec.n_n, lengths, spec.dn1)
    frac = t / lengths[:, None]
    coords = surf[:, None, :] + frac[..., None] * (feet - surf)[:, None, :]
    coords[:, 0, :] = surf
    coords[:, -1, :] = feet
    return StructuredBlock(
        coords=coords, wrap=True,
        periodic_pairs=np.empty((0, 2), dtype=int), pieces=None,
    )


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
    except MeshGenerationError as exc:
        print(f"[{k}] upstream {exc.stage}: {exc}")
        continue

    surf = ring.points
    scale = float(np.max(np.ptp(surf, axis=0)))
    nxt = np.roll(surf, -1, axis=0)
    prv = np.roll(surf, 1, axis=0)
    tang = nxt - prv
    tang /= np.linalg.norm(tang, axis=1, keepdims=True)
    normals = np.stack([-tang[:, 1], tang[:, 0]], axis=1)
    hit, feet, seg_idx, seg_frac = og._ray_hits(surf, normals, outer, scale)
    if not np.all(hit):
        rev = ~hit
        hit2, feet2, seg2, frac2 = og._ray_hits(surf[rev], -normals[rev], outer, scale)
        feet[rev] = feet2
        seg_idx[rev] = seg2
        seg_frac[rev] = frac2
    lam = outer.arclength_of(seg_idx, seg_frac)
    ordered = og._order_feet_along_loop(lam, outer)
    if ordered is not None:
        lam = ordered
        for i in range(lam.size):
            feet[i] = outer.point_at(lam[i])

    w = np.linalg.norm(np.roll(surf, -1, axis=0) - surf, axis=1)
    print(f"[{k}] psi={np.degrees(cond.bsp.psi):+.0f} "
          f"th_le={np.degrees(cond.bsp.theta_le):+.0f} "
          f"th_te={np.degrees(cond.bsp.theta_te):+.0f} "
          f"pitch={cond.pitch:.2f} chord={cond.bsp.chord:.2f}")
    for passes in (0, 8, 64, None):
        if passes == 0:
            lam_t, feet_t = lam.copy(), feet.copy()
        else:
            lam_t = og._diffuse_foot_gaps(lam, w, outer.total_length, passes)
            feet_t = np.stack([outer.point_at(v) for v in lam_t])
        try:
            a_bare = og.min_cell_area(bare_block(surf, feet_t, spec))
        except MeshGenerationError as exc:
            print(f"    dose {str(passes):>4}: bare raises {exc.stage}")
            continue
        try:
            blk = og._assemble_block(surf, outer, spec, feet_t.copy(), lam_t.copy(), scale)
            a_full = og.min_cell_area(blk)
        except MeshGenerationError as exc:
            a_full = f"raises {exc.stage}: {str(exc)[:35]}"
        print(f"    dose {str(passes):>4}: bare {a_bare:+.2e}   pinned {a_full}")
