"""Per-variant fold maps: straight vs blended, stage 0 vs diffusion."""
import numpy as np

import hohmesh.ogrid as og
from hohmesh.blade import build_profile
from hohmesh.errors import MeshGenerationError
from hohmesh.ogrid import (
    ClusterSpec,
    distribute_surface_nodes,
    outer_loop_from_boundary,
    min_cell_area,
)
from hohmesh.passage import MeshingParams, build_boundary
from hohmesh.spaces import condition_space, sample_condition

rng = np.random.default_rng(1234)
space = condition_space()
params = MeshingParams(
    y_in=0.0, y_out=0.0, alpha_camber=1.0, beta_in=0.5, beta_out=0.5,
    n_t=300, gamma_le=2.0, gamma_te=2.0,
)

FAIL_KS = {1, 50, 58}

cases = {}
for k in range(60):
    cond, _ = sample_condition(space, rng)
    if k in FAIL_KS:
        cases[k] = cond


def fold_report(block):
    c = block.coords
    cc = np.concatenate([c, c[:1]], axis=0)
    a, b = cc[:-1, :-1], cc[1:, :-1]
    d, e = cc[1:, 1:], cc[:-1, 1:]
    areas = 0.5 * (
        (d[..., 0] - a[..., 0]) * (e[..., 1] - b[..., 1])
        - (d[..., 1] - a[..., 1]) * (e[..., 0] - b[..., 0])
    )
    neg = np.argwhere(areas <= 0)
    if neg.size == 0:
        return "valid", None
    cols = sorted({int(i) for i, _ in neg})
    js = sorted({int(j) for _, j in neg})
    return (
        f"{neg.shape[0]} folds cols {cols[0]}..{cols[-1]} "
        f"({len(cols)} cols) j {js[0]}..{js[-1]}",
        (cols, js),
    )


for k, cond in cases.items():
    profile = build_profile(cond.bsp, n_samples=4 * params.n_t)
    boundary = build_boundary(cond, params, profile)
    spec = ClusterSpec.from_condition(cond, params)
    ring = distribute_surface_nodes(profile, spec)
    outer = outer_loop_from_boundary(boundary)

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
        hit2, feet2, seg2, frac2 = og._ray_hits(
            surf[rev], -normals[rev], outer, scale
        )
        feet[rev] = feet2
        seg_idx[rev] = seg2
        seg_frac[rev] = frac2
        hit[rev] = hit2
        if not np.all(hit):
            for i in np.flatnonzero(~hit):
                feet[i], seg_idx[i], seg_frac[i] = og._nearest_on_loop(
                    surf[i], outer
                )
    lam = outer.arclength_of(seg_idx, seg_frac)
    ordered = og._order_feet_along_loop(lam, outer)
    if ordered is not None:
        changed = ordered != lam
        lam = ordered
        for i in np.flatnonzero(changed):
            feet[i] = outer.point_at(lam[i])

    print(f"case {k}: n={lam.size}")
    w = np.linalg.norm(np.roll(surf, -1, axis=0) - surf, axis=1)
    for stage, passes in enumerate((0, 1, 2, 4, 8, 16, 32, 64)):
        if passes:
            lam_c = og._diffuse_foot_gaps(lam, w, outer.total_length, passes)
            feet_c = np.stack([outer.point_at(v) for v in lam_c])
        else:
            lam_c, feet_c = lam.copy(), feet.copy()
        line = f"  d{passes:2d}:"
        for blend in (False, True):
            try:
                blk = og._assemble_block(
                    surf, outer, spec, feet_c.copy(), lam_c.copy(),
                    scale, blend,
                )
                msg, _ = fold_report(blk)
            except MeshGenerationError as e:
                msg = f"raise {str(e)[:40]}"
            line += f"  [{'blend' if blend else 'plain'}] {msg};"
        print(line)
        if passes >= 8 and stage > 4:
            break
