"""Zoom: outermost-cell geometry at fold columns after the pin."""
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

FAIL_KS = {50, 58}
cases = {}
for k in range(60):
    cond, _ = sample_condition(space, rng)
    if k in FAIL_KS:
        cases[k] = cond

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
    lam = outer.arclength_of(seg_idx, seg_frac)
    ordered = og._order_feet_along_loop(lam, outer)
    if ordered is not None:
        changed = ordered != lam
        lam = ordered
        for i in np.flatnonzero(changed):
            feet[i] = outer.point_at(lam[i])
    lam0 = lam.copy()

    blk = og._assemble_block(
        surf, outer, spec, feet.copy(), lam.copy(), scale, blend=True
    )
    c = blk.coords
    n, nj = c.shape[0], c.shape[1]
    print(f"case {k}: n={n} nj={nj}")
    cc = np.concatenate([c, c[:1]], axis=0)
    a, b = cc[:-1, :-1], cc[1:, :-1]
    d, e = cc[1:, 1:], cc[:-1, 1:]
    areas = 0.5 * (
        (d[..., 0] - a[..., 0]) * (e[..., 1] - b[..., 1])
        - (d[..., 1] - a[..., 1]) * (e[..., 0] - b[..., 0])
    )
    neg = np.argwhere(areas <= 0)
    bad_outer = [(int(i), int(j)) for i, j in neg if j == nj - 2]
    print(f"  outermost-cell folds: {bad_outer[:10]}")
    # show feet geometry around the first few
    feet2 = c[:, -1, :]
    lam2 = np.empty(n)
    pieces = blk.pieces
    counted = {kk: len(vv) for kk, vv in pieces.items()}
    print(f"  pieces {counted}")
    for i, j in bad_outer[:6]:
        i1 = (i + 1) % n
        print(
            f"  col {i}: foot {np.round(feet2[i], 4)} "
            f"next {np.round(feet2[i1], 4)} "
            f"row{nj-2} {np.round(c[i, -2], 4)} "
            f"next {np.round(c[i1, -2], 4)}"
        )
    # which piece do fold cols belong to
    member = {}
    for name, ids in pieces.items():
        for ii in ids:
            member[int(ii)] = name
    cols = sorted({int(i) for i, _ in neg})
    names = [member.get(i, "?") for i in cols]
    from collections import Counter
    print(f"  fold col pieces: {Counter(names)}")
    # mid-j folds: pick one column and print its path vs neighbor
    mid = [(int(i), int(j)) for i, j in neg if j < nj - 2]
    if mid:
        i, j = mid[len(mid) // 2]
        i1 = (i + 1) % n
        print(f"  mid fold at col {i} j {j}:")
        for jj in (j - 1, j, j + 1):
            print(
                f"    j{jj}: {np.round(c[i, jj], 4)} | {np.round(c[i1, jj], 4)}"
            )
