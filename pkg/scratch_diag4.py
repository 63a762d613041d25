"""Where in (i, j) do the remaining folds live, and why."""
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

real_order = og._order_feet_along_loop
cap = {}


def spy_order(lam, outer):
    out = real_order(lam, outer)
    if out is None:
        cap["reordered"] = np.array([], int)
    else:
        cap["reordered"] = np.flatnonzero(out != lam)
    return out


og._order_feet_along_loop = spy_order
og.min_cell_area = lambda b: 1.0


def cell_areas(coords):
    c = np.concatenate([coords, coords[:1]], axis=0)
    a, b = c[:-1, :-1], c[1:, :-1]
    cc, d = c[1:, 1:], c[:-1, 1:]
    return 0.5 * (
        (cc[..., 0] - a[..., 0]) * (d[..., 1] - b[..., 1])
        - (cc[..., 1] - a[..., 1]) * (d[..., 0] - b[..., 0])
    )


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
        print(f"[{k:2d}] {exc.stage}: {str(exc)[:50]}")
        continue

    areas = cell_areas(block.coords)
    neg = np.argwhere(areas <= 0.0)
    reord = set(cap.get("reordered", np.array([], int)).tolist())
    if neg.size == 0:
        print(f"[{k:2d}] ok (untangle moved {len(reord)})")
        continue

    ni, nj = block.coords.shape[:2]
    cols = sorted({int(i) for i, _ in neg})
    js = sorted({int(j) for _, j in neg})
    in_reord = len({c for c in cols if c in reord or (c + 1) % ni in reord})
    print(
        f"[{k:2d}] FOLDED {neg.shape[0]} cells  cols n={len(cols)} "
        f"(reordered-adjacent {in_reord}/{len(cols)})  j range "
        f"{js[0]}..{js[-1]} of {nj - 1}  untangle moved {len(reord)}"
    )
    if k in (4, 7):
        # look at a couple of folded columns in detail
        for c in cols[:3]:
            jj = sorted(int(j) for i, j in neg if i == c)
            s0 = block.coords[c, 0]
            s1 = block.coords[(c + 1) % ni, 0]
            f0 = block.coords[c, -1]
            f1 = block.coords[(c + 1) % ni, -1]
            t = "R" if c in reord else " "
            t1 = "R" if (c + 1) % ni in reord else " "
            print(
                f"     col {c}{t}{t1}: j {jj[:5]}  surf d="
                f"{np.linalg.norm(s1 - s0):.2e}  feet d="
                f"{np.linalg.norm(f1 - f0):.2e}"
            )
            print(f"        s0=({s0[0]:+.4f},{s0[1]:+.4f}) f0=({f0[0]:+.4f},{f0[1]:+.4f})")
            print(f"        s1=({s1[0]:+.4f},{s1[1]:+.4f}) f1=({f1[0]:+.4f},{f1[1]:+.4f})")
