"""Does the gap-diffusion ladder rescue the folded cases, and at what dose."""
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

real_diffuse = og._diffuse_foot_gaps
used = {}


def spy_diffuse(lam, w, total, passes):
    used["passes"] = passes
    return real_diffuse(lam, w, total, passes)


og._diffuse_foot_gaps = spy_diffuse

import time

n_ok = 0
n_fail = 0
t0 = time.time()
for k in range(60):
    cond, _ = sample_condition(space, rng)
    used.clear()
    try:
        profile = build_profile(cond.bsp, n_samples=4 * params.n_t)
        boundary = build_boundary(cond, params, profile)
        spec = ClusterSpec.from_condition(cond, params)
        ring = distribute_surface_nodes(profile, spec)
        outer = outer_loop_from_boundary(boundary)
        block = og.extrude_to_outer(ring, outer, spec)
    except MeshGenerationError as exc:
        n_fail += 1
        print(f"[{k:2d}] {exc.stage}: {str(exc)[:50]}  (dose tried: {used.get('passes', '-')})")
        continue
    n_ok += 1
    area = og.min_cell_area(block)
    dose = used.get("passes", 0)
    tag = f"dose={dose}" if dose else "rays clean enough"
    print(f"[{k:2d}] ok  min area {area:.3e}  ({tag})")

print(f"\nbuild {n_ok}/{n_ok + n_fail}, {time.time() - t0:.1f}s total")
