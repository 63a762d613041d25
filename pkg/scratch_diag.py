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


def cell_areas(coords, wrap):
    c = coords
    if wrap:
        c = np.concatenate([c, c[:1]], axis=0)
    a, b = c[:-1, :-1], c[1:, :-1]
    cc, d = c[1:, 1:], c[:-1, 1:]
    return 0.5 * (
        (cc[..., 0] - a[..., 0]) * (d[..., 1] - b[..., 1])
        - (cc[..., 1] - a[..., 1]) * (d[..., 0] - b[..., 0])
    )


real_min_area = og.min_cell_area
captured = []


def spy(block):
    captured.append(block)
    return 1.0  # force acceptance so we can inspect


for k in range(40):
    cond, _ = sample_condition(space, rng)
    captured.clear()
    try:
        profile = build_profile(cond.bsp, n_samples=4 * params.n_t)
        boundary = build_boundary(cond, params, profile)
        spec = ClusterSpec.from_condition(cond, params)
        ring = distribute_surface_nodes(profile, spec)
        outer = outer_loop_from_boundary(boundary)
    except MeshGenerationError as exc:
        print(f"[{k:2d}] {exc.stage}: {str(exc)[:58]}")
        continue
    og.min_cell_area = spy
    try:
        block = og.extrude_to_outer(ring, outer, spec)
    except MeshGenerationError as exc:
        print(f"[{k:2d}] omesh: {str(exc)[:64]}")
        continue
    finally:
        og.min_cell_area = real_min_area

    areas = cell_areas(block.coords, block.wrap)
    neg = np.argwhere(areas <= 0.0)
    if neg.size == 0:
        print(f"[{k:2d}] ok n_o={cond.n_o}")
        continue

    ni, nj = block.coords.shape[:2]
    pieces = block.pieces
    runs = {
        name: set(np.asarray(idx).tolist()) for name, idx in pieces.items()
    }
    print(
        f"[{k:2d}] FOLDED {neg.shape[0]} cells  ni={ni} nj={nj} "
        f"psi={np.degrees(cond.bsp.psi):.0f} "
        f"th={np.degrees(cond.bsp.theta_le):.0f}/"
        f"{np.degrees(cond.bsp.theta_te):.0f} pitch/C={cond.pitch/cond.bsp.chord:.2f}"
    )
    js = neg[:, 1]
    print(
        f"     j range {js.min()}..{js.max()} (nj-2={nj-2}); "
        f"at outer: {int(np.sum(js == nj - 2))}, at wall: {int(np.sum(js == 0))}"
    )
    outer_is = sorted({int(i) for i, j in neg if j == nj - 2})
    labels = []
    for i in outer_is[:12]:
        lab = [n for n, s in runs.items() if i in s or (i + 1) % ni in s]
        labels.append(f"{i}:{'/'.join(lab) or 'mid-run'}")
    print(f"     outer-row fold columns: {labels}")
    if k > 25 and len(labels) > 0:
        break
