"""Isolate fold mechanisms: rebalance squeeze vs pair averaging."""
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

cases = {}
for k in range(60):
    cond, _ = sample_condition(space, rng)
    if k in FAIL_KS:
        cases[k] = cond

import hohmesh.ogrid as _og
orig_pin = _og._pin_corners_and_pair


for k, cond in cases.items():
    profile = build_profile(cond.bsp, n_samples=4 * params.n_t)
    boundary = build_boundary(cond, params, profile)
    spec = ClusterSpec.from_condition(cond, params)
    ring = distribute_surface_nodes(profile, spec)
    outer = outer_loop_from_boundary(boundary)

    for mode in ("full", "no-average"):
        if mode == "no-average":
            def pin_noavg(feet, lam, outer_, scale):
                import hohmesh.ogrid as m
                saved = np.ndarray.__setitem__
                # crude: run original but undo the averaging by passing
                # pitch 0? simpler: monkeypatch the shift inside via a
                # subclassed loop is messy; instead re-implement: call
                # original, then restore feet of lower/upper from lam.
                feet2, lam2, pairs, pieces = orig_pin(feet, lam, outer_, scale)
                for name in ("lower", "upper"):
                    for i in pieces[name]:
                        feet2[i] = outer_.point_at(lam2[i])
                return feet2, lam2, pairs, pieces
            _og._pin_corners_and_pair = pin_noavg
        else:
            _og._pin_corners_and_pair = orig_pin
        try:
            block = og.extrude_to_outer(ring, outer, spec)
        except MeshGenerationError as exc:
            print(f"[{k}] {mode:10s}: raises {exc.stage}: {str(exc)[:40]}")
            continue
        areas = cell_areas(block.coords)
        neg = np.argwhere(areas <= 0.0)
        if neg.size == 0:
            print(f"[{k}] {mode:10s}: clean, min area {areas.min():.2e}")
        else:
            cols = sorted({int(i) for i, _ in neg})
            print(f"[{k}] {mode:10s}: {neg.shape[0]} folded, cols {cols[:10]}")
    _og._pin_corners_and_pair = orig_pin
