import time

import numpy as np

from hohmesh.elliptic import SmootherSettings
from hohmesh.errors import MeshGenerationError
from hohmesh.passage import MeshingParams
from hohmesh.pipeline import generate_mesh
from hohmesh.spaces import (
    condition_space,
    decision_space,
    meshing_params_from_values,
    sample_condition,
)

cond_space = condition_space()
dec_space = decision_space()
rng = np.random.default_rng(20260816)
settings = SmootherSettings(max_sweeps=300)


def safe_params(chord):
    return MeshingParams(
        y_in=0.0, y_out=0.0, alpha_camber=1.0, beta_in=0.5, beta_out=0.5,
        n_t=300, gamma_le=2.0, gamma_te=2.0,
    )


def run(cond, params, tag):
    t0 = time.time()
    try:
        res = generate_mesh(cond, params, settings)
    except MeshGenerationError as exc:
        print(f"  {tag}: FAIL stage={exc.stage}: {str(exc)[:60]}")
        return False
    dt = time.time() - t0
    print(
        f"  {tag}: q={res.report.q:.4f} folded={res.report.folded} "
        f"sweeps={res.smoother_sweeps} {dt:4.1f}s"
    )
    return True


# 1. build rate of fully random (condition, decision) pairs
attempts, builds = 0, 0
pairs = []
while builds < 6 and attempts < 400:
    cond, _ = sample_condition(cond_space, rng)
    params = meshing_params_from_values(dec_space.sample(rng), cond.bsp.chord)
    attempts += 1
    try:
        res = generate_mesh(cond, params, SmootherSettings(max_sweeps=0))
    except MeshGenerationError:
        continue
    builds += 1
    pairs.append((cond, params))
print(f"random pairs: {builds}/{attempts} built " f"({100*builds/attempts:.0f}%)")

# 2. smoother stability on the pairs that build
for i, (cond, params) in enumerate(pairs):
    run(cond, params, f"pair {i} n_o={cond.n_o} n_t={params.n_t}")

# 3. random conditions with a safe default decision
print("\nsafe decision on random conditions:")
ok = 0
for i in range(8):
    cond, _ = sample_condition(cond_space, rng)
    ok += run(cond, safe_params(cond.bsp.chord), f"cond {i} n_o={cond.n_o}")
print(f"safe-decision build rate: {ok}/8")
