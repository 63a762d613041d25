import collections

import numpy as np

from hohmesh.blade import build_profile
from hohmesh.errors import InvalidShape
from hohmesh.spaces import (
    condition_from_values,
    condition_space,
    projection_extrema,
)

space = condition_space()
rng = np.random.default_rng(7)
counts = collections.Counter()
msgs = collections.Counter()
for _ in range(2000):
    values = space.sample(rng)
    try:
        cond = condition_from_values(values)
        cond.validate()
        profile = build_profile(cond.bsp, n_samples=1024)
    except InvalidShape as exc:
        counts["invalid"] += 1
        msgs[str(exc)[:72]] += 1
        continue
    rho = 2.0 * max(cond.bsp.rho_le, cond.bsp.rho_te)
    if projection_extrema(profile, min_prominence=rho) > 2:
        counts["wavy"] += 1
    else:
        counts["ok"] += 1

print(counts)
for m, n in msgs.most_common(8):
    print(f"{n:5d}  {m}")
