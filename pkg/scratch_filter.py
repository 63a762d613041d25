import math

import numpy as np

from hohmesh.blade import BladeShapeParams, build_profile
from hohmesh.spaces import projection_extrema

CASES = {
    # strongly cambered turbine-like sections, smooth thickness
    "cambered thin": dict(
        psi=math.radians(30), theta_le=math.radians(50),
        theta_te=math.radians(-60), t=[0.04, 0.05, 0.05, 0.04, 0.03, 0.02],
        rho=0.01,
    ),
    "cambered thick round": dict(
        psi=math.radians(-20), theta_le=math.radians(-10),
        theta_te=math.radians(-55), t=[0.08, 0.10, 0.09, 0.07, 0.05, 0.03],
        rho=0.03,
    ),
    "near symmetric": dict(
        psi=0.0, theta_le=math.radians(5), theta_te=math.radians(-5),
        t=[0.03, 0.05, 0.06, 0.05, 0.03, 0.02], rho=0.005,
    ),
    "flat plate thin": dict(
        psi=math.radians(45), theta_le=math.radians(45),
        theta_te=math.radians(45), t=[0.006] * 6, rho=0.002,
    ),
    # wavy thickness: alternating weights
    "wavy": dict(
        psi=0.0, theta_le=math.radians(15), theta_te=math.radians(-15),
        t=[0.11, 0.01, 0.11, 0.01, 0.11, 0.01], rho=0.01,
    ),
    "mild ripple": dict(
        psi=0.0, theta_le=math.radians(20), theta_te=math.radians(-30),
        t=[0.05, 0.09, 0.04, 0.09, 0.04, 0.05], rho=0.01,
    ),
}

for name, c in CASES.items():
    bsp = BladeShapeParams(
        x_le=0.0, y_le=0.0, chord=1.0, psi=c["psi"],
        theta_le=c["theta_le"], theta_te=c["theta_te"],
        d_le=0.35, d_te=0.35, rho_le=c["rho"], rho_te=c["rho"],
        t_upper=np.array(c["t"]), t_lower=np.array(c["t"][::-1]),
    )
    try:
        prof = build_profile(bsp, 1024)
    except Exception as exc:
        print(f"{name:22s} build failed: {exc}")
        continue
    raw = projection_extrema(prof)
    prom = projection_extrema(prof, min_prominence=2.0 * c["rho"])
    verdict = "ACCEPT" if prom <= 2 else "reject"
    print(f"{name:22s} raw={raw:2d} prominent={prom:2d} -> {verdict}")
