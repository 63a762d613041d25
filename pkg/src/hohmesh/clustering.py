"""One-dimensional node clustering maps.

Two maps are provided. ``tanh_cluster`` produces a two-sided distribution
on [0, 1] with independently controlled end concentrations, used to place
nodes along the blade surface. ``wall_cluster`` produces a one-sided
distribution on [0, L] whose first interval matches a prescribed wall
spacing, used to place nodes along each extrusion ray.
"""

from __future__ import annotations

import math

import numpy as np
from numpy.typing import NDArray

from ._validation import check_finite, check_positive
from .errors import InfeasibleClustering

__all__ = ["tanh_cluster", "wall_cluster", "wall_cluster_many"]


def tanh_cluster(n: int, gamma_a: float, gamma_b: float) -> NDArray[np.float64]:
    """Two-sided tanh node distribution on [0, 1].

    Node positions are the normalized cumulative integral (trapezoid rule
    on the ``n`` uniform abscissae) of the density

        w(u) = sech^2(gamma(u) * (2u - 1)),
        gamma(u) = gamma_a * (1 - u) + gamma_b * u,

    so larger ``gamma_a`` concentrates nodes near 0 and larger ``gamma_b``
    near 1. For gamma_a == gamma_b == g the density integrates to the
    classic map t(u) = (1 + tanh(g (2u - 1)) / tanh(g)) / 2, and
    gamma -> 0 recovers the uniform distribution exactly.

    Parameters
    ----------
    n : int
        Number of nodes, at least 2.
    gamma_a, gamma_b : float
        Non-negative concentration strengths at t = 0 and t = 1.

    Returns
    -------
    ndarray of shape (n,)
        Strictly increasing values with t[0] == 0.0 and t[-1] == 1.0.
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    check_finite("gamma_a", gamma_a)
    check_finite("gamma_b", gamma_b)
    if gamma_a < 0 or gamma_b < 0:
        raise ValueError("concentration strengths must be >= 0")

    u = np.linspace(0.0, 1.0, n)
    gamma = gamma_a * (1.0 - u) + gamma_b * u
    w = 1.0 / np.cosh(gamma * (2.0 * u - 1.0)) ** 2
    t = np.empty(n)
    t[0] = 0.0
    np.cumsum(0.5 * (w[1:] + w[:-1]) * np.diff(u), out=t[1:])
    t /= t[-1]
    t[0] = 0.0
    t[-1] = 1.0
    return t


def _first_ratio(delta: float, u1: float) -> float:
    """First interval of the one-sided map as a fraction of the length."""
    return 1.0 + math.tanh(delta * (u1 - 1.0)) / math.tanh(delta)


def _solve_delta(ratio: float, n: int) -> float | None:
    """Stretching parameter with first interval ratio*length; None = uniform.

    The first-interval fraction decreases monotonically from 1/(n-1)
    (uniform) as delta grows, so plain bisection applies.
    """
    u1 = 1.0 / (n - 1)
    lo, hi = 1e-12, 1.0
    while _first_ratio(hi, u1) > ratio and hi < 1e4:
        hi *= 2.0
    if _first_ratio(hi, u1) > ratio:
        raise InfeasibleClustering(
            f"no stretching parameter reaches first-interval fraction {ratio!r}"
        )
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _first_ratio(mid, u1) > ratio:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-14 * hi:
            break
    delta = 0.5 * (lo + hi)
    if abs(_first_ratio(delta, u1) - ratio) > 1e-10:
        if abs(ratio - u1) <= 1e-10:
            return None
        raise InfeasibleClustering(
            f"bisection failed to match first-interval fraction {ratio!r}"
        )
    return delta


def wall_cluster(n: int, length: float, dn1: float) -> NDArray[np.float64]:
    """One-sided tanh distribution on [0, length] with first spacing dn1.

    Uses the map t(u) = 1 + tanh(delta (u - 1)) / tanh(delta) scaled to
    the interval, with ``delta`` solved by bisection so the first interval
    equals ``dn1`` to within 1e-10 * length. Spacings are non-decreasing
    away from the wall; dn1 == length/(n-1) degenerates to the uniform
    distribution.

    Parameters
    ----------
    n : int
        Number of nodes, at least 2.
    length : float
        Total extent, > 0.
    dn1 : float
        Required first interval, 0 < dn1 <= length / (n - 1).

    Returns
    -------
    ndarray of shape (n,)
        Strictly increasing values with t[0] == 0.0 and t[-1] == length.

    Raises
    ------
    InfeasibleClustering
        If dn1 exceeds the uniform spacing length / (n - 1).
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    check_positive("length", length)
    check_positive("dn1", dn1)
    uniform = length / (n - 1)
    if dn1 > uniform:
        raise InfeasibleClustering(
            f"first spacing {dn1!r} exceeds uniform spacing {uniform!r} "
            f"for n={n}, length={length!r}"
        )
    delta = _solve_delta(dn1 / length, n)
    u = np.linspace(0.0, 1.0, n)
    if delta is None:
        t = length * u
    else:
        t = length * (1.0 + np.tanh(delta * (u - 1.0)) / np.tanh(delta))
    t[0] = 0.0
    t[-1] = length
    return t


def wall_cluster_many(
    n: int, lengths: NDArray[np.float64], dn1: float
) -> NDArray[np.float64]:
    """wall_cluster for a batch of ray lengths; returns shape (m, n).

    Identical node law per ray; the stretching parameter is solved per
    ray since it depends on dn1 / length.
    """
    lengths = np.asarray(lengths, dtype=float)
    if lengths.ndim != 1:
        raise ValueError("lengths must be one-dimensional")
    uniform = lengths / (n - 1)
    bad = dn1 > uniform
    if np.any(bad):
        i = int(np.argmax(bad))
        raise InfeasibleClustering(
            f"first spacing {dn1!r} exceeds uniform spacing {uniform[i]!r} "
            f"on ray {i} (length {lengths[i]!r}, n={n})"
        )
    u = np.linspace(0.0, 1.0, n)
    out = np.empty((lengths.size, n))
    for i, length in enumerate(lengths):
        delta = _solve_delta(dn1 / float(length), n)
        if delta is None:
            out[i] = length * u
        else:
            out[i] = length * (1.0 + np.tanh(delta * (u - 1.0)) / np.tanh(delta))
        out[i, 0] = 0.0
        out[i, -1] = length
    return out
