"""Passage domain: periodic channel boundaries around one blade."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from ._validation import check_finite, check_int_range, check_positive, check_range
from .blade import BladeProfile, BladeShapeParams, SampledCurve
from .errors import BoundaryIntersectsBlade, ConfigError
from ._kv import parse_kv_file
from . import blade as _blade

__all__ = [
    "MeshingParams",
    "PassageCondition",
    "PassageBoundary",
    "scaled_camber",
    "build_boundary",
    "read_condition_config",
]

DEGENERATE_CAMBER_TOL = 1e-9


@dataclass
class MeshingParams:
    """Meshing decision variables for one passage."""

    y_in: float
    y_out: float
    alpha_camber: float
    beta_in: float
    beta_out: float
    n_t: int
    gamma_le: float
    gamma_te: float

    def validate(self) -> None:
        check_finite("y_in", self.y_in)
        check_finite("y_out", self.y_out)
        check_range("alpha_camber", self.alpha_camber, 0.0, 1.0)
        check_range("beta_in", self.beta_in, 0.0, 1.0)
        check_range("beta_out", self.beta_out, 0.0, 1.0)
        check_int_range("n_t", self.n_t, 8, 10**6)
        check_finite("gamma_le", self.gamma_le)
        check_finite("gamma_te", self.gamma_te)
        if self.gamma_le < 0 or self.gamma_te < 0:
            raise ValueError("clustering strengths must be >= 0")


@dataclass
class PassageCondition:
    """Given quantities of one meshing task: blade plus passage layout."""

    bsp: BladeShapeParams
    pitch: float
    x_in: float
    x_out: float
    n_o: int
    dn1: float

    def validate(self) -> None:
        self.bsp.validate()
        check_positive("pitch", self.pitch)
        check_finite("x_in", self.x_in)
        check_finite("x_out", self.x_out)
        if self.x_in < 0 or self.x_out < 0:
            raise ValueError("duct extents must be >= 0")
        check_int_range("n_o", self.n_o, 16, 10**9)
        check_positive("dn1", self.dn1)


@dataclass
class PassageBoundary:
    """Sampled periodic channel walls and the H/O interface stations."""

    lower: SampledCurve
    upper: SampledCurve
    x_if_in: float
    x_if_out: float
    pitch: float
    x_start: float
    x_end: float
    x_le: float
    x_te: float
    level_in: float
    level_out: float

    def y_lower(self, x) -> NDArray[np.float64]:
        return np.interp(x, self.lower.points[:, 0], self.lower.points[:, 1])

    def y_upper(self, x) -> NDArray[np.float64]:
        return np.interp(x, self.upper.points[:, 0], self.upper.points[:, 1])


def scaled_camber(
    camber: SampledCurve, pitch: float, y_in: float, y_out: float
) -> SampledCurve:
    """Rescale the camber so its ends hit the duct levels, shift by -pitch/2.

    The affine-in-y rescaling maps y_le -> y_le + y_in and y_te ->
    y_te + y_out. When the camber ends are level (the scaling would be
    singular) the offset is blended linearly in x instead.
    """
    x = camber.points[:, 0]
    y = camber.points[:, 1]
    x_le, x_te = x[0], x[-1]
    y_le, y_te = y[0], y[-1]
    chord_scale = float(np.hypot(x_te - x_le, y_te - y_le))
    if abs(y_le - y_te) < DEGENERATE_CAMBER_TOL * max(chord_scale, 1e-300):
        frac = (x - x_le) / (x_te - x_le)
        yc = y + (y_in + (y_out - y_in) * frac) - 0.5 * pitch
    else:
        slope = (y_le + y_in - y_te - y_out) / (y_le - y_te)
        intercept = (y_le * y_out - y_te * y_in) / (y_le - y_te)
        yc = slope * y + intercept - 0.5 * pitch
    return SampledCurve.from_points(np.stack([x, yc], axis=1))


def _largest_remainder(budget: int, weights: NDArray[np.float64]) -> NDArray[np.int_]:
    """Integer allocation proportional to weights; zero weight gets zero."""
    weights = np.asarray(weights, dtype=float)
    active = weights > 0
    counts = np.zeros(weights.size, dtype=int)
    if not np.any(active) or budget <= 0:
        return counts
    share = budget * weights[active] / weights[active].sum()
    base = np.floor(share).astype(int)
    rem = share - base
    left = budget - int(base.sum())
    if left > 0:
        take = np.argsort(-rem, kind="stable")[:left]
        base[take] += 1
    # every active segment needs at least one cell
    while np.any(base == 0):
        poor = int(np.argmin(base))
        rich = int(np.argmax(base))
        if base[rich] <= 1:
            break
        base[poor] += 1
        base[rich] -= 1
    counts[active] = base
    return counts


def build_boundary(
    cond: PassageCondition, params: MeshingParams, profile: BladeProfile
) -> PassageBoundary:
    """Sample the lower/upper periodic walls and place the interfaces.

    The lower wall is flat at level y_le + y_in - pitch/2 upstream of the
    blade, flat at y_te + y_out - pitch/2 downstream, and a convex blend
    of the rescaled camber and the straight connector across the blade.
    The upper wall is the lower wall shifted by +pitch. 4 * n_t cells are
    distributed over the three segments proportional to their widths,
    uniform in x inside each.
    """
    cond.validate()
    params.validate()
    camber = profile.camber
    x = camber.points[:, 0]
    x_le, x_te = float(x[0]), float(x[-1])
    y_le, y_te = float(camber.points[0, 1]), float(camber.points[-1, 1])
    pitch = cond.pitch

    level_in = y_le + params.y_in - 0.5 * pitch
    level_out = y_te + params.y_out - 0.5 * pitch
    x_start = x_le - cond.x_in
    x_end = x_te + cond.x_out

    widths = np.array([cond.x_in, x_te - x_le, cond.x_out])
    cells = _largest_remainder(4 * params.n_t, widths)
    if cells[1] < 2:
        cells[1] = 2

    yc_curve = scaled_camber(camber, pitch, params.y_in, params.y_out)

    xs_parts: list[NDArray[np.float64]] = []
    ys_parts: list[NDArray[np.float64]] = []
    if cells[0] > 0:
        xs = np.linspace(x_start, x_le, cells[0] + 1)
        xs_parts.append(xs[:-1])
        ys_parts.append(np.full(cells[0], level_in))
    xs_mid = np.linspace(x_le, x_te, cells[1] + 1)
    y_line = level_in + (level_out - level_in) * (xs_mid - x_le) / (x_te - x_le)
    y_cam = np.interp(xs_mid, yc_curve.points[:, 0], yc_curve.points[:, 1])
    ys_mid = params.alpha_camber * y_cam + (1.0 - params.alpha_camber) * y_line
    # the blend equals the duct levels at both ends by construction; pin
    # them exactly so the flat segments join without rounding residue
    ys_mid[0] = level_in
    ys_mid[-1] = level_out
    if cells[2] > 0:
        xs_parts.append(xs_mid[:-1])
        ys_parts.append(ys_mid[:-1])
        xs = np.linspace(x_te, x_end, cells[2] + 1)
        xs_parts.append(xs)
        ys_parts.append(np.full(cells[2] + 1, level_out))
    else:
        xs_parts.append(xs_mid)
        ys_parts.append(ys_mid)

    xs_all = np.concatenate(xs_parts)
    ys_all = np.concatenate(ys_parts)
    lower = SampledCurve.from_points(np.stack([xs_all, ys_all], axis=1))
    upper = SampledCurve.from_points(
        np.stack([xs_all, ys_all + pitch], axis=1)
    )

    x_if_in = x_le - params.beta_in * cond.x_in
    x_if_out = x_te + params.beta_out * cond.x_out

    surf = profile.surface.points
    y_low_at = np.interp(surf[:, 0], xs_all, ys_all)
    y_up_at = y_low_at + pitch
    if np.any(surf[:, 1] <= y_low_at) or np.any(surf[:, 1] >= y_up_at):
        raise BoundaryIntersectsBlade(
            "channel wall crosses the blade surface; widen the passage "
            "or reduce the wall offsets"
        )

    return PassageBoundary(
        lower=lower,
        upper=upper,
        x_if_in=x_if_in,
        x_if_out=x_if_out,
        pitch=pitch,
        x_start=x_start,
        x_end=x_end,
        x_le=x_le,
        x_te=x_te,
        level_in=level_in,
        level_out=level_out,
    )


_PASSAGE_KEYS = ("pitch", "x_in", "x_out", "n_o", "dn1")


def read_condition_config(path: str) -> PassageCondition:
    """Read blade + passage keys from one config file."""
    params, extra = _blade.read_blade_config(path)
    missing = [k for k in _PASSAGE_KEYS if k not in extra]
    if missing:
        raise ConfigError(path, f"missing passage keys: {', '.join(missing)}")
    unknown = sorted(set(extra) - set(_PASSAGE_KEYS))
    if unknown:
        raise ConfigError(path, f"unknown keys: {', '.join(unknown)}")
    cond = PassageCondition(
        bsp=params,
        pitch=extra["pitch"],
        x_in=extra["x_in"],
        x_out=extra["x_out"],
        n_o=int(round(extra["n_o"])),
        dn1=extra["dn1"],
    )
    try:
        cond.validate()
    except (ValueError, TypeError) as exc:
        raise ConfigError(path, str(exc)) from None
    return cond
