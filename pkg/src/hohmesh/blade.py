"""Blade geometry: camber, thickness and the closed surface loop.

The blade is described by a cubic Bezier camber line, two degree-5
Bernstein thickness laws applied normal to the camber (one per side), and
round nose/tail caps that close the loop onto the exact camber endpoints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from ._kv import format_kv, parse_kv_file
from ._validation import check_finite, check_positive, check_shape
from .errors import ConfigError, InvalidShape

__all__ = [
    "BladeShapeParams",
    "SampledCurve",
    "BladeProfile",
    "build_camber",
    "build_profile",
    "read_blade_config",
    "write_blade_config",
    "write_profile_csv",
]

# Fraction of camber arclength replaced by the round cap at each end.
CAP_FRACTION = 0.02

_BERNSTEIN5 = np.array([1.0, 5.0, 10.0, 10.0, 5.0, 1.0])


@dataclass
class BladeShapeParams:
    """Shape parameters of one blade. Angles in radians, lengths absolute."""

    x_le: float
    y_le: float
    chord: float
    psi: float
    theta_le: float
    theta_te: float
    d_le: float
    d_te: float
    rho_le: float
    rho_te: float
    t_upper: NDArray[np.float64] = field(
        default_factory=lambda: np.zeros(6)
    )
    t_lower: NDArray[np.float64] = field(
        default_factory=lambda: np.zeros(6)
    )

    def __post_init__(self):
        self.t_upper = np.asarray(self.t_upper, dtype=float)
        self.t_lower = np.asarray(self.t_lower, dtype=float)

    def validate(self) -> None:
        for name in ("x_le", "y_le", "psi", "theta_le", "theta_te"):
            check_finite(name, getattr(self, name))
        check_positive("chord", self.chord)
        check_positive("rho_le", self.rho_le)
        check_positive("rho_te", self.rho_te)
        for name in ("d_le", "d_te"):
            value = getattr(self, name)
            check_finite(name, value)
            if not (0.0 < value < 1.0):
                raise ValueError(f"{name} must lie strictly in (0, 1), got {value!r}")
        for name in ("t_upper", "t_lower"):
            arr = check_shape(name, getattr(self, name), (6,))
            if np.any(arr < 0):
                raise ValueError(f"{name} coefficients must be >= 0")

    def control_points(self) -> NDArray[np.float64]:
        """Bezier control points P0..P3 of the camber line."""
        p0 = np.array([self.x_le, self.y_le])
        p3 = p0 + self.chord * np.array([math.cos(self.psi), math.sin(self.psi)])
        p1 = p0 + self.d_le * self.chord * np.array(
            [math.cos(self.theta_le), math.sin(self.theta_le)]
        )
        p2 = p3 - self.d_te * self.chord * np.array(
            [math.cos(self.theta_te), math.sin(self.theta_te)]
        )
        return np.stack([p0, p1, p2, p3])


@dataclass
class SampledCurve:
    """Polyline with cached cumulative arclength."""

    points: NDArray[np.float64]
    cumulative_arclength: NDArray[np.float64]

    @classmethod
    def from_points(cls, points: NDArray[np.float64]) -> "SampledCurve":
        points = check_shape("points", points, (None, 2))
        seg = np.linalg.norm(np.diff(points, axis=0), axis=1)
        cum = np.concatenate(([0.0], np.cumsum(seg)))
        return cls(points=points, cumulative_arclength=cum)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def length(self) -> float:
        return float(self.cumulative_arclength[-1])

    def point_at_arclength(self, s) -> NDArray[np.float64]:
        s = np.asarray(s, dtype=float)
        x = np.interp(s, self.cumulative_arclength, self.points[:, 0])
        y = np.interp(s, self.cumulative_arclength, self.points[:, 1])
        return np.stack(np.broadcast_arrays(x, y), axis=-1)

    def interp_y(self, x) -> NDArray[np.float64]:
        """Evaluate the curve as y(x). Requires monotone increasing x."""
        xs = self.points[:, 0]
        if np.any(np.diff(xs) <= 0):
            raise InvalidShape("curve is not single-valued in x")
        return np.interp(x, xs, self.points[:, 1])


@dataclass
class BladeProfile:
    """Closed surface loop (counterclockwise, seam at the trailing edge)."""

    surface: SampledCurve
    le_index: int
    te_index: int
    camber: SampledCurve

    @property
    def loop_length(self) -> float:
        closing = np.linalg.norm(self.surface.points[0] - self.surface.points[-1])
        return self.surface.length + float(closing)


def _bezier_eval(cp: NDArray[np.float64], u: NDArray[np.float64]):
    """Cubic Bezier position and derivative at parameters u."""
    u = u[:, None]
    w = 1.0 - u
    pos = (
        w**3 * cp[0]
        + 3.0 * w**2 * u * cp[1]
        + 3.0 * w * u**2 * cp[2]
        + u**3 * cp[3]
    )
    der = 3.0 * (
        w**2 * (cp[1] - cp[0])
        + 2.0 * w * u * (cp[2] - cp[1])
        + u**2 * (cp[3] - cp[2])
    )
    return pos, der


def build_camber(params: BladeShapeParams, n_samples: int = 512) -> SampledCurve:
    """Sample the camber line at n_samples uniform Bezier parameters.

    Raises InvalidShape if the sampled camber reverses x-monotonicity
    beyond 1e-9 * chord (the passage construction needs y(x) single
    valued) or degenerates to coincident samples.
    """
    params.validate()
    if n_samples < 16:
        raise ValueError(f"n_samples must be >= 16, got {n_samples}")
    cp = params.control_points()
    u = np.linspace(0.0, 1.0, n_samples)
    pos, _ = _bezier_eval(cp, u)
    tol = 1e-9 * params.chord
    dx = np.diff(pos[:, 0])
    if np.any(dx < -tol):
        raise InvalidShape("camber reverses x-monotonicity")
    if np.any(dx <= tol):
        raise InvalidShape("camber is nearly vertical; not single-valued in x")
    curve = SampledCurve.from_points(pos)
    if np.any(np.diff(curve.cumulative_arclength) <= 0.0):
        raise InvalidShape("camber samples coincide")
    return curve


def _bernstein5(coefs: NDArray[np.float64], u: NDArray[np.float64]):
    u = u[:, None]
    k = np.arange(6)
    basis = _BERNSTEIN5 * u**k * (1.0 - u) ** (5 - k)
    return basis @ coefs


def _cap_weight(r: NDArray[np.float64]) -> NDArray[np.float64]:
    # smoothstep complement: 1 at the tip, 0 with zero slope at the cut
    return 1.0 - (3.0 * r**2 - 2.0 * r**3)


def _half_thickness(
    s_norm: NDArray[np.float64],
    coefs: NDArray[np.float64],
    rho_le: float,
    rho_te: float,
    camber_length: float,
) -> NDArray[np.float64]:
    """Side thickness law with round caps over the end CAP_FRACTIONs.

    Inside a cap the thickness is cross-faded into sqrt(2 rho s), the
    osculating circle of radius rho at the tip, which pulls the surface
    onto the exact camber endpoint and keeps the junction tangential.
    """
    h = _bernstein5(coefs, s_norm)
    cut = CAP_FRACTION
    le = s_norm < cut
    if np.any(le):
        r = s_norm[le] / cut
        circ = np.sqrt(2.0 * rho_le * s_norm[le] * camber_length)
        w = _cap_weight(r)
        h[le] = w * circ + (1.0 - w) * h[le]
    te = s_norm > 1.0 - cut
    if np.any(te):
        r = (1.0 - s_norm[te]) / cut
        circ = np.sqrt(2.0 * rho_te * (1.0 - s_norm[te]) * camber_length)
        w = _cap_weight(r)
        h[te] = w * circ + (1.0 - w) * h[te]
    return h


def _segment_pairs_intersect(points: NDArray[np.float64], tol: float) -> bool:
    """True if any two non-adjacent edges of the closed loop intersect.

    Plane sweep over x-sorted edges; candidate pairs are tested with the
    standard straddle predicate, using tol as the collinearity epsilon.
    """
    n = points.shape[0]
    a = points
    b = np.roll(points, -1, axis=0)
    xmin = np.minimum(a[:, 0], b[:, 0]) - tol
    xmax = np.maximum(a[:, 0], b[:, 0]) + tol
    order = np.argsort(xmin, kind="stable")
    xmin_s = xmin[order]
    xmax_s = xmax[order]

    # window end for each sorted edge: edges whose xmin is inside [xmin, xmax]
    ends = np.searchsorted(xmin_s, xmax_s, side="right")
    starts = np.arange(n) + 1
    counts = np.maximum(ends - starts, 0)
    total = int(counts.sum())
    if total == 0:
        return False
    first = np.repeat(starts, counts)
    offset = np.arange(total) - np.repeat(
        np.concatenate(([0], np.cumsum(counts)[:-1])), counts
    )
    ii = order[np.repeat(np.arange(n), counts)]
    jj = order[first + offset]

    adjacent = ((ii + 1) % n == jj) | ((jj + 1) % n == ii)
    ii, jj = ii[~adjacent], jj[~adjacent]
    if ii.size == 0:
        return False

    def cross(p, q):
        return p[:, 0] * q[:, 1] - p[:, 1] * q[:, 0]

    chunk = 1_000_000
    for lo in range(0, ii.size, chunk):
        si = ii[lo : lo + chunk]
        sj = jj[lo : lo + chunk]
        a1, a2 = a[si], b[si]
        b1, b2 = a[sj], b[sj]

        d1 = cross(a2 - a1, b1 - a1)
        d2 = cross(a2 - a1, b2 - a1)
        d3 = cross(b2 - b1, a1 - b1)
        d4 = cross(b2 - b1, a2 - b1)

        # exact sign straddle on both edges marks a crossing; crosses that
        # vanish within tolerance (collinear overlap, e.g. a zero-thickness
        # slit) never straddle and are tolerated by design
        len_a = np.linalg.norm(a2 - a1, axis=1)
        len_b = np.linalg.norm(b2 - b1, axis=1)
        eps_a = tol * np.maximum(len_a, tol)
        eps_b = tol * np.maximum(len_b, tol)
        snap = lambda d, e: np.where(np.abs(d) <= e, 0.0, d)
        d1, d2 = snap(d1, eps_a), snap(d2, eps_a)
        d3, d4 = snap(d3, eps_b), snap(d4, eps_b)

        straddle = (d1 * d2 < 0) & (d3 * d4 < 0)
        if np.any(straddle):
            return True
    return False


def build_profile(params: BladeShapeParams, n_samples: int = 1024) -> BladeProfile:
    """Build the closed blade surface loop.

    The loop runs counterclockwise starting at the trailing edge: along
    the upper side to the leading edge, then back along the lower side.
    Point count is 2 * (n_samples // 2); le_index and te_index address
    the exact camber endpoints.

    Raises InvalidShape if the loop self-intersects (segment sweep with
    tolerance 1e-12 * chord) or the camber itself is invalid.
    """
    params.validate()
    if n_samples < 64:
        raise ValueError(f"n_samples must be >= 64, got {n_samples}")
    m = n_samples // 2 + 1

    fine = max(4 * n_samples, 2048)
    cp = params.control_points()
    camber = build_camber(params, fine)
    length = camber.length

    # cosine spacing in arclength fraction concentrates samples at the caps
    v = np.linspace(0.0, 1.0, m)
    s_norm = 0.5 * (1.0 - np.cos(np.pi * v))
    s_norm[0] = 0.0
    s_norm[-1] = 1.0

    # invert arclength -> Bezier parameter on the fine sampling
    u_fine = np.linspace(0.0, 1.0, fine)
    u = np.interp(s_norm * length, camber.cumulative_arclength, u_fine)
    pos, der = _bezier_eval(cp, u)
    tang = der / np.linalg.norm(der, axis=1, keepdims=True)
    normal = np.stack([-tang[:, 1], tang[:, 0]], axis=1)

    h_up = _half_thickness(s_norm, params.t_upper, params.rho_le, params.rho_te, length)
    h_lo = _half_thickness(s_norm, params.t_lower, params.rho_le, params.rho_te, length)

    upper = pos + h_up[:, None] * normal
    lower = pos - h_lo[:, None] * normal
    # caps close onto the exact camber endpoints
    upper[0] = lower[0] = camber.points[0]
    upper[-1] = lower[-1] = camber.points[-1]

    loop = np.concatenate([upper[::-1], lower[1:-1]])
    tol_dup = 1e-14 * params.chord
    seg = np.linalg.norm(np.diff(loop, axis=0), axis=1)
    keep = np.concatenate(([True], seg > tol_dup))
    if not keep[m - 1]:
        raise InvalidShape("leading-edge cap collapsed onto its neighbor")
    loop = loop[keep]
    if np.linalg.norm(loop[-1] - loop[0]) <= tol_dup:
        loop = loop[:-1]
    if loop.shape[0] < 8:
        raise InvalidShape("surface loop degenerated to too few points")

    if _segment_pairs_intersect(loop, 1e-12 * params.chord):
        raise InvalidShape("blade surface loop self-intersects")

    surface = SampledCurve.from_points(loop)
    le_index = m - 1 - int(np.sum(~keep[: m - 1]))
    return BladeProfile(surface=surface, le_index=le_index, te_index=0, camber=camber)


_ANGLE_KEYS = ("psi", "theta_le", "theta_te")
_SCALAR_KEYS = (
    "x_le",
    "y_le",
    "chord",
    "psi",
    "theta_le",
    "theta_te",
    "d_le",
    "d_te",
    "rho_le",
    "rho_te",
)


def read_blade_config(path: str) -> tuple[BladeShapeParams, dict[str, float]]:
    """Read a blade config file.

    Angles are degrees in the file, radians in memory. Returns the shape
    parameters and a dict of any extra keys (used for passage settings).
    """
    values = parse_kv_file(path)
    missing = [k for k in _SCALAR_KEYS if k not in values]
    missing += [
        f"t_u{i}" for i in range(1, 7) if f"t_u{i}" not in values
    ]
    missing += [
        f"t_l{i}" for i in range(1, 7) if f"t_l{i}" not in values
    ]
    if missing:
        raise ConfigError(path, f"missing blade keys: {', '.join(missing)}")
    kwargs = {}
    for key in _SCALAR_KEYS:
        v = values.pop(key)
        kwargs[key] = math.radians(v) if key in _ANGLE_KEYS else v
    t_upper = np.array([values.pop(f"t_u{i}") for i in range(1, 7)])
    t_lower = np.array([values.pop(f"t_l{i}") for i in range(1, 7)])
    params = BladeShapeParams(t_upper=t_upper, t_lower=t_lower, **kwargs)
    try:
        params.validate()
    except (ValueError, TypeError) as exc:
        raise ConfigError(path, str(exc)) from None
    return params, values


def write_blade_config(params: BladeShapeParams, path: str, extra: dict | None = None):
    params.validate()
    values: dict[str, float] = {}
    for key in _SCALAR_KEYS:
        v = getattr(params, key)
        values[key] = math.degrees(v) if key in _ANGLE_KEYS else float(v)
    for i in range(6):
        values[f"t_u{i + 1}"] = float(params.t_upper[i])
    for i in range(6):
        values[f"t_l{i + 1}"] = float(params.t_lower[i])
    if extra:
        values.update({k: float(v) for k, v in extra.items()})
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_kv(values, header="blade shape (angles in degrees)"))


def write_profile_csv(curve: SampledCurve, path: str, provenance: str | None = None):
    """Write curve points as two-column CSV (x, y)."""
    with open(path, "w", encoding="utf-8") as fh:
        if provenance:
            fh.write(f"# {provenance}\n")
        fh.write("x,y\n")
        for x, y in curve.points:
            fh.write(f"{x!r},{y!r}\n")
