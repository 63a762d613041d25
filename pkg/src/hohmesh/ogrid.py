"""Initial body-fitted O-block around the blade.

The blade surface ring is extruded along outward normals to an outer
loop (the channel walls between the two H interfaces, or any closed
curve). Ring order is clockwise around the blade so that (xi, eta) with
eta pointing outward is right-handed and Jacobians are positive.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from ._validation import check_positive, round_half_up
from .blade import BladeProfile, SampledCurve
from .clustering import tanh_cluster, wall_cluster_many
from .errors import ExtrusionFailure, InvalidMesh, MeshGenerationError
from .passage import MeshingParams, PassageBoundary, PassageCondition

__all__ = [
    "ClusterSpec",
    "RingNodes",
    "OuterLoop",
    "StructuredBlock",
    "distribute_surface_nodes",
    "outer_loop_from_boundary",
    "extrude_to_outer",
    "min_cell_area",
]


@dataclass
class ClusterSpec:
    """Node budget and clustering strengths of the O-block."""

    n_t: int
    n_n: int
    dn1: float
    gamma_le: float
    gamma_te: float

    @classmethod
    def from_condition(
        cls, cond: PassageCondition, params: MeshingParams
    ) -> "ClusterSpec":
        n_n = max(10, round_half_up(cond.n_o / params.n_t))
        return cls(
            n_t=params.n_t,
            n_n=n_n,
            dn1=cond.dn1,
            gamma_le=params.gamma_le,
            gamma_te=params.gamma_te,
        )

    def validate(self) -> None:
        if self.n_t < 8:
            raise ValueError(f"n_t must be >= 8, got {self.n_t}")
        if self.n_n < 4:
            raise ValueError(f"n_n must be >= 4, got {self.n_n}")
        check_positive("dn1", self.dn1)
        if self.gamma_le < 0 or self.gamma_te < 0:
            raise ValueError("clustering strengths must be >= 0")


@dataclass
class RingNodes:
    """Blade-surface node ring, clockwise, seam at the trailing edge."""

    points: NDArray[np.float64]
    le_index: int

    @property
    def n(self) -> int:
        return self.points.shape[0]


@dataclass
class OuterLoop:
    """Closed outer polyline; the closing edge (last -> first) is implied.

    For passage loops the four corner positions are recorded as arclength
    stations (order: lower-right, upper-right, upper-left, lower-left
    along the counterclockwise walk) so extrusion can pin corner nodes
    and pair the periodic walls.
    """

    points: NDArray[np.float64]
    corner_arcs: NDArray[np.float64] | None = None
    corner_idx: NDArray[np.int_] | None = None
    pitch: float | None = None

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float)
        seg = np.linalg.norm(np.diff(self.points, axis=0), axis=1)
        closing = np.linalg.norm(self.points[0] - self.points[-1])
        self._cum = np.concatenate(([0.0], np.cumsum(seg), [0.0]))
        self._cum[-1] = self._cum[-2] + closing

    @property
    def total_length(self) -> float:
        return float(self._cum[-1])

    def segments(self):
        """(starts, ends) arrays of all closed-loop edges."""
        starts = self.points
        ends = np.roll(self.points, -1, axis=0)
        return starts, ends

    def arclength_of(self, seg_index, seg_frac):
        seg_len = self._cum[1:] - self._cum[:-1]
        return self._cum[seg_index] + seg_frac * seg_len[seg_index]

    def point_at(self, arclength: float) -> NDArray[np.float64]:
        """Point on the loop at the given arclength from its start."""
        n = self.points.shape[0]
        s = float(arclength) % self.total_length
        seg = int(np.searchsorted(self._cum, s, side="right")) - 1
        seg = min(max(seg, 0), n - 1)
        seg_len = self._cum[seg + 1] - self._cum[seg]
        frac = 0.0 if seg_len == 0.0 else (s - self._cum[seg]) / seg_len
        a = self.points[seg]
        b = self.points[(seg + 1) % n]
        return a + frac * (b - a)


@dataclass
class StructuredBlock:
    """Single structured block of node coordinates, shape (ni, nj, 2).

    For wrap blocks (the O-block) i is periodic: i = ni wraps to 0.
    ``periodic_pairs`` holds (ring index on lower wall, ring index on
    upper wall) pairs of outer-boundary nodes; for H blocks it holds
    (column, column) pairs relating the bottom and top rows.
    ``pieces`` maps outer-wall piece names (lower/right/upper/left) to
    ordered ring indices for wrap blocks built from a passage loop.
    """

    coords: NDArray[np.float64]
    wrap: bool
    periodic_pairs: NDArray[np.int_] = field(
        default_factory=lambda: np.empty((0, 2), dtype=int)
    )
    pieces: dict | None = None

    @property
    def ni(self) -> int:
        return self.coords.shape[0]

    @property
    def nj(self) -> int:
        return self.coords.shape[1]


def distribute_surface_nodes(profile: BladeProfile, spec: ClusterSpec) -> RingNodes:
    """Place n_t nodes on the surface loop, clustered toward both edges.

    The trailing and leading edge points are pinned exactly; the
    remaining nodes are split between the two sides proportional to side
    arclength (largest remainder) and spaced by the two-sided tanh map in
    arclength, with gamma_le acting at the leading edge and gamma_te at
    the trailing edge of each side.
    """
    spec.validate()
    pts = profile.surface.points
    cum = profile.surface.cumulative_arclength
    le = profile.le_index
    n = pts.shape[0]
    if not (0 < le < n):
        raise InvalidMesh("profile leading-edge index out of range")

    # side A: trailing edge -> leading edge along stored order (upper)
    side_a = pts[: le + 1]
    cum_a = cum[: le + 1]
    # side B: leading edge -> trailing edge, includes the closing edge
    side_b = np.concatenate([pts[le:], pts[:1]])
    seg_b = np.linalg.norm(np.diff(side_b, axis=0), axis=1)
    cum_b = np.concatenate(([0.0], np.cumsum(seg_b)))

    len_a = float(cum_a[-1] - cum_a[0])
    len_b = float(cum_b[-1])
    interior = spec.n_t - 2
    if interior < 2:
        raise InvalidMesh("n_t too small for both sides")
    share = interior * len_a / (len_a + len_b)
    n_a = int(np.floor(share + 0.5))
    n_a = min(max(n_a, 1), interior - 1)
    n_b = interior - n_a

    # side A runs TE -> LE, so the a-end is the trailing edge
    t_a = tanh_cluster(n_a + 2, spec.gamma_te, spec.gamma_le)
    pts_a = _interp_polyline(side_a, cum_a - cum_a[0], t_a * len_a)
    t_b = tanh_cluster(n_b + 2, spec.gamma_le, spec.gamma_te)
    pts_b = _interp_polyline(side_b, cum_b, t_b * len_b)

    pts_a[0] = pts[0]
    pts_a[-1] = pts[le]
    pts_b[0] = pts[le]
    pts_b[-1] = pts[0]

    ccw = np.concatenate([pts_a[:-1], pts_b[:-1]])
    ring = np.concatenate([ccw[:1], ccw[1:][::-1]])
    return RingNodes(points=ring, le_index=1 + n_b)


def _interp_polyline(
    pts: NDArray[np.float64], cum: NDArray[np.float64], s: NDArray[np.float64]
) -> NDArray[np.float64]:
    x = np.interp(s, cum, pts[:, 0])
    y = np.interp(s, cum, pts[:, 1])
    return np.stack([x, y], axis=1)


def outer_loop_from_boundary(boundary: PassageBoundary) -> OuterLoop:
    """Outer loop of the O-block: walls between the two interfaces.

    Counterclockwise walk starting at the lower-right corner: up the
    outlet interface, along the upper wall to the inlet interface, down,
    and back along the lower wall. Corner pairs are exact periodic
    images.
    """
    lo_pts = boundary.lower.points
    x0, x1 = boundary.x_if_in, boundary.x_if_out
    if not (boundary.x_start <= x0 < x1 <= boundary.x_end):
        raise InvalidMesh("interface stations out of order")
    y0 = float(np.interp(x0, lo_pts[:, 0], lo_pts[:, 1]))
    y1 = float(np.interp(x1, lo_pts[:, 0], lo_pts[:, 1]))
    pitch = boundary.pitch

    inside = (lo_pts[:, 0] > x0) & (lo_pts[:, 0] < x1)
    low_mid = lo_pts[inside]

    rb = np.array([x1, y1])
    rt = np.array([x1, y1 + pitch])
    lt = np.array([x0, y0 + pitch])
    lb = np.array([x0, y0])

    up_mid = low_mid + np.array([0.0, pitch])
    loop_pts = np.concatenate(
        [
            rb[None, :],
            rt[None, :],
            up_mid[::-1],
            lt[None, :],
            lb[None, :],
            low_mid,
        ]
    )
    cum = np.concatenate(
        ([0.0], np.cumsum(np.linalg.norm(np.diff(loop_pts, axis=0), axis=1)))
    )
    corner_idx = np.array(
        [0, 1, 2 + up_mid.shape[0], 3 + up_mid.shape[0]], dtype=int
    )
    corner_arcs = cum[corner_idx]
    return OuterLoop(
        points=loop_pts,
        corner_arcs=corner_arcs,
        corner_idx=corner_idx,
        pitch=pitch,
    )


def _ray_hits(
    origins: NDArray[np.float64],
    directions: NDArray[np.float64],
    outer: OuterLoop,
    scale: float,
):
    """First positive ray-segment intersection per origin.

    Returns (hit mask, points, seg index, seg fraction). Vectorized over
    all (ray, segment) pairs in chunks.
    """
    starts, ends = outer.segments()
    d_seg = ends - starts
    n_rays = origins.shape[0]
    best_t = np.full(n_rays, np.inf)
    best_seg = np.full(n_rays, -1, dtype=int)
    best_frac = np.zeros(n_rays)
    eps = 1e-12
    t_min = 1e-9 * scale

    chunk = max(1, int(4e6) // max(starts.shape[0], 1))
    for lo in range(0, n_rays, chunk):
        o = origins[lo : lo + chunk, None, :]
        d = directions[lo : lo + chunk, None, :]
        q = starts[None, :, :]
        dq = d_seg[None, :, :]
        denom = d[..., 0] * dq[..., 1] - d[..., 1] * dq[..., 0]
        rel = q - o
        t_num = rel[..., 0] * dq[..., 1] - rel[..., 1] * dq[..., 0]
        s_num = rel[..., 0] * d[..., 1] - rel[..., 1] * d[..., 0]
        with np.errstate(divide="ignore", invalid="ignore"):
            t = t_num / denom
            s = s_num / denom
        ok = (
            (np.abs(denom) > eps)
            & (t > t_min)
            & (s >= -1e-9)
            & (s <= 1.0 + 1e-9)
        )
        t = np.where(ok, t, np.inf)
        idx = np.argmin(t, axis=1)
        rows = np.arange(t.shape[0])
        tmin = t[rows, idx]
        found = np.isfinite(tmin)
        sl = slice(lo, lo + t.shape[0])
        best_t[sl] = np.where(found, tmin, np.inf)
        best_seg[sl] = np.where(found, idx, -1)
        best_frac[sl] = np.where(found, s[rows, idx], 0.0)

    hit = np.isfinite(best_t)
    pts = np.zeros_like(origins)
    pts[hit] = origins[hit] + best_t[hit, None] * directions[hit]
    return hit, pts, best_seg, np.clip(best_frac, 0.0, 1.0)


def _nearest_on_loop(point: NDArray[np.float64], outer: OuterLoop):
    starts, ends = outer.segments()
    d = ends - starts
    rel = point[None, :] - starts
    denom = np.einsum("ij,ij->i", d, d)
    frac = np.clip(np.einsum("ij,ij->i", rel, d) / np.maximum(denom, 1e-300), 0.0, 1.0)
    proj = starts + frac[:, None] * d
    dist = np.linalg.norm(proj - point[None, :], axis=1)
    k = int(np.argmin(dist))
    return proj[k], k, float(frac[k])


def extrude_to_outer(
    ring: RingNodes, outer: OuterLoop, spec: ClusterSpec
) -> StructuredBlock:
    """Extrude the surface ring along outward normals to the outer loop.

    Each ring node casts a ray along its outward normal; the footprint is
    the nearest intersection with the loop (reversed ray, then nearest
    point, as fallbacks). For passage loops the four corner nodes are
    pinned to the exact corners and the periodic walls are re-paired so
    that upper footprints equal lower footprints shifted by the pitch.
    Nodes along each ray follow the one-sided wall clustering with first
    spacing dn1.

    Raises ExtrusionFailure for unusable rays, InfeasibleClustering when
    a ray is too short for dn1, InvalidMesh for folded cells or periodic
    mismatch.
    """
    spec.validate()
    surf = ring.points
    n_t = surf.shape[0]
    if n_t != spec.n_t:
        raise InvalidMesh(f"ring has {n_t} nodes, spec wants {spec.n_t}")

    scale = float(np.max(np.ptp(surf, axis=0)))
    check_positive("ring extent", scale)

    nxt = np.roll(surf, -1, axis=0)
    prv = np.roll(surf, 1, axis=0)
    tang = nxt - prv
    norm = np.linalg.norm(tang, axis=1, keepdims=True)
    if np.any(norm <= 0):
        raise InvalidMesh("coincident ring nodes")
    tang /= norm
    # ring is clockwise; the left normal of the tangent points outward
    normals = np.stack([-tang[:, 1], tang[:, 0]], axis=1)

    hit, feet, seg_idx, seg_frac = _ray_hits(surf, normals, outer, scale)
    if not np.all(hit):
        rev = ~hit
        hit2, feet2, seg2, frac2 = _ray_hits(surf[rev], -normals[rev], outer, scale)
        feet[rev] = feet2
        seg_idx[rev] = seg2
        seg_frac[rev] = frac2
        hit[rev] = hit2
        if not np.all(hit):
            for i in np.flatnonzero(~hit):
                feet[i], seg_idx[i], seg_frac[i] = _nearest_on_loop(surf[i], outer)
                if np.linalg.norm(feet[i] - surf[i]) <= 1e-9 * scale:
                    raise ExtrusionFailure(
                        f"surface node {i} touches the outer loop"
                    )

    lam = outer.arclength_of(seg_idx, seg_frac)
    ordered = _order_feet_along_loop(lam, outer)
    if ordered is not None:
        changed = ordered != lam
        lam = ordered
        for i in np.flatnonzero(changed):
            feet[i] = outer.point_at(lam[i])

    def try_feet(feet_c, lam_c):
        for blend in (False, True):
            try:
                block = _assemble_block(
                    surf, outer, spec, feet_c.copy(), lam_c.copy(),
                    scale, blend,
                )
            except MeshGenerationError:
                continue
            if min_cell_area(block) > 0.0:
                return block
        return None

    block = try_feet(feet, lam)
    if block is not None:
        return block

    # The feet are in loop order yet the blend still folds: converging
    # ray fans from concave stretches can squeeze many feet into a
    # short piece of wall. Diffuse the foot gaps along the loop toward
    # the surface spacing profile, in growing doses, until the blend is
    # fold-free.
    w = np.linalg.norm(np.roll(surf, -1, axis=0) - surf, axis=1)
    for passes in (1, 2, 4, 8, 16, 32, 64):
        lam_try = _diffuse_foot_gaps(lam, w, outer.total_length, passes)
        feet_try = np.stack([outer.point_at(v) for v in lam_try])
        block = try_feet(feet_try, lam_try)
        if block is not None:
            return block
    raise InvalidMesh("initial O-block contains folded cells")


def _assemble_block(
    surf: NDArray[np.float64],
    outer: OuterLoop,
    spec: ClusterSpec,
    feet: NDArray[np.float64],
    lam: NDArray[np.float64],
    scale: float,
    blend: bool = False,
) -> StructuredBlock:
    """Blend the surface ring to the given feet into an O-block.

    With ``blend`` the interior follows the raw (ordered) rays near the
    surface and takes up the corner pinning and periodic pairing
    adjustment cubically toward the outer boundary. Rotating whole
    straight columns after their adjusted feet makes neighbors cross
    when the adjustment is large; blending moves the shear into the
    outer cells, which are large enough to absorb it.
    """
    pairs = np.empty((0, 2), dtype=int)
    pieces = None
    feet_nat = feet
    if outer.corner_arcs is not None:
        feet_nat = feet.copy()
        feet, lam, pairs, pieces = _pin_corners_and_pair(feet, lam, outer)

    lengths = np.linalg.norm(feet - surf, axis=1)
    if np.any(lengths <= 1e-9 * scale):
        raise ExtrusionFailure("zero-length extrusion ray")
    t = wall_cluster_many(spec.n_n, lengths, spec.dn1)
    frac = t / lengths[:, None]
    coords = surf[:, None, :] + frac[..., None] * (feet - surf)[:, None, :]

    if blend and feet_nat is not feet:
        base = (
            surf[:, None, :]
            + frac[..., None] * (feet_nat - surf)[:, None, :]
        )
        # quintic smoothstep: flat at both ends, so the first cells stay
        # on the raw rays and the outermost cells carry no leftover shear
        tau = np.linspace(0.0, 1.0, spec.n_n)
        g = tau**3 * (10.0 + tau * (6.0 * tau - 15.0))
        coords = base + g[None, :, None] * (coords - base)

    coords[:, 0, :] = surf
    coords[:, -1, :] = feet

    return StructuredBlock(
        coords=coords, wrap=True, periodic_pairs=pairs, pieces=pieces
    )


def _diffuse_foot_gaps(
    lam: NDArray[np.float64],
    w: NDArray[np.float64],
    total: float,
    passes: int,
) -> NDArray[np.float64]:
    """Spread foot arclengths along the loop toward the surface profile.

    Binomially smooths the ratio of foot gap to surface gap, keeping
    gaps positive, the winding equal to one lap, and the mean phase of
    the distribution.
    """
    g = ((lam - np.roll(lam, -1)) + 0.5 * total) % total - 0.5 * total
    r = g / np.maximum(w, 1e-300)
    for _ in range(passes):
        r = 0.5 * r + 0.25 * (np.roll(r, 1) + np.roll(r, -1))
    g_new = r * w
    g_new *= total / float(np.sum(g_new))

    prefix_old = np.concatenate(([0.0], np.cumsum(g[:-1])))
    prefix_new = np.concatenate(([0.0], np.cumsum(g_new[:-1])))
    # anchor so the mean unwrapped arclength is unchanged
    c = float(lam[0] - np.mean(prefix_old) + np.mean(prefix_new))
    return (c - prefix_new) % total


def _pav_nondecreasing(y: NDArray[np.float64]) -> NDArray[np.float64]:
    """Least-squares nondecreasing fit (pool adjacent violators)."""
    vals: list[float] = []
    counts: list[int] = []
    for x in y:
        vals.append(float(x))
        counts.append(1)
        while len(vals) > 1 and vals[-2] > vals[-1]:
            v2, c2 = vals.pop(), counts.pop()
            v1, c1 = vals.pop(), counts.pop()
            vals.append((v1 * c1 + v2 * c2) / (c1 + c2))
            counts.append(c1 + c2)
    return np.repeat(vals, counts)


def _strictify(v: NDArray[np.float64]) -> NDArray[np.float64]:
    """Spread the plateaus of a nondecreasing sequence to strict order."""
    out = v.copy()
    n = out.size
    i = 0
    while i < n:
        j = i
        while j + 1 < n and out[j + 1] == out[i]:
            j += 1
        if j > i:
            m = out[i]
            a = out[i - 1] if i > 0 else None
            b = out[j + 1] if j + 1 < n else None
            if a is None and b is None:
                raise InvalidMesh("ray footprints collapsed to one point")
            if a is None:
                a = m - (b - m)
            if b is None:
                b = m + (m - a)
            k = j - i + 1
            out[i : j + 1] = a + (b - a) * (np.arange(1, k + 1) / (k + 1.0))
        i = j + 1
    return out


def _order_feet_along_loop(
    lam: NDArray[np.float64], outer: OuterLoop
) -> NDArray[np.float64] | None:
    """Restore ring-consistent cyclic order of foot arclengths.

    Normal rays from locally concave stretches of the blade converge and
    can cross before reaching the outer loop, leaving the footprints out
    of order and the algebraic block folded. The ring walks the loop
    once in descending arclength; crossings are repaired by an isotonic
    fit of the unwrapped arclengths, changing nothing when the raw feet
    are already in order (returns None then).
    """
    n = lam.size
    total = outer.total_length
    steps = ((lam - np.roll(lam, -1)) + 0.5 * total) % total - 0.5 * total
    if np.all(steps > 0.0):
        return None
    winding = float(np.sum(steps)) / total
    if abs(winding - 1.0) > 0.5:
        raise InvalidMesh(
            "ray footprints do not wind the outer loop exactly once"
        )
    start = (int(np.argmax(steps)) + 1) % n
    idx = (np.arange(n) + start) % n
    u = np.empty(n)
    u[0] = lam[idx[0]]
    u[1:] = u[0] - np.cumsum(steps[idx[:-1]])
    span = u[0] - u[-1]
    u = -_strictify(_pav_nondecreasing(-u))
    # plateau ends are spread past the original endpoints; if that eats
    # most of the wrap gap at the cut, rescale the span back
    fit_span = u[0] - u[-1]
    if total - fit_span < 0.5 * (total - span):
        mid = 0.5 * (u[0] + u[-1])
        u = mid + (u - mid) * (span / fit_span)
    out = np.empty(n)
    out[idx] = u % total
    return out


def _int_window(x: float, pad: int = 2) -> range:
    """Integers around x, floor(x) - pad through floor(x) + pad + 1."""
    lo = int(np.floor(x)) - pad
    return range(lo, lo + 2 * pad + 2)


def _corner_seeds(
    p: NDArray[np.float64],
    a: NDArray[np.float64],
    b: NDArray[np.float64],
    n: int,
) -> list[tuple[int, int, int]]:
    """Integer corner-position seeds for the displacement search.

    p holds the fractional ring positions of the rb, lb, lt, rt corner
    arcs in ring order, unrolled (strictly increasing, p[3] < p[0] + n).
    The lower span (rb to lb) must equal the upper span (lt to rt), so
    the natural positions are shifted. Shifting corner k by one ring
    slot makes one more ray cross that corner onto the neighboring
    wall; the first crossing pays the foot gap the corner arc falls
    into (a, large in a ray shadow) and every further crossing roughly
    one more local slot width (b). One seed spreads the transfer over
    the corners by water filling on that marginal cost; the others
    route the whole transfer through a single corner.
    """
    s = np.array([p[1] - p[0], p[2] - p[1], p[3] - p[2], p[0] + n - p[3]])
    if np.any(s <= 0.0):
        raise InvalidMesh("outer loop corners collapse onto one ring node")
    d_gap = s[0] - s[2]

    u = np.zeros(4)
    need = abs(d_gap)
    if need > 0.0:
        sgn = np.array([1.0, -1.0, -1.0, 1.0])
        if d_gap < 0.0:
            sgn = -sgn
        active = np.ones(4, dtype=bool)
        mu = 0.0
        for _ in range(4):
            inv = 1.0 / (2.0 * b[active])
            mu = (need + float(np.sum(a[active] * inv))) / float(
                np.sum(inv)
            )
            drop = active & (a >= mu)
            if not np.any(drop):
                break
            active &= ~drop
        y = np.where(active, np.maximum(0.0, (mu - a) / (2.0 * b)), 0.0)
        u = sgn * y

    seeds = [np.round(p + u).astype(int)]
    r = np.round(p).astype(int)
    e = int((r[1] - r[0]) - (r[3] - r[2]))
    for route in ((e, 0, 0, 0), (0, -e, 0, 0), (0, 0, -e, 0)):
        seeds.append(r + np.array(route))
    seeds.append(r)
    return [(int(m[0]), int(m[1]), int(m[2])) for m in seeds]


def _resample_ring(
    m: tuple[int, int, int, int],
    fracs: tuple[float, float, float, float, float],
    ext_grid: NDArray[np.float64],
    ext: NDArray[np.float64],
    total: float,
    n: int,
) -> NDArray[np.float64]:
    """Resampled foot arclengths for corner ring positions m.

    Per wall, the monotone ring-to-arclength map is evaluated at
    linearly stretched fractional ring positions, so the corner nodes
    land exactly on the corner arcs and the interior nodes keep the
    local spacing of the projected rays.
    """
    offs = (0, m[1] - m[0], m[2] - m[0], m[3] - m[0], n)
    lam_new = np.empty(n)
    for w in range(4):
        span = np.arange(offs[w], offs[w + 1])
        stretch = (fracs[w + 1] - fracs[w]) / (offs[w + 1] - offs[w])
        qpos = fracs[w] + (span - offs[w]) * stretch
        ids = (m[0] + span) % n
        lam_new[ids] = np.interp(qpos, ext_grid, ext) % total
    return lam_new


def _pin_corners_and_pair(
    feet: NDArray[np.float64],
    lam: NDArray[np.float64],
    outer: OuterLoop,
):
    """Pin wall corners and pair the periodic walls one to one.

    The foot arclengths run monotonically around the loop, so they form
    a monotone map from ring position to loop position. Four ring nodes
    are chosen as wall corners, constrained to equal interior counts on
    the two periodic walls, and the map is resampled at linearly
    stretched ring positions per wall so the corner nodes land exactly
    on the corner arcs. Every foot moves a little instead of a few feet
    being forced through a corner gap, which keeps the local spacing of
    the projected rays.
    """
    total = outer.total_length
    corners = outer.corner_arcs
    corner_pts = outer.points[outer.corner_idx]
    n = lam.size

    steps = ((lam - np.roll(lam, -1)) + 0.5 * total) % total - 0.5 * total
    if np.any(steps <= 0.0):
        raise InvalidMesh("ray footprints out of order on the outer loop")
    unwrapped = np.empty(n + 1)
    unwrapped[0] = lam[0]
    unwrapped[1:-1] = lam[0] - np.cumsum(steps[:-1])
    unwrapped[-1] = lam[0] - total

    # fractional ring positions of the four corner arcs; the ring meets
    # them in the cyclic order rb, lb, lt, rt
    grid = np.arange(n + 1, dtype=float)
    v = unwrapped[0] - ((unwrapped[0] - corners) % total)
    p_rb, p_rt, p_lt, p_lb = np.interp(-v, -unwrapped, grid)
    p_lb = p_rb + (p_lb - p_rb) % n
    p_lt = p_rb + (p_lt - p_rb) % n
    p_rt = p_rb + (p_rt - p_rb) % n
    if not p_rb < p_lb < p_lt < p_rt < p_rb + n:
        raise InvalidMesh("outer loop corners collapse onto one ring node")
    fracs = (p_rb, p_lb, p_lt, p_rt, p_rb + n)

    # crossing costs per corner: the natural foot gap the corner arc
    # falls into (first crossing, large in a ray shadow) and the mean
    # slot width nearby (each further crossing)
    p_all = np.array([p_rb, p_lb, p_lt, p_rt])
    j_all = np.floor(p_all).astype(int) % n
    a_cross = unwrapped[j_all] - unwrapped[j_all + 1]
    win = (j_all[:, None] + np.arange(-8, 9)) % n
    b_cross = np.maximum(
        0.5 * steps[win].mean(axis=1), 1e-9 * total / n
    )

    m0, m1, m2, m3 = _corner_offsets(p_all, a_cross, b_cross, n)
    offs = (0, m1 - m0, m2 - m0, m3 - m0, n)
    r0 = m0

    # resample the unwrapped map per wall at stretched ring positions
    ext_grid = np.arange(2 * n + 1, dtype=float)
    ext = np.concatenate(
        [unwrapped[:-1], unwrapped[:-1] - total, unwrapped[:1] - 2.0 * total]
    )
    wall_arc = (corners[0], corners[3], corners[2], corners[1])
    wall_pt = (corner_pts[0], corner_pts[3], corner_pts[2], corner_pts[1])
    for w in range(4):
        node = (r0 + offs[w]) % n
        lam[node] = wall_arc[w]
        feet[node] = wall_pt[w]
        span = np.arange(offs[w] + 1, offs[w + 1])
        if span.size == 0:
            continue
        stretch = (fracs[w + 1] - fracs[w]) / (offs[w + 1] - offs[w])
        qpos = fracs[w] + (span - offs[w]) * stretch
        ids = (r0 + span) % n
        lam[ids] = np.interp(qpos, ext_grid, ext) % total
        for i in ids:
            feet[i] = outer.point_at(float(lam[i]))

    m_lb, m_lt, m_rt = offs[1], offs[2], offs[3]
    rb = r0 % n
    lb = (r0 + m_lb) % n
    lt = (r0 + m_lt) % n
    rt = (r0 + m_rt) % n
    lower = (r0 + 1 + np.arange(m_lb - 1)) % n
    upper = (r0 + m_lt + 1 + np.arange(m_rt - m_lt - 1)) % n
    lower = lower[np.argsort(feet[lower, 0], kind="stable")]
    upper = upper[np.argsort(feet[upper, 0], kind="stable")]
    left = (r0 + m_lb + np.arange(m_lt - m_lb + 1)) % n
    right = (r0 + n - np.arange(n - m_rt + 1)) % n

    # Give both periodic walls one shared x profile, the mean of their
    # resampled distributions, and place the upper feet as exact pitch
    # shifts of the lower ones. Averaging matched pairs then changes
    # nothing, so no foot is dragged sideways after the resample.
    shift = np.array([0.0, outer.pitch])
    if lower.size:
        lb_i = int(outer.corner_idx[3])
        lt_i = int(outer.corner_idx[2])
        wx = np.concatenate([outer.points[lb_i:, 0], outer.points[:1, 0]])
        wy = np.concatenate([outer.points[lb_i:, 1], outer.points[:1, 1]])
        warc = outer._cum[lb_i:]
        x_bar = 0.5 * (feet[lower, 0] + feet[upper, 0])
        p_low = np.stack([x_bar, np.interp(x_bar, wx, wy)], axis=1)
        feet[lower] = p_low
        feet[upper] = p_low + shift
        lam[lower] = np.interp(x_bar, wx, warc)
        xu = outer.points[1 : lt_i + 1, 0][::-1]
        au = outer._cum[1 : lt_i + 1][::-1]
        lam[upper] = np.interp(x_bar, xu, au)

    pairs = np.array(
        [(lb, lt), (rb, rt)] + list(zip(lower.tolist(), upper.tolist())),
        dtype=int,
    )
    pieces = {
        "left": left,
        "right": right,
        "lower": lower,
        "upper": upper,
    }
    return feet, lam, pairs, pieces


def min_cell_area(block: StructuredBlock) -> float:
    """Smallest signed quad area over all cells of the block."""
    c = block.coords
    if block.wrap:
        c = np.concatenate([c, c[:1]], axis=0)
    a = c[:-1, :-1]
    b = c[1:, :-1]
    cc = c[1:, 1:]
    d = c[:-1, 1:]

    def cross(p, q):
        return p[..., 0] * q[..., 1] - p[..., 1] * q[..., 0]

    area = 0.5 * (
        cross(a, b) + cross(b, cc) + cross(cc, d) + cross(d, a)
    )
    return float(area.min())
