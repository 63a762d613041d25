"""Elliptic smoothing of the O-block.

Solves the interchanged Poisson grid equations

    A1 x_xieta2 - 2 A2 x_xieta + A3 x_etaeta = -A4^2 (P1 x_xi + P2 x_eta)

(and the same for y) by pointwise successive over-relaxation with
red-black ordering, where

    A1 = x_eta^2 + y_eta^2
    A2 = x_xi x_eta + y_xi y_eta
    A3 = x_xi^2 + y_xi^2
    A4 = x_xi y_eta - x_eta y_xi   (the coordinate Jacobian).

Control functions P1, P2 are solved pointwise on the two eta-boundary
rows from the same equations under imposed local orthogonality (A2 = 0),
then blended into the interior with cubic decay. Boundary nodes are
Dirichlet and never move.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .errors import FoldedMesh, SingularMetric
from .ogrid import StructuredBlock, min_cell_area

__all__ = [
    "SmootherSettings",
    "SmoothResult",
    "boundary_controls",
    "blend_controls",
    "residual_norm",
    "smooth",
]


@dataclass
class SmootherSettings:
    max_sweeps: int = 2000
    tolerance: float = 1e-6
    relaxation: float = 1.5
    control_refresh_every: int = 10
    control_clamp: float = 1e4

    def validate(self) -> None:
        if self.max_sweeps < 0:
            raise ValueError("max_sweeps must be >= 0")
        if not (0 < self.tolerance):
            raise ValueError("tolerance must be > 0")
        if not (0 < self.relaxation < 2):
            raise ValueError("relaxation must lie in (0, 2)")
        if self.control_refresh_every < 1:
            raise ValueError("control_refresh_every must be >= 1")


@dataclass
class SmoothResult:
    block: StructuredBlock
    converged: bool
    sweeps: int
    residual_history: NDArray[np.float64]


def _xi_derivatives(x: NDArray, wrap: bool):
    """Centered xi first/second differences along axis 0 of a row/grid."""
    if wrap:
        xe = np.roll(x, -1, axis=0)
        xw = np.roll(x, 1, axis=0)
    else:
        # one-sided second-order at the ends
        xe = np.empty_like(x)
        xw = np.empty_like(x)
        xe[:-1] = x[1:]
        xe[-1] = x[-1]
        xw[1:] = x[:-1]
        xw[0] = x[0]
    return xe, xw


def _row_eta_derivs(c: NDArray, j: int):
    """Second-order one-sided eta derivatives at boundary row j (0 or -1)."""
    if j == 0:
        f0, f1, f2, f3 = c[:, 0], c[:, 1], c[:, 2], c[:, 3]
        d1 = (-3.0 * f0 + 4.0 * f1 - f2) / 2.0
        d2 = 2.0 * f0 - 5.0 * f1 + 4.0 * f2 - f3
    else:
        f0, f1, f2, f3 = c[:, -1], c[:, -2], c[:, -3], c[:, -4]
        d1 = (3.0 * f0 - 4.0 * f1 + f2) / 2.0
        d2 = 2.0 * f0 - 5.0 * f1 + 4.0 * f2 - f3
    return d1, d2


def boundary_controls(
    block: StructuredBlock, clamp: float = 1e4
) -> NDArray[np.float64]:
    """Control values on the two eta-boundary rows.

    Returns an array of shape (2, 2, ni): [row, control] with row 0 the
    blade-side boundary (j = 0), row 1 the outer boundary, and controls
    (P1, P2). At each boundary node local orthogonality is imposed
    (A2 = 0) and the two smoothing equations are solved for P1, P2 using
    one-sided second-order eta-derivatives and centered xi-derivatives.

    Raises SingularMetric when the coordinate Jacobian vanishes at a
    boundary node. ``clamp`` bounds the controls measured per unit of
    the normalized curvilinear coordinate (xi and eta each spanning
    [0, 1]); in the per-index convention used internally that means
    |P1| <= clamp * s_xi and |P2| <= clamp * s_eta, where s_xi and
    s_eta are the index spans of the two directions. A fixed per-index
    bound would tighten as the grid is refined; this one is
    resolution-independent.
    """
    c = block.coords
    ni, nj = block.ni, block.nj
    if nj < 4:
        raise ValueError("need nj >= 4 for one-sided eta stencils")
    s_xi = ni if block.wrap else ni - 1
    s_eta = nj - 1
    out = np.zeros((2, 2, ni))
    for row, j in ((0, 0), (1, -1)):
        if block.wrap:
            e = np.roll(c[:, j], -1, axis=0)
            w = np.roll(c[:, j], 1, axis=0)
            x_xi = (e[:, 0] - w[:, 0]) / 2.0
            y_xi = (e[:, 1] - w[:, 1]) / 2.0
            x_xixi = e[:, 0] - 2.0 * c[:, j, 0] + w[:, 0]
            y_xixi = e[:, 1] - 2.0 * c[:, j, 1] + w[:, 1]
        else:
            x_xi = np.gradient(c[:, j, 0])
            y_xi = np.gradient(c[:, j, 1])
            x_xixi = np.zeros(ni)
            y_xixi = np.zeros(ni)
            x_xixi[1:-1] = c[2:, j, 0] - 2.0 * c[1:-1, j, 0] + c[:-2, j, 0]
            y_xixi[1:-1] = c[2:, j, 1] - 2.0 * c[1:-1, j, 1] + c[:-2, j, 1]
        xd = _row_eta_derivs(c[:, :, 0], j)
        yd = _row_eta_derivs(c[:, :, 1], j)
        x_eta, x_etaeta = xd
        y_eta, y_etaeta = yd

        a1 = x_eta**2 + y_eta**2
        a3 = x_xi**2 + y_xi**2
        a4 = x_xi * y_eta - x_eta * y_xi
        scale = a1 + a3
        bad = np.abs(a4) <= 1e-14 * np.maximum(scale, 1e-300)
        if np.any(bad):
            i = int(np.argmax(bad))
            raise SingularMetric(
                f"coordinate Jacobian vanishes at boundary node i={i}, "
                f"row j={'0' if j == 0 else 'max'}"
            )
        rhs_x = -(a1 * x_xixi + a3 * x_etaeta) / a4**2
        rhs_y = -(a1 * y_xixi + a3 * y_etaeta) / a4**2
        p1 = (rhs_x * y_eta - rhs_y * x_eta) / a4
        p2 = (x_xi * rhs_y - y_xi * rhs_x) / a4
        out[row, 0] = np.clip(p1, -clamp * s_xi, clamp * s_xi)
        out[row, 1] = np.clip(p2, -clamp * s_eta, clamp * s_eta)
    return out


def blend_controls(rows: NDArray[np.float64], nj: int):
    """Cubic decay of the boundary-row controls into the interior.

    P(xi, eta) = P(xi, 0) (1 - eta)^3 + P(xi, eta_max) eta^3 with eta
    normalized to [0, 1]. Returns (P1, P2) fields of shape (ni, nj).
    """
    eta = (np.arange(nj) / (nj - 1))[None, :]
    w0 = (1.0 - eta) ** 3
    w1 = eta**3
    p1 = rows[0, 0][:, None] * w0 + rows[1, 0][:, None] * w1
    p2 = rows[0, 1][:, None] * w0 + rows[1, 1][:, None] * w1
    return p1, p2


# Stability conditioning of the refreshed boundary controls. The
# pointwise orthogonality solve is exact but blind to two failure modes
# of the relaxation that consumes it: slope discontinuities in a
# Dirichlet row (outer-loop corners), where the orthogonality demand is
# geometrically unsatisfiable and the solve emits growing sign-
# alternating values as the nearby interior shears, and forcing whose
# per-node magnitude exceeds what the centered first-derivative stencil
# can carry before the update loses positivity and the grid folds.
_KINK_TURN = np.pi / 4  # row turning angle treated as a corner
_KINK_RAMP_DIV = 48  # fade width = max(3, ni / this)
_BUDGET_FRACTION = 0.7  # fraction of the positivity budget controls may use
_REFRESH_BLEND = 0.5  # under-relaxation of control refreshes
_FREEZE_TOL = 0.02  # relative refresh change below which controls freeze


def _kink_fade(xr: NDArray, yr: NDArray, wrap: bool) -> NDArray:
    """Per-column weights fading controls near boundary-row corners."""
    ni = xr.shape[0]
    p = np.stack([xr, yr], axis=-1)
    if wrap:
        fwd = np.roll(p, -1, axis=0) - p
        bwd = p - np.roll(p, 1, axis=0)
    else:
        fwd = np.empty_like(p)
        bwd = np.empty_like(p)
        fwd[:-1] = p[1:] - p[:-1]
        fwd[-1] = fwd[-2]
        bwd[1:] = p[1:] - p[:-1]
        bwd[0] = bwd[1]
    cross = bwd[:, 0] * fwd[:, 1] - bwd[:, 1] * fwd[:, 0]
    dot = bwd[:, 0] * fwd[:, 0] + bwd[:, 1] * fwd[:, 1]
    turn = np.abs(np.arctan2(cross, dot))
    kinks = np.flatnonzero(turn > _KINK_TURN)
    if not kinks.size:
        return np.ones(ni)
    idx = np.arange(ni)
    if wrap:
        dist = np.abs((idx[:, None] - kinks[None, :] + ni // 2) % ni - ni // 2)
    else:
        dist = np.abs(idx[:, None] - kinks[None, :])
    ramp = max(3, -(-ni // _KINK_RAMP_DIV))
    return np.clip(dist.min(axis=1) / ramp, 0.0, 1.0)


def _condition_rows(
    rows: NDArray, x: NDArray, y: NDArray, wrap: bool
) -> NDArray:
    """Fade controls at row corners and cap them by the positivity budget.

    The update stencil keeps positive neighbor coefficients only while
    A4^2 |P1| / 2 < A1 and A4^2 |P2| / 2 < A3 at every node a control
    reaches; beyond that point relaxation oscillates and folds cells.
    Each boundary row is capped per column so its cubic-decayed
    contribution stays inside a fixed fraction of that budget.
    """
    out = rows.copy()
    nj = x.shape[1]
    out[0] *= _kink_fade(x[:, 0], y[:, 0], wrap)[None, :]
    out[1] *= _kink_fade(x[:, -1], y[:, -1], wrap)[None, :]
    t = _interior_terms(x, y, wrap)
    a4sq = t["a4"] ** 2
    with np.errstate(divide="ignore"):
        b1 = np.where(a4sq > 0.0, 2.0 * t["a1"] / a4sq, np.inf)
        b2 = np.where(a4sq > 0.0, 2.0 * t["a3"] / a4sq, np.inf)
    eta = np.arange(1, nj - 1) / (nj - 1.0)
    for row, w in ((0, (1.0 - eta) ** 3), (1, eta**3)):
        cap1 = 0.5 * _BUDGET_FRACTION * np.min(b1 / w[None, :], axis=1)
        cap2 = 0.5 * _BUDGET_FRACTION * np.min(b2 / w[None, :], axis=1)
        out[row, 0] = np.clip(out[row, 0], -cap1, cap1)
        out[row, 1] = np.clip(out[row, 1], -cap2, cap2)
    return out


def _interior_terms(x: NDArray, y: NDArray, wrap: bool):
    """Difference quantities on the interior columns (j = 1..nj-2)."""
    if wrap:
        xe_f, xw_f = np.roll(x, -1, axis=0), np.roll(x, 1, axis=0)
        ye_f, yw_f = np.roll(y, -1, axis=0), np.roll(y, 1, axis=0)
    else:
        xe_f, xw_f = x.copy(), x.copy()
        ye_f, yw_f = y.copy(), y.copy()
        xe_f[:-1], xw_f[1:] = x[1:], x[:-1]
        ye_f[:-1], yw_f[1:] = y[1:], y[:-1]

    sl = np.s_[:, 1:-1]
    xc, yc = x[sl], y[sl]
    xe, xw, ye, yw = xe_f[sl], xw_f[sl], ye_f[sl], yw_f[sl]
    xn, xs = x[:, 2:], x[:, :-2]
    yn, ys = y[:, 2:], y[:, :-2]
    x_xieta = (xe_f[:, 2:] - xe_f[:, :-2] - xw_f[:, 2:] + xw_f[:, :-2]) / 4.0
    y_xieta = (ye_f[:, 2:] - ye_f[:, :-2] - yw_f[:, 2:] + yw_f[:, :-2]) / 4.0

    x_xi = (xe - xw) / 2.0
    y_xi = (ye - yw) / 2.0
    x_eta = (xn - xs) / 2.0
    y_eta = (yn - ys) / 2.0

    a1 = x_eta**2 + y_eta**2
    a2 = x_xi * x_eta + y_xi * y_eta
    a3 = x_xi**2 + y_xi**2
    a4 = x_xi * y_eta - x_eta * y_xi
    return {
        "xc": xc, "yc": yc,
        "xe": xe, "xw": xw, "xn": xn, "xs": xs,
        "ye": ye, "yw": yw, "yn": yn, "ys": ys,
        "x_xi": x_xi, "y_xi": y_xi, "x_eta": x_eta, "y_eta": y_eta,
        "x_xieta": x_xieta, "y_xieta": y_xieta,
        "a1": a1, "a2": a2, "a3": a3, "a4": a4,
    }


def residual_norm(
    x: NDArray, y: NDArray, p1: NDArray, p2: NDArray, wrap: bool
) -> float:
    """Max-norm of the two equation residuals over interior nodes."""
    t = _interior_terms(x, y, wrap)
    p1i, p2i = p1[:, 1:-1], p2[:, 1:-1]
    forcing = t["a4"] ** 2
    rx = (
        t["a1"] * (t["xe"] - 2.0 * t["xc"] + t["xw"])
        - 2.0 * t["a2"] * t["x_xieta"]
        + t["a3"] * (t["xn"] - 2.0 * t["xc"] + t["xs"])
        + forcing * (p1i * t["x_xi"] + p2i * t["x_eta"])
    )
    ry = (
        t["a1"] * (t["ye"] - 2.0 * t["yc"] + t["yw"])
        - 2.0 * t["a2"] * t["y_xieta"]
        + t["a3"] * (t["yn"] - 2.0 * t["yc"] + t["ys"])
        + forcing * (p1i * t["y_xi"] + p2i * t["y_eta"])
    )
    if not wrap:
        rx, ry = rx[1:-1], ry[1:-1]
    return float(max(np.max(np.abs(rx)), np.max(np.abs(ry))))


def _color_pass(
    x: NDArray, y: NDArray, p1: NDArray, p2: NDArray,
    omega: float, mask: NDArray, wrap: bool,
) -> None:
    t = _interior_terms(x, y, wrap)
    denom = 2.0 * (t["a1"] + t["a3"])
    forcing = t["a4"] ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        gx = (
            t["a1"] * (t["xe"] + t["xw"])
            + t["a3"] * (t["xn"] + t["xs"])
            - 2.0 * t["a2"] * t["x_xieta"]
            + forcing * (p1[:, 1:-1] * t["x_xi"] + p2[:, 1:-1] * t["x_eta"])
        ) / denom
        gy = (
            t["a1"] * (t["ye"] + t["yw"])
            + t["a3"] * (t["yn"] + t["ys"])
            - 2.0 * t["a2"] * t["y_xieta"]
            + forcing * (p1[:, 1:-1] * t["y_xi"] + p2[:, 1:-1] * t["y_eta"])
        ) / denom
    new_x = (1.0 - omega) * t["xc"] + omega * gx
    new_y = (1.0 - omega) * t["yc"] + omega * gy
    xi = x[:, 1:-1]
    yi = y[:, 1:-1]
    xi[mask] = new_x[mask]
    yi[mask] = new_y[mask]


def smooth(block: StructuredBlock, settings: SmootherSettings | None = None) -> SmoothResult:
    """Relax the block toward the elliptic system; boundaries stay fixed.

    Runs red-black SOR sweeps until the interior residual drops below
    ``tolerance`` relative to its initial value or ``max_sweeps`` is
    reached (Converged=False in that case). Controls are refreshed every
    ``control_refresh_every`` sweeps. If a sweep folds any cell it is
    rolled back and retried with the relaxation factor halved, at most 3
    times, after which FoldedMesh is raised.
    """
    settings = settings or SmootherSettings()
    settings.validate()
    src = block.coords
    x = src[:, :, 0].copy()
    y = src[:, :, 1].copy()
    ni, nj = x.shape
    wrap = block.wrap

    ii = np.arange(ni)[:, None]
    jj = np.arange(1, nj - 1)[None, :]
    masks = [((ii + jj) % 2 == 0), ((ii + jj) % 2 == 1)]
    if not wrap:
        edge = np.zeros_like(masks[0])
        edge[0, :] = True
        edge[-1, :] = True
        masks = [m & ~edge for m in masks]

    def make_block() -> StructuredBlock:
        return StructuredBlock(
            coords=np.stack([x, y], axis=2),
            wrap=block.wrap,
            periodic_pairs=block.periodic_pairs,
            pieces=block.pieces,
        )

    rows = _condition_rows(
        boundary_controls(block, settings.control_clamp), x, y, wrap
    )
    p1, p2 = blend_controls(rows, nj)

    # Residual terms scale with (coordinate span)^3, so anything at the
    # rounding floor of that scale is oscillation, not signal.
    span = max(float(np.ptp(x)), float(np.ptp(y)), 1e-300)
    floor = 1e-30 + 4.0 * np.finfo(float).eps * span**3

    r0 = residual_norm(x, y, p1, p2, wrap)
    history = [r0]
    if r0 <= floor or settings.max_sweeps == 0:
        return SmoothResult(make_block(), r0 <= floor, 0, np.array(history))

    omega = settings.relaxation
    halvings = 0
    converged = False
    controls_frozen = False
    sweeps = 0
    for sweep in range(1, settings.max_sweeps + 1):
        if (
            not controls_frozen
            and sweep > 1
            and (sweep - 1) % settings.control_refresh_every == 0
        ):
            new = _condition_rows(
                boundary_controls(make_block(), settings.control_clamp),
                x, y, wrap,
            )
            delta = float(np.max(np.abs(new - rows)))
            rows = rows + _REFRESH_BLEND * (new - rows)
            p1, p2 = blend_controls(rows, nj)
            # Once refreshes stop moving the rows, freeze them so the
            # remaining iteration is linear and can actually converge.
            if delta <= _FREEZE_TOL * max(1.0, float(np.max(np.abs(rows)))):
                controls_frozen = True

        while True:
            x_save = x.copy()
            y_save = y.copy()
            for mask in masks:
                _color_pass(x, y, p1, p2, omega, mask, wrap)
            area = min_cell_area(make_block())
            if np.isfinite(area) and area > 0.0:
                break
            x, y = x_save, y_save
            halvings += 1
            if halvings > 3:
                raise FoldedMesh(
                    f"smoothing folded the grid; gave up after "
                    f"{halvings - 1} relaxation halvings"
                )
            omega *= 0.5

        sweeps = sweep
        res = residual_norm(x, y, p1, p2, wrap)
        history.append(res)
        if res <= settings.tolerance * r0 or res <= floor:
            converged = True
            break

    return SmoothResult(make_block(), converged, sweeps, np.array(history))
