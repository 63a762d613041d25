"""Variable spaces for conditions (given) and decisions (controlled).

Each space is an ordered list of bounded variables with affine maps to
and from the unit interval [-1, 1]. Length-like variables are expressed
relative to the chord; building geometry scales them by the sampled
chord so the same unit vector describes the same shape at any size.
Angles are radians internally and degrees in config files.

The condition vector (25 entries) feeds the policy network; the decision
vector (8 entries) is its output. Blade position is not part of either:
meshing is translation invariant, so shapes are built at the origin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable, Mapping, Sequence

import numpy as np
from numpy.typing import NDArray

from ._kv import parse_kv_file
from ._validation import round_half_up
from .blade import BladeProfile, BladeShapeParams, build_profile
from .errors import ConfigError, InvalidShape, SamplingExhausted, UnknownVariable
from .passage import MeshingParams, PassageCondition

__all__ = [
    "VariableSpec",
    "SpaceSpec",
    "condition_space",
    "decision_space",
    "blade_from_values",
    "condition_from_values",
    "condition_values",
    "meshing_params_from_values",
    "projection_extrema",
    "sample_condition",
    "apply_space_file",
]


@dataclass(frozen=True)
class VariableSpec:
    name: str
    lo: float
    hi: float
    integer: bool = False
    angle: bool = False

    def validate(self) -> None:
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ValueError(f"{self.name}: bounds must be finite")
        if self.lo > self.hi:
            raise ValueError(f"{self.name}: lower bound exceeds upper bound")


class SpaceSpec:
    """Ordered, bounded variables with [-1, 1] unit maps."""

    def __init__(self, variables: Iterable[VariableSpec]):
        self.variables = list(variables)
        for v in self.variables:
            v.validate()
        self.index = {v.name: i for i, v in enumerate(self.variables)}
        if len(self.index) != len(self.variables):
            raise ValueError("duplicate variable names")
        self.lo = np.array([v.lo for v in self.variables])
        self.hi = np.array([v.hi for v in self.variables])

    @property
    def dim(self) -> int:
        return len(self.variables)

    @property
    def names(self) -> list[str]:
        return [v.name for v in self.variables]

    def __getitem__(self, name: str) -> VariableSpec:
        try:
            return self.variables[self.index[name]]
        except KeyError:
            raise UnknownVariable(name) from None

    def _as_array(self, values) -> NDArray[np.float64]:
        if isinstance(values, Mapping):
            missing = [n for n in self.names if n not in values]
            if missing:
                raise UnknownVariable(missing[0])
            return np.array([float(values[n]) for n in self.names])
        arr = np.asarray(values, dtype=float)
        if arr.shape != (self.dim,):
            raise ValueError(f"expected {self.dim} values, got shape {arr.shape}")
        return arr

    def to_unit(self, values) -> NDArray[np.float64]:
        """Map physical values to [-1, 1]; fixed variables map to 0."""
        v = self._as_array(values)
        span = self.hi - self.lo
        with np.errstate(divide="ignore", invalid="ignore"):
            u = 2.0 * (v - self.lo) / span - 1.0
        return np.where(span > 0.0, u, 0.0)

    def from_unit(self, unit) -> dict[str, float | int]:
        """Map unit values (clipped to [-1, 1]) back to physical ones."""
        u = np.clip(np.asarray(unit, dtype=float), -1.0, 1.0)
        if u.shape != (self.dim,):
            raise ValueError(f"expected {self.dim} values, got shape {u.shape}")
        v = self.lo + 0.5 * (u + 1.0) * (self.hi - self.lo)
        out: dict[str, float | int] = {}
        for spec, value in zip(self.variables, v):
            if spec.integer:
                n = round_half_up(value)
                n = min(max(n, int(math.ceil(spec.lo))), int(math.floor(spec.hi)))
                out[spec.name] = n
            else:
                out[spec.name] = float(value)
        return out

    def sample(self, rng: np.random.Generator) -> dict[str, float | int]:
        """Draw one value per variable, uniform over the box."""
        u = rng.random(self.dim)
        v = self.lo + u * (self.hi - self.lo)
        out: dict[str, float | int] = {}
        for spec, value in zip(self.variables, v):
            if spec.integer:
                n = round_half_up(value)
                n = min(max(n, int(math.ceil(spec.lo))), int(math.floor(spec.hi)))
                out[spec.name] = n
            else:
                out[spec.name] = float(value)
        return out

    def with_bounds(self, name: str, lo=None, hi=None) -> "SpaceSpec":
        if name not in self.index:
            raise UnknownVariable(name)
        new = []
        for v in self.variables:
            if v.name == name:
                v = replace(
                    v,
                    lo=v.lo if lo is None else float(lo),
                    hi=v.hi if hi is None else float(hi),
                )
            new.append(v)
        return SpaceSpec(new)

    def fields(self) -> list[tuple[str, float, float, bool, bool]]:
        """Stable tuple form, used by checkpoint serialization."""
        return [(v.name, v.lo, v.hi, v.integer, v.angle) for v in self.variables]

    @classmethod
    def from_fields(cls, fields: Sequence[tuple]) -> "SpaceSpec":
        return cls(
            VariableSpec(str(n), float(lo), float(hi), bool(i), bool(a))
            for n, lo, hi, i, a in fields
        )


def condition_space() -> SpaceSpec:
    a65 = math.radians(65.0)
    a75 = math.radians(75.0)
    specs = [
        VariableSpec("C", 0.5, 2.0),
        VariableSpec("psi", -a65, a65, angle=True),
        VariableSpec("theta_le", -a75, a75, angle=True),
        VariableSpec("theta_te", -a75, a75, angle=True),
        VariableSpec("d_le", 0.15, 0.7),
        VariableSpec("d_te", 0.15, 0.7),
        VariableSpec("rho_le", 0.002, 0.03),
        VariableSpec("rho_te", 0.002, 0.03),
    ]
    specs += [VariableSpec(f"t_u{k}", 0.005, 0.12) for k in range(1, 7)]
    specs += [VariableSpec(f"t_l{k}", 0.005, 0.12) for k in range(1, 7)]
    specs += [
        VariableSpec("pitch", 0.3, 1.0),
        VariableSpec("x_in", 0.0, 1.0),
        VariableSpec("x_out", 0.0, 1.0),
        VariableSpec("n_o", 10000, 50000, integer=True),
        VariableSpec("dn1", 2e-5, 2e-4),
    ]
    return SpaceSpec(specs)


def decision_space() -> SpaceSpec:
    return SpaceSpec(
        [
            VariableSpec("y_in", -0.5, 0.5),
            VariableSpec("y_out", -0.5, 0.5),
            VariableSpec("alpha_camber", 0.0, 1.0),
            VariableSpec("beta_in", 0.1, 0.9),
            VariableSpec("beta_out", 0.1, 0.9),
            VariableSpec("n_t", 100, 1000, integer=True),
            VariableSpec("gamma_le", 0.0, 5.0),
            VariableSpec("gamma_te", 0.0, 5.0),
        ]
    )


def blade_from_values(values: Mapping) -> BladeShapeParams:
    """Blade at the origin from chord-relative condition values."""
    c = float(values["C"])
    return BladeShapeParams(
        x_le=0.0,
        y_le=0.0,
        chord=c,
        psi=float(values["psi"]),
        theta_le=float(values["theta_le"]),
        theta_te=float(values["theta_te"]),
        d_le=float(values["d_le"]),
        d_te=float(values["d_te"]),
        rho_le=float(values["rho_le"]) * c,
        rho_te=float(values["rho_te"]) * c,
        t_upper=np.array([float(values[f"t_u{k}"]) for k in range(1, 7)]) * c,
        t_lower=np.array([float(values[f"t_l{k}"]) for k in range(1, 7)]) * c,
    )


def condition_from_values(values: Mapping) -> PassageCondition:
    c = float(values["C"])
    return PassageCondition(
        bsp=blade_from_values(values),
        pitch=float(values["pitch"]) * c,
        x_in=float(values["x_in"]) * c,
        x_out=float(values["x_out"]) * c,
        n_o=int(values["n_o"]),
        dn1=float(values["dn1"]) * c,
    )


def condition_values(cond: PassageCondition) -> dict[str, float | int]:
    """Chord-relative values of a physical condition (position dropped)."""
    b = cond.bsp
    c = b.chord
    out: dict[str, float | int] = {
        "C": c,
        "psi": b.psi,
        "theta_le": b.theta_le,
        "theta_te": b.theta_te,
        "d_le": b.d_le,
        "d_te": b.d_te,
        "rho_le": b.rho_le / c,
        "rho_te": b.rho_te / c,
        "pitch": cond.pitch / c,
        "x_in": cond.x_in / c,
        "x_out": cond.x_out / c,
        "n_o": int(cond.n_o),
        "dn1": cond.dn1 / c,
    }
    for k in range(6):
        out[f"t_u{k + 1}"] = b.t_upper[k] / c
        out[f"t_l{k + 1}"] = b.t_lower[k] / c
    return out


def meshing_params_from_values(values: Mapping, chord: float) -> MeshingParams:
    return MeshingParams(
        y_in=float(values["y_in"]) * chord,
        y_out=float(values["y_out"]) * chord,
        alpha_camber=float(values["alpha_camber"]),
        beta_in=float(values["beta_in"]),
        beta_out=float(values["beta_out"]),
        n_t=int(values["n_t"]),
        gamma_le=float(values["gamma_le"]),
        gamma_te=float(values["gamma_te"]),
    )


def projection_extrema(profile: BladeProfile, min_prominence: float = 0.0) -> int:
    """Strict local extrema of the surface projected across the chord.

    The projection axis is perpendicular to the camber endpoints' chord
    line. The two sides of the loop (split at the LE and TE points) are
    counted separately: a cambered section has one crest per side, while
    a full-loop cyclic count would register four extrema on any such
    section (the crests plus one dip per rounded edge) and reject it.
    Extrema with topographic prominence below min_prominence are
    skipped; edge rounding produces real but shallow dips near the split
    points that are rounding geometry, not shape features. A clean blade
    counts at most two.
    """
    cam = profile.camber.points
    t = cam[-1] - cam[0]
    n = np.array([-t[1], t[0]])
    nn = float(np.linalg.norm(n))
    if nn == 0.0:
        return profile.surface.points.shape[0]
    proj = profile.surface.points @ (n / nn)
    le, te = profile.le_index, profile.te_index
    lo, hi = (te, le) if te < le else (le, te)
    chains = (proj[lo : hi + 1], np.concatenate([proj[hi:], proj[: lo + 1]]))
    return sum(_prominent_extrema(c, min_prominence) for c in chains)


def _prominent_extrema(values: NDArray[np.float64], min_prominence: float) -> int:
    """Interior extrema of an open sequence with prominence >= threshold.

    Prominence of a maximum is its height over the higher of the two
    bases reached before the sequence climbs above it again (minima are
    measured on the negated sequence).
    """
    v = values[np.concatenate(([True], np.diff(values) != 0.0))]
    if v.size < 3:
        return 0
    s = np.sign(np.diff(v))
    flips = np.flatnonzero(s[1:] != s[:-1]) + 1
    count = 0
    for i in flips:
        w = v if s[i - 1] > 0 else -v
        peak = w[i]
        left = w[:i][::-1]
        right = w[i + 1 :]
        higher_l = np.flatnonzero(left > peak)
        higher_r = np.flatnonzero(right > peak)
        lbase = left[: higher_l[0] + 1].min() if higher_l.size else left.min()
        rbase = right[: higher_r[0] + 1].min() if higher_r.size else right.min()
        if peak - max(lbase, rbase) >= min_prominence:
            count += 1
    return count


def sample_condition(
    space: SpaceSpec,
    rng: np.random.Generator,
    n_profile: int = 1024,
    max_rejects: int = 1000,
) -> tuple[PassageCondition, NDArray[np.float64]]:
    """Draw a buildable condition; returns it with its unit-space state.

    Draws are rejected when the blade shape does not build or when its
    cross-chord projection has more than two prominent local extrema
    (prominence threshold: twice the larger edge radius, the scale of
    the rounding dips a clean section already carries). Raises
    SamplingExhausted after ``max_rejects`` consecutive rejections.
    """
    rejects = 0
    while True:
        values = space.sample(rng)
        try:
            cond = condition_from_values(values)
            cond.validate()
            profile = build_profile(cond.bsp, n_samples=n_profile)
        except InvalidShape:
            rejects += 1
            if rejects >= max_rejects:
                raise SamplingExhausted(
                    f"no buildable blade in {max_rejects} consecutive draws"
                ) from None
            continue
        rho = 2.0 * max(cond.bsp.rho_le, cond.bsp.rho_te)
        if projection_extrema(profile, min_prominence=rho) > 2:
            rejects += 1
            if rejects >= max_rejects:
                raise SamplingExhausted(
                    f"no buildable blade in {max_rejects} consecutive draws"
                )
            continue
        return cond, space.to_unit(values)


def apply_space_file(
    path: str, cond: SpaceSpec, dec: SpaceSpec
) -> tuple[SpaceSpec, SpaceSpec]:
    """Apply ``name.min = v`` / ``name.max = v`` overrides from a file.

    Variable names are looked up in both spaces (they do not overlap).
    Angle bounds are given in degrees. Unknown names or inverted bounds
    raise ConfigError naming the file.
    """
    raw = parse_kv_file(path)
    pending: dict[tuple[int, str], dict[str, float]] = {}
    for key, value in raw.items():
        base, dot, attr = key.rpartition(".")
        if dot != "." or attr not in ("min", "max"):
            raise ConfigError(path, f"expected name.min or name.max, got {key!r}")
        if base in cond.index:
            which, spec = 0, cond[base]
        elif base in dec.index:
            which, spec = 1, dec[base]
        else:
            raise ConfigError(path, f"unknown variable {base!r}")
        if spec.angle:
            value = math.radians(value)
        pending.setdefault((which, base), {})[attr] = value

    for (which, base), bounds in pending.items():
        space = cond if which == 0 else dec
        updated = space.with_bounds(
            base, lo=bounds.get("min"), hi=bounds.get("max")
        )
        lo, hi = updated[base].lo, updated[base].hi
        if lo > hi:
            raise ConfigError(path, f"{base}: min exceeds max")
        if which == 0:
            cond = updated
        else:
            dec = updated
    return cond, dec
