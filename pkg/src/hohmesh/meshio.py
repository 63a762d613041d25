"""Mesh file formats: legacy VTK structured grids and 2-D Plot3D.

VTK output writes one STRUCTURED_GRID file per block (ASCII, double
precision, z = 0, no seam duplication: the O-block keeps its in-memory
ni) plus a small plain-text index listing ``role filename ni nj`` per
block. Plot3D output is a single whitespace ASCII multiblock file: a
block count line, one ``ni nj`` line per block, then for each block all
x values followed by all y values, i fastest. Numbers are written with
17 significant digits so a write/read round trip is bit-identical.

Both formats carry provenance as leading ``#`` comment lines (and the
VTK title line): tool version, seed, condition hash, block roles, and
pitch. No timestamps, so identical inputs give identical bytes. Readers
skip comments; the roles and pitch let a mesh read back from disk be
reassembled (interface pieces and periodic pairs recovered by matching
shared nodes) and re-scored exactly as the in-memory original.
"""

from __future__ import annotations

import hashlib
import os

import numpy as np
from numpy.typing import NDArray

from .errors import ConfigError, InterfaceMismatch
from .hblocks import MultiblockMesh
from .ogrid import StructuredBlock
from .passage import PassageCondition
from .spaces import condition_space, condition_values

__all__ = [
    "condition_hash",
    "provenance_tokens",
    "write_vtk",
    "read_vtk",
    "write_plot3d",
    "read_plot3d",
    "assemble_mesh",
    "read_mesh",
    "write_report",
]

_FMT = "%.17g"


def condition_hash(cond: PassageCondition) -> str:
    """Short stable digest of the condition's chord-relative values."""
    values = condition_values(cond)
    names = condition_space().names
    joined = ",".join(_FMT % float(values[n]) for n in names)
    return hashlib.sha256(joined.encode("ascii")).hexdigest()[:16]


def provenance_tokens(
    tool_version: str, seed: int | None = None,
    cond: PassageCondition | None = None,
) -> dict[str, str]:
    tokens = {"version": tool_version or "0"}
    if seed is not None:
        tokens["seed"] = str(seed)
    if cond is not None:
        tokens["condition"] = condition_hash(cond)
    return tokens


def _meta_line(tokens: dict[str, str]) -> str:
    return "hohmesh " + " ".join(f"{k}={v}" for k, v in tokens.items())


def _parse_meta(comment: str, meta: dict[str, str]) -> None:
    for tok in comment.split():
        if "=" in tok:
            key, _, value = tok.partition("=")
            meta[key] = value


def _grid_lines(coords: NDArray[np.float64]) -> list[str]:
    """Flatten to text values, i fastest, in fixed-width groups."""
    ni, nj = coords.shape[:2]
    out = []
    for comp in range(2):
        flat = coords[:, :, comp].T.reshape(-1)
        for lo in range(0, flat.size, 6):
            out.append(" ".join(_FMT % v for v in flat[lo : lo + 6]))
    return out


# -- VTK ----------------------------------------------------------------


def _vtk_block_text(block: StructuredBlock, title: str) -> str:
    ni, nj = block.ni, block.nj
    lines = [
        "# vtk DataFile Version 3.0",
        title[:255],
        "ASCII",
        "DATASET STRUCTURED_GRID",
        f"DIMENSIONS {ni} {nj} 1",
        f"POINTS {ni * nj} double",
    ]
    c = block.coords
    for j in range(nj):
        for i in range(ni):
            lines.append(f"{_FMT % c[i, j, 0]} {_FMT % c[i, j, 1]} 0")
    return "\n".join(lines) + "\n"


def _strip_suffix(path: str, suffixes: tuple[str, ...]) -> str:
    for s in suffixes:
        if path.endswith(s):
            return path[: -len(s)]
    return path


def write_vtk(
    mesh: MultiblockMesh, path: str, tokens: dict[str, str] | None = None
) -> str:
    """Write per-block VTK files plus the index; returns the index path.

    ``path`` may end in .vtk or .index; block files are placed next to
    it as ``<base>.<role>.vtk``.
    """
    tokens = dict(tokens or {})
    tokens["blocks"] = ",".join(role for role, _ in mesh.roles)
    tokens["pitch"] = _FMT % mesh.pitch
    meta = _meta_line(tokens)

    base = _strip_suffix(path, (".index", ".vtk"))
    index_path = base + ".index"
    lines = [f"# {meta}"]
    for role, block in mesh.roles:
        block_path = f"{base}.{role}.vtk"
        with open(block_path, "w") as fh:
            fh.write(_vtk_block_text(block, f"{meta} role={role}"))
        lines.append(
            f"{role} {os.path.basename(block_path)} {block.ni} {block.nj}"
        )
    with open(index_path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    return index_path


def _read_vtk_points(path: str) -> NDArray[np.float64]:
    with open(path) as fh:
        lines = fh.read().splitlines()
    dims = None
    n_points = None
    start = None
    for k, line in enumerate(lines):
        parts = line.split()
        if parts[:1] == ["DIMENSIONS"]:
            dims = (int(parts[1]), int(parts[2]), int(parts[3]))
        elif parts[:1] == ["POINTS"]:
            n_points = int(parts[1])
            start = k + 1
            break
    if dims is None or start is None:
        raise ConfigError(path, "not a structured-grid VTK file")
    if dims[2] != 1:
        raise ConfigError(path, "expected a planar grid (nk = 1)")
    values = " ".join(lines[start:]).split()
    if len(values) < 3 * n_points:
        raise ConfigError(path, "truncated VTK point data")
    arr = np.array(values[: 3 * n_points], dtype=float).reshape(n_points, 3)
    ni, nj = dims[0], dims[1]
    coords = np.empty((ni, nj, 2))
    coords[:, :, 0] = arr[:, 0].reshape(nj, ni).T
    coords[:, :, 1] = arr[:, 1].reshape(nj, ni).T
    return coords


def read_vtk(path: str):
    """Read an index file and its block files.

    Returns (arrays, roles, meta) where arrays are (ni, nj, 2) blocks in
    index order.
    """
    index_path = path
    if not os.path.exists(index_path):
        alt = _strip_suffix(path, (".vtk",)) + ".index"
        if os.path.exists(alt):
            index_path = alt
        else:
            raise ConfigError(path, "mesh index file not found")
    meta: dict[str, str] = {}
    arrays = []
    roles = []
    folder = os.path.dirname(os.path.abspath(index_path))
    with open(index_path) as fh:
        for raw in fh:
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                _parse_meta(line[1:], meta)
                continue
            parts = line.split()
            if len(parts) != 4:
                raise ConfigError(
                    index_path, f"bad index line: {line!r}"
                )
            role, fname, ni, nj = parts
            coords = _read_vtk_points(os.path.join(folder, fname))
            if coords.shape[:2] != (int(ni), int(nj)):
                raise ConfigError(
                    index_path,
                    f"{fname}: dimensions {coords.shape[:2]} do not match "
                    f"the index entry {(int(ni), int(nj))}",
                )
            roles.append(role)
            arrays.append(coords)
    if not arrays:
        raise ConfigError(index_path, "index lists no blocks")
    return arrays, roles, meta


# -- Plot3D ---------------------------------------------------------------


def write_plot3d(
    mesh: MultiblockMesh, path: str, tokens: dict[str, str] | None = None
) -> str:
    """Write the whole mesh as one 2-D multiblock Plot3D file."""
    tokens = dict(tokens or {})
    tokens["blocks"] = ",".join(role for role, _ in mesh.roles)
    tokens["pitch"] = _FMT % mesh.pitch
    lines = [f"# {_meta_line(tokens)}"]
    blocks = mesh.blocks
    lines.append(str(len(blocks)))
    for b in blocks:
        lines.append(f"{b.ni} {b.nj}")
    for b in blocks:
        lines.extend(_grid_lines(b.coords))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


def read_plot3d(path: str):
    """Read a 2-D multiblock Plot3D file written by this package.

    Returns (arrays, roles, meta); roles is None when the comment
    metadata does not name the blocks.
    """
    meta: dict[str, str] = {}
    tokens: list[str] = []
    try:
        with open(path) as fh:
            for raw in fh:
                line = raw.strip()
                if not line:
                    continue
                if line.startswith("#"):
                    _parse_meta(line[1:], meta)
                    continue
                tokens.extend(line.split())
    except OSError as exc:
        raise ConfigError(path, f"cannot read mesh: {exc}") from exc
    if not tokens:
        raise ConfigError(path, "empty mesh file")
    try:
        pos = 0
        nblocks = int(tokens[pos])
        pos += 1
        dims = []
        for _ in range(nblocks):
            dims.append((int(tokens[pos]), int(tokens[pos + 1])))
            pos += 2
        arrays = []
        for ni, nj in dims:
            n = ni * nj
            coords = np.empty((ni, nj, 2))
            for comp in range(2):
                vals = np.array(tokens[pos : pos + n], dtype=float)
                if vals.size < n:
                    raise ConfigError(path, "truncated mesh file")
                coords[:, :, comp] = vals.reshape(nj, ni).T
                pos += n
            arrays.append(coords)
    except (ValueError, IndexError) as exc:
        raise ConfigError(path, f"malformed mesh file: {exc}") from exc
    roles = meta["blocks"].split(",") if "blocks" in meta else None
    return arrays, roles, meta


# -- reassembly -----------------------------------------------------------


def _match_column(
    outer: NDArray[np.float64], column: NDArray[np.float64], what: str
) -> NDArray[np.int_]:
    """Ring indices of outer-boundary nodes equal to the given column."""
    lookup = {outer[i].tobytes(): i for i in range(outer.shape[0])}
    idx = np.empty(column.shape[0], dtype=int)
    scale = max(float(np.max(np.abs(outer))), 1e-300)
    for row in range(column.shape[0]):
        key = column[row].tobytes()
        if key in lookup:
            idx[row] = lookup[key]
            continue
        d = np.linalg.norm(outer - column[row], axis=1)
        k = int(np.argmin(d))
        if d[k] > 1e-9 * scale:
            raise InterfaceMismatch(
                f"{what} interface row {row} matches no O-block node"
            )
        idx[row] = k
    return idx


def assemble_mesh(
    arrays: list[NDArray[np.float64]],
    roles: list[str],
    pitch: float,
) -> MultiblockMesh:
    """Rebuild a MultiblockMesh from raw block arrays.

    The O-block is marked periodic in i; interface pieces and periodic
    wall pairs are recovered from shared-node matching so quality
    evaluation of a mesh read from disk reproduces the original scores.
    """
    if len(arrays) != len(roles):
        raise ValueError("one role per block required")
    by_role = dict(zip(roles, arrays))
    if "o" not in by_role:
        raise InterfaceMismatch("mesh has no O-block")
    unknown = set(roles) - {"o", "inlet", "outlet"}
    if unknown:
        raise InterfaceMismatch(f"unknown block roles: {sorted(unknown)}")

    o_coords = by_role["o"]
    outer = o_coords[:, -1, :]
    ni = o_coords.shape[0]

    inlet = outlet = None
    pieces: dict[str, NDArray[np.int_]] = {
        "left": np.empty(0, dtype=int),
        "right": np.empty(0, dtype=int),
    }
    corner: list[int] = []
    if "inlet" in by_role:
        c = by_role["inlet"]
        pairs = np.stack([np.arange(c.shape[0]), np.arange(c.shape[0])], axis=1)
        inlet = StructuredBlock(coords=c, wrap=False, periodic_pairs=pairs)
        pieces["left"] = _match_column(outer, c[-1], "inlet")
        corner += [int(pieces["left"][0]), int(pieces["left"][-1])]
    if "outlet" in by_role:
        c = by_role["outlet"]
        pairs = np.stack([np.arange(c.shape[0]), np.arange(c.shape[0])], axis=1)
        outlet = StructuredBlock(coords=c, wrap=False, periodic_pairs=pairs)
        pieces["right"] = _match_column(outer, c[0], "outlet")
        corner += [int(pieces["right"][0]), int(pieces["right"][-1])]

    # periodic walls: nodes whose +pitch image is another outer node
    tol = 1e-9 * max(abs(pitch), 1.0)
    shifted = outer + np.array([0.0, pitch])
    taken = set(corner)
    lower, upper = [], []
    for i in range(ni):
        if i in taken:
            continue
        d = np.linalg.norm(outer - shifted[i], axis=1)
        k = int(np.argmin(d))
        if d[k] <= tol and k not in taken and k != i:
            lower.append(i)
            upper.append(k)
            taken.add(i)
            taken.add(k)
    order = np.argsort([outer[i, 0] for i in lower], kind="stable")
    lower_arr = np.array(lower, dtype=int)[order]
    upper_arr = np.array(upper, dtype=int)[order]
    pieces["lower"] = lower_arr
    pieces["upper"] = upper_arr

    head = []
    if len(corner) == 4:
        lb, lt, rb, rt = corner
        head = [(lb, lt), (rb, rt)]
    pairs = np.array(
        head + list(zip(lower_arr.tolist(), upper_arr.tolist())), dtype=int
    ).reshape(-1, 2)
    o_block = StructuredBlock(
        coords=o_coords, wrap=True, periodic_pairs=pairs, pieces=pieces
    )
    return MultiblockMesh(
        o_block=o_block, inlet=inlet, outlet=outlet, pitch=pitch
    )


def read_mesh(path: str) -> tuple[MultiblockMesh, dict[str, str]]:
    """Read and reassemble a mesh file in either format."""
    with open(path, "rb") as fh:
        head = fh.read(64)
    if head.startswith(b"# vtk DataFile"):
        raise ConfigError(
            path, "this is a single VTK block; pass the mesh index file"
        )
    ext = os.path.splitext(path)[1].lower()
    if ext in (".index", ".vtk") or b".vtk" in head:
        arrays, roles, meta = read_vtk(path)
    else:
        arrays, roles, meta = read_plot3d(path)
        if roles is None:
            if len(arrays) == 1:
                roles = ["o"]
            else:
                raise ConfigError(
                    path, "mesh metadata does not name the block roles"
                )
    if "pitch" not in meta:
        raise ConfigError(path, "mesh metadata carries no pitch")
    pitch = float(meta["pitch"])
    return assemble_mesh(arrays, roles, pitch), meta


# -- reports ---------------------------------------------------------------


def write_report(path: str, report, tokens: dict[str, str] | None = None) -> None:
    """Quality report as JSON with provenance under the _provenance key."""
    extra = {"_provenance": tokens} if tokens else None
    with open(path, "w") as fh:
        fh.write(report.to_json(extra))
