"""Splice the capacity-weighted corner solve into _pin_corners_and_pair."""
NEW = '''
def _corner_offsets(
    p: NDArray[np.float64], n: int
) -> tuple[int, int, int, int]:
    """Choose integer corner ring positions with paired periodic spans.

    p holds the fractional ring positions of the rb, lb, lt, rt corner
    arcs in ring order, unrolled (strictly increasing, p[3] < p[0] + n).
    The lower span (rb to lb) must equal the upper span (lt to rt), so
    the natural positions are shifted. The shifts solve a least-squares
    balance where each wall absorbs span change in proportion to its
    size, so short walls are not crushed, and the remaining uniform
    rotation is chosen to keep total node displacement smallest.
    """
    s = np.array([p[1] - p[0], p[2] - p[1], p[3] - p[2], p[0] + n - p[3]])
    if np.any(s <= 0.0):
        raise InvalidMesh("outer loop corners collapse onto one ring node")
    d_gap = s[0] - s[2]
    lam2 = 2.0 * n * d_gap / ((s[0] + s[2]) * n - d_gap * d_gap)
    beta = lam2 * d_gap / (2.0 * n)
    dens = np.array(
        [beta - 0.5 * lam2, beta, beta + 0.5 * lam2, beta]
    )  # per-wall span change per node: lower, left, upper, right
    u = np.zeros(4)  # corner shifts: rb, lb, lt, rt
    u[1] = u[0] + dens[0] * s[0]
    u[2] = u[1] + dens[1] * s[1]
    u[3] = u[2] + dens[2] * s[2]
    # uniform rotation minimizing summed squared node displacement
    pair_sum = np.array(
        [u[0] + u[1], u[1] + u[2], u[2] + u[3], u[3] + u[0]]
    )
    u -= float(np.sum(s * pair_sum) / (2.0 * np.sum(s)))

    target = p + u
    best = None
    for m0 in _int_window(target[0]):
        for m1 in _int_window(target[1]):
            for m2 in _int_window(target[2]):
                m3 = m2 + (m1 - m0)
                if not m0 < m1 < m2 < m3 < m0 + n:
                    continue
                cost = (
                    (m0 - target[0]) ** 2
                    + (m1 - target[1]) ** 2
                    + (m2 - target[2]) ** 2
                    + (m3 - target[3]) ** 2
                )
                if best is None or cost < best[0]:
                    best = (cost, m0, m1, m2, m3)
    if best is None:
        raise InvalidMesh("periodic walls cannot be paired one to one")
    return best[1], best[2], best[3], best[4]


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

    m0, m1, m2, m3 = _corner_offsets(
        np.array([p_rb, p_lb, p_lt, p_rt]), n
    )
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

    shift = np.array([0.0, outer.pitch])
    if lower.size:
        p_low = 0.5 * (feet[lower] + feet[upper] - shift)
        feet[lower] = p_low
        feet[upper] = p_low + shift

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
'''

import io

path = "src/hohmesh/ogrid.py"
with io.open(path, encoding="utf-8") as fh:
    lines = fh.readlines()

start = next(
    i for i, s in enumerate(lines) if s.startswith("def _pin_corners_and_pair(")
)
end = next(
    i for i, s in enumerate(lines) if s.startswith("def min_cell_area(")
)
out = lines[:start] + [NEW.lstrip("\n"), "\n\n"] + lines[end:]
with io.open(path, "w", encoding="utf-8") as fh:
    fh.writelines(out)
print("spliced", start, end)
