"""Exact horizontal placement of a single coverage center over classed users.

A center covers user ``i`` iff the user lies within its class radius of the
center, i.e. the center lies in the disc of that radius around the user. The
count-maximizing center is found by enumerating a finite candidate set: every
user position plus every intersection point of the boundary circles around
users. Some optimal point is either interior to a lone disc (any disc center
matches its count) or on the boundary of at least two discs (a pairwise
intersection point attains the same count), so the enumeration is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import InputError

#: Relative slack on disc membership, so candidates constructed on two circle
#: boundaries still count both defining users despite rounding.
GEOM_SLACK = 1e-6

#: Cap on candidate-or-grid points scored per vectorized block.
_BLOCK_POINTS = 262_144

RadiusMap = Mapping[int, float]


@dataclass(frozen=True)
class User:
    """Ground user: planar position in meters plus QoS class membership."""

    x_m: float
    y_m: float
    class_id: int


@dataclass(frozen=True)
class PlacementSolution:
    """A center with the per-user coverage flags it induces."""

    x_d_m: float
    y_d_m: float
    covered_flags: tuple[bool, ...]
    covered_count: int

    def __post_init__(self) -> None:
        if self.covered_count != sum(self.covered_flags):
            raise InputError("covered_count must equal the number of set flags")


def _user_arrays(users: Sequence[User], radius_map: RadiusMap):
    pts = np.empty((len(users), 2), dtype=float)
    radii = np.empty(len(users), dtype=float)
    for i, u in enumerate(users):
        try:
            radii[i] = radius_map[u.class_id]
        except KeyError:
            raise InputError(f"user {i} references unknown class id {u.class_id}") from None
        pts[i, 0] = u.x_m
        pts[i, 1] = u.y_m
    if len(users) and not (np.all(np.isfinite(radii)) and np.all(radii >= 0.0)):
        raise InputError("all radii must be finite and >= 0")
    return pts, radii


def evaluate_center(
    x_m: float, y_m: float, users: Sequence[User], radius_map: RadiusMap
) -> PlacementSolution:
    """Coverage flags and count induced by placing the center at (x_m, y_m)."""
    pts, radii = _user_arrays(users, radius_map)
    d2 = (pts[:, 0] - x_m) ** 2 + (pts[:, 1] - y_m) ** 2
    flags = d2 <= (radii * (1.0 + GEOM_SLACK)) ** 2
    return PlacementSolution(
        x_d_m=float(x_m),
        y_d_m=float(y_m),
        covered_flags=tuple(bool(f) for f in flags),
        covered_count=int(flags.sum()),
    )


def circle_intersections(c1, r1: float, c2, r2: float):
    """Intersection points of two circle boundaries: (), (p,) or (p1, p2).

    Concentric, disjoint, and strictly nested circles yield no points;
    tangency yields one.
    """
    if r1 < 0.0 or r2 < 0.0:
        raise InputError("circle radii must be >= 0")
    x1, y1 = c1
    x2, y2 = c2
    dx, dy = x2 - x1, y2 - y1
    d2 = dx * dx + dy * dy
    if d2 == 0.0:
        return ()
    d = math.sqrt(d2)
    if d > r1 + r2 or d < abs(r1 - r2):
        return ()
    along = (r1 * r1 - r2 * r2 + d2) / (2.0 * d)
    h2 = r1 * r1 - along * along
    if h2 < 0.0:  # only reachable through rounding at near-tangency
        h2 = 0.0
    bx = x1 + along * dx / d
    by = y1 + along * dy / d
    if h2 == 0.0:
        return ((bx, by),)
    h = math.sqrt(h2)
    ux, uy = -dy / d, dx / d
    return ((bx + h * ux, by + h * uy), (bx - h * ux, by - h * uy))


def _pairwise_intersections(pts: np.ndarray, radii: np.ndarray) -> np.ndarray:
    n = len(pts)
    if n < 2:
        return np.empty((0, 2), dtype=float)
    iu, ju = np.triu_indices(n, k=1)
    c1, c2 = pts[iu], pts[ju]
    r1, r2 = radii[iu], radii[ju]
    dvec = c2 - c1
    d2 = np.einsum("ij,ij->i", dvec, dvec)
    d = np.sqrt(d2)
    ok = (d > 0.0) & (d <= r1 + r2) & (d >= np.abs(r1 - r2))
    if not ok.any():
        return np.empty((0, 2), dtype=float)
    c1, dvec, d2, d = c1[ok], dvec[ok], d2[ok], d[ok]
    r1, r2 = r1[ok], r2[ok]
    along = (r1 * r1 - r2 * r2 + d2) / (2.0 * d)
    h = np.sqrt(np.maximum(r1 * r1 - along * along, 0.0))
    base = c1 + (along / d)[:, None] * dvec
    perp = np.column_stack((-dvec[:, 1], dvec[:, 0])) / d[:, None]
    return np.concatenate((base + h[:, None] * perp, base - h[:, None] * perp))


def _count_block(block: np.ndarray, pts: np.ndarray, eff2: np.ndarray) -> np.ndarray:
    d2 = (block[:, None, 0] - pts[None, :, 0]) ** 2 + (block[:, None, 1] - pts[None, :, 1]) ** 2
    return (d2 <= eff2[None, :]).sum(axis=1)


def solve_exact(users: Sequence[User], radius_map: RadiusMap) -> PlacementSolution:
    """Center achieving the true maximum covered count.

    Scores every user position and every pairwise boundary intersection; among
    count ties, returns the lexicographically smallest (x, y) so results are
    reproducible regardless of evaluation order.
    """
    if not users:
        raise InputError("at least one user is required")
    pts, radii = _user_arrays(users, radius_map)
    cands = np.concatenate((pts, _pairwise_intersections(pts, radii)))
    eff2 = (radii * (1.0 + GEOM_SLACK)) ** 2

    block_rows = max(1, _BLOCK_POINTS // max(1, len(users)))
    best_count = -1
    best_xy = (math.inf, math.inf)
    for start in range(0, len(cands), block_rows):
        block = cands[start : start + block_rows]
        counts = _count_block(block, pts, eff2)
        top = int(counts.max())
        if top < best_count:
            continue
        sel = block[counts == top]
        k = np.lexsort((sel[:, 1], sel[:, 0]))[0]
        xy = (float(sel[k, 0]), float(sel[k, 1]))
        if top > best_count or xy < best_xy:
            best_count, best_xy = top, xy
    return evaluate_center(best_xy[0], best_xy[1], users, radius_map)


def grid_oracle(
    users: Sequence[User],
    radius_map: RadiusMap,
    step: float,
    bounds,
) -> PlacementSolution:
    """Best center over a regular grid spanning ``bounds`` = (x0, y0, x1, y1).

    Exhaustive but resolution-limited: the returned count lower-bounds the
    true optimum. Ties resolve to the lexicographically smallest grid point.
    """
    if not step > 0.0:
        raise InputError(f"grid step must be positive, got {step}")
    x0, y0, x1, y1 = (float(v) for v in bounds)
    if x1 < x0 or y1 < y0:
        raise InputError("bounds must satisfy x1 >= x0 and y1 >= y0")
    pts, radii = _user_arrays(users, radius_map)
    eff2 = (radii * (1.0 + GEOM_SLACK)) ** 2

    # Half-step tolerance keeps the far edge in the grid when it divides evenly.
    nx = int(math.floor((x1 - x0) / step + 1e-9)) + 1
    ny = int(math.floor((y1 - y0) / step + 1e-9)) + 1
    ys = y0 + step * np.arange(ny)

    best_count = -1
    best_xy = (x0, y0)
    rows_per_block = max(1, _BLOCK_POINTS // ny)
    for rstart in range(0, nx, rows_per_block):
        xs = x0 + step * np.arange(rstart, min(rstart + rows_per_block, nx))
        block = np.column_stack(
            (np.repeat(xs, ny), np.tile(ys, len(xs)))
        )  # lexicographic scan order
        counts = _count_block(block, pts, eff2)
        top = int(counts.max()) if len(counts) else -1
        if top > best_count:
            k = int(np.argmax(counts))  # first hit = lexicographically smallest
            best_count = top
            best_xy = (float(block[k, 0]), float(block[k, 1]))
    return evaluate_center(best_xy[0], best_xy[1], users, radius_map)


def export_bigm_model(
    users: Sequence[User], radius_map: RadiusMap, bounds=None
) -> str:
    """Plain-text big-M model of the placement problem, for external solvers.

    One ``dist`` line per user encodes
    ``sqrt((x_u - x)^2 + (y_u - y)^2) <= radius + M * (1 - u_<id>)`` with
    binary ``u_<id>``; the objective is to maximize the sum of the binaries.
    ``M`` is the bounds-rectangle diagonal plus the largest radius, the
    smallest trivially safe constant. Default bounds: the user bounding box
    inflated by the largest radius.
    """
    if not users:
        raise InputError("at least one user is required")
    pts, radii = _user_arrays(users, radius_map)
    rmax = float(radii.max())
    if bounds is None:
        bounds = (
            float(pts[:, 0].min()) - rmax,
            float(pts[:, 1].min()) - rmax,
            float(pts[:, 0].max()) + rmax,
            float(pts[:, 1].max()) + rmax,
        )
    x0, y0, x1, y1 = (float(v) for v in bounds)
    big_m = math.hypot(x1 - x0, y1 - y0) + rmax
    lines = [
        "# single-center max-coverage model (big-M form)",
        "# variables: center (x, y) within the bounds below; one binary u_<id> per user",
        "# objective: maximize sum of u_<id>",
        "# dist <user_id> <x_u> <y_u> <radius> <M> encodes:",
        "#   sqrt((x_u - x)^2 + (y_u - y)^2) <= radius + M * (1 - u_<id>)",
        f"bounds x {x0!r} {x1!r}",
        f"bounds y {y0!r} {y1!r}",
    ]
    lines.extend(
        f"dist {i} {float(pts[i, 0])!r} {float(pts[i, 1])!r} {float(radii[i])!r} {big_m!r}"
        for i in range(len(users))
    )
    return "\n".join(lines) + "\n"
