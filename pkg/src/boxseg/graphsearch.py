"""Graph-search boundary refinement of one rough component.

The rough boundary is resampled into a cyclic sequence of columns normal to
it; each column samples candidate boundary nodes; node costs are negative
directional-gradient magnitudes; dynamic programming finds the globally
minimal closed path under a node-index smoothness constraint.  Annotation
constraints enter as node admissibility: nodes outside the annotated box,
outside the component's domain cell, or outside the image are excluded, and
the columns nearest the four extreme points are forced to a single node.
"""

from __future__ import annotations

import csv
import logging
import math
import os
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage
from skimage.measure import find_contours

from .errors import (
    DegenerateBoundary,
    EmptyMask,
    Infeasible,
    NoComponents,
    SelfIntersecting,
    TopologyChanged,
)
from .geometry import TiltedBox
from .segmenter import EIGHT_CONNECTED, InstanceMask, RoughSegmentation

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class GsConfig:
    n_columns: int = 120
    nodes_per_column: int = 61
    column_half_length: float | None = None  # None: 0.5*sqrt(area/pi), clamped to [5, 40]
    smoothness_delta: int = 2
    exclusion_cost: float = 1e6
    inclusion_bonus: float = -1e6

    def __post_init__(self):
        if self.n_columns < 8:
            raise ValueError("n_columns must be >= 8")
        if self.nodes_per_column < 3 or self.nodes_per_column % 2 == 0:
            raise ValueError("nodes_per_column must be odd and >= 3")
        if self.smoothness_delta < 1:
            raise ValueError("smoothness_delta must be >= 1")

    def half_length_for(self, area: int) -> float:
        if self.column_half_length is not None:
            return float(self.column_half_length)
        return float(np.clip(0.5 * math.sqrt(area / math.pi), 5.0, 40.0))


@dataclass
class DomainCell:
    """Per-pixel owner component id; the generalized Voronoi partition of
    the rough components (cell borders lie on the inter-object medial axis)."""

    owner: np.ndarray  # int32, HxW


@dataclass
class ColumnGraph:
    """Resampled boundary-normal columns with node costs and constraints.

    Node j of column i sits at bases[i] + (j - (m-1)/2) * step * normals[i].
    `forced_node[i]` is -1 for unconstrained columns; a forced column has
    exactly one admissible node.
    """

    bases: np.ndarray       # (N, 2) x,y
    normals: np.ndarray     # (N, 2) outward unit normals
    nodes: np.ndarray       # (N, M, 2)
    cost: np.ndarray        # (N, M) float64
    excluded: np.ndarray    # (N, M) bool
    forced_node: np.ndarray  # (N,) int, -1 = free
    step: float
    smoothness_delta: int
    component_id: int = 0
    warnings: list[str] = field(default_factory=list)

    @property
    def n_columns(self) -> int:
        return self.cost.shape[0]

    @property
    def nodes_per_column(self) -> int:
        return self.cost.shape[1]


@dataclass
class Contour:
    """Closed polyline: one selected node per column, in column order."""

    points: np.ndarray      # (N, 2)
    selections: np.ndarray  # (N,) node index per column
    cost: float
    component_id: int = 0


def compute_domain_cells(seg: RoughSegmentation,
                         image_bounds: tuple[int, int]) -> DomainCell:
    """Assign every pixel to the component with the nearest foreground pixel
    (Euclidean, pixel centers); ties go to the smaller component id."""
    if not seg.components:
        raise NoComponents("domain partition needs at least one component")
    comps = sorted(seg.components, key=lambda c: c.id)
    dists = np.stack(
        [ndimage.distance_transform_edt(~c.mask) for c in comps]
    )
    owner_idx = np.argmin(dists, axis=0)  # first minimum = smallest id
    ids = np.array([c.id for c in comps], dtype=np.int32)
    owner = ids[owner_idx]
    if owner.shape != tuple(image_bounds):
        raise ValueError("component masks do not match image bounds")
    return DomainCell(owner=owner)


def _outer_boundary(mask: np.ndarray) -> np.ndarray:
    """Closed sub-pixel outer contour of a binary mask as (K, 2) x,y points."""
    boundary_px = mask & ~ndimage.binary_erosion(mask)
    if np.count_nonzero(boundary_px) < 8:
        raise DegenerateBoundary("component boundary has fewer than 8 pixels")
    padded = np.pad(mask, 1).astype(float)
    contours = find_contours(padded, 0.5)
    if not contours:
        raise DegenerateBoundary("no boundary contour found")
    longest = max(contours, key=len)
    pts = np.stack([longest[:, 1] - 0.5, longest[:, 0] - 0.5], axis=-1)
    if np.allclose(pts[0], pts[-1]):
        pts = pts[:-1]
    if len(pts) < 8:
        raise DegenerateBoundary("boundary contour too short")
    return pts


def _resample_closed(pts: np.ndarray, n: int) -> np.ndarray:
    """Arc-length-uniform resampling of a closed polyline into n points."""
    closed = np.vstack([pts, pts[:1]])
    seg_len = np.linalg.norm(np.diff(closed, axis=0), axis=1)
    s = np.concatenate([[0.0], np.cumsum(seg_len)])
    total = s[-1]
    targets = np.arange(n) * total / n
    xs = np.interp(targets, s, closed[:, 0])
    ys = np.interp(targets, s, closed[:, 1])
    return np.stack([xs, ys], axis=-1)


def _outward_normals(bases: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Unit normals of a closed base-point ring, oriented away from the mask.

    Tangents are smoothed over a 5-point circular window to keep columns
    from crossing on jagged rasterized boundaries.
    """
    tangents = np.roll(bases, -1, axis=0) - np.roll(bases, 1, axis=0)
    kernel = np.ones(5) / 5.0
    sm = np.stack(
        [np.convolve(np.concatenate([t[-2:], t, t[:2]]), kernel, mode="valid")
         for t in (tangents[:, 0], tangents[:, 1])],
        axis=-1,
    )
    norms = np.linalg.norm(sm, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    sm /= norms
    normals = np.stack([sm[:, 1], -sm[:, 0]], axis=-1)

    # Majority vote: probes one pixel along the normal should leave the mask.
    h, w = mask.shape
    probe = bases + 1.5 * normals
    px = np.floor(probe[:, 0]).astype(int)
    py = np.floor(probe[:, 1]).astype(int)
    valid = (px >= 0) & (px < w) & (py >= 0) & (py < h)
    inside = np.zeros(len(bases), dtype=bool)
    inside[valid] = mask[py[valid], px[valid]]
    if np.count_nonzero(inside) > len(bases) / 2:
        normals = -normals
    return normals


def _point_segment_distance(p: np.ndarray, a: np.ndarray, b: np.ndarray):
    """Distance from point p to segments a[i]-b[i]; returns (dist, t_raw)."""
    ab = b - a
    denom = np.einsum("ij,ij->i", ab, ab)
    denom[denom == 0] = 1.0
    t_raw = np.einsum("ij,ij->i", p[None, :] - a, ab) / denom
    t = np.clip(t_raw, 0.0, 1.0)
    closest = a + t[:, None] * ab
    return np.linalg.norm(closest - p[None, :], axis=1), t_raw


def build_column_graph(
    image: np.ndarray,
    component: InstanceMask,
    box: TiltedBox,
    cell: DomainCell,
    config: GsConfig | None = None,
) -> ColumnGraph:
    """Construct the cyclic column graph for one component.

    Node cost is the negative magnitude of the intensity gradient along the
    column direction (central differences on bilinear samples, spaced one
    node step apart).  Exclusion and extreme-point forcing are materialized
    both as additive costs and as the admissibility mask.
    """
    config = config or GsConfig()
    image = np.asarray(image, dtype=np.float64)
    h, w = image.shape
    n, m = config.n_columns, config.nodes_per_column

    boundary = _outer_boundary(component.mask)
    bases = _resample_closed(boundary, n)
    normals = _outward_normals(bases, component.mask)

    half_len = config.half_length_for(component.area)
    step = 2.0 * half_len / (m - 1)
    offsets = (np.arange(m) - (m - 1) / 2.0) * step
    nodes = bases[:, None, :] + offsets[None, :, None] * normals[:, None, :]

    # One extra sample beyond each column end for the central differences.
    offsets_ext = (np.arange(-1, m + 1) - (m - 1) / 2.0) * step
    sample_pts = bases[:, None, :] + offsets_ext[None, :, None] * normals[:, None, :]
    rows = sample_pts[..., 1].ravel() - 0.5
    cols = sample_pts[..., 0].ravel() - 0.5
    samples = ndimage.map_coordinates(
        image, np.stack([rows, cols]), order=1, mode="nearest"
    ).reshape(n, m + 2)
    grad = (samples[:, 2:] - samples[:, :-2]) / (2.0 * step)
    base_cost = -np.abs(grad)

    px = np.floor(nodes[..., 0]).astype(int)
    py = np.floor(nodes[..., 1]).astype(int)
    in_image = (px >= 0) & (px < w) & (py >= 0) & (py < h)
    excluded = ~in_image
    excluded |= ~box.contains(nodes, tol=1e-6)
    owner_ok = np.zeros((n, m), dtype=bool)
    owner_ok[in_image] = cell.owner[py[in_image], px[in_image]] == component.id
    excluded |= ~owner_ok

    forced = np.full(n, -1, dtype=int)
    warnings: list[str] = []
    seg_a = nodes[:, 0, :]
    seg_b = nodes[:, -1, :]
    for name, p in zip(("top", "bottom", "left", "right"), box.extreme_points):
        p = np.array([p.x, p.y])
        dist, t_raw = _point_segment_distance(p, seg_a, seg_b)
        for col in np.argsort(dist):
            if forced[col] < 0:
                break
        else:  # pragma: no cover - more extreme points than columns
            warnings.append(f"no free column for extreme point {name}")
            continue
        col = int(col)
        node = int(np.argmin(np.linalg.norm(nodes[col] - p[None, :], axis=1)))
        if not 0.0 <= t_raw[col] <= 1.0:
            warnings.append(
                f"extreme point {name} outside column {col} sample range; "
                f"forced node clamped to {node}"
            )
            log.warning(warnings[-1])
        forced[col] = node
        excluded[col, :] = True
        excluded[col, node] = False

    cost = base_cost + config.exclusion_cost * excluded
    is_forced = forced >= 0
    cost[np.nonzero(is_forced)[0], forced[is_forced]] += config.inclusion_bonus

    return ColumnGraph(
        bases=bases,
        normals=normals,
        nodes=nodes,
        cost=cost,
        excluded=excluded,
        forced_node=forced,
        step=step,
        smoothness_delta=config.smoothness_delta,
        component_id=component.id,
        warnings=warnings,
    )


def _window_min(values: np.ndarray, delta: int):
    """Per-target minimum of `values` over source indices within +-delta.

    Ties prefer the smallest index offset, so flat-cost regions yield
    straight paths.  Returns (min values, argmin source indices).
    """
    m = len(values)
    best = np.full(m, np.inf)
    best_idx = np.zeros(m, dtype=int)
    offsets = sorted(range(-delta, delta + 1), key=abs)
    for off in offsets:
        shifted = np.full(m, np.inf)
        if off >= 0:
            shifted[off:] = values[: m - off] if off else values
        else:
            shifted[:off] = values[-off:]
        take = shifted < best
        best[take] = shifted[take]
        best_idx[take] = np.arange(m)[take] - off
    return best, best_idx


def solve_closed_path(graph: ColumnGraph) -> Contour:
    """Globally optimal closed node selection under the cyclic smoothness
    constraint |sel(i+1) - sel(i)| <= delta.

    Anchored at the first forced column when one exists; otherwise the DP
    runs once per possible start node of column 0 and keeps the best
    closure.  Raises Infeasible when the optimum would use an excluded node
    (e.g. forced nodes farther apart than the smoothness allows).
    """
    cost = graph.cost
    n, m = cost.shape
    delta = graph.smoothness_delta
    forced_cols = np.nonzero(graph.forced_node >= 0)[0]
    if forced_cols.size:
        anchor = int(forced_cols[0])
        start_nodes = [int(graph.forced_node[anchor])]
    else:
        anchor = 0
        start_nodes = list(range(m))

    order = [(anchor + i) % n for i in range(n)]
    best_total = np.inf
    best_path: np.ndarray | None = None

    for s in start_nodes:
        dp = np.full(m, np.inf)
        dp[s] = cost[anchor, s]
        parents = np.zeros((n, m), dtype=int)
        for i in range(1, n):
            prev_vals, prev_idx = _window_min(dp, delta)
            dp = cost[order[i]] + prev_vals
            parents[i] = prev_idx
        closure = np.abs(np.arange(m) - s) <= delta
        dp_closed = np.where(closure, dp, np.inf)
        j = int(np.argmin(dp_closed))
        total = dp_closed[j]
        if total < best_total:
            path = np.zeros(n, dtype=int)
            path[n - 1] = j
            for i in range(n - 1, 0, -1):
                path[i - 1] = parents[i, path[i]]
            best_total = float(total)
            best_path = path

    if best_path is None or not np.isfinite(best_total):
        raise Infeasible("no feasible closed path")

    selections = np.zeros(n, dtype=int)
    selections[order] = best_path
    if np.any(graph.excluded[np.arange(n), selections]):
        raise Infeasible("optimal closed path requires an excluded node")

    points = graph.nodes[np.arange(n), selections]
    return Contour(
        points=points,
        selections=selections,
        cost=best_total,
        component_id=graph.component_id,
    )


def _cross(ox, oy, ax, ay, bx, by):
    return (ax - ox) * (by - oy) - (ay - oy) * (bx - ox)


def _self_intersects(pts: np.ndarray) -> bool:
    """Proper-crossing test between all non-adjacent edges of a closed ring."""
    n = len(pts)
    segs = [(pts[i], pts[(i + 1) % n]) for i in range(n)]
    for i in range(n):
        p1, p2 = segs[i]
        for j in range(i + 2, n):
            if i == 0 and j == n - 1:
                continue
            q1, q2 = segs[j]
            d1 = _cross(q1[0], q1[1], q2[0], q2[1], p1[0], p1[1])
            d2 = _cross(q1[0], q1[1], q2[0], q2[1], p2[0], p2[1])
            d3 = _cross(p1[0], p1[1], p2[0], p2[1], q1[0], q1[1])
            d4 = _cross(p1[0], p1[1], p2[0], p2[1], q2[0], q2[1])
            if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)):
                return True
    return False


def rasterize_polygon(pts: np.ndarray, image_bounds: tuple[int, int]) -> np.ndarray:
    """Even-odd rasterization of a closed polygon by the pixel-center test."""
    h, w = image_bounds
    r0 = max(0, int(np.floor(pts[:, 1].min() - 0.5)))
    r1 = min(h - 1, int(np.ceil(pts[:, 1].max())))
    c0 = max(0, int(np.floor(pts[:, 0].min() - 0.5)))
    c1 = min(w - 1, int(np.ceil(pts[:, 0].max())))
    mask = np.zeros((h, w), dtype=bool)
    if r1 < r0 or c1 < c0:
        return mask
    py = (np.arange(r0, r1 + 1) + 0.5)[:, None]
    px = (np.arange(c0, c1 + 1) + 0.5)[None, :]
    crossings = np.zeros((r1 - r0 + 1, c1 - c0 + 1), dtype=int)
    n = len(pts)
    for i in range(n):
        x1, y1 = pts[i]
        x2, y2 = pts[(i + 1) % n]
        if y1 == y2:
            continue
        hits = (y1 > py) != (y2 > py)
        x_int = x1 + (py - y1) * (x2 - x1) / (y2 - y1)
        crossings += hits & (px < x_int)
    mask[r0:r1 + 1, c0:c1 + 1] = crossings % 2 == 1
    return mask


def contour_to_mask(contour: Contour, image_bounds: tuple[int, int]) -> InstanceMask:
    """Rasterize a simple closed contour (even-odd, pixel-center test)."""
    pts = contour.points
    if len(pts) < 3:
        raise SelfIntersecting("contour has fewer than 3 points")
    if _self_intersects(pts):
        raise SelfIntersecting("contour is not a simple polygon")
    mask = rasterize_polygon(pts, image_bounds)
    if not mask.any():
        raise EmptyMask("contour covers no pixel centers")
    return InstanceMask(id=contour.component_id, mask=mask)


@dataclass
class RefinementDetail:
    mask: InstanceMask
    contour: Contour
    graph: ColumnGraph


def refine_component_detailed(
    image: np.ndarray,
    component: InstanceMask,
    box: TiltedBox,
    cell: DomainCell,
    config: GsConfig | None = None,
) -> RefinementDetail:
    """Full refinement of one rough component: column graph, optimal closed
    path, rasterization, domain-cell clipping.

    The result is clipped to the component's domain cell, which makes the
    refined masks of distinct components pixel-disjoint by construction.
    Raises GraphSearchError subclasses on failure; callers fall back to the
    rough mask.
    """
    graph = build_column_graph(image, component, box, cell, config)
    contour = solve_closed_path(graph)
    inst = contour_to_mask(contour, image.shape)
    mask = inst.mask & (cell.owner == component.id)
    if not mask.any():
        raise EmptyMask("refined mask empty after domain clipping")
    _, n_comp = ndimage.label(mask, structure=EIGHT_CONNECTED)
    if n_comp != 1:
        raise TopologyChanged(f"refined mask has {n_comp} components")
    return RefinementDetail(
        mask=InstanceMask(id=component.id, mask=mask), contour=contour, graph=graph
    )


def refine_component(
    image: np.ndarray,
    component: InstanceMask,
    box: TiltedBox,
    cell: DomainCell,
    config: GsConfig | None = None,
) -> InstanceMask:
    """refine_component_detailed, keeping only the refined mask."""
    return refine_component_detailed(image, component, box, cell, config).mask


def dump_cost_csv(graph: ColumnGraph, contour: Contour | None,
                  path: str | os.PathLike) -> None:
    """Debug dump of the unfolded cost matrix: column, node, cost, chosen."""
    chosen = set()
    if contour is not None:
        chosen = {(int(i), int(j)) for i, j in enumerate(contour.selections)}
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["column", "node", "cost", "chosen"])
        for i in range(graph.n_columns):
            for j in range(graph.nodes_per_column):
                writer.writerow(
                    [i, j, repr(float(graph.cost[i, j])), int((i, j) in chosen)]
                )
