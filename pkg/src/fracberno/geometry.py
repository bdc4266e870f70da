"""Planar domain descriptions and convex-geometry operations.

Domains are balls, axis-aligned boxes, simple CCW polygons (d=2), or
star-shaped radial profiles (d=2). Convex bodies are approximated by
polygons of at most 720 vertices sampled from the support function; the
support-function identity h_{(1-s)A+sB} = (1-s)h_A + s h_B is the test
oracle for Minkowski combinations.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage
from scipy.optimize import linprog
from scipy.spatial import ConvexHull

from .grids import Grid


class CenterOutsideError(ValueError):
    """Center ball of a starshapedness query is not inside the set."""


def _as_points(x):
    return np.atleast_2d(np.asarray(x, dtype=float))


@dataclass(frozen=True)
class Ball:
    center: tuple
    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("ball radius must be positive")
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))

    @property
    def d(self):
        return len(self.center)


@dataclass(frozen=True)
class BoxDomain:
    lo: tuple
    hi: tuple

    def __post_init__(self):
        lo = tuple(float(c) for c in self.lo)
        hi = tuple(float(c) for c in self.hi)
        if len(lo) != len(hi) or any(a >= b for a, b in zip(lo, hi)):
            raise ValueError("box must satisfy lo < hi componentwise")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def d(self):
        return len(self.lo)


class Polygon:
    """Simple polygon with CCW vertices, d=2 only."""

    def __init__(self, vertices):
        v = np.asarray(vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or len(v) < 3:
            raise ValueError("polygon needs >= 3 planar vertices")
        if _signed_area(v) < 0:
            raise ValueError("polygon vertices must be counterclockwise")
        if _self_intersects(v):
            raise ValueError("polygon must be simple")
        self.vertices = v

    @property
    def d(self):
        return 2

    def __repr__(self):
        return f"Polygon({len(self.vertices)} vertices)"


class StarShaped:
    """Radial profile rho(theta) > 0 sampled on equispaced angles, d=2."""

    def __init__(self, center, rho):
        rho = np.asarray(rho, dtype=float)
        if rho.ndim != 1 or len(rho) < 3 or np.any(rho <= 0):
            raise ValueError("rho must be a positive profile with >= 3 samples")
        self.center = tuple(float(c) for c in center)
        self.rho = rho

    @property
    def d(self):
        return 2

    def boundary_points(self):
        th = 2 * np.pi * np.arange(len(self.rho)) / len(self.rho)
        c = np.asarray(self.center)
        return c + self.rho[:, None] * np.stack([np.cos(th), np.sin(th)], axis=1)

    def radius_at(self, theta):
        """Linear interpolation of the profile (periodic)."""
        m = len(self.rho)
        t = np.asarray(theta) % (2 * np.pi) / (2 * np.pi) * m
        i0 = np.floor(t).astype(int) % m
        i1 = (i0 + 1) % m
        w = t - np.floor(t)
        return (1 - w) * self.rho[i0] + w * self.rho[i1]


def _signed_area(v):
    x, y = v[:, 0], v[:, 1]
    return 0.5 * np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y)


def _self_intersects(v):
    n = len(v)
    segs = [(v[i], v[(i + 1) % n]) for i in range(n)]

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    def intersects(p1, p2, q1, q2):
        d1 = cross(q1, q2, p1)
        d2 = cross(q1, q2, p2)
        d3 = cross(p1, p2, q1)
        d4 = cross(p1, p2, q2)
        return ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0))

    for i in range(n):
        for j in range(i + 1, n):
            if j == i or (j + 1) % n == i or (i + 1) % n == j:
                continue
            if intersects(*segs[i], *segs[j]):
                return True
    return False


def is_convex(poly: Polygon, tol=1e-12) -> bool:
    v = poly.vertices
    e = np.roll(v, -1, axis=0) - v
    cr = e[:, 0] * np.roll(e, -1, axis=0)[:, 1] - e[:, 1] * np.roll(e, -1, axis=0)[:, 0]
    scale = np.max(np.abs(v)) + 1.0
    return bool(np.all(cr >= -tol * scale * scale))


def convex_hull(points) -> Polygon:
    pts = _as_points(points)
    hull = ConvexHull(pts)
    return Polygon(pts[hull.vertices])


def area(dom) -> float:
    if isinstance(dom, Ball):
        from math import gamma

        return np.pi ** (dom.d / 2) / gamma(dom.d / 2 + 1) * dom.radius**dom.d
    if isinstance(dom, BoxDomain):
        return float(np.prod(np.asarray(dom.hi) - np.asarray(dom.lo)))
    if isinstance(dom, Polygon):
        return float(_signed_area(dom.vertices))
    if isinstance(dom, StarShaped):
        # polar area integral, trapezoid over the closed profile
        rho = dom.rho
        return float(0.5 * np.mean(rho**2) * 2 * np.pi)
    raise TypeError(f"unsupported domain {type(dom)}")


def perimeter(poly: Polygon) -> float:
    v = poly.vertices
    return float(np.sum(np.linalg.norm(np.roll(v, -1, axis=0) - v, axis=1)))


def contains(dom, points) -> np.ndarray:
    """Boolean membership of points (N, d) in the open-ish domain."""
    pts = _as_points(points)
    if isinstance(dom, Ball):
        return np.linalg.norm(pts - np.asarray(dom.center), axis=1) < dom.radius
    if isinstance(dom, BoxDomain):
        lo, hi = np.asarray(dom.lo), np.asarray(dom.hi)
        return np.all((pts > lo) & (pts < hi), axis=1)
    if isinstance(dom, Polygon):
        return _points_in_polygon(dom.vertices, pts)
    if isinstance(dom, StarShaped):
        c = np.asarray(dom.center)
        rel = pts - c
        r = np.linalg.norm(rel, axis=1)
        th = np.arctan2(rel[:, 1], rel[:, 0])
        return r < dom.radius_at(th)
    raise TypeError(f"unsupported domain {type(dom)}")


def _points_in_polygon(v, pts):
    """Crossing-number test, vectorized over points."""
    x, y = pts[:, 0], pts[:, 1]
    inside = np.zeros(len(pts), dtype=bool)
    n = len(v)
    for i in range(n):
        x1, y1 = v[i]
        x2, y2 = v[(i + 1) % n]
        crosses = (y1 > y) != (y2 > y)
        with np.errstate(divide="ignore", invalid="ignore"):
            xint = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
        inside ^= crosses & (x < np.where(crosses, xint, np.inf))
    return inside


def support(dom, directions) -> np.ndarray:
    """Support function h_D(xi) = sup_{x in D} <x, xi> on unit directions."""
    dirs = _as_points(directions)
    if isinstance(dom, Ball):
        return dirs @ np.asarray(dom.center) + dom.radius * np.linalg.norm(dirs, axis=1)
    if isinstance(dom, BoxDomain):
        corners = _box_corners(dom)
        return np.max(dirs @ corners.T, axis=1)
    if isinstance(dom, Polygon):
        return np.max(dirs @ dom.vertices.T, axis=1)
    if isinstance(dom, StarShaped):
        return np.max(dirs @ dom.boundary_points().T, axis=1)
    raise TypeError(f"unsupported domain {type(dom)}")


def _box_corners(dom: BoxDomain):
    lo, hi = np.asarray(dom.lo), np.asarray(dom.hi)
    d = len(lo)
    out = np.zeros((2**d, d))
    for k in range(2**d):
        for a in range(d):
            out[k, a] = hi[a] if (k >> a) & 1 else lo[a]
    return out


def require_convex(dom):
    if isinstance(dom, (Ball, BoxDomain)):
        return
    if isinstance(dom, Polygon):
        if not is_convex(dom):
            raise ValueError("nonconvex")
        return
    raise ValueError("nonconvex")


def as_polygon(dom, n=360) -> Polygon:
    """Convex polygon approximation with at most max(n, 720) vertices."""
    n = min(int(n), 720)
    if isinstance(dom, Polygon):
        require_convex(dom)
        return dom
    if isinstance(dom, BoxDomain):
        if dom.d != 2:
            raise ValueError("polygon approximation is planar only")
        lo, hi = dom.lo, dom.hi
        return Polygon([(lo[0], lo[1]), (hi[0], lo[1]), (hi[0], hi[1]), (lo[0], hi[1])])
    if isinstance(dom, Ball):
        if dom.d != 2:
            raise ValueError("polygon approximation is planar only")
        th = 2 * np.pi * np.arange(n) / n
        c = np.asarray(dom.center)
        return Polygon(c + dom.radius * np.stack([np.cos(th), np.sin(th)], axis=1))
    raise ValueError("nonconvex")


def minkowski_combine(d0, d1, s, n=256) -> Polygon:
    """Convex polygon of (1-s) d0 + s d1 via vertex sums and a hull."""
    if not (0.0 <= s <= 1.0):
        raise ValueError("s must lie in [0, 1]")
    require_convex(d0)
    require_convex(d1)
    v0 = as_polygon(d0, n).vertices * (1.0 - s)
    v1 = as_polygon(d1, n).vertices * s
    if s == 0.0:
        return Polygon(as_polygon(d0, n).vertices.copy())
    if s == 1.0:
        return Polygon(as_polygon(d1, n).vertices.copy())
    sums = (v0[:, None, :] + v1[None, :, :]).reshape(-1, 2)
    return convex_hull(sums)


def mean_width(dom, n=720) -> float:
    """Mean width of a planar convex body: (1/pi) * integral of h over S^1."""
    require_convex(dom)
    if dom.d != 2:
        raise ValueError("mean width implemented for d=2 only")
    if isinstance(dom, Ball):
        return 2.0 * dom.radius
    n = max(int(n), 360)
    th = 2 * np.pi * np.arange(n) / n
    dirs = np.stack([np.cos(th), np.sin(th)], axis=1)
    h = support(dom, dirs)
    return float(np.mean(h) * 2.0)


def diameter(dom) -> float:
    if isinstance(dom, Ball):
        return 2.0 * dom.radius
    if isinstance(dom, BoxDomain):
        return float(np.linalg.norm(np.asarray(dom.hi) - np.asarray(dom.lo)))
    if isinstance(dom, Polygon):
        v = dom.vertices
        d2 = np.sum((v[:, None, :] - v[None, :, :]) ** 2, axis=-1)
        return float(np.sqrt(d2.max()))
    if isinstance(dom, StarShaped):
        b = dom.boundary_points()
        d2 = np.sum((b[:, None, :] - b[None, :, :]) ** 2, axis=-1)
        return float(np.sqrt(d2.max()))
    raise TypeError(f"unsupported domain {type(dom)}")


def incenter(dom):
    """Center of a largest inscribed ball (Chebyshev center for polygons)."""
    if isinstance(dom, Ball):
        return np.asarray(dom.center)
    if isinstance(dom, BoxDomain):
        return 0.5 * (np.asarray(dom.lo) + np.asarray(dom.hi))
    if isinstance(dom, Polygon):
        c, _ = _chebyshev_center(dom.vertices)
        return c
    if isinstance(dom, StarShaped):
        c, _ = _star_inball(dom)
        return c
    raise TypeError(f"unsupported domain {type(dom)}")


def inradius(dom) -> float:
    if isinstance(dom, Ball):
        return float(dom.radius)
    if isinstance(dom, BoxDomain):
        return float(np.min((np.asarray(dom.hi) - np.asarray(dom.lo)) / 2.0))
    if isinstance(dom, Polygon):
        _, r = _chebyshev_center(dom.vertices)
        return r
    if isinstance(dom, StarShaped):
        _, r = _star_inball(dom)
        return r
    raise TypeError(f"unsupported domain {type(dom)}")


def _chebyshev_center(v):
    """Largest inscribed circle of a convex polygon, by linear programming.

    maximize r subject to n_k . c + r <= b_k for inward-normalized edges.
    """
    if not is_convex(Polygon(v)):
        # fall back to a rasterized distance transform for nonconvex polygons
        return _mask_inball(lambda pts: _points_in_polygon(v, pts), v)
    e = np.roll(v, -1, axis=0) - v
    nrm = np.stack([e[:, 1], -e[:, 0]], axis=1)  # outward for CCW
    nrm = nrm / np.linalg.norm(nrm, axis=1, keepdims=True)
    b = np.sum(nrm * v, axis=1)
    # variables (cx, cy, r); maximize r
    A_ub = np.column_stack([nrm, np.ones(len(v))])
    res = linprog(c=[0.0, 0.0, -1.0], A_ub=A_ub, b_ub=b, bounds=[(None, None)] * 3)
    if not res.success:
        raise RuntimeError("inscribed-circle LP failed")
    return res.x[:2], float(res.x[2])


def _star_inball(dom: StarShaped):
    pts = dom.boundary_points()
    return _mask_inball(
        lambda q: contains(dom, q), np.vstack([pts, np.asarray(dom.center)])
    )


def _mask_inball(member, ref_points, n=256):
    """Approximate inball via a distance transform on a bounding grid."""
    lo = ref_points.min(axis=0) - 1e-9
    hi = ref_points.max(axis=0) + 1e-9
    h = float(np.max(hi - lo)) / n
    grid = Grid.from_box(lo, lo + np.ceil((hi - lo) / h) * h, h)
    mask = member(grid.flat_centers()).reshape(grid.shape)
    dist = ndimage.distance_transform_edt(mask) * h
    k = np.unravel_index(np.argmax(dist), dist.shape)
    center = np.asarray(grid.lo) + (np.asarray(k) + 0.5) * h
    return center, float(dist[k])


def incenter_of_mask(mask, grid: Grid):
    """Deepest cell center of a mask (argmax of the distance transform)."""
    mask = np.asarray(mask, dtype=bool)
    if not mask.any():
        raise ValueError("empty mask")
    dist = ndimage.distance_transform_edt(mask)
    k = np.unravel_index(np.argmax(dist), dist.shape)
    return np.asarray(grid.lo) + (np.asarray(k) + 0.5) * grid.h


def centroid(poly: Polygon):
    v = poly.vertices
    x, y = v[:, 0], v[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cr = x * yn - xn * y
    a = np.sum(cr) / 2.0
    cx = np.sum((x + xn) * cr) / (6.0 * a)
    cy = np.sum((y + yn) * cr) / (6.0 * a)
    return np.array([cx, cy])


# ---------------------------------------------------------------------------
# rasterization and mask predicates
# ---------------------------------------------------------------------------


def rasterize(dom, grid: Grid) -> np.ndarray:
    """Cell mask of a domain; a cell belongs iff its center is inside."""
    return contains(dom, grid.flat_centers()).reshape(grid.shape)


def is_starshaped(mask, grid: Grid, center: Ball, samples_per_axis=5) -> bool:
    """Starshapedness of a cell mask with respect to a center ball.

    Checks, for every marked cell center x and a fixed 5^d lattice of
    points b inside the center ball, that the cells traversed by the
    segment [b, x] are all marked.
    """
    mask = np.asarray(mask, dtype=bool)
    if not mask.any():
        raise ValueError("empty mask")
    bpts = _ball_lattice(center, samples_per_axis)
    # the center ball must lie inside the marked set
    idx = grid.cell_index(bpts)
    if not grid.contains_points(bpts).all() or not mask[tuple(idx.T)].all():
        raise CenterOutsideError("center-outside")
    targets = np.argwhere(mask)
    centers = np.asarray(grid.lo) + (targets + 0.5) * grid.h
    n_t = np.maximum(
        2,
        np.ceil(
            np.linalg.norm(centers[:, None, :] - bpts[None, :, :], axis=-1).max()
            / (grid.h / 3.0)
        ).astype(int),
    )
    t = np.linspace(0.0, 1.0, int(n_t))
    for b in bpts:
        # all segment sample points, shape (targets, t, d)
        seg = b[None, None, :] + t[None, :, None] * (centers[:, None, :] - b[None, None, :])
        cells = np.floor((seg - np.asarray(grid.lo)) / grid.h).astype(int)
        for a in range(grid.d):
            np.clip(cells[..., a], 0, grid.shape[a] - 1, out=cells[..., a])
        hit = mask[tuple(np.moveaxis(cells, -1, 0))]
        if not hit.all():
            return False
    return True


def _ball_lattice(ball: Ball, n):
    """Deterministic n^d lattice inside the ball (inscribed-cube grid)."""
    c = np.asarray(ball.center)
    d = len(c)
    half = ball.radius / np.sqrt(d) * 0.98
    axes = [np.linspace(-half, half, n) for _ in range(d)]
    mesh = np.meshgrid(*axes, indexing="ij")
    return c + np.stack(mesh, axis=-1).reshape(-1, d)


def is_convex_mask(mask, grid: Grid) -> bool:
    """True iff the mask equals the rasterized hull of its cell centers,
    up to one boundary cell layer."""
    mask = np.asarray(mask, dtype=bool)
    if not mask.any():
        raise ValueError("empty mask")
    pts = grid.flat_centers()[mask.ravel()]
    if len(pts) < 3 or np.linalg.matrix_rank(pts - pts[0]) < grid.d:
        return True  # degenerate masks are trivially convex
    hull = ConvexHull(pts)
    poly = pts[hull.vertices]
    inside = _points_in_polygon(poly, grid.flat_centers()).reshape(grid.shape)
    # tolerate a single boundary layer of rasterization mismatch
    dilated = ndimage.binary_dilation(mask, iterations=1)
    return bool(np.all(~inside | dilated))


def mask_hausdorff(mask_a, grid_a: Grid, mask_b, grid_b: Grid) -> float:
    """Symmetric Hausdorff distance between cell-center clouds of two masks."""
    from scipy.spatial import cKDTree

    pa = grid_a.flat_centers()[np.asarray(mask_a, dtype=bool).ravel()]
    pb = grid_b.flat_centers()[np.asarray(mask_b, dtype=bool).ravel()]
    if len(pa) == 0 or len(pb) == 0:
        return np.inf
    da = cKDTree(pb).query(pa)[0].max()
    db = cKDTree(pa).query(pb)[0].max()
    return float(max(da, db))


def mask_boundary_segments(mask, grid: Grid) -> np.ndarray:
    """Unordered boundary segments of a 2D mask (marching between cells).

    Fallback boundary for non-starshaped sets: midpoints of cell edges
    separating marked from unmarked cells, shape (M, 2, 2).
    """
    mask = np.asarray(mask, dtype=bool)
    segs = []
    lo = np.asarray(grid.lo)
    h = grid.h
    nx, ny = mask.shape
    padded = np.zeros((nx + 2, ny + 2), dtype=bool)
    padded[1:-1, 1:-1] = mask
    for i in range(nx):
        for j in range(ny):
            if not mask[i, j]:
                continue
            x0, y0 = lo[0] + i * h, lo[1] + j * h
            if not padded[i, j + 1]:  # left neighbor
                segs.append([(x0, y0), (x0, y0 + h)])
            if not padded[i + 2, j + 1]:  # right
                segs.append([(x0 + h, y0), (x0 + h, y0 + h)])
            if not padded[i + 1, j]:  # bottom
                segs.append([(x0, y0), (x0 + h, y0)])
            if not padded[i + 1, j + 2]:  # top
                segs.append([(x0, y0 + h), (x0 + h, y0 + h)])
    return np.asarray(segs)


# ---------------------------------------------------------------------------
# polygon distance and ray helpers (used by the subsolution machinery)
# ---------------------------------------------------------------------------


def polygon_distance(poly: Polygon, points) -> np.ndarray:
    """Euclidean distance from points to a convex polygon (0 inside)."""
    pts = _as_points(points)
    v = poly.vertices
    w = np.roll(v, -1, axis=0)
    e = w - v
    el2 = np.sum(e * e, axis=1)
    # distance to each edge segment
    diff = pts[:, None, :] - v[None, :, :]
    t = np.clip(np.sum(diff * e[None, :, :], axis=2) / el2[None, :], 0.0, 1.0)
    proj = v[None, :, :] + t[:, :, None] * e[None, :, :]
    dseg = np.linalg.norm(pts[:, None, :] - proj, axis=2)
    dist = dseg.min(axis=1)
    dist[_points_in_polygon(v, pts)] = 0.0
    return dist


def polygon_boundary_distance(poly: Polygon, boundary) -> np.ndarray:
    """Distance from a convex polygon to another convex boundary.

    dist(K, boundary of D) for K = poly inside D: minimum over K's
    vertices of the distance to the boundary polyline.
    """
    bv = boundary.vertices if isinstance(boundary, Polygon) else np.asarray(boundary)
    bw = np.roll(bv, -1, axis=0)
    e = bw - bv
    el2 = np.sum(e * e, axis=1)
    pts = poly.vertices
    diff = pts[:, None, :] - bv[None, :, :]
    t = np.clip(np.sum(diff * e[None, :, :], axis=2) / el2[None, :], 0.0, 1.0)
    proj = bv[None, :, :] + t[:, :, None] * e[None, :, :]
    dseg = np.linalg.norm(pts[:, None, :] - proj, axis=2)
    return float(dseg.min())


def dist_to_boundary(dom, points) -> np.ndarray:
    """Distance from interior points to the domain boundary."""
    pts = _as_points(points)
    if isinstance(dom, Ball):
        return dom.radius - np.linalg.norm(pts - np.asarray(dom.center), axis=1)
    if isinstance(dom, BoxDomain):
        lo, hi = np.asarray(dom.lo), np.asarray(dom.hi)
        return np.min(np.minimum(pts - lo, hi - pts), axis=1)
    if isinstance(dom, Polygon):
        v = dom.vertices
        w = np.roll(v, -1, axis=0)
        e = w - v
        el2 = np.sum(e * e, axis=1)
        diff = pts[:, None, :] - v[None, :, :]
        t = np.clip(np.sum(diff * e[None, :, :], axis=2) / el2[None, :], 0.0, 1.0)
        proj = v[None, :, :] + t[:, :, None] * e[None, :, :]
        return np.linalg.norm(pts[:, None, :] - proj, axis=2).min(axis=1)
    raise TypeError(f"unsupported domain {type(dom)}")


def ray_boundary_hits(poly: Polygon, origin, angles):
    """Exit point and outward edge normal of rays from an interior origin.

    Returns (points, normals) arrays of shape (M, 2) for M ray angles.
    """
    o = np.asarray(origin, dtype=float)
    v = poly.vertices
    w = np.roll(v, -1, axis=0)
    e = w - v
    nrm = np.stack([e[:, 1], -e[:, 0]], axis=1)
    nrm = nrm / np.linalg.norm(nrm, axis=1, keepdims=True)
    pts_out, nrm_out = [], []
    for th in np.atleast_1d(angles):
        dvec = np.array([np.cos(th), np.sin(th)])
        best_t, best_k = np.inf, -1
        for k in range(len(v)):
            denom = dvec @ nrm[k]
            if denom <= 1e-14:
                continue
            t = (v[k] - o) @ nrm[k] / denom
            if t < -1e-12:
                continue
            p = o + t * dvec
            # within segment bounds (with tolerance)
            s = (p - v[k]) @ e[k] / (e[k] @ e[k])
            if -1e-9 <= s <= 1 + 1e-9 and t < best_t:
                best_t, best_k = t, k
        if best_k < 0:
            raise ValueError("ray does not exit the polygon (origin outside?)")
        pts_out.append(o + best_t * dvec)
        nrm_out.append(nrm[best_k])
    return np.asarray(pts_out), np.asarray(nrm_out)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def domain_to_json(dom) -> dict:
    if isinstance(dom, Ball):
        return {"kind": "ball", "center": list(dom.center), "radius": dom.radius}
    if isinstance(dom, BoxDomain):
        return {"kind": "box", "lo": list(dom.lo), "hi": list(dom.hi)}
    if isinstance(dom, Polygon):
        return {"kind": "polygon", "vertices": dom.vertices.tolist()}
    if isinstance(dom, StarShaped):
        return {"kind": "star", "center": list(dom.center), "rho": dom.rho.tolist()}
    raise TypeError(f"unsupported domain {type(dom)}")


def domain_from_json(obj) -> object:
    kind = obj.get("kind")
    if kind == "ball":
        return Ball(tuple(obj["center"]), float(obj["radius"]))
    if kind == "box":
        return BoxDomain(tuple(obj["lo"]), tuple(obj["hi"]))
    if kind == "polygon":
        return Polygon(obj["vertices"])
    if kind == "star":
        return StarShaped(tuple(obj["center"]), obj["rho"])
    raise ValueError(f"unknown domain kind {kind!r}")
