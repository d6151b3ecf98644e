"""Plane geometry primitives: rigid motions, convex polygons, angular windows.

Everything here works on plain floats and tuples; the tracing and unfolding
hot loops call into these helpers, so they avoid per-call array allocation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

TWO_PI = 2.0 * math.pi


def norm_angle(a: float) -> float:
    """Normalize an angle to [0, 2*pi)."""
    a = math.fmod(a, TWO_PI)
    return a + TWO_PI if a < 0.0 else a


def ang_diff(a: float, b: float) -> float:
    """Signed difference a-b wrapped to (-pi, pi]."""
    d = math.fmod(a - b, TWO_PI)
    if d <= -math.pi:
        d += TWO_PI
    elif d > math.pi:
        d -= TWO_PI
    return d


@dataclass(frozen=True)
class PlaneIsometry:
    """Orientation-preserving rigid motion: rotation by `rot` followed by translation."""

    rot: float
    tx: float
    ty: float

    def apply(self, x: float, y: float) -> tuple[float, float]:
        c = math.cos(self.rot)
        s = math.sin(self.rot)
        return (c * x - s * y + self.tx, s * x + c * y + self.ty)

    def apply_dir(self, a: float) -> float:
        return norm_angle(a + self.rot)

    def compose(self, other: "PlaneIsometry") -> "PlaneIsometry":
        """self after other: (self.compose(other)).apply(p) == self.apply(*other.apply(p))."""
        c = math.cos(self.rot)
        s = math.sin(self.rot)
        return PlaneIsometry(
            self.rot + other.rot,
            c * other.tx - s * other.ty + self.tx,
            s * other.tx + c * other.ty + self.ty,
        )

    def inverse(self) -> "PlaneIsometry":
        c = math.cos(self.rot)
        s = math.sin(self.rot)
        return PlaneIsometry(-self.rot, -(c * self.tx + s * self.ty), s * self.tx - c * self.ty)

    @staticmethod
    def identity() -> "PlaneIsometry":
        return PlaneIsometry(0.0, 0.0, 0.0)

    @staticmethod
    def mapping_segment(
        q0: tuple[float, float],
        q1: tuple[float, float],
        p0: tuple[float, float],
        p1: tuple[float, float],
    ) -> "PlaneIsometry":
        """The rigid motion taking the directed segment q0->q1 onto p0->p1."""
        rot = math.atan2(p1[1] - p0[1], p1[0] - p0[0]) - math.atan2(q1[1] - q0[1], q1[0] - q0[0])
        c = math.cos(rot)
        s = math.sin(rot)
        tx = p0[0] - (c * q0[0] - s * q0[1])
        ty = p0[1] - (s * q0[0] + c * q0[1])
        return PlaneIsometry(rot, tx, ty)

    def almost_equal(self, other: "PlaneIsometry", tol: float) -> bool:
        return (
            abs(ang_diff(self.rot, other.rot)) <= tol
            and abs(self.tx - other.tx) <= tol
            and abs(self.ty - other.ty) <= tol
        )

    def matrix(self) -> tuple[float, float, float, float, float, float]:
        """Row-major 2x3 affine matrix (a, b, tx, c, d, ty)."""
        c = math.cos(self.rot)
        s = math.sin(self.rot)
        return (c, -s, self.tx, s, c, self.ty)


# ---------------------------------------------------------------------------
# polygons

def signed_area(poly: list[tuple[float, float]]) -> float:
    a = 0.0
    n = len(poly)
    for i in range(n):
        x0, y0 = poly[i]
        x1, y1 = poly[(i + 1) % n]
        a += x0 * y1 - x1 * y0
    return 0.5 * a


def is_convex_ccw(poly: list[tuple[float, float]]) -> bool:
    """True when the polygon is convex and counterclockwise (no repeated points)."""
    n = len(poly)
    if n < 3:
        return False
    for i in range(n):
        ax, ay = poly[i]
        bx, by = poly[(i + 1) % n]
        cx, cy = poly[(i + 2) % n]
        cross = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
        if cross <= 0.0:
            return False
    return True


def centroid(poly: list[tuple[float, float]]) -> tuple[float, float]:
    n = len(poly)
    return (sum(p[0] for p in poly) / n, sum(p[1] for p in poly) / n)


def circumradius(poly: list[tuple[float, float]]) -> float:
    cx, cy = centroid(poly)
    return max(math.hypot(p[0] - cx, p[1] - cy) for p in poly)


def point_in_convex(poly: list[tuple[float, float]], x: float, y: float, tol: float = 0.0) -> bool:
    n = len(poly)
    for i in range(n):
        ax, ay = poly[i]
        bx, by = poly[(i + 1) % n]
        if (bx - ax) * (y - ay) - (by - ay) * (x - ax) < -tol:
            return False
    return True


def clip_convex(poly: list[tuple[float, float]], box: tuple[float, float, float, float]):
    """Sutherland-Hodgman clip of a convex CCW polygon against an axis box."""
    xlo, ylo, xhi, yhi = box

    def clip_half(pts, inside, intersect):
        out = []
        n = len(pts)
        for i in range(n):
            a = pts[i]
            b = pts[(i + 1) % n]
            ia, ib = inside(a), inside(b)
            if ia:
                out.append(a)
            if ia != ib:
                out.append(intersect(a, b))
        return out

    pts = list(poly)
    for side in range(4):
        if not pts:
            return []
        if side == 0:
            ins = lambda p: p[0] >= xlo
            itx = lambda a, b: _x_cut(a, b, xlo)
        elif side == 1:
            ins = lambda p: p[0] <= xhi
            itx = lambda a, b: _x_cut(a, b, xhi)
        elif side == 2:
            ins = lambda p: p[1] >= ylo
            itx = lambda a, b: _y_cut(a, b, ylo)
        else:
            ins = lambda p: p[1] <= yhi
            itx = lambda a, b: _y_cut(a, b, yhi)
        pts = clip_half(pts, ins, itx)
    return pts


def _x_cut(a, b, x):
    t = (x - a[0]) / (b[0] - a[0])
    return (x, a[1] + t * (b[1] - a[1]))


def _y_cut(a, b, y):
    t = (y - a[1]) / (b[1] - a[1])
    return (a[0] + t * (b[0] - a[0]), y)


def dist_point_segment(px, py, ax, ay, bx, by) -> float:
    vx, vy = bx - ax, by - ay
    wx, wy = px - ax, py - ay
    vv = vx * vx + vy * vy
    if vv <= 0.0:
        return math.hypot(wx, wy)
    t = (wx * vx + wy * vy) / vv
    if t < 0.0:
        t = 0.0
    elif t > 1.0:
        t = 1.0
    return math.hypot(px - (ax + t * vx), py - (ay + t * vy))


# ---------------------------------------------------------------------------
# angular windows for unfolding searches
#
# A window is either None (all directions) or a pair (lo, hi) of unnormalized
# angles with 0 < hi - lo < pi.  All windows produced by edge subtension have
# width below pi, so intersections stay representable.

def subtend(px, py, ax, ay, bx, by):
    """Angular interval of directions from (px,py) that cross segment a-b, or None-width pair."""
    a1 = math.atan2(ay - py, ax - px)
    a2 = math.atan2(by - py, bx - px)
    d = math.fmod(a2 - a1, TWO_PI)
    if d <= -math.pi:
        d += TWO_PI
    elif d > math.pi:
        d -= TWO_PI
    if d >= 0.0:
        return (a1, a1 + d)
    return (a1 + d, a1)


def window_intersect(w, v, min_width=1e-14):
    """Intersect two windows; None input means the full circle. Returns None when empty."""
    if w is None:
        lo, hi = v
        return (lo, hi) if hi - lo > min_width else None
    lo, hi = w
    a, b = v
    k = round(((lo + hi) - (a + b)) / (2.0 * TWO_PI))
    a += TWO_PI * k
    b += TWO_PI * k
    nlo = lo if lo > a else a
    nhi = hi if hi < b else b
    if nhi - nlo <= min_width:
        return None
    return (nlo, nhi)


def window_contains(w, ang, tol=1e-12) -> bool:
    if w is None:
        return True
    lo, hi = w
    k = round(((lo + hi) * 0.5 - ang) / TWO_PI)
    ang += TWO_PI * k
    return lo - tol <= ang <= hi + tol
