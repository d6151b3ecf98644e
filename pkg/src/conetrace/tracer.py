"""Exact geodesic tracing across face charts.

A trace is straight-line propagation inside each convex face, with chart
changes applied at glued edges.  Hitting a conical vertex (within the capture
radius) is a terminal event by default; continuations through cone points are
explicit via cone_scatter and must keep both side angles at least pi.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .errors import (
    ChartMismatchError,
    ConeHitError,
    EventBudgetExceededError,
    InvalidScatterError,
    NotALoopError,
    OutOfWindowError,
)
from .geom import PlaneIsometry, ang_diff, norm_angle
from .surface import ConeSurface, SurfacePoint


@dataclass(frozen=True)
class TangentState:
    """A unit tangent vector: face chart, base point, direction angle in [0, 2*pi)."""

    face: int
    x: float
    y: float
    direction: float


@dataclass(frozen=True)
class Segment:
    face: int
    entry: tuple[float, float]
    exit: tuple[float, float]
    length: float
    direction: float


@dataclass(frozen=True)
class EdgeCross:
    gluing: int
    forward: bool
    transition: PlaneIsometry
    arc_length: float


@dataclass(frozen=True)
class ConeHit:
    vclass: int
    arc_length: float
    face: int
    vertex: int
    direction: float  # incoming chart direction of travel


@dataclass
class TraceOptions:
    eps_vertex: float | None = None  # capture radius; defaults to surface.eps_vertex
    max_events: int = 1_000_000
    cone_policy: str = "stop"  # "stop" | "error"


@dataclass
class GeodesicPath:
    start: TangentState
    end: TangentState
    segments: list[Segment]
    events: list
    length: float
    closed_flag: float | None = None

    @property
    def cone_hits(self):
        return [e for e in self.events if isinstance(e, ConeHit)]

    @property
    def edge_crossings(self):
        return [e for e in self.events if isinstance(e, EdgeCross)]


def _face_edges(s: ConeSurface, face: int):
    """Per-edge tuples (ax, ay, nx, ny, bx, by) with outward normal (unnormalized)."""
    cached = getattr(s, "_edge_cache", None)
    if cached is None:
        cached = {}
        s._edge_cache = cached
    if face not in cached:
        poly = s.faces[face]
        n = len(poly)
        rows = []
        for e in range(n):
            ax, ay = poly[e]
            bx, by = poly[(e + 1) % n]
            # CCW polygon: outward normal of edge a->b is (dy, -dx)
            rows.append((ax, ay, by - ay, -(bx - ax), bx, by))
        cached[face] = rows
    return cached[face]


def trace(s: ConeSurface, start: TangentState, length: float, opts: TraceOptions | None = None) -> GeodesicPath:
    """Trace the geodesic from `start` for the given arc length."""
    if length < 0:
        raise ValueError("length must be nonnegative")
    opts = opts or TraceOptions()
    eps_v = opts.eps_vertex if opts.eps_vertex is not None else s.eps_vertex
    if not s.contains(SurfacePoint(start.face, start.x, start.y), tol=10 * s.eps_geom):
        raise ValueError("start point is not inside its face")

    face = start.face
    px, py = start.x, start.y
    d = norm_angle(start.direction)
    dx, dy = math.cos(d), math.sin(d)
    s0x, s0y, d0 = start.x, start.y, d

    segments: list[Segment] = []
    events: list = []
    arc = 0.0
    remaining = length
    closed_flag = None
    guard = -100.0 * s.eps_geom

    while True:
        edges = _face_edges(s, face)
        best_t = math.inf
        best_e = -1
        for e, (ax, ay, nx, ny, bx, by) in enumerate(edges):
            denom = dx * nx + dy * ny
            if denom <= 1e-300:
                continue
            t = ((ax - px) * nx + (ay - py) * ny) / denom
            if guard < t < best_t:
                best_t = t
                best_e = e
        if best_t < 0.0:
            best_t = 0.0

        if best_t >= remaining or best_e < 0:
            qx, qy = px + remaining * dx, py + remaining * dy
            seg = Segment(face, (px, py), (qx, qy), remaining, d)
            segments.append(seg)
            closed_flag = closed_flag or _closure_on_segment(
                s, seg, arc, face, d, s0x, s0y, d0, start.face
            )
            arc += remaining
            px, py = qx, qy
            break

        qx, qy = px + best_t * dx, py + best_t * dy
        seg = Segment(face, (px, py), (qx, qy), best_t, d)
        segments.append(seg)
        closed_flag = closed_flag or _closure_on_segment(
            s, seg, arc, face, d, s0x, s0y, d0, start.face
        )
        arc += best_t
        remaining -= best_t

        # conical vertex capture at either endpoint of the exit edge
        hit = None
        ax, ay, _, _, bx, by = edges[best_e]
        poly_n = len(s.faces[face])
        for vx, vy, vidx in ((ax, ay, best_e), (bx, by, (best_e + 1) % poly_n)):
            if math.hypot(qx - vx, qy - vy) <= eps_v:
                cid = s.vertex_class[(face, vidx)]
                if s.is_conical(cid):
                    hit = ConeHit(cid, arc, face, vidx, d)
                break
        if hit is not None:
            events.append(hit)
            if opts.cone_policy == "error":
                raise ConeHitError(hit.vclass, hit.arc_length)
            px, py = qx, qy
            break

        if len(events) >= opts.max_events:
            raise EventBudgetExceededError(f"more than {opts.max_events} events")

        gi, is_a = s.edge_of[(face, best_e)]
        trans = s.crossing_transition(gi, is_a)
        events.append(EdgeCross(gi, is_a, trans, arc))
        px, py = trans.apply(qx, qy)
        d = trans.apply_dir(d)
        dx, dy = math.cos(d), math.sin(d)
        other = s.gluings[gi][1] if is_a else s.gluings[gi][0]
        face = other[0]

    end = TangentState(face, px, py, d)
    return GeodesicPath(start, end, segments, events, arc, closed_flag)


def _closure_on_segment(s, seg, arc_at_entry, face, d, s0x, s0y, d0, start_face):
    """First-return period if the segment passes through the start state."""
    if face != start_face or abs(ang_diff(d, d0)) > 1e-9:
        return None
    ex, ey = seg.entry
    ux, uy = math.cos(d), math.sin(d)
    proj = (s0x - ex) * ux + (s0y - ey) * uy
    if proj <= s.eps_geom or proj > seg.length + s.eps_geom:
        return None
    perp = abs(-(s0x - ex) * uy + (s0y - ey) * ux)
    if perp > 10 * s.eps_geom:
        return None
    return arc_at_entry + proj


def state_at(path: GeodesicPath, t: float) -> TangentState:
    """State of the flow at arc length t along the path."""
    if t < -1e-12 or t > path.length + 1e-12:
        raise OutOfWindowError(f"t={t} outside [0, {path.length}]")
    acc = 0.0
    for seg in path.segments:
        if t <= acc + seg.length or seg is path.segments[-1]:
            u = t - acc
            return TangentState(
                seg.face,
                seg.entry[0] + u * math.cos(seg.direction),
                seg.entry[1] + u * math.sin(seg.direction),
                seg.direction,
            )
        acc += seg.length
    return path.end


def point_at(path: GeodesicPath, t: float) -> SurfacePoint:
    st = state_at(path, t)
    return SurfacePoint(st.face, st.x, st.y)


def time_shift(path: GeodesicPath, t: float) -> GeodesicPath:
    """Re-base the path so the state at arc length t becomes the start."""
    if t < -1e-12 or t > path.length + 1e-12:
        raise OutOfWindowError(f"t={t} outside [0, {path.length}]")
    if t <= 0.0:
        return path
    new_start = state_at(path, t)
    segments = []
    acc = 0.0
    for seg in path.segments:
        if acc + seg.length <= t + 1e-15 and acc + seg.length < path.length:
            acc += seg.length
            continue
        if acc < t:
            u = t - acc
            entry = (
                seg.entry[0] + u * math.cos(seg.direction),
                seg.entry[1] + u * math.sin(seg.direction),
            )
            segments.append(replace(seg, entry=entry, length=seg.length - u))
        else:
            segments.append(seg)
        acc += seg.length
    events = []
    for ev in path.events:
        if ev.arc_length >= t - 1e-15:
            events.append(replace(ev, arc_length=ev.arc_length - t))
    return GeodesicPath(new_start, path.end, segments, events, path.length - t, None)


def reverse(path: GeodesicPath) -> GeodesicPath:
    """The same curve traversed backwards."""
    L = path.length
    segments = [
        Segment(s.face, s.exit, s.entry, s.length, norm_angle(s.direction + math.pi))
        for s in reversed(path.segments)
    ]
    events = []
    for ev in reversed(path.events):
        if isinstance(ev, EdgeCross):
            events.append(
                EdgeCross(ev.gluing, not ev.forward, ev.transition.inverse(), L - ev.arc_length)
            )
        else:
            events.append(replace(ev, arc_length=L - ev.arc_length))
    start = TangentState(path.end.face, path.end.x, path.end.y, norm_angle(path.end.direction + math.pi))
    end = TangentState(path.start.face, path.start.x, path.start.y, norm_angle(path.start.direction + math.pi))
    return GeodesicPath(start, end, segments, events, L, path.closed_flag)


# ---------------------------------------------------------------------------
# development

def develop(path: GeodesicPath):
    """Develop the segment chain into the chart of the first face.

    Returns (isometries, polyline): isometries[i] maps segment i's chart into
    the start chart; the polyline is the developed image (a straight segment
    for a geodesic).  Interior cone hits are not developable.
    """
    hits = path.cone_hits
    if hits and any(h.arc_length < path.length - 1e-12 for h in hits):
        raise ChartMismatchError("path has interior cone hits")
    isos = [PlaneIsometry.identity()]
    for ev in path.events:
        if isinstance(ev, EdgeCross):
            isos.append(isos[-1].compose(ev.transition.inverse()))
    polyline = []
    if path.segments:
        polyline.append(isos[0].apply(*path.segments[0].entry))
        for iso, seg in zip(isos, path.segments):
            polyline.append(iso.apply(*seg.exit))
    else:
        p = (path.start.x, path.start.y)
        polyline = [p, p]
    return isos, polyline


def holonomy(s: ConeSurface, loop: GeodesicPath) -> PlaneIsometry:
    """Deck transformation of a traced loop: the developed end chart in start coordinates."""
    a, b = loop.start, loop.end
    if (
        a.face != b.face
        or math.hypot(a.x - b.x, a.y - b.y) > 100 * s.eps_geom
        or abs(ang_diff(a.direction, b.direction)) > 1e-7
    ):
        raise NotALoopError("path does not return to its initial state")
    iso = PlaneIsometry.identity()
    for ev in loop.events:
        if isinstance(ev, EdgeCross):
            iso = iso.compose(ev.transition.inverse())
    return iso


def word_holonomy(s: ConeSurface, word: list[tuple[int, bool]]) -> PlaneIsometry:
    """Holonomy of an edge-crossing word [(gluing, forward), ...]."""
    iso = PlaneIsometry.identity()
    for gi, forward in word:
        iso = iso.compose(s.crossing_transition(gi, forward).inverse())
    return iso


def itinerary(path: GeodesicPath) -> list[tuple[int, int]]:
    """One signed letter per edge crossing: (gluing id, +1 forward / -1 backward)."""
    return [(ev.gluing, 1 if ev.forward else -1) for ev in path.edge_crossings]


# ---------------------------------------------------------------------------
# cone continuations

def cone_scatter(s: ConeSurface, hit: ConeHit, outgoing: float) -> TangentState:
    """Continue through a cone point.

    `outgoing` is the angular separation in [0, theta) from the reversed
    incoming direction, measured counterclockwise around the cone point.  The
    continuation is geodesic only when both side angles (outgoing, theta -
    outgoing) are at least pi.
    """
    theta = s.cone_angles[hit.vclass]
    if not 0.0 <= outgoing < theta:
        raise ValueError(f"outgoing coordinate must lie in [0, {theta})")
    gamma_l = outgoing
    gamma_r = theta - outgoing
    eps = 1e-9
    if min(gamma_l, gamma_r) < math.pi - eps:
        raise InvalidScatterError(gamma_l, gamma_r)
    back = norm_angle(hit.direction + math.pi)
    coord_in = s.cone_coordinate(hit.face, hit.vertex, back)
    face, vertex, direction = s.from_cone_coordinate(hit.vclass, coord_in + outgoing)
    vx, vy = s.faces[face][vertex]
    return TangentState(face, vx, vy, direction)


# ---------------------------------------------------------------------------
# path comparison and cone-distance profiles

def _arc_positions(polyline, lengths):
    """Cumulative arc lengths of the developed polyline vertices."""
    acc = [0.0]
    for L in lengths:
        acc.append(acc[-1] + L)
    return acc


def _dev_point(polyline, acc, t):
    if t <= 0.0:
        return polyline[0]
    for i in range(len(acc) - 1):
        if t <= acc[i + 1] or i == len(acc) - 2:
            seg = acc[i + 1] - acc[i]
            u = 0.0 if seg <= 0.0 else (t - acc[i]) / seg
            x0, y0 = polyline[i]
            x1, y1 = polyline[i + 1]
            return (x0 + u * (x1 - x0), y0 + u * (y1 - y0))
    return polyline[-1]


def compare_paths(g1: GeodesicPath, g2: GeodesicPath, horizon: float) -> float:
    """Truncated exponentially-weighted integral distance between two developed paths.

    Both paths are developed into the chart of their (shared) start face and
    centered at their midpoints; the integrand |dev g1(t) - dev g2(t)| e^{-|t|}
    is integrated over the common window by the composite midpoint rule.
    """
    if g1.start.face != g2.start.face:
        raise ChartMismatchError("paths start in different faces")
    _, p1 = develop(g1)
    _, p2 = develop(g2)
    acc1 = _arc_positions(p1, [s.length for s in g1.segments])
    acc2 = _arc_positions(p2, [s.length for s in g2.segments])
    c1, c2 = g1.length / 2.0, g2.length / 2.0
    h = min(horizon, c1, c2)
    if h <= 0.0:
        a = _dev_point(p1, acc1, c1)
        b = _dev_point(p2, acc2, c2)
        return math.dist(a, b) * 2.0  # degenerate zero-length window
    n = 2048
    step = 2.0 * h / n
    total = 0.0
    for k in range(n):
        t = -h + (k + 0.5) * step
        a = _dev_point(p1, acc1, c1 + t)
        b = _dev_point(p2, acc2, c2 + t)
        total += math.dist(a, b) * math.exp(-abs(t))
    return total * step


def min_cone_distance_profile(s: ConeSurface, path: GeodesicPath):
    """Running minimum of developed distance from the path to nearby conical vertices.

    For each segment the candidate cone points are the conical vertices of the
    segment's face copy and of its immediately adjacent copies, all placed in
    the development.  Returns [(arc_length, running_min)], non-increasing in
    the second component.
    """
    isos, _ = develop(path)
    out = []
    run = math.inf
    arc = 0.0
    for iso, seg in zip(isos, path.segments):
        cand = _placed_cone_vertices(s, seg.face, iso)
        ex, ey = iso.apply(*seg.entry)
        ux, uy = math.cos(seg.direction + iso.rot), math.sin(seg.direction + iso.rot)
        marks = [0.0, seg.length]
        best_at = {}
        for vx, vy in cand:
            proj = (vx - ex) * ux + (vy - ey) * uy
            proj = min(max(proj, 0.0), seg.length)
            d = math.hypot(vx - (ex + proj * ux), vy - (ey + proj * uy))
            marks.append(proj)
            prev = best_at.get(proj)
            if prev is None or d < prev:
                best_at[proj] = d
        for m in sorted(set(marks)):
            d = math.inf
            for vx, vy in cand:
                px_, py_ = ex + m * ux, ey + m * uy
                d = min(d, math.hypot(vx - px_, vy - py_))
            if d < run:
                run = d
            out.append((arc + m, run))
        arc += seg.length
    return out


def _placed_cone_vertices(s: ConeSurface, face: int, iso: PlaneIsometry):
    pts = []
    for v in s.conical_vertices[face]:
        pts.append(iso.apply(*s.faces[face][v]))
    for e in range(len(s.faces[face])):
        gi, is_a = s.edge_of[(face, e)]
        trans = s.crossing_transition(gi, is_a)
        other = s.gluings[gi][1] if is_a else s.gluings[gi][0]
        nb_iso = iso.compose(trans.inverse())
        for v in s.conical_vertices[other[0]]:
            pts.append(nb_iso.apply(*s.faces[other[0]][v]))
    return pts
