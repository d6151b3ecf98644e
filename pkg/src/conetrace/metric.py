"""Geodesic distances by windowed unfolding, Busemann estimates, convergence profiles.

Two measurement regimes share the chart machinery.  `local_distance` is the
honest metric on the surface itself: any geodesic is a chain of straight
chords whose interior breakpoints are conical points, so a small Dijkstra runs
over the cone classes as hubs with chord legs found by best-first unfolding
under angular-window pruning.  The asymptotic operations (`busemann`,
`equidistant_reparam`, `convergence_profile`) instead measure separations
between developed lifts in a shared development frame: a traced geodesic
develops to a straight line, points are lifted to the nearby face copy, and
each reported distance is the Euclidean separation of the developed images.
That separation equals the geodesic distance between the lifts whenever the
straight chord between them is realizable on the surface, and is a lower
bound in general, since any lifted path develops to a plane path of the same
length.  Working with the developed lines keeps the Busemann limit available
in closed form and makes convergence profiles of asymptotic pairs exactly
monotone, which no quotient measurement can provide: quotient distances are
bounded by the diameter and oscillate as foreign sheets dip closer.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

from .errors import ConeOnRayError, ExceedsRadiusError, NoBracketError
from .geom import (
    PlaneIsometry,
    ang_diff,
    dist_point_segment,
    subtend,
    window_contains,
    window_intersect,
)
from .surface import ConeSurface, SurfacePoint
from .tracer import GeodesicPath, TangentState

MAX_DEPTH = 64
NODE_BUDGET = 1_000_000


def _place_key(place: PlaneIsometry):
    return (
        round(math.cos(place.rot) * 1e7),
        round(math.sin(place.rot) * 1e7),
        round(place.tx * 1e7),
        round(place.ty * 1e7),
    )


@dataclass
class _ChordResult:
    to_target: float = math.inf
    to_class: dict = field(default_factory=dict)
    complete: bool = True
    nodes: int = 0


def _chords(s: ConeSurface, roots, target, cap: float,
            skip_zero: bool = False, max_depth: int | None = None) -> _ChordResult:
    """Minimal realizable straight chords from the given sources.

    roots: list of (face, px, py, window, place) sources sharing one notional
    origin (a point gets one full-circle root; a cone apex gets one wedge root
    per corner).  target: (face, x, y) or None.  Chords to the target and to
    every cone class are collected up to length `cap`.
    """
    if max_depth is None:
        max_depth = MAX_DEPTH
    res = _ChordResult()
    best_to_class = res.to_class
    heap = []
    counter = 0
    for face, px, py, window, place in roots:
        heapq.heappush(heap, (0.0, counter, face, px, py, place, -1, window, 0))
        counter += 1

    if target is not None and isinstance(target, SurfacePoint):
        target = (target.face, target.x, target.y)

    def consider(face, px, py, place, window, depth):
        if target is not None and face == target[0]:
            tx, ty = place.apply(target[1], target[2])
            d = math.hypot(tx - px, ty - py)
            if d < res.to_target and d <= cap:
                if depth == 0 or window_contains(window, math.atan2(ty - py, tx - px)):
                    res.to_target = d
        for v in s.conical_vertices[face]:
            vx, vy = place.apply(*s.faces[face][v])
            d = math.hypot(vx - px, vy - py)
            if skip_zero and d <= 1e-12:
                continue
            if d > cap:
                continue
            key = s.vertex_class[(face, v)]
            if d >= best_to_class.get(key, math.inf):
                continue
            if depth == 0 or window_contains(window, math.atan2(vy - py, vx - px)):
                best_to_class[key] = d

    while heap:
        lb, _, face, px, py, place, entry, window, depth = heapq.heappop(heap)
        if lb > cap:
            break
        res.nodes += 1
        if res.nodes > NODE_BUDGET:
            res.complete = False
            break
        consider(face, px, py, place, window, depth)
        if depth >= max_depth:
            res.complete = False
            continue
        poly = s.faces[face]
        n = len(poly)
        for e in range(n):
            if e == entry:
                continue
            ax, ay = place.apply(*poly[e])
            bx, by = place.apply(*poly[(e + 1) % n])
            w2 = window_intersect(window, subtend(px, py, ax, ay, bx, by))
            if w2 is None:
                continue
            lb2 = dist_point_segment(px, py, ax, ay, bx, by)
            if lb2 > cap:
                continue
            gi, is_a = s.edge_of[(face, e)]
            trans = s.crossing_transition(gi, is_a)
            other = s.gluings[gi][1] if is_a else s.gluings[gi][0]
            child_place = place.compose(trans.inverse())
            heapq.heappush(
                heap,
                (lb2, counter, other[0], px, py, child_place, other[1], w2, depth + 1),
            )
            counter += 1
    return res


def _point_roots(s: ConeSurface, p: SurfacePoint):
    return [(p.face, p.x, p.y, None, PlaneIsometry.identity())]


def _class_roots(s: ConeSurface, cid: int):
    roots = []
    for c in s.class_corners[cid]:
        poly = s.faces[c.face]
        vx, vy = poly[c.vertex]
        nx, ny = poly[(c.vertex + 1) % len(poly)]
        lo = math.atan2(ny - vy, nx - vx)
        roots.append((c.face, vx, vy, (lo, lo + c.interior_angle), PlaneIsometry.identity()))
    return roots


def local_distance(s: ConeSurface, x: SurfacePoint, y: SurfacePoint, radius: float) -> float:
    """Exact geodesic distance d(x, y) on the surface when it is at most `radius`.

    Straight chords are combined with routes through cone apices by a Dijkstra
    whose hubs are the conical classes.  Raises ExceedsRadius when the distance
    exceeds the radius (or the node budget is exhausted first).
    """
    if radius <= 0:
        raise ValueError("radius must be positive")
    if x.face == y.face and x.x == y.x and x.y == y.y:
        return 0.0

    first = _chords(s, _point_roots(s, x), y, radius)
    best = first.to_target
    dist = dict(first.to_class)
    settled: set[int] = set()
    heap = [(d, c) for c, d in dist.items()]
    heapq.heapify(heap)
    while heap:
        d, c = heapq.heappop(heap)
        if c in settled or d > dist.get(c, math.inf) or d >= best or d > radius:
            continue
        settled.add(c)
        leg = _chords(s, _class_roots(s, c), y, min(radius, best) - d, skip_zero=True)
        if d + leg.to_target < best:
            best = d + leg.to_target
        for c2, d2 in leg.to_class.items():
            nd = d + d2
            if nd < dist.get(c2, math.inf) and nd < best:
                dist[c2] = nd
                heapq.heappush(heap, (nd, c2))
    if best <= radius:
        return best
    raise ExceedsRadiusError(radius, None if math.isinf(best) else best)


def shortest_saddle_connection(s: ConeSurface) -> float:
    """Minimal positive distance between conical points (classes may coincide)."""
    classes = s.conical_classes
    best = math.inf
    cap = 4.0 * s.diam_hint
    while math.isinf(best) and cap <= 64.0 * s.diam_hint:
        for c in classes:
            res = _chords(s, _class_roots(s, c), None, cap, skip_zero=True)
            for d in res.to_class.values():
                if d < best:
                    best = d
        cap *= 2.0
    return best


# ---------------------------------------------------------------------------
# developed lifts

def _check_cone_free(ray: GeodesicPath, t: float):
    for hit in ray.cone_hits:
        if hit.arc_length <= t + 1e-12:
            raise ConeOnRayError(f"ray hits a cone point at arc length {hit.arc_length}")


def _ray_line(start: TangentState):
    """Developed image of a traced geodesic: the straight line b + t*e."""
    return start.x, start.y, math.cos(start.direction), math.sin(start.direction)


def _enumerate_lifts(s: ConeSurface, base: TangentState, target_face: int,
                     radius: float, start_place: PlaneIsometry | None = None):
    """All chart placements of target_face whose placed copy meets the radius disc."""
    if start_place is None:
        start_place = PlaneIsometry.identity()
    seen = {(base.face,) + _place_key(start_place): None}
    out = []
    frontier = [(base.face, start_place)]
    steps = 0
    while frontier and steps < 20000:
        nxt = []
        for face, place in frontier:
            steps += 1
            poly = s.faces[face]
            n = len(poly)
            placed = [place.apply(*poly[i]) for i in range(n)]
            dmin = min(
                dist_point_segment(base.x, base.y, *placed[i], *placed[(i + 1) % n])
                for i in range(n)
            )
            inside = all(
                (placed[(i + 1) % n][0] - placed[i][0]) * (base.y - placed[i][1])
                - (placed[(i + 1) % n][1] - placed[i][1]) * (base.x - placed[i][0]) >= 0
                for i in range(n)
            )
            if not inside and dmin > radius:
                continue
            if face == target_face:
                out.append(place)
            for e in range(n):
                gi, is_a = s.edge_of[(face, e)]
                other = s.gluings[gi][1] if is_a else s.gluings[gi][0]
                child = place.compose(s.crossing_transition(gi, is_a).inverse())
                key = (other[0],) + _place_key(child)
                if key in seen:
                    continue
                seen[key] = None
                nxt.append((other[0], child))
        frontier = nxt
    return out


def lift_point(s: ConeSurface, base: TangentState, x: SurfacePoint,
               start_place: PlaneIsometry | None = None,
               ref_dist: float | None = None) -> PlaneIsometry:
    """Chart placement of a copy of x near the base point's development.

    The placed image is never farther than the geodesic distance from the base
    to x: the geodesic develops to a plane path of its own length, so its
    endpoint copy lies within that radius and the minimum over copies can only
    be closer.  When the geodesic distance is supplied as `ref_dist`, the copy
    realizing it is preferred over overlap-sheet copies that develop closer
    without a realizable straight chord.
    """
    cap = 4.0 * s.diam_hint
    if ref_dist is not None:
        cap = max(ref_dist + 0.1 * s.diam_hint, 0.5 * s.diam_hint)
    while cap <= 256.0 * s.diam_hint:
        best = witness = None
        for place in _enumerate_lifts(s, base, x.face, cap, start_place):
            px, py = place.apply(x.x, x.y)
            d = math.hypot(px - base.x, py - base.y)
            if best is None or d < best[0]:
                best = (d, place)
            if ref_dist is not None and abs(d - ref_dist) <= 1e-7:
                if witness is None or d < witness[0]:
                    witness = (d, place)
        if witness is not None:
            return witness[1]
        if best is not None and best[0] <= cap:
            return best[1]
        cap *= 2.0
    raise ExceedsRadiusError(cap, None)


# ---------------------------------------------------------------------------
# Busemann machinery

@dataclass
class BusemannEstimate:
    value: float
    t_used: float
    converged: bool
    history: list[tuple[float, float]]


def busemann(
    s: ConeSurface,
    ray: GeodesicPath,
    x: SurfacePoint,
    x_prime: SurfacePoint,
    schedule: list[float] | None = None,
    tol: float | None = None,
) -> BusemannEstimate:
    """Estimate the Busemann difference d(x', ray(t)) - d(x, ray(t)) along the schedule.

    The ray develops to a straight line from its start chart; x is lifted to
    its copy nearest the ray's base and x' to its copy nearest x's lift, so
    the separation of the two lifts never exceeds the geodesic distance
    d(x, x').  Each alpha_t is the difference of the Euclidean separations
    from the lifts to the developed ray point.
    """
    if schedule is None:
        schedule = [s.diam_hint * 2.0 ** k for k in range(8)]
        schedule = [t for t in schedule if t <= ray.length] or [ray.length]
    if tol is None:
        tol = 1e-4 * s.diam_hint
    if sorted(schedule) != list(schedule):
        raise ValueError("schedule must be increasing")
    if schedule[-1] > ray.length + 1e-9:
        raise ValueError(
            f"schedule horizon {schedule[-1]} exceeds the traced ray length {ray.length}"
        )
    bx, by, ex, ey = _ray_line(ray.start)
    base_pt = SurfacePoint(ray.start.face, ray.start.x, ray.start.y)
    d_x = local_distance(s, base_pt, x, 16.0 * s.diam_hint)
    place_x = lift_point(s, ray.start, x, ref_dist=d_x)
    lx = place_x.apply(x.x, x.y)
    anchor = TangentState(x.face, lx[0], lx[1], 0.0)
    d_xp = local_distance(s, x, x_prime, 16.0 * s.diam_hint)
    place_xp = lift_point(s, anchor, x_prime, start_place=place_x, ref_dist=d_xp)
    lxp = place_xp.apply(x_prime.x, x_prime.y)
    history = []
    converged = False
    for t in schedule:
        _check_cone_free(ray, t)
        qx, qy = bx + t * ex, by + t * ey
        d = math.hypot(lx[0] - qx, lx[1] - qy)
        dp = math.hypot(lxp[0] - qx, lxp[1] - qy)
        history.append((t, dp - d))
        if len(history) >= 2 and abs(history[-1][1] - history[-2][1]) < tol:
            converged = True
            break
    t_used, value = history[-1]
    return BusemannEstimate(value, t_used, converged, history)


# ---------------------------------------------------------------------------
# equidistant reparametrization and convergence profiles

def _frame_candidates(s: ConeSurface, g1: GeodesicPath, g2: GeodesicPath,
                      radius: float, max_tilt: float = 0.3):
    """Placements of g2's development into g1's frame, roughly co-directed.

    Each candidate is (z0, e2, place): the placed base point and unit
    direction of g2's developed line.  Placements whose direction differs
    from g1's by more than `max_tilt` cannot fellow-travel and are dropped.
    """
    out = []
    for place in _enumerate_lifts(s, g1.start, g2.start.face, radius):
        tilt = abs(ang_diff(place.apply_dir(g2.start.direction), g1.start.direction))
        if tilt > max_tilt:
            continue
        z0 = place.apply(g2.start.x, g2.start.y)
        d2 = place.apply_dir(g2.start.direction)
        out.append((z0, (math.cos(d2), math.sin(d2)), place))
    return out


def _pair_sep(line1, z0, e2, c: float, u: float) -> float:
    """Separation of the developed lines at parameters u + c and u."""
    bx, by, ex, ey = line1
    return math.hypot(bx + (u + c) * ex - z0[0] - u * e2[0],
                      by + (u + c) * ey - z0[1] - u * e2[1])


def _closest_u(line1, z0, e2, c: float) -> float:
    """Parameter of closest approach of the developed lines (inf when parallel).

    The squared separation is a convex quadratic in u, so the pair is
    non-increasing on [0, h] exactly when the minimizer lies at or beyond h.
    """
    bx, by, ex, ey = line1
    ax_, ay_ = bx + c * ex - z0[0], by + c * ey - z0[1]
    dx, dy = ex - e2[0], ey - e2[1]
    den = dx * dx + dy * dy
    if den < 1e-24:
        return math.inf
    return -(ax_ * dx + ay_ * dy) / den


def equidistant_reparam(
    s: ConeSurface,
    g1: GeodesicPath,
    g2: GeodesicPath,
    schedule: list[float] | None = None,
    tol: float | None = None,
) -> float:
    """Time shift c making g1(c) equidistant with g2(0) from g1's endpoint at infinity.

    g2 is lifted to every placement that can fellow-travel g1's developed
    line; for each, the Busemann limit along a straight line is available in
    closed form, so c is the projection of the base offset onto g1's
    direction.  Candidates whose separation grows over the schedule horizon
    are rejected; ties (a flat cylinder defines c only up to its period)
    resolve to the smallest shift.  Raises NoBracket when no lift
    fellow-travels, e.g. for an anti-parallel pair.
    """
    if schedule is None:
        schedule = [s.diam_hint * 2.0 ** k for k in range(8)]
    if tol is None:
        tol = 1e-4 * s.diam_hint
    t_ref = min(schedule[-1], g1.length)
    _check_cone_free(g1, t_ref)
    _check_cone_free(g2, min(t_ref, g2.length))
    sep = local_distance(
        s,
        SurfacePoint(g1.start.face, g1.start.x, g1.start.y),
        SurfacePoint(g2.start.face, g2.start.x, g2.start.y),
        16.0 * s.diam_hint,
    )
    c_max = 2.0 * (sep + s.diam_hint)
    line1 = _ray_line(g1.start)
    candidates = _frame_candidates(s, g1, g2, c_max + 2.0 * s.diam_hint)
    if not candidates:
        raise NoBracketError("no development-aligned lift of g2 near g1's base")

    last_reason = "paths spread apart after reparametrization"
    roots = []
    for z0, e2, _place in candidates:
        # overlap-sheet phantom: a placed base closer than the surface distance
        # means the straight chord to that copy is not realizable
        if math.hypot(z0[0] - line1[0], z0[1] - line1[1]) < sep - 10.0 * tol:
            continue
        # Busemann limit of g1's line at the lifted base of g2, in closed form
        c = (z0[0] - line1[0]) * line1[2] + (z0[1] - line1[1]) * line1[3]
        # fellow-traveling check over the whole traced window: an asymptotic
        # pair is non-increasing there, i.e. its closest approach lies beyond
        u0 = max(0.0, -c)
        u_chk = min(g2.length, g1.length - max(c, 0.0))
        if u_chk <= u0:
            continue
        d0 = _pair_sep(line1, z0, e2, c, u0)
        du = _pair_sep(line1, z0, e2, c, u_chk)
        # a lift tracing the same developed line (separation at rounding
        # scale) identifies g2 as a reparametrization of g1 itself; such
        # shifts are exact and exempt from the |c| cap, which only guards
        # merely-bounded fellow travelers against runaway deck translates
        same_line = du <= 1e-9 * (1.0 + u_chk)
        if not same_line and abs(c) > c_max:
            last_reason = f"equidistant shift {c:.6g} outside [-{c_max:.6g}, {c_max:.6g}]"
            continue
        if du <= d0 + 10.0 * tol and _closest_u(line1, z0, e2, c) >= u_chk - 1e-9:
            roots.append((same_line, c))
    if roots:
        # a flat cylinder defines c only up to its period: among equally
        # good lifts ties resolve to the smallest shift
        return min(roots, key=lambda rc: (not rc[0], abs(rc[1])))[1]
    raise NoBracketError(last_reason)


def convergence_profile(
    s: ConeSurface,
    g1: GeodesicPath,
    g2: GeodesicPath,
    horizon: float,
    n_samples: int = 33,
):
    """Sampled distances d(g1(t), g2(t)) on [0, horizon]; callers reparametrize first.

    The distance follows the pair: g2 is lifted once to the placement that
    fellow-travels g1's developed line and every sample is the separation of
    the developed lifts at parameter t.  That separation is convex in t, which
    is what makes asymptotic profiles non-increasing; the quotient distance is
    a minimum over all sheets and rebounds after a foreign sheet dips below
    the tracked one, so it cannot certify convergence.  Samples beyond 4x the
    initial separation raise ExceedsRadius.
    """
    h = min(horizon, g1.length, g2.length)
    tol = 1e-4 * s.diam_hint
    sep = local_distance(
        s,
        SurfacePoint(g1.start.face, g1.start.x, g1.start.y),
        SurfacePoint(g2.start.face, g2.start.x, g2.start.y),
        16.0 * s.diam_hint,
    )
    line1 = _ray_line(g1.start)
    candidates = _frame_candidates(s, g1, g2, sep + 2.0 * s.diam_hint)
    # the tracked lift: fellow-travels (non-increasing separation) and starts
    # nearest; deck translates along the flight direction shrink from farther out
    best = None
    for z0, e2, _place in candidates:
        d0 = _pair_sep(line1, z0, e2, 0.0, 0.0)
        if d0 < sep - 10.0 * tol:
            # overlap-sheet phantom; the chord to that copy is not realizable
            continue
        du = _pair_sep(line1, z0, e2, 0.0, h)
        if du <= d0 + 10.0 * tol and _closest_u(line1, z0, e2, 0.0) >= h - 1e-9:
            if best is None or (du, d0) < best[0]:
                best = ((du, d0), z0, e2)
    if best is None:
        raise NoBracketError("no fellow-traveling lift of g2; reparametrize first")
    (_, start_gap), z0, e2 = best
    radius = max(4.0 * start_gap, 0.1 * s.diam_hint)
    out = []
    for k in range(n_samples):
        t = h * k / (n_samples - 1)
        d = _pair_sep(line1, z0, e2, 0.0, t)
        if d > radius:
            raise ExceedsRadiusError(radius, d)
        out.append((t, d))
    return out
