"""Acceptance gate: one criterion per test, one printed verdict line each.

Each test computes its verdict first and prints a single CRITERION line
before asserting, so the report survives failures.
"""
import math

import numpy as np
import pytest

from conetrace import (
    Crossing,
    Loop,
    PhaseCell,
    SurfacePoint,
    TangentState,
    busemann,
    cone_approach_experiment,
    convergence_profile,
    develop,
    equidistant_reparam,
    find_unique_closed,
    flat_cylinder,
    gb_residual,
    hit_times,
    is_unique_in_class,
    local_distance,
    loop_length,
    min_cone_distance_profile,
    point_at,
    shorten,
    state_at,
    trace,
    transitivity_scan,
    validate,
    verify_stationarity,
    word_holonomy,
)
from conetrace.dynamics import cell_region
from conetrace.geom import ang_diff, signed_area

PI = math.pi
PERIOD_MID = 2 * math.cos(PI / 8)
HALF_WIDTH = math.sin(PI / 8)


def verdict(num, name, ok):
    print(f"CRITERION {num} ({name}): {'PASS' if ok else 'FAIL'}")
    assert ok, f"criterion {num} ({name}) failed"


def test_criterion_1_structure(octagon, decagon):
    ok = True
    rep = validate(octagon)
    ok &= rep.ok and rep.euler_characteristic == -2 and rep.genus == 2
    ok &= len(rep.cone_points) == 1 and abs(rep.cone_points[0][1] - 6 * PI) < 1e-9
    repd = validate(decagon)
    angles = [a for _, a in repd.cone_points]
    ok &= repd.ok and repd.euler_characteristic == -2
    ok &= len(angles) == 2 and all(abs(a - 4 * PI) < 1e-9 for a in angles)
    for s in (octagon, decagon):
        chi = s.euler_characteristic()
        defect = sum(2 * PI - t for t in s.cone_angles)
        ok &= abs(defect - 2 * PI * chi) < 1e-9 * max(1, len(s.cone_angles))
    verdict(1, "structure", ok)


def test_criterion_2_gauss_bonnet():
    ok = True
    ok &= abs(gb_residual([], [PI / 2, PI / 4, PI / 4])) <= 1e-12
    ok &= abs(gb_residual([], [PI / 2] * 4)) <= 1e-12
    ok &= abs(gb_residual([3 * PI], [PI / 2] * 4) - PI) <= 1e-12
    ok &= abs(gb_residual([2.5 * PI], [0.375 * PI] * 4)) <= 1e-12
    rng = np.random.default_rng(2)
    base_i = gb_residual([3 * PI], [PI / 2] * 4)
    for _ in range(20):
        d = rng.uniform(-0.5, 0.5)
        ok &= abs(gb_residual([3 * PI + d], [PI / 2] * 4) - base_i - d) < 1e-12
        ok &= abs(gb_residual([3 * PI], [PI / 2 + d, PI / 2, PI / 2, PI / 2]) - base_i - d) < 1e-12
    verdict(2, "gauss-bonnet", ok)


def test_criterion_3_development_isometry(octagon):
    rng = np.random.default_rng(3)
    ok = True
    done = 0
    while done < 1000:
        x, y = rng.uniform(-0.5, 0.5, size=2)
        if not octagon.contains(SurfacePoint(0, x, y)):
            continue
        p = trace(octagon, TangentState(0, x, y, rng.uniform(0, 2 * PI)), 50.0)
        if p.cone_hits:
            continue  # resample the rare cone-hitting direction
        _, poly = develop(p)
        ok &= abs(math.dist(poly[0], poly[-1]) - p.length) < 1e-6
        done += 1
    for _ in range(100):
        w1 = [(int(rng.integers(4)), bool(rng.integers(2))) for _ in range(int(rng.integers(1, 4)))]
        w2 = [(int(rng.integers(4)), bool(rng.integers(2))) for _ in range(int(rng.integers(1, 4)))]
        ha, hb = word_holonomy(octagon, w1), word_holonomy(octagon, w2)
        ok &= word_holonomy(octagon, w1 + w2).almost_equal(hb.compose(ha), 1e-8)
    verdict(3, "development isometry", ok)


def test_criterion_4_shortening(octagon):
    ok = True
    loop = Loop([Crossing(0, True, 0.3)], kinks=[(0, (0.1, 0.2))])
    ok &= loop_length(octagon, loop) > PERIOD_MID  # genuinely perturbed
    g = shorten(octagon, loop)
    ok &= abs(g.period - PERIOD_MID) < 1e-6
    g2 = shorten(octagon, g)
    ok &= abs(g2.period - g.period) <= 1e-10
    for out in (g, g2, shorten(octagon, Loop([Crossing(0, True, 0.7)]))):
        ok &= verify_stationarity(octagon, out)
        ok &= all(min(p.theta_l, p.theta_r) >= PI - 1e-9 for p in out.passages)
    verdict(4, "shortening", ok)


def test_criterion_5_flat_cylinder(octagon):
    ok = True
    g = shorten(octagon, Loop([Crossing(0, True, 0.3)]))
    cyl = flat_cylinder(octagon, g)
    ok &= abs(cyl.width_left - HALF_WIDTH) < 1e-6
    ok &= abs(cyl.width_right - HALF_WIDTH) < 1e-6
    st = state_at(g.cycle, cyl.circumference / 2)  # interior point of the core
    sx = st.x + 0.1 * -math.sin(st.direction)
    sy = st.y + 0.1 * math.cos(st.direction)
    p = trace(octagon, TangentState(st.face, sx, sy, st.direction), cyl.circumference)
    ok &= p.end.face == st.face
    ok &= math.hypot(p.end.x - sx, p.end.y - sy) < 1e-8
    ok &= abs(ang_diff(p.end.direction, st.direction)) < 1e-8
    verdict(5, "flat cylinder", ok)


def test_criterion_6_unique_closed(octagon):
    g = find_unique_closed(octagon, 200)
    unique, cert = is_unique_in_class(g)
    ok = unique and g.through_cones
    ok &= any(p.theta_l > PI for p in g.passages)
    ok &= any(p.theta_r > PI for p in g.passages)
    ok &= verify_stationarity(octagon, g)
    verdict(6, "unique closed geodesic", ok)


def test_criterion_7_busemann(octagon):
    rng = np.random.default_rng(7)
    ok = True

    def random_point():
        while True:
            x, y = rng.uniform(-1, 1, size=2)
            if octagon.contains(SurfacePoint(0, x, y)):
                return SurfacePoint(0, x, y)

    for _ in range(200):
        ray = trace(octagon, TangentState(0, 0.0, 0.0, rng.uniform(0, 2 * PI)), 130.0)
        if ray.cone_hits:
            continue
        x = point_at(ray, rng.uniform(0.0, 0.3))
        xp = random_point()
        d = local_distance(octagon, x, xp, 16.0)
        est = busemann(octagon, ray, x, xp)
        ok &= abs(est.value) <= d + 1e-4
        vals = [v for _, v in est.history]
        ok &= all(b <= a + 1e-9 for a, b in zip(vals, vals[1:]))
    for _ in range(20):
        ray = trace(octagon, TangentState(0, 0.0, 0.0, rng.uniform(0, 2 * PI)), 130.0)
        if ray.cone_hits:
            continue
        s0 = rng.uniform(0.0, 0.3)
        est = busemann(octagon, ray, SurfacePoint(0, 0.0, 0.0), point_at(ray, s0))
        ok &= abs(est.value + s0) < 1e-6
    verdict(7, "busemann", ok)


def test_criterion_8_cone_approach(octagon):
    rows, _ = cone_approach_experiment(octagon, 100, 100.0, seed=8)
    close = sum(1 for _, v in rows if v <= 0.05)
    ok = close >= 95
    core = trace(octagon, TangentState(0, 0.0, 0.0, 0.0), 100.0)
    prof = min_cone_distance_profile(octagon, core)
    ok &= abs(prof[-1][1] - HALF_WIDTH) < 1e-9
    verdict(8, "cone approach", ok)


def test_criterion_9_asymptotic_convergence(octagon):
    rng = np.random.default_rng(9)
    ok = True
    good = 0
    for _ in range(20):
        theta = rng.uniform(0, 2 * PI)
        qx, qy = 1000.0 * math.cos(theta), 1000.0 * math.sin(theta)
        pair = []
        for sgn in (-1.0, 1.0):
            bx = sgn * 0.5 * -math.sin(theta)
            by = sgn * 0.5 * math.cos(theta)
            d = math.atan2(qy - by, qx - bx)
            pair.append(trace(octagon, TangentState(0, bx, by, d), 950.0))
        g1, g2 = pair
        try:
            c = equidistant_reparam(octagon, g1, g2)
            if c >= 0:
                g1 = trace(octagon, state_at(g1, c), 930.0)
            else:
                g2 = trace(octagon, state_at(g2, -c), 930.0)
            prof = convergence_profile(octagon, g1, g2, 920.0)
        except Exception:
            continue
        vals = [v for _, v in prof]
        if all(b <= a + 1e-9 for a, b in zip(vals, vals[1:])) and vals[-1] <= 0.1 * vals[0]:
            good += 1
    ok &= good >= 18
    # flat-strip controls: parallel cylinder pairs stay at constant distance
    for off in (0.05, 0.15):
        g1 = trace(octagon, TangentState(0, 0.0, -off / 2, 0.0), 40.0)
        g2 = trace(octagon, TangentState(0, 0.0, off / 2, 0.0), 40.0)
        prof = convergence_profile(octagon, g1, g2, 35.0)
        ok &= all(abs(d - off) < 1e-6 for _, d in prof)
    verdict(9, "asymptotic convergence", ok)


def _nonempty_cells(s, idir, rng, n):
    out = []
    while len(out) < n:
        ix, iy = int(rng.integers(16)), int(rng.integers(16))
        reg = cell_region(s, PhaseCell(0, ix, iy, idir))
        if len(reg) >= 3 and abs(signed_area(reg)) > 1e-15:
            out.append(PhaseCell(0, ix, iy, idir))
    return out


def test_criterion_10_mixing_transitivity(octagon):
    rng = np.random.default_rng(10)
    ok = True
    successes = 0
    early_t0 = 0
    for k in range(20):
        # the flow never bends straight trajectories, so transit pairs must
        # share a direction sector
        idir = int(rng.integers(64))
        o, u = _nonempty_cells(octagon, idir, rng, 2)
        r = transitivity_scan(octagon, o, u, 100.0, 0.5, 4000, seed=100 + k)
        if r.success:
            successes += 1
        t0 = r.report.t0_estimate
        if t0 is not None and t0 <= 50.0:
            early_t0 += 1
    ok &= successes >= 18
    ok &= early_t0 >= 16
    recur = 0
    for k in range(20):
        idir = int(rng.integers(64))
        (cell,) = _nonempty_cells(octagon, idir, rng, 1)
        r = transitivity_scan(octagon, cell, cell, 100.0, 0.5, 4000, seed=200 + k)
        if r.success:
            recur += 1
    ok &= recur >= 19
    o, u = _nonempty_cells(octagon, 10, rng, 2)
    r1 = hit_times(octagon, o, u, 100.0, 0.5, 400, seed=42)
    r2 = hit_times(octagon, o, u, 100.0, 0.5, 400, seed=42)
    ok &= bool(np.array_equal(r1.hit_bins, r2.hit_bins))
    verdict(10, "mixing and transitivity", ok)
