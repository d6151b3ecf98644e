"""Geodesic tracing, development, holonomy, path comparison."""
import dataclasses
import math

import numpy as np
import pytest

from conetrace import (
    TangentState,
    TraceOptions,
    compare_paths,
    cone_scatter,
    develop,
    holonomy,
    itinerary,
    min_cone_distance_profile,
    point_at,
    reverse,
    state_at,
    time_shift,
    trace,
    word_holonomy,
)
from conetrace.errors import (
    ChartMismatchError,
    ConeHitError,
    EventBudgetExceededError,
    InvalidScatterError,
    NotALoopError,
    OutOfWindowError,
)

APOTHEM = math.cos(math.pi / 8)
VERTEX_DIR = math.pi / 8  # direction from the center to vertex (cos pi/8, sin pi/8)


def test_straight_trace_inside_face(octagon):
    p = trace(octagon, TangentState(0, 0.0, 0.0, 0.0), 0.5)
    assert p.end.face == 0
    assert abs(p.end.x - 0.5) < 1e-12 and abs(p.end.y) < 1e-12
    assert not p.events


def test_single_crossing_trace(octagon):
    p = trace(octagon, TangentState(0, 0.0, 0.0, 0.0), 2.5)
    assert len(p.edge_crossings) == 1
    assert abs(p.edge_crossings[0].arc_length - APOTHEM) < 1e-12
    assert abs(p.end.x - (2.5 - 2 * APOTHEM)) < 1e-12
    assert abs(p.end.y) < 1e-12


def test_cone_hit_at_circumradius(octagon):
    p = trace(octagon, TangentState(0, 0.0, 0.0, VERTEX_DIR), 2.0)
    assert len(p.cone_hits) == 1
    assert abs(p.cone_hits[0].arc_length - 1.0) < 1e-12
    assert abs(p.length - 1.0) < 1e-12  # cone_policy stop truncates


def test_cone_policy_error(octagon):
    with pytest.raises(ConeHitError):
        trace(octagon, TangentState(0, 0.0, 0.0, VERTEX_DIR), 2.0, TraceOptions(cone_policy="error"))


def test_event_budget(octagon):
    with pytest.raises(EventBudgetExceededError):
        trace(octagon, TangentState(0, 0.0, 0.0, 0.37), 50.0, TraceOptions(max_events=5))


def _hit(octagon):
    return trace(octagon, TangentState(0, 0.0, 0.0, VERTEX_DIR), 2.0).cone_hits[0]


def test_cone_scatter_symmetric(octagon):
    # split the 6pi cone angle evenly: 3pi on each side
    st = cone_scatter(octagon, _hit(octagon), 3 * math.pi)
    assert st.face == 0


def test_cone_scatter_too_shallow(octagon):
    # one side angle of 0.5 < pi: not length-minimizing
    with pytest.raises(InvalidScatterError):
        cone_scatter(octagon, _hit(octagon), 0.5)


def test_cone_scatter_boundary_pi(octagon):
    cone_scatter(octagon, _hit(octagon), math.pi)


def test_develop_single_face(octagon):
    p = trace(octagon, TangentState(0, 0.0, 0.0, 0.0), 0.5)
    isos, polyline = develop(p)
    assert len(polyline) == 2
    assert len(isos) == 1
    assert isos[0].almost_equal(isos[0].identity(), 1e-12)


def test_develop_is_isometric(octagon):
    p = trace(octagon, TangentState(0, 0.0, 0.0, 0.0), 2.5)
    isos, polyline = develop(p)
    assert math.dist(polyline[0], polyline[-1]) == pytest.approx(2.5, abs=1e-9)
    # translation gluing: no rotation picked up
    assert abs(isos[-1].rot) < 1e-12


def test_scattered_continuation_traces(octagon):
    p = trace(octagon, TangentState(0, 0.0, 0.0, VERTEX_DIR), 2.0)
    ext = trace(octagon, cone_scatter(octagon, p.cone_hits[0], 3 * math.pi), 0.5)
    assert ext.length == pytest.approx(0.5, abs=1e-9)


def test_holonomy_mid_loop(octagon):
    period = 2 * APOTHEM
    loop = trace(octagon, TangentState(0, 0.0, 0.0, 0.0), period)
    assert loop.closed_flag is not None
    h = holonomy(octagon, loop)
    assert abs(h.rot) < 1e-12
    assert (h.tx, h.ty) == pytest.approx((period, 0.0), abs=1e-9)


def test_holonomy_requires_loop(octagon):
    p = trace(octagon, TangentState(0, 0.0, 0.0, 0.0), 0.7)
    with pytest.raises(NotALoopError):
        holonomy(octagon, p)


def test_holonomy_functoriality(octagon):
    rng = np.random.default_rng(5)
    for _ in range(100):
        w1 = [(int(rng.integers(4)), bool(rng.integers(2))) for _ in range(int(rng.integers(1, 4)))]
        w2 = [(int(rng.integers(4)), bool(rng.integers(2))) for _ in range(int(rng.integers(1, 4)))]
        ha, hb = word_holonomy(octagon, w1), word_holonomy(octagon, w2)
        assert word_holonomy(octagon, w1 + w2).almost_equal(hb.compose(ha), 1e-8)


def test_itinerary(octagon):
    assert itinerary(trace(octagon, TangentState(0, 0.0, 0.0, 0.0), 0.5)) == []
    p = trace(octagon, TangentState(0, 0.0, 0.0, 0.0), 2.5)
    assert itinerary(p) == [(0, 1)]
    assert itinerary(reverse(p)) == [(0, -1)]


def test_time_shift_identity_and_full(octagon):
    p = trace(octagon, TangentState(0, 0.0, 0.0, 0.37), 3.0)
    assert time_shift(p, 0.0).length == pytest.approx(p.length)
    tail = time_shift(p, p.length)
    assert tail.length == pytest.approx(0.0, abs=1e-12)


def test_time_shift_example(octagon):
    p = trace(octagon, TangentState(0, 0.0, 0.0, 0.0), 2.5)
    q = time_shift(p, 1.0)
    assert q.length == pytest.approx(1.5, abs=1e-12)
    assert q.start.x == pytest.approx(-APOTHEM + (1.0 - APOTHEM), abs=1e-12)


def test_time_shift_composes(octagon):
    p = trace(octagon, TangentState(0, 0.05, 0.02, 1.1), 5.0)
    a, b = 1.3, 0.9
    q1 = time_shift(time_shift(p, a), b)
    q2 = time_shift(p, a + b)
    assert q1.start.face == q2.start.face
    assert (q1.start.x, q1.start.y) == pytest.approx((q2.start.x, q2.start.y), abs=1e-9)
    assert q1.length == pytest.approx(q2.length, abs=1e-9)


def test_time_shift_out_of_window(octagon):
    p = trace(octagon, TangentState(0, 0.0, 0.0, 0.0), 1.0)
    with pytest.raises(OutOfWindowError):
        time_shift(p, 2.0)


def test_state_point_consistency(octagon):
    p = trace(octagon, TangentState(0, 0.0, 0.0, 0.37), 5.0)
    st = state_at(p, 2.2)
    pt = point_at(p, 2.2)
    assert (st.face, st.x, st.y) == (pt.face, pt.x, pt.y)


def test_determinism(octagon):
    a = trace(octagon, TangentState(0, 0.01, 0.02, 0.777), 30.0)
    b = trace(octagon, TangentState(0, 0.01, 0.02, 0.777), 30.0)
    assert a.end == b.end
    assert [s.length for s in a.segments] == [s.length for s in b.segments]


def test_ray_uniqueness_surrogate(octagon):
    # distinct directions from one point: developed images share only the start
    p1 = trace(octagon, TangentState(0, 0.0, 0.0, 0.3), 10.0)
    p2 = trace(octagon, TangentState(0, 0.0, 0.0, 0.9), 10.0)
    _, l1 = develop(p1)
    _, l2 = develop(p2)
    assert l1[0] == l2[0]
    assert math.dist(l1[-1], l2[-1]) > 1.0


def test_compare_paths_zero_and_symmetry(octagon):
    g1 = trace(octagon, TangentState(0, 0.0, -0.025, 0.0), 4.2)
    g2 = trace(octagon, TangentState(0, 0.0, 0.025, 0.0), 4.2)
    assert compare_paths(g1, g1, 2.0) == 0.0
    assert compare_paths(g1, g2, 2.0) == pytest.approx(compare_paths(g2, g1, 2.0), abs=1e-12)


def test_compare_paths_parallel_closed_form(octagon):
    g1 = trace(octagon, TangentState(0, 0.0, -0.025, 0.0), 4.2)
    g2 = trace(octagon, TangentState(0, 0.0, 0.025, 0.0), 4.2)
    want = 0.05 * (2 - 2 * math.exp(-2.0))
    assert compare_paths(g1, g2, 2.0) == pytest.approx(want, abs=1e-6)


def test_compare_paths_chart_mismatch(octagon):
    g1 = trace(octagon, TangentState(0, 0.0, 0.0, 0.0), 1.0)
    g2 = dataclasses.replace(g1, start=dataclasses.replace(g1.start, face=1))
    with pytest.raises(ChartMismatchError):
        compare_paths(g1, g2, 1.0)


def test_min_cone_profile_mid_loop(octagon):
    p = trace(octagon, TangentState(0, 0.0, 0.0, 0.0), 2 * APOTHEM)
    prof = min_cone_distance_profile(octagon, p)
    assert prof[-1][1] == pytest.approx(math.sin(math.pi / 8), abs=1e-9)
    assert min(v for _, v in prof) == pytest.approx(math.sin(math.pi / 8), abs=1e-9)


def test_min_cone_profile_reaches_zero_on_hit(octagon):
    p = trace(octagon, TangentState(0, 0.0, 0.0, VERTEX_DIR), 2.0)
    prof = min_cone_distance_profile(octagon, p)
    assert prof[-1][1] == pytest.approx(0.0, abs=1e-9)


def test_min_cone_profile_non_increasing(octagon):
    p = trace(octagon, TangentState(0, 0.03, -0.04, 0.73), 40.0)
    prof = min_cone_distance_profile(octagon, p)
    vals = [v for _, v in prof]
    assert all(b <= a + 1e-12 for a, b in zip(vals, vals[1:]))
