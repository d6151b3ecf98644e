"""Guided tour: tracing, development, shortening, cylinders, certificates.

Run: python3 demos/tour.py
"""
import math

from conetrace import (
    Crossing,
    Loop,
    TangentState,
    builtin,
    certificate_text,
    develop,
    find_unique_closed,
    flat_cylinder,
    holonomy,
    shorten,
    trace,
    validate,
)


def main():
    s = builtin("octagon6pi")
    rep = validate(s)
    print(f"surface octagon6pi: chi={rep.euler_characteristic} genus={rep.genus}")
    for cid, theta in rep.cone_points:
        print(f"  cone class {cid}: angle {theta / math.pi:.1f}*pi")

    # a geodesic is a straight line in the developed plane
    p = trace(s, TangentState(0, 0.0, 0.0, 0.3), 25.0)
    _, poly = develop(p)
    chord = math.dist(poly[0], poly[-1])
    print(f"\ntraced length {p.length:g}, developed chord {chord:.12f}")
    print(f"edge crossings: {len(p.edge_crossings)}")

    # the horizontal mid-loop closes up; its holonomy is a pure translation
    loop = trace(s, TangentState(0, 0.0, 0.0, 0.0), 2 * math.cos(math.pi / 8))
    h = holonomy(s, loop)
    print(f"\nmid-loop holonomy: rot={h.rot:.2e} t=({h.tx:.6f}, {h.ty:.6f})")

    # shortening a kinked representative recovers the geodesic core
    g = shorten(s, Loop([Crossing(0, True, 0.3)], kinks=[(0, (0.1, 0.2))]))
    print(f"shortened period {g.period:.12f} (expect 2cos(pi/8) = {2 * math.cos(math.pi / 8):.12f})")
    cyl = flat_cylinder(s, g)
    print(f"flat cylinder widths {cyl.width_left:.6f} / {cyl.width_right:.6f} (expect sin(pi/8))")

    # a geodesic through the cone point, unique in its homotopy class
    u = find_unique_closed(s, budget=200)
    print("\nunique closed geodesic certificate:")
    print(certificate_text(s, u))


if __name__ == "__main__":
    main()
