#!/usr/bin/env python3
"""Writes the bundled synthetic maps into data/maps as JSON."""

import argparse
import json
import math
from pathlib import Path

HALF_WIDTH = 4.0
LANE_OFFSET = 2.0
ARM = 60.0


def r6(v):
    return round(v, 6)


def pt(p):
    return [r6(p[0]), r6(p[1])]


def rot(p, a):
    c, s = math.cos(a), math.sin(a)
    return (c * p[0] - s * p[1], s * p[0] + c * p[1])


def rect_tris(x0, x1, y0, y1, pieces=1):
    """Axis-aligned rectangle split into strips along x."""
    tris = []
    for k in range(pieces):
        a = x0 + (x1 - x0) * k / pieces
        b = x0 + (x1 - x0) * (k + 1) / pieces
        tris.append([(a, y0), (b, y0), (b, y1)])
        tris.append([(a, y0), (b, y1), (a, y1)])
    return tris


def rotate_tris(tris, a):
    return [[rot(p, a) for p in t] for t in tris]


def arc(center, radius, a0, a1, step_deg=7.5):
    n = max(2, int(math.ceil(abs(math.degrees(a1 - a0)) / step_deg)))
    return [(center[0] + radius * math.cos(a0 + (a1 - a0) * k / n),
             center[1] + radius * math.sin(a0 + (a1 - a0) * k / n)) for k in range(n + 1)]


def bezier(p0, p1, p2, n=8):
    out = []
    for k in range(n + 1):
        t = k / n
        u = 1 - t
        out.append((u * u * p0[0] + 2 * u * t * p1[0] + t * t * p2[0],
                    u * u * p0[1] + 2 * u * t * p1[1] + t * t * p2[1]))
    return out


def dedupe(points):
    out = []
    for p in points:
        if not out or math.dist(out[-1], p) > 1e-6:
            out.append(p)
    return out


def bundle(name, tris, lanes, stop_lines=(), controls=()):
    return {
        "name": name,
        "triangles": [[pt(p) for p in t] for t in tris],
        "lanes": [{"id": i, "points": [pt(p) for p in dedupe(l)]} for i, l in enumerate(lanes)],
        "stop_lines": list(stop_lines),
        "controls": list(controls),
    }


def straight_road():
    tris = rect_tris(0.0, 200.0, -HALF_WIDTH, HALF_WIDTH, pieces=10)
    lanes = [[(0.0, -LANE_OFFSET), (200.0, -LANE_OFFSET)],
             [(200.0, LANE_OFFSET), (0.0, LANE_OFFSET)]]
    return bundle("straight_road", tris, lanes)


def junction(name, arms):
    """Right-hand traffic junction with arms at multiples of 90 degrees (0 = east).

    Every approach gets full routes (straight, left, right) to each existing arm, and a
    stop line with a default stop sign just before the junction box.
    """
    h = HALF_WIDTH
    tris = rect_tris(-h, h, -h, h)
    for arm in arms:
        tris += rotate_tris(rect_tris(h, ARM, -h, h, pieces=4), arm * math.pi / 2)

    lanes, stops, controls = [], [], []
    o = LANE_OFFSET
    # Canonical approach from the east, driving west on y = +o.
    routes = {
        2: [(ARM, o), (h, o), (-h, o), (-ARM, o)],
        1: [(ARM, o), (h, o)] + arc((h, h), h - o, -math.pi / 2, -math.pi) + [(o, ARM)],
        3: [(ARM, o), (h, o)] + arc((h, -h), h + o, math.pi / 2, math.pi) + [(-o, -ARM)],
    }
    for arm in arms:
        a = arm * math.pi / 2
        for turn in (2, 3, 1):  # straight, left, right
            if (arm + turn) % 4 not in arms:
                continue
            lanes.append([rot(p, a) for p in routes[turn]])
        cid = f"stop_{arm}"
        c = rot((h + 1.0, o), a)
        stops.append({"control": cid, "center": pt(c), "psi": r6(math.atan2(math.sin(a + math.pi), math.cos(a + math.pi))),
                      "length": 0.6, "width": 2 * o})
        controls.append({"id": cid, "kind": "stop_sign"})
    return bundle(name, tris, lanes, stops, controls)


def roundabout():
    inner, outer, ring = 12.0, 20.0, 16.0
    n = 64
    tris = []
    for k in range(n):
        a0 = 2 * math.pi * k / n
        a1 = 2 * math.pi * (k + 1) / n
        p0, p1 = rot((inner, 0), a0), rot((inner, 0), a1)
        q0, q1 = rot((outer, 0), a0), rot((outer, 0), a1)
        tris.append([p0, q0, q1])
        tris.append([p0, q1, p1])
    for arm in range(4):
        tris += rotate_tris(rect_tris(13.0, ARM, -HALF_WIDTH, HALF_WIDTH, pieces=4), arm * math.pi / 2)

    # Counter-clockwise circulation, lane 0 is the closed ring.
    ring_loop = arc((0, 0), ring, 0.0, 2 * math.pi, step_deg=5.0)
    ring_loop[-1] = ring_loop[0]
    lanes = [ring_loop]
    blend = math.radians(25)
    o = LANE_OFFSET
    for arm in range(4):
        phi = arm * math.pi / 2
        for quarters in (1, 2, 3):
            phe = phi + quarters * math.pi / 2
            entry = [rot((ARM, o), phi), rot((24.0, o), phi)]
            entry += bezier(rot((24.0, o), phi), rot((17.0, o), phi), rot((ring, 0), phi + blend))[1:]
            loop = arc((0, 0), ring, phi + blend, phe - blend, step_deg=5.0)[1:]
            leave = bezier(rot((ring, 0), phe - blend), rot((17.0, -o), phe), rot((24.0, -o), phe))[1:]
            leave.append(rot((ARM, -o), phe))
            lanes.append(entry + loop + leave)
    return bundle("roundabout", tris, lanes)


def rural_road():
    length, amp, wave, step = 300.0, 15.0, 150.0, 3.0

    def center(x):
        return (x, amp * math.sin(2 * math.pi * x / wave))

    def normal(x):
        dy = amp * 2 * math.pi / wave * math.cos(2 * math.pi * x / wave)
        n = math.hypot(1.0, dy)
        return (-dy / n, 1.0 / n)  # left of eastbound travel

    def offset(x, d):
        c, nv = center(x), normal(x)
        return (c[0] + d * nv[0], c[1] + d * nv[1])

    xs = [k * step for k in range(int(length / step) + 1)]
    tris = []
    for a, b in zip(xs, xs[1:]):
        ra, rb = offset(a, -HALF_WIDTH), offset(b, -HALF_WIDTH)
        la, lb = offset(a, HALF_WIDTH), offset(b, HALF_WIDTH)
        tris.append([ra, rb, lb])
        tris.append([ra, lb, la])
    east = [offset(x, -LANE_OFFSET) for x in xs]
    west = [offset(x, LANE_OFFSET) for x in reversed(xs)]
    return bundle("rural_road", tris, [east, west])


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=Path(__file__).resolve().parent.parent / "data" / "maps")
    args = parser.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    maps = [straight_road(), junction("four_way", [0, 1, 2, 3]), junction("three_way", [0, 2, 3]),
            roundabout(), rural_road()]
    for m in maps:
        path = args.out / f"{m['name']}.json"
        path.write_text(json.dumps(m, separators=(",", ":")) + "\n")
        print(path, len(m["triangles"]), "triangles", len(m["lanes"]), "lanes")


if __name__ == "__main__":
    main()
