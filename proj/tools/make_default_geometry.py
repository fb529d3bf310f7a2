#!/usr/bin/env python3
"""Regenerate data/default_geometry.json.

Symmetric four-legged intersection, right-hand traffic, two lanes per
direction (inner lane offset 1.75 m, outer lane offset 5.25 m from the road
centre line). The square intersection box spans [-7, 7] m on both axes.

Straight paths use the outer lanes and run 99 m + 14 m + 99 m = 212 m.
The two left turns use dedicated inner lanes on entry and exit, follow a
quarter circle inside the box, and are padded on the exit leg to 215 m.
No path shares a lane segment with another; paths only cross at points.
"""
import json
import math
import sys

from shapely.geometry import LineString, Point

APPROACH = 99.0
BOX = 7.0
INNER = 1.75
OUTER = 5.25
STRAIGHT_LEN = 212.0
TURN_LEN = 215.0


def straight(start, end):
    return LineString([start, end])


def left_turn(entry, arc_center, radius, a0, a1, exit_dir):
    pts = [entry]
    n = 400
    for k in range(n + 1):
        a = a0 + (a1 - a0) * k / n
        pts.append((arc_center[0] + radius * math.cos(a), arc_center[1] + radius * math.sin(a)))
    arc_len = radius * abs(a1 - a0)
    exit_leg = TURN_LEN - APPROACH - arc_len
    last = pts[-1]
    pts.append((last[0] + exit_dir[0] * exit_leg, last[1] + exit_dir[1] * exit_leg))
    return LineString(pts)


L = APPROACH + BOX
paths = {
    1: ("straight", "eastbound", straight((-L, -OUTER), (L, -OUTER))),
    2: ("straight", "westbound", straight((L, OUTER), (-L, OUTER))),
    3: ("straight", "northbound", straight((OUTER, -L), (OUTER, L))),
    4: ("straight", "southbound", straight((-OUTER, L), (-OUTER, -L))),
    # northbound inner lane turning left onto the westbound inner lane
    5: ("turn", "northbound-left", left_turn((INNER, -L), (-BOX, -BOX), BOX + INNER, 0.0, math.pi / 2, (-1.0, 0.0))),
    # southbound inner lane turning left onto the eastbound inner lane
    6: ("turn", "southbound-left", left_turn((-INNER, L), (BOX, BOX), BOX + INNER, math.pi, 1.5 * math.pi, (1.0, 0.0))),
}

out_paths = []
for pid, (kind, name, line) in paths.items():
    expected = STRAIGHT_LEN if kind == "straight" else TURN_LEN
    assert abs(line.length - expected) < 1e-3, (pid, line.length)
    out_paths.append({"id": pid, "name": name, "kind": kind, "length_m": expected})

conflicts = []
ids = sorted(paths)
for i, a in enumerate(ids):
    for b in ids[i + 1:]:
        inter = paths[a][2].intersection(paths[b][2])
        if inter.is_empty:
            continue
        assert isinstance(inter, Point), (a, b, inter)
        da = paths[a][2].project(inter)
        db = paths[b][2].project(inter)
        conflicts.append({
            "id": len(conflicts) + 1,
            "locations": [
                {"path_id": a, "distance_m": round(da, 3)},
                {"path_id": b, "distance_m": round(db, 3)},
            ],
        })

json.dump({"paths": out_paths, "conflicts": conflicts}, sys.stdout, indent=2)
sys.stdout.write("\n")
