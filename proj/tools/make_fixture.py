#!/usr/bin/env python3
"""Generates data/airspace_fixture.json.

The airspace is authored in local meters around a projection origin and
converted to lat/lon with the same equirectangular projection the loader uses.
Six concave no-fly zones (two C shapes, two U shapes, a plus, an L) and ten
perimeter vertiports, roughly 13 km across.
"""
import json
import math
import os

R_EARTH = 6371000.0
ORIGIN = {"lat": 52.2, "lon": 0.1}


def to_geo(x, y):
    lat = ORIGIN["lat"] + math.degrees(y / R_EARTH)
    lon = ORIGIN["lon"] + math.degrees(x / (R_EARTH * math.cos(math.radians(ORIGIN["lat"]))))
    return {"lat": round(lat, 10), "lon": round(lon, 10)}


def transform(unit_pts, cx, cy, scale, rot_deg):
    rot = math.radians(rot_deg)
    c, s = math.cos(rot), math.sin(rot)
    out = []
    for ux, uy in unit_pts:
        x = ux * scale
        y = uy * scale
        out.append((cx + x * c - y * s, cy + x * s + y * c))
    return out


# Unit C shape opening toward +x, CCW.
C_SHAPE = [(-1, -1), (1, -1), (1, -0.4), (-0.4, -0.4), (-0.4, 0.4), (1, 0.4), (1, 1), (-1, 1)]

# Plus shape, CCW, arm half-length L=1.0, half-width w=0.32.
W = 0.32
PLUS = [
    (W, W), (W, 1.0), (-W, 1.0), (-W, W), (-1.0, W), (-1.0, -W),
    (-W, -W), (-W, -1.0), (W, -1.0), (W, -W), (1.0, -W), (1.0, W),
]

# L shape, CCW, authored directly in meters (no scaling).
L_SHAPE = [(-1200, 3800), (1200, 3800), (1200, 4800), (400, 4800), (400, 4300), (-1200, 4300)]

NFZS = [
    ("c-west-quadrant", transform(C_SHAPE, -2800, 2800, 1000, 0)),
    ("u-north-quadrant", transform(C_SHAPE, 2800, 2800, 1000, 90)),
    ("c-east-quadrant", transform(C_SHAPE, 2800, -2800, 1000, 180)),
    ("u-south-quadrant", transform(C_SHAPE, -2800, -2800, 1000, 270)),
    ("plus-center", transform(PLUS, 0, 0, 1400, 0)),
    ("l-north", L_SHAPE),
]

VERTIPORTS = [
    ("0", -5500, 5500),
    ("1", 0, 5800),
    ("2", 5500, 5500),
    ("3", 5800, 0),
    ("4", 5500, -5500),
    ("5", 0, -5800),
    ("6", -5500, -5500),
    ("7", -5800, 0),
    ("8", -2800, 5700),
    ("9", 2800, -5700),
]

BOUNDS = [(-6500, -6500), (6500, -6500), (6500, 6500), (-6500, 6500)]


def main():
    doc = {
        "origin": ORIGIN,
        "bounds": [to_geo(x, y) for x, y in BOUNDS],
        "nfzs": [{"id": name, "ring": [to_geo(x, y) for x, y in ring]}
                 for name, ring in NFZS],
        "vertiports": [{"id": vid, **to_geo(x, y)} for vid, x, y in VERTIPORTS],
    }
    out = os.path.join(os.path.dirname(__file__), "..", "data", "airspace_fixture.json")
    os.makedirs(os.path.dirname(out), exist_ok=True)
    with open(out, "w") as f:
        json.dump(doc, f, indent=2)
        f.write("\n")
    print("wrote", os.path.normpath(out))


if __name__ == "__main__":
    main()
