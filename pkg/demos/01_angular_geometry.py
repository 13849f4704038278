"""Tour of the spherical primitives: distances, caps, quantile radii.

Run with:  python3 demos/01_angular_geometry.py
"""

import math

import numpy as np

from semdrift import (
    SphericalCap,
    UnitVector,
    angular_distance,
    caps_intersect,
    nearest_rank_quantile,
    normalize,
    quantile_radius,
)

print("== unit vectors and the angular metric ==")
east = UnitVector(np.array([1.0, 0.0, 0.0]))
north = normalize([0.0, 0.0, 2.5])  # normalize() accepts any nonzero vector
diagonal = normalize([1.0, 1.0, 0.0])

print(f"d(east, north)    = {angular_distance(east, north):.6f}  (pi/2)")
print(f"d(east, diagonal) = {angular_distance(east, diagonal):.6f}  (pi/4)")
print(f"d(east, east)     = {angular_distance(east, east)!r}  (exactly zero)")

# Nearly parallel vectors stress the arccos clamp; the result stays finite.
wobble = normalize([1.0, 1e-7, 0.0])
print(f"d(east, 1e-7 wobble)  = {angular_distance(east, wobble):.3e}")

print()
print("== open caps ==")
cap = SphericalCap(east, 0.5)
inside = normalize([math.cos(0.49), math.sin(0.49), 0.0])
outside = normalize([math.cos(0.51), math.sin(0.51), 0.0])
print(f"cap(east, 0.5) contains point at angle 0.49: {cap.contains(inside)}")
print(f"cap(east, 0.5) contains point at angle 0.51: {cap.contains(outside)}")

# Caps are open, so two caps whose radii sum to exactly the center
# distance do not intersect; any positive slack makes them meet.  The
# radii come from the measured distance so the boundary case is exact.
other_center = normalize([math.cos(1.0), math.sin(1.0), 0.0])
gap = angular_distance(east, other_center)
touching = caps_intersect(
    SphericalCap(east, gap / 2), SphericalCap(other_center, gap / 2)
)
overlapping = caps_intersect(
    SphericalCap(east, gap / 2), SphericalCap(other_center, gap / 2 + 1e-9)
)
print(f"radii sum == center distance: intersect? {touching}")
print(f"radii sum slightly larger:    intersect? {overlapping}")

print()
print("== nearest-rank quantiles pick radii from observed distances ==")
distances = [0.31, 0.12, 0.47, 0.25, 0.19]
for q in (0.2, 0.5, 1.0):
    print(f"q={q:3}: rank value {nearest_rank_quantile(distances, q)}")

points = [
    normalize([math.cos(phi), math.sin(phi), 0.0])
    for phi in (0.0, 0.1, 0.25, 0.4)
]
angles = [
    angular_distance(points[i], points[j])
    for i in range(len(points))
    for j in range(i + 1, len(points))
]
radius = quantile_radius(angles, 0.5)
print(f"shared cap radius at q=0.5 over {len(angles)} pairwise angles: {radius:.4f}")
