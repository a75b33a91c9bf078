"""
Geometry helpers shared by the layout, furnishing and validation services.

Top-down coordinates are (x, z) in meters, x to the east and z to the north.
Rotations are multiples of 90 degrees measured counter-clockwise from +z.
"""

from typing import Dict, Iterable, List, NamedTuple, Tuple

import numpy as np
from shapely.geometry import MultiPolygon, Polygon, box
from shapely.geometry.polygon import orient
from shapely.ops import polylabel, unary_union

EPS = 1e-6
EXTERIOR = "exterior"

Point2 = Tuple[float, float]


class Rect(NamedTuple):
    min_x: float
    min_z: float
    max_x: float
    max_z: float

    @property
    def width(self) -> float:
        return self.max_x - self.min_x

    @property
    def depth(self) -> float:
        return self.max_z - self.min_z

    @property
    def area(self) -> float:
        return max(0.0, self.width) * max(0.0, self.depth)

    @property
    def center(self) -> Point2:
        return ((self.min_x + self.max_x) / 2, (self.min_z + self.max_z) / 2)

    def overlaps(self, other: "Rect", tol: float = EPS) -> bool:
        """True when the interiors intersect (touching edges do not count)"""
        return (
            self.min_x < other.max_x - tol
            and other.min_x < self.max_x - tol
            and self.min_z < other.max_z - tol
            and other.min_z < self.max_z - tol
        )

    def contains(self, other: "Rect", tol: float = EPS) -> bool:
        return (
            other.min_x >= self.min_x - tol
            and other.max_x <= self.max_x + tol
            and other.min_z >= self.min_z - tol
            and other.max_z <= self.max_z + tol
        )

    def inflate(self, left: float = 0.0, bottom: float = 0.0, right: float = 0.0, top: float = 0.0) -> "Rect":
        return Rect(self.min_x - left, self.min_z - bottom, self.max_x + right, self.max_z + top)

    def to_polygon(self) -> Polygon:
        return box(self.min_x, self.min_z, self.max_x, self.max_z)

    @classmethod
    def around(cls, center: Point2, width: float, depth: float) -> "Rect":
        cx, cz = center
        return cls(cx - width / 2, cz - depth / 2, cx + width / 2, cz + depth / 2)


# Unit vector the front of an object faces for each rotation
FRONT: Dict[int, Point2] = {0: (0.0, 1.0), 90: (-1.0, 0.0), 180: (0.0, -1.0), 270: (1.0, 0.0)}


def rotation_for_front(direction: Point2) -> int:
    """Rotation whose front faces `direction` (an axis-aligned unit vector)"""
    for rotation, front in FRONT.items():
        if abs(front[0] - direction[0]) < EPS and abs(front[1] - direction[1]) < EPS:
            return rotation
    raise ValueError(f"Direction {direction} is not axis aligned")


def rotated_extents(width: float, depth: float, rotation: int) -> Tuple[float, float]:
    """World (x, z) extents of a (width, depth) footprint after rotation"""
    if rotation % 180 == 90:
        return depth, width
    return width, depth


def rotate_point(point: Point2, rotation: int) -> Point2:
    """Rotate a local (x, z) offset counter-clockwise by a multiple of 90 degrees"""
    x, z = point
    r = rotation % 360
    if r == 0:
        return (x, z)
    if r == 90:
        return (-z, x)
    if r == 180:
        return (-x, -z)
    return (z, -x)


def footprint(center: Point2, width: float, depth: float, rotation: int) -> Rect:
    w, d = rotated_extents(width, depth, rotation)
    return Rect.around(center, w, d)


def padded_footprint(rect: Rect, rotation: int, front_pad: float = 0.0, side_pad: float = 0.0) -> Rect:
    """Footprint inflated by `side_pad` on every side plus `front_pad` in front"""
    fx, fz = FRONT[rotation % 360]
    out = rect.inflate(side_pad, side_pad, side_pad, side_pad)
    return out.inflate(
        left=front_pad if fx < 0 else 0.0,
        bottom=front_pad if fz < 0 else 0.0,
        right=front_pad if fx > 0 else 0.0,
        top=front_pad if fz > 0 else 0.0,
    )


def cells_to_polygon(cells: Iterable[Tuple[int, int]], scale: float = 1.0) -> Polygon:
    """Counter-clockwise polygon covering a 4-connected set of unit cells"""
    shape = unary_union([box(x * scale, z * scale, (x + 1) * scale, (z + 1) * scale) for x, z in cells])
    if isinstance(shape, MultiPolygon):
        raise ValueError("Cell set is not connected")
    shape = shape.simplify(0)
    return orient(shape, sign=1.0)


def polygon_vertices(polygon: Polygon) -> List[Point2]:
    """Exterior ring without the closing vertex"""
    coords = list(orient(polygon, sign=1.0).exterior.coords)[:-1]
    return [(float(x), float(z)) for x, z in coords]


def interior_point(polygon: Polygon) -> Point2:
    """Centroid when it falls inside, otherwise the pole of inaccessibility"""
    c = polygon.centroid
    if polygon.contains(c):
        return (float(c.x), float(c.y))
    p = polylabel(polygon, tolerance=0.01)
    return (float(p.x), float(p.y))


def subtract_intervals(intervals: List[Tuple[float, float]], cut: Tuple[float, float]) -> List[Tuple[float, float]]:
    """Remove `cut` from a list of disjoint 1D intervals"""
    lo, hi = cut
    out = []
    for a, b in intervals:
        if hi <= a + EPS or lo >= b - EPS:
            out.append((a, b))
            continue
        if lo > a + EPS:
            out.append((a, lo))
        if hi < b - EPS:
            out.append((hi, b))
    return out


def flood_fill(mask: np.ndarray, seed: Tuple[int, int]) -> np.ndarray:
    """4-connected component of `mask` containing `seed`"""
    seen = np.zeros_like(mask, dtype=bool)
    if not mask[seed]:
        return seen
    stack = [seed]
    seen[seed] = True
    nx, nz = mask.shape
    while stack:
        x, z = stack.pop()
        for dx, dz in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            a, b = x + dx, z + dz
            if 0 <= a < nx and 0 <= b < nz and mask[a, b] and not seen[a, b]:
                seen[a, b] = True
                stack.append((a, b))
    return seen


def is_connected(mask: np.ndarray) -> bool:
    cells = np.argwhere(mask)
    if len(cells) == 0:
        return False
    return int(flood_fill(mask, tuple(cells[0])).sum()) == len(cells)
