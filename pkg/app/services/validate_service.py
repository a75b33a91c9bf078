from collections import deque
from math import ceil
from typing import Dict, List, Optional, Sequence, Tuple
import logging
import time

import numpy as np
import shapely
from shapely.geometry import LineString, Polygon
from shapely.ops import unary_union

from app.core.config import Settings, settings
from app.core.exceptions import NoFreeCell, NoReachableTarget
from app.models.catalog import AssetCatalog
from app.models.house import House, PlacedObject
from app.models.navigation import EpisodeTargetState, NavGrid
from app.schemas.reports import ValidationReport
from app.services.furnish_service import opening_span
from app.utils.geometry import EPS, rotate_point, subtract_intervals
from app.utils.helpers import bernoulli

logger = logging.getLogger(__name__)

Point3 = Tuple[float, float, float]


def wall_lines(house: House) -> List[LineString]:
    """Wall pieces left standing once passable openings are cut out"""
    by_id = {w.id: w for w in house.walls}
    passable = [o for o in house.openings() if not o.closed]
    lines = []
    for wall in house.walls:
        intervals = [(0.0, wall.length)]
        for opening in passable:
            span = opening_span(opening, by_id[opening.wall], wall)
            if span:
                intervals = subtract_intervals(intervals, span)
        for lo, hi in intervals:
            lines.append(LineString([wall.point_at(lo), wall.point_at(hi)]))
    return lines


def floor_footprints(house: House) -> List[Polygon]:
    return [o.footprint().to_polygon() for o in house.all_objects() if o.bottom < EPS]


def bfs(free: np.ndarray, seed: Tuple[int, int]) -> np.ndarray:
    """4-connected breadth-first search over free cells"""
    seen = np.zeros_like(free, dtype=bool)
    seen[seed] = True
    queue = deque([seed])
    nx, nz = free.shape
    while queue:
        i, j = queue.popleft()
        for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            a, b = i + di, j + dj
            if 0 <= a < nx and 0 <= b < nz and free[a, b] and not seen[a, b]:
                seen[a, b] = True
                queue.append((a, b))
    return seen


class ValidateService:
    def __init__(self, catalog: Optional[AssetCatalog] = None, config: Settings = settings):
        self.catalog = catalog
        self.config = config

    def reachable_positions(self, house: House, agent_radius: Optional[float] = None, cell: Optional[float] = None) -> NavGrid:
        """Free cells clear of walls and floor footprints by the agent radius, then BFS from the first one"""
        radius = self.config.AGENT_RADIUS if agent_radius is None else agent_radius
        cell = cell or self.config.NAV_CELL_SIZE
        polygons = [Polygon(r.floor_polygon) for r in house.rooms]
        max_x = max(p.bounds[2] for p in polygons)
        max_z = max(p.bounds[3] for p in polygons)
        nx, nz = int(ceil(max_x / cell - EPS)), int(ceil(max_z / cell - EPS))
        gx, gz = np.meshgrid((np.arange(nx) + 0.5) * cell, (np.arange(nz) + 0.5) * cell, indexing="ij")

        room_index = np.full((nx, nz), -1, dtype=int)
        for k, poly in enumerate(polygons):
            room_index[shapely.contains_xy(poly, gx, gz) & (room_index < 0)] = k
        inside = room_index >= 0

        obstacles = unary_union(wall_lines(house) + floor_footprints(house))
        blocked = shapely.intersects_xy(obstacles.buffer(radius), gx, gz) if not obstacles.is_empty else np.zeros_like(inside)
        free = inside & ~blocked

        cells = np.argwhere(free)
        if len(cells) == 0:
            raise NoFreeCell(f"House {house.metadata.seed} has no free agent position")
        seed = (int(cells[0][0]), int(cells[0][1]))
        reachable = bfs(free, seed)
        return NavGrid(
            cell_size=cell,
            agent_radius=radius,
            free=free,
            reachable=reachable,
            room_index=room_index,
            room_ids=[r.id for r in house.rooms],
            seed=seed,
        )

    def validate_house(self, house: House, nav: Optional[NavGrid] = None) -> ValidationReport:
        """Pass iff every room holds at least the minimum number of reachable cells"""
        start = time.perf_counter()
        threshold = self.config.MIN_REACHABLE_PER_ROOM
        try:
            nav = nav or self.reachable_positions(house)
        except NoFreeCell as e:
            return ValidationReport(passed=False, failures=[str(e)], threshold=threshold, seconds=time.perf_counter() - start)
        counts = nav.room_counts()
        failures = [f"{rid}: {n} reachable positions" for rid, n in counts.items() if n < threshold]
        if failures:
            logger.debug(f"House {house.metadata.seed} failed validation: {failures}")
        return ValidationReport(
            passed=not failures,
            room_counts=counts,
            failures=failures,
            threshold=threshold,
            seconds=time.perf_counter() - start,
        )

    # Target reachability

    def visibility_points(self, obj: PlacedObject) -> List[Point3]:
        """World-space visibility points; bbox face centers without a catalog entry"""
        local = None
        if self.catalog is not None and self.catalog.has_instance(obj.asset_id):
            local = self.catalog.instance(obj.asset_id).visibility_points
        if not local:
            x, y, z = obj.size.x / 2, obj.size.y / 2, obj.size.z / 2
            local = [(x, 0.0, 0.0), (-x, 0.0, 0.0), (0.0, y, 0.0), (0.0, -y, 0.0), (0.0, 0.0, z), (0.0, 0.0, -z)]
        out = []
        for lx, ly, lz in local:
            dx, dz = rotate_point((lx, lz), obj.rotation)
            out.append((obj.position.x + dx, obj.position.y + ly, obj.position.z + dz))
        return out

    @staticmethod
    def _inside(child: PlacedObject, parent: PlacedObject) -> bool:
        return parent.footprint().contains(child.footprint()) and child.bottom >= parent.bottom - EPS and child.top <= parent.top + EPS

    def _occluders(self, house: House, target: PlacedObject, parents: Dict[str, PlacedObject]):
        shapes = list(wall_lines(house))
        parent = parents.get(target.id)
        for obj in house.all_objects():
            if obj.id == target.id:
                continue
            if parent is not None and obj.id == parent.id:
                if self._inside(target, parent):
                    shapes.append(obj.footprint().to_polygon())
                continue
            if obj.top > self.config.CAMERA_HEIGHT:
                shapes.append(obj.footprint().to_polygon().buffer(-1e-6))
        return unary_union(shapes)

    def reachable_targets(self, house: House, nav: NavGrid, object_type: str) -> List[str]:
        """Instances seen from one of the nearest reachable cells within the distance limit"""
        c = self.config
        parents: Dict[str, PlacedObject] = {}
        for obj in house.all_objects():
            for child in obj.children:
                parents[child.id] = obj
        cells = nav.reachable_cells()
        if not cells:
            return []
        centers = np.array([nav.center(i, j) for i, j in cells])

        out = []
        for target in sorted((o for o in house.all_objects() if o.asset_type == object_type), key=lambda o: o.id):
            d2 = (centers[:, 0] - target.position.x) ** 2 + (centers[:, 1] - target.position.z) ** 2
            nearest = np.argsort(d2, kind="stable")[: c.TARGET_NEAREST_POSITIONS]
            occluders = self._occluders(house, target, parents)
            if self._visible(centers[nearest], self.visibility_points(target), occluders):
                out.append(target.id)
        return out

    def _visible(self, positions: np.ndarray, points: Sequence[Point3], occluders) -> bool:
        c = self.config
        for px, pz in positions:
            for vx, vy, vz in points:
                dist = float(np.sqrt((vx - px) ** 2 + (vy - c.CAMERA_HEIGHT) ** 2 + (vz - pz) ** 2))
                if dist >= c.TARGET_MAX_DISTANCE:
                    continue
                if occluders.is_empty or not occluders.intersects(LineString([(px, pz), (vx, vz)])):
                    return True
        return False

    def targets_by_type(self, house: House, nav: NavGrid, object_types: Sequence[str]) -> Dict[str, List[str]]:
        return {t: self.reachable_targets(house, nav, t) for t in sorted(object_types)}


def sample_episode_target(targets_by_type: Dict[str, List[str]], state: EpisodeTargetState, rng: np.random.Generator) -> str:
    """Epsilon-greedy: uniform with probability epsilon, else the least-sampled type (ties by name)"""
    available = sorted(t for t, ids in targets_by_type.items() if ids)
    if not available:
        raise NoReachableTarget("No object type has a reachable instance")
    if bernoulli(state.epsilon, rng):
        choice = available[int(rng.integers(len(available)))]
    else:
        choice = min(available, key=lambda t: (state.counts.get(t, 0), t))
    state.record(choice)
    return choice
