from collections import deque
from math import ceil, floor, sqrt
from typing import Dict, List, Optional, Tuple
import logging

import numpy as np

from app.core.exceptions import SubdivisionFailure
from app.models.layout import FloorPlan, GenParams, InteriorBoundary, PlanRoom
from app.models.roomspec import BoundaryOverride, NodeKind, RoomSpec, SpecNode
from app.utils.geometry import cells_to_polygon, is_connected

logger = logging.getLogger(__name__)

DIRECTIONS = ((1, 0), (-1, 0), (0, 1), (0, -1))
FREE = -1
OUTSIDE = -2


class _GrowthFailed(Exception):
    pass


def boundary_support(room_count: int, params: GenParams) -> Tuple[int, int]:
    """Integer support of x_size, z_size with real bounds rounded inward"""
    mu = params.mean_side_per_room
    lo = max(params.min_side, mu * sqrt(room_count) - mu / 2)
    hi = mu * sqrt(room_count) + mu / 2
    lo_i, hi_i = ceil(lo - 1e-9), floor(hi + 1e-9)
    return lo_i, max(lo_i, hi_i)


def cut_corner(grid: np.ndarray, cut_x: int, cut_z: int, corner: int) -> np.ndarray:
    """Copy of `grid` with a cut_x by cut_z rectangle cleared at a corner (0=SW, 1=SE, 2=NW, 3=NE)"""
    x_size, z_size = grid.shape
    xs = slice(0, min(cut_x, x_size)) if corner in (0, 2) else slice(max(0, x_size - cut_x), x_size)
    zs = slice(0, min(cut_z, z_size)) if corner in (0, 1) else slice(max(0, z_size - cut_z), z_size)
    out = grid.copy()
    out[xs, zs] = False
    return out


class LayoutService:
    def __init__(self, params: Optional[GenParams] = None):
        self.params = params or GenParams()

    # Boundary

    def sample_boundary(self, room_count: int, rng: np.random.Generator, override: Optional[BoundaryOverride] = None) -> InteriorBoundary:
        """Full rectangle with integer sides drawn from the discrete uniform support"""
        if room_count < 1:
            raise ValueError("Room count must be at least 1")
        lo, hi = boundary_support(room_count, self.params)
        x_lo, x_hi = override.x_range if override and override.x_range else (lo, hi)
        z_lo, z_hi = override.z_range if override and override.z_range else (lo, hi)
        x_size = int(rng.integers(x_lo, x_hi + 1))
        z_size = int(rng.integers(z_lo, z_hi + 1))
        return InteriorBoundary(grid=np.ones((x_size, z_size), dtype=bool))

    def sample_cut_count(self, room_count: int, rng: np.random.Generator) -> int:
        """Beta-distributed cut count in [0, max_cuts], shape set by the room count"""
        return int(floor(self.params.max_cuts * rng.beta(room_count / 2, self.params.cut_beta_b) + 0.5))

    def sample_cut(self, x_size: int, rng: np.random.Generator) -> Tuple[int, int, int]:
        """(cut_x, cut_z, corner) with corner 0=SW, 1=SE, 2=NW, 3=NE"""
        max_area = self.params.max_cut_area
        cut_x_hi = max(2, min(x_size - 1, max_area // 2) - 1)
        cut_x = int(rng.integers(1, cut_x_hi + 1))
        cut_z = int(rng.integers(1, max_area - cut_x + 1))
        corner = int(rng.integers(0, 4))
        return cut_x, cut_z, corner

    def apply_cuts(self, boundary: InteriorBoundary, room_count: int, rng: np.random.Generator) -> InteriorBoundary:
        """Remove cut_count corner rectangles; cuts that disconnect or over-shrink the interior are skipped"""
        grid = boundary.grid.copy()
        x_size, z_size = grid.shape
        min_inside = max(1, room_count * self.params.min_room_cells)
        cut_count = self.sample_cut_count(room_count, rng)
        applied = skipped = 0
        for _ in range(cut_count):
            cut_x, cut_z, corner = self.sample_cut(x_size, rng)
            trial = cut_corner(grid, cut_x, cut_z, corner)
            if int(trial.sum()) < min_inside or not is_connected(trial):
                skipped += 1
                continue
            grid = trial
            applied += 1
        if skipped:
            logger.debug(f"Skipped {skipped} of {cut_count} cuts on a {x_size}x{z_size} boundary")
        return InteriorBoundary(grid=grid, cuts_applied=applied, cuts_skipped=skipped)

    # Subdivision

    def subdivide(self, boundary: InteriorBoundary, spec: RoomSpec, rng: np.random.Generator) -> FloorPlan:
        """Recursively grow each zone's children inside the zone's region"""
        leaves = spec.leaves
        min_cells = self.params.min_room_cells
        if boundary.inside_count < len(leaves) * min_cells:
            raise SubdivisionFailure(f"{boundary.inside_count} cells cannot hold {len(leaves)} rooms")

        leaf_index: Dict[int, int] = {id(leaf): i for i, leaf in enumerate(leaves)}
        for attempt in range(self.params.subdivision_attempts):
            labels = np.full(boundary.grid.shape, OUTSIDE, dtype=int)
            labels[boundary.grid] = FREE
            try:
                warnings = self._split(spec.root, boundary.grid.copy(), labels, leaf_index, rng)
                rooms = self._collect_rooms(labels, leaves)
            except _GrowthFailed as e:
                logger.debug(f"Subdivision attempt {attempt} failed: {e}")
                continue
            return FloorPlan(rooms=rooms, boundary=boundary, scale=1.0, weight_ratio_warnings=warnings)
        raise SubdivisionFailure(f"No valid subdivision after {self.params.subdivision_attempts} attempts")

    def _collect_rooms(self, labels: np.ndarray, leaves: List[SpecNode]) -> List[PlanRoom]:
        rooms = []
        for i, leaf in enumerate(leaves):
            mask = labels == i
            cells = sorted((int(x), int(z)) for x, z in np.argwhere(mask))
            if len(cells) < self.params.min_room_cells or not is_connected(mask):
                raise _GrowthFailed(f"room {i} is too small or split")
            if len(cells_to_polygon(cells).interiors) > 0:
                raise _GrowthFailed(f"room {i} encloses another room")
            rooms.append(PlanRoom(room_id=f"room|{i}", room_type=leaf.room_type, cells=cells, leaf_index=i))
        return rooms

    def _split(self, node: SpecNode, region: np.ndarray, labels: np.ndarray, leaf_index: Dict[int, int], rng) -> int:
        if node.kind == NodeKind.ROOM:
            labels[region] = leaf_index[id(node)]
            return 0
        children = node.children
        mins = [len(c.leaves()) * self.params.min_room_cells for c in children]
        if int(region.sum()) < sum(mins):
            raise _GrowthFailed("zone region too small for its rooms")
        parts = self._grow(region, [c.growth_weight for c in children], rng, mins)
        warnings = 0
        total_w = sum(c.growth_weight for c in children)
        total_a = int(region.sum())
        for child, part, need in zip(children, parts, mins):
            size = int(part.sum())
            if size < need:
                raise _GrowthFailed("child region below its minimum")
            expected = total_a * child.growth_weight / total_w
            if not (expected / 2 <= size <= expected * 2):
                warnings += 1
        for child, part in zip(children, parts):
            warnings += self._split(child, part, labels, leaf_index, rng)
        return warnings

    def _seeds(self, region: np.ndarray, k: int, rng) -> List[Tuple[int, int]]:
        """k cells spread out by geodesic distance, first one uniform"""
        cells = [tuple(int(v) for v in c) for c in np.argwhere(region)]
        if len(cells) < k:
            raise _GrowthFailed("fewer cells than children")
        seeds = [cells[int(rng.integers(len(cells)))]]
        while len(seeds) < k:
            dist = self._distances(region, seeds)
            best = max(dist[c] for c in cells if c not in seeds)
            ties = [c for c in cells if c not in seeds and dist[c] == best]
            seeds.append(ties[int(rng.integers(len(ties)))])
        order = rng.permutation(k)
        return [seeds[int(i)] for i in order]

    @staticmethod
    def _distances(region: np.ndarray, sources: List[Tuple[int, int]]) -> np.ndarray:
        dist = np.full(region.shape, np.iinfo(np.int32).max, dtype=np.int64)
        queue = deque()
        for s in sources:
            dist[s] = 0
            queue.append(s)
        nx, nz = region.shape
        while queue:
            x, z = queue.popleft()
            for dx, dz in DIRECTIONS:
                a, b = x + dx, z + dz
                if 0 <= a < nx and 0 <= b < nz and region[a, b] and dist[a, b] > dist[x, z] + 1:
                    dist[a, b] = dist[x, z] + 1
                    queue.append((a, b))
        return dist

    def _grow(self, region: np.ndarray, weights: List[float], rng, needs: Optional[List[int]] = None) -> List[np.ndarray]:
        """Rectangular growth, L-shaped growth, leftover pockets merged, then undersized parts topped up"""
        k = len(weights)
        owner = np.where(region, FREE, OUTSIDE)
        seeds = self._seeds(region, k, rng)
        rects = []
        for i, (x, z) in enumerate(seeds):
            owner[x, z] = i
            rects.append([x, z, x + 1, z + 1])

        active = list(range(k))
        while active:
            i = self._pick(active, weights, rng)
            if not self._grow_rect(i, rects[i], owner, rng):
                active.remove(i)

        active = list(range(k))
        while active:
            i = self._pick(active, weights, rng)
            if not self._grow_l(i, owner, rng):
                active.remove(i)

        self._merge_leftovers(owner, k)
        if needs:
            self.rebalance(owner, needs)
        return [owner == i for i in range(k)]

    @staticmethod
    def _pick(active: List[int], weights: List[float], rng) -> int:
        w = np.array([weights[i] for i in active], dtype=float)
        return active[int(rng.choice(len(active), p=w / w.sum()))]

    @staticmethod
    def _rect_strip(rect: List[int], direction: Tuple[int, int]) -> List[Tuple[int, int]]:
        x0, z0, x1, z1 = rect
        dx, dz = direction
        if dx == 1:
            return [(x1, z) for z in range(z0, z1)]
        if dx == -1:
            return [(x0 - 1, z) for z in range(z0, z1)]
        if dz == 1:
            return [(x, z1) for x in range(x0, x1)]
        return [(x, z0 - 1) for x in range(x0, x1)]

    def _grow_rect(self, i: int, rect: List[int], owner: np.ndarray, rng) -> bool:
        """Extend the room's rectangle by one full strip; prefer growing the shorter side"""
        nx, nz = owner.shape
        width, depth = rect[2] - rect[0], rect[3] - rect[1]
        dirs = [DIRECTIONS[int(j)] for j in rng.permutation(4)]
        dirs.sort(key=lambda d: (d[0] != 0) == (width < depth) if width != depth else False, reverse=True)
        for d in dirs:
            strip = self._rect_strip(rect, d)
            if all(0 <= x < nx and 0 <= z < nz and owner[x, z] == FREE for x, z in strip):
                for x, z in strip:
                    owner[x, z] = i
                if d == (1, 0):
                    rect[2] += 1
                elif d == (-1, 0):
                    rect[0] -= 1
                elif d == (0, 1):
                    rect[3] += 1
                else:
                    rect[1] -= 1
                return True
        return False

    def _grow_l(self, i: int, owner: np.ndarray, rng) -> bool:
        """Claim the longest straight run of free cells bordering the room on one side"""
        nx, nz = owner.shape
        cells = np.argwhere(owner == i)
        for j in rng.permutation(4):
            dx, dz = DIRECTIONS[int(j)]
            frontier = set()
            for x, z in cells:
                a, b = int(x) + dx, int(z) + dz
                if 0 <= a < nx and 0 <= b < nz and owner[a, b] == FREE:
                    frontier.add((a, b))
            if not frontier:
                continue
            run = self._longest_run(frontier, horizontal=(dx == 0))
            for x, z in run:
                owner[x, z] = i
            return True
        return False

    @staticmethod
    def _longest_run(cells: set, horizontal: bool) -> List[Tuple[int, int]]:
        """Longest contiguous line of cells; lines run along x when `horizontal`"""
        lines: Dict[int, List[int]] = {}
        for x, z in cells:
            key, pos = (z, x) if horizontal else (x, z)
            lines.setdefault(key, []).append(pos)
        best: List[Tuple[int, int]] = []
        for key in sorted(lines):
            positions = sorted(lines[key])
            start = prev = positions[0]
            for pos in positions[1:] + [None]:
                if pos is not None and pos == prev + 1:
                    prev = pos
                    continue
                run = [(p, key) if horizontal else (key, p) for p in range(start, prev + 1)]
                if len(run) > len(best):
                    best = run
                if pos is not None:
                    start = prev = pos
        return best

    @staticmethod
    def _merge_leftovers(owner: np.ndarray, k: int) -> None:
        """Unclaimed pockets join the adjacent room with the fewest cells"""
        nx, nz = owner.shape
        while True:
            free = np.argwhere(owner == FREE)
            if len(free) == 0:
                return
            start = tuple(int(v) for v in free[0])
            component, queue, neighbors = {start}, [start], set()
            while queue:
                x, z = queue.pop()
                for dx, dz in DIRECTIONS:
                    a, b = x + dx, z + dz
                    if not (0 <= a < nx and 0 <= b < nz):
                        continue
                    if owner[a, b] == FREE and (a, b) not in component:
                        component.add((a, b))
                        queue.append((a, b))
                    elif owner[a, b] >= 0:
                        neighbors.add(int(owner[a, b]))
            if not neighbors:
                raise _GrowthFailed("isolated pocket")
            sizes = {n: int((owner == n).sum()) for n in neighbors}
            target = min(sorted(neighbors), key=lambda n: sizes[n])
            for x, z in component:
                owner[x, z] = target

    def rebalance(self, owner: np.ndarray, needs: List[int]) -> None:
        """Move border cells from parts with spare cells into parts below their minimum"""
        nx, nz = owner.shape
        while True:
            sizes = [int((owner == i).sum()) for i in range(len(needs))]
            short = [i for i, need in enumerate(needs) if sizes[i] < need]
            if not short:
                return
            i = short[0]
            candidates = set()
            for x, z in np.argwhere(owner == i):
                for dx, dz in DIRECTIONS:
                    a, b = int(x) + dx, int(z) + dz
                    if 0 <= a < nx and 0 <= b < nz:
                        j = int(owner[a, b])
                        if j >= 0 and j != i and sizes[j] > needs[j]:
                            candidates.add((needs[j] - sizes[j], a, b))
            # Largest surplus first, then scan order
            for _, a, b in sorted(candidates):
                donor = owner == owner[a, b]
                donor[a, b] = False
                if is_connected(donor):
                    owner[a, b] = i
                    break
            else:
                raise _GrowthFailed(f"part {i} cannot reach {needs[i]} cells")

    # Scaling

    def scale_plan(self, plan: FloorPlan, rng: np.random.Generator) -> FloorPlan:
        """Multiply all geometry by s ~ U(scale_min, scale_max)"""
        s = float(rng.uniform(self.params.scale_min, self.params.scale_max))
        return plan.model_copy(update={"scale": s})

    def build(self, spec: RoomSpec, rng: np.random.Generator) -> FloorPlan:
        """Boundary, cuts, subdivision and scaling for one spec; a boundary that cannot be subdivided is redrawn"""
        room_count = spec.room_count
        for attempt in range(self.params.boundary_attempts):
            boundary = self.sample_boundary(room_count, rng, spec.override)
            boundary = self.apply_cuts(boundary, room_count, rng)
            try:
                plan = self.subdivide(boundary, spec, rng)
            except SubdivisionFailure as e:
                logger.debug(f"Boundary {attempt} for {spec.id} redrawn: {e}")
                continue
            return self.scale_plan(plan, rng)
        raise SubdivisionFailure(f"No boundary for {spec.id} could be subdivided in {self.params.boundary_attempts} draws")
