from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple, Union
import logging

import numpy as np
import shapely
from shapely.geometry import LineString, MultiPolygon, Polygon
from shapely.ops import unary_union

from app.core.config import Settings, settings
from app.core.exceptions import RejectionExhausted
from app.models.catalog import AssetCatalog, AssetInstance, MaterialCatalog, ObjectState, Split
from app.models.house import Opening, PlacedObject, PlacementKind, Vec3, WallSegment
from app.models.roomspec import RoomType
from app.models.sag import PlacedGroup, PlacementType, SagDef
from app.services.catalog_service import filter_floor_assets, fits_footprint
from app.services.sag_service import SagService
from app.utils.geometry import EPS, EXTERIOR, Rect, padded_footprint, rotated_extents, rotation_for_front, subtract_intervals
from app.utils.helpers import bernoulli, clamp, sample_pmf, weighted_choice

logger = logging.getLogger(__name__)

OpenArea = Union[Polygon, MultiPolygon]

# Rect side -> rotation whose back rests on that side
BACK_ROTATION = {"south": 0, "north": 180, "west": 270, "east": 90}
CORNERS = {("south", "west"): "sw", ("south", "east"): "se", ("north", "west"): "nw", ("north", "east"): "ne"}


def decompose_open_area(area: Optional[OpenArea]) -> List[Rect]:
    """Maximal rectangles of the grid drawn through every vertex of the open area

    Sorted by area (largest first), then by position.
    """
    if area is None or area.is_empty or area.area <= EPS:
        return []
    polys = [area] if isinstance(area, Polygon) else [g for g in getattr(area, "geoms", []) if isinstance(g, Polygon)]
    xs: Set[float] = set()
    zs: Set[float] = set()
    for poly in polys:
        for ring in [poly.exterior, *poly.interiors]:
            for x, z in ring.coords:
                xs.add(round(float(x), 9))
                zs.add(round(float(z), 9))
    gx_lines, gz_lines = np.array(sorted(xs)), np.array(sorted(zs))
    if len(gx_lines) < 2 or len(gz_lines) < 2:
        return []
    cx = (gx_lines[:-1] + gx_lines[1:]) / 2
    cz = (gz_lines[:-1] + gz_lines[1:]) / 2
    gx, gz = np.meshgrid(cx, cz, indexing="ij")
    inside = shapely.contains_xy(area, gx, gz)

    nx, nz = inside.shape
    prefix = np.zeros((nx + 1, nz + 1), dtype=np.int64)
    prefix[1:, 1:] = np.cumsum(np.cumsum(inside.astype(np.int64), axis=0), axis=1)

    def full(i0: int, i1: int, j0: int, j1: int) -> bool:
        total = prefix[i1 + 1, j1 + 1] - prefix[i0, j1 + 1] - prefix[i1 + 1, j0] + prefix[i0, j0]
        return int(total) == (i1 - i0 + 1) * (j1 - j0 + 1)

    found: Set[Tuple[int, int, int, int]] = set()
    for i0 in range(nx):
        for j0 in range(nz):
            if not inside[i0, j0]:
                continue
            j_lim = nz - 1
            for i1 in range(i0, nx):
                if not inside[i1, j0]:
                    break
                j = j0
                while j + 1 <= j_lim and inside[i1, j + 1]:
                    j += 1
                j_lim = j
                grows = (
                    (i0 > 0 and full(i0 - 1, i0 - 1, j0, j_lim))
                    or (i1 + 1 < nx and full(i1 + 1, i1 + 1, j0, j_lim))
                    or (j0 > 0 and full(i0, i1, j0 - 1, j0 - 1))
                    or (j_lim + 1 < nz and full(i0, i1, j_lim + 1, j_lim + 1))
                )
                if not grows:
                    found.add((i0, j0, i1, j_lim))

    rects = [
        Rect(float(gx_lines[i0]), float(gz_lines[j0]), float(gx_lines[i1 + 1]), float(gz_lines[j1 + 1]))
        for i0, j0, i1, j1 in found
    ]
    return sorted(rects, key=lambda r: (-round(r.area, 9), r.min_x, r.min_z, r.max_x, r.max_z))


def rect_sides(rect: Rect) -> Dict[str, LineString]:
    return {
        "south": LineString([(rect.min_x, rect.min_z), (rect.max_x, rect.min_z)]),
        "north": LineString([(rect.min_x, rect.max_z), (rect.max_x, rect.max_z)]),
        "west": LineString([(rect.min_x, rect.min_z), (rect.min_x, rect.max_z)]),
        "east": LineString([(rect.max_x, rect.min_z), (rect.max_x, rect.max_z)]),
    }


def wall_sides(rect: Rect, room: Polygon) -> List[str]:
    """Rect sides lying entirely on the room outline"""
    outline = room.exterior.buffer(1e-6)
    return [name for name, line in rect_sides(rect).items() if outline.covers(line)]


def anchored_rect(rect: Rect, extents: Tuple[float, float], corner: str) -> Rect:
    """Box of `extents` pushed into one corner of `rect`"""
    w, d = extents
    x0 = rect.min_x if "w" in corner else rect.max_x - w
    z0 = rect.min_z if "s" in corner else rect.max_z - d
    return Rect(x0, z0, x0 + w, z0 + d)


class WallSpace:
    """Free intervals along a room's walls; each carries the tallest low object below it"""

    def __init__(self, walls: Sequence[WallSegment]):
        self.walls = {w.id: w for w in walls}
        self.free: Dict[str, List[Tuple[float, float]]] = {w.id: [(0.0, w.length)] for w in walls}
        self.low: Dict[str, List[Tuple[float, float, float]]] = {w.id: [] for w in walls}

    def block(self, wall_id: str, span: Tuple[float, float]) -> None:
        self.free[wall_id] = subtract_intervals(self.free[wall_id], span)

    def add_low_object(self, wall_id: str, span: Tuple[float, float], height: float) -> None:
        self.low[wall_id].append((span[0], span[1], height))

    def remove_wall(self, wall_id: str) -> None:
        self.free[wall_id] = []

    def floor_clearance(self, wall_id: str, lo: float, hi: float) -> float:
        """Height of the tallest low object under [lo, hi]"""
        return max((h for a, b, h in self.low[wall_id] if a < hi - EPS and b > lo + EPS), default=0.0)

    def segments(self, min_length: float) -> List[Tuple[str, float, float]]:
        out = []
        for wall_id in sorted(self.free):
            for lo, hi in self.free[wall_id]:
                if hi - lo >= min_length - EPS:
                    out.append((wall_id, lo, hi))
        return out


def touches_wall(wall: WallSegment, rect: Rect, tol: float) -> Optional[Tuple[float, float]]:
    """Offsets covered by `rect` when it rests against the wall from room_a's side"""
    nx, nz = wall.normal
    if wall.horizontal:
        z = wall.start[1]
        gap = rect.min_z - z if nz > 0 else z - rect.max_z
    else:
        x = wall.start[0]
        gap = rect.min_x - x if nx > 0 else x - rect.max_x
    if gap > tol or gap < -tol:
        return None
    lo, hi = wall.span_of(rect)
    lo, hi = max(0.0, lo), min(wall.length, hi)
    return (lo, hi) if hi - lo > EPS else None


def opening_span(opening: Opening, host: WallSegment, wall: WallSegment) -> Optional[Tuple[float, float]]:
    """Offsets on `wall` covered by an opening placed on `host` (its twin or itself)"""
    if host.horizontal != wall.horizontal:
        return None
    axis = 1 if host.horizontal else 0
    if abs(host.start[axis] - wall.start[axis]) > EPS:
        return None
    along = 0 if host.horizontal else 1
    a = host.point_at(opening.offset_along_wall)[along]
    b = host.point_at(opening.offset_along_wall + opening.width)[along]
    base = min(wall.start[along], wall.end[along])
    lo, hi = max(0.0, min(a, b) - base), min(wall.length, max(a, b) - base)
    return (lo, hi) if hi - lo > EPS else None


def _floor_members(objects: Iterable[PlacedObject]) -> List[PlacedObject]:
    return [o for obj in objects for o in obj.walk() if o.bottom < EPS]


class FurnishService:
    def __init__(self, catalog: AssetCatalog, config: Settings = settings):
        self.catalog = catalog
        self.config = config
        self.sags = SagService(catalog, config)

    # Floor objects

    def sample_iterations(self, rng: np.random.Generator) -> int:
        return int(sample_pmf(self.config.FLOOR_ITERATIONS_PMF, rng))

    def open_area(self, room: Polygon, blocked: Sequence[Rect]) -> OpenArea:
        if not blocked:
            return room
        return room.difference(unary_union([r.to_polygon() for r in blocked]))

    def place_floor_objects(
        self,
        room_id: str,
        room_type: RoomType,
        room: Polygon,
        blocked: Sequence[Rect],
        split: Split,
        rng: np.random.Generator,
        iterations: Optional[int] = None,
    ) -> List[PlacedObject]:
        """Iteratively drop objects and groups into rectangles of the shrinking open area"""
        area = self.open_area(room, blocked)
        iterations = self.sample_iterations(rng) if iterations is None else iterations
        placed: List[PlacedObject] = []
        skipped: Set[Tuple[float, ...]] = set()
        for step in range(iterations):
            rects = [r for r in decompose_open_area(area) if tuple(round(v, 6) for v in r) not in skipped]
            if not rects:
                break
            if bernoulli(self.config.LARGEST_RECT_P, rng):
                rect = rects[0]
            else:
                rect = weighted_choice(rects, [r.area for r in rects], rng)
            obj = self._place_in_rect(rect, room, room_id, room_type, placed, split, rng, f"{room_id}|obj|{len(placed)}")
            if obj is None:
                skipped.add(tuple(round(v, 6) for v in rect))
                continue
            placed.append(obj)
            area = area.difference(Rect(*obj.clearance).to_polygon())
        logger.debug(f"{room_id}: placed {len(placed)} floor objects in {iterations} iterations")
        return placed

    def _mode(self, rect: Rect, room: Polygon, rng) -> Tuple[PlacementType, List[str]]:
        sides = wall_sides(rect, room)
        corners = [c for (a, b), c in CORNERS.items() if a in sides and b in sides]
        if corners:
            return PlacementType.CORNER, [corners[int(rng.integers(len(corners)))]]
        if sides and bernoulli(self.config.EDGE_P, rng):
            return PlacementType.EDGE, [sides[int(rng.integers(len(sides)))]]
        return PlacementType.MIDDLE, []

    def _rotations(self, mode: PlacementType, where: List[str]) -> List[int]:
        if mode == PlacementType.MIDDLE:
            return [0, 90, 180, 270]
        if mode == PlacementType.EDGE:
            return [BACK_ROTATION[where[0]]]
        corner = where[0]
        south_north = "south" if "s" in corner else "north"
        west_east = "west" if "w" in corner else "east"
        return [BACK_ROTATION[south_north], BACK_ROTATION[west_east]]

    def _padded_extents(self, width: float, depth: float, rotation: int, mode: PlacementType) -> Tuple[float, float]:
        if mode == PlacementType.MIDDLE:
            w, d = rotated_extents(width, depth, rotation)
            pad = 2 * self.config.MIDDLE_PAD
            return (w + pad, d + pad)
        return rotated_extents(width, depth + self.config.WALL_PAD, rotation)

    def _fitting_rotations(self, width: float, depth: float, rect: Rect, mode: PlacementType, where: List[str]) -> List[int]:
        out = []
        for rotation in self._rotations(mode, where):
            w, d = self._padded_extents(width, depth, rotation, mode)
            if w <= rect.width + EPS and d <= rect.depth + EPS:
                out.append(rotation)
        return out

    def _types_in_room(self, placed: Sequence[PlacedObject]) -> Set[str]:
        return {o.asset_type for obj in placed for o in obj.walk()}

    def _allowed(self, type_names: Iterable[str], present: Set[str]) -> bool:
        return all(self.catalog.asset_type(t).allow_duplicates_in_room or t not in present for t in type_names)

    def _place_in_rect(
        self,
        rect: Rect,
        room: Polygon,
        room_id: str,
        room_type: RoomType,
        placed: Sequence[PlacedObject],
        split: Split,
        rng: np.random.Generator,
        object_id: str,
    ) -> Optional[PlacedObject]:
        mode, where = self._mode(rect, room, rng)
        pad = 2 * self.config.MIDDLE_PAD if mode == PlacementType.MIDDLE else self.config.WALL_PAD
        present = self._types_in_room(placed)

        singles: List[Tuple[AssetInstance, List[int]]] = []
        for inst in filter_floor_assets(self.catalog, room_type, mode, split, (rect.width, rect.depth), pad):
            if not self._allowed([inst.asset_type], present):
                continue
            rotations = self._fitting_rotations(inst.width, inst.depth, rect, mode, where)
            if rotations:
                singles.append((inst, rotations))

        groups: List[Tuple[SagDef, PlacedGroup, List[int]]] = []
        for sag in self.catalog.semantic_asset_groups:
            if mode not in sag.placements or sag.room_weights.get(room_type, 0) <= 0:
                continue
            try:
                group = self.sags.instantiate_sag(sag, split, rng)
            except RejectionExhausted as e:
                logger.debug(f"Skipping group {sag.id}: {e}")
                continue
            if not self._allowed([m.asset_type for m in group.members], present):
                continue
            if not fits_footprint(group.width, group.depth, rect.width, rect.depth, pad):
                continue
            rotations = self._fitting_rotations(group.width, group.depth, rect, mode, where)
            if rotations:
                groups.append((sag, group, rotations))

        if not singles and not groups:
            return None
        use_group = bool(groups) and (not singles or bernoulli(self.config.SAG_PREFERENCE, rng))
        if use_group:
            sag, group, rotations = weighted_choice(groups, [g[0].room_weights[room_type] for g in groups], rng)
            width, depth = group.width, group.depth
        else:
            inst, rotations = weighted_choice(
                singles, [self.catalog.asset_type(s[0].asset_type).room_weight(room_type) for s in singles], rng
            )
            width, depth = inst.width, inst.depth
        rotation = rotations[int(rng.integers(len(rotations)))]

        footprint, clearance = self._pose(rect, mode, where, width, depth, rotation, rng)
        if use_group:
            obj = self.sags.materialize(group, footprint.center, rotation, room_id, object_id)
        else:
            obj = PlacedObject(
                id=object_id,
                asset_id=inst.id,
                asset_type=inst.asset_type,
                room_id=room_id,
                position=Vec3(x=footprint.center[0], y=inst.height / 2, z=footprint.center[1]),
                rotation=rotation,
                size=Vec3(x=inst.width, y=inst.height, z=inst.depth),
                placement_kind=PlacementKind.FLOOR,
            )
        obj.parent = room_id
        obj.placement = mode.value
        obj.clearance = tuple(clearance)
        return obj

    def _pose(self, rect: Rect, mode: PlacementType, where: List[str], width: float, depth: float, rotation: int, rng) -> Tuple[Rect, Rect]:
        """(footprint, padded footprint) inside `rect`"""
        w, d = rotated_extents(width, depth, rotation)
        if mode == PlacementType.MIDDLE:
            footprint = Rect.around(rect.center, w, d)
            m = self.config.MIDDLE_PAD
            return footprint, footprint.inflate(m, m, m, m)

        if mode == PlacementType.CORNER:
            corner = where[0]
        else:
            side = where[0]
            pw, pd = self._padded_extents(width, depth, rotation, mode)
            if side in ("south", "north"):
                x0 = float(rng.uniform(rect.min_x, rect.max_x - pw)) if rect.width - pw > EPS else rect.min_x
                z0 = rect.min_z if side == "south" else rect.max_z - d
                footprint = Rect(x0, z0, x0 + w, z0 + d)
            else:
                z0 = float(rng.uniform(rect.min_z, rect.max_z - pd)) if rect.depth - pd > EPS else rect.min_z
                x0 = rect.min_x if side == "west" else rect.max_x - w
                footprint = Rect(x0, z0, x0 + w, z0 + d)
            return footprint, padded_footprint(footprint, rotation, front_pad=self.config.WALL_PAD)
        footprint = anchored_rect(rect, (w, d), corner)
        return footprint, padded_footprint(footprint, rotation, front_pad=self.config.WALL_PAD)

    # Wall objects

    def wall_space(
        self,
        walls: Sequence[WallSegment],
        floor_objects: Sequence[PlacedObject],
        openings: Sequence[Opening],
        all_walls: Dict[str, WallSegment],
        low_height: Optional[float] = None,
        hung: Sequence[PlacedObject] = (),
    ) -> WallSpace:
        """Free wall intervals; floor objects block their span unless lower than `low_height`"""
        space = WallSpace(walls)
        tol = self.config.WALL_TOUCH_TOLERANCE
        members = _floor_members(floor_objects)
        for wall in walls:
            for opening in openings:
                span = opening_span(opening, all_walls[opening.wall], wall)
                if span:
                    space.block(wall.id, span)
            for obj in members:
                span = touches_wall(wall, obj.footprint(), tol)
                if not span:
                    continue
                if low_height is not None and obj.size.y < low_height:
                    space.add_low_object(wall.id, span, obj.size.y)
                else:
                    space.block(wall.id, span)
        for item in hung:
            if item.parent in space.free and item.wall_span:
                space.block(item.parent, item.wall_span)
        return space

    def _wall_object(self, object_id: str, inst: AssetInstance, wall: WallSegment, offset: float, y: float, kind: PlacementKind) -> PlacedObject:
        x, z = wall.point_at(offset + inst.width / 2)
        nx, nz = wall.normal
        return PlacedObject(
            id=object_id,
            asset_id=inst.id,
            asset_type=inst.asset_type,
            room_id=wall.room_a,
            position=Vec3(x=x + nx * inst.depth / 2, y=y, z=z + nz * inst.depth / 2),
            rotation=rotation_for_front(wall.normal),
            size=Vec3(x=inst.width, y=inst.height, z=inst.depth),
            placement_kind=kind,
            parent=wall.id,
            wall_span=(offset, offset + inst.width),
            kinematic=True,
        )

    def place_windows(
        self,
        room_id: str,
        room_type: RoomType,
        walls: Sequence[WallSegment],
        floor_objects: Sequence[PlacedObject],
        openings: Sequence[Opening],
        all_walls: Dict[str, WallSegment],
        ceiling_height: float,
        split: Split,
        rng: np.random.Generator,
    ) -> List[PlacedObject]:
        """Up to window_count windows on distinct exterior walls, centered between floor and max_height"""
        if room_type.value not in self.config.WINDOW_ROOM_TYPES:
            return []
        window_count = int(sample_pmf(self.config.WINDOW_COUNT_PMF, rng))
        max_height = min(self.config.WALL_OBJECT_MAX_HEIGHT, ceiling_height)
        instances = [i for i in self.catalog.instances_of(self.config.WINDOW_ASSET_TYPE, split) if i.height <= max_height + EPS]
        exterior = [w for w in walls if w.room_a == room_id and w.room_b == EXTERIOR]
        if not instances or not exterior or window_count == 0:
            return []
        narrowest = min(i.width for i in instances)
        space = self.wall_space(exterior, floor_objects, openings, all_walls)
        windows: List[PlacedObject] = []
        for _ in range(window_count):
            segments = space.segments(narrowest)
            if not segments:
                break
            wall_id, lo, hi = weighted_choice(segments, [s[2] - s[1] for s in segments], rng)
            options = [i for i in instances if i.width <= hi - lo + EPS]
            inst = options[int(rng.integers(len(options)))]
            offset = float(rng.uniform(lo, max(lo, hi - inst.width)))
            window = self._wall_object(f"{room_id}|window|{len(windows)}", inst, space.walls[wall_id], offset, max_height / 2, PlacementKind.WALL)
            windows.append(window)
            space.remove_wall(wall_id)
        return windows

    def place_televisions(
        self,
        room_id: str,
        room_type: RoomType,
        space: WallSpace,
        room_objects: Sequence[PlacedObject],
        ceiling_height: float,
        split: Split,
        rng: np.random.Generator,
    ) -> Optional[PlacedObject]:
        """At most one wall television; never in a room that already has one"""
        p = self.config.TELEVISION_P.get(room_type.value)
        if p is None:
            return None
        tv_type = self.config.TELEVISION_ASSET_TYPE
        if any(o.asset_type == tv_type for obj in room_objects for o in obj.walk()):
            return None
        if not bernoulli(p, rng):
            return None
        if not self.catalog.has_type(tv_type) or not self.catalog.asset_type(tv_type).wall_mountable:
            return None
        instances = self.catalog.instances_of(tv_type, split)
        return self._hang(f"{room_id}|tv|0", instances, space, ceiling_height, rng)

    def place_paintings(
        self,
        room_id: str,
        space: WallSpace,
        ceiling_height: float,
        split: Split,
        rng: np.random.Generator,
    ) -> List[PlacedObject]:
        """Up to painting_count paintings; several may share a wall"""
        painting_count = int(sample_pmf(self.config.PAINTING_COUNT_PMF, rng))
        instances = self.catalog.instances_of(self.config.PAINTING_ASSET_TYPE, split)
        out: List[PlacedObject] = []
        for k in range(painting_count):
            painting = self._hang(f"{room_id}|painting|{k}", instances, space, ceiling_height, rng)
            if painting is None:
                break
            out.append(painting)
        return out

    def _hang(
        self,
        object_id: str,
        instances: Sequence[AssetInstance],
        space: WallSpace,
        ceiling_height: float,
        rng: np.random.Generator,
    ) -> Optional[PlacedObject]:
        """Hang one wall object, its center drawn from a symmetric Beta between min_height and max_height"""
        if not instances:
            return None
        max_height = min(self.config.WALL_OBJECT_MAX_HEIGHT, ceiling_height)
        narrowest = min(i.width for i in instances)
        candidates = []
        for wall_id, lo, hi in space.segments(narrowest):
            min_height = space.floor_clearance(wall_id, lo, hi)
            if any(i.width <= hi - lo + EPS and i.height <= max_height - min_height + EPS for i in instances):
                candidates.append((wall_id, lo, hi, min_height))
        if not candidates:
            return None
        wall_id, lo, hi, min_height = weighted_choice(candidates, [c[2] - c[1] for c in candidates], rng)
        options = [i for i in instances if i.width <= hi - lo + EPS and i.height <= max_height - min_height + EPS]
        inst = options[int(rng.integers(len(options)))]
        offset = float(rng.uniform(lo, max(lo, hi - inst.width)))
        beta = self.config.PAINTING_BETA
        center_y = min_height + (max_height - min_height) * float(rng.beta(beta, beta))
        center_y = clamp(center_y, min_height + inst.height / 2, max_height - inst.height / 2)
        space.block(wall_id, (offset, offset + inst.width))
        return self._wall_object(object_id, inst, space.walls[wall_id], offset, center_y, PlacementKind.WALL)

    # Surface objects

    def sample_house_bias(self, rng: np.random.Generator) -> float:
        """Per-house shift applied to every spawn probability"""
        c = self.config
        return c.HOUSE_BIAS_MIN + (c.HOUSE_BIAS_MAX - c.HOUSE_BIAS_MIN) * float(rng.beta(c.HOUSE_BIAS_BETA_A, c.HOUSE_BIAS_BETA_B))

    def extra_copies(self, spawn_p: float, rng: np.random.Generator) -> int:
        """Additional copies from a geometric draw, capped per receptacle and never negative"""
        if spawn_p <= 0:
            return 0
        g = int(rng.geometric(min(1.0, spawn_p)))
        return max(0, min(self.config.MAX_SAME_TYPE_PER_RECEPTACLE, g - 1) - 1)

    def effective_probability(self, receptacle_type: str, object_type: str, house_bias: float) -> float:
        p = self.catalog.spawn_p(receptacle_type, object_type)
        p += house_bias + self.catalog.asset_type(receptacle_type).receptacle_bias + self.catalog.asset_type(object_type).object_bias
        return clamp(p)

    def place_surface_objects(self, objects: Sequence[PlacedObject], split: Split, house_bias: float, rng: np.random.Generator) -> int:
        """Spawn small objects on receptacle tops in place; returns the number placed"""
        receptacles = [o for obj in objects for o in obj.walk() if self.catalog.instance(o.asset_id).is_receptacle]
        placed = 0
        for receptacle in receptacles:
            for object_type in self.catalog.spawnable_on(receptacle.asset_type):
                raw = self.catalog.spawn_p(receptacle.asset_type, object_type)
                p = self.effective_probability(receptacle.asset_type, object_type, house_bias)
                if p <= 0 or not bernoulli(p, rng):
                    continue
                copies = 1 + self.extra_copies(raw, rng)
                for _ in range(copies):
                    if self._count_on(receptacle, object_type) >= self.config.MAX_SAME_TYPE_PER_RECEPTACLE:
                        break
                    if self._spawn_on(receptacle, object_type, split, rng):
                        placed += 1
        return placed

    @staticmethod
    def _on_top(receptacle: PlacedObject) -> List[PlacedObject]:
        return [c for c in receptacle.children if c.bottom >= receptacle.top - 1e-3]

    def _count_on(self, receptacle: PlacedObject, object_type: str) -> int:
        return sum(1 for c in self._on_top(receptacle) if c.asset_type == object_type)

    def _spawn_on(self, receptacle: PlacedObject, object_type: str, split: Split, rng: np.random.Generator) -> bool:
        instances = self.catalog.instances_of(object_type, split)
        if not instances:
            return False
        inst = instances[int(rng.integers(len(instances)))]
        top = receptacle.footprint()
        siblings = [c.footprint() for c in self._on_top(receptacle)]
        for _ in range(self.config.SURFACE_POSE_ATTEMPTS):
            rotation = int(rng.integers(4)) * 90
            w, d = rotated_extents(inst.width, inst.depth, rotation)
            if w > top.width + EPS or d > top.depth + EPS:
                continue
            cx = float(rng.uniform(top.min_x + w / 2, top.max_x - w / 2)) if top.width - w > EPS else top.center[0]
            cz = float(rng.uniform(top.min_z + d / 2, top.max_z - d / 2)) if top.depth - d > EPS else top.center[1]
            footprint = Rect.around((cx, cz), w, d)
            if any(footprint.overlaps(s) for s in siblings):
                continue
            child = PlacedObject(
                id=f"{receptacle.id}|{len(receptacle.children)}",
                asset_id=inst.id,
                asset_type=inst.asset_type,
                room_id=receptacle.room_id,
                position=Vec3(x=cx, y=receptacle.top + inst.height / 2, z=cz),
                rotation=rotation,
                size=Vec3(x=inst.width, y=inst.height, z=inst.depth),
                placement_kind=PlacementKind.SURFACE,
                parent=receptacle.id,
            )
            receptacle.children.append(child)
            return True
        return False

    # Appearance and states

    def randomize_appearance(self, objects: Sequence[PlacedObject], materials: MaterialCatalog, rng: np.random.Generator, enabled: bool = True) -> bool:
        """Color and material overrides in place; returns whether materials were swapped"""
        if not enabled:
            return False
        swap_materials = bernoulli(self.config.MATERIAL_RANDOMIZE_P, rng)
        for obj in objects:
            for item in obj.walk():
                asset_type = self.catalog.asset_type(item.asset_type)
                if asset_type.color_randomizable and bernoulli(self.config.COLOR_RANDOMIZE_P, rng):
                    r, g, b = (int(v) for v in rng.integers(0, 256, size=3))
                    item.color = (r, g, b)
                pool = materials.object_materials.get(asset_type.material_class or "", [])
                if swap_materials and pool:
                    item.material = pool[int(rng.integers(len(pool)))]
        return swap_materials

    def randomize_states(self, objects: Sequence[PlacedObject], rng: np.random.Generator) -> None:
        """State overrides only for the capabilities an object type declares"""
        p = self.config.STATE_RANDOMIZE_P
        keys = {ObjectState.TOGGLEABLE: "isToggled", ObjectState.DIRTYABLE: "isDirty", ObjectState.OPENABLE: "isOpen"}
        for obj in objects:
            for item in obj.walk():
                declared = self.catalog.asset_type(item.asset_type).states
                if not declared:
                    continue
                item.states = {keys[s]: bernoulli(p, rng) for s in sorted(declared, key=lambda s: s.value)}
