from typing import Dict, List, Sequence, Tuple
import logging

import numpy as np

from app.core.config import Settings, settings
from app.models.catalog import AssetCatalog, MaterialCatalog, TimeOfDay
from app.models.house import DirectionalLight, Lighting, MaterialRef, PlacedObject, PointLight, StructureMaterials, Vec3
from app.models.layout import FloorPlan
from app.utils.geometry import interior_point
from app.utils.helpers import bernoulli

logger = logging.getLogger(__name__)


class DressingService:
    """Structure materials, ceiling height, lights and skybox"""

    def __init__(self, config: Settings = settings):
        self.config = config

    def _material(self, materials: MaterialCatalog, solid: bool, rng: np.random.Generator) -> MaterialRef:
        if solid:
            color = materials.solid_colors[int(rng.integers(len(materials.solid_colors)))]
            return MaterialRef(color=tuple(color))
        return MaterialRef(name=materials.wall_textures[int(rng.integers(len(materials.wall_textures)))])

    def sample_structure_materials(self, plan: FloorPlan, materials: MaterialCatalog, rng: np.random.Generator) -> StructureMaterials:
        room_ids = [r.room_id for r in plan.rooms]
        wall_same = bernoulli(self.config.WALL_SAME_P, rng)
        floor_same = bernoulli(self.config.FLOOR_SAME_P, rng)

        walls: Dict[str, MaterialRef] = {}
        wall_solid: Dict[str, bool] = {}
        if wall_same:
            solid = bernoulli(self.config.WALL_SOLID_P, rng)
            shared = self._material(materials, solid, rng)
            for rid in room_ids:
                walls[rid], wall_solid[rid] = shared, solid
            ceiling = shared
        else:
            for rid in room_ids:
                solid = bernoulli(self.config.WALL_SOLID_P, rng)
                walls[rid], wall_solid[rid] = self._material(materials, solid, rng), solid
            ceiling = self._material(materials, bernoulli(self.config.WALL_SOLID_P, rng), rng)

        def pick() -> MaterialRef:
            return MaterialRef(name=materials.floor_materials[int(rng.integers(len(materials.floor_materials)))])

        if floor_same:
            shared_floor = pick()
            floors = {rid: shared_floor for rid in room_ids}
        else:
            floors = {rid: pick() for rid in room_ids}

        return StructureMaterials(
            wall_same=wall_same,
            floor_same=floor_same,
            wall_solid=wall_solid,
            walls=walls,
            floors=floors,
            ceiling=ceiling,
        )

    def sample_ceiling_height(self, rng: np.random.Generator) -> float:
        """Scaled Beta draw in [CEILING_MIN, CEILING_MAX)"""
        c = self.config
        value = c.CEILING_MIN + (c.CEILING_MAX - c.CEILING_MIN) * float(rng.beta(c.CEILING_BETA_A, c.CEILING_BETA_B))
        return float(min(value, np.nextafter(c.CEILING_MAX, c.CEILING_MIN)))

    def sample_skybox(self, materials: MaterialCatalog, rng: np.random.Generator) -> Tuple[str, TimeOfDay]:
        options = materials.skybox_list()
        weights = self.config.SKYBOX_WEIGHTS or {}
        w = np.array([float(weights.get(sid, 1.0)) for sid, _ in options])
        return options[int(rng.choice(len(options), p=w / w.sum()))]

    def directional_light(self, time_of_day: TimeOfDay) -> DirectionalLight:
        preset = self.config.DIRECTIONAL_LIGHTS[time_of_day.value]
        return DirectionalLight(
            elevation=preset["elevation"],
            azimuth=preset["azimuth"],
            intensity=preset["intensity"],
            color=(int(preset["r"]), int(preset["g"]), int(preset["b"])),
        )

    def place_lights(
        self,
        plan: FloorPlan,
        objects: Sequence[PlacedObject],
        ceiling_height: float,
        catalog: AssetCatalog,
        skybox: Tuple[str, TimeOfDay],
    ) -> Lighting:
        """One ceiling light per room, one light per lamp, one directional light"""
        c = self.config
        lights: List[PointLight] = []
        for room in plan.rooms:
            x, z = interior_point(plan.polygon(room.room_id))
            lights.append(
                PointLight(
                    id=f"light|{room.room_id}",
                    position=Vec3(x=x, y=ceiling_height - c.LIGHT_CEILING_OFFSET, z=z),
                    room_id=room.room_id,
                    color=c.POINT_LIGHT_COLOR,
                    intensity=c.POINT_LIGHT_INTENSITY,
                    range=c.POINT_LIGHT_RANGE,
                )
            )
        for obj in objects:
            for item in obj.walk():
                if not catalog.asset_type(item.asset_type).emits_light:
                    continue
                lights.append(self.lamp_light(item))
        sky_id, tod = skybox
        return Lighting(directional_light=self.directional_light(tod), point_lights=lights, skybox_id=sky_id, time_of_day=tod)

    def lamp_light(self, lamp: PlacedObject) -> PointLight:
        on = True if not lamp.states else bool(lamp.states.get("isToggled", True))
        return PointLight(
            id=f"light|{lamp.id}",
            position=Vec3(x=lamp.position.x, y=lamp.top, z=lamp.position.z),
            room_id=lamp.room_id,
            object_id=lamp.id,
            color=self.config.POINT_LIGHT_COLOR,
            intensity=self.config.LAMP_LIGHT_INTENSITY if on else 0.0,
            range=self.config.POINT_LIGHT_RANGE / 3,
        )
