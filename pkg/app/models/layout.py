from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from shapely.geometry import Polygon

from app.core.config import Settings
from app.models.roomspec import RoomType
from app.utils.geometry import cells_to_polygon


class GenParams(BaseModel):
    min_side: int = 2
    mean_side_per_room: float = 3.0
    max_cut_area: int = 6
    cut_beta_b: float = 6.0
    max_cuts: int = 10
    scale_min: float = 1.6
    scale_max: float = 2.2
    min_room_cells: int = 4
    subdivision_attempts: int = 20
    boundary_attempts: int = 5

    @classmethod
    def from_settings(cls, s: Settings) -> "GenParams":
        return cls(
            min_side=s.MIN_SIDE,
            mean_side_per_room=s.MEAN_SIDE_PER_ROOM,
            max_cut_area=s.MAX_CUT_AREA,
            cut_beta_b=s.CUT_BETA_B,
            max_cuts=s.MAX_CUTS,
            scale_min=s.SCALE_MIN,
            scale_max=s.SCALE_MAX,
            min_room_cells=s.MIN_ROOM_CELLS,
            subdivision_attempts=s.SUBDIVISION_ATTEMPTS,
            boundary_attempts=s.BOUNDARY_ATTEMPTS,
        )


class InteriorBoundary(BaseModel):
    """Boolean grid indexed [x, z]; True marks a 1 m cell inside the house"""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    grid: np.ndarray
    cuts_applied: int = 0
    cuts_skipped: int = 0

    @property
    def x_size(self) -> int:
        return int(self.grid.shape[0])

    @property
    def z_size(self) -> int:
        return int(self.grid.shape[1])

    @property
    def inside_count(self) -> int:
        return int(self.grid.sum())

    def cells(self) -> List[Tuple[int, int]]:
        return [(int(x), int(z)) for x, z in np.argwhere(self.grid)]


class PlanRoom(BaseModel):
    room_id: str
    room_type: RoomType
    cells: List[Tuple[int, int]] = Field(..., description="Sorted unit cells (pre-scale)")
    leaf_index: int = Field(..., description="Pre-order index of the room spec leaf")


class FloorPlan(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    rooms: List[PlanRoom]
    boundary: InteriorBoundary
    scale: float = 1.0
    weight_ratio_warnings: int = 0

    def room(self, room_id: str) -> PlanRoom:
        return next(r for r in self.rooms if r.room_id == room_id)

    def label_grid(self) -> np.ndarray:
        """Room index per cell, -1 outside"""
        labels = np.full(self.boundary.grid.shape, -1, dtype=int)
        for idx, room in enumerate(self.rooms):
            for x, z in room.cells:
                labels[x, z] = idx
        return labels

    def polygon(self, room_id: str) -> Polygon:
        return cells_to_polygon(self.room(room_id).cells, self.scale)

    def polygons(self) -> Dict[str, Polygon]:
        return {r.room_id: cells_to_polygon(r.cells, self.scale) for r in self.rooms}

    def extents(self) -> Tuple[float, float]:
        return (self.boundary.x_size * self.scale, self.boundary.z_size * self.scale)

    def room_area(self, room_id: str) -> float:
        return len(self.room(room_id).cells) * self.scale * self.scale

    def room_by_leaf(self, leaf_index: int) -> Optional[PlanRoom]:
        return next((r for r in self.rooms if r.leaf_index == leaf_index), None)
