from typing import Dict, List, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field


class NavGrid(BaseModel):
    """Agent positions on a square grid; arrays are indexed [x, z]"""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    cell_size: float
    agent_radius: float
    free: np.ndarray = Field(..., description="Inside the house and clear of walls and floor objects")
    reachable: np.ndarray
    room_index: np.ndarray = Field(..., description="Index into room_ids per cell, -1 outside")
    room_ids: List[str]
    seed: Tuple[int, int]

    @property
    def shape(self) -> Tuple[int, int]:
        return (int(self.free.shape[0]), int(self.free.shape[1]))

    def center(self, i: int, j: int) -> Tuple[float, float]:
        return ((i + 0.5) * self.cell_size, (j + 0.5) * self.cell_size)

    def reachable_cells(self) -> List[Tuple[int, int]]:
        return [(int(i), int(j)) for i, j in np.argwhere(self.reachable)]

    def room_counts(self) -> Dict[str, int]:
        return {rid: int((self.reachable & (self.room_index == k)).sum()) for k, rid in enumerate(self.room_ids)}


class EpisodeTargetState(BaseModel):
    """Per-type sample counts for least-sampled target selection"""

    counts: Dict[str, int] = Field(default_factory=dict)
    epsilon: float = 0.2

    def record(self, object_type: str) -> None:
        self.counts[object_type] = self.counts.get(object_type, 0) + 1
