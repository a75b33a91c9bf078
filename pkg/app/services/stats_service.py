from collections import Counter
from math import floor
from typing import Iterable, Optional
import logging

from app.core.config import settings
from app.models.house import House
from app.schemas.reports import DatasetStats

logger = logging.getLogger(__name__)


def house_stats(house: House, bucket_size: Optional[float] = None) -> DatasetStats:
    """Counts for a single house; datasets are merged from these"""
    bucket = bucket_size or settings.AREA_BUCKET
    area = sum(r.area for r in house.rooms)
    per_room = Counter({r.id: 0 for r in house.rooms})
    types: Counter = Counter()
    for obj in house.all_objects():
        per_room[obj.room_id] += 1
        types[obj.asset_type] += 1
    return DatasetStats(
        house_count=1,
        area_histogram={int(floor(area / bucket) * bucket): 1},
        rooms_per_house={len(house.rooms): 1},
        objects_per_room=dict(Counter(per_room.values())),
        room_type_counts=dict(Counter(r.room_type.value for r in house.rooms)),
        object_type_counts=dict(types),
        total_area=area,
        bucket_size=bucket,
    )


def compute_stats(houses: Iterable[House], bucket_size: Optional[float] = None) -> DatasetStats:
    bucket = bucket_size or settings.AREA_BUCKET
    stats = DatasetStats(bucket_size=bucket)
    for house in houses:
        stats = stats.merge(house_stats(house, bucket))
    logger.info(f"Stats over {stats.house_count} houses, {stats.total_area:.1f} m² total")
    return stats
