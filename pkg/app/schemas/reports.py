from pydantic import Field
from typing import Dict, List, Optional

from app.models.base import CamelModel
from app.models.catalog import Split
from app.utils.helpers import merge_counts


class ValidationReport(CamelModel):
    """Navigability check result for one house"""
    passed: bool = Field(..., description="Every room has enough reachable positions")
    room_counts: Dict[str, int] = Field(default_factory=dict, description="Reachable cells per room id")
    failures: List[str] = Field(default_factory=list, description="Failure reasons")
    threshold: int = Field(5, description="Minimum reachable cells per room")
    seconds: float = Field(0.0, description="Validation wall time")


class DatasetValidation(CamelModel):
    """Validation reports for a set of house files, keyed by file name"""
    passed: bool
    houses: Dict[str, ValidationReport] = Field(default_factory=dict)
    seconds: float = Field(0.0, description="Total validation wall time")


class DatasetStats(CamelModel):
    """Additive dataset statistics"""
    house_count: int = 0
    area_histogram: Dict[int, int] = Field(default_factory=dict, description="Bucket lower bound (m²) -> houses")
    rooms_per_house: Dict[int, int] = Field(default_factory=dict)
    objects_per_room: Dict[int, int] = Field(default_factory=dict)
    room_type_counts: Dict[str, int] = Field(default_factory=dict)
    object_type_counts: Dict[str, int] = Field(default_factory=dict)
    total_area: float = 0.0
    bucket_size: float = 10.0

    def merge(self, other: "DatasetStats") -> "DatasetStats":
        if self.bucket_size != other.bucket_size:
            raise ValueError("Cannot merge stats computed with different area buckets")
        return DatasetStats(
            house_count=self.house_count + other.house_count,
            area_histogram=merge_counts(self.area_histogram, other.area_histogram),
            rooms_per_house=merge_counts(self.rooms_per_house, other.rooms_per_house),
            objects_per_room=merge_counts(self.objects_per_room, other.objects_per_room),
            room_type_counts=merge_counts(self.room_type_counts, other.room_type_counts),
            object_type_counts=merge_counts(self.object_type_counts, other.object_type_counts),
            total_area=self.total_area + other.total_area,
            bucket_size=self.bucket_size,
        )


class BenchReport(CamelModel):
    """Throughput of a generation run"""
    count: int
    jobs: int
    wall_seconds: float
    houses_per_second: float
    stage_seconds: Dict[str, float] = Field(default_factory=dict, description="Summed per-stage time")
    stage_houses_per_second: Dict[str, float] = Field(default_factory=dict)
    attempts: int = Field(0, description="Generation attempts over all houses")
    retry_rate: float = Field(0.0, description="Rejected attempts / all attempts")
    failures: int = 0
    baseline_seconds: Optional[float] = Field(None, description="Serial wall time when measured")
    speedup: Optional[float] = None


class ManifestEntry(CamelModel):
    index: int
    seed: int
    room_spec_id: str
    file: str
    attempts: int


class Manifest(CamelModel):
    """Everything needed to regenerate a dataset byte for byte"""
    root_seed: int
    count: int
    split: Split
    schema_version: int
    generator_version: str
    catalog_sha256: str
    room_specs_sha256: str
    material_randomization: bool = True
    houses: List[ManifestEntry] = Field(default_factory=list)
