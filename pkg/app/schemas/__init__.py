from .reports import *

__all__ = [
    # Reports
    "ValidationReport", "DatasetValidation", "DatasetStats", "BenchReport",

    # Dataset manifest
    "ManifestEntry", "Manifest",
]
