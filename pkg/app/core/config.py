from pydantic_settings import BaseSettings, SettingsConfigDict
from typing import Dict, List, Optional, Tuple
import os

DATA_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "data")


class Settings(BaseSettings):
    # Application Configuration
    APP_NAME: str = "Procedural House Generator"
    APP_VERSION: str = "1.0.0"
    SCHEMA_VERSION: int = 1
    DEBUG: bool = False
    LOG_LEVEL: str = "INFO"

    # Input files
    CATALOG_PATH: str = os.path.join(DATA_DIR, "catalog.json")
    ROOM_SPECS_PATH: str = os.path.join(DATA_DIR, "room_specs.json")

    # Seeding (PROCHOUSE_SEED overrides --seed)
    SEED: Optional[int] = None

    # Floor plan sampling
    MIN_SIDE: int = 2
    MEAN_SIDE_PER_ROOM: float = 3.0
    MAX_CUT_AREA: int = 6
    CUT_BETA_B: float = 6.0
    MAX_CUTS: int = 10
    SCALE_MIN: float = 1.6
    SCALE_MAX: float = 2.2
    MIN_ROOM_CELLS: int = 4
    SUBDIVISION_ATTEMPTS: int = 20
    BOUNDARY_ATTEMPTS: int = 5

    # Connections
    DOOR_ASSET_TYPE: str = "Doorway"
    DOORFRAME_ASSET_TYPE: str = "Doorframe"
    KITCHEN_LIVING_KINDS: Dict[str, float] = {"open_wall": 0.375, "door_frame": 0.375, "doorway": 0.25}
    DOOR_REJECTION_ATTEMPTS: int = 100
    OPEN_WALL_CLEARANCE: float = 0.5

    # Structure materials
    WALL_SAME_P: float = 0.35
    WALL_SOLID_P: float = 0.5
    FLOOR_SAME_P: float = 0.15

    # Ceiling height
    CEILING_MIN: float = 2.5
    CEILING_MAX: float = 7.0
    CEILING_BETA_A: float = 1.25
    CEILING_BETA_B: float = 5.5

    # Lighting
    LIGHT_CEILING_OFFSET: float = 0.05
    POINT_LIGHT_INTENSITY: float = 0.75
    POINT_LIGHT_RANGE: float = 15.0
    POINT_LIGHT_COLOR: Tuple[int, int, int] = (255, 239, 213)
    LAMP_LIGHT_INTENSITY: float = 0.5
    SKYBOX_WEIGHTS: Optional[Dict[str, float]] = None
    DIRECTIONAL_LIGHTS: Dict[str, Dict[str, float]] = {
        "midday": {"elevation": 66.0, "azimuth": 43.0, "intensity": 1.0, "r": 255, "g": 250, "b": 240},
        "golden_hour": {"elevation": 15.0, "azimuth": 250.0, "intensity": 0.8, "r": 255, "g": 190, "b": 120},
        "blue_hour": {"elevation": 4.0, "azimuth": 280.0, "intensity": 0.25, "r": 120, "g": 150, "b": 255},
    }

    # Semantic asset groups
    SAG_REJECTION_ATTEMPTS: int = 20
    SAG_PREFERENCE: float = 0.7

    # Floor objects
    FLOOR_ITERATIONS_PMF: Dict[int, float] = {1: 1 / 200, 4: 2 / 200, 5: 4 / 200, 6: 20 / 200, 7: 173 / 200}
    LARGEST_RECT_P: float = 0.8
    EDGE_P: float = 0.7
    MIDDLE_PAD: float = 0.35  # every side
    WALL_PAD: float = 0.5  # front only

    # Wall objects
    WINDOW_ASSET_TYPE: str = "Window"
    PAINTING_ASSET_TYPE: str = "Painting"
    TELEVISION_ASSET_TYPE: str = "Television"
    WALL_TOUCH_TOLERANCE: float = 0.05
    WINDOW_ROOM_TYPES: List[str] = ["kitchen", "living_room", "bedroom"]
    WINDOW_COUNT_PMF: Dict[int, float] = {0: 0.125, 1: 0.375, 2: 0.5}
    PAINTING_COUNT_PMF: Dict[int, float] = {0: 0.05, 1: 0.1, 2: 0.5, 3: 0.25, 4: 0.1}
    WALL_OBJECT_MAX_HEIGHT: float = 3.0
    PAINTING_BETA: float = 12.0
    PAINTING_OVER_OBJECT_MAX_HEIGHT: float = 1.15
    TELEVISION_P: Dict[str, float] = {"living_room": 0.8, "kitchen": 0.25, "bedroom": 0.4}

    # Surface objects
    HOUSE_BIAS_MIN: float = -0.3
    HOUSE_BIAS_MAX: float = 0.1
    HOUSE_BIAS_BETA_A: float = 3.5
    HOUSE_BIAS_BETA_B: float = 1.9
    SURFACE_POSE_ATTEMPTS: int = 5
    MAX_SAME_TYPE_PER_RECEPTACLE: int = 3

    # Appearance and states
    COLOR_RANDOMIZE_P: float = 0.8
    MATERIAL_RANDOMIZE_P: float = 0.8
    MATERIAL_RANDOMIZATION: bool = True
    STATE_RANDOMIZE_P: float = 0.5

    # Validator
    NAV_CELL_SIZE: float = 0.25
    AGENT_RADIUS: float = 0.2
    CAMERA_HEIGHT: float = 1.0
    MIN_REACHABLE_PER_ROOM: int = 5
    TARGET_NEAREST_POSITIONS: int = 6
    TARGET_MAX_DISTANCE: float = 1.0
    TARGET_EPSILON: float = 0.2

    # Pipeline
    HOUSE_RETRIES: int = 25
    PLAN_ATTEMPTS: int = 5
    JSON_PRECISION: int = 6
    JOBS: int = 1

    # Statistics
    AREA_BUCKET: float = 10.0

    model_config = SettingsConfigDict(
        env_file=".env",
        env_prefix="PROCHOUSE_",
        case_sensitive=True,
        extra="ignore",
    )


settings = Settings()
