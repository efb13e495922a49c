"""Settings and configuration management using Pydantic."""
from pathlib import Path

from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    """Runtime settings shared by the library, the CLI and the service."""

    # Logging
    LOG_LEVEL: str = "INFO"

    # Paths
    BASE_DIR: Path = Path(__file__).parent.parent
    OUTPUT_DIR: Path = BASE_DIR / "results"

    # Numerics
    DEFAULT_DT: float = 0.1
    RESONANCE_TOL: float = 1e-6
    OMEGA_RETRY_CAP: int = 100
    ACTION_FLOOR: float = 1e-12
    TRIADIC_SIGN: int = 1

    # Averaging window for R-hat
    R_HAT_T0: float = 30.0
    R_HAT_T_FIN: float = 40.0

    # Thresholds
    SYNC_LEVEL: float = 0.8
    SYNC_THRESHOLD: float = 0.95
    CLUSTER_THRESHOLD: float = 0.95
    COST_OUTLIER_FACTOR: float = 100.0

    # Campaigns
    DEFAULT_REPLICATES: int = 50
    WORKERS: int = 1

    # Tests
    RUN_SLOW_TESTS: bool = False

    # FastAPI Settings
    API_TITLE: str = "Hypersync API"
    API_VERSION: str = "1.0.0"
    API_HOST: str = "0.0.0.0"
    API_PORT: int = 8000

    class Config:
        env_file = ".env"
        env_file_encoding = "utf-8"
        case_sensitive = True


# Global settings instance
settings = Settings()
