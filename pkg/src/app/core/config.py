"""
Application configuration
"""
try:
    from pydantic_settings import BaseSettings, SettingsConfigDict
except ImportError:
    # Fallback for older pydantic versions
    from pydantic import BaseSettings
    SettingsConfigDict = dict


class Settings(BaseSettings):
    """Application settings, read from CURV4_* environment variables"""

    PROJECT_NAME: str = "curv4"
    VERSION: str = "1.0.0"
    SCHEMA_VERSION: str = "v1"

    # Floating-mode tolerances (rational mode is always exact)
    TOL_ABS: float = 1e-10
    TOL_EQ: float = 1e-9
    FUZZ_TOL: float = 1e-12
    EIGEN_GUARD: float = 1e-6

    # Workers (CURV4_THREADS, 0 = auto)
    THREADS: int = 0
    FUZZ_CHUNK: int = 10_000

    LOG_LEVEL: str = "WARNING"

    # Growth fit
    GROWTH_SEPARATION: float = 0.25
    GROWTH_NOISE: float = 1e-9
    GROWTH_BAND: float = 0.25
    GROWTH_A_FLOOR: float = 1e-9

    model_config = SettingsConfigDict(env_prefix="CURV4_", case_sensitive=True)


settings = Settings()
