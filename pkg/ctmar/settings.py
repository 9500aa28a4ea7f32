import os

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    app_version: str = "0.1.0"
    log_level: str = "INFO"
    workers: int = os.cpu_count() or 1
    mu_water: float = 0.02  # 1/mm at ~70 keV
    psnr_cap_db: float = 99.0
    plan_cache_mb: int = 256
    spectrum_path: str | None = None

    model_config = SettingsConfigDict(
        env_prefix="CTMAR_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )


settings = Settings()
