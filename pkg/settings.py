"""
Environment configuration for SwallowSense
Values come from the process environment (optionally a .env file loaded by the entry points)
"""

import os
from typing import List, Optional

from pydantic import BaseModel, Field


class Settings(BaseModel):
    """Process-wide settings resolved from the environment"""

    seed: Optional[int] = Field(default=None, description="Seed fallback when --seed is not given")
    n_jobs: int = Field(default=1, description="joblib worker count")
    log_level: str = Field(default="INFO", description="Root logging level")
    api_keys: List[str] = Field(default_factory=list, description="Accepted service API keys")
    model_path: Optional[str] = Field(default=None, description="Forest JSON served by /predict")
    host: str = Field(default="127.0.0.1")
    port: int = Field(default=1789)
    debug: bool = Field(default=False)


def get_settings() -> Settings:
    """Read settings from environment variables"""
    keys_str = os.getenv("SWALLOWSENSE_API_KEYS", "")
    seed_str = os.getenv("SWALLOWSENSE_SEED", "").strip()
    return Settings(
        seed=int(seed_str) if seed_str else None,
        n_jobs=int(os.getenv("SWALLOWSENSE_N_JOBS", 1)),
        log_level=os.getenv("SWALLOWSENSE_LOG_LEVEL", "INFO").upper(),
        api_keys=[key.strip() for key in keys_str.split(",") if key.strip()],
        model_path=os.getenv("SWALLOWSENSE_MODEL_PATH") or None,
        host=os.getenv("SERVER_HOST", "127.0.0.1"),
        port=int(os.getenv("SERVER_PORT", 1789)),
        debug=os.getenv("DEBUG", "False").lower() == "true",
    )
