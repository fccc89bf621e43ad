# backend/api/settings.py
"""
Engine configuration - guards, sampling sizes and service options.
Values come from SEMICECH_* environment variables or a local .env file.
"""

import logging
from contextlib import contextmanager
from typing import Any, Iterator, Optional

from dotenv import load_dotenv
from pydantic_settings import BaseSettings, SettingsConfigDict

load_dotenv()


class EngineSettings(BaseSettings):
    """Bounds for every exhaustive search plus service options"""

    model_config = SettingsConfigDict(env_prefix="SEMICECH_", env_file=".env", extra="ignore")

    # Enumeration guards
    tensor_guard: int = 4096  # |R|^(|M|*|N|)
    hom_guard: int = 4096  # candidate maps M -> N
    prime_guard: int = 16  # |S| for prime ideal enumeration
    witness_guard: int = 250_000  # |X^{n-1}|^2 pairs for rho witness search
    isomorphism_guard: int = 9  # module size for brute-force isomorphism search

    # Sampling
    chain_identity_samples: int = 1000
    build_check_samples: int = 32
    exponent_bound: int = 3
    coefficient_bound: int = 5
    cover_search_bound: int = 2
    random_seed: int = 0

    # Service
    log_level: str = "WARNING"
    api_host: str = "0.0.0.0"
    api_port: int = 8000


settings = EngineSettings()


def configure_logging(level: Optional[str] = None) -> None:
    resolved = getattr(logging, (level or settings.log_level).upper(), logging.WARNING)
    logging.basicConfig(level=resolved, format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    logging.getLogger().setLevel(resolved)


@contextmanager
def override(**values: Any) -> Iterator[EngineSettings]:
    """Temporarily replace settings fields; None values are ignored"""
    previous = {}
    for key, value in values.items():
        if value is None:
            continue
        if key not in EngineSettings.model_fields:
            raise KeyError(key)
        previous[key] = getattr(settings, key)
        setattr(settings, key, value)
    try:
        yield settings
    finally:
        for key, value in previous.items():
            setattr(settings, key, value)
