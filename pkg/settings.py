"""
Settings and configuration management
"""

import json
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, Literal, Optional

from pydantic import BaseModel, Field, PrivateAttr
from pydantic_settings import BaseSettings, SettingsConfigDict


class ToleranceSettings(BaseModel):
    """Numerical tolerances"""
    integrality: float = 1e-9
    residual: float = 1e-12
    geometry: float = 1e-12
    round_trip: float = 1e-12


class FlowSettings(BaseModel):
    """Max-flow engine configuration"""
    residual_tolerance: float = 1e-12
    arc_order_seed: Optional[int] = None


class RemovalSettings(BaseModel):
    """Dipole-removal configuration"""
    x0_selection: Literal["lowest", "random"] = "lowest"
    seed: Optional[int] = None
    witness_tolerance: float = 1e-9
    max_depth: Optional[int] = None


class LatticeSettings(BaseModel):
    """Lattice construction and relaxation"""
    epsilon: float = 0.125
    star_rays: int = 1000
    relax_sweeps: int = 20
    relax_grid: int = 64
    profile_samples: int = 1000


class VerifySettings(BaseModel):
    """Oracle suite sizes"""
    seed: int = 0
    mfmc_instances: int = 200
    duality_instances: int = 200
    removal_instances: int = 500
    pipeline_instances: int = 100
    project_pi_samples: int = 100000


class LoggingSettings(BaseModel):
    """Logging configuration"""
    level: str = "INFO"
    format: str = "%(asctime)s [%(levelname)s] %(name)s - %(message)s"
    file: Optional[str] = None


class Settings(BaseSettings):
    """Main settings class that loads from environment and config files"""

    model_config = SettingsConfigDict(
        env_prefix="DIPOLES_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # Environment variables
    tolerance: float = Field(default=1e-9)
    log_level: str = Field(default="INFO")
    log_file: Optional[str] = Field(default=None)
    workers: int = Field(default=4)

    # Configuration from JSON files
    _config_data: Optional[Dict[str, Any]] = PrivateAttr(default=None)

    def __init__(self, config_path: Optional[str] = None, **kwargs):
        super().__init__(**kwargs)
        if config_path:
            self.load_config(config_path)

    def load_config(self, config_path: str) -> None:
        """Load configuration from JSON file"""
        from logger import logger

        try:
            config_file = Path(config_path)
            if config_file.exists():
                with open(config_file, "r") as f:
                    self._config_data = json.load(f)
                logger.info(f"Loaded config file successfully: {config_path}")
            else:
                logger.warning(f"Config file not found: {config_path}")
        except Exception as e:
            logger.error(f"Could not load config file {config_path}: {e}", exc_info=True)

    def _section(self, name: str, model: type) -> Any:
        if self._config_data and name in self._config_data:
            return model(**self._config_data[name])
        return model()

    @property
    def tolerances(self) -> ToleranceSettings:
        """Get tolerance settings; the env/CLI tolerance drives integrality"""
        section = self._section("tolerances", ToleranceSettings)
        if "tolerance" in self.model_fields_set:
            section = section.model_copy(update={"integrality": self.tolerance})
        return section

    @property
    def flow(self) -> FlowSettings:
        """Get flow engine settings"""
        return self._section("flow", FlowSettings)

    @property
    def removal(self) -> RemovalSettings:
        """Get removal settings"""
        return self._section("removal", RemovalSettings)

    @property
    def lattice(self) -> LatticeSettings:
        """Get lattice settings"""
        return self._section("lattice", LatticeSettings)

    @property
    def verify(self) -> VerifySettings:
        """Get oracle suite settings"""
        return self._section("verify", VerifySettings)

    @property
    def logging(self) -> LoggingSettings:
        """Get logging settings"""
        section = self._section("logging", LoggingSettings)
        if "log_level" in self.model_fields_set:
            section = section.model_copy(update={"level": self.log_level})
        if self.log_file:
            section = section.model_copy(update={"file": self.log_file})
        return section


def get_settings(config_path: Optional[str] = None, **overrides: Any) -> Settings:
    """Get settings instance"""
    return Settings(config_path=config_path, **overrides)


@lru_cache(maxsize=1)
def default_settings() -> Settings:
    """Shared settings instance for callers that do not pass their own"""
    return Settings()
