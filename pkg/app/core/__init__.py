"""
Core module: Configuration, Logging, Errors
"""

from app.core.config import Settings, load_settings, settings
from app.core.exceptions import AisActivityError, ConfigError, StageError

__all__ = ["AisActivityError", "ConfigError", "Settings", "StageError", "load_settings", "settings"]
