"""Configuration management."""

from .manager import ConfigManager, LabConfig

__all__ = ["ConfigManager", "LabConfig"]
