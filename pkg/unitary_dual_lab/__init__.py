"""Unitary Dual Lab - moment laboratory for unitary Brownian motion and its free limit."""

__version__ = "0.1.0"
__author__ = "Unitary Dual Lab developers"

from .config.manager import ConfigManager
from .moments.free_engine import FreeMomentEngine
from .words.parser import parse_word

__all__ = ["ConfigManager", "FreeMomentEngine", "parse_word"]
