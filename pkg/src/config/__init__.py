"""Configuration module for mtd-bench."""

from .constants import ENGINE_DEFAULTS, LOG_LEVEL

__all__ = ["ENGINE_DEFAULTS", "LOG_LEVEL"]
