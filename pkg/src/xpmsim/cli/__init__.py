"""Command-line layer: config documents, sweep runners, emitters, validation."""

from .config import RunConfig, config_hash, emit_config, parse_config

__all__ = ["RunConfig", "config_hash", "emit_config", "parse_config"]
