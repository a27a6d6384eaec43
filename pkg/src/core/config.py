"""Configuration management for bondspan."""

import json
import logging
import os
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

from core.graph import DEFAULT_BOND_VERTEX_LIMIT, DEFAULT_ENUMERATION_EDGE_LIMIT
from core.montecarlo import DEFAULT_CHUNK_SIZE, validate_seed
from core.stochastic import DEFAULT_EXACT_EDGE_LIMIT, DEFAULT_JOINT_ATOM_LIMIT

logger = logging.getLogger(__name__)

SEED_ENV_VAR = "BONDSPAN_SEED"


def parse_seed(text: str) -> int:
    """
    Parse a decimal unsigned 64-bit seed.

    Raises:
        ValueError: if ``text`` is not such a number
    """
    if not text.strip().isdigit():
        raise ValueError(f"seed must be a decimal unsigned integer, got {text!r}")
    return validate_seed(int(text))


@dataclass
class AppConfig:
    """Application configuration."""

    seed: int = 0
    exact_edge_limit: int = DEFAULT_EXACT_EDGE_LIMIT
    bond_vertex_limit: int = DEFAULT_BOND_VERTEX_LIMIT
    enumeration_edge_limit: int = DEFAULT_ENUMERATION_EDGE_LIMIT
    joint_atom_limit: int = DEFAULT_JOINT_ATOM_LIMIT
    mc_samples: int = 100_000
    mc_chunk_size: int = DEFAULT_CHUNK_SIZE
    workers: int = 1
    log_level: str = "INFO"

    @classmethod
    def load(cls, config_path: Path | None = None) -> "AppConfig":
        """
        Load configuration from file.

        Args:
            config_path: Path to config file. If None, uses default location.

        Returns:
            AppConfig instance; defaults if the file is missing or unreadable
        """
        if config_path is None:
            config_path = cls.get_default_config_path()

        if config_path.exists():
            try:
                with open(config_path, encoding="utf-8") as f:
                    data = json.load(f)
                known = {f.name for f in fields(cls)}
                unknown = sorted(set(data) - known)
                if unknown:
                    logger.warning(f"Ignoring unknown config keys {unknown} in {config_path}")
                return cls(**{key: value for key, value in data.items() if key in known})
            except Exception as e:
                logger.error(f"Error loading config {config_path}: {e}")
                return cls()

        return cls()

    def save(self, config_path: Path | None = None) -> bool:
        """
        Save configuration to file.

        Args:
            config_path: Path to config file. If None, uses default location.

        Returns:
            True if save successful, False otherwise
        """
        if config_path is None:
            config_path = self.get_default_config_path()

        config_path.parent.mkdir(parents=True, exist_ok=True)

        try:
            with open(config_path, "w", encoding="utf-8") as f:
                json.dump(asdict(self), f, indent=2)
            return True
        except Exception as e:
            logger.error(f"Error saving config {config_path}: {e}")
            return False

    def from_environment(self) -> "AppConfig":
        """
        Overlay ``BONDSPAN_SEED`` from the environment.

        Raises:
            ValueError: if the variable is set but not a valid seed
        """
        raw = os.environ.get(SEED_ENV_VAR)
        if raw is None:
            return self
        return replace(self, seed=parse_seed(raw))

    @staticmethod
    def get_default_config_path() -> Path:
        """Get default configuration file path."""
        config_dir = Path.home() / ".config" / "bondspan"
        return config_dir / "config.json"
