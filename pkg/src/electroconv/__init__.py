"""Pseudo-spectral simulator and verification harness for 2D electroconvection."""

from .spectral import Grid, make_grid
from .model import SimState
from .config import ConfigError, ExperimentConfig, parse_config

__all__ = ["Grid", "make_grid", "SimState", "ConfigError", "ExperimentConfig", "parse_config"]
__version__ = "0.1.0"
