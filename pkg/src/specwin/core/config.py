"""Configuration management for SpecWin runs.

This module loads run configurations from YAML or JSON files, validates them
against the RunConfig model and turns the validated sections into the domain
objects the numerical modules consume.

The ConfigManager class handles:
- YAML/JSON parsing with line-addressed diagnostics
- Pydantic validation with field-addressed diagnostics
- Command-line overrides of N, grid, seed and output directory
- Construction of symbols, maps, spaces, grids and witness schedules
- Per-path caching of validated configurations

Example:
    >>> from specwin.core.config import ConfigManager
    >>> manager = ConfigManager()
    >>> cfg = manager.load_data({"map": {"hyperbolic_r": 0.5}, "symbol": {"num": [0, 1]}})
    >>> manager.build_map(cfg)(0.0)
    (0.5+0j)
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Any

import numpy as np
import yaml
from pydantic import ValidationError

from ..settings import TRUNCATION
from ..types import ConfigurationError, MapConfig, RunConfig, SpaceKind
from ..utils.validation import pair_to_complex
from .mobius import (
    MobiusMap,
    elliptic,
    from_coefficients,
    hyperbolic_r,
    parabolic_cayley,
    rotation,
)
from .oracle import SamplingSpec
from .space import SpaceSpec
from .symbol import SymbolSpec
from .truncation import GridSpec
from .witness import WitnessSchedule

logger = logging.getLogger(__name__)


def _describe_validation(error: ValidationError) -> str:
    """One line per failing field, addressed by its dotted path."""
    lines = []
    for item in error.errors():
        path = ".".join(str(part) for part in item["loc"]) or "<root>"
        lines.append(f"{path}: {item['msg']}")
    return "; ".join(lines)


class ConfigManager:
    """Loads, validates and interprets run configurations.

    Attributes:
        _cache: Validated configurations keyed by resolved file path

    Example:
        >>> manager = ConfigManager()
        >>> cfg = manager.load(Path("golden.yml"))  # doctest: +SKIP
        >>> manager.build_space(cfg).label()  # doctest: +SKIP
        'hardy'
    """

    def __init__(self) -> None:
        """Initialize the configuration manager with an empty cache."""
        self._cache: dict[Path, RunConfig] = {}

    def load(self, path: Path) -> RunConfig:
        """Load and validate a configuration file.

        JSON is a subset of YAML, so both formats go through ``yaml.safe_load``.
        Results are cached per resolved path.

        Args:
            path: Configuration file

        Returns:
            RunConfig: The validated configuration

        Raises:
            ConfigurationError: If the file is missing, unreadable, malformed or invalid

        Example:
            >>> manager = ConfigManager()
            >>> try:
            ...     cfg = manager.load(Path("run.yml"))
            ... except ConfigurationError as e:
            ...     print(f"Configuration error: {e}")
        """
        key = path.resolve()
        if key in self._cache:
            return self._cache[key]

        if not path.exists():
            raise ConfigurationError(f"Configuration file not found: {path}")

        try:
            with path.open("r", encoding="utf-8") as f:
                data = yaml.safe_load(f)
        except yaml.YAMLError as e:
            mark = getattr(e, "problem_mark", None)
            where = f" at line {mark.line + 1}, column {mark.column + 1}" if mark is not None else ""
            problem = getattr(e, "problem", None) or str(e)
            raise ConfigurationError(f"Invalid YAML in {path}{where}: {problem}") from e
        except OSError as e:
            raise ConfigurationError(f"Failed to read configuration file {path}: {e}") from e

        config = self.load_data(data, source=str(path))
        self._cache[key] = config
        return config

    def load_data(self, data: Any, source: str = "<data>") -> RunConfig:
        """Validate an already parsed mapping.

        Raises:
            ConfigurationError: If ``data`` is not a mapping or fails validation
        """
        if not isinstance(data, dict):
            raise ConfigurationError(f"Invalid configuration format in {source}. Expected a mapping at the top level.")
        try:
            return RunConfig(**data)
        except ValidationError as e:
            raise ConfigurationError(f"Configuration validation failed for {source}: {_describe_validation(e)}") from e

    def with_overrides(
        self,
        config: RunConfig,
        *,
        N: int | None = None,
        grid: tuple[int, int] | None = None,
        seed: int | None = None,
        out_dir: Path | None = None,
    ) -> RunConfig:
        """Apply command-line flags on top of a configuration.

        The result is validated again so that overrides obey the same limits.
        """
        data = config.model_dump(by_alias=True)
        if N is not None:
            data["truncation"]["N"] = N
        if grid is not None:
            data["grid"]["width"], data["grid"]["height"] = grid
        if seed is not None:
            data["seed"] = seed
        if out_dir is not None:
            data["out_dir"] = out_dir
        return self.load_data(data, source="command-line overrides")

    # ------------------------------------------------------------------
    # Domain objects
    # ------------------------------------------------------------------

    def build_symbol(self, config: RunConfig) -> SymbolSpec:
        """The weight psi described by the ``symbol`` section."""
        section = config.symbol
        return SymbolSpec(
            tuple(pair_to_complex(p) for p in section.num),
            tuple(pair_to_complex(p) for p in section.den),
            tuple(pair_to_complex(p) for p in section.blaschke),
        )

    def build_map(self, config: RunConfig) -> MobiusMap:
        """The automorphism phi described by the ``map`` section."""
        return map_from_config(config.map_)

    def build_space(self, config: RunConfig) -> SpaceSpec:
        """Hardy space or Bergman space with the configured alpha."""
        section = config.space
        if section.kind == SpaceKind.HARDY:
            return SpaceSpec.hardy()
        return SpaceSpec.bergman(section.alpha)

    def build_grid(self, config: RunConfig, radius: float) -> GridSpec:
        """The pseudospectrum grid, centered on the origin around ``radius`` unless bounds are given."""
        section = config.grid
        if section.bounds is not None:
            re_min, re_max, im_min, im_max = section.bounds
            return GridSpec(re_min, re_max, im_min, im_max, section.width, section.height)
        return GridSpec.around(radius, section.width, section.height, TRUNCATION.grid_margin)

    def build_schedule(self, config: RunConfig) -> WitnessSchedule:
        """Scan budgets of the witness constructions."""
        section = config.witness
        return WitnessSchedule(
            stages=section.stages,
            candidates=section.candidates,
            max_orbit_steps=section.max_orbit_steps,
            birkhoff_fraction=section.birkhoff_fraction,
            n_terms=section.n_terms,
            base_points=section.base_points,
            rational_tolerance=config.tolerances.rational,
            max_period=config.tolerances.rational_max_period,
        )

    def rational_cutoff(self, config: RunConfig) -> dict[str, Any]:
        """Keyword arguments that hand the configured rationality cutoff to the classifier."""
        return {
            "rational_tolerance": config.tolerances.rational,
            "max_period": config.tolerances.rational_max_period,
        }

    def build_sampling(self, config: RunConfig) -> SamplingSpec:
        """Polar sampling grid for sampled closures."""
        section = config.sampling
        return SamplingSpec(radii=section.radii, angles=section.angles, membership=section.membership)

    def rng(self, config: RunConfig) -> np.random.Generator:
        """The seeded generator every randomized scan draws from."""
        return np.random.default_rng(config.seed)

    def clear_cache(self) -> None:
        """Forget every cached configuration so the next load rereads the file."""
        self._cache.clear()


def map_from_config(section: MapConfig) -> MobiusMap:
    """Dispatch on the single constructor key of a map section."""
    if section.rotation is not None:
        return rotation(section.rotation)
    if section.elliptic is not None:
        return elliptic(pair_to_complex(section.elliptic.fixed), section.elliptic.turns)
    if section.hyperbolic_r is not None:
        return hyperbolic_r(section.hyperbolic_r)
    if section.parabolic_cayley is not None:
        return parabolic_cayley(section.parabolic_cayley)
    a, b, c, d = (pair_to_complex(p) for p in section.coeffs or ())
    return from_coefficients(a, b, c, d)
