"""
Parameter Grid Service

Per-algorithm hyperparameter grids for the scan experiments. Defaults come
from settings.DLRLAB_DEFAULT_GRIDS; a grid file overrides them with flat
lines such as

    dlr-pre.eta0 = 0.3,1.0
    dlr-pre.alpha = 10
"""

from dataclasses import dataclass
from itertools import product
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Tuple
import logging

from django.conf import settings
from dotenv import dotenv_values

from optimizers.exceptions import OptimizerConfigError
from optimizers.services.optimizer import TUNED_PARAMS, Algorithm, OptimizerConfig

from ..exceptions import ConfigurationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ParameterGrid:
    algorithm: Algorithm
    values: Tuple[Tuple[str, Tuple[float, ...]], ...]

    @classmethod
    def from_mapping(cls, algorithm, values: Mapping[str, Sequence[float]]) -> 'ParameterGrid':
        """
        Raises:
            ConfigurationError: On an unknown algorithm, a parameter the
                algorithm does not use, or an empty value list
        """
        try:
            algorithm = Algorithm(algorithm)
        except ValueError:
            raise ConfigurationError(f"Unknown algorithm '{algorithm}' in grid")
        allowed = set(TUNED_PARAMS[algorithm]) - {'schedules'}
        items = []
        for name in sorted(values):
            if name not in allowed:
                raise ConfigurationError(
                    f"'{name}' is not a tunable parameter of {algorithm.value} "
                    f"(choose from {', '.join(sorted(allowed))})"
                )
            points = tuple(sorted(float(v) for v in values[name]))
            if not points:
                raise ConfigurationError(f"Grid for {algorithm.value}.{name} is empty")
            items.append((name, points))
        return cls(algorithm=algorithm, values=tuple(items))

    def __len__(self) -> int:
        size = 1
        for _, points in self.values:
            size *= len(points)
        return size

    def points(self, base: Optional[OptimizerConfig] = None) -> List[OptimizerConfig]:
        """
        Every grid point as an OptimizerConfig, sorted by parameter tuple so
        the result does not depend on how the grid was written

        Raises:
            ConfigurationError: If a grid point fails validation
        """
        base = base if base is not None and base.algorithm is self.algorithm else OptimizerConfig(self.algorithm)
        names = [name for name, _ in self.values]
        configs = []
        for combination in product(*(points for _, points in self.values)):
            config = base.with_params(**dict(zip(names, combination)))
            try:
                config.validate()
            except OptimizerConfigError as e:
                raise ConfigurationError(f"Invalid grid point for {self.algorithm.value}: {e}")
            configs.append(config)
        return sorted(configs, key=OptimizerConfig.sort_key)


def default_grids() -> Dict[Algorithm, ParameterGrid]:
    return {
        Algorithm(name): ParameterGrid.from_mapping(name, values)
        for name, values in settings.DLRLAB_DEFAULT_GRIDS.items()
    }


def parse_float_list(text: str, what: str) -> List[float]:
    try:
        values = [float(part) for part in str(text).split(',') if part.strip()]
    except ValueError:
        raise ConfigurationError(f"{what} must be a comma-separated list of numbers, got '{text}'")
    return values


def load_grid_file(path) -> Dict[Algorithm, ParameterGrid]:
    """
    Reads a grid file; algorithms it names replace their default grid whole

    Raises:
        ConfigurationError: If the file is missing or a line is malformed
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigurationError(f"Grid file not found: {path}")
    raw = dotenv_values(path)
    by_algorithm: Dict[str, Dict[str, List[float]]] = {}
    for key, value in raw.items():
        algorithm, _, name = key.partition('.')
        if not name or value is None:
            raise ConfigurationError(f"Grid file {path}: expected 'algorithm.param = v1,v2', got '{key}'")
        by_algorithm.setdefault(algorithm, {})[name] = parse_float_list(value, key)
    grids = {}
    for algorithm, values in by_algorithm.items():
        grid = ParameterGrid.from_mapping(algorithm, values)
        grids[grid.algorithm] = grid
    logger.info(f"Loaded grids for {', '.join(a.value for a in grids)} from {path}")
    return grids


def resolve_grids(algorithms: Sequence[Algorithm], grid_path=None,
                  base_configs: Optional[Mapping[Algorithm, OptimizerConfig]] = None) -> Dict[Algorithm, List[OptimizerConfig]]:
    """
    Grid points per requested algorithm: the grid file's grid where it has
    one, otherwise the default. An algorithm without any grid is searched at
    its base config only.
    """
    grids = default_grids()
    if grid_path:
        grids.update(load_grid_file(grid_path))
    base_configs = base_configs or {}
    resolved = {}
    for algorithm in algorithms:
        base = base_configs.get(algorithm, OptimizerConfig(algorithm))
        grid = grids.get(algorithm)
        resolved[algorithm] = grid.points(base) if grid is not None else [base]
        if not resolved[algorithm]:
            raise ConfigurationError(f"Grid for {algorithm.value} has no points")
    return resolved
