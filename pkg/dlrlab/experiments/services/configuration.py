"""
Run Configuration Service

Resolves the flat key/value settings of a command run. Later layers win:

    settings defaults < --config file < --manifest < command-line flags

Config files are plain `key = value` lines, e.g.

    algorithm = dlr-pre
    hidden_units = 100
    eta0 = 1.0
    alpha = 10
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Mapping, Optional
import json
import logging

from django.conf import settings
from dotenv import dotenv_values

from ..exceptions import ConfigurationError

logger = logging.getLogger(__name__)

CONFIG_KEYS = (
    'algorithm', 'hidden_units', 'batch_size', 'threshold', 'max_epochs',
    'eval_interval', 'seed', 'seeds', 'runs', 'workers',
    'eta', 'mu', 'adam_alpha', 'beta1', 'beta2', 'epsilon', 'eta0', 'alpha', 'schedule1', 'schedule2',
    'sizes', 'grid', 'start_size', 'size_step', 'trace_epochs', 'fit_starts', 'replay_seed_offset',
)
MANIFEST_FILENAME = 'run_manifest.json'


@dataclass(frozen=True)
class RunManifest:
    command: str
    config_path: Optional[str]
    resolved_config: Dict[str, object]
    data_paths: Dict[str, str]
    output_dir: str
    seeds: List[int] = field(default_factory=list)
    tool_version: str = ''

    def to_dict(self) -> Dict[str, object]:
        return {
            'command': self.command,
            'config_path': self.config_path,
            'resolved_config': self.resolved_config,
            'data_paths': self.data_paths,
            'output_dir': self.output_dir,
            'seeds': list(self.seeds),
            'tool_version': self.tool_version,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, object]) -> 'RunManifest':
        try:
            return cls(
                command=data['command'],
                config_path=data.get('config_path'),
                resolved_config=dict(data['resolved_config']),
                data_paths=dict(data.get('data_paths') or {}),
                output_dir=data.get('output_dir', ''),
                seeds=list(data.get('seeds') or []),
                tool_version=data.get('tool_version', ''),
            )
        except (KeyError, TypeError) as e:
            raise ConfigurationError(f"Manifest is missing a required entry: {e}")


def default_values() -> Dict[str, object]:
    return {
        'hidden_units': settings.DLRLAB_HIDDEN_UNITS,
        'batch_size': settings.DLRLAB_BATCH_SIZE,
        'threshold': settings.DLRLAB_THRESHOLD,
        'max_epochs': settings.DLRLAB_MAX_EPOCHS,
        'eval_interval': settings.DLRLAB_EVAL_INTERVAL,
        'seed': 0,
        'runs': settings.DLRLAB_RUNS,
        'workers': settings.DLRLAB_WORKERS,
        'sizes': settings.DLRLAB_SIZES,
        'start_size': settings.DLRLAB_START_SIZE,
        'size_step': settings.DLRLAB_SIZE_STEP,
        'trace_epochs': settings.DLRLAB_TRACE_EPOCHS,
        'fit_starts': settings.DLRLAB_FIT_STARTS,
        'replay_seed_offset': settings.DLRLAB_REPLAY_SEED_OFFSET,
    }


def _check_keys(values: Mapping[str, object], source: str) -> None:
    unknown = sorted(set(values) - set(CONFIG_KEYS))
    if unknown:
        raise ConfigurationError(f"Unknown key(s) in {source}: {', '.join(unknown)}")


def read_config_file(path) -> Dict[str, str]:
    """
    Raises:
        ConfigurationError: If the file is missing or has unknown or empty keys
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigurationError(f"Config file not found: {path}")
    values = dotenv_values(path)
    _check_keys(values, str(path))
    empty = sorted(key for key, value in values.items() if value is None)
    if empty:
        raise ConfigurationError(f"Key(s) without a value in {path}: {', '.join(empty)}")
    return dict(values)


def read_manifest(path) -> RunManifest:
    """
    Raises:
        ConfigurationError: If the manifest is missing or not valid JSON
    """
    path = Path(path)
    if path.is_dir():
        path = path / MANIFEST_FILENAME
    if not path.is_file():
        raise ConfigurationError(f"Manifest not found: {path}")
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise ConfigurationError(f"Manifest {path} is not valid JSON: {e}")
    manifest = RunManifest.from_dict(data)
    _check_keys(manifest.resolved_config, str(path))
    return manifest


def resolve_values(command_defaults: Optional[Mapping[str, object]] = None, config_path=None,
                   manifest: Optional[RunManifest] = None,
                   flags: Optional[Mapping[str, object]] = None) -> Dict[str, object]:
    """
    Merges every layer into one flat dict; flags set to None are ignored
    """
    values = default_values()
    values.update(command_defaults or {})
    if config_path:
        values.update(read_config_file(config_path))
    if manifest is not None:
        values.update(manifest.resolved_config)
    values.update({key: value for key, value in (flags or {}).items() if value is not None})
    _check_keys(values, 'resolved configuration')
    return values


def validated(serializer_class, values: Mapping[str, object]):
    """
    Runs a DRF serializer over resolved values

    Raises:
        ConfigurationError: With one line per invalid field
    """
    serializer = serializer_class(data=dict(values))
    if not serializer.is_valid():
        lines = []
        for name, messages in serializer.errors.items():
            label = 'config' if name == 'non_field_errors' else name
            lines.append(f"{label}: {' '.join(str(m) for m in messages)}")
        raise ConfigurationError('; '.join(lines), errors=serializer.errors)
    return serializer
