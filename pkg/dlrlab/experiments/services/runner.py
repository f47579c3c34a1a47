"""
Trial Runner

Executes independent trials, sequentially or on a process pool. Each trial
seeds itself from its own config, so results are identical either way and
come back in submission order.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from typing import List, Sequence
import logging

from mnist.services.idx_reader import Dataset

from .trainer import TrialConfig, TrialRecord, train_to_threshold

logger = logging.getLogger(__name__)

# Filled once per worker process by the pool initializer.
_worker_data = {}


def _init_worker(train: Dataset, test: Dataset) -> None:
    _worker_data['train'] = train
    _worker_data['test'] = test


def _run_trial(config: TrialConfig, train: Dataset, test: Dataset, keep_network: bool) -> TrialRecord:
    trial = train_to_threshold(config, train, test)
    return trial if keep_network else replace(trial, network=None)


def _run_in_worker(config: TrialConfig, keep_network: bool) -> TrialRecord:
    return _run_trial(config, _worker_data['train'], _worker_data['test'], keep_network)


def seed_list(base_seed: int, runs: int) -> List[int]:
    return [base_seed + offset for offset in range(runs)]


def run_trials(configs: Sequence[TrialConfig], train: Dataset, test: Dataset,
               workers: int = 1, keep_network: bool = False) -> List[TrialRecord]:
    """
    Runs every config to completion

    Args:
        configs: Trials to run
        train: Training split
        test: Evaluation split
        workers: Process count; 1 runs in this process
        keep_network: Keep final weights on the records (off for scans)

    Returns:
        One TrialRecord per config, in the order given
    """
    configs = list(configs)
    if not configs:
        return []
    if workers <= 1 or len(configs) == 1:
        logger.info(f"Running {len(configs)} trial(s) sequentially")
        return [_run_trial(config, train, test, keep_network) for config in configs]

    workers = min(workers, len(configs))
    logger.info(f"Running {len(configs)} trials on {workers} worker processes")
    with ProcessPoolExecutor(max_workers=workers, initializer=_init_worker, initargs=(train, test)) as pool:
        return list(pool.map(_run_in_worker, configs, [keep_network] * len(configs)))
