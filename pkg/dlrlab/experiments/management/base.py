"""
Shared plumbing for the experiment commands

Every command resolves its config (defaults < --config < --manifest <
flags), validates it, loads MNIST, writes the run manifest, runs its
experiment and writes summary.json. Exit codes: 0 goal met, 1 usage or data
error, 2 experiment ran but did not meet its goal.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple
import sys

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from dlrlab import __version__
from mnist.exceptions import MnistDataError
from mnist.services.loader import STANDARD_FILES, MnistPaths, load_mnist
from optimizers.exceptions import OptimizerError
from optimizers.services.optimizer import Algorithm, OptimizerConfig

from ..exceptions import ConfigurationError
from ..serializers import RunSettingsSerializer, TrialConfigSerializer
from ..services.artifacts import ArtifactWriter
from ..services.configuration import RunManifest, read_manifest, resolve_values, validated
from ..services.persistence import start_run, store_trials
from ..services.trainer import TrialConfig

EXIT_USAGE = 1
EXIT_GOAL_NOT_MET = 2

# option dest -> config key
FLAG_KEYS = {
    'algo': 'algorithm',
    'hidden': 'hidden_units',
    'batch': 'batch_size',
    'threshold': 'threshold',
    'max_epochs': 'max_epochs',
    'eval_interval': 'eval_interval',
    'seed': 'seed',
    'seeds': 'seeds',
    'runs': 'runs',
    'workers': 'workers',
    'eta': 'eta',
    'mu': 'mu',
    'adam_alpha': 'adam_alpha',
    'beta1': 'beta1',
    'beta2': 'beta2',
    'epsilon': 'epsilon',
    'eta0': 'eta0',
    'alpha': 'alpha',
    'schedule1': 'schedule1',
    'schedule2': 'schedule2',
    'sizes': 'sizes',
    'grid': 'grid',
    'start_size': 'start_size',
    'size_step': 'size_step',
    'trace_epochs': 'trace_epochs',
    'fit_starts': 'fit_starts',
    'replay_seed_offset': 'replay_seed_offset',
}


@dataclass
class RunPlan:
    trial: TrialConfig
    seeds: List[int]
    workers: int
    algorithms: List[Algorithm]
    run_settings: Dict[str, object]
    values: Dict[str, object]


@dataclass
class ExperimentOutcome:
    succeeded: bool
    summary: Dict[str, object]
    message: str
    records: List[Tuple[str, object]] = field(default_factory=list)


class ExperimentCommand(BaseCommand):
    """Base class for train, compare, minsize and replay"""

    command_name = ''
    command_defaults: Dict[str, object] = {}

    def create_parser(self, prog_name, subcommand, **kwargs):
        parser = super().create_parser(prog_name, subcommand, **kwargs)
        # parser errors raise CommandError so they exit 1, not argparse's 2
        parser.called_from_command_line = False
        return parser

    def run_from_argv(self, argv):
        try:
            super().run_from_argv(argv)
        except CommandError as e:
            self.stderr.write(str(e))
            sys.exit(EXIT_USAGE)

    def add_arguments(self, parser):
        parser.add_argument('--algo', type=str, help='Algorithm (' + ', '.join(a.value for a in Algorithm) + ')')
        parser.add_argument('--hidden', type=int, help='Hidden-layer size')
        parser.add_argument('--batch', type=int, help='Minibatch size')
        parser.add_argument('--threshold', type=float, help='Test accuracy to reach, in [0, 1]')
        parser.add_argument('--max-epochs', type=float, help='Training budget in epochs')
        parser.add_argument('--eval-interval', type=int, help='Minibatch updates between test evaluations')
        parser.add_argument('--seed', type=int, help='Trial seed (first seed of a multi-run experiment)')
        parser.add_argument('--seeds', type=str, help='Comma-separated seeds (overrides --seed/--runs)')
        parser.add_argument('--runs', type=int, help='Number of seeds')
        parser.add_argument('--workers', type=int, help='Parallel worker processes')

        group = parser.add_argument_group('optimizer parameters')
        group.add_argument('--eta', type=float, help='SGD/momentum learning rate')
        group.add_argument('--mu', type=float, help='Momentum coefficient')
        group.add_argument('--adam-alpha', type=float, help='Adam step size')
        group.add_argument('--beta1', type=float, help='Adam first-moment decay')
        group.add_argument('--beta2', type=float, help='Adam second-moment decay')
        group.add_argument('--epsilon', type=float, help='Adam epsilon')
        group.add_argument('--eta0', type=float, help='DLR rate ceiling')
        group.add_argument('--alpha', type=float, help='DLR norm offset')
        group.add_argument('--schedule1', type=str, help='Layer-1 schedule a,b,c,d (scheduled algorithm)')
        group.add_argument('--schedule2', type=str, help='Layer-2 schedule a,b,c,d (scheduled algorithm)')

        group = parser.add_argument_group('files')
        group.add_argument('--config', type=str, help='Flat key = value config file')
        group.add_argument('--manifest', type=str, help='Rerun from an earlier run_manifest.json (or its directory)')
        group.add_argument('--out', type=str, help='Output directory')
        group.add_argument('--data-dir', type=str, help='Directory with the four MNIST files (default: DLRLAB_DATA_DIR)')
        for key in STANDARD_FILES:
            group.add_argument(f"--{key.replace('_', '-')}", type=str, help=f'Explicit path of the {key.replace("_", " ")} file')
        group.add_argument('--persist', action='store_true', help='Store the run and its trials in the database')

        self.add_experiment_arguments(parser)

    def add_experiment_arguments(self, parser):
        pass

    def flag_values(self, options) -> Dict[str, object]:
        return {key: options.get(dest) for dest, key in FLAG_KEYS.items() if options.get(dest) is not None}

    def build_plan(self, values: Dict[str, object]) -> RunPlan:
        """
        Raises:
            ConfigurationError: If any resolved value is invalid
        """
        run_settings = validated(RunSettingsSerializer, values).validated_data
        algorithms = run_settings['algorithm']
        trial_values = dict(values, algorithm=algorithms[0].value)
        trial = validated(TrialConfigSerializer, trial_values).to_trial_config()
        return RunPlan(
            trial=trial,
            seeds=run_settings['seeds'],
            workers=run_settings['workers'],
            algorithms=algorithms,
            run_settings=dict(run_settings),
            values=values,
        )

    def base_optimizers(self, plan: RunPlan) -> Dict[Algorithm, OptimizerConfig]:
        """Per-algorithm optimizer configs carrying any explicit parameter values"""
        configs = {}
        for algorithm in plan.algorithms:
            values = dict(plan.values, algorithm=algorithm.value)
            configs[algorithm] = validated(TrialConfigSerializer, values).validated_data['optimizer']
        return configs

    def resolve_paths(self, options, manifest: Optional[RunManifest]) -> MnistPaths:
        overrides = {key: options.get(key) for key in STANDARD_FILES}
        data_dir = options.get('data_dir')
        if manifest is not None and not data_dir and not any(overrides.values()):
            overrides = manifest.data_paths
        return MnistPaths.resolve(data_dir or settings.DLRLAB_DATA_DIR, overrides)

    def run_experiment(self, plan: RunPlan, train, test, writer: ArtifactWriter) -> ExperimentOutcome:
        raise NotImplementedError

    def handle(self, *args, **options):
        try:
            manifest_in = read_manifest(options['manifest']) if options.get('manifest') else None
            values = resolve_values(self.command_defaults, options.get('config'), manifest_in,
                                    self.flag_values(options))
            plan = self.build_plan(values)
            paths = self.resolve_paths(options, manifest_in)
            train, test = load_mnist(paths)
        except (ConfigurationError, MnistDataError) as e:
            raise CommandError(str(e), returncode=EXIT_USAGE)

        output_dir = Path(options.get('out') or settings.DLRLAB_OUTPUT_DIR)
        writer = ArtifactWriter(output_dir)
        manifest = RunManifest(
            command=self.command_name,
            config_path=options.get('config'),
            resolved_config=values,
            data_paths=paths.as_dict(),
            output_dir=str(output_dir),
            seeds=list(plan.seeds),
            tool_version=__version__,
        )
        writer.write_manifest(manifest)
        run = start_run(manifest) if options.get('persist') else None

        self.stdout.write(f"Running {self.command_name} into {output_dir}")
        try:
            outcome = self.run_experiment(plan, train, test, writer)
        except (ConfigurationError, OptimizerError) as e:
            if run is not None:
                run.mark_failed(str(e))
            raise CommandError(str(e), returncode=EXIT_USAGE)
        except Exception as e:
            if run is not None:
                run.mark_failed(f"{type(e).__name__}: {e}")
            raise
        writer.write_json('summary.json', outcome.summary)

        if run is not None:
            store_trials(run, outcome.records)
            run.mark_finished(outcome.succeeded, outcome.summary)

        if not outcome.succeeded:
            raise CommandError(outcome.message, returncode=EXIT_GOAL_NOT_MET)
        self.stdout.write(self.style.SUCCESS(outcome.message))
