from rest_framework import serializers

from optimizers.exceptions import OptimizerError
from optimizers.services.optimizer import Algorithm, OptimizerConfig
from optimizers.services.rules import ScheduleParams

from .models import ExperimentRun, TrialResult
from .services.trainer import TrialConfig

MAX_SEED = 2 ** 63 - 1
OPTIMIZER_FIELDS = ('eta', 'mu', 'adam_alpha', 'beta1', 'beta2', 'epsilon', 'eta0', 'alpha')


def parse_int_list(value, what, minimum):
    try:
        items = [int(part) for part in str(value).split(',') if part.strip()]
    except ValueError:
        raise serializers.ValidationError(f"{what} must be a comma-separated list of integers.")
    if not items:
        raise serializers.ValidationError(f"At least one {what} is required.")
    if any(item < minimum for item in items):
        raise serializers.ValidationError(f"Every {what} must be at least {minimum}.")
    return items


def parse_schedule(value):
    """'a,b,c,d' -> ScheduleParams"""
    try:
        parts = [float(part) for part in str(value).split(',')]
    except ValueError:
        raise serializers.ValidationError("Schedule must be four comma-separated numbers a,b,c,d.")
    if len(parts) != 4:
        raise serializers.ValidationError(f"Schedule needs 4 values a,b,c,d, got {len(parts)}.")
    return ScheduleParams(*parts)


class TrialConfigSerializer(serializers.Serializer):
    """Validates resolved flat config values for one trial"""

    algorithm = serializers.ChoiceField(choices=[a.value for a in Algorithm])
    hidden_units = serializers.IntegerField(min_value=1)
    batch_size = serializers.IntegerField(min_value=1)
    threshold = serializers.FloatField(min_value=0.0, max_value=1.0)
    max_epochs = serializers.FloatField(min_value=0.0)
    eval_interval = serializers.IntegerField(min_value=1)
    seed = serializers.IntegerField(min_value=0, max_value=MAX_SEED)

    eta = serializers.FloatField(required=False)
    mu = serializers.FloatField(required=False)
    adam_alpha = serializers.FloatField(required=False)
    beta1 = serializers.FloatField(required=False)
    beta2 = serializers.FloatField(required=False)
    epsilon = serializers.FloatField(required=False)
    eta0 = serializers.FloatField(required=False)
    alpha = serializers.FloatField(required=False)
    schedule1 = serializers.CharField(required=False, allow_blank=True)
    schedule2 = serializers.CharField(required=False, allow_blank=True)

    def validate_schedule1(self, value):
        return parse_schedule(value) if value.strip() else None

    def validate_schedule2(self, value):
        return parse_schedule(value) if value.strip() else None

    def validate(self, attrs):
        """
        Builds the optimizer config so its own range checks apply; schedules
        must also stay positive over the whole epoch budget
        """
        params = {name: attrs[name] for name in OPTIMIZER_FIELDS if name in attrs}
        schedules = tuple(s for s in (attrs.get('schedule1'), attrs.get('schedule2')) if s is not None)
        try:
            optimizer = OptimizerConfig(Algorithm(attrs['algorithm']), schedules=schedules, **params)
            optimizer.validate()
            if optimizer.algorithm is Algorithm.SCHEDULED:
                for schedule in optimizer.schedules:
                    schedule.validate(attrs['max_epochs'])
        except OptimizerError as e:
            raise serializers.ValidationError(str(e))
        attrs['optimizer'] = optimizer
        return attrs

    def to_trial_config(self) -> TrialConfig:
        data = self.validated_data
        return TrialConfig(
            hidden_units=data['hidden_units'],
            optimizer=data['optimizer'],
            batch_size=data['batch_size'],
            accuracy_threshold=data['threshold'],
            max_epochs=data['max_epochs'],
            eval_interval=data['eval_interval'],
            seed=data['seed'],
        )


class RunSettingsSerializer(serializers.Serializer):
    """Validates the multi-trial settings: seeds, workers, scan sizes"""

    algorithm = serializers.CharField()
    runs = serializers.IntegerField(min_value=1)
    seed = serializers.IntegerField(min_value=0, max_value=MAX_SEED)
    seeds = serializers.CharField(required=False, allow_blank=True)
    workers = serializers.IntegerField(min_value=1)
    sizes = serializers.CharField(required=False)
    start_size = serializers.IntegerField(min_value=1, required=False)
    size_step = serializers.IntegerField(min_value=1, required=False)
    trace_epochs = serializers.FloatField(min_value=0.0, required=False)
    fit_starts = serializers.IntegerField(min_value=1, required=False)
    replay_seed_offset = serializers.IntegerField(min_value=0, required=False)

    def validate_algorithm(self, value):
        names = [part.strip() for part in value.split(',') if part.strip()]
        if not names:
            raise serializers.ValidationError("At least one algorithm is required.")
        try:
            algorithms = [Algorithm(name) for name in names]
        except ValueError as e:
            raise serializers.ValidationError(str(e))
        return list(dict.fromkeys(algorithms))

    def validate_seeds(self, value):
        if not value.strip():
            return None
        seeds = parse_int_list(value, 'seed', 0)
        if len(set(seeds)) != len(seeds):
            raise serializers.ValidationError("Seeds must be distinct.")
        return seeds

    def validate_sizes(self, value):
        return sorted(set(parse_int_list(value, 'size', 1)))

    def validate(self, attrs):
        if attrs.get('seeds') is None:
            attrs['seeds'] = [attrs['seed'] + offset for offset in range(attrs['runs'])]
        return attrs


class TrialResultSerializer(serializers.ModelSerializer):
    """Serializer for TrialResult model"""

    class Meta:
        model = TrialResult
        fields = [
            'trial_id',
            'run',
            'experiment',
            'algorithm',
            'hidden_units',
            'params',
            'seed',
            'epochs_to_threshold',
            'reached',
            'final_accuracy',
            'curve',
            'created_at',
        ]
        read_only_fields = ['trial_id', 'run', 'created_at']

    def validate_final_accuracy(self, value):
        if not 0.0 <= value <= 1.0:
            raise serializers.ValidationError("Accuracy must lie in [0, 1].")
        return value


class ExperimentRunSerializer(serializers.ModelSerializer):
    """Serializer for ExperimentRun model"""

    trial_count = serializers.ReadOnlyField()

    class Meta:
        model = ExperimentRun
        fields = [
            'run_id',
            'command',
            'status',
            'output_dir',
            'manifest',
            'summary',
            'trial_count',
            'created_at',
            'updated_at',
        ]
        read_only_fields = ['run_id', 'status', 'summary', 'created_at', 'updated_at']
