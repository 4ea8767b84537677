from rest_framework import serializers

from .exceptions import GeometryError
from .models import VerificationRun
from .services import CHECKS, RunConfig


def parse_domain(text, n):
    """'re1:0.5,2;im1:-1,1' -> {axis index: (lo, hi)}; axes are re1..ren, im1..imn."""
    intervals = {}
    for item in filter(None, (part.strip() for part in text.split(';'))):
        axis, sep, bounds = item.partition(':')
        if not sep:
            raise serializers.ValidationError(f"domain entry {item!r} is not axis:lo,hi")
        axis = axis.strip().lower()
        kind, index = axis[:2], axis[2:]
        if kind not in ('re', 'im') or not index.isdigit() or not 1 <= int(index) <= n:
            raise serializers.ValidationError(f"unknown domain axis {axis!r}; use re1..re{n}, im1..im{n}")
        try:
            lo, hi = (float(value) for value in bounds.split(','))
        except ValueError:
            raise serializers.ValidationError(f"domain bounds {bounds!r} are not lo,hi")
        if not lo < hi:
            raise serializers.ValidationError(f"empty interval for {axis}: {lo} >= {hi}")
        intervals[int(index) - 1 + (n if kind == 'im' else 0)] = (lo, hi)
    return intervals


def parse_tolerances(text):
    """'dnabla_i=1e-3,closedness=1e-3' -> {check: value}."""
    overrides = {}
    for item in filter(None, (part.strip() for part in text.split(','))):
        name, sep, value = item.partition('=')
        name = name.strip()
        if not sep or name not in CHECKS:
            raise serializers.ValidationError(f"unknown tolerance entry {item!r}")
        try:
            value = float(value)
        except ValueError:
            raise serializers.ValidationError(f"tolerance for {name} is not a number: {value!r}")
        if not value > 0:
            raise serializers.ValidationError(f"tolerance for {name} must be positive")
        overrides[name] = value
    return overrides


class RunConfigSerializer(serializers.Serializer):
    prepotential = serializers.CharField()
    n = serializers.IntegerField(min_value=1, required=False, allow_null=True)
    domain = serializers.CharField(required=False, allow_blank=True, allow_null=True)
    samples = serializers.IntegerField(min_value=1, required=False, allow_null=True)
    seed = serializers.IntegerField(min_value=0, max_value=2 ** 64 - 1, required=False, allow_null=True)
    tol = serializers.CharField(required=False, allow_blank=True, allow_null=True)
    fd_step = serializers.FloatField(required=False, allow_null=True)
    format = serializers.ChoiceField(choices=['json', 'csv'], default='json')
    out = serializers.CharField(required=False, allow_blank=True, allow_null=True)
    workers = serializers.IntegerField(min_value=1, required=False, allow_null=True)
    panels = serializers.IntegerField(min_value=1, required=False, allow_null=True)

    def validate_fd_step(self, value):
        if value is not None and value <= 0:
            raise serializers.ValidationError("fd_step must be positive")
        return value

    def validate_tol(self, value):
        return parse_tolerances(value or '')

    def validate(self, attrs):
        options = dict(
            prepotential=attrs['prepotential'],
            n=attrs.get('n'),
            samples=attrs.get('samples'),
            seed=attrs.get('seed'),
            tol_overrides=attrs.get('tol') or {},
            fd_step=attrs.get('fd_step'),
            output=attrs.get('out') or None,
            format=attrs.get('format', 'json'),
            workers=attrs.get('workers'),
            panels=attrs.get('panels'),
        )
        try:
            config = RunConfig(**options)
            if attrs.get('domain'):
                domain = config.domain.copy()
                for axis, interval in parse_domain(attrs['domain'], config.n).items():
                    domain[axis] = interval
                config = RunConfig(**{**options, 'n': config.n, 'domain': domain})
        except GeometryError as exc:
            raise serializers.ValidationError({'prepotential': str(exc)})
        attrs['config'] = config
        return attrs

    def create(self, validated_data):
        return validated_data['config']


class CheckResultSerializer(serializers.Serializer):
    name = serializers.CharField()
    points_evaluated = serializers.IntegerField()
    max_abs_residual = serializers.FloatField(allow_null=True)
    tolerance = serializers.FloatField()
    passed = serializers.BooleanField()
    status = serializers.CharField()
    points_skipped = serializers.IntegerField()


class FailureSerializer(serializers.Serializer):
    check = serializers.CharField()
    index = serializers.IntegerField()
    residual = serializers.FloatField(allow_null=True)
    w = serializers.JSONField()
    y = serializers.ListField(child=serializers.FloatField())


class VerificationReportSerializer(serializers.Serializer):
    schema_version = serializers.IntegerField()
    config = serializers.JSONField()
    sign_vector = serializers.JSONField()
    checks = CheckResultSerializer(many=True)
    failures = FailureSerializer(many=True)
    signatures = serializers.DictField(child=serializers.IntegerField())
    singular_points = serializers.IntegerField()
    warnings = serializers.ListField(child=serializers.CharField())
    exit_code = serializers.IntegerField()
    wall_time_ms = serializers.FloatField()


class ScanRowSerializer(serializers.Serializer):
    coordinates = serializers.ListField(child=serializers.FloatField())
    w = serializers.JSONField()
    x = serializers.ListField(child=serializers.FloatField(), allow_null=True)
    det_g = serializers.FloatField(allow_null=True)
    eigenvalues = serializers.ListField(child=serializers.FloatField(), allow_null=True)
    signature = serializers.ListField(child=serializers.IntegerField(), allow_null=True)
    transversal = serializers.BooleanField()
    singular = serializers.BooleanField()
    error = serializers.CharField(allow_null=True)


class FixtureRecordSerializer(serializers.Serializer):
    w = serializers.JSONField()
    x = serializers.ListField(child=serializers.FloatField())
    xi = serializers.ListField(child=serializers.FloatField())
    phi = serializers.FloatField()
    g = serializers.JSONField()
    I = serializers.JSONField()  # noqa: E741
    signature = serializers.ListField(child=serializers.IntegerField())
    z = serializers.JSONField()
    K = serializers.FloatField()
    theta = serializers.JSONField()


class FixtureDocumentSerializer(serializers.Serializer):
    schema_version = serializers.IntegerField()
    prepotential = serializers.CharField()
    expression = serializers.CharField()
    n = serializers.IntegerField()
    records = FixtureRecordSerializer(many=True)


class VerificationRunSerializer(serializers.ModelSerializer):
    failed_checks = serializers.ListField(child=serializers.CharField(), read_only=True)

    class Meta:
        model = VerificationRun
        fields = ['id', 'prepotential', 'n', 'samples', 'seed', 'passed', 'exit_code',
                  'wall_time_ms', 'sign_vector', 'failed_checks', 'created_at']
        read_only_fields = ['created_at']
