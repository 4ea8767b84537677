from django.db import models


class VerificationRun(models.Model):
    """Archived report of one `verify` run."""
    prepotential = models.CharField(max_length=500, db_index=True)
    n = models.PositiveIntegerField()
    samples = models.PositiveIntegerField()
    seed = models.CharField(max_length=20)  # u64 does not fit a signed BigIntegerField
    passed = models.BooleanField(default=False, db_index=True)
    exit_code = models.PositiveSmallIntegerField()
    wall_time_ms = models.FloatField()
    sign_vector = models.JSONField(default=dict)
    report = models.JSONField(default=dict)
    created_at = models.DateTimeField(auto_now_add=True, db_index=True)

    class Meta:
        ordering = ['-created_at']
        indexes = [
            models.Index(fields=['prepotential', '-created_at'], name='run_prepot_created_idx'),
        ]

    def __str__(self):
        status = 'pass' if self.passed else f'exit {self.exit_code}'
        return f"VerificationRun {self.id} - {self.prepotential} (n={self.n}, {status})"

    @classmethod
    def record(cls, report):
        config = report.config
        return cls.objects.create(
            prepotential=config['prepotential'],
            n=config['n'],
            samples=config['samples'],
            seed=str(config['seed']),
            passed=report.passed,
            exit_code=report.exit_code,
            wall_time_ms=report.wall_time_ms,
            sign_vector=report.sign_vector,
            report=report.as_dict(),
        )

    def failed_checks(self):
        return [check['name'] for check in self.report.get('checks', []) if not check['passed']]
