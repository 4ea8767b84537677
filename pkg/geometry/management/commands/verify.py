"""
Run the identity suite over seeded sample points of a prepotential's chart.

Exit codes: 0 all checks pass, 1 a check failed, 2 usage or parse error,
3 every sample point was singular.
"""

from django.core.management.base import BaseCommand, CommandError

from geometry.cli import add_run_arguments, build_config, render, write_output
from geometry.models import VerificationRun
from geometry.serializers import VerificationReportSerializer
from geometry.services import EXIT_ALL_SINGULAR, EXIT_CHECK_FAILED, run_verify


class Command(BaseCommand):
    help = 'Verify the special Kahler and hyperkahler identities on sampled points'

    def add_arguments(self, parser):
        add_run_arguments(parser)
        parser.add_argument('--panels', type=int, help='Simpson panels per segment in the xi-recovery check')
        parser.add_argument(
            '--record',
            action='store_true',
            help='Archive the report in the database',
        )

    def handle(self, *args, **options):
        """Main command handler"""
        config = build_config(options)
        report = run_verify(config)
        data = VerificationReportSerializer(report).data
        write_output(self, render(data, data['checks'], config.format), config.output)

        if options['record']:
            run = VerificationRun.record(report)
            self.stderr.write(self.style.SUCCESS(f'Recorded run {run.id}'))

        for check in report.checks:
            if check['status'] == 'fail':
                self.stderr.write(self.style.ERROR(
                    f"  FAIL {check['name']}: {check['max_abs_residual']:.3e} >= {check['tolerance']:.1e}"))
            elif check['status'] == 'skipped-singular':
                self.stderr.write(self.style.WARNING(f"  SKIP {check['name']}: no regular point could evaluate it"))
        for message in report.warnings:
            self.stderr.write(self.style.WARNING(f'  {message}'))

        if report.exit_code == EXIT_ALL_SINGULAR:
            raise CommandError('Every sample point is singular; check the domain box', returncode=EXIT_ALL_SINGULAR)
        if report.exit_code == EXIT_CHECK_FAILED:
            failed = sum(1 for check in report.checks if not check['passed'])
            raise CommandError(f'{failed} check(s) failed', returncode=EXIT_CHECK_FAILED)
        self.stderr.write(self.style.SUCCESS(
            f'All {len(report.checks)} checks passed on {config.samples} points '
            f'({report.singular_points} singular)'))
