"""
List archived verification runs, newest first.
"""

from django.core.management.base import BaseCommand, CommandError

from geometry.cli import render, write_output
from geometry.models import VerificationRun
from geometry.serializers import VerificationRunSerializer
from geometry.services import EXIT_USAGE


class Command(BaseCommand):
    help = 'List verification runs recorded with verify --record'

    def add_arguments(self, parser):
        parser.add_argument('--prepotential', '-p', help='only runs of this prepotential')
        parser.add_argument('--failed', action='store_true', help='only runs that did not pass')
        parser.add_argument('--limit', type=int, default=20)
        parser.add_argument('--format', choices=['json', 'csv'], default='json')
        parser.add_argument('--out', help='output path; stdout when omitted')

    def handle(self, *args, **options):
        if options['limit'] < 1:
            raise CommandError(f"limit must be at least 1, got {options['limit']}", returncode=EXIT_USAGE)

        runs = VerificationRun.objects.all()
        if options['prepotential']:
            runs = runs.filter(prepotential=options['prepotential'])
        if options['failed']:
            runs = runs.filter(passed=False)
        total = runs.count()

        data = VerificationRunSerializer(runs[:options['limit']], many=True).data
        write_output(self, render({'count': total, 'runs': data}, data, options['format']), options['out'])
        self.stderr.write(self.style.SUCCESS(f'Listed {len(data)} of {total} run(s)'))
