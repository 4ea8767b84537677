from django.core.management.base import BaseCommand, CommandError

from geometry.cli import add_run_arguments, build_config, render, write_output
from geometry.exceptions import GeometryError
from geometry.serializers import ScanRowSerializer
from geometry.services import EXIT_USAGE, SCHEMA_VERSION, run_scan


class Command(BaseCommand):
    help = 'Tabulate det g, eigenvalues and signature of the metric over a grid'

    def add_arguments(self, parser):
        add_run_arguments(parser)
        parser.add_argument('--grid', default='20', help="points per axis, one count or 'c1,c2,...'")
        parser.add_argument('--chart', choices=['w', 'x'], default='w',
                            help='grid in the parameters w or in the flat coordinates x')

    def handle(self, *args, **options):
        config = build_config(options)
        try:
            grid = [int(count) for count in options['grid'].split(',')]
            rows = run_scan(config, grid, chart=options['chart'])
        except ValueError as exc:
            raise CommandError(f'Invalid grid {options["grid"]!r}: {exc}', returncode=EXIT_USAGE)
        except GeometryError as exc:
            raise CommandError(str(exc), returncode=EXIT_USAGE)

        data = ScanRowSerializer(rows, many=True).data
        document = {'schema_version': SCHEMA_VERSION, 'config': config.as_dict(),
                    'chart': options['chart'], 'rows': data}
        write_output(self, render(document, data, config.format), config.output)

        singular = sum(1 for row in rows if row['singular'])
        style = self.style.WARNING if singular else self.style.SUCCESS
        self.stderr.write(style(f'Scanned {len(rows)} points, {singular} singular'))
